//! Unit groups: torsion generator, fundamental units, logarithmic embeddings,
//! discrete logarithms and the Galois action on exponent vectors.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};
use rug::Float;

use crate::ball::RBall;
use crate::context::FieldContext;
use crate::error::{Error, Result};
use crate::field::NFElement;

#[derive(Clone, Debug)]
pub struct UnitGroupData {
    pub zeta: NFElement,
    pub w: u64,
    pub fund_units: Vec<NFElement>,
    /// Regulator as declared by the bundle (decimal string), if any.
    pub declared_regulator: Option<String>,
}

impl UnitGroupData {
    pub fn rank(&self) -> usize {
        self.fund_units.len()
    }
}

/// u = ζ^k ∏ ε_i^{a_i}, with 0 ≤ k < w.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct ExponentVector {
    pub k: u64,
    pub a: Vec<i64>,
}

impl ExponentVector {
    pub fn zero(r: usize) -> Self {
        ExponentVector { k: 0, a: vec![0; r] }
    }

    pub fn max_abs(&self) -> i64 {
        self.a.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {:?})", self.k, self.a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum UnitIssue {
    NonUnitGenerator { index: usize },
    DependentUnits,
    TorsionOrderWrong { detail: String },
    RegulatorMismatch { declared: String, computed: f64 },
    RankMismatch { expected: usize, got: usize },
}

impl fmt::Display for UnitIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitIssue::NonUnitGenerator { index } => write!(f, "NonUnitGenerator(index {})", index),
            UnitIssue::DependentUnits => write!(f, "DependentUnits"),
            UnitIssue::TorsionOrderWrong { detail } => write!(f, "TorsionOrderWrong({})", detail),
            UnitIssue::RegulatorMismatch { declared, computed } => {
                write!(f, "RegulatorMismatch(declared {}, computed {:.12})", declared, computed)
            }
            UnitIssue::RankMismatch { expected, got } => write!(f, "RankMismatch(expected {}, got {})", expected, got),
        }
    }
}

/// σ(ζ) = ζ^s and σ(ε_i) = ζ^{t_i} ∏_j ε_j^{m[j][i]}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentAction {
    pub s: u64,
    pub t: Vec<i64>,
    pub m: Vec<Vec<i64>>,
}

pub fn is_unit_norm(u: &NFElement) -> bool {
    let nm = u.norm();
    nm.is_one() || (-nm).is_one()
}

/// (2·log|ι_ν u|)_ν over the places, as certified balls.
pub fn log_embedding(u: &NFElement, ctx: &FieldContext) -> Result<Vec<RBall>> {
    if !is_unit_norm(u) {
        return Err(Error::NotAUnit { norm: crate::poly::format_rational(&u.norm()) });
    }
    (0..ctx.s())
        .map(|v| {
            let z = ctx.table.embed_at(u, ctx.place_embedding(v));
            z.log_abs().map(|l| l.mul_f64(2.0)).ok_or(Error::PrecisionExhausted { bits: ctx.precision() })
        })
        .collect()
}

/// Certified determinant by cofactor expansion (small r only).
pub fn det_balls(m: &[Vec<RBall>]) -> RBall {
    let r = m.len();
    if r == 0 {
        return RBall::from_f64(1.0, 64);
    }
    let p = m[0][0].prec();
    if r == 1 {
        return m[0][0].clone();
    }
    let mut acc = RBall::zero(p);
    for j in 0..r {
        let minor: Vec<Vec<RBall>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][j].mul(&det_balls(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Inverse through the adjugate; None when the determinant ball meets zero.
pub fn inverse_balls(m: &[Vec<RBall>]) -> Option<Vec<Vec<RBall>>> {
    let r = m.len();
    let det = det_balls(m);
    if det.contains_zero() {
        return None;
    }
    let mut inv = vec![vec![RBall::zero(det.prec()); r]; r];
    for i in 0..r {
        for j in 0..r {
            let minor: Vec<Vec<RBall>> = (0..r)
                .filter(|&a| a != j)
                .map(|a| (0..r).filter(|&b| b != i).map(|b| m[a][b].clone()).collect())
                .collect();
            let c = det_balls(&minor);
            let c = if (i + j) % 2 == 0 { c } else { c.neg() };
            inv[i][j] = c.div(&det);
        }
    }
    Some(inv)
}

/// Log matrix L[ν][i] = 2 log|ι_ν ε_i| over the first r places.
pub fn log_matrix(ug: &UnitGroupData, ctx: &FieldContext) -> Result<Vec<Vec<RBall>>> {
    let r = ug.rank();
    let cols: Vec<Vec<RBall>> = ug.fund_units.iter().map(|e| log_embedding(e, ctx)).collect::<Result<_>>()?;
    Ok((0..r).map(|v| (0..r).map(|i| cols[i][v].clone()).collect()).collect())
}

pub fn regulator(ug: &UnitGroupData, ctx: &FieldContext) -> Result<RBall> {
    Ok(det_balls(&log_matrix(ug, ctx)?).abs())
}

/// Checks the unit-group invariants; an empty list means valid.
pub fn validate_unit_group(ug: &UnitGroupData, ctx: &FieldContext) -> Vec<UnitIssue> {
    let mut issues = Vec::new();
    let expected = ctx.s() - 1;
    if ug.rank() != expected {
        issues.push(UnitIssue::RankMismatch { expected, got: ug.rank() });
    }
    if ug.w < 2 || ug.w % 2 == 1 {
        issues.push(UnitIssue::TorsionOrderWrong { detail: format!("w = {} must be even", ug.w) });
    }
    if !is_unit_norm(&ug.zeta) {
        issues.push(UnitIssue::TorsionOrderWrong { detail: "zeta is not a unit".into() });
    } else if ug.w >= 2 {
        if !ug.zeta.pow_u(ug.w).is_one() {
            issues.push(UnitIssue::TorsionOrderWrong { detail: format!("zeta^{} != 1", ug.w) });
        } else {
            for p in prime_divisors(ug.w) {
                if ug.zeta.pow_u(ug.w / p).is_one() {
                    issues.push(UnitIssue::TorsionOrderWrong { detail: format!("zeta^{} = 1", ug.w / p) });
                }
            }
        }
    }
    for (i, e) in ug.fund_units.iter().enumerate() {
        if !is_unit_norm(e) || !e.is_algebraic_integer() {
            issues.push(UnitIssue::NonUnitGenerator { index: i });
        }
    }
    if issues.iter().any(|x| matches!(x, UnitIssue::NonUnitGenerator { .. } | UnitIssue::RankMismatch { .. })) {
        return issues;
    }
    match regulator(ug, ctx) {
        Ok(reg) => {
            let up = reg.upper_f64();
            if reg.contains_zero() || up < 1e-12 {
                issues.push(UnitIssue::DependentUnits);
            } else if let Some(decl) = &ug.declared_regulator {
                let d: f64 = decl.trim().parse().unwrap_or(f64::NAN);
                let c = reg.mid_f64();
                if !((c - d).abs() <= 1e-6 * c.abs()) {
                    issues.push(UnitIssue::RegulatorMismatch { declared: decl.clone(), computed: c });
                }
            }
        }
        Err(_) => issues.push(UnitIssue::DependentUnits),
    }
    issues
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Unit group with everything needed for exact discrete logarithms.
#[derive(Clone, Debug)]
pub struct UnitSystem {
    pub data: UnitGroupData,
    pub ctx: Arc<FieldContext>,
    zeta_pows: Vec<NFElement>,
    zeta_index: HashMap<NFElement, u64>,
    unit_inv: Vec<NFElement>,
    /// 2 log|ι_ν ε_i| for every place ν (rows) and unit i (columns).
    pub log_rows: Vec<Vec<f64>>,
    linv: Vec<Vec<f64>>,
    /// Exponent action of each automorphism.
    pub action: Vec<ExponentAction>,
}

impl UnitSystem {
    pub fn new(data: UnitGroupData, ctx: Arc<FieldContext>) -> Result<UnitSystem> {
        let issues = validate_unit_group(&data, &ctx);
        let fatal: Vec<String> = issues
            .iter()
            .filter(|i| !matches!(i, UnitIssue::RegulatorMismatch { .. }))
            .map(|i| i.to_string())
            .collect();
        if !fatal.is_empty() {
            return Err(Error::Validation { check: "unit_group".into(), witness: fatal.join("; ") });
        }
        let w = data.w;
        let mut zeta_pows = Vec::with_capacity(w as usize);
        let mut cur = NFElement::one(&ctx.field);
        for _ in 0..w {
            zeta_pows.push(cur.clone());
            cur = cur.mul(&data.zeta);
        }
        let zeta_index = zeta_pows.iter().enumerate().map(|(i, z)| (z.clone(), i as u64)).collect();
        let unit_inv = data.fund_units.iter().map(|e| e.inv()).collect::<Result<Vec<_>>>()?;
        let r = data.rank();
        let full: Vec<Vec<RBall>> = data.fund_units.iter().map(|e| log_embedding(e, &ctx)).collect::<Result<_>>()?;
        let log_rows: Vec<Vec<f64>> = (0..ctx.s()).map(|v| (0..r).map(|i| full[i][v].mid_f64()).collect()).collect();
        let square: Vec<Vec<f64>> = log_rows[..r].to_vec();
        let linv = invert_f64(&square).ok_or(Error::Validation { check: "unit_group".into(), witness: "DependentUnits".into() })?;
        let mut sys = UnitSystem { data, ctx, zeta_pows, zeta_index, unit_inv, log_rows, linv, action: Vec::new() };
        let mut action = Vec::with_capacity(sys.ctx.gal.order());
        for s in 0..sys.ctx.gal.order() {
            let sz = sys.ctx.apply(s, &sys.data.zeta);
            let se = *sys.zeta_index.get(&sz).ok_or(Error::Validation {
                check: "unit_group".into(),
                witness: format!("automorphism {} does not map zeta to a power of zeta", s),
            })?;
            let mut t = vec![0i64; r];
            let mut m = vec![vec![0i64; r]; r];
            for i in 0..r {
                let img = sys.ctx.apply(s, &sys.data.fund_units[i]);
                let e = sys.discrete_log(&img).map_err(|_| Error::Validation {
                    check: "unit_group".into(),
                    witness: format!("image of unit {} under automorphism {} is not in the span", i, s),
                })?;
                t[i] = e.k as i64;
                for j in 0..r {
                    m[j][i] = e.a[j];
                }
            }
            action.push(ExponentAction { s: se, t, m });
        }
        sys.action = action;
        Ok(sys)
    }

    pub fn w(&self) -> u64 {
        self.data.w
    }

    pub fn rank(&self) -> usize {
        self.data.rank()
    }

    pub fn zeta_pow(&self, k: u64) -> &NFElement {
        &self.zeta_pows[(k % self.data.w) as usize]
    }

    /// k with u = ζ^k, if u is a power of ζ.
    pub fn torsion_log(&self, u: &NFElement) -> Option<u64> {
        self.zeta_index.get(u).copied()
    }

    pub fn from_exponents(&self, e: &ExponentVector) -> NFElement {
        let mut acc = self.zeta_pow(e.k).clone();
        for (i, &a) in e.a.iter().enumerate() {
            if a != 0 {
                let base = if a > 0 { &self.data.fund_units[i] } else { &self.unit_inv[i] };
                acc = acc.mul(&base.pow_u(a.unsigned_abs()));
            }
        }
        acc
    }

    fn free_part(&self, a: &[i64]) -> NFElement {
        self.from_exponents(&ExponentVector { k: 0, a: a.to_vec() })
    }

    /// Exponents (k, a) with u = ζ^k ∏ ε_i^{a_i}, verified by exact
    /// reconstruction.
    pub fn discrete_log(&self, u: &NFElement) -> Result<ExponentVector> {
        if u.is_zero() || !is_unit_norm(u) {
            return Err(Error::NotAUnit { norm: crate::poly::format_rational(&u.norm()) });
        }
        let r = self.rank();
        if r == 0 {
            return self.torsion_log(u).map(|k| ExponentVector { k, a: vec![] }).ok_or(Error::NotInSpan);
        }
        let lg: Vec<f64> = (0..r)
            .map(|v| {
                let z = self.ctx.table.embed_at(u, self.ctx.place_embedding(v));
                z.log_abs().map(|l| 2.0 * l.mid_f64()).ok_or(Error::PrecisionExhausted { bits: self.ctx.precision() })
            })
            .collect::<Result<_>>()?;
        let real: Vec<f64> = (0..r).map(|i| (0..r).map(|j| self.linv[i][j] * lg[j]).sum()).collect();
        let base: Vec<i64> = real.iter().map(|x| x.round() as i64).collect();
        // ±1 neighbourhood, nearest candidates first
        let mut cands: Vec<(f64, Vec<i64>)> = Vec::new();
        for code in 0..3usize.pow(r as u32) {
            let mut c = code;
            let mut a = base.clone();
            for x in a.iter_mut() {
                *x += (c % 3) as i64 - 1;
                c /= 3;
            }
            let d: f64 = a.iter().zip(&real).map(|(x, y)| (*x as f64 - y).powi(2)).sum();
            cands.push((d, a));
        }
        cands.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then_with(|| x.1.cmp(&y.1)));
        for (_, a) in cands {
            let q = u.mul(&self.free_part(&a.iter().map(|x| -x).collect::<Vec<_>>()));
            if let Some(k) = self.torsion_log(&q) {
                return Ok(ExponentVector { k, a });
            }
        }
        if !u.is_algebraic_integer() {
            return Err(Error::NotAUnit { norm: crate::poly::format_rational(&u.norm()) });
        }
        Err(Error::NotInSpan)
    }

    /// Exponents of σ_s(u) from those of u.
    pub fn apply_exponents(&self, s: usize, e: &ExponentVector) -> ExponentVector {
        let act = &self.action[s];
        let r = self.rank();
        let w = self.data.w as i64;
        let mut k = (act.s as i64 * e.k as i64).rem_euclid(w);
        for i in 0..r {
            k = (k + act.t[i] * e.a[i]).rem_euclid(w);
        }
        let a = (0..r).map(|j| (0..r).map(|i| act.m[j][i] * e.a[i]).sum()).collect();
        ExponentVector { k: k as u64, a }
    }

    pub fn mul_exponents(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        ExponentVector {
            k: (x.k + y.k) % self.data.w,
            a: x.a.iter().zip(&y.a).map(|(p, q)| p + q).collect(),
        }
    }

    pub fn inv_exponents(&self, x: &ExponentVector) -> ExponentVector {
        ExponentVector { k: (self.data.w - x.k % self.data.w) % self.data.w, a: x.a.iter().map(|p| -p).collect() }
    }

    /// (H(ū), h(ū)) with H = ∏_ν max_i ||u_i||_ν and ||x||_ν = |ι_ν x|².
    pub fn tuple_height(&self, units: &[NFElement]) -> Result<(RBall, RBall)> {
        tuple_height(units, &self.ctx)
    }
}

pub fn tuple_height(units: &[NFElement], ctx: &FieldContext) -> Result<(RBall, RBall)> {
    let p = ctx.table.working_bits();
    let mut h = RBall::zero(p);
    for v in 0..ctx.s() {
        let mut best: Option<RBall> = None;
        for u in units {
            let l = ctx
                .table
                .embed_at(u, ctx.place_embedding(v))
                .log_abs()
                .ok_or(Error::PrecisionExhausted { bits: ctx.precision() })?
                .mul_f64(2.0);
            best = Some(match best {
                None => l,
                Some(b) => b.max(&l),
            });
        }
        if let Some(b) = best {
            h = h.add(&b);
        }
    }
    Ok((h.exp(), h))
}

fn invert_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let r = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut x = row.clone();
            x.extend((0..r).map(|j| (i == j) as i32 as f64));
            x
        })
        .collect();
    for c in 0..r {
        let p = (c..r).max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        let piv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= piv;
        }
        for i in 0..r {
            if i != c {
                let f = a[i][c];
                let rowc = a[c].clone();
                for (x, y) in a[i].iter_mut().zip(rowc) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[r..].to_vec()).collect())
}

/// Bound on the absolute value of a real ball, as f64 rounded upward.
pub fn ball_abs_upper(b: &RBall) -> f64 {
    let hi = Float::with_val(64, b.upper());
    let lo = Float::with_val(64, b.lower());
    let m = if hi.clone().abs() > lo.clone().abs() { hi.abs() } else { lo.abs() };
    let v = m.to_f64();
    v + v.abs() * 1e-15 + f64::MIN_POSITIVE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;

    pub(crate) fn zeta7_units() -> UnitSystem {
        let k = NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap();
        let ctx = Arc::new(FieldContext::new(&k, 256).unwrap());
        let z = NFElement::theta(&k);
        let data = UnitGroupData {
            zeta: z.neg(),
            w: 14,
            fund_units: vec![NFElement::from_i64_coords(&k, &[1, 1]), NFElement::from_i64_coords(&k, &[1, 1, 1])],
            declared_regulator: Some("2.10181872849028955335530418179".into()),
        };
        UnitSystem::new(data, ctx).unwrap()
    }

    #[test]
    fn zeta7_group_valid() {
        let us = zeta7_units();
        assert!(validate_unit_group(&us.data, &us.ctx).is_empty());
        assert_eq!(us.action.len(), 6);
    }

    #[test]
    fn discrete_log_roundtrip() {
        let us = zeta7_units();
        let e = ExponentVector { k: 3, a: vec![2, -1] };
        let u = us.from_exponents(&e);
        assert_eq!(us.discrete_log(&u).unwrap(), e);
        assert_eq!(us.discrete_log(&NFElement::one(&us.ctx.field)).unwrap(), ExponentVector::zero(2));
        let two = NFElement::from_int(&us.ctx.field, 2);
        assert!(matches!(us.discrete_log(&two), Err(Error::NotAUnit { .. })));
    }

    #[test]
    fn action_matches_direct_application() {
        let us = zeta7_units();
        let e = ExponentVector { k: 5, a: vec![-3, 4] };
        let u = us.from_exponents(&e);
        for s in 0..6 {
            let direct = us.ctx.apply(s, &u);
            assert_eq!(us.from_exponents(&us.apply_exponents(s, &e)), direct);
        }
    }

    #[test]
    fn dependent_and_nonunit_generators() {
        let us = zeta7_units();
        let mut d = us.data.clone();
        d.fund_units[1] = d.fund_units[0].square();
        assert!(validate_unit_group(&d, &us.ctx).contains(&UnitIssue::DependentUnits));
        let mut d = us.data.clone();
        d.fund_units[0] = NFElement::from_int(&us.ctx.field, 2);
        assert!(validate_unit_group(&d, &us.ctx).contains(&UnitIssue::NonUnitGenerator { index: 0 }));
    }

    #[test]
    fn heights_of_tuples() {
        let us = zeta7_units();
        let k = &us.ctx.field;
        let roots: Vec<NFElement> = (0..6).map(|j| NFElement::theta_pow(k, j)).collect();
        let (hh, h) = us.tuple_height(&roots).unwrap();
        assert!(h.contains_f64(0.0) && hh.contains_f64(1.0));
        let u = us.from_exponents(&ExponentVector { k: 0, a: vec![3, -2] });
        let orbit = us.ctx.gal.orbit(&u);
        let (_, h1) = us.tuple_height(&orbit).unwrap();
        let mut perm = orbit.clone();
        perm.rotate_left(2);
        let (_, h2) = us.tuple_height(&perm).unwrap();
        assert!(h1.overlaps(&h2));
        assert!(h1.lower_f64() > 0.0);
    }
}
