//! Certified complex roots of the defining polynomial and the embeddings
//! σ_j : K → C they induce.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rug::Float;

use crate::ball::{CBall, RBall};
use crate::error::{Error, Result};
use crate::field::{NFElement, NumberField};

#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    /// Requested precision in bits; root centers carry about twice this.
    pub precision: u32,
    pub roots: Vec<CBall>,
}

/// Plain multiprecision complex numbers for the root-polishing iteration.
#[derive(Clone, Debug)]
struct Cx {
    re: Float,
    im: Float,
}

impl Cx {
    fn new(p: u32, re: f64, im: f64) -> Cx {
        Cx { re: Float::with_val(p, re), im: Float::with_val(p, im) }
    }
    fn add(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        Cx { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
    fn sub(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        Cx { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
    fn mul(&self, o: &Cx) -> Cx {
        let p = self.re.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cx { re, im }
    }
    fn norm2(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }
    fn recip(&self) -> Cx {
        let p = self.re.prec();
        let n = self.norm2();
        Cx { re: Float::with_val(p, &self.re / &n), im: Float::with_val(p, -Float::with_val(p, &self.im / &n)) }
    }
    fn abs_f64(&self) -> f64 {
        self.norm2().sqrt().to_f64()
    }
}

fn horner_cx(f: &[BigInt], z: &Cx) -> (Cx, Cx) {
    let p = z.re.prec();
    let n = f.len() - 1;
    let mut v = Cx { re: Float::with_val(p, 0), im: Float::with_val(p, 0) };
    let mut d = v.clone();
    for (i, c) in f.iter().enumerate().rev() {
        if i < n {
            d = d.mul(z).add(&v);
        }
        v = v.mul(z);
        let cf = Float::with_val(p, &crate::ball::bigint_to_integer(c));
        v.re += cf;
    }
    (v, d)
}

fn horner_ball(f: &[BigInt], z: &CBall) -> (CBall, CBall) {
    let p = z.prec();
    let n = f.len() - 1;
    let mut v = CBall::zero(p);
    let mut d = CBall::zero(p);
    for (i, c) in f.iter().enumerate().rev() {
        if i < n {
            d = d.mul(z).add(&v);
        }
        v = v.mul(z).add(&CBall::from_bigint(c, p));
    }
    (v, d)
}

/// Double-precision Aberth iteration from points on a circle whose radius
/// bounds the roots; gives seeds for the multiprecision pass.
fn float_seeds(f: &[BigInt]) -> Vec<(f64, f64)> {
    let n = f.len() - 1;
    let c: Vec<f64> = f.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let lead = c[n];
    let radius = (0..n)
        .map(|i| (c[i] / lead).abs().powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            (radius * t.cos(), radius * t.sin())
        })
        .collect();
    let cmul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let cinv = |a: (f64, f64)| {
        let m = a.0 * a.0 + a.1 * a.1;
        (a.0 / m, -a.1 / m)
    };
    for _ in 0..2000 {
        let mut moved = 0f64;
        for i in 0..n {
            let (mut v, mut d) = ((0.0, 0.0), (0.0, 0.0));
            for k in (0..=n).rev() {
                if k < n {
                    let t = cmul(d, z[i]);
                    d = (t.0 + v.0, t.1 + v.1);
                }
                let t = cmul(v, z[i]);
                v = (t.0 + c[k], t.1);
            }
            if v == (0.0, 0.0) || d == (0.0, 0.0) {
                continue;
            }
            let ratio = cmul(v, cinv(d));
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let r = cinv((z[i].0 - z[j].0, z[i].1 - z[j].1));
                    s = (s.0 + r.0, s.1 + r.1);
                }
            }
            let rs = cmul(ratio, s);
            let step = cmul(ratio, cinv((1.0 - rs.0, -rs.1)));
            if !(step.0.is_finite() && step.1.is_finite()) {
                continue;
            }
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            let scale = 1.0 + (z[i].0 * z[i].0 + z[i].1 * z[i].1).sqrt();
            moved = moved.max((step.0 * step.0 + step.1 * step.1).sqrt() / scale);
        }
        if moved < 1e-14 {
            break;
        }
    }
    z
}

/// Simultaneous Aberth–Ehrlich iteration from the given seeds.
fn aberth(f: &[BigInt], seeds: &[(f64, f64)], prec: u32) -> Vec<Cx> {
    let n = seeds.len();
    let mut z: Vec<Cx> = seeds
        .iter()
        .enumerate()
        .map(|(i, &(re, im))| {
            // break exact symmetry of coincident seeds
            let j = 1e-9 * (i as f64 + 1.0);
            Cx::new(prec, re + j, im + 0.5 * j)
        })
        .collect();
    let tol = (-(prec as f64) + 16.0).exp2();
    for _ in 0..100 {
        let mut max_step = 0f64;
        for i in 0..n {
            let (v, d) = horner_cx(f, &z[i]);
            if v.norm2().is_zero() {
                continue;
            }
            let ratio = v.mul(&d.recip());
            let mut s = Cx::new(prec, 0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s = s.add(&z[i].sub(&z[j]).recip());
                }
            }
            let denom = Cx::new(prec, 1.0, 0.0).sub(&ratio.mul(&s));
            let step = ratio.mul(&denom.recip());
            max_step = max_step.max(step.abs_f64() / (1.0 + z[i].abs_f64()));
            z[i] = z[i].sub(&step);
        }
        if max_step < tol {
            break;
        }
    }
    z
}

/// Newton polish of a single root at precision `prec`.
fn newton(f: &[BigInt], z0: &Cx, prec: u32) -> Cx {
    let mut z = Cx { re: Float::with_val(prec, &z0.re), im: Float::with_val(prec, &z0.im) };
    let tol = (-(prec as f64) + 8.0).exp2();
    for _ in 0..200 {
        let (v, d) = horner_cx(f, &z);
        if v.norm2().is_zero() {
            break;
        }
        let step = v.mul(&d.recip());
        z = z.sub(&step);
        if step.abs_f64() <= tol * (1.0 + z.abs_f64()) {
            break;
        }
    }
    z
}

/// Inclusion disk for a root near `z`: radius n·|f(z)|/|f'(z)|.
fn inclusion_disk(f: &[BigInt], z: &Cx) -> Option<CBall> {
    let n = (f.len() - 1) as u32;
    let p = z.re.prec();
    let c = CBall::new(z.re.clone(), z.im.clone(), Float::new(crate::ball::RAD_PREC));
    let (v, d) = horner_ball(f, &c);
    let num = v.abs_upper();
    let den = d.abs_lower();
    if den <= 0 {
        return None;
    }
    let r = Float::with_val_round(crate::ball::RAD_PREC, &num / &den, rug::float::Round::Up).0;
    let r = Float::with_val_round(crate::ball::RAD_PREC, &r * n, rug::float::Round::Up).0;
    let _ = p;
    Some(CBall::new(z.re.clone(), z.im.clone(), r))
}

fn pairwise_disjoint(d: &[CBall]) -> bool {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if !d[i].disjoint(&d[j]) {
                return false;
            }
        }
    }
    true
}

impl EmbeddingTable {
    pub fn compute(field: &NumberField, precision: u32) -> Result<EmbeddingTable> {
        let f = &field.poly;
        let n = field.n;
        let seeds = float_seeds(f);
        let mut wp = 2 * precision + 64;
        for _attempt in 0..4 {
            let approx = aberth(f, &seeds, wp);
            let polished: Vec<Cx> = approx.iter().map(|z| newton(f, z, wp)).collect();
            let disks: Option<Vec<CBall>> = polished.iter().map(|z| inclusion_disk(f, z)).collect();
            if let Some(disks) = disks {
                if disks.len() == n && pairwise_disjoint(&disks) {
                    let roots = order_roots(disks)?;
                    return Ok(EmbeddingTable { precision, roots });
                }
            }
            wp *= 2;
        }
        Err(Error::PrecisionExhausted { bits: wp })
    }

    /// Recomputes the table at a higher precision, keeping each new disk
    /// inside its predecessor.
    pub fn refine(&self, field: &NumberField, precision: u32) -> Result<EmbeddingTable> {
        let f = &field.poly;
        let wp = 2 * precision + 64;
        let mut roots = Vec::with_capacity(self.roots.len());
        for old in &self.roots {
            let z0 = Cx { re: old.re.clone(), im: old.im.clone() };
            let z = newton(f, &z0, wp);
            let d = inclusion_disk(f, &z).ok_or(Error::PrecisionExhausted { bits: wp })?;
            if old.contains(&d) {
                roots.push(d);
            } else if old.overlaps(&d) {
                roots.push(old.clone());
            } else {
                return Err(Error::PrecisionExhausted { bits: wp });
            }
        }
        if !pairwise_disjoint(&roots) {
            return Err(Error::PrecisionExhausted { bits: wp });
        }
        Ok(EmbeddingTable { precision, roots })
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn working_bits(&self) -> u32 {
        self.roots[0].prec()
    }

    /// σ_j(a) for all j, as certified disks.
    pub fn embed(&self, a: &NFElement) -> Vec<CBall> {
        (0..self.roots.len()).map(|j| self.embed_at(a, j)).collect()
    }

    pub fn embed_at(&self, a: &NFElement, j: usize) -> CBall {
        let z = &self.roots[j];
        let p = z.prec();
        let num = a.numerators();
        let mut v = CBall::zero(p);
        for c in num.iter().rev() {
            v = v.mul(z);
            if !c.is_zero() {
                v = v.add(&CBall::from_bigint(c, p));
            }
        }
        let den = a.denominator();
        if den == &BigInt::from(1) {
            v
        } else {
            let d = RBall::from_q(&crate::poly::qi(den), p);
            let inv = RBall::from_f64(1.0, p).div(&d);
            v.mul_real(&inv)
        }
    }

    /// Embeds and fails if any output radius exceeds 2^(-bits).
    pub fn embed_checked(&self, a: &NFElement, bits: u32) -> Result<Vec<CBall>> {
        let out = self.embed(a);
        let lim = Float::with_val(64, Float::u_exp(1, -(bits as i32)));
        if out.iter().any(|z| z.rad > lim) {
            return Err(Error::PrecisionExhausted { bits: self.precision });
        }
        Ok(out)
    }

    /// Index of the root whose disk contains the value `z` (an exact root of f
    /// enclosed by a disk). None when no unique match.
    pub fn locate_root(&self, z: &CBall) -> Option<usize> {
        let hits: Vec<usize> = (0..self.roots.len()).filter(|&j| self.roots[j].overlaps(z)).collect();
        (hits.len() == 1).then(|| hits[0])
    }
}

/// Orders certified roots: upper half-plane representatives sorted by
/// (re, im), each followed by its conjugate; real roots last.
fn order_roots(disks: Vec<CBall>) -> Result<Vec<CBall>> {
    let n = disks.len();
    let mut partner = vec![usize::MAX; n];
    for i in 0..n {
        let c = disks[i].conj();
        let hits: Vec<usize> = (0..n).filter(|&j| c.overlaps(&disks[j])).collect();
        if hits.len() != 1 {
            return Err(Error::PrecisionExhausted { bits: disks[i].prec() });
        }
        partner[i] = hits[0];
    }
    let mut uppers: Vec<usize> = (0..n).filter(|&i| partner[i] != i && disks[i].im > 0).collect();
    let mut reals: Vec<usize> = (0..n).filter(|&i| partner[i] == i).collect();
    let cmp = |a: &usize, b: &usize| {
        let (da, db) = (&disks[*a], &disks[*b]);
        let gap = Float::with_val(64, &da.rad + &db.rad);
        let dre = Float::with_val(da.prec(), &da.re - &db.re);
        if dre.clone().abs() > gap {
            dre.partial_cmp(&Float::new(8)).unwrap()
        } else {
            da.im.partial_cmp(&db.im).unwrap()
        }
    };
    uppers.sort_by(cmp);
    reals.sort_by(cmp);
    let mut out = Vec::with_capacity(n);
    for &u in &uppers {
        out.push(disks[u].clone());
        out.push(disks[partner[u]].clone());
    }
    for &r in &reals {
        out.push(disks[r].clone());
    }
    if out.len() != n {
        return Err(Error::PrecisionExhausted { bits: disks[0].prec() });
    }
    Ok(out)
}

fn log_plus(z: &CBall) -> RBall {
    let p = z.prec();
    let hi = z.abs_upper();
    if hi <= 1 {
        return RBall::zero(p);
    }
    match z.log_abs() {
        Some(l) => l.max0(),
        None => {
            let lh = Float::with_val_round(p, hi.ln_ref(), rug::float::Round::Up).0;
            RBall::from_bounds(&Float::new(p), &lh, p)
        }
    }
}

/// Absolute logarithmic height h(a) = (1/d) log|lc| + (1/n) Σ_j log⁺|σ_j(a)|,
/// using the n embeddings (each conjugate of a repeats n/d times).
pub fn absolute_height(a: &NFElement, table: &EmbeddingTable) -> Result<RBall> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let p = table.working_bits();
    let mp = a.minimal_polynomial();
    let d = mp.len() - 1;
    let n = table.degree();
    let lc = crate::poly::qi(&mp[d]);
    let mut acc = RBall::from_q(&lc, p).ln().expect("leading coefficient is positive");
    acc = acc.div(&RBall::from_f64(d as f64, p));
    let mut s = RBall::zero(p);
    for z in table.embed(a) {
        s = s.add(&log_plus(&z));
    }
    let s = s.div(&RBall::from_f64(n as f64, p));
    let h = acc.add(&s);
    let lim = Float::with_val(64, Float::u_exp(1, -((table.precision / 2) as i32)));
    if h.rad > lim {
        return Err(Error::PrecisionExhausted { bits: table.precision });
    }
    Ok(h)
}

/// Convenience wrapper computing its own table at `precision`.
pub fn absolute_height_at(a: &NFElement, field: &Arc<NumberField>, precision: u32) -> Result<RBall> {
    let table = EmbeddingTable::compute(field, precision)?;
    absolute_height(a, &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn z7() -> Arc<NumberField> {
        NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn roots_of_phi7() {
        let k = z7();
        let t = EmbeddingTable::compute(&k, 256).unwrap();
        assert_eq!(t.roots.len(), 6);
        for (i, r) in t.roots.iter().enumerate() {
            assert!(r.rad_f64() < 1e-150, "root {} radius {}", i, r.rad_f64());
        }
        // conjugate adjacency
        for i in 0..3 {
            let a = &t.roots[2 * i];
            let b = &t.roots[2 * i + 1];
            assert!(a.conj().overlaps(b));
            assert!(a.im > 0);
        }
        // lexicographic order of upper representatives
        let (r0, _) = t.roots[0].to_c64();
        let (r2, _) = t.roots[2].to_c64();
        assert!(r0 < r2);
    }

    #[test]
    fn embed_contains_norm() {
        let k = z7();
        let t = EmbeddingTable::compute(&k, 128).unwrap();
        let a = NFElement::from_i64_coords(&k, &[1, -1]);
        let vals = t.embed(&a);
        let mut prod = CBall::one(t.working_bits());
        for v in &vals {
            prod = prod.mul(v);
        }
        assert!(prod.contains_point(&Float::with_val(64, 7), &Float::with_val(64, 0)));
        let r = t.embed(&NFElement::from_q(&k, &q(5)));
        assert!(r.iter().all(|z| z.rad_f64() == 0.0 && z.to_c64() == (5.0, 0.0)));
    }

    #[test]
    fn refinement_nests() {
        let k = z7();
        let t = EmbeddingTable::compute(&k, 64).unwrap();
        let t2 = t.refine(&k, 128).unwrap();
        for (a, b) in t.roots.iter().zip(&t2.roots) {
            assert!(a.contains(b));
        }
    }

    #[test]
    fn heights() {
        let k = z7();
        let t = EmbeddingTable::compute(&k, 256).unwrap();
        let z = NFElement::theta(&k);
        let h = absolute_height(&z, &t).unwrap();
        assert!(h.contains_f64(0.0));
        let two = absolute_height(&NFElement::from_int(&k, 2), &t).unwrap();
        assert!((two.mid_f64() - 2f64.ln()).abs() < 1e-15);
        let a = NFElement::from_i64_coords(&k, &[1, -1]);
        let h = absolute_height(&a, &t).unwrap();
        let pi = std::f64::consts::PI;
        let expect = ((2.0 * (2.0 * pi / 7.0).sin()).ln() + (2.0 * (3.0 * pi / 7.0).sin()).ln()) / 3.0;
        assert!((h.mid_f64() - expect).abs() < 1e-14, "{} vs {}", h.mid_f64(), expect);
        assert!(matches!(absolute_height(&NFElement::zero(&k), &t), Err(Error::ZeroElement)));
    }
}
