//! Reduction of a norm-form equation to unit-equation systems: integral
//! normalization, the conjugate matrix B and relation matrix A, norm
//! representatives μ up to units, and the column-scaled systems A_μ.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::context::FieldContext;
use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};
use crate::field::{NFElement, NumberField};
use crate::linalg::{kernel_basis, Matrix, NFMatrix, QMatrix};
use crate::poly::{q, qi, Q};
use crate::units::{is_unit_norm, UnitSystem};

#[derive(Clone, Debug)]
pub struct NormFormProblem {
    pub ctx: Arc<FieldContext>,
    pub alphas: Vec<NFElement>,
    pub m: BigInt,
    /// Automorphisms fixing the field the α's are meant to generate; just the
    /// identity unless the problem was lifted from a subfield.
    pub base: Vec<usize>,
    pub lift: Option<Arc<SubfieldLift>>,
}

/// N_{K/Q}(Σ x_i α_i) = m for a non-Galois K, carried into a Galois field L
/// through an embedding θ_K ↦ `embedding`. The μ search runs in K.
#[derive(Clone, Debug)]
pub struct SubfieldLift {
    pub search: NormSearchData,
    pub embedding: NFElement,
    /// The α's as elements of K.
    pub alphas: Vec<NFElement>,
    pub m: BigInt,
    /// K's fundamental units all lie in Z[θ_K].
    pub integral_units: bool,
}

impl SubfieldLift {
    pub fn relative_degree(&self) -> usize {
        self.embedding.field().n / self.search.field.n
    }

    pub fn to_l(&self, a: &NFElement) -> NFElement {
        a.compose(&self.embedding)
    }

    /// Representatives in K of norm m·d^[K:Q], one per class, as elements of L.
    pub fn representatives(&self, units: &UnitSystem, d: &BigInt) -> Vec<NFElement> {
        let m = &self.m * num_traits::pow(d.clone(), self.search.field.n);
        norm_representatives_with(&self.search, &m, |a, b| are_associates(units, &self.to_l(a), &self.to_l(b)))
            .iter()
            .map(|mu| self.to_l(mu))
            .collect()
    }
}

impl NormFormProblem {
    pub fn new(ctx: Arc<FieldContext>, alphas: Vec<NFElement>, m: BigInt) -> Result<Self> {
        let p = NormFormProblem { ctx, alphas, m, base: vec![0], lift: None };
        p.validate()?;
        Ok(p)
    }

    /// The lifted problem in the field of `ctx`, with target m^[L:K]. The
    /// ratios of the α's must generate K rather than all of L.
    pub fn lifted(ctx: Arc<FieldContext>, lift: SubfieldLift) -> Result<Self> {
        let gen = &lift.embedding;
        let base = (0..ctx.gal.order()).filter(|&s| &ctx.apply(s, gen) == gen).collect();
        let alphas = lift.alphas.iter().map(|a| lift.to_l(a)).collect();
        let m = num_traits::pow(lift.m.clone(), lift.relative_degree());
        let p = NormFormProblem { ctx, alphas, m, base, lift: Some(Arc::new(lift)) };
        p.validate()?;
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    /// Q-independence of the α's and generation of K by the ratios α_j/α_k.
    pub fn validate(&self) -> Result<()> {
        if self.m.is_zero() {
            return Err(Error::InvalidInput("m must be nonzero".into()));
        }
        let k = self.k();
        if k < 2 {
            return Err(Error::InvalidInput("at least two alphas are required".into()));
        }
        let coords = Matrix::from_rows(self.alphas.iter().map(|a| a.coords()).collect(), q(0));
        let rank = coords.rank();
        if rank < k {
            return Err(Error::RankDefect { rank, expected: k });
        }
        let last = &self.alphas[k - 1];
        let ratios: Vec<NFElement> = self.alphas[..k - 1].iter().map(|a| a.div(last)).collect::<Result<_>>()?;
        let outside = (1..self.ctx.gal.order()).filter(|s| !self.base.contains(s));
        if let Some(s) = outside.into_iter().find(|&s| ratios.iter().all(|x| &self.ctx.apply(s, x) == x)) {
            return Err(Error::InvalidInput(format!(
                "the ratios of the alphas lie in a proper subfield (fixed by automorphism {})",
                s
            )));
        }
        Ok(())
    }

    /// Σ x_i α_i.
    pub fn linear_form(&self, x: &[BigInt]) -> NFElement {
        let mut acc = NFElement::zero(&self.ctx.field);
        for (xi, a) in x.iter().zip(&self.alphas) {
            if !xi.is_zero() {
                acc = acc.add(&a.scale_int(xi));
            }
        }
        acc
    }

    pub fn is_solution(&self, x: &[BigInt]) -> bool {
        self.linear_form(x).norm() == qi(&self.m)
    }
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub problem: NormFormProblem,
    pub d: BigInt,
    pub m_eff: BigInt,
}

/// Scales the α's by the least d making every coordinate integral (in K for
/// a lifted problem); the target becomes m·dⁿ and integer solutions are
/// unchanged.
pub fn normalize_problem(p: &NormFormProblem) -> Normalized {
    let own = match &p.lift {
        Some(l) => &l.alphas,
        None => &p.alphas,
    };
    let d = own.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denominator()));
    let n = p.ctx.n() as u32;
    let alphas = p.alphas.iter().map(|a| a.scale_int(&d)).collect();
    let m_eff = &p.m * num_traits::pow(d.clone(), n as usize);
    Normalized {
        problem: NormFormProblem { ctx: p.ctx.clone(), alphas, m: m_eff.clone(), base: p.base.clone(), lift: p.lift.clone() },
        d,
        m_eff,
    }
}

#[derive(Clone, Debug)]
pub struct ReducedSystem {
    /// B[i][j] = σ_j(α_i).
    pub b: NFMatrix,
    /// Rows a with Σ_j a_j σ_j(α_i) = 0 for every i.
    pub a: NFMatrix,
}

pub fn build_b_and_a(p: &NormFormProblem) -> Result<ReducedSystem> {
    let ctx = &p.ctx;
    let n = ctx.n();
    let k = p.k();
    let zero = NFElement::zero(&ctx.field);
    let rows: Vec<Vec<NFElement>> = p.alphas.iter().map(|a| (0..n).map(|j| ctx.apply(j, a)).collect()).collect();
    let b = Matrix::from_rows(rows, zero);
    let rb = b.rank();
    if rb < k {
        return Err(Error::RankDefect { rank: rb, expected: k });
    }
    let a = kernel_basis(&b);
    if a.rows != n - k || !b.mul(&a.transpose()).is_zero() {
        return Err(Error::Validation { check: "relation_matrix".into(), witness: format!("{} relations", a.rows) });
    }
    Ok(ReducedSystem { b, a })
}

/// A_μ: column j of A scaled by σ_j(μ).
pub fn build_mu_system(sys: &ReducedSystem, ctx: &FieldContext, mu: &NFElement) -> NFMatrix {
    let scales: Vec<NFElement> = (0..ctx.n()).map(|j| ctx.apply(j, mu)).collect();
    sys.a.scale_columns(&scales)
}

pub fn build_mu_systems(sys: &ReducedSystem, ctx: &FieldContext, reps: &[NFElement]) -> Vec<(NFElement, NFMatrix)> {
    reps.iter().map(|mu| (mu.clone(), build_mu_system(sys, ctx, mu))).collect()
}

/// Bounds used by the μ search.
#[derive(Clone, Debug)]
pub struct MuSearchBounds {
    /// Upper bound for |ι_ν μ|² at each place, margin included.
    pub place_bounds: Vec<f64>,
    /// T2 bound Σ_j |ι_j μ|².
    pub t2: f64,
    /// Per-coordinate bounds over the power basis.
    pub coord_box: Vec<i64>,
}

const MARGIN: f64 = 1.1;

/// What the μ search needs from a totally complex field, which need not be
/// Galois: root approximations, the place of each root and the unit log rows
/// ℓ_ν(ε_i) = log|ι_ν ε_i|², one row per place.
#[derive(Clone, Debug)]
pub struct NormSearchData {
    pub field: Arc<NumberField>,
    pub roots: Vec<(f64, f64)>,
    pub place_of_root: Vec<usize>,
    pub log_rows: Vec<Vec<f64>>,
}

impl NormSearchData {
    pub fn of_units(units: &UnitSystem) -> NormSearchData {
        let ctx = &units.ctx;
        NormSearchData {
            field: ctx.field.clone(),
            roots: ctx.table.roots.iter().map(|z| z.to_c64()).collect(),
            place_of_root: ctx.places.place_of_root.clone(),
            log_rows: units.log_rows.clone(),
        }
    }

    /// Places are the roots in the upper half-plane, in root order.
    pub fn of_field(field: &Arc<NumberField>, fund_units: &[NFElement], precision: u32) -> Result<NormSearchData> {
        let table = EmbeddingTable::compute(field, precision)?;
        let roots: Vec<(f64, f64)> = table.roots.iter().map(|z| z.to_c64()).collect();
        let upper: Vec<usize> = (0..roots.len()).filter(|&j| roots[j].1 > 0.0).collect();
        if 2 * upper.len() != roots.len() {
            return Err(Error::InvalidInput(format!("{} is not totally complex", field.label)));
        }
        let place_of_root = roots
            .iter()
            .map(|&(re, im)| {
                let dist = |j: &usize| {
                    let (a, b) = roots[*j];
                    (a - re).powi(2) + (b - im.abs()).powi(2)
                };
                (0..upper.len()).min_by(|x, y| dist(&upper[*x]).total_cmp(&dist(&upper[*y]))).unwrap()
            })
            .collect();
        let mut log_rows = vec![Vec::with_capacity(fund_units.len()); upper.len()];
        for u in fund_units {
            if !is_unit_norm(u) {
                return Err(Error::NotAUnit { norm: crate::poly::format_rational(&u.norm()) });
            }
            for (v, &j) in upper.iter().enumerate() {
                let z = table.embed_at(u, j).to_c64();
                log_rows[v].push((z.0 * z.0 + z.1 * z.1).ln());
            }
        }
        Ok(NormSearchData { field: field.clone(), roots, place_of_root, log_rows })
    }

    pub fn s(&self) -> usize {
        self.log_rows.len()
    }
}

/// After reducing μ by units into the fundamental parallelepiped of the
/// log-unit lattice, |log‖μ‖_ν − log|m|/s| ≤ ½ Σ_i |ℓ_ν(ε_i)|.
pub fn mu_search_bounds(units: &UnitSystem, m_eff: &BigInt) -> MuSearchBounds {
    mu_search_bounds_for(&NormSearchData::of_units(units), m_eff)
}

pub fn mu_search_bounds_for(data: &NormSearchData, m_eff: &BigInt) -> MuSearchBounds {
    let s = data.s();
    let lm = big_ln(&m_eff.abs());
    let place_bounds: Vec<f64> = (0..s)
        .map(|v| {
            let half: f64 = data.log_rows[v].iter().map(|x| x.abs()).sum::<f64>() * 0.5;
            (lm / s as f64 + half).exp() * MARGIN
        })
        .collect();
    let t2 = 2.0 * place_bounds.iter().sum::<f64>();
    // c = V⁻¹ ι(μ) with V the (complex) Vandermonde matrix of the roots
    let n = data.roots.len();
    let vinv = vandermonde_inverse(&data.roots);
    let mut coord_box = vec![0i64; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let (re, im) = vinv[i][j];
            let v = data.place_of_root[j];
            acc += (re * re + im * im).sqrt() * place_bounds[v].sqrt();
        }
        coord_box[i] = (acc * MARGIN).floor() as i64;
    }
    MuSearchBounds { place_bounds, t2, coord_box }
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        let f: f64 = x.to_string().parse().unwrap();
        f.ln()
    } else {
        let sh = bits - 900;
        let top: BigInt = x >> sh;
        let f: f64 = top.to_string().parse().unwrap();
        f.ln() + sh as f64 * std::f64::consts::LN_2
    }
}

fn vandermonde_inverse(roots: &[(f64, f64)]) -> Vec<Vec<(f64, f64)>> {
    // V[j][i] = root_j^i; solve by complex Gauss–Jordan
    let n = roots.len();
    type C = (f64, f64);
    let mul = |a: C, b: C| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let div = |a: C, b: C| {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    };
    let mut a: Vec<Vec<C>> = (0..n)
        .map(|j| {
            let mut row = Vec::with_capacity(2 * n);
            let mut p = (1.0, 0.0);
            for _ in 0..n {
                row.push(p);
                p = mul(p, roots[j]);
            }
            row.extend((0..n).map(|c| if c == j { (1.0, 0.0) } else { (0.0, 0.0) }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| norm(a[x][c]).partial_cmp(&norm(a[y][c])).unwrap()).unwrap();
        a.swap(c, p);
        let piv = a[c][c];
        for x in a[c].iter_mut() {
            *x = div(*x, piv);
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                let rc = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(rc) {
                    let t = mul(f, y);
                    *x = (x.0 - t.0, x.1 - t.1);
                }
            }
        }
    }
    // a now holds [I | V⁻¹] with V rows indexed by roots: V⁻¹[i][j]
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

fn norm(z: (f64, f64)) -> f64 {
    z.0 * z.0 + z.1 * z.1
}

/// Real Gram matrix of the T2 form on the power basis.
fn t2_gram(roots: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let n = roots.len();
    let pows: Vec<Vec<(f64, f64)>> = roots
        .iter()
        .map(|&r| {
            let mut v = Vec::with_capacity(n);
            let mut p = (1.0, 0.0);
            for _ in 0..n {
                v.push(p);
                p = (p.0 * r.0 - p.1 * r.1, p.0 * r.1 + p.1 * r.0);
            }
            v
        })
        .collect();
    (0..n)
        .map(|a| (0..n).map(|b| pows.iter().map(|p| p[a].0 * p[b].0 + p[a].1 * p[b].1).sum()).collect())
        .collect()
}

/// All integer vectors c with cᵀGc ≤ bound (Fincke–Pohst), with c ≠ 0.
pub fn fincke_pohst(g: &[Vec<f64>], bound: f64) -> Vec<Vec<i64>> {
    let n = g.len();
    // q[i][i] = diagonal, q[i][j] (j>i) = coefficients of the completed square
    let mut qm = g.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            qm[j][i] = qm[i][j];
            qm[i][j] /= qm[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                qm[k][l] -= qm[k][i] * qm[i][l];
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    // recursive descent from the last coordinate
    fn rec(i: usize, qm: &[Vec<f64>], rem: f64, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>, n: usize) {
        let mut centre = 0.0;
        for j in i + 1..n {
            centre -= qm[i][j] * x[j] as f64;
        }
        let r = (rem.max(0.0) / qm[i][i]).sqrt() + 1e-9;
        let lo = (centre - r).ceil() as i64;
        let hi = (centre + r).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let d = v as f64 - centre;
            let left = rem - qm[i][i] * d * d;
            if left < -1e-9 * (1.0 + rem.abs()) {
                continue;
            }
            if i == 0 {
                if x.iter().any(|&t| t != 0) {
                    out.push(x.clone());
                }
            } else {
                rec(i - 1, qm, left, x, out, n);
            }
        }
        x[i] = 0;
    }
    if n > 0 {
        rec(n - 1, &qm, bound, &mut x, &mut out, n);
    }
    out
}

/// Integral μ ∈ Z[θ] with N(μ) = m_eff, one per associate class.
pub fn enumerate_norm_representatives(units: &UnitSystem, m_eff: &BigInt) -> Vec<NFElement> {
    norm_representatives_with(&NormSearchData::of_units(units), m_eff, |a, b| are_associates(units, a, b))
}

/// The same search in any totally complex field; `same_class(a, b)` decides
/// whether b/a is a unit.
pub fn norm_representatives_with<F>(data: &NormSearchData, m_eff: &BigInt, same_class: F) -> Vec<NFElement>
where
    F: Fn(&NFElement, &NFElement) -> bool,
{
    if !m_eff.is_positive() {
        // totally complex fields have positive norms
        return Vec::new();
    }
    let field = &data.field;
    if m_eff.is_one() {
        return vec![NFElement::one(field)];
    }
    let bounds = mu_search_bounds_for(data, m_eff);
    let gram = t2_gram(&data.roots);
    let cands = fincke_pohst(&gram, bounds.t2);
    let target = qi(m_eff);
    let mut hits: Vec<(i64, Vec<i64>, NFElement)> = cands
        .par_iter()
        .filter_map(|c| {
            let e = NFElement::from_i64_coords(field, c);
            if e.norm() != target {
                return None;
            }
            let t2: f64 = (0..c.len()).map(|a| (0..c.len()).map(|b| gram[a][b] * (c[a] * c[b]) as f64).sum::<f64>()).sum();
            Some(((t2 * 1e6).round() as i64, c.clone(), e))
        })
        .collect();
    // smallest T2 first, then larger coordinates first (so 1 beats −1 and ζ)
    hits.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| y.1.cmp(&x.1)));
    let mut reps: Vec<NFElement> = Vec::new();
    for (_, _, e) in hits {
        if !reps.iter().any(|r| same_class(r, &e)) {
            reps.push(e);
        }
    }
    reps
}

pub fn are_associates(units: &UnitSystem, a: &NFElement, b: &NFElement) -> bool {
    match b.div(a) {
        Ok(q) => units.discrete_log(&q).is_ok(),
        Err(_) => false,
    }
}

/// Coordinates over Q of an element in the span of the α's, if it lies there.
pub fn alpha_coordinates(p: &NormFormProblem, beta: &NFElement) -> Option<Vec<Q>> {
    let k = p.k();
    let n = p.ctx.n();
    // columns: α_1..α_k, β
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|r| {
            let mut row: Vec<Q> = p.alphas.iter().map(|a| a.coord(r)).collect();
            row.push(beta.coord(r));
            row
        })
        .collect();
    let m: QMatrix = Matrix::from_rows(rows, q(0));
    let ker = kernel_basis(&m);
    for i in 0..ker.rows {
        let v = ker.row(i);
        if !v[k].is_zero() {
            let t = v[k].clone();
            return Some(v[..k].iter().map(|x| -(x / &t)).collect());
        }
    }
    if beta.is_zero() {
        return Some(vec![Q::zero(); k]);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::units::UnitGroupData;

    pub(crate) fn zeta7() -> UnitSystem {
        let k = NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap();
        let ctx = Arc::new(FieldContext::new(&k, 256).unwrap());
        let z = NFElement::theta(&k);
        let data = UnitGroupData {
            zeta: z.neg(),
            w: 14,
            fund_units: vec![NFElement::from_i64_coords(&k, &[1, 1]), NFElement::from_i64_coords(&k, &[1, 1, 1])],
            declared_regulator: None,
        };
        UnitSystem::new(data, ctx).unwrap()
    }

    fn powers(ctx: &Arc<FieldContext>, k: usize) -> Vec<NFElement> {
        (0..k).map(|j| NFElement::theta_pow(&ctx.field, j)).collect()
    }

    #[test]
    fn normalization_scales_target() {
        let us = zeta7();
        let ctx = us.ctx.clone();
        let half = NFElement::theta(&ctx.field).scale(&Q::new(1.into(), 2.into()));
        let third = NFElement::theta_pow(&ctx.field, 2).scale(&Q::new(1.into(), 3.into()));
        let p = NormFormProblem::new(ctx.clone(), vec![NFElement::one(&ctx.field), half.clone()], 1.into()).unwrap();
        let np = normalize_problem(&p);
        assert_eq!(np.d, 2.into());
        assert_eq!(np.m_eff, 64.into());
        let p = NormFormProblem::new(ctx.clone(), vec![half, third], 1.into()).unwrap();
        assert_eq!(normalize_problem(&p).d, 6.into());
        let p = NormFormProblem::new(ctx.clone(), powers(&ctx, 3), 5.into()).unwrap();
        let np = normalize_problem(&p);
        assert_eq!((np.d, np.m_eff), (1.into(), 5.into()));
    }

    #[test]
    fn relation_matrix_sextic() {
        let us = zeta7();
        let p = NormFormProblem::new(us.ctx.clone(), powers(&us.ctx, 5), 1.into()).unwrap();
        let sys = build_b_and_a(&p).unwrap();
        assert_eq!((sys.a.rows, sys.a.cols), (1, 6));
        assert!(sys.b.mul(&sys.a.transpose()).is_zero());
    }

    #[test]
    fn dependent_alphas_rejected() {
        let us = zeta7();
        let f = &us.ctx.field;
        let alphas = vec![NFElement::one(f), NFElement::theta(f), NFElement::from_i64_coords(f, &[2, 2])];
        assert!(matches!(NormFormProblem::new(us.ctx.clone(), alphas, 1.into()), Err(Error::RankDefect { .. })));
    }

    #[test]
    fn subfield_ratios_rejected() {
        let us = zeta7();
        let f = &us.ctx.field;
        let eta = NFElement::theta(f).add(&NFElement::theta_pow(f, 6));
        let alphas = vec![NFElement::one(f), eta.clone(), eta.square()];
        assert!(matches!(NormFormProblem::new(us.ctx.clone(), alphas, 1.into()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn representatives_of_small_norms() {
        let us = zeta7();
        let f = &us.ctx.field;
        assert_eq!(enumerate_norm_representatives(&us, &1.into()), vec![NFElement::one(f)]);
        let r7 = enumerate_norm_representatives(&us, &7.into());
        assert_eq!(r7.len(), 1);
        assert!(are_associates(&us, &r7[0], &NFElement::from_i64_coords(f, &[1, -1])));
        assert!(enumerate_norm_representatives(&us, &2.into()).is_empty());
        assert_eq!(enumerate_norm_representatives(&us, &8.into()).len(), 2);
    }

    #[test]
    fn fincke_pohst_counts_small_lattice() {
        let g = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let pts = fincke_pohst(&g, 2.0);
        assert_eq!(pts.len(), 8);
    }

    #[test]
    fn alpha_span_coordinates() {
        let us = zeta7();
        let p = NormFormProblem::new(us.ctx.clone(), powers(&us.ctx, 3), 1.into()).unwrap();
        let beta = NFElement::from_i64_coords(&us.ctx.field, &[3, 0, -2]);
        assert_eq!(alpha_coordinates(&p, &beta).unwrap(), vec![q(3), q(0), q(-2)]);
        assert!(alpha_coordinates(&p, &NFElement::theta_pow(&us.ctx.field, 4)).is_none());
    }
}
