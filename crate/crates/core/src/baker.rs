//! Matveev's lower bound for linear forms in logarithms, the height bound it
//! yields for three-term unit equations αx + βy + γ = 0, and Baker–Davenport
//! style lattice reduction of that bound.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::ball::{bigint_to_integer, float_to_bigint_round, CBall};
use crate::embed::absolute_height;
use crate::error::{Error, Result};
use crate::field::NFElement;
use crate::lll::{close_vectors, coordinates, lll, Reduced};
use crate::poly::Q;
use crate::units::{inverse_balls, log_matrix, UnitSystem};

/// κ = 1 for a real ambient field, 2 otherwise.
pub fn kappa_for(real_field: bool) -> u32 {
    if real_field {
        1
    } else {
        2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatveevInput {
    pub m: usize,
    pub n_deg: usize,
    pub kappa: u32,
    pub b: f64,
    pub a_list: Vec<f64>,
}

impl MatveevInput {
    fn check(&self) -> Result<()> {
        if self.m == 0 || self.a_list.len() != self.m {
            return Err(Error::InvalidInput(format!("{} heights for {} logarithms", self.a_list.len(), self.m)));
        }
        if self.kappa != 1 && self.kappa != 2 {
            return Err(Error::InvalidInput(format!("kappa = {}", self.kappa)));
        }
        if !(self.b >= 1.0) || self.n_deg == 0 {
            return Err(Error::InvalidInput("B must be at least 1".into()));
        }
        if self.a_list.iter().any(|a| !(*a >= 0.16)) {
            return Err(Error::InvalidInput("each A_j must be at least 0.16".into()));
        }
        Ok(())
    }
}

/// (1/κ)(em)^κ 30^{m+3} m^{3.5} n² log(en) A_1⋯A_m.
pub fn matveev_constant(inp: &MatveevInput, prec: u32) -> Result<Float> {
    inp.check()?;
    let e = Float::with_val(prec, 1).exp();
    let m = inp.m as u32;
    let em = Float::with_val(prec, &e * m);
    let mut c = Float::with_val(prec, em.pow(inp.kappa));
    c /= inp.kappa;
    c *= Float::with_val(prec, rug::Integer::from(30).pow(m + 3));
    let m35 = Float::with_val(prec, m).pow(Float::with_val(prec, 3.5));
    c *= m35;
    c *= (inp.n_deg * inp.n_deg) as u64;
    let len = Float::with_val(prec, Float::with_val(prec, inp.n_deg as u32).ln() + 1u32);
    c *= len;
    for a in &inp.a_list {
        c *= Float::with_val(prec, *a);
    }
    Ok(c)
}

/// The lower bound −(constant)·log(eB) for log|Λ|.
pub fn matveev_bound(inp: &MatveevInput, prec: u32) -> Result<Float> {
    let c = matveev_constant(inp, prec)?;
    let leb = Float::with_val(prec, Float::with_val(prec, inp.b).ln() + 1u32);
    Ok(-Float::with_val(prec, c * leb))
}

fn matveev_f64(m: usize, n: usize, a_list: &[f64]) -> f64 {
    let inp = MatveevInput { m, n_deg: n, kappa: 2, b: 1.0, a_list: a_list.to_vec() };
    matveev_constant(&inp, 128).map(|c| c.to_f64() * (1.0 + 1e-12)).unwrap_or(f64::INFINITY)
}

/// Which unknown of αx + βy + γ = 0 is small at the place of a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SmallSide {
    X,
    Y,
}

/// One linear form Λ = λ₀ + Σ bᵢλᵢ + a·2πi/w at a fixed place.
#[derive(Clone, Debug)]
pub struct LinearForm {
    pub place: usize,
    pub small: SmallSide,
    /// log of −β/γ (or −α/γ) at the place: (real, imaginary).
    pub lambda0: (Float, Float),
    pub lambdas: Vec<(Float, Float)>,
    /// Bound on the enclosure radii of all logarithms above.
    pub rad: f64,
    /// |α/γ| (or |β/γ|) at the place, rounded up.
    pub k_const: f64,
    /// Upper bound on h(−β/γ) (or h(−α/γ)).
    pub h0: f64,
    pub abs_log0: f64,
    pub arg0: f64,
    pub arg_units: f64,
    /// Set when −β/γ (or −α/γ) is itself a unit, so that the form is
    /// homogeneous in shifted exponents.
    pub unit_shift: Option<UnitShift>,
}

/// λ₀ = Σ g_i λ_i + t·2πi/w.
#[derive(Clone, Debug)]
pub struct UnitShift {
    pub g: Vec<i64>,
    pub gmax: f64,
    pub t: f64,
}

/// Unit-group data shared by every three-term equation of a field.
#[derive(Clone, Debug)]
pub struct UnitLogData {
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub w: u64,
    /// |a_i| ≤ c·max_ν |log|ι_ν u|| for every unit u = ζ^k ∏ ε_i^{a_i}.
    pub c: f64,
    /// Complex logarithms of the units at each place (centre, radius).
    pub logs: Vec<Vec<(Float, Float, f64)>>,
    /// Matveev heights A_i = max(n h(ε_i), |log ε_i|, 0.16), per place.
    pub a_units: Vec<Vec<f64>>,
    pub a_torsion: f64,
    pub precision: u32,
}

fn up_f64(x: &Float) -> f64 {
    let v = x.to_f64();
    v + v.abs() * 1e-14 + 1e-300
}

impl UnitLogData {
    pub fn new(units: &UnitSystem) -> Result<UnitLogData> {
        let ctx = &units.ctx;
        let (n, s, r, w) = (ctx.n(), ctx.s(), units.rank(), units.w());
        let lm = log_matrix(&units.data, ctx)?;
        let inv = inverse_balls(&lm).ok_or(Error::PrecisionExhausted { bits: ctx.precision() })?;
        let norm_inf = inv
            .iter()
            .map(|row| row.iter().map(|b| up_f64(&b.abs().upper())).sum::<f64>())
            .fold(0.0, f64::max);
        let c = 2.0 * norm_inf;
        let heights: Vec<f64> = units
            .data
            .fund_units
            .iter()
            .map(|e| absolute_height(e, &ctx.table).map(|h| up_f64(&h.upper())))
            .collect::<Result<_>>()?;
        let mut logs = Vec::with_capacity(s);
        let mut a_units = Vec::with_capacity(s);
        for v in 0..s {
            let mut row = Vec::with_capacity(r);
            let mut arow = Vec::with_capacity(r);
            for (i, e) in units.data.fund_units.iter().enumerate() {
                let z = ctx.table.embed_at(e, ctx.place_embedding(v));
                let (re, im, rad) = complex_log(&z, ctx.precision())?;
                let abs = (re.to_f64().powi(2) + im.to_f64().powi(2)).sqrt() * (1.0 + 1e-12) + rad;
                arow.push((n as f64 * heights[i]).max(abs).max(0.16));
                row.push((re, im, rad));
            }
            logs.push(row);
            a_units.push(arow);
        }
        let a_torsion = (2.0 * std::f64::consts::PI / w as f64 * (1.0 + 1e-12)).max(0.16);
        Ok(UnitLogData { n, s, r, w, c, logs, a_units, a_torsion, precision: ctx.precision() })
    }
}

fn complex_log(z: &CBall, bits: u32) -> Result<(Float, Float, f64)> {
    let la = z.log_abs().ok_or(Error::PrecisionExhausted { bits })?;
    let ar = z.arg().ok_or(Error::PrecisionExhausted { bits })?;
    let rad = up_f64(&la.rad) + up_f64(&ar.rad);
    Ok((la.mid, ar.mid, rad))
}

/// The 2s linear forms attached to αx + βy + γ = 0.
#[derive(Clone, Debug)]
pub struct ThreeTermSetup {
    pub forms: Vec<LinearForm>,
    pub data: UnitLogData,
}

pub fn three_term_setup(
    alpha: &NFElement,
    beta: &NFElement,
    gamma: &NFElement,
    units: &UnitSystem,
    data: &UnitLogData,
) -> Result<ThreeTermSetup> {
    for (i, c) in [alpha, beta, gamma].iter().enumerate() {
        if c.is_zero() {
            return Err(Error::DegenerateCoefficient(i));
        }
    }
    let ctx = &units.ctx;
    let bits = ctx.precision();
    let mut forms = Vec::with_capacity(2 * data.s);
    for side in [SmallSide::X, SmallSide::Y] {
        // X small: t = −(β/γ)y ≈ 1 with |t − 1| = |αx/γ|
        let (ratio, kq) = match side {
            SmallSide::X => (beta.div(gamma)?.neg(), alpha.div(gamma)?),
            SmallSide::Y => (alpha.div(gamma)?.neg(), beta.div(gamma)?),
        };
        let h0 = up_f64(&absolute_height(&ratio, &ctx.table)?.upper());
        let ratio_log = units.discrete_log(&ratio).ok();
        for v in 0..data.s {
            let j = ctx.place_embedding(v);
            let z = ctx.table.embed_at(&ratio, j);
            let (re, im, rad0) = complex_log(&z, bits)?;
            let k_const = up_f64(&ctx.table.embed_at(&kq, j).abs_upper());
            let lambdas: Vec<(Float, Float)> = data.logs[v].iter().map(|(a, b, _)| (a.clone(), b.clone())).collect();
            let rad = data.logs[v].iter().map(|x| x.2).fold(rad0, f64::max);
            let arg_units = data.logs[v].iter().map(|x| x.1.to_f64().abs() + x.2).sum::<f64>();
            let abs_log0 = (re.to_f64().powi(2) + im.to_f64().powi(2)).sqrt() * (1.0 + 1e-12) + rad0;
            let arg0 = im.to_f64().abs() + rad0;
            let unit_shift = ratio_log.as_ref().map(|g| {
                let gmax = g.a.iter().map(|x| x.abs()).max().unwrap_or(0) as f64;
                let im_units: f64 = g.a.iter().zip(&lambdas).map(|(gi, l)| *gi as f64 * l.1.to_f64()).sum();
                let t = ((im.to_f64() - im_units) * data.w as f64 / (2.0 * std::f64::consts::PI)).round().abs();
                UnitShift { g: g.a.clone(), gmax, t }
            });
            forms.push(LinearForm {
                place: v,
                small: side,
                lambda0: (re, im),
                lambdas,
                rad,
                k_const,
                h0,
                abs_log0,
                arg0,
                arg_units,
                unit_shift,
            });
        }
    }
    Ok(ThreeTermSetup { forms, data: data.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoundStatus {
    Proven,
    Conditional { searched_up_to: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub scale_digits: u32,
    pub exponent_bound: u64,
}

/// Bound chain for one three-term equation. Exponent bounds refer to every
/// |a_i| of both unknowns; log bounds to max_ν |log|ι_ν x||, max_ν |log|ι_ν y||.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub matveev_constant: f64,
    pub c_growth: f64,
    pub d_growth: f64,
    pub exponent_constant: f64,
    pub initial_log_bound: f64,
    pub initial_height_bound: f64,
    pub reduced_log_bound: f64,
    pub reduced_bound: u64,
    /// Upper bound for h(1, x, y) implied by the reduced log bound.
    pub tuple_height_bound: f64,
    pub steps: Vec<ReductionStep>,
    pub status: BoundStatus,
    /// Lattice points close to the target when the plain reduction step
    /// fails; the bound excludes them and they are tested one by one.
    #[serde(default)]
    pub exceptional: Vec<ExceptionalCandidate>,
}

/// Exponents (without torsion) of y when x is the small side, of x when y is.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExceptionalCandidate {
    pub small: SmallSide,
    pub exponents: Vec<i64>,
}

impl BoundCertificate {
    pub fn is_proven(&self) -> bool {
        self.status == BoundStatus::Proven
    }
}

fn coefficient_a(form: &LinearForm, data: &UnitLogData, growth: (f64, f64), w_bound: f64) -> f64 {
    let n = data.n as f64;
    let hg = growth.0 + growth.1 * (n * w_bound).max(std::f64::consts::E).ln();
    (n * form.h0.max(hg)).max(form.abs_log0).max(0.16)
}

fn torsion_coefficient_bound(form: &LinearForm, data: &UnitLogData, a: f64, lambda_abs: f64) -> f64 {
    data.w as f64 * (lambda_abs + form.arg0 + a * form.arg_units) / (2.0 * std::f64::consts::PI)
}

/// The right-hand side f(W) of the implicit inequality W ≤ f(W), together
/// with the largest Matveev constant met.
fn implicit_rhs(setup: &ThreeTermSetup, growth: (f64, f64), w: f64) -> (f64, f64) {
    let d = &setup.data;
    let s1 = (d.s - 1) as f64;
    let mut best = 0.0f64;
    let mut best_c = 0.0f64;
    for f in &setup.forms {
        let mut a_list = d.a_units[f.place].clone();
        a_list.push(d.a_torsion);
        a_list.push(coefficient_a(f, d, growth, w));
        let cm = matveev_f64(d.r + 2, d.n, &a_list);
        let a = d.c * w;
        let b = a.max(torsion_coefficient_bound(f, d, a, 1.0)).max(1.0);
        let val = s1 * ((2.0 * f.k_const).ln() + cm * (1.0 + b.ln()));
        best = best.max(val);
        best_c = best_c.max(cm);
    }
    (best, best_c)
}

fn threshold(setup: &ThreeTermSetup) -> f64 {
    let s1 = (setup.data.s - 1) as f64;
    setup.forms.iter().map(|f| s1 * (2.0 * f.k_const).ln()).fold(0.0, f64::max)
}

/// Initial bound from Matveev: the largest W with W ≤ f(W), found by
/// monotone fixed-point iteration from above, plus 10% slack.
pub fn three_term_height_bound(setup: &ThreeTermSetup, growth: (f64, f64)) -> Result<BoundCertificate> {
    if setup.data.s < 2 {
        return Err(Error::InvalidInput("three-term bounds need at least two places".into()));
    }
    let mut w = 1.0f64;
    while implicit_rhs(setup, growth, w).0 > w {
        w *= 2.0;
        if !w.is_finite() {
            return Err(Error::InvalidInput("implicit inequality has no finite solution".into()));
        }
    }
    for _ in 0..500 {
        let next = implicit_rhs(setup, growth, w).0;
        if next >= w * (1.0 - 1e-12) {
            break;
        }
        w = next;
    }
    let w0 = (w * 1.1).max(threshold(setup)).max(1.0);
    let (rhs, cm) = implicit_rhs(setup, growth, w0);
    debug_assert!(rhs <= w0);
    let a0 = (setup.data.c * w0).floor();
    Ok(BoundCertificate {
        matveev_constant: cm,
        c_growth: growth.0,
        d_growth: growth.1,
        exponent_constant: setup.data.c,
        initial_log_bound: w0,
        initial_height_bound: a0,
        reduced_log_bound: w0,
        reduced_bound: a0 as u64,
        tuple_height_bound: setup.data.n as f64 * w0,
        steps: Vec::new(),
        status: BoundStatus::Proven,
        exceptional: Vec::new(),
    })
}

/// Scales a real number by 10^digits and rounds.
fn scaled(x: &Float, scale: &Float) -> BigInt {
    let p = scale.prec().max(x.prec());
    float_to_bigint_round(&Float::with_val(p, x * scale).round()).expect("finite")
}

struct FormReduction {
    log_bound: f64,
    exceptional: Vec<Vec<i64>>,
}

/// The approximation lattice of one form at scale C = 10^digits.
///
/// Rows are (e_i restricted to the kept indices, C·Re λ_i[, C·Im λ_i]) plus,
/// with the imaginary part, the torsion row (0, …, 0, C·2π/w). Dropping the
/// imaginary part is always valid since |Re Λ| ≤ |Λ|; over CM fields it is the
/// useful variant, the unit arguments being rational multiples of π.
struct FormLattice {
    original: Vec<Vec<BigInt>>,
    red: Reduced,
    y: Vec<BigInt>,
    keep: Vec<usize>,
    drop: usize,
    /// Scaled coordinates: 1 (real part only) or 2.
    scaled: usize,
    base: f64,
    e: f64,
}

fn form_lattice(form: &LinearForm, data: &UnitLogData, a: f64, digits: u32, real_only: bool) -> FormLattice {
    let r = data.r;
    let prec = form.lambda0.0.prec().max(64);
    let scale = Float::with_val(prec, Float::with_val(prec, 10u32).pow(digits));
    // index whose identity coordinate is replaced by the scaled parts
    let drop = (0..r)
        .max_by(|&i, &j| form.lambdas[i].0.to_f64().abs().partial_cmp(&form.lambdas[j].0.to_f64().abs()).unwrap())
        .unwrap_or(0);
    let keep: Vec<usize> = (0..r).filter(|&i| i != drop).collect();
    let scaled_n = if real_only { 1 } else { 2 };
    let dim = r - 1 + scaled_n;
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for i in keep.iter().copied().chain(std::iter::once(drop)) {
        let mut row = vec![BigInt::zero(); dim];
        if let Some(pos) = keep.iter().position(|&k| k == i) {
            row[pos] = BigInt::from(1);
        }
        row[r - 1] = scaled(&form.lambdas[i].0, &scale);
        if !real_only {
            row[r] = scaled(&form.lambdas[i].1, &scale);
        }
        basis.push(row);
    }
    if !real_only {
        let two_pi_w = Float::with_val(prec, Float::with_val(prec, Constant::Pi) * 2u32) / data.w as u32;
        let mut trow = vec![BigInt::zero(); dim];
        trow[r] = scaled(&two_pi_w, &scale);
        basis.push(trow);
    }
    let mut y = vec![BigInt::zero(); dim];
    let (a, shift_t) = match &form.unit_shift {
        Some(u) => (a + u.gmax, u.t),
        None => {
            y[r - 1] = -scaled(&form.lambda0.0, &scale);
            if !real_only {
                y[r] = -scaled(&form.lambda0.1, &scale);
            }
            (a, 0.0)
        }
    };
    let base = (r as f64 - 1.0).max(0.0) * a * a;
    let c = 10f64.powi(digits as i32);
    let e0 = 0.5 + c * form.rad;
    let at = if real_only { 0.0 } else { torsion_coefficient_bound(form, data, a, 1.0) + shift_t };
    let e = (1.0 + r as f64 * a + at) * e0;
    let original = basis.clone();
    let red = lll(basis);
    FormLattice { original, red, y, keep, drop, scaled: scaled_n, base, e }
}

/// Lower bound on the squared distance from y to the lattice.
fn distance_sq(lat: &FormLattice) -> Option<f64> {
    let dim = lat.y.len();
    let gs: Vec<Q> = (0..dim).map(|i| lat.red.gs_norm_sq(i)).collect();
    let l2: Q = if lat.y.iter().all(|v| v.is_zero()) {
        gs.iter().min().cloned()?
    } else {
        let sigma = coordinates(&lat.red.basis, &lat.y)?;
        let i0 = (0..dim).rev().find(|&i| !sigma[i].is_integer())?;
        let frac = &sigma[i0] - sigma[i0].floor();
        let dist = if frac > Q::new(1.into(), 2.into()) { Q::from_integer(1.into()) - frac } else { frac };
        let mn = gs[i0..].iter().min().cloned()?;
        &dist * &dist * mn
    };
    Some(q_to_f64_down(&l2))
}

/// Log bound W implied by one form when all exponents are at most `a`, or
/// None when the lattice is not good enough at this scale.
fn reduce_form(form: &LinearForm, data: &UnitLogData, a: f64, digits: u32) -> Option<FormReduction> {
    let s1 = (data.s - 1) as f64;
    for real_only in [true, false] {
        let lat = form_lattice(form, data, a, digits, real_only);
        let Some(l2) = distance_sq(&lat) else { continue };
        // each scaled coordinate of v − y is C·(part of Λ) + rounding
        let num = ((l2 - lat.base) / lat.scaled as f64).sqrt() - lat.e;
        if l2 > lat.base && num > 0.0 {
            // log δ = log(num) − digits·log 10, kept in logs to avoid underflow
            let log_delta = num.ln() - digits as f64 * std::f64::consts::LN_10;
            return Some(FormReduction { log_bound: s1 * ((2.0 * form.k_const).ln() - log_delta), exceptional: vec![] });
        }
    }
    None
}

/// Fallback when the target lies too close to the lattice: past W* the form
/// satisfies 10^digits·|Λ| ≤ 1, so the lattice point of any larger solution
/// lies within sqrt(base + scaled·(1 + e)²) of y. Those points are listed and
/// become exceptions to the bound W*.
fn enumerate_form(form: &LinearForm, data: &UnitLogData, a: f64, digits: u32) -> Option<FormReduction> {
    let r = data.r;
    let s1 = (data.s - 1) as f64;
    let w_star = s1 * ((2.0 * form.k_const).ln() + digits as f64 * std::f64::consts::LN_10);
    let mut best: Option<Vec<Vec<i64>>> = None;
    for real_only in [true, false] {
        let lat = form_lattice(form, data, a, digits, real_only);
        let r2 = (lat.base + lat.scaled as f64 * (1.0 + lat.e) * (1.0 + lat.e)) * (1.0 + 1e-9) + 1.0;
        let Some(r2) = Q::from_float(r2) else { continue };
        let Some(close) = close_vectors(&lat.red.basis, &lat.y, &r2, 4096) else { continue };
        let mut exceptional = Vec::with_capacity(close.len());
        let dim = lat.y.len();
        let mut ok = true;
        for x in close {
            let v: Vec<BigInt> = (0..dim).map(|k| x.iter().zip(&lat.red.basis).map(|(xi, b)| xi * &b[k]).sum()).collect();
            let Some(coef) = coordinates(&lat.original, &v) else {
                ok = false;
                break;
            };
            let mut b = vec![0i64; r];
            let mut conv = || -> Option<()> {
                for (pos, &i) in lat.keep.iter().enumerate() {
                    b[i] = coef[pos].to_integer().to_i64()?;
                }
                b[lat.drop] = coef[r - 1].to_integer().to_i64()?;
                Some(())
            };
            if conv().is_none() {
                ok = false;
                break;
            }
            if let Some(u) = &form.unit_shift {
                for (bi, gi) in b.iter_mut().zip(&u.g) {
                    *bi -= gi;
                }
            }
            exceptional.push(b);
        }
        if ok && best.as_ref().map(|b| exceptional.len() < b.len()).unwrap_or(true) {
            best = Some(exceptional);
        }
    }
    best.map(|exceptional| FormReduction { log_bound: w_star, exceptional })
}

fn q_to_f64_down(x: &Q) -> f64 {
    let num = x.numer().to_f64().unwrap_or(f64::INFINITY);
    let den = x.denom().to_f64().unwrap_or(f64::INFINITY);
    if num.is_finite() && den.is_finite() {
        (num / den) * (1.0 - 1e-12)
    } else {
        // large values: shift both down
        let sh = x.numer().bits().max(x.denom().bits()).saturating_sub(900);
        let n: BigInt = x.numer() >> sh;
        let d: BigInt = x.denom() >> sh;
        let d = if d.is_zero() { BigInt::from(1) } else { d };
        n.to_f64().unwrap() / (d.to_f64().unwrap() + 1.0) * (1.0 - 1e-12)
    }
}

/// Iterated lattice reduction of the exponent bound. The bound never
/// increases; each round uses scale ≈ A^r·10³, multiplied by 10³ on failure
/// up to five times, after which close lattice points are enumerated.
pub fn reduce_bound_lattice(cert: &BoundCertificate, setup: &ThreeTermSetup) -> Result<BoundCertificate> {
    let data = &setup.data;
    let mut out = cert.clone();
    let mut a = cert.reduced_bound as f64;
    let mut w_cur = cert.reduced_log_bound;
    let thr = threshold(setup);
    // about two decimal digits fewer than the logarithms carry
    let max_digits = (setup.forms[0].lambda0.0.prec() as f64 * 0.301) as u32 - 8;
    let mut first = true;
    loop {
        let mut digits = if first {
            (data.precision / 3).max(20)
        } else {
            (data.r as f64 * a.max(10.0).log10()).ceil() as u32 + 3
        };
        first = false;
        let mut result = None;
        let mut last = None;
        for _ in 0..=5 {
            if digits > max_digits {
                break;
            }
            let ws: Option<Vec<FormReduction>> = setup.forms.iter().map(|f| reduce_form(f, data, a, digits)).collect();
            if let Some(ws) = ws {
                result = Some((ws.into_iter().map(|f| f.log_bound).fold(thr, f64::max), digits, vec![]));
                break;
            }
            last = Some(digits);
            digits += 3;
        }
        if result.is_none() {
            // plain reduction failed at every scale: list close points at the last one
            if let Some(d) = last {
                let ws: Option<Vec<FormReduction>> = setup
                    .forms
                    .iter()
                    .map(|f| reduce_form(f, data, a, d).or_else(|| enumerate_form(f, data, a, d)))
                    .collect();
                if let Some(ws) = ws {
                    let w_new = ws.iter().map(|f| f.log_bound).fold(thr, f64::max);
                    let exc: Vec<ExceptionalCandidate> = setup
                        .forms
                        .iter()
                        .zip(ws)
                        .flat_map(|(f, red)| red.exceptional.into_iter().map(move |e| ExceptionalCandidate { small: f.small, exponents: e }))
                        .collect();
                    result = Some((w_new, d, exc));
                }
            }
        }
        let Some((w_new, used, exc)) = result else { break };
        let a_new = (data.c * w_new).floor();
        if a_new >= a {
            break;
        }
        out.exceptional.extend(exc);
        out.exceptional.sort();
        out.exceptional.dedup();
        a = a_new;
        w_cur = w_new;
        out.steps.push(ReductionStep { scale_digits: used, exponent_bound: a as u64 });
        if a < 1.0 {
            break;
        }
    }
    out.reduced_bound = a as u64;
    out.reduced_log_bound = w_cur;
    out.tuple_height_bound = data.n as f64 * w_cur;
    Ok(out)
}

pub fn bigint_to_float(x: &BigInt, prec: u32) -> Float {
    Float::with_val(prec, bigint_to_integer(x))
}

/// Number of x-candidates in the enumeration box: (2A+1)^r·w.
pub fn box_size(a: u64, r: usize, w: u64) -> u128 {
    let side = 2 * a as u128 + 1;
    side.checked_pow(r as u32).and_then(|v| v.checked_mul(w as u128)).unwrap_or(u128::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_rule() {
        assert_eq!(kappa_for(true), 1);
        assert_eq!(kappa_for(false), 2);
    }

    #[test]
    fn bound_decreases_with_b() {
        let mut inp = MatveevInput { m: 2, n_deg: 6, kappa: 2, b: 100.0, a_list: vec![1.0, 1.0] };
        let b1 = matveev_bound(&inp, 128).unwrap();
        inp.b = 1000.0;
        let b2 = matveev_bound(&inp, 128).unwrap();
        assert!(b2 < b1);
        inp.a_list[0] = 0.1;
        assert!(matveev_bound(&inp, 128).is_err());
    }

    #[test]
    fn matches_log_sum_evaluation() {
        let inp = MatveevInput { m: 2, n_deg: 6, kappa: 2, b: 100.0, a_list: vec![1.0, 1.0] };
        let v = matveev_bound(&inp, 256).unwrap().to_f64();
        let e = std::f64::consts::E;
        let logv = -(2f64.ln()) + 2.0 * (2.0 * e).ln() + 5.0 * 30f64.ln() + 3.5 * 2f64.ln() + 2.0 * 6f64.ln()
            + (1.0 + 6f64.ln()).ln()
            + (1.0 + 100f64.ln()).ln();
        assert!(((-v).ln() - logv).abs() < 1e-12);
    }
}
