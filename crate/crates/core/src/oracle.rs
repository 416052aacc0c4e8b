//! Brute-force ground truth: exhaustive coefficient boxes for the norm form
//! and exponent boxes for unit equations. No pruning beyond exactness.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::NFElement;
use crate::reduce::NormFormProblem;
use crate::units::{ExponentVector, UnitSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxSpec {
    pub bound: i64,
    pub cap: u128,
}

impl BoxSpec {
    pub fn new(bound: i64) -> Self {
        BoxSpec { bound, cap: 1 << 34 }
    }
}

/// Integer matrix of multiplication by Σ x_i α_i with α's integral: the norm
/// is its determinant. Columns: images of θ^j.
struct NormKernel {
    /// mats[i][r][c]: multiplication-by-α_i matrix, scaled by `den`.
    mats: Vec<Vec<Vec<i128>>>,
    n: usize,
    target: BigInt,
}

impl NormKernel {
    fn new(p: &NormFormProblem) -> Option<NormKernel> {
        let n = p.ctx.n();
        let den = p.alphas.iter().fold(BigInt::from(1), |acc, a| num_integer::lcm(acc, a.denominator().clone()));
        let mut mats = Vec::new();
        for a in &p.alphas {
            let m = a.mult_matrix();
            let mut rows = vec![vec![0i128; n]; n];
            for r in 0..n {
                for c in 0..n {
                    let v = &m[r][c] * crate::poly::qi(&den);
                    if !v.is_integer() {
                        return None;
                    }
                    rows[r][c] = v.to_integer().to_i128()?;
                }
            }
            mats.push(rows);
        }
        let target = &p.m * num_traits::pow(den, n);
        Some(NormKernel { mats, n, target })
    }

    fn norm_scaled(&self, x: &[i64]) -> BigInt {
        let n = self.n;
        let mut m = vec![vec![0i128; n]; n];
        for (xi, mat) in x.iter().zip(&self.mats) {
            if *xi != 0 {
                for r in 0..n {
                    for c in 0..n {
                        m[r][c] += *xi as i128 * mat[r][c];
                    }
                }
            }
        }
        bareiss_det(m).unwrap_or_else(|| bareiss_det_big(&self.mats, x, n))
    }
}

/// Fraction-free determinant in i128; None on overflow.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> Option<BigInt> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else { return Some(BigInt::zero()) };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].checked_mul(m[k][k])?.checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    Some(BigInt::from(sign * m[n - 1][n - 1]))
}

fn bareiss_det_big(mats: &[Vec<Vec<i128>>], x: &[i64], n: usize) -> BigInt {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (xi, mat) in x.iter().zip(mats) {
        for r in 0..n {
            for c in 0..n {
                m[r][c] += BigInt::from(*xi) * BigInt::from(mat[r][c]);
            }
        }
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    BigInt::from(sign) * &m[n - 1][n - 1]
}

fn decode(mut idx: u128, k: usize, bound: i64) -> Vec<i64> {
    let side = (2 * bound + 1) as u128;
    let mut x = vec![0i64; k];
    for xi in x.iter_mut() {
        *xi = (idx % side) as i64 - bound;
        idx /= side;
    }
    x
}

/// Every x with max|x_i| ≤ bound and N(Σ x_i α_i) = m, sorted.
pub fn oracle_coefficient_box(p: &NormFormProblem, spec: &BoxSpec) -> Result<Vec<Vec<i64>>> {
    let k = p.k();
    let side = (2 * spec.bound + 1) as u128;
    let total = side.checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > spec.cap {
        return Err(Error::CapExceeded { points: total, cap: spec.cap });
    }
    let kern = NormKernel::new(p);
    let target = crate::poly::qi(&p.m);
    let mut out: Vec<Vec<i64>> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let x = decode(idx, k, spec.bound);
            let hit = match &kern {
                Some(kn) => kn.norm_scaled(&x) == kn.target,
                None => {
                    let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                    p.linear_form(&xb).norm() == target
                }
            };
            hit.then_some(x)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// All units ζ^k ∏ ε_i^{a_i} with |a_i| ≤ bound, keyed by value.
pub fn exponent_box_elements(units: &UnitSystem, bound: i64) -> Vec<(ExponentVector, NFElement)> {
    let r = units.rank();
    let side = (2 * bound + 1) as u128;
    let count = side.pow(r as u32);
    let mut out: Vec<(ExponentVector, NFElement)> = (0..count)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let a = decode(idx, r, bound);
            let free = units.from_exponents(&ExponentVector { k: 0, a: a.clone() });
            (0..units.w()).map(move |k| (ExponentVector { k, a: a.clone() }, free.clone())).collect::<Vec<_>>()
        })
        .map(|(e, free)| {
            let v = units.zeta_pow(e.k).mul(&free);
            (e, v)
        })
        .collect();
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Solutions of c_0 u_0 + … + c_{t−1} u_{t−1} = 0 with u_{t−1} = 1 and every
/// other u_i a unit in the exponent box. Returned as sorted tuples of t − 1
/// exponent vectors.
pub fn oracle_exponent_box(coeffs: &[NFElement], units: &UnitSystem, spec: &BoxSpec) -> Result<Vec<Vec<ExponentVector>>> {
    let t = coeffs.len();
    if t < 2 {
        return Err(Error::InvalidInput("unit equation needs at least two terms".into()));
    }
    if let Some(i) = coeffs.iter().position(|c| c.is_zero()) {
        return Err(Error::DegenerateCoefficient(i));
    }
    let r = units.rank();
    let side = (2 * spec.bound + 1) as u128;
    let per = side.pow(r as u32) * units.w() as u128;
    let outer = per.checked_pow((t - 2) as u32).unwrap_or(u128::MAX);
    if outer > spec.cap {
        return Err(Error::CapExceeded { points: outer, cap: spec.cap });
    }
    let elems = exponent_box_elements(units, spec.bound);
    let index: HashMap<&NFElement, usize> = elems.iter().enumerate().map(|(i, (_, v))| (v, i)).collect();
    let last = &coeffs[t - 1];
    let solve_for = &coeffs[t - 2];
    let mut out: Vec<Vec<ExponentVector>> = (0..outer)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rest = idx;
            let mut picks = Vec::with_capacity(t - 2);
            let mut acc = last.clone();
            for c in &coeffs[..t - 2] {
                let j = (rest % per) as usize;
                rest /= per;
                picks.push(j);
                acc = acc.add(&c.mul(&elems[j].1));
            }
            // solve_for · u = −acc
            let u = acc.neg().div(solve_for).ok()?;
            let j = *index.get(&u)?;
            let mut tuple: Vec<ExponentVector> = picks.iter().map(|&i| elems[i].0.clone()).collect();
            tuple.push(elems[j].0.clone());
            Some(tuple)
        })
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FieldContext;
    use crate::field::NumberField;
    use crate::units::UnitGroupData;
    use std::sync::Arc;

    fn zeta7() -> UnitSystem {
        let k = NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap();
        let ctx = Arc::new(FieldContext::new(&k, 256).unwrap());
        let data = UnitGroupData {
            zeta: NFElement::theta(&k).neg(),
            w: 14,
            fund_units: vec![NFElement::from_i64_coords(&k, &[1, 1]), NFElement::from_i64_coords(&k, &[1, 1, 1])],
            declared_regulator: None,
        };
        UnitSystem::new(data, ctx).unwrap()
    }

    #[test]
    fn coefficient_box_units_and_norm_two() {
        let us = zeta7();
        let f = &us.ctx.field;
        let alphas: Vec<NFElement> = (0..3).map(|j| NFElement::theta_pow(f, j)).collect();
        let p = NormFormProblem::new(us.ctx.clone(), alphas.clone(), 1.into()).unwrap();
        let sols = oracle_coefficient_box(&p, &BoxSpec::new(2)).unwrap();
        for x in [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, 0, -1]] {
            assert!(sols.contains(&x.to_vec()));
        }
        for x in &sols {
            let xb: Vec<BigInt> = x.iter().map(|&v| v.into()).collect();
            assert!(p.is_solution(&xb));
        }
        let p2 = NormFormProblem::new(us.ctx.clone(), alphas, 2.into()).unwrap();
        assert!(oracle_coefficient_box(&p2, &BoxSpec::new(3)).unwrap().is_empty());
        let tiny = BoxSpec { bound: 5, cap: 10 };
        assert!(matches!(oracle_coefficient_box(&p, &tiny), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn exponent_box_simple_equations() {
        let us = zeta7();
        let f = &us.ctx.field;
        let one = NFElement::one(f);
        let coeffs = vec![one.clone(), one.clone(), NFElement::from_int(f, -2)];
        let sols = oracle_exponent_box(&coeffs, &us, &BoxSpec::new(1)).unwrap();
        assert!(sols.contains(&vec![ExponentVector::zero(2), ExponentVector::zero(2)]));
        let coeffs = vec![one.clone(), one.neg()];
        let sols = oracle_exponent_box(&coeffs, &us, &BoxSpec::new(0)).unwrap();
        assert_eq!(sols, vec![vec![ExponentVector::zero(2)]]);
    }
}
