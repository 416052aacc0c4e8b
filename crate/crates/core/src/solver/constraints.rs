//! Exponent constraints σ_p(u)/σ_q(u) = v on an unknown unit u, and their
//! solution sets: cosets of a lattice in (a_1, …, a_r, k)-space.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::field::NFElement;
use crate::intlin::{reduce_mod_hnf, row_hnf, solve_integer_system};
use crate::units::{ExponentVector, UnitSystem};

/// σ_p(u) / σ_q(u) = value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioConstraint {
    pub p: usize,
    pub q: usize,
    pub value: NFElement,
}

/// Σ coeffs_i a_i = rhs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearCondition {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

/// k_coeff·k + Σ a_coeffs_i a_i ≡ rhs (mod modulus).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Congruence {
    pub k_coeff: i64,
    pub a_coeffs: Vec<i64>,
    pub rhs: i64,
    pub modulus: u64,
}

/// Integer form of a constraint set: the exact conditions on (k, a).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionSet {
    pub linear: Vec<LinearCondition>,
    pub congruences: Vec<Congruence>,
}

impl ConditionSet {
    pub fn holds(&self, e: &ExponentVector) -> bool {
        let lin = self
            .linear
            .iter()
            .all(|c| c.coeffs.iter().zip(&e.a).map(|(x, y)| *x as i128 * *y as i128).sum::<i128>() == c.rhs as i128);
        lin && self.congruences.iter().all(|c| {
            let v = c.k_coeff as i128 * e.k as i128 + c.a_coeffs.iter().zip(&e.a).map(|(x, y)| *x as i128 * *y as i128).sum::<i128>();
            (v - c.rhs as i128).rem_euclid(c.modulus as i128) == 0
        })
    }
}

/// Translates ratio constraints into linear conditions and congruences.
/// None if some value is not a unit (no solutions).
pub fn conditions_for(constraints: &[RatioConstraint], units: &UnitSystem) -> Option<ConditionSet> {
    let r = units.rank();
    let w = units.w();
    let mut linear = Vec::new();
    let mut congruences = Vec::new();
    for c in constraints {
        let g = units.discrete_log(&c.value).ok()?;
        let (ap, aq) = (&units.action[c.p], &units.action[c.q]);
        for j in 0..r {
            linear.push(LinearCondition { coeffs: (0..r).map(|i| ap.m[j][i] - aq.m[j][i]).collect(), rhs: g.a[j] });
        }
        let k_coeff = (ap.s as i64 - aq.s as i64).rem_euclid(w as i64);
        let a_coeffs = (0..r).map(|i| (ap.t[i] - aq.t[i]).rem_euclid(w as i64)).collect();
        congruences.push(Congruence { k_coeff, a_coeffs, rhs: g.k as i64, modulus: w });
    }
    linear.retain(|l| l.coeffs.iter().any(|&x| x != 0) || l.rhs != 0);
    congruences.retain(|c| c.k_coeff != 0 || c.a_coeffs.iter().any(|&x| x != 0) || c.rhs != 0);
    linear.sort();
    linear.dedup();
    congruences.sort();
    congruences.dedup();
    Some(ConditionSet { linear, congruences })
}

/// z₀ + Λ ⊂ Z^{r+1}, coordinates (a_1, …, a_r, k). Λ always contains
/// (0, …, 0, w); `lattice` is its row HNF and `base` is reduced modulo it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentCoset {
    pub r: usize,
    pub w: u64,
    pub base: Vec<BigInt>,
    pub lattice: Vec<Vec<BigInt>>,
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

impl ExponentCoset {
    /// Number of free unit directions.
    pub fn free_rank(&self) -> usize {
        self.lattice.iter().filter(|row| row[..self.r].iter().any(|x| !x.is_zero())).count()
    }

    /// d with k ↦ k + d a symmetry of the coset (d | w).
    pub fn torsion_step(&self) -> u64 {
        self.lattice
            .iter()
            .find(|row| row[..self.r].iter().all(|x| x.is_zero()))
            .map(|row| row[self.r].to_u64().unwrap())
            .unwrap_or(self.w)
    }

    pub fn base_vector(&self) -> ExponentVector {
        to_exponent(&self.base, self.r, self.w)
    }

    pub fn directions(&self) -> Vec<ExponentVector> {
        self.lattice
            .iter()
            .filter(|row| row[..self.r].iter().any(|x| !x.is_zero()))
            .map(|row| to_exponent(row, self.r, self.w))
            .collect()
    }

    /// All elements, when the coset is finite (free rank 0).
    pub fn points(&self) -> Option<Vec<ExponentVector>> {
        if self.free_rank() > 0 {
            return None;
        }
        let base = self.base_vector();
        let d = self.torsion_step();
        let mut out: Vec<ExponentVector> =
            (0..self.w / d).map(|j| ExponentVector { k: (base.k + j * d) % self.w, a: base.a.clone() }).collect();
        out.sort();
        Some(out)
    }

    /// base + Σ t_j dir_j with torsion shift l·d.
    pub fn member(&self, t: &[i64], l: u64) -> ExponentVector {
        let mut e = self.base_vector();
        for (tj, dir) in t.iter().zip(self.directions()) {
            for (x, y) in e.a.iter_mut().zip(&dir.a) {
                *x += tj * y;
            }
            e.k = ((e.k as i128 + *tj as i128 * dir.k as i128).rem_euclid(self.w as i128)) as u64;
        }
        e.k = (e.k + l * self.torsion_step()) % self.w;
        e
    }

    /// Every element with max|a_i| ≤ bound, sorted. Walks the echelon rows
    /// so each step only ranges over admissible multipliers.
    pub fn elements_in_box(&self, bound: i64) -> Vec<ExponentVector> {
        let r = self.r;
        let rows: Vec<&Vec<BigInt>> = self.lattice.iter().filter(|row| row[..r].iter().any(|x| !x.is_zero())).collect();
        let mut out = Vec::new();
        let mut cur = self.base.clone();
        self.walk(&rows, 0, &mut cur, bound, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn walk(&self, rows: &[&Vec<BigInt>], i: usize, cur: &mut Vec<BigInt>, bound: i64, out: &mut Vec<ExponentVector>) {
        let r = self.r;
        if i == rows.len() {
            if cur[..r].iter().all(|x| x.abs_le(bound)) {
                let d = self.torsion_step();
                let base = to_exponent(cur, r, self.w);
                for j in 0..self.w / d {
                    out.push(ExponentVector { k: (base.k + j * d) % self.w, a: base.a.clone() });
                }
            }
            return;
        }
        let row = rows[i];
        let pc = row.iter().position(|x| !x.is_zero()).unwrap();
        // rows below have zeros in column pc, so this multiplier fixes cur[pc]
        let piv = &row[pc];
        let lo = (-big(bound) - &cur[pc]).div_ceil(piv);
        let hi = (big(bound) - &cur[pc]).div_floor(piv);
        let mut t = lo;
        while t <= hi {
            let saved = cur.clone();
            for (x, y) in cur.iter_mut().zip(row.iter()) {
                *x += &t * y;
            }
            self.walk(rows, i + 1, cur, bound, out);
            *cur = saved;
            t += 1;
        }
    }
}

trait AbsLe {
    fn abs_le(&self, b: i64) -> bool;
}

impl AbsLe for BigInt {
    fn abs_le(&self, b: i64) -> bool {
        *self <= big(b) && *self >= big(-b)
    }
}

fn to_exponent(v: &[BigInt], r: usize, w: u64) -> ExponentVector {
    let k = v[r].mod_floor(&BigInt::from(w)).to_u64().unwrap();
    ExponentVector { k, a: v[..r].iter().map(|x| x.to_i64().expect("exponent overflow")).collect() }
}

/// Solution set of a list of ratio constraints, or None when empty.
pub fn solve_constraints(constraints: &[RatioConstraint], units: &UnitSystem) -> Option<ExponentCoset> {
    let conds = conditions_for(constraints, units)?;
    coset_from_conditions(&conds, units.rank(), units.w())
}

/// Unknowns (a_1..a_r, k, λ_1..λ_C): linear rows, then each congruence as
/// k_coeff·k + a_coeffs·a − w·λ_c = rhs.
pub fn coset_from_conditions(conds: &ConditionSet, r: usize, w: u64) -> Option<ExponentCoset> {
    let nc = conds.congruences.len();
    let ncols = r + 1 + nc;
    let mut e: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs = Vec::new();
    for l in &conds.linear {
        let mut row = vec![BigInt::zero(); ncols];
        for (i, &c) in l.coeffs.iter().enumerate() {
            row[i] = big(c);
        }
        e.push(row);
        rhs.push(big(l.rhs));
    }
    for (ci, c) in conds.congruences.iter().enumerate() {
        let mut row = vec![BigInt::zero(); ncols];
        for (i, &x) in c.a_coeffs.iter().enumerate() {
            row[i] = big(x);
        }
        row[r] = big(c.k_coeff);
        row[r + 1 + ci] = -BigInt::from(c.modulus);
        e.push(row);
        rhs.push(big(c.rhs));
    }
    let (part, kernel) = solve_integer_system(&e, &rhs, ncols)?;
    let mut gens: Vec<Vec<BigInt>> = kernel.iter().map(|v| v[..r + 1].to_vec()).collect();
    let mut wrow = vec![BigInt::zero(); r + 1];
    wrow[r] = BigInt::from(w);
    gens.push(wrow);
    let lattice = row_hnf(&gens, r + 1);
    let base = reduce_mod_hnf(&part[..r + 1], &lattice);
    Some(ExponentCoset { r, w, base, lattice })
}

/// A positive-dimensional set of solutions: every unit u with exponents in
/// the coset gives the solution x with Σ x_i α_i = μ·u.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SolutionFamily {
    /// Power-basis coordinates of μ.
    pub mu: Vec<String>,
    /// Automorphism of the defining subsum a·u = b·σ(u).
    pub sigma: usize,
    pub base: ExponentVector,
    pub directions: Vec<ExponentVector>,
    /// k may be shifted by multiples of this.
    pub torsion_step: u64,
    pub linear_conditions: Vec<LinearCondition>,
    pub congruences: Vec<Congruence>,
    /// False when members are only known to have rational coordinates.
    pub integrality_verified: bool,
}

impl SolutionFamily {
    pub fn conditions(&self) -> ConditionSet {
        ConditionSet { linear: self.linear_conditions.clone(), congruences: self.congruences.clone() }
    }

    pub fn coset(&self, r: usize, w: u64) -> Option<ExponentCoset> {
        coset_from_conditions(&self.conditions(), r, w)
    }

    pub fn member(&self, t: &[i64], l: u64, w: u64) -> ExponentVector {
        let mut e = self.base.clone();
        for (tj, dir) in t.iter().zip(&self.directions) {
            for (x, y) in e.a.iter_mut().zip(&dir.a) {
                *x += tj * y;
            }
            e.k = ((e.k as i128 + *tj as i128 * dir.k as i128).rem_euclid(w as i128)) as u64;
        }
        e.k = (e.k + l * self.torsion_step) % w;
        e
    }
}

pub fn family_from_coset(coset: &ExponentCoset, conds: ConditionSet, mu: &NFElement, sigma: usize, integral: bool) -> SolutionFamily {
    SolutionFamily {
        mu: mu.coords().iter().map(crate::poly::format_rational).collect(),
        sigma,
        base: coset.base_vector(),
        directions: coset.directions(),
        torsion_step: coset.torsion_step(),
        linear_conditions: conds.linear,
        congruences: conds.congruences,
        integrality_verified: integral,
    }
}

/// Two-term equation a·σ_{slot_u}(u) + b·σ_{slot_v}(u) = 0: the exponent
/// coset of all unit solutions, None when there are none.
pub fn solve_two_term(a: &NFElement, slot_u: usize, b: &NFElement, slot_v: usize, units: &UnitSystem) -> Option<ExponentCoset> {
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let value = b.neg().div(a).ok()?;
    solve_constraints(&[RatioConstraint { p: slot_u, q: slot_v, value }], units)
}

/// The family through u₀ of the subsum a·u + b·σ(u) = 0.
pub fn extract_families(subsum: (&NFElement, &NFElement, usize), u0: &ExponentVector, mu: &NFElement, units: &UnitSystem) -> Option<SolutionFamily> {
    let (a, b, sigma) = subsum;
    let value = a.neg().div(b).ok()?;
    let cons = [RatioConstraint { p: sigma, q: 0, value }];
    let conds = conditions_for(&cons, units)?;
    if !conds.holds(u0) {
        return None;
    }
    let coset = coset_from_conditions(&conds, units.rank(), units.w())?;
    Some(family_from_coset(&coset, conds, mu, sigma, true))
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
    fn identity_subsum_is_everything() {
        let us = zeta7();
        let one = NFElement::one(&us.ctx.field);
        let c = solve_two_term(&one, 0, &one.neg(), 0, &us).unwrap();
        assert_eq!(c.free_rank(), 2);
        assert_eq!(c.torsion_step(), 1);
        let two = NFElement::from_int(&us.ctx.field, 2);
        assert!(solve_two_term(&one, 1, &two, 0, &us).is_none());
    }

    #[test]
    fn conjugation_subsum_members_satisfy_it() {
        let us = zeta7();
        let f = us.ctx.field.clone();
        let c = us.ctx.central_conjugation().unwrap();
        let one = NFElement::one(&f);
        // u = c(u): the real units
        let cs = solve_two_term(&one, c, &one.neg(), 0, &us).unwrap();
        assert_eq!(cs.free_rank(), 2);
        for t in [[0, 0], [1, -2], [3, 1]] {
            for l in 0..3 {
                let e = cs.member(&t, l);
                let u = us.from_exponents(&e);
                assert_eq!(us.ctx.apply(c, &u), u);
            }
        }
        let fam = extract_families((&one, &one.neg(), c), &cs.base_vector(), &one, &us).unwrap();
        assert_eq!(fam.directions.len(), 2);
        assert!(fam.conditions().holds(&fam.member(&[2, -1], 1, 14)));
        // exactly ±1 among the torsion
        let pts: Vec<_> = cs.elements_in_box(0);
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn finite_cosets_list_points() {
        let us = zeta7();
        let u = us.from_exponents(&ExponentVector { k: 3, a: vec![2, -1] });
        let cons: Vec<RatioConstraint> = (1..6).map(|s| RatioConstraint { p: s, q: 0, value: us.ctx.apply(s, &u).div(&u).unwrap() }).collect();
        let c = solve_constraints(&cons, &us).unwrap();
        let pts = c.points().unwrap();
        // u and −u
        assert_eq!(pts.len(), 2);
        assert!(pts.contains(&ExponentVector { k: 3, a: vec![2, -1] }));
        for p in &pts {
            let v = us.from_exponents(p);
            assert!(cons.iter().all(|cn| us.ctx.apply(cn.p, &v).div(&v).unwrap() == cn.value));
        }
    }
}
