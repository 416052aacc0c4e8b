//! Pair matching over CM fields and the per-branch solver.
//!
//! In a CM field u/c(u) is a root of unity η₀ for every unit u, so the two
//! slots of a place pair satisfy u_ī = σ_i(η₀⁻¹)·u_i exactly. Fixing η₀
//! collapses each relation row to the s representative slots; the reduced
//! rows are then two- or three-term unit equations.

use serde::{Deserialize, Serialize};

use crate::baker::{BoundCertificate, UnitLogData};
use crate::error::{Error, Result};
use crate::field::NFElement;
use crate::linalg::{rref_fraction_free, Matrix, NFMatrix};
use crate::units::{ExponentVector, UnitSystem};

use super::constraints::{conditions_for, coset_from_conditions, ConditionSet, ExponentCoset, RatioConstraint};
use super::threeterm::solve_three_term;

/// Σ coeffs_t σ_{slots_t}(u) = 0 for the unknown unit u.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitEquation {
    pub coeffs: Vec<NFElement>,
    pub slots: Vec<usize>,
    pub provenance: String,
}

impl UnitEquation {
    pub fn terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub indices: (usize, usize),
    pub place: usize,
    /// (c₁, d₁) with ‖u_ℓ/u_k‖_ν ≤ c₁·h(ū)^{d₁}; the ratio is a root of unity.
    pub growth: (f64, f64),
}

/// One pair per place: the two embeddings of the place, which are swapped by
/// the central conjugation.
pub fn match_pairs(units: &UnitSystem) -> Result<Vec<MatchedPair>> {
    let ctx = &units.ctx;
    let c = ctx.central_conjugation().ok_or_else(|| Error::MatchingUnavailable("complex conjugation is not central".into()))?;
    let mut out = Vec::with_capacity(ctx.s());
    for (v, &(i, ib)) in ctx.places.pairs.iter().enumerate() {
        if ctx.gal.compose[c][i] != ib {
            return Err(Error::MatchingUnavailable(format!("place {} is not swapped by the central conjugation", v)));
        }
        out.push(MatchedPair { indices: (i, ib), place: v, growth: (1.0, 0.0) });
    }
    Ok(out)
}

/// Rows of A_μ rewritten over the representative slots for η₀ = ζ^eta, in
/// reduced row echelon form.
pub fn matched_equations(a_mu: &NFMatrix, pairs: &[MatchedPair], units: &UnitSystem, eta: u64) -> Vec<UnitEquation> {
    let ctx = &units.ctx;
    let w = units.w();
    let eta_inv = units.zeta_pow((w - eta % w) % w).clone();
    let s = pairs.len();
    let rows: Vec<Vec<NFElement>> = (0..a_mu.rows)
        .map(|i| {
            pairs
                .iter()
                .map(|p| {
                    let (j, jb) = p.indices;
                    a_mu.get(i, j).add(&a_mu.get(i, jb).mul(&ctx.apply(j, &eta_inv)))
                })
                .collect()
        })
        .collect();
    let zero = NFElement::zero(&ctx.field);
    let m = Matrix::from_rows(rows, zero);
    let (red, pivots) = rref_fraction_free(&m);
    (0..pivots.len())
        .map(|i| {
            let cols: Vec<usize> = (0..s).filter(|&c| !red.get(i, c).is_zero()).collect();
            UnitEquation {
                coeffs: cols.iter().map(|&c| red.get(i, c).clone()).collect(),
                slots: cols.iter().map(|&c| pairs[c].indices.0).collect(),
                provenance: format!("eta={} row={}", eta, i),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BranchOutcome {
    /// Some row has a single term.
    Infeasible,
    Solved,
    /// A row kept four or more terms.
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchSummary {
    pub mu_index: usize,
    pub eta: u64,
    /// Nonzero terms per reduced row.
    pub row_terms: Vec<usize>,
    /// Pairs whose matched coefficient vanishes in every row: the pair
    /// subsum a_ℓu_ℓ + a_ku_k is identically zero.
    pub vanishing_pairs: Vec<usize>,
    pub outcome: BranchOutcome,
    pub three_term_solutions: usize,
    pub points: usize,
    pub families: usize,
}

/// A family before attaching μ: coset, its defining conditions and the
/// automorphism of the defining subsum.
#[derive(Clone, Debug)]
pub struct RawFamily {
    pub coset: ExponentCoset,
    pub conditions: ConditionSet,
    pub sigma: usize,
}

#[derive(Clone, Debug)]
pub struct BranchResult {
    pub summary: BranchSummary,
    pub points: Vec<ExponentVector>,
    pub families: Vec<RawFamily>,
    pub certificates: Vec<BoundCertificate>,
    pub equations: Vec<UnitEquation>,
}

fn ratio(p: usize, q: usize, value: NFElement) -> RatioConstraint {
    RatioConstraint { p, q, value }
}

/// Solves the branch (μ, η₀ = ζ^eta): every unit u with u/c(u) = η₀ and
/// A_μ·(σ_j(u))_j = 0.
pub fn solve_branch(
    mu_index: usize,
    a_mu: &NFMatrix,
    pairs: &[MatchedPair],
    units: &UnitSystem,
    logdata: &UnitLogData,
    eta: u64,
    budget: u128,
) -> Result<BranchResult> {
    let ctx = &units.ctx;
    let c = ctx.central_conjugation().ok_or_else(|| Error::MatchingUnavailable("complex conjugation is not central".into()))?;
    let w = units.w();
    let eqs = matched_equations(a_mu, pairs, units, eta);
    let row_terms: Vec<usize> = eqs.iter().map(|e| e.terms()).collect();
    let vanishing_pairs: Vec<usize> =
        (0..pairs.len()).filter(|&p| eqs.iter().all(|e| !e.slots.contains(&pairs[p].indices.0))).collect();
    let mut summary = BranchSummary {
        mu_index,
        eta,
        row_terms: row_terms.clone(),
        vanishing_pairs,
        outcome: BranchOutcome::Solved,
        three_term_solutions: 0,
        points: 0,
        families: 0,
    };
    let mut result = BranchResult { summary: summary.clone(), points: vec![], families: vec![], certificates: vec![], equations: eqs.clone() };
    if row_terms.iter().any(|&t| t == 1) {
        result.summary.outcome = BranchOutcome::Infeasible;
        return Ok(result);
    }
    if row_terms.iter().any(|&t| t > 3) {
        result.summary.outcome = BranchOutcome::Unavailable;
        return Ok(result);
    }
    let eta_inv = units.zeta_pow((w - eta % w) % w).clone();
    let base = vec![ratio(c, 0, eta_inv)];
    // alternatives per row; two-term rows first so infeasibility shows early
    let mut order: Vec<usize> = (0..eqs.len()).collect();
    order.sort_by_key(|&i| (row_terms[i], i));
    let mut alternatives: Vec<Vec<Vec<RatioConstraint>>> = Vec::new();
    let mut subsum_sigma = None;
    for &i in &order {
        let e = &eqs[i];
        if e.slots.len() == 2 {
            let (p, q) = (e.slots[0], e.slots[1]);
            let v = e.coeffs[1].neg().div(&e.coeffs[0])?;
            subsum_sigma.get_or_insert(ctx.gal.compose[p][ctx.gal.inverse[q]]);
            alternatives.push(vec![vec![ratio(p, q, v)]]);
        } else {
            let (p, q, r) = (e.slots[0], e.slots[1], e.slots[2]);
            let res = solve_three_term(&e.coeffs[0], &e.coeffs[1], &e.coeffs[2], units, logdata, None, budget)?;
            summary.three_term_solutions += res.solutions.len();
            let alts = res
                .solutions
                .iter()
                .map(|s| vec![ratio(p, r, units.from_exponents(&s.x)), ratio(q, r, units.from_exponents(&s.y))])
                .collect();
            result.certificates.push(res.certificate);
            alternatives.push(alts);
        }
    }
    let sigma = subsum_sigma.unwrap_or(c);
    let mut leaves: Vec<(ExponentCoset, ConditionSet)> = Vec::new();
    combine(&alternatives, 0, &mut base.clone(), units, &mut leaves);
    for (coset, conds) in leaves {
        match coset.points() {
            Some(pts) => result.points.extend(pts),
            None => result.families.push(RawFamily { coset, conditions: conds, sigma }),
        }
    }
    result.points.sort();
    result.points.dedup();
    summary.points = result.points.len();
    summary.families = result.families.len();
    result.summary = summary;
    Ok(result)
}

fn combine(
    alts: &[Vec<Vec<RatioConstraint>>],
    i: usize,
    acc: &mut Vec<RatioConstraint>,
    units: &UnitSystem,
    out: &mut Vec<(ExponentCoset, ConditionSet)>,
) {
    let Some(conds) = conditions_for(acc, units) else { return };
    let Some(coset) = coset_from_conditions(&conds, units.rank(), units.w()) else { return };
    if i == alts.len() {
        out.push((coset, conds));
        return;
    }
    for choice in &alts[i] {
        let n = acc.len();
        acc.extend(choice.iter().cloned());
        combine(alts, i + 1, acc, units, out);
        acc.truncate(n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FieldContext;
    use crate::field::NumberField;
    use crate::units::UnitGroupData;
    use std::sync::Arc;

    #[test]
    fn pairs_cover_slots_once() {
        let k = NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap();
        let ctx = Arc::new(FieldContext::new(&k, 256).unwrap());
        let data = UnitGroupData {
            zeta: NFElement::theta(&k).neg(),
            w: 14,
            fund_units: vec![NFElement::from_i64_coords(&k, &[1, 1]), NFElement::from_i64_coords(&k, &[1, 1, 1])],
            declared_regulator: None,
        };
        let us = UnitSystem::new(data, ctx.clone()).unwrap();
        let pairs = match_pairs(&us).unwrap();
        assert_eq!(pairs.len(), 3);
        let mut slots: Vec<usize> = pairs.iter().flat_map(|p| [p.indices.0, p.indices.1]).collect();
        slots.sort();
        assert_eq!(slots, (0..6).collect::<Vec<_>>());
        let c = ctx.central_conjugation().unwrap();
        for p in &pairs {
            assert_eq!(ctx.places.conj_involutions[p.place], c);
            assert_eq!(ctx.gal.compose[c][p.indices.0], p.indices.1);
        }
    }
}
