//! Norm-form pipelines: μ enumeration, per-branch solving and assembly of
//! the report.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::baker::{BoundCertificate, BoundStatus, UnitLogData};
use crate::error::{Error, Result};
use crate::field::NFElement;
use crate::intlin::column_echelon;
use crate::linalg::{check_rank_hypothesis, combinations, rref_fraction_free, NFMatrix};
use crate::poly::format_rational;
use crate::reduce::{alpha_coordinates, build_b_and_a, build_mu_system, enumerate_norm_representatives, normalize_problem, NormFormProblem, Normalized};
use crate::units::{validate_unit_group, ExponentVector, UnitIssue, UnitSystem};

use super::constraints::{coset_from_conditions, family_from_coset, ConditionSet, ExponentCoset, SolutionFamily};
use super::matching::{match_pairs, solve_branch, BranchOutcome, BranchResult, MatchedPair};
use super::report::{CaseLeaf, CaseTag, Completeness, ProblemEcho, RankCheck, SearchStats, SolverReport};
use super::threeterm::DEFAULT_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Sextic,
    PowerBasis,
    Threevar,
    General,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Sextic => "sextic",
            Pipeline::PowerBasis => "power-basis",
            Pipeline::Threevar => "threevar",
            Pipeline::General => "general",
        }
    }

    /// The pipeline matching the problem's shape.
    pub fn detect(p: &NormFormProblem) -> Pipeline {
        let (n, k) = (p.ctx.n(), p.k());
        if n == 6 && k == 5 {
            Pipeline::Sextic
        } else if k == 4 && n >= 8 && is_power_basis(&p.alphas) {
            Pipeline::PowerBasis
        } else if k == 3 {
            Pipeline::Threevar
        } else {
            Pipeline::General
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Cap on enumerated candidates per three-term equation.
    pub budget: u128,
    /// Exponent box for brute-force branches (non-CM fields, rows that keep
    /// four or more terms).
    pub fallback_bound: i64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: DEFAULT_BUDGET, fallback_bound: 12 }
    }
}

/// (1, α, α², α³, …) with α the second entry.
pub fn is_power_basis(alphas: &[NFElement]) -> bool {
    if alphas.len() < 2 || !alphas[0].is_one() {
        return false;
    }
    let a = &alphas[1];
    let mut cur = a.clone();
    for x in &alphas[2..] {
        cur = cur.mul(a);
        if &cur != x {
            return false;
        }
    }
    true
}

/// Z-span of the α's equals its Q-span intersected with Z[θ].
pub fn module_saturated(alphas: &[NFElement]) -> bool {
    let k = alphas.len();
    let n = alphas[0].field().n;
    let rows: Vec<Vec<BigInt>> = alphas
        .iter()
        .map(|a| a.coords().iter().map(|c| if c.is_integer() { c.to_integer() } else { BigInt::zero() }).collect())
        .collect();
    if alphas.iter().any(|a| !a.is_integral_coords()) {
        return false;
    }
    let (h, _) = column_echelon(&rows, n);
    (0..k).all(|i| h[i][i].is_one())
}

/// A solution together with the (μ, u) it came from.
#[derive(Clone, Debug)]
struct Witness {
    mu_index: usize,
    unit: ExponentVector,
}

struct CoreRun {
    report: SolverReport,
    normalized: Normalized,
    witnesses: BTreeMap<Vec<i64>, Witness>,
    reps: Vec<NFElement>,
}

fn echo(p: &NormFormProblem, norm: &Normalized, pipeline: Pipeline) -> ProblemEcho {
    ProblemEcho {
        field: p.ctx.field.label.clone(),
        min_poly: p.ctx.field.poly.iter().map(|c| c.to_string()).collect(),
        alphas: p.alphas.iter().map(|a| a.coords().iter().map(format_rational).collect()).collect(),
        m: p.m.to_string(),
        denominator: norm.d.to_string(),
        m_eff: norm.m_eff.to_string(),
        pipeline: pipeline.name().into(),
    }
}

fn to_i64_vec(x: &[BigInt]) -> Result<Vec<i64>> {
    x.iter()
        .map(|v| v.to_i64().ok_or_else(|| Error::InvalidInput(format!("solution coordinate {} exceeds 64 bits", v))))
        .collect()
}

/// x with Σ x_i α_i = μ·u, if integral.
fn coefficients_of(norm: &Normalized, mu: &NFElement, u: &NFElement) -> Option<Vec<BigInt>> {
    let beta = mu.mul(u);
    let q = alpha_coordinates(&norm.problem, &beta)?;
    q.iter().all(|c| c.is_integer()).then(|| q.iter().map(|c| c.to_integer()).collect())
}

fn unit_group_status(units: &UnitSystem) -> (Completeness, Option<String>) {
    if units.data.declared_regulator.is_none() {
        return (Completeness::ConditionalOnUnitGroup, Some("no declared regulator to compare the unit group against".into()));
    }
    let issues = validate_unit_group(&units.data, &units.ctx);
    match issues.iter().find(|i| matches!(i, UnitIssue::RegulatorMismatch { .. })) {
        Some(i) => (Completeness::ConditionalOnUnitGroup, Some(i.to_string())),
        None => (Completeness::Proven, None),
    }
}

/// Brute force over a coset restricted to |a_i| ≤ bound.
fn brute_force(norm: &Normalized, units: &UnitSystem, mu: &NFElement, coset: &ExponentCoset, bound: i64) -> (Vec<(ExponentVector, Vec<BigInt>)>, usize) {
    let elems = coset.elements_in_box(bound);
    let tested = elems.len();
    let hits = elems
        .par_iter()
        .filter_map(|e| coefficients_of(norm, mu, &units.from_exponents(e)).map(|x| (e.clone(), x)))
        .collect();
    (hits, tested)
}

fn run_core(p: &NormFormProblem, units: &UnitSystem, pipeline: Pipeline, opts: &SolveOptions) -> Result<CoreRun> {
    let t0 = Instant::now();
    let mut timings = Vec::new();
    let norm = normalize_problem(p);
    let sys = build_b_and_a(&norm.problem)?;
    let reps = match &p.lift {
        Some(l) => l.representatives(units, &norm.d),
        None => enumerate_norm_representatives(units, &norm.m_eff),
    };
    timings.push(("norm_representatives".to_string(), t0.elapsed().as_secs_f64()));
    let logdata = UnitLogData::new(units)?;
    let ctx = &units.ctx;
    let w = units.w();
    let mut stats = SearchStats { norm_representatives: reps.len(), ..Default::default() };
    let mut notes = Vec::new();
    let mut completeness = Completeness::Proven;
    let mut assumptions = vec!["the supplied torsion generator and fundamental units generate the full unit group".to_string()];
    let (ug_status, ug_note) = unit_group_status(units);
    completeness = completeness.max(ug_status);
    notes.extend(ug_note);

    let saturated = match &p.lift {
        Some(l) => module_saturated(&l.alphas.iter().map(|a| a.scale_int(&norm.d)).collect::<Vec<_>>()),
        None => module_saturated(&norm.problem.alphas),
    };
    let units_integral = match &p.lift {
        Some(l) => l.integral_units,
        None => units.data.zeta.is_integral_coords() && units.data.fund_units.iter().all(|e| e.is_integral_coords()),
    };
    if !saturated || !units_integral {
        assumptions.push("integrality of family members is checked per member, not certified for whole families".into());
    }

    let a_mus: Vec<NFMatrix> = reps.iter().map(|mu| build_mu_system(&sys, ctx, mu)).collect();
    let t1 = Instant::now();
    let mut points: Vec<(usize, ExponentVector, Vec<BigInt>)> = Vec::new();
    let mut families: Vec<SolutionFamily> = Vec::new();
    let mut certificates: Vec<BoundCertificate> = Vec::new();
    let mut branches = Vec::new();
    let pairs: Vec<MatchedPair>;

    match match_pairs(units) {
        Ok(pr) => {
            pairs = pr;
            let tasks: Vec<(usize, u64)> = (0..reps.len()).flat_map(|i| (0..w).map(move |e| (i, e))).collect();
            let results: Vec<BranchResult> = tasks
                .par_iter()
                .map(|&(i, e)| solve_branch(i, &a_mus[i], &pairs, units, &logdata, e, opts.budget))
                .collect::<Result<_>>()?;
            let c = ctx.central_conjugation().unwrap();
            for res in results {
                let mu = &reps[res.summary.mu_index];
                stats.branches += 1;
                stats.three_term_equations += res.certificates.len();
                stats.three_term_solutions += res.summary.three_term_solutions;
                match res.summary.outcome {
                    BranchOutcome::Infeasible => stats.infeasible_branches += 1,
                    BranchOutcome::Unavailable => {
                        stats.unavailable_branches += 1;
                        // all u with u/c(u) = ζ^eta, searched in a box
                        let eta_inv = units.zeta_pow((w - res.summary.eta % w) % w).clone();
                        let cons = [super::constraints::RatioConstraint { p: c, q: 0, value: eta_inv }];
                        if let Some(coset) = super::constraints::solve_constraints(&cons, units) {
                            let (hits, tested) = brute_force(&norm, units, mu, &coset, opts.fallback_bound);
                            stats.fallback_units_tested += tested;
                            points.extend(hits.into_iter().map(|(e, x)| (res.summary.mu_index, e, x)));
                        }
                        completeness = completeness.max(Completeness::ConditionalOnBound);
                        notes.push(format!(
                            "branch mu={} eta={}: a reduced row kept {} terms; searched |a_i| <= {} only",
                            res.summary.mu_index,
                            res.summary.eta,
                            res.summary.row_terms.iter().max().unwrap_or(&0),
                            opts.fallback_bound
                        ));
                    }
                    BranchOutcome::Solved => {}
                }
                for e in &res.points {
                    stats.candidate_units += 1;
                    match coefficients_of(&norm, mu, &units.from_exponents(e)) {
                        Some(x) => points.push((res.summary.mu_index, e.clone(), x)),
                        None => stats.nonintegral_rejected += 1,
                    }
                }
                for f in &res.families {
                    let integral = saturated && units_integral && mu.is_integral_coords();
                    families.push(family_from_coset(&f.coset, f.conditions.clone(), mu, f.sigma, integral));
                }
                certificates.extend(res.certificates.iter().cloned());
                branches.push(res.summary);
            }
        }
        Err(Error::MatchingUnavailable(why)) => {
            pairs = Vec::new();
            notes.push(format!("matching unavailable ({}); brute-force search with |a_i| <= {}", why, opts.fallback_bound));
            completeness = completeness.max(Completeness::ConditionalOnBound);
            let all = coset_from_conditions(&ConditionSet { linear: vec![], congruences: vec![] }, units.rank(), w).unwrap();
            for (i, mu) in reps.iter().enumerate() {
                let (hits, tested) = brute_force(&norm, units, mu, &all, opts.fallback_bound);
                stats.fallback_units_tested += tested;
                points.extend(hits.into_iter().map(|(e, x)| (i, e, x)));
            }
        }
        Err(e) => return Err(e),
    }
    timings.push(("branches".to_string(), t1.elapsed().as_secs_f64()));

    if certificates.iter().any(|c| matches!(c.status, BoundStatus::Conditional { .. })) {
        completeness = completeness.max(Completeness::ConditionalOnBound);
        notes.push("a three-term search exceeded its budget; results are complete only up to the searched bound".into());
    }
    let certificate = certificates
        .iter()
        .fold(None::<&BoundCertificate>, |best, c| match best {
            Some(b) if (b.reduced_bound, b.reduced_log_bound) >= (c.reduced_bound, c.reduced_log_bound) => Some(b),
            _ => Some(c),
        })
        .cloned();

    let mut witnesses = BTreeMap::new();
    let mut sporadic = BTreeSet::new();
    for (mi, e, x) in points {
        if !p.is_solution(&x) {
            return Err(Error::Validation { check: "sporadic_norm".into(), witness: format!("{:?}", x) });
        }
        let xi = to_i64_vec(&x)?;
        witnesses.entry(xi.clone()).or_insert(Witness { mu_index: mi, unit: e });
        sporadic.insert(xi);
    }
    families.sort();
    families.dedup();
    branches.sort();
    let report = SolverReport {
        problem: echo(p, &norm, pipeline),
        norm_representatives: reps.iter().map(|m| m.coords().iter().map(format_rational).collect()).collect(),
        families,
        sporadic: sporadic.into_iter().collect(),
        certificate,
        completeness,
        assumptions,
        pairs,
        branches,
        rank_check: None,
        case_tree: None,
        notes,
        stats,
        timings,
    };
    Ok(CoreRun { report, normalized: norm, witnesses, reps })
}

/// Any shape of problem: μ enumeration, matched branches, assembly.
pub fn solve_general(p: &NormFormProblem, units: &UnitSystem, opts: &SolveOptions) -> Result<SolverReport> {
    Ok(run_core(p, units, Pipeline::General, opts)?.report)
}

/// Five-variable forms over a sextic field.
pub fn solve_sextic(p: &NormFormProblem, units: &UnitSystem, opts: &SolveOptions) -> Result<SolverReport> {
    if p.ctx.n() != 6 || p.k() != 5 {
        return Err(Error::InvalidInput(format!("sextic pipeline needs n = 6, k = 5 (got n = {}, k = {})", p.ctx.n(), p.k())));
    }
    let mut run = run_core(p, units, Pipeline::Sextic, opts)?;
    let subsum_branches = run.report.branches.iter().filter(|b| !b.vanishing_pairs.is_empty()).count();
    run.report.notes.push(format!(
        "{} of {} branches have a vanishing pair subsum; the rest reduce to one three-term equation",
        subsum_branches,
        run.report.branches.len()
    ));
    Ok(run.report)
}

/// Columns of A checked for the power-basis rank condition.
pub fn power_basis_rank_check(p: &NormFormProblem) -> Result<RankCheck> {
    let norm = normalize_problem(p);
    let sys = build_b_and_a(&norm.problem)?;
    let n = p.ctx.n();
    let t = n - 4;
    check_rank_hypothesis(&sys.a, t).map_err(|witness| Error::RankConditionFailed { witness })?;
    Ok(RankCheck { columns: t, subsets: combinations(n, t).len(), passed: true })
}

/// (1, α, α², α³) over a field of degree n ≥ 8.
pub fn solve_power_basis(p: &NormFormProblem, units: &UnitSystem, opts: &SolveOptions) -> Result<SolverReport> {
    if p.k() != 4 || !is_power_basis(&p.alphas) {
        return Err(Error::InvalidInput("power-basis pipeline needs alphas (1, a, a^2, a^3)".into()));
    }
    if p.ctx.n() < 8 {
        return Err(Error::InvalidInput("power-basis pipeline needs degree at least 8".into()));
    }
    let check = power_basis_rank_check(p)?;
    let mut run = run_core(p, units, Pipeline::PowerBasis, opts)?;
    run.report.rank_check = Some(check);
    Ok(run.report)
}

/// Three-variable forms. The Galois path runs the matched engine and tags
/// each solution with the leaf of the row-reduction case analysis it
/// belongs to.
pub fn solve_threevar(p: &NormFormProblem, units: &UnitSystem, opts: &SolveOptions) -> Result<SolverReport> {
    if p.k() != 3 {
        return Err(Error::InvalidInput(format!("three-variable pipeline needs k = 3 (got {})", p.k())));
    }
    let run = run_core(p, units, Pipeline::Threevar, opts)?;
    let sys = build_b_and_a(&run.normalized.problem)?;
    let mut counts: BTreeMap<CaseTag, usize> = CaseTag::ALL.iter().map(|t| (*t, 0)).collect();
    for w in run.witnesses.values() {
        let a_mu = build_mu_system(&sys, &units.ctx, &run.reps[w.mu_index]);
        let tag = classify_case(&a_mu, &units.from_exponents(&w.unit), units)?;
        *counts.get_mut(&tag).unwrap() += 1;
    }
    for f in &run.report.families {
        let mu = family_mu(f, units);
        let a_mu = build_mu_system(&sys, &units.ctx, &mu);
        let tag = classify_case(&a_mu, &units.from_exponents(&f.base), units)?;
        *counts.get_mut(&tag).unwrap() += 1;
    }
    let mut report = run.report;
    report.case_tree = Some(
        CaseTag::ALL
            .iter()
            .map(|&tag| CaseLeaf {
                tag,
                route: match tag {
                    CaseTag::B1Zero => "b_1 = 0: the last pair is large; matched three-term equations".into(),
                    CaseTag::SubsumSplit => "a_i u_i + b_i u_k = 0 for all i < k: two-term subsums and three-term rows".into(),
                    CaseTag::Generic => "generic: height bound from 1 > |u_n|; matched three-term equations".into(),
                },
                solutions: counts[&tag],
            })
            .collect(),
    );
    Ok(report)
}

/// Leaf of the case analysis for the solution vector (σ_j(u))_j of A_μ:
/// order the slots by size at the first place (conjugate slots adjacent),
/// row reduce, and inspect the rows above the non-pivot column k.
pub fn classify_case(a_mu: &NFMatrix, u: &NFElement, units: &UnitSystem) -> Result<CaseTag> {
    let ctx = &units.ctx;
    let n = ctx.n();
    let mut places: Vec<(i64, usize)> = (0..ctx.s())
        .map(|v| {
            let j = ctx.places.pairs[v].0;
            let l = ctx.table.embed_at(u, j).log_abs().map(|b| b.mid_f64()).unwrap_or(f64::NEG_INFINITY);
            (-(l * 1e9).round() as i64, v)
        })
        .collect();
    places.sort();
    let order: Vec<usize> = places.iter().flat_map(|&(_, v)| [ctx.places.pairs[v].0, ctx.places.pairs[v].1]).collect();
    let m = a_mu.select_columns(&order);
    let (red, pivots) = rref_fraction_free(&m);
    let k = (0..n.saturating_sub(2)).find(|c| !pivots.contains(c)).ok_or_else(|| Error::Validation {
        check: "threevar_pivots".into(),
        witness: format!("pivots {:?} leave no free column among the first n-2", pivots),
    })?;
    if k == 0 {
        return Ok(CaseTag::SubsumSplit);
    }
    if red.get(0, k).is_zero() {
        return Ok(CaseTag::B1Zero);
    }
    let uk = ctx.apply(order[k], u);
    let split = (0..k).all(|i| red.get(i, i).mul(&ctx.apply(order[i], u)).add(&red.get(i, k).mul(&uk)).is_zero());
    Ok(if split { CaseTag::SubsumSplit } else { CaseTag::Generic })
}

pub fn family_mu(f: &SolutionFamily, units: &UnitSystem) -> NFElement {
    let coords: Vec<_> = f.mu.iter().map(|s| crate::poly::parse_rational(s).expect("family mu")).collect();
    NFElement::from_coords(&units.ctx.field, &coords)
}

/// Runs the pipeline matching the problem's shape.
pub fn solve(p: &NormFormProblem, units: &UnitSystem, pipeline: Option<Pipeline>, opts: &SolveOptions) -> Result<SolverReport> {
    match pipeline.unwrap_or_else(|| Pipeline::detect(p)) {
        Pipeline::Sextic => solve_sextic(p, units, opts),
        Pipeline::PowerBasis => solve_power_basis(p, units, opts),
        Pipeline::Threevar => solve_threevar(p, units, opts),
        Pipeline::General => solve_general(p, units, opts),
    }
}

/// Bound on |a_i| for family members whose coefficients satisfy
/// max|x_i| ≤ bound.
pub fn family_exponent_bound(p: &NormFormProblem, units: &UnitSystem, logdata: &UnitLogData, mu: &NFElement, bound: i64) -> i64 {
    let ctx = &units.ctx;
    let norm = normalize_problem(p);
    let u: Vec<f64> = (0..ctx.s())
        .map(|v| {
            let j = ctx.place_embedding(v);
            let s: f64 = norm.problem.alphas.iter().map(|a| ctx.table.embed_at(a, j).abs_upper().to_f64()).sum();
            let m = ctx.table.embed_at(mu, j).abs_lower().to_f64();
            (bound as f64 * s).ln() - m.ln()
        })
        .collect();
    let wmax = u.iter().cloned().fold(0.0, f64::max).max(u.iter().map(|x| x.max(0.0)).sum::<f64>());
    (logdata.c * wmax * (1.0 + 1e-9)).ceil() as i64 + 1
}

/// Family members with max|x_i| ≤ bound, as coefficient vectors.
pub fn family_members_in_box(p: &NormFormProblem, units: &UnitSystem, f: &SolutionFamily, bound: i64) -> Result<Vec<Vec<i64>>> {
    let logdata = UnitLogData::new(units)?;
    let mu = family_mu(f, units);
    let a = family_exponent_bound(p, units, &logdata, &mu, bound);
    let coset = f.coset(units.rank(), units.w()).ok_or_else(|| Error::Validation { check: "family_conditions".into(), witness: "empty".into() })?;
    let norm = normalize_problem(p);
    let mut out: Vec<Vec<i64>> = coset
        .elements_in_box(a)
        .par_iter()
        .filter_map(|e| coefficients_of(&norm, &mu, &units.from_exponents(e)))
        .filter(|x| x.iter().all(|v| v.abs() <= BigInt::from(bound)))
        .map(|x| to_i64_vec(&x))
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// The report's solutions with max|x_i| ≤ bound: sporadic ones and family
/// members.
pub fn solutions_in_box(report: &SolverReport, p: &NormFormProblem, units: &UnitSystem, bound: i64) -> Result<Vec<Vec<i64>>> {
    let mut out: BTreeSet<Vec<i64>> = report.sporadic.iter().filter(|x| x.iter().all(|v| v.abs() <= bound)).cloned().collect();
    for f in &report.families {
        out.extend(family_members_in_box(p, units, f, bound)?);
    }
    Ok(out.into_iter().collect())
}

/// Coefficient vector of a family member, if integral.
pub fn family_member_coefficients(p: &NormFormProblem, units: &UnitSystem, f: &SolutionFamily, e: &ExponentVector) -> Option<Vec<BigInt>> {
    let norm = normalize_problem(p);
    coefficients_of(&norm, &family_mu(f, units), &units.from_exponents(e))
}

/// Up to `count` distinct integral members of a family, taken from shells
/// max|t_j| = 0, 1, 2, … of the direction multipliers (all torsion shifts),
/// up to shell `max_shell`.
pub fn family_samples(p: &NormFormProblem, units: &UnitSystem, f: &SolutionFamily, count: usize, max_shell: i64) -> Vec<Vec<BigInt>> {
    let Some(coset) = f.coset(units.rank(), units.w()) else { return Vec::new() };
    let d = coset.directions().len();
    let steps = units.w() / coset.torsion_step();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for shell in 0..=max_shell {
        let side = 2 * shell + 1;
        let total = (side as u64).pow(d as u32);
        for idx in 0..total {
            let mut rest = idx;
            let t: Vec<i64> = (0..d)
                .map(|_| {
                    let v = (rest % side as u64) as i64 - shell;
                    rest /= side as u64;
                    v
                })
                .collect();
            if t.iter().map(|x| x.abs()).max().unwrap_or(0) != shell {
                continue;
            }
            for l in 0..steps {
                let e = coset.member(&t, l);
                if let Some(x) = family_member_coefficients(p, units, f, &e) {
                    if !out.contains(&x) {
                        out.push(x);
                        if out.len() >= count {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}
