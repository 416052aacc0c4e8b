//! The solver's output document.

use serde::{Deserialize, Serialize};

use crate::baker::BoundCertificate;

use super::constraints::SolutionFamily;
use super::matching::{BranchSummary, MatchedPair};

/// Ordered from strongest to weakest; a merged report takes the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Completeness {
    Proven,
    ConditionalOnUnitGroup,
    ConditionalOnBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemEcho {
    pub field: String,
    /// Coefficients of the defining polynomial, constant term first.
    pub min_poly: Vec<String>,
    /// Power-basis coordinates of each α_i.
    pub alphas: Vec<Vec<String>>,
    pub m: String,
    /// Common denominator d of the α's; the search runs with m·dⁿ.
    pub denominator: String,
    pub m_eff: String,
    pub pipeline: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub norm_representatives: usize,
    pub branches: usize,
    pub infeasible_branches: usize,
    pub unavailable_branches: usize,
    pub three_term_equations: usize,
    pub three_term_solutions: usize,
    pub candidate_units: usize,
    pub nonintegral_rejected: usize,
    pub fallback_units_tested: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCheck {
    /// Every subset of this many columns of A was tested.
    pub columns: usize,
    pub subsets: usize,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    B1Zero,
    SubsumSplit,
    Generic,
}

impl CaseTag {
    pub const ALL: [CaseTag; 3] = [CaseTag::B1Zero, CaseTag::SubsumSplit, CaseTag::Generic];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseLeaf {
    pub tag: CaseTag,
    pub route: String,
    pub solutions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub problem: ProblemEcho,
    /// One integral μ per associate class of norm m_eff.
    pub norm_representatives: Vec<Vec<String>>,
    pub families: Vec<SolutionFamily>,
    pub sporadic: Vec<Vec<i64>>,
    /// The weakest bound met (largest reduced exponent bound).
    pub certificate: Option<BoundCertificate>,
    pub completeness: Completeness,
    pub assumptions: Vec<String>,
    pub pairs: Vec<MatchedPair>,
    pub branches: Vec<BranchSummary>,
    pub rank_check: Option<RankCheck>,
    pub case_tree: Option<Vec<CaseLeaf>>,
    pub notes: Vec<String>,
    pub stats: SearchStats,
    /// Wall-clock seconds per stage; not part of the canonical document.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct WithTimings<'a> {
    report: &'a SolverReport,
    timings: Vec<(String, f64)>,
}

impl SolverReport {
    /// Deterministic JSON: no timings, sorted collections.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn json_with_timings(&self) -> String {
        serde_json::to_string_pretty(&WithTimings { report: self, timings: self.timings.clone() }).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<SolverReport> {
        serde_json::from_str(s)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("field {}  pipeline {}  m = {}\n", self.problem.field, self.problem.pipeline, self.problem.m));
        s.push_str(&format!("norm representatives: {}\n", self.norm_representatives.len()));
        s.push_str(&format!("sporadic solutions: {}\n", self.sporadic.len()));
        for x in &self.sporadic {
            s.push_str(&format!("  {:?}\n", x));
        }
        s.push_str(&format!("families: {}\n", self.families.len()));
        for f in &self.families {
            s.push_str(&format!("  sigma {} base {} with {} free directions\n", f.sigma, f.base, f.directions.len()));
        }
        if let Some(c) = &self.certificate {
            s.push_str(&format!(
                "bound: initial |a_i| <= {:.3e}, reduced to {} ({} steps)\n",
                c.exponent_constant * c.initial_log_bound,
                c.reduced_bound,
                c.steps.len()
            ));
        }
        s.push_str(&format!("completeness: {:?}\n", self.completeness));
        for (k, v) in &self.timings {
            s.push_str(&format!("time {}: {:.3}s\n", k, v));
        }
        s
    }
}
