//! Unit-equation solvers and the norm-form pipelines built on them.

pub mod constraints;
pub mod matching;
pub mod pipelines;
pub mod report;
pub mod threeterm;

pub use constraints::{extract_families, solve_two_term, SolutionFamily};
pub use matching::{match_pairs, MatchedPair, UnitEquation};
pub use pipelines::{solve, solve_general, solve_power_basis, solve_sextic, solve_threevar, Pipeline, SolveOptions};
pub use report::{Completeness, SolverReport};
pub use threeterm::{solve_three_term, ThreeTermResult, ThreeTermSolution};
