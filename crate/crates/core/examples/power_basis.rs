//! The octic power-basis case: N(x1 + x2 z + x3 z^2 + x4 z^3) = 1 over Q(zeta16).

use normform::io::{parse_and_validate_bundle, solve_spec, ProblemSpec, SolverChoice};
use normform::solver::SolveOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/q_zeta16.json"))?;
    let field = parse_and_validate_bundle(&doc, 256).map_err(|e| format!("{:?}", e))?;
    let spec = ProblemSpec::new(&field, "1,z,z2,z3", 1.into(), SolverChoice::PowerBasis, SolveOptions::default())?;
    let report = solve_spec(&field, &spec)?;
    if let Some(rc) = &report.rank_check {
        println!("rank condition: all {} subsets of {} columns have full rank", rc.subsets, rc.columns);
    }
    for pair in &report.pairs {
        println!("place {}: embeddings {:?}", pair.place, pair.indices);
    }
    let worst = report.branches.iter().flat_map(|b| b.row_terms.iter().copied()).max().unwrap_or(0);
    println!("{} branches, at most {} terms per reduced row", report.branches.len(), worst);
    print!("{}", report.summary());
    Ok(())
}
