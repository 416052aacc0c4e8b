//! Three-variable forms: the Galois case over Q(zeta7) and a non-Galois
//! quartic solved inside its normal closure.

use normform::io::{parse_and_validate_bundle, solve_spec, ProblemSpec, SolverChoice};
use normform::solver::SolveOptions;

fn run(file: &str, alphas: &str, m: i64) -> Result<(), Box<dyn std::error::Error>> {
    let path = format!("{}/fixtures/{}", env!("CARGO_MANIFEST_DIR"), file);
    let field = parse_and_validate_bundle(&std::fs::read_to_string(path)?, 256).map_err(|e| format!("{:?}", e))?;
    let spec = ProblemSpec::new(&field, alphas, m.into(), SolverChoice::Threevar, SolveOptions::default())?;
    let report = solve_spec(&field, &spec)?;
    print!("{}", report.summary());
    if let Some(tree) = &report.case_tree {
        for leaf in tree {
            println!("  case {:?} via {}: {} solutions", leaf.tag, leaf.route, leaf.solutions);
        }
    }
    for n in &report.notes {
        println!("  note: {}", n);
    }
    println!();
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run("q_zeta7.json", "1,z,z2", 1)?;
    run("quartic_d4.json", "1,z,z2", 14)?;
    Ok(())
}
