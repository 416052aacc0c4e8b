//! N(x1 + x2 z + x3 z^2 + x4 z^3 + x5 z^4) = 1 over Q(zeta7).

use normform::io::{parse_and_validate_bundle, solve_spec, ProblemSpec, SolverChoice};
use normform::solver::pipelines::solutions_in_box;
use normform::solver::SolveOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/q_zeta7.json"))?;
    let field = parse_and_validate_bundle(&doc, 256).map_err(|e| format!("{:?}", e))?;
    let spec = ProblemSpec::new(&field, "1,z,z2,z3,z4", 1.into(), SolverChoice::Sextic, SolveOptions::default())?;
    let report = solve_spec(&field, &spec)?;
    print!("{}", report.summary());

    let p = spec.problem(&field)?;
    let small = solutions_in_box(&report, &p, field.solver_units()?, 2)?;
    println!("{} solutions with max|x_i| <= 2, e.g.", small.len());
    for x in small.iter().take(8) {
        println!("  {:?}", x);
    }
    Ok(())
}
