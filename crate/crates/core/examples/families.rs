//! Solution families of the sextic form and sampled members.

use normform::io::{parse_and_validate_bundle, solve_spec, ProblemSpec, SolverChoice};
use normform::solver::pipelines::family_samples;
use normform::solver::SolveOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/q_zeta7.json"))?;
    let field = parse_and_validate_bundle(&doc, 256).map_err(|e| format!("{:?}", e))?;
    let spec = ProblemSpec::new(&field, "1,z,z2,z3,z4", 1.into(), SolverChoice::Auto, SolveOptions::default())?;
    let report = solve_spec(&field, &spec)?;
    let p = spec.problem(&field)?;
    let units = field.solver_units()?;
    for f in &report.families {
        println!("family: sigma {}, base {}, {} directions", f.sigma, f.base, f.directions.len());
        for l in &f.linear_conditions {
            println!("  {:?} . a = {}", l.coeffs, l.rhs);
        }
        for c in &f.congruences {
            println!("  {} k + {:?} . a = {} mod {}", c.k_coeff, c.a_coeffs, c.rhs, c.modulus);
        }
        for x in family_samples(&p, units, f, 5, 4) {
            println!("  member {:?}  norm ok: {}", x, p.is_solution(&x));
        }
    }
    Ok(())
}
