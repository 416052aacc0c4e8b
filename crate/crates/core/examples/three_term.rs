//! x + y = 1 in units of Q(zeta7): the bound chain and the solutions.

use normform::baker::UnitLogData;
use normform::field::NFElement;
use normform::io::parse_and_validate_bundle;
use normform::solver::solve_three_term;
use normform::solver::threeterm::DEFAULT_BUDGET;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/q_zeta7.json"))?;
    let field = parse_and_validate_bundle(&doc, 256).map_err(|e| format!("{:?}", e))?;
    let units = field.solver_units()?;
    let one = NFElement::one(&field.field);
    let logs = UnitLogData::new(units)?;
    let res = solve_three_term(&one, &one, &one.neg(), units, &logs, None, DEFAULT_BUDGET)?;

    let c = &res.certificate;
    println!("initial exponent bound {:.3e}", c.initial_height_bound);
    for s in &c.steps {
        println!("  reduced to {}", s.exponent_bound);
    }
    println!("final bound {} ({:?}), {} solutions", c.reduced_bound, c.status, res.solutions.len());
    for s in res.solutions.iter().take(6) {
        println!("  x = {}  y = {}", s.x, s.y);
    }
    Ok(())
}
