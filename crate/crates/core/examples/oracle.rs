//! Brute-force searches used as independent checks.

use normform::field::NFElement;
use normform::io::parse_and_validate_bundle;
use normform::oracle::{oracle_coefficient_box, oracle_exponent_box, BoxSpec};
use normform::reduce::NormFormProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/q_zeta7.json"))?;
    let field = parse_and_validate_bundle(&doc, 256).map_err(|e| format!("{:?}", e))?;
    let units = field.solver_units()?;
    let f = &field.field;

    let alphas = (0..3).map(|j| NFElement::theta_pow(f, j)).collect();
    let p = NormFormProblem::new(units.ctx.clone(), alphas, 1.into())?;
    let xs = oracle_coefficient_box(&p, &BoxSpec::new(6))?;
    println!("N(x + y z + w z^2) = 1 with max|x_i| <= 6: {} solutions", xs.len());

    let one = NFElement::one(f);
    let sols = oracle_exponent_box(&[one.clone(), one.clone(), one.neg()], units, &BoxSpec::new(2))?;
    println!("u + v = 1 with |a_i| <= 2: {} solutions", sols.len());
    Ok(())
}
