//! Reading, validating and re-emitting field bundles.

use normform::io::{parse_bundle, validate_bundle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/quartic_d4.json"))?;
    let b = parse_bundle(&doc)?;
    println!("{}: degree {}, {} fundamental units", b.label, b.degree(), b.fund_units.len());
    let field = validate_bundle(&b, 256).map_err(|e| format!("{:?}", e))?;
    println!("Galois: {}, regulator verified: {}", field.is_galois(), field.regulator_verified);
    println!("canonical emit is stable: {}", b.emit() == parse_bundle(&b.emit())?.emit());

    // a broken bundle reports every problem at once
    let mut bad = b.clone();
    bad.fund_units[0].pop();
    bad.torsion_order = 0;
    for e in validate_bundle(&bad, 256).err().unwrap_or_default() {
        println!("  rejected: {}", e);
    }
    Ok(())
}
