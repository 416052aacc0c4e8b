//! Rank-condition census over the bundled octic CM fields.

use normform::census::run_census;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/census");
    let c = run_census(&dir, 256)?;
    for r in &c.rows {
        println!("{:<26} CM {:<5} rank condition {}", r.label, r.cm, r.rank_condition);
    }
    println!("{} of {} applicable", c.applicable, c.total);
    Ok(())
}
