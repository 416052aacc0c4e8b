//! The Matveev lower bound for a linear form in two logarithms.

use normform::baker::{kappa_for, matveev_bound, MatveevInput};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for b in [10.0, 100.0, 1e6] {
        let inp = MatveevInput { m: 2, n_deg: 6, kappa: kappa_for(false), b, a_list: vec![1.0, 1.0] };
        println!("B = {:>9}: log|Lambda| >= {:.6e}", b, matveev_bound(&inp, 128)?.to_f64());
    }
    Ok(())
}
