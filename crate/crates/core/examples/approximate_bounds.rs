//! The four-qubit amplitude-damping code: the correctability estimate and
//! the optimal error as the damping strength grows, with the bounds
//! δ²/4 ≤ E ≤ 2√δ.
//!
//! cargo run --release --example approximate_bounds

use aqec::correctability::{tensor_power, verify_theorem1};
use aqec::{compose, standard_channel, AlgebraStructure, Result, SubspaceCode};

fn main() -> Result<()> {
    let code = SubspaceCode::amplitude_damping4();
    let full = AlgebraStructure::full(code.dim_code());
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}  ok", "γ", "δ²/4", "E", "2√δ", "δ");
    for gamma in [0.0, 0.01, 0.05, 0.1, 0.2, 0.4] {
        let noise = tensor_power(&standard_channel("amplitude_damping", &[gamma], 2)?, 4);
        let n = compose(&noise, &code.encoding())?;
        let rep = verify_theorem1(&n, &full, 1e-6)?;
        println!(
            "{gamma:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}  {}",
            rep.delta * rep.delta / 4.0,
            rep.optimal_error,
            2.0 * rep.delta.sqrt(),
            rep.delta,
            rep.bounds_ok
        );
    }
    Ok(())
}
