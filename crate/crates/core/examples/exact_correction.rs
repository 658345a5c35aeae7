//! The three-qubit bit-flip code from the bundled catalog: the
//! Knill–Laflamme test, the largest correctable algebra and an optimal
//! recovery.
//!
//! cargo run --release --example exact_correction

use std::path::Path;

use aqec::correctability::{exact_check, largest_correctable, optimal_error};
use aqec::io::{load_algebra, load_channel};
use aqec::{compose, diamond_distance, Result};
use aqec::algebras::Projector;

fn main() -> Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let n = load_channel(&data.join("bitflip3.json"))?;
    let full = load_algebra(&data.join("full-qubit-algebra.json"))?;
    println!("encoded channel C^{} → C^{} with {} Kraus operators", n.dim_in(), n.dim_out(), n.num_kraus());

    let (exact, defect) = exact_check(&n, &full, 1e-8)?;
    println!("exactly correctable: {exact} (defect {defect:.1e})");

    let largest = largest_correctable(&n, 1e-9)?;
    println!("largest correctable algebra has dimension {}", largest.dimension());

    let (e, recovery) = optimal_error(&n, &full, 1e-8)?;
    let residual = diamond_distance(&compose(&recovery, &n)?, &full.projector_channel(Projector::Algebra)?, 1e-8)?;
    println!("optimal error {e:.2e}; recovery achieves {residual:.2e}");
    Ok(())
}
