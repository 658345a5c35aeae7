//! Diamond-norm distances from the semidefinite program, compared with a
//! sampled lower bound.
//!
//! cargo run --release --example diamond

use aqec::diamond::cb_check;
use aqec::{diamond_distance, standard_channel, Channel, Result};

fn main() -> Result<()> {
    let id = Channel::identity(2);
    println!("{:<28} {:>10} {:>10}", "pair", "SDP", "sampled");
    for (label, other) in [
        ("id vs depolarizing(1)", standard_channel("depolarizing", &[1.0], 2)?),
        ("id vs depolarizing(0.1)", standard_channel("depolarizing", &[0.1], 2)?),
        ("id vs dephasing(0.2)", standard_channel("dephasing", &[0.2], 2)?),
        ("id vs amplitude damping(0.3)", standard_channel("amplitude_damping", &[0.3], 2)?),
        ("id3 vs shift(0.5)", standard_channel("bit_flip", &[0.5], 3)?),
    ] {
        let reference = if other.dim_in() == 2 { id.clone() } else { Channel::identity(3) };
        let sdp = diamond_distance(&reference, &other, 1e-8)?;
        let sampled = cb_check(&reference, &other, 500, 11)?;
        println!("{label:<28} {sdp:>10.6} {sampled:>10.6}");
    }
    Ok(())
}
