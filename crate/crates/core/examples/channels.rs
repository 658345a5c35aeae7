//! Builds a few channels and checks the Choi, Stinespring and complementary
//! representations against each other.
//!
//! cargo run --example channels

use aqec::matcore::{partial_trace, Factor};
use aqec::random::{random_density, rng_from_seed};
use aqec::{compose, standard_channel, CMatrix, Result};

fn main() -> Result<()> {
    let ad = standard_channel("amplitude_damping", &[0.3], 2)?;
    let deph = standard_channel("dephasing", &[0.2], 2)?;
    let both = compose(&deph, &ad)?;
    println!("dephasing ∘ amplitude damping: {} Kraus operators", both.num_kraus());

    // The Choi matrix reduces to the identity on the input factor.
    let j = both.choi();
    let reduced = partial_trace(&j, (2, 2), Factor::Second)?;
    println!("‖Tr_out J − 1‖_max = {:.2e}", (reduced - CMatrix::identity(2)).max_abs());

    // The dilation reproduces the channel on the output factor and the
    // complementary channel on the environment.
    let mut rng = rng_from_seed(1);
    let rho = random_density(2, &mut rng);
    let v = both.stinespring();
    let joint = v.matrix.matmul(&rho).matmul(&v.matrix.adjoint());
    let out = partial_trace(&joint, (2, v.dim_env), Factor::Second)?;
    let env = partial_trace(&joint, (2, v.dim_env), Factor::First)?;
    let err_out = out - both.apply(&rho)?;
    let err_env = env - both.complement().apply(&rho)?;
    println!("‖Tr_E VρV† − N(ρ)‖_max = {:.2e}", err_out.max_abs());
    println!("‖Tr_B VρV† − N̂(ρ)‖_max = {:.2e}", err_env.max_abs());

    let canonical = both.canonical();
    println!(
        "canonical Kraus form: {} operators, Choi difference {:.2e}",
        canonical.num_kraus(),
        (canonical.choi() - j).max_abs()
    );
    Ok(())
}
