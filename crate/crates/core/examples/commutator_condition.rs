//! Approximate commutation of the algebra with the dual of the
//! complementary channel: sampled commutators never exceed 2δ, and the
//! twirl over the algebra's unitary group approaches the commutant
//! projection.
//!
//! cargo run --release --example commutator_condition

use aqec::algebras::{twirl_estimate, Projector};
use aqec::correctability::{commutator_samples, delta_estimate, random_instance};
use aqec::random::{random_hermitian, rng_from_seed};
use aqec::Result;

fn main() -> Result<()> {
    let mut rng = rng_from_seed(5);
    for k in 0..5 {
        let (n, alg) = random_instance(&mut rng);
        let delta = delta_estimate(&n, &alg, 1e-8)?;
        let worst = commutator_samples(&n, &alg, 200, k)?.into_iter().fold(0.0, f64::max);
        println!("instance {k}: d={} largest sampled commutator {worst:.4} ≤ 2δ = {:.4}", n.dim_in(), 2.0 * delta);
    }

    let (_, alg) = random_instance(&mut rng);
    let b = random_hermitian(alg.ambient_dim(), &mut rng);
    let exact = alg.projector_channel(Projector::Commutant)?.apply(&b)?;
    for samples in [100, 1000, 10_000] {
        let twirl = twirl_estimate(&alg, &b, samples, 3)?;
        println!("twirl with {samples:>5} samples: max deviation {:.4}", (twirl - exact.clone()).max_abs());
    }
    Ok(())
}
