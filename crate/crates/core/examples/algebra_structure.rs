//! Generates a †-algebra from a pair of operators, recovers its block
//! structure and compares the commutant computed two ways.
//!
//! cargo run --example algebra_structure

use aqec::algebras::{commutant_of_set, generate_algebra, structure_from_basis, Projector};
use aqec::random::{haar_unitary, random_hermitian, rng_from_seed};
use aqec::{AlgebraStructure, Result};

fn main() -> Result<()> {
    let mut rng = rng_from_seed(7);

    // M_2 ⊗ 1_2 ⊕ C, hidden behind a random change of basis on C^5.
    let hidden = AlgebraStructure::block_sum(&[(2, 2), (1, 1)]).conjugated(&haar_unitary(5, &mut rng))?;
    let gens = [hidden.random_element(&mut rng), hidden.random_element(&mut rng)];

    let basis = generate_algebra(&gens, 1e-9)?;
    let alg = structure_from_basis(&basis, 1e-9)?;
    println!("generated algebra: dimension {} on C^{}", alg.dimension(), alg.ambient_dim());
    for (k, b) in alg.blocks().iter().enumerate() {
        println!("  block {k}: M_{} ⊗ 1_{}", b.d_a(), b.d_b());
    }
    println!("distance to the hidden algebra: {:.2e}", alg.basis().span_distance(&hidden.basis()));

    let brute = commutant_of_set(basis.ops(), 1e-9)?;
    let structured = alg.commutant_structure().basis();
    println!(
        "commutant dimension {} (nullspace) vs {} (block formula), distance {:.2e}",
        brute.dim(),
        structured.dim(),
        brute.span_distance(&structured)
    );

    // Projector channels onto the algebra and its commutant.
    let x = random_hermitian(5, &mut rng);
    let pa = alg.projector_channel(Projector::Algebra)?;
    let pc = alg.projector_channel(Projector::Commutant)?;
    let twice = pa.apply(&pa.apply(&x)?)?;
    println!("P_A idempotence defect: {:.2e}", (twice - pa.apply(&x)?).max_abs());
    let (inside, defect) = alg.commutant_structure().membership(&pc.apply(&x)?, 1e-9)?;
    println!("P_A'(X) lies in the commutant: {inside} (defect {defect:.1e})");
    println!("Kraus counts: P_A has {}, P_A' has {}", pa.num_kraus(), pc.num_kraus());
    Ok(())
}
