//! Seeded random matrices: Ginibre, Haar unitaries and isometries, states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{c, gram_schmidt, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Haar-distributed `rows × cols` isometry (`rows ≥ cols`).
///
/// Gram–Schmidt on the columns of a Ginibre matrix is the QR decomposition
/// with a positive real diagonal on `R`, which is exactly the phase
/// correction needed for Haar measure.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        let g = ginibre(rows, cols, rng);
        let q = gram_schmidt(&g.columns(), 1e-8);
        if q.len() == cols {
            return CMatrix::from_columns(&q);
        }
    }
}

pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    haar_isometry(n, n, rng)
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    ginibre(n, n, rng).hermitian_part()
}

/// Hilbert–Schmidt random density matrix.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, n, rng);
    let rho = g.matmul(&g.adjoint());
    let t = rho.trace().re;
    rho.scale_real(1.0 / t)
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    haar_isometry(n, 1, rng).column(0)
}

/// Random operator with operator norm exactly `norm`.
pub fn random_operator_with_norm<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> CMatrix {
    let g = ginibre(n, n, rng);
    let s = g.op_norm();
    g.scale_real(norm / s)
}
