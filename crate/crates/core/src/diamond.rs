//! Diamond-norm distances between channels.
//!
//! For a Hermiticity-preserving, trace-annihilating map `Δ` with Choi matrix
//! `J` (input factor first), the diamond norm is
//!
//! ```text
//! ‖Δ‖⋄ = 2 · max Re Tr(J W)   s.t.  0 ⪯ W ⪯ ρ ⊗ 1_out,  ρ ⪰ 0,  Tr ρ = 1.
//! ```
//!
//! Differences of channels are always of this kind. [`cb_check`] gives an
//! independent lower bound by searching over pure input states directly.

use log::debug;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matcore::{eigh, hermitian_trace_norm, partial_trace, CMatrix, Factor, C64, ONE, ZERO};
use crate::random::{random_pure_state, rng_from_seed};
use crate::sdp::{solve_optimal, SdpOptions, SdpProblem};

/// Iteration cap used by every diamond-norm solve.
pub const MAX_ITER: usize = 200;

/// Adds `W + S − ρ⊗1_out = 0` (entrywise) and `Tr ρ = 1` to `p`.
///
/// `w`, `s` index blocks of size `dim_in·dim_out`, `rho` a block of size
/// `dim_in`.
pub(crate) fn add_diamond_constraints(
    p: &mut SdpProblem,
    (w, s, rho): (usize, usize, usize),
    dim_in: usize,
    dim_out: usize,
) {
    let n = dim_in * dim_out;
    for pi in 0..n {
        for qi in pi..n {
            let (k, o) = (pi / dim_out, pi % dim_out);
            let (l, o2) = (qi / dim_out, qi % dim_out);
            let mut terms = vec![(w, pi, qi, ONE), (s, pi, qi, ONE)];
            if o == o2 {
                terms.push((rho, k, l, -ONE));
            }
            p.add_complex_equality(&terms, ZERO, pi == qi);
        }
    }
    let trace: Vec<_> = (0..dim_in).map(|k| (rho, k, k, ONE)).collect();
    p.add_complex_equality(&trace, ONE, true);
}

/// Diamond norm of the trace-annihilating, Hermiticity-preserving map whose
/// Choi matrix is `j`.
pub fn diamond_norm_choi(j: &CMatrix, dim_in: usize, dim_out: usize, tol: f64) -> Result<f64> {
    let n = dim_in * dim_out;
    if j.dims() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix is {:?}, expected {n}x{n}",
            j.dims()
        )));
    }
    if !j.is_finite() {
        return Err(Error::NonFinite);
    }
    let herm = j.hermiticity_defect();
    if herm > 1e-9 * j.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { defect: herm });
    }
    let defect = partial_trace(j, (dim_in, dim_out), Factor::Second)?.max_abs();
    if defect > 1e-8 * j.max_abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "map is not trace-annihilating (defect {defect:.3e})"
        )));
    }
    if j.max_abs() < 1e-13 {
        return Ok(0.0);
    }
    let mut p = SdpProblem::new(vec![n, n, dim_in]);
    p.set_objective(0, j.scale_real(2.0));
    add_diamond_constraints(&mut p, (0, 1, 2), dim_in, dim_out);
    let sol = solve_optimal(&p, SdpOptions { tol, max_iter: MAX_ITER })?;
    let value = 0.5 * (sol.primal_value + sol.dual_value);
    debug!("diamond norm {value:.12e} ({} iterations)", sol.iterations);
    Ok(value.max(0.0))
}

/// `‖N1 − N2‖⋄`, in `[0, 2]`.
pub fn diamond_distance(n1: &Channel, n2: &Channel, tol: f64) -> Result<f64> {
    if n1.dim_in() != n2.dim_in() || n1.dim_out() != n2.dim_out() {
        return Err(Error::DimensionMismatch(format!(
            "channels {}->{} and {}->{}",
            n1.dim_in(),
            n1.dim_out(),
            n2.dim_in(),
            n2.dim_out()
        )));
    }
    let j = &n1.choi() - &n2.choi();
    Ok(diamond_norm_choi(&j, n1.dim_in(), n1.dim_out(), tol)?.min(2.0))
}

fn output_difference(e1: &Channel, e2: &Channel, psi: &[C64]) -> CMatrix {
    let rho = CMatrix::outer(psi, psi);
    &e1.apply_unchecked(&rho) - &e2.apply_unchecked(&rho)
}

/// Alternating ascent on `‖((N1−N2)⊗id)(ψψ†)‖₁` from a starting vector.
fn ascend(e1: &Channel, e2: &Channel, mut psi: Vec<C64>) -> f64 {
    let mut value = hermitian_trace_norm(&output_difference(e1, e2, &psi));
    for _ in 0..200 {
        let h = output_difference(e1, e2, &psi);
        let sign = eigh(&h).apply_fn(|x| if x >= 0.0 { 1.0 } else { -1.0 });
        let g = &e1.apply_dual_unchecked(&sign) - &e2.apply_dual_unchecked(&sign);
        let eig = eigh(&g.hermitian_part());
        psi = eig.eigenvector(eig.eigenvalues.len() - 1);
        let next = hermitian_trace_norm(&output_difference(e1, e2, &psi));
        if next <= value + 1e-13 {
            value = value.max(next);
            break;
        }
        value = next;
    }
    value
}

/// Lower bound on `‖N1 − N2‖⋄` from `samples` random pure states on the
/// doubled input space, with the best few refined by alternating ascent.
pub fn cb_check(n1: &Channel, n2: &Channel, samples: usize, seed: u64) -> Result<f64> {
    if n1.dim_in() != n2.dim_in() || n1.dim_out() != n2.dim_out() {
        return Err(Error::DimensionMismatch("channel dimensions differ".into()));
    }
    let d = n1.dim_in();
    let e1 = n1.tensor_id(d);
    let e2 = n2.tensor_id(d);
    let mut rng = rng_from_seed(seed);
    let mut scored: Vec<(f64, Vec<C64>)> = (0..samples.max(1))
        .map(|_| {
            let psi = random_pure_state(d * d, &mut rng);
            (hermitian_trace_norm(&output_difference(&e1, &e2, &psi)), psi)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let best = scored
        .into_iter()
        .take(8)
        .map(|(v, psi)| v.max(ascend(&e1, &e2, psi)))
        .fold(0.0, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{compose, random_channel, standard_channel};
    use crate::random::{haar_unitary, rng_from_seed, SeededRng};
    use rand::Rng;

    const TOL: f64 = 1e-8;

    // Gradient-free hill climbing over pure two-qubit states, evaluating the
    // output trace norm from the channel actions alone.
    fn hill_climb(n1: &Channel, n2: &Channel, rng: &mut SeededRng) -> f64 {
        let d = n1.dim_in();
        let (e1, e2) = (n1.tensor_id(d), n2.tensor_id(d));
        let eval = |psi: &[C64]| {
            let nrm = crate::matcore::vnorm(psi);
            let v: Vec<C64> = psi.iter().map(|x| x / nrm).collect();
            hermitian_trace_norm(&output_difference(&e1, &e2, &v))
        };
        let mut best = f64::NEG_INFINITY;
        for _ in 0..5 {
            let mut psi = random_pure_state(d * d, rng);
            let mut val = eval(&psi);
            let mut step = 0.5;
            while step > 1e-9 {
                let mut improved = false;
                for _ in 0..40 {
                    let cand: Vec<C64> = psi
                        .iter()
                        .map(|x| x + crate::random::gaussian_c64(rng) * step)
                        .collect();
                    let v = eval(&cand);
                    if v > val {
                        val = v;
                        psi = cand;
                        improved = true;
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            best = best.max(val);
        }
        best
    }

    #[test]
    fn identical_channels_are_at_distance_zero() {
        let mut rng = rng_from_seed(1);
        let n = random_channel(2, 3, 2, &mut rng);
        assert!(diamond_distance(&n, &n, TOL).unwrap() <= 1e-7);
        assert_eq!(cb_check(&n, &n, 10, 0).unwrap(), 0.0);
    }

    #[test]
    fn identity_versus_complete_depolarizing() {
        let id = Channel::identity(2);
        let dep = standard_channel("depolarizing", &[1.0], 2).unwrap();
        let d = diamond_distance(&id, &dep, TOL).unwrap();
        assert!((d - 1.5).abs() < 1e-5, "{d}");
        let oracle = hill_climb(&id, &dep, &mut rng_from_seed(3));
        assert!((oracle - 1.5).abs() < 1e-5, "oracle {oracle}");
    }

    #[test]
    fn sdp_matches_hill_climbing_on_random_qubit_pairs() {
        let mut rng = rng_from_seed(5);
        for _ in 0..3 {
            let n1 = random_channel(2, 2, 2, &mut rng);
            let n2 = random_channel(2, 2, 3, &mut rng);
            let d = diamond_distance(&n1, &n2, TOL).unwrap();
            let oracle = hill_climb(&n1, &n2, &mut rng);
            assert!(oracle <= d + 1e-6);
            assert!(d - oracle < 1e-4, "sdp {d} vs search {oracle}");
        }
    }

    #[test]
    fn unitary_post_composition_invariance() {
        let mut rng = rng_from_seed(7);
        let n1 = random_channel(2, 3, 2, &mut rng);
        let n2 = random_channel(2, 3, 2, &mut rng);
        let u = Channel::unitary(&haar_unitary(3, &mut rng)).unwrap();
        let d = diamond_distance(&n1, &n2, TOL).unwrap();
        let du = diamond_distance(&compose(&u, &n1).unwrap(), &compose(&u, &n2).unwrap(), TOL).unwrap();
        assert!((d - du).abs() < 1e-7, "{d} vs {du}");
    }

    #[test]
    fn triangle_and_post_processing() {
        let mut rng = rng_from_seed(11);
        for _ in 0..3 {
            let a = random_channel(2, 2, rng.random_range(1..=3), &mut rng);
            let b = random_channel(2, 2, rng.random_range(1..=3), &mut rng);
            let c = random_channel(2, 2, rng.random_range(1..=3), &mut rng);
            let r = random_channel(2, 2, 2, &mut rng);
            let ab = diamond_distance(&a, &b, TOL).unwrap();
            let bc = diamond_distance(&b, &c, TOL).unwrap();
            let ac = diamond_distance(&a, &c, TOL).unwrap();
            assert!(ac <= ab + bc + 1e-6);
            let rab =
                diamond_distance(&compose(&r, &a).unwrap(), &compose(&r, &b).unwrap(), TOL).unwrap();
            assert!(rab <= ab + 1e-6);
        }
    }

    #[test]
    fn stable_under_ancilla_extension() {
        let mut rng = rng_from_seed(13);
        let n1 = random_channel(2, 2, 2, &mut rng);
        let n2 = random_channel(2, 2, 1, &mut rng);
        let d = diamond_distance(&n1, &n2, TOL).unwrap();
        let d2 = diamond_distance(&n1.tensor_id(2), &n2.tensor_id(2), TOL).unwrap();
        assert!((d - d2).abs() < 1e-5, "{d} vs {d2}");
    }

    #[test]
    fn cb_check_is_a_tight_lower_bound_on_qubits() {
        let mut rng = rng_from_seed(17);
        for seed in 0..3 {
            let n1 = random_channel(2, 2, 2, &mut rng);
            let n2 = random_channel(2, 2, 2, &mut rng);
            let d = diamond_distance(&n1, &n2, TOL).unwrap();
            let lb = cb_check(&n1, &n2, 1000, seed).unwrap();
            assert!(lb <= d + 1e-6, "{lb} > {d}");
            assert!(lb >= 0.95 * d, "{lb} < 0.95·{d}");
        }
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        assert!(diamond_distance(&Channel::identity(2), &Channel::identity(3), TOL).is_err());
        assert!(diamond_norm_choi(&CMatrix::identity(4), 2, 2, TOL).is_err());
    }
}
