//! Exact and approximate correctability of an algebra under a channel.
//!
//! * [`exact_check`] tests `[A, E_i† E_j] = 0` over a basis of the algebra.
//! * [`largest_correctable`] is the commutant of `{E_i† E_j}`.
//! * [`delta_estimate`] is `δ = ‖N̂ − N̂∘P_A'‖⋄`.
//! * [`optimal_error`] is `E = min_R ‖R∘N − P_A‖⋄`, one joint SDP.
//! * [`verify_theorem1`] checks `δ²/4 ≤ E ≤ 2√δ`.

use rand::Rng;

use crate::algebras::{commutant_of_set, random_catalog_algebra, structure_from_basis, AlgebraStructure, Projector};
use crate::channels::{channel_from_noisy_choi, compose, encoding_channel, isometry_defect, random_channel, Channel};
use crate::diamond::{diamond_distance, diamond_norm_choi, MAX_ITER};
use crate::error::{Error, Result};
use crate::matcore::{expi_hermitian, CMatrix, C64, ONE, ZERO};
use crate::random::{haar_unitary, random_hermitian, rng_from_seed};
use crate::sdp::{solve_optimal, SdpOptions, SdpProblem};

/// Commutator defect at or below which an algebra counts as exactly correctable.
pub const EXACT_TOL: f64 = 1e-8;
/// Relative tolerance of the semidefinite programs behind δ and E.
pub const SDP_TOL: f64 = 1e-8;
/// Slack allowed in each side of the two-sided bound check.
pub const BOUND_TOL: f64 = 1e-4;

/// Local ascent stops after this many rounds, and a move only counts as an
/// improvement when it gains more than `ASCENT_GAIN` (relative); otherwise
/// rounding noise on flat landscapes keeps the step from ever shrinking.
pub(crate) const ASCENT_ROUNDS: usize = 2000;
pub(crate) const ASCENT_GAIN: f64 = 1e-12;

/// Code subspace given by an isometry `V : C^d → H`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceCode {
    v: CMatrix,
}

impl SubspaceCode {
    pub fn new(v: CMatrix) -> Result<Self> {
        let defect = isometry_defect(&v);
        if defect > 1e-10 {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { v })
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.v
    }

    pub fn dim_code(&self) -> usize {
        self.v.cols()
    }

    pub fn dim_phys(&self) -> usize {
        self.v.rows()
    }

    pub fn encoding(&self) -> Channel {
        encoding_channel(&self.v).expect("validated isometry")
    }

    /// Three-qubit repetition code `|0⟩ ↦ |000⟩, |1⟩ ↦ |111⟩`.
    pub fn repetition3() -> Self {
        let mut v = CMatrix::zeros(8, 2);
        v[(0, 0)] = ONE;
        v[(7, 1)] = ONE;
        Self { v }
    }

    /// Four-qubit amplitude-damping code
    /// `|0_L⟩ = (|0000⟩ + |1111⟩)/√2`, `|1_L⟩ = (|0011⟩ + |1100⟩)/√2`.
    pub fn amplitude_damping4() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = CMatrix::zeros(16, 2);
        v[(0b0000, 0)] = C64::new(s, 0.0);
        v[(0b1111, 0)] = C64::new(s, 0.0);
        v[(0b0011, 1)] = C64::new(s, 0.0);
        v[(0b1100, 1)] = C64::new(s, 0.0);
        Self { v }
    }
}

/// Single-qubit `op` acting on qubit `k` of `n` (qubit 0 most significant).
pub fn on_qubit(op: &CMatrix, k: usize, n: usize) -> CMatrix {
    let left = CMatrix::identity(1 << k);
    let right = CMatrix::identity(1 << (n - k - 1));
    left.kron(op).kron(&right)
}

/// Encoded bit-flip channel on the repetition code with Kraus operators
/// `{√p₀ V, √p₁ X₁V, √p₂ X₂V, √p₃ X₃V}`.
pub fn bit_flip_code_channel(probs: [f64; 4]) -> Result<Channel> {
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::ParameterOutOfRange(format!("{probs:?} is not a probability vector")));
    }
    let v = SubspaceCode::repetition3().v;
    let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let mut kraus = vec![v.scale_real(probs[0].sqrt())];
    for k in 0..3 {
        kraus.push(on_qubit(&x, k, 3).matmul(&v).scale_real(probs[k + 1].sqrt()));
    }
    Channel::new(kraus)
}

/// `N^{⊗n}` for a single-qubit channel.
pub fn tensor_power(n: &Channel, copies: usize) -> Channel {
    let mut kraus = vec![CMatrix::identity(1)];
    for _ in 0..copies {
        kraus = kraus.iter().flat_map(|a| n.kraus().iter().map(move |e| a.kron(e))).collect();
    }
    Channel::new(kraus).expect("tensor products of channels are channels")
}

fn check_dims(n: &Channel, alg: &AlgebraStructure) -> Result<()> {
    if alg.ambient_dim() != n.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "algebra acts on dimension {}, channel input is {}",
            alg.ambient_dim(),
            n.dim_in()
        )));
    }
    Ok(())
}

fn error_products(n: &Channel) -> Vec<CMatrix> {
    let k = n.kraus();
    k.iter().flat_map(|ei| k.iter().map(move |ej| ei.adjoint_mul(ej))).collect()
}

/// `(defect ≤ tol, defect)` with `defect = max_{A,i,j} ‖[A, E_i† E_j]‖`
/// over an HS-orthonormal basis `{A}` of the algebra.
pub fn exact_check(n: &Channel, alg: &AlgebraStructure, tol: f64) -> Result<(bool, f64)> {
    check_dims(n, alg)?;
    let basis = alg.basis();
    let mut defect: f64 = 0.0;
    for p in error_products(n) {
        for a in basis.ops() {
            defect = defect.max(a.commutator(&p).op_norm());
        }
    }
    Ok((defect <= tol, defect))
}

/// Complement-side exactness defect: the largest trace norm of
/// `N̂(X) − N̂(P_A'(X))` over matrix units `X = |k⟩⟨l|`.
pub fn complement_defect(n: &Channel, alg: &AlgebraStructure) -> Result<f64> {
    check_dims(n, alg)?;
    let nhat = n.complement();
    let d = n.dim_in();
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            let x = CMatrix::unit(d, d, k, l);
            let diff = &nhat.apply(&x)? - &nhat.apply(&alg.project_commutant(&x)?)?;
            worst = worst.max(crate::matcore::trace_norm(&diff)?);
        }
    }
    Ok(worst)
}

/// Commutant of all `E_i† E_j`, in block form.
pub fn largest_correctable(n: &Channel, tol: f64) -> Result<AlgebraStructure> {
    let basis = commutant_of_set(&error_products(n), tol)?;
    structure_from_basis(&basis, tol)
}

/// `‖N̂ − N̂∘P_A'‖⋄`.
pub fn delta_estimate(n: &Channel, alg: &AlgebraStructure, tol: f64) -> Result<f64> {
    check_dims(n, alg)?;
    let nhat = n.complement();
    let pc = alg.projector_channel(Projector::Commutant)?;
    diamond_distance(&nhat, &compose(&nhat, &pc)?, tol)
}

/// The estimate for a code subspace, computed from the compressed error
/// products `M_ij = V†E_i†E_jV − λ_ij 1` with `λ_ij = Tr(V†E_i†E_jV)/d`.
pub fn subspace_estimate(code: &SubspaceCode, n: &Channel, tol: f64) -> Result<f64> {
    if code.dim_phys() != n.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "code lives in dimension {}, channel input is {}",
            code.dim_phys(),
            n.dim_in()
        )));
    }
    let d = code.dim_code();
    let r = n.num_kraus();
    let compressed: Vec<CMatrix> = n.kraus().iter().map(|e| e.matmul(&code.v)).collect();
    // Φ(ρ)_{ji} = Tr(ρ M_ij), so the Choi entry ((k,j),(l,i)) is (M_ij)_{lk}
    let mut choi = CMatrix::zeros(d * r, d * r);
    for i in 0..r {
        for j in 0..r {
            let mut m = compressed[i].adjoint_mul(&compressed[j]);
            let lambda = m.trace() / d as f64;
            m -= &CMatrix::identity(d).scale(lambda);
            for k in 0..d {
                for l in 0..d {
                    choi[(k * r + j, l * r + i)] = m[(l, k)];
                }
            }
        }
    }
    diamond_norm_choi(&choi.hermitian_part(), d, r, tol)
}

/// `E_A(N)` and an optimal recovery, from a single semidefinite program:
///
/// ```text
/// E = 2 min λ  s.t.  Y ⪰ J(R∘N) − J(P_A),  Y ⪰ 0,  Tr_out Y ⪯ λ 1,
///                    J(R) ⪰ 0,  Tr_out J(R) = 1.
/// ```
pub fn optimal_error(n: &Channel, alg: &AlgebraStructure, tol: f64) -> Result<(f64, Channel)> {
    check_dims(n, alg)?;
    let d = n.dim_in();
    let m = n.dim_out();
    let target = alg.projector_channel(Projector::Algebra)?.choi();
    let nn = d * d;
    let (yb, s1, s2, jr, lam) = (0, 1, 2, 3, 4);
    let mut p = SdpProblem::new(vec![nn, nn, d, m * d, 1]);
    p.set_objective(lam, CMatrix::identity(1).scale_real(-1.0));

    let images: Vec<Vec<CMatrix>> =
        (0..d).map(|k| (0..d).map(|l| n.apply_unchecked(&CMatrix::unit(d, d, k, l))).collect()).collect();
    for pi in 0..nn {
        for qi in pi..nn {
            let (k, i) = (pi / d, pi % d);
            let (l, j) = (qi / d, qi % d);
            let mut terms = vec![(yb, pi, qi, ONE), (s1, pi, qi, -ONE)];
            let img = &images[k][l];
            for a in 0..m {
                for b in 0..m {
                    let c = img[(a, b)];
                    if c.norm() > 1e-15 {
                        terms.push((jr, a * d + i, b * d + j, -c));
                    }
                }
            }
            p.add_complex_equality(&terms, -target[(pi, qi)], pi == qi);
        }
    }
    for k in 0..d {
        for l in k..d {
            let mut terms: Vec<_> = (0..d).map(|o| (yb, k * d + o, l * d + o, -ONE)).collect();
            terms.push((s2, k, l, -ONE));
            if k == l {
                terms.push((lam, 0, 0, ONE));
            }
            p.add_complex_equality(&terms, ZERO, k == l);
        }
    }
    for a in 0..m {
        for b in a..m {
            let terms: Vec<_> = (0..d).map(|i| (jr, a * d + i, b * d + i, ONE)).collect();
            let rhs = if a == b { ONE } else { ZERO };
            p.add_complex_equality(&terms, rhs, a == b);
        }
    }
    let sol = solve_optimal(&p, SdpOptions { tol, max_iter: MAX_ITER })?;
    let value = (-(sol.primal_value + sol.dual_value)).clamp(0.0, 2.0);
    let recovery = channel_from_noisy_choi(&sol.x[jr], m, d);
    Ok((value, recovery))
}

/// Tolerances recorded in a report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub exact: f64,
    pub bounds: f64,
    pub sdp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { exact: EXACT_TOL, bounds: BOUND_TOL, sdp: SDP_TOL }
    }
}

#[derive(Clone, Debug)]
pub struct CorrectabilityReport {
    pub delta: f64,
    pub optimal_error: f64,
    pub recovery: Channel,
    pub exact: bool,
    pub kl_defect: f64,
    pub lower_bound_ok: bool,
    pub upper_bound_ok: bool,
    pub bounds_ok: bool,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

/// Computes δ and E and checks `δ²/4 ≤ E + tol` and `E ≤ 2√δ + tol`.
pub fn verify_theorem1(n: &Channel, alg: &AlgebraStructure, tol: f64) -> Result<CorrectabilityReport> {
    verify_with(n, alg, Tolerances { bounds: tol, ..Tolerances::default() })
}

pub fn verify_with(n: &Channel, alg: &AlgebraStructure, tolerances: Tolerances) -> Result<CorrectabilityReport> {
    let (exact, kl_defect) = exact_check(n, alg, tolerances.exact)?;
    let delta = delta_estimate(n, alg, tolerances.sdp)?;
    let (optimal_error, recovery) = optimal_error(n, alg, tolerances.sdp)?;
    let lower_bound_ok = 0.25 * delta * delta <= optimal_error + tolerances.bounds;
    let upper_bound_ok = optimal_error <= 2.0 * delta.sqrt() + tolerances.bounds;
    Ok(CorrectabilityReport {
        delta,
        optimal_error,
        recovery,
        exact,
        kl_defect,
        lower_bound_ok,
        upper_bound_ok,
        bounds_ok: lower_bound_ok && upper_bound_ok,
        tolerances,
        seed: None,
    })
}

fn extended_commutator(a: &CMatrix, y: &CMatrix, aux: usize) -> f64 {
    a.kron(&CMatrix::identity(aux)).commutator(y).op_norm()
}

/// Sampled lower bound on `sup ‖[A⊗1, (N̂†⊗id)(B)]‖` over unitaries `A` of
/// the algebra and unitaries `B` on environment ⊗ ancilla (ancilla of the
/// input dimension), refined by random local ascent from the best sample.
pub fn commutator_condition(n: &Channel, alg: &AlgebraStructure, samples: usize, seed: u64) -> Result<f64> {
    Ok(commutator_samples(n, alg, samples, seed)?.into_iter().fold(0.0, f64::max))
}

/// Every value visited by [`commutator_condition`], samples first.
pub fn commutator_samples(n: &Channel, alg: &AlgebraStructure, samples: usize, seed: u64) -> Result<Vec<f64>> {
    check_dims(n, alg)?;
    let d = n.dim_in();
    let ext = n.complement().tensor_id(d);
    let env = ext.dim_out();
    let mut rng = rng_from_seed(seed);
    let eval = |a: &CMatrix, b: &CMatrix| extended_commutator(a, &ext.apply_dual_unchecked(b), d);

    let mut values = Vec::with_capacity(samples + 64);
    let mut best = (f64::NEG_INFINITY, CMatrix::identity(d), CMatrix::identity(env));
    for _ in 0..samples.max(1) {
        let a = alg.haar_unitary(&mut rng);
        let b = haar_unitary(env, &mut rng);
        let v = eval(&a, &b);
        values.push(v);
        if v > best.0 {
            best = (v, a, b);
        }
    }
    let (mut value, mut a, mut b) = best;
    let mut step = 0.3;
    for _ in 0..ASCENT_ROUNDS {
        if step <= 1e-4 {
            break;
        }
        let mut improved = false;
        for _ in 0..8 {
            let nb = b.matmul(&expi_hermitian(&random_hermitian(env, &mut rng), step));
            let ha = alg.random_element(&mut rng).hermitian_part();
            let na = a.matmul(&expi_hermitian(&ha, step));
            let v = eval(&na, &nb);
            if v > value + ASCENT_GAIN * value.max(1.0) {
                value = v;
                a = na;
                b = nb;
                improved = true;
                values.push(v);
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(values)
}

/// Per-factor commutators `‖[A_k⊗1, Y]‖` and the product commutator for
/// `Y = (N̂†⊗id)(B)`.
pub fn product_degradation_demo(ops: &[CMatrix], n: &Channel, b: &CMatrix) -> Result<(Vec<f64>, f64)> {
    let d = n.dim_in();
    let ext = n.complement().tensor_id(d);
    if b.dims() != (ext.dim_out(), ext.dim_out()) {
        return Err(Error::DimensionMismatch(format!(
            "B must act on the {}-dimensional environment ⊗ ancilla space",
            ext.dim_out()
        )));
    }
    if ops.is_empty() {
        return Err(Error::InvalidInput("need at least one operator".into()));
    }
    for a in ops {
        if a.dims() != (d, d) {
            return Err(Error::DimensionMismatch("operator does not act on the channel input".into()));
        }
        let norm = a.op_norm();
        if norm > 1.0 + 1e-12 {
            return Err(Error::ParameterOutOfRange(format!("operator norm {norm} exceeds 1")));
        }
    }
    let y = ext.apply_dual(b)?;
    let singles = ops.iter().map(|a| extended_commutator(a, &y, d)).collect();
    let product = ops[1..].iter().fold(ops[0].clone(), |acc, a| acc.matmul(a));
    Ok((singles, extended_commutator(&product, &y, d)))
}

/// Seeded random instance on `C^d`, `d ∈ {2,3,4}`: the channel
/// `(1−ε)·U(·)U† + ε·M` for a Haar unitary `U`, a Haar-dilated channel `M` of
/// Kraus rank `1..=3` and `ε` uniform in `[0, 1]` (total Kraus rank ≤ 4),
/// paired with a catalog algebra.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> (Channel, AlgebraStructure) {
    let d = rng.random_range(2..=4);
    let eps: f64 = rng.random();
    let u = haar_unitary(d, rng);
    let noise = random_channel(d, d, rng.random_range(1..=3), rng);
    let mut kraus = vec![u.scale_real((1.0 - eps).sqrt())];
    kraus.extend(noise.kraus().iter().map(|k| k.scale_real(eps.sqrt())));
    let n = Channel::new(kraus).expect("convex combination of channels").canonical();
    (n, random_catalog_algebra(d, rng))
}
