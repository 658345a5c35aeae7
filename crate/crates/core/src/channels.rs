//! Quantum channels in Kraus form.
//!
//! Conventions:
//! * Choi matrix `J(N) = Σ_{kl} |k⟩⟨l| ⊗ N(|k⟩⟨l|)`, input factor first.
//! * Stinespring isometry `V = Σ_i E_i ⊗ |i⟩`, system output first, environment
//!   index fast, so `(1 ⊗ ⟨i|) V = E_i`.
//! * The complementary channel uses the environment basis indexed by Kraus
//!   order: `⟨i| N̂(ρ) |j⟩ = Tr(E_j† E_i ρ)`.
//! * `compose(R, N)` has Kraus operators `F_j E_i` at index `j·|N| + i`.
//! * Amplitude damping: `E₀ = diag(1, √(1−γ))`, `E₁ = √γ |0⟩⟨1|`.
//! * Depolarizing: `ρ ↦ (1−p) ρ + p Tr(ρ) 1/d`, Kraus operators taken from the
//!   clock-and-shift (Weyl) basis.
//! * Dephasing and bit flip on a qudit use the clock `Z` and shift `X`; for
//!   qubits these are the Pauli matrices.

use crate::error::{Error, Result};
use crate::matcore::{eigh, kron, partial_trace, r, CMatrix, Factor, C64, ONE, ZERO};

/// Trace-preservation defect above which Kraus lists are rejected.
pub const TP_TOL: f64 = 1e-6;

/// Choi eigenvalues below this are dropped when extracting Kraus operators.
pub const KRAUS_RANK_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map stored as a Kraus list.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

/// Isometry `V : C^{dim_in} → C^{dim_out} ⊗ C^{dim_env}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    pub matrix: CMatrix,
    pub dim_env: usize,
}

impl Isometry {
    pub fn new(matrix: CMatrix, dim_env: usize) -> Result<Self> {
        if dim_env == 0 || !matrix.rows().is_multiple_of(dim_env) {
            return Err(Error::DimensionMismatch(format!(
                "{} rows do not factor with environment dimension {dim_env}",
                matrix.rows()
            )));
        }
        let defect = isometry_defect(&matrix);
        if defect > 1e-8 {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { matrix, dim_env })
    }

    pub fn dim_in(&self) -> usize {
        self.matrix.cols()
    }

    pub fn dim_out(&self) -> usize {
        self.matrix.rows() / self.dim_env
    }
}

/// `‖V†V − 1‖`.
pub fn isometry_defect(v: &CMatrix) -> f64 {
    (&v.adjoint_mul(v) - &CMatrix::identity(v.cols())).op_norm()
}

/// Validates a Kraus list and builds the channel.
pub fn make_channel(kraus: Vec<CMatrix>) -> Result<Channel> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidInput("empty Kraus list".into()))?;
    let (dim_out, dim_in) = first.dims();
    for k in &kraus {
        if k.dims() != (dim_out, dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators of shapes {:?} and {:?}",
                first.dims(),
                k.dims()
            )));
        }
        if !k.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    let ch = Channel { dim_in, dim_out, kraus };
    let defect = ch.tp_defect();
    if defect > TP_TOL {
        return Err(Error::NotTracePreserving { defect });
    }
    Ok(ch)
}

impl Channel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        make_channel(kraus)
    }

    /// For Kraus lists that are trace preserving by construction.
    pub(crate) fn from_kraus_unchecked(kraus: Vec<CMatrix>) -> Self {
        let (dim_out, dim_in) = kraus[0].dims();
        debug_assert!(kraus.iter().all(|k| k.dims() == (dim_out, dim_in)));
        Channel { dim_in, dim_out, kraus }
    }

    pub fn identity(d: usize) -> Self {
        Channel::from_kraus_unchecked(vec![CMatrix::identity(d)])
    }

    pub fn unitary(u: &CMatrix) -> Result<Self> {
        make_channel(vec![u.clone()])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// `‖Σ E_i† E_i − 1‖`.
    pub fn tp_defect(&self) -> f64 {
        let mut s = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s += &k.adjoint_mul(k);
        }
        (&s - &CMatrix::identity(self.dim_in)).op_norm()
    }

    /// `N(ρ) = Σ E_i ρ E_i†`.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.dims() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {}-dimensional, operator is {:?}",
                self.dim_in,
                rho.dims()
            )));
        }
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &k.sandwich(rho);
        }
        out
    }

    /// `N†(A) = Σ E_i† A E_i`.
    pub fn apply_dual(&self, a: &CMatrix) -> Result<CMatrix> {
        if a.dims() != (self.dim_out, self.dim_out) {
            return Err(Error::DimensionMismatch(format!(
                "channel output is {}-dimensional, operator is {:?}",
                self.dim_out,
                a.dims()
            )));
        }
        Ok(self.apply_dual_unchecked(a))
    }

    pub(crate) fn apply_dual_unchecked(&self, a: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += &k.adjoint_mul(&a.matmul(k));
        }
        out
    }

    /// Choi matrix `Σ_{kl} |k⟩⟨l| ⊗ N(|k⟩⟨l|)`.
    pub fn choi(&self) -> CMatrix {
        let (di, dout) = (self.dim_in, self.dim_out);
        let n = di * dout;
        let mut j = CMatrix::zeros(n, n);
        // J = Σ_i |E_i⟩⟩⟨⟨E_i| with |E⟩⟩[k·dout + o] = E[o, k]
        for e in &self.kraus {
            let v: Vec<C64> = (0..n).map(|idx| e[(idx % dout, idx / dout)]).collect();
            for a in 0..n {
                if v[a] == ZERO {
                    continue;
                }
                for b in 0..n {
                    j[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
        j
    }

    /// Stinespring dilation with environment dimension equal to the Kraus count.
    pub fn stinespring(&self) -> Isometry {
        let env = self.kraus.len();
        let mut v = CMatrix::zeros(self.dim_out * env, self.dim_in);
        for (i, e) in self.kraus.iter().enumerate() {
            for o in 0..self.dim_out {
                for k in 0..self.dim_in {
                    v[(o * env + i, k)] = e[(o, k)];
                }
            }
        }
        Isometry { matrix: v, dim_env: env }
    }

    /// Complementary channel onto the environment.
    pub fn complement(&self) -> Channel {
        let env = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|o| CMatrix::from_fn(env, self.dim_in, |i, k| self.kraus[i][(o, k)]))
            .collect();
        Channel { dim_in: self.dim_in, dim_out: env, kraus }
    }

    /// `N ⊗ id_d`.
    pub fn tensor_id(&self, d: usize) -> Channel {
        let id = CMatrix::identity(d);
        Channel {
            dim_in: self.dim_in * d,
            dim_out: self.dim_out * d,
            kraus: self.kraus.iter().map(|k| kron(k, &id)).collect(),
        }
    }

    /// Canonical Kraus form read off the Choi eigendecomposition.
    pub fn canonical(&self) -> Channel {
        let mut ch = kraus_from_choi_unchecked(&self.choi(), self.dim_in, self.dim_out);
        normalize_trace_preservation(&mut ch.kraus, self.dim_in);
        ch
    }
}

/// `R ∘ N`.
pub fn compose(r: &Channel, n: &Channel) -> Result<Channel> {
    if n.dim_out != r.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "composing a {}-input channel after a {}-output channel",
            r.dim_in, n.dim_out
        )));
    }
    let mut kraus = Vec::with_capacity(r.kraus.len() * n.kraus.len());
    for f in &r.kraus {
        for e in &n.kraus {
            kraus.push(f.matmul(e));
        }
    }
    Ok(Channel { dim_in: n.dim_in, dim_out: r.dim_out, kraus })
}

/// `ρ ↦ V ρ V†`.
pub fn encoding_channel(v: &CMatrix) -> Result<Channel> {
    let defect = isometry_defect(v);
    if defect > 1e-8 {
        return Err(Error::NotIsometry { defect });
    }
    Ok(Channel::from_kraus_unchecked(vec![v.clone()]))
}

/// Kraus operators from a Choi matrix, descending eigenvalue order, with the
/// first significant entry of each operator made real positive.
pub fn kraus_from_choi(j: &CMatrix, dims: (usize, usize)) -> Result<Channel> {
    let (di, dout) = dims;
    if j.dims() != (di * dout, di * dout) {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix {:?} for a {di}->{dout} channel",
            j.dims()
        )));
    }
    if !j.is_finite() {
        return Err(Error::NonFinite);
    }
    let herm = j.hermiticity_defect();
    if herm > 1e-9 {
        return Err(Error::NotHermitian { defect: herm });
    }
    let e = eigh(j);
    let min_eig = e.eigenvalues[0];
    if min_eig < -1e-9 {
        return Err(Error::NotPositive { min_eig });
    }
    let tr_out = partial_trace(j, (di, dout), Factor::Second)?;
    let defect = (&tr_out - &CMatrix::identity(di)).op_norm();
    if defect > 1e-9 {
        return Err(Error::NotTracePreserving { defect });
    }
    Ok(kraus_from_choi_unchecked(j, di, dout))
}

pub(crate) fn kraus_from_choi_unchecked(j: &CMatrix, di: usize, dout: usize) -> Channel {
    let e = eigh(j);
    let n = di * dout;
    let mut kraus = Vec::new();
    for idx in (0..n).rev() {
        let lam = e.eigenvalues[idx];
        if lam < KRAUS_RANK_TOL {
            continue;
        }
        let s = lam.sqrt();
        let v = e.eigenvector(idx);
        let mut k = CMatrix::from_fn(dout, di, |o, kk| v[kk * dout + o] * s);
        fix_phase(&mut k);
        kraus.push(k);
    }
    if kraus.is_empty() {
        kraus.push(CMatrix::zeros(dout, di));
    }
    Channel { dim_in: di, dim_out: dout, kraus }
}

fn fix_phase(k: &mut CMatrix) {
    let scale = k.max_abs();
    if let Some(&z) = k.as_slice().iter().find(|z| z.norm() > 1e-8 * scale) {
        let phase = z.conj() / z.norm();
        for x in k.as_mut_slice() {
            *x *= phase;
        }
    }
}

/// Replaces `E_i` by `E_i T^{-1/2}` with `T = Σ E_i†E_i`, restoring exact
/// trace preservation after truncation or solver noise.
pub(crate) fn normalize_trace_preservation(kraus: &mut [CMatrix], dim_in: usize) {
    let mut t = CMatrix::zeros(dim_in, dim_in);
    for k in kraus.iter() {
        t += &k.adjoint_mul(k);
    }
    let inv_sqrt = eigh(&t).apply_fn(|x| if x > 1e-300 { 1.0 / x.sqrt() } else { 0.0 });
    for k in kraus.iter_mut() {
        *k = k.matmul(&inv_sqrt);
    }
}

/// Builds the channel with exactly trace-preserving Kraus operators from an
/// approximately valid Choi matrix (PSD up to solver noise).
pub(crate) fn channel_from_noisy_choi(j: &CMatrix, di: usize, dout: usize) -> Channel {
    let mut ch = kraus_from_choi_unchecked(&j.hermitian_part(), di, dout);
    normalize_trace_preservation(&mut ch.kraus, di);
    ch
}

/// Clock matrix `Σ ω^k |k⟩⟨k|`.
pub fn clock(d: usize) -> CMatrix {
    let w = 2.0 * std::f64::consts::PI / d as f64;
    CMatrix::diag(&(0..d).map(|k| C64::from_polar(1.0, w * k as f64)).collect::<Vec<_>>())
}

/// Shift matrix `Σ |k+1⟩⟨k|`.
pub fn shift(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO })
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("{name} parameter {p} not in [0, 1]")));
    }
    Ok(())
}

fn one_param(name: &str, params: &[f64]) -> Result<f64> {
    match params {
        [p] => {
            check_probability(name, *p)?;
            Ok(*p)
        }
        _ => Err(Error::InvalidInput(format!(
            "{name} takes exactly one parameter, got {}",
            params.len()
        ))),
    }
}

/// Library of named noise models.
pub fn standard_channel(name: &str, params: &[f64], d: usize) -> Result<Channel> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let id = CMatrix::identity(d);
    let kraus = match name {
        "identity" => {
            if !params.is_empty() {
                return Err(Error::InvalidInput("identity takes no parameters".into()));
            }
            vec![id]
        }
        "dephasing" => {
            let p = one_param(name, params)?;
            vec![id.scale_real((1.0 - p).sqrt()), clock(d).scale_real(p.sqrt())]
        }
        "bit_flip" => {
            let p = one_param(name, params)?;
            vec![id.scale_real((1.0 - p).sqrt()), shift(d).scale_real(p.sqrt())]
        }
        "depolarizing" => {
            let p = one_param(name, params)?;
            let d2 = (d * d) as f64;
            let (x, z) = (shift(d), clock(d));
            let mut ops = Vec::with_capacity(d * d);
            let mut xa = CMatrix::identity(d);
            for a in 0..d {
                let mut w = xa.clone();
                for b in 0..d {
                    let weight = if a == 0 && b == 0 { 1.0 - p + p / d2 } else { p / d2 };
                    ops.push(w.scale_real(weight.sqrt()));
                    w = w.matmul(&z);
                }
                xa = xa.matmul(&x);
            }
            ops
        }
        "amplitude_damping" => {
            let g = one_param(name, params)?;
            if d != 2 {
                return Err(Error::InvalidInput("amplitude_damping is defined for d = 2".into()));
            }
            let e0 = CMatrix::diag_real(&[1.0, (1.0 - g).sqrt()]);
            let mut e1 = CMatrix::zeros(2, 2);
            e1[(0, 1)] = r(g.sqrt());
            vec![e0, e1]
        }
        other => return Err(Error::UnknownChannel(other.to_string())),
    };
    make_channel(kraus)
}

/// Random channel from a Haar-random Stinespring isometry.
///
/// The Kraus rank is raised to `⌈dim_in / dim_out⌉` when smaller, since no
/// isometry exists below that.
pub fn random_channel<R: rand::Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    kraus_rank: usize,
    rng: &mut R,
) -> Channel {
    let kraus_rank = kraus_rank.max(dim_in.div_ceil(dim_out));
    let v = crate::random::haar_isometry(dim_out * kraus_rank, dim_in, rng);
    let kraus = (0..kraus_rank)
        .map(|i| CMatrix::from_fn(dim_out, dim_in, |o, k| v[(o * kraus_rank + i, k)]))
        .collect();
    Channel::from_kraus_unchecked(kraus)
}
