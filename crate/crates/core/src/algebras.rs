//! Finite-dimensional †-algebras in block form.
//!
//! An [`AlgebraStructure`] is a list of blocks, each an isometry
//! `U_i : C^{dA_i} ⊗ C^{dB_i} → C^d` with pairwise orthogonal ranges. The
//! algebra is `{ Σ_i U_i (A_i ⊗ 1_{dB_i}) U_i† }` and its commutant (inside the
//! blocks) is `{ Σ_i U_i (1_{dA_i} ⊗ B_i) U_i† }`. Block isometry columns are
//! indexed `a·dB + b`.
//!
//! The projections onto the algebra and the commutant are
//!
//! ```text
//! P_A (X) = Σ_i U_i [ Tr_B(U_i† X U_i) / dB_i ⊗ 1 ] U_i†
//! P_A'(X) = Σ_i U_i [ 1 ⊗ Tr_A(U_i† X U_i) / dA_i ] U_i†
//! ```
//!
//! Both are channels when the blocks cover the whole ambient space.

use rand::Rng;

use crate::channels::Channel;
use crate::correctability::{ASCENT_GAIN, ASCENT_ROUNDS};
use crate::error::{Error, Result};
use crate::matcore::{
    eigh, expi_hermitian, gram_schmidt, hs, nullspace, orthogonalize_against, partial_trace, singular_values,
    swap_operator, unvectorize, vectorize, CMatrix, Factor, C64, ONE, ZERO,
};
use crate::random::{gaussian_c64, ginibre, haar_unitary, rng_from_seed};

const ISO_TOL: f64 = 1e-10;
/// Relative eigenvalue gap below which two eigenvalues are merged.
const MERGE_GAP: f64 = 1e-9;
/// Relative gap treated as ambiguous; the generic sample is redrawn.
const AMBIGUOUS_GAP: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    iso: CMatrix,
    d_a: usize,
    d_b: usize,
}

impl Block {
    pub fn new(iso: CMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::InvalidInput("block factor dimensions must be positive".into()));
        }
        if iso.cols() != d_a * d_b || iso.rows() < iso.cols() {
            return Err(Error::DimensionMismatch(format!(
                "block isometry is {}x{} for dA={d_a}, dB={d_b}",
                iso.rows(),
                iso.cols()
            )));
        }
        let defect = (&iso.adjoint_mul(&iso) - &CMatrix::identity(iso.cols())).max_abs();
        if defect > ISO_TOL {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Self { iso, d_a, d_b })
    }

    pub fn iso(&self) -> &CMatrix {
        &self.iso
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Range projector `U U†`.
    pub fn projector(&self) -> CMatrix {
        self.iso.matmul(&self.iso.adjoint())
    }

    fn compress(&self, x: &CMatrix) -> CMatrix {
        self.iso.adjoint().matmul(x).matmul(&self.iso)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraStructure {
    ambient_dim: usize,
    blocks: Vec<Block>,
}

/// Which of the two conditional expectations to build as a channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projector {
    Algebra,
    Commutant,
}

impl AlgebraStructure {
    pub fn new(ambient_dim: usize, blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("an algebra needs at least one block".into()));
        }
        for b in &blocks {
            if b.iso.rows() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "block isometry has {} rows in ambient dimension {ambient_dim}",
                    b.iso.rows()
                )));
            }
        }
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                let overlap = blocks[i].iso.adjoint_mul(&blocks[j].iso).max_abs();
                if overlap > ISO_TOL {
                    return Err(Error::InvalidInput(format!(
                        "blocks {i} and {j} overlap (max |U_i† U_j| = {overlap:.3e})"
                    )));
                }
            }
        }
        let covered: usize = blocks.iter().map(|b| b.d_a * b.d_b).sum();
        if covered > ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "blocks cover {covered} dimensions of {ambient_dim}"
            )));
        }
        Ok(Self { ambient_dim, blocks })
    }

    /// All of `M_d`.
    pub fn full(d: usize) -> Self {
        Self::factor(d, 1)
    }

    /// Scalars `C·1_d`.
    pub fn trivial(d: usize) -> Self {
        Self::factor(1, d)
    }

    /// `M_a ⊗ 1_b` on `C^a ⊗ C^b`.
    pub fn factor(a: usize, b: usize) -> Self {
        Self { ambient_dim: a * b, blocks: vec![Block { iso: CMatrix::identity(a * b), d_a: a, d_b: b }] }
    }

    /// Diagonal matrices in the computational basis.
    pub fn diagonal(d: usize) -> Self {
        Self::block_sum(&vec![(1, 1); d])
    }

    /// `⊕_i M_{a_i} ⊗ 1_{b_i}` on consecutive coordinate subspaces.
    pub fn block_sum(parts: &[(usize, usize)]) -> Self {
        let d: usize = parts.iter().map(|&(a, b)| a * b).sum();
        let mut offset = 0;
        let blocks = parts
            .iter()
            .map(|&(a, b)| {
                let n = a * b;
                let iso = CMatrix::from_fn(d, n, |i, j| if i == offset + j { ONE } else { ZERO });
                offset += n;
                Block { iso, d_a: a, d_b: b }
            })
            .collect();
        Self { ambient_dim: d, blocks }
    }

    /// `u 𝒜 u†` for a unitary `u`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        if u.dims() != (self.ambient_dim, self.ambient_dim) {
            return Err(Error::DimensionMismatch("conjugating unitary has the wrong size".into()));
        }
        let blocks =
            self.blocks.iter().map(|b| Block::new(u.matmul(&b.iso), b.d_a, b.d_b)).collect::<Result<_>>()?;
        Self::new(self.ambient_dim, blocks)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `Σ_i dA_i²`.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.d_a * b.d_a).sum()
    }

    pub fn is_unital(&self) -> bool {
        self.blocks.iter().map(|b| b.d_a * b.d_b).sum::<usize>() == self.ambient_dim
    }

    fn require_unital(&self) -> Result<()> {
        if self.is_unital() {
            Ok(())
        } else {
            Err(Error::NotUnital {
                covered: self.blocks.iter().map(|b| b.d_a * b.d_b).sum(),
                ambient: self.ambient_dim,
            })
        }
    }

    /// Unit of the algebra, `Σ_i P_i`.
    pub fn unit(&self) -> CMatrix {
        let mut u = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for b in &self.blocks {
            u += &b.projector();
        }
        u
    }

    fn check_square(&self, x: &CMatrix) -> Result<()> {
        if x.dims() != (self.ambient_dim, self.ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, algebra acts on dimension {}",
                x.rows(),
                x.cols(),
                self.ambient_dim
            )));
        }
        Ok(())
    }

    /// `Σ_i U_i (A_i ⊗ 1) U_i†`.
    pub fn element_from_blocks(&self, parts: &[CMatrix]) -> Result<CMatrix> {
        if parts.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} parts for {} blocks",
                parts.len(),
                self.blocks.len()
            )));
        }
        let mut out = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for (b, a) in self.blocks.iter().zip(parts) {
            if a.dims() != (b.d_a, b.d_a) {
                return Err(Error::DimensionMismatch(format!(
                    "block part is {:?}, expected {}x{}",
                    a.dims(),
                    b.d_a,
                    b.d_a
                )));
            }
            out += &b.iso.sandwich(&a.kron(&CMatrix::identity(b.d_b)));
        }
        Ok(out)
    }

    /// Same as [`element_from_blocks`](Self::element_from_blocks) on the
    /// commutant side: `Σ_i U_i (1 ⊗ B_i) U_i†`.
    pub fn commutant_element_from_blocks(&self, parts: &[CMatrix]) -> Result<CMatrix> {
        self.commutant_structure().element_from_blocks(parts)
    }

    pub fn project_algebra(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_square(x)?;
        let mut out = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for b in &self.blocks {
            let y = b.compress(x);
            let reduced = partial_trace(&y, (b.d_a, b.d_b), Factor::Second)?;
            let lifted = reduced.kron(&CMatrix::identity(b.d_b)).scale_real(1.0 / b.d_b as f64);
            out += &b.iso.sandwich(&lifted);
        }
        Ok(out)
    }

    pub fn project_commutant(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_square(x)?;
        let mut out = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for b in &self.blocks {
            let y = b.compress(x);
            let reduced = partial_trace(&y, (b.d_a, b.d_b), Factor::First)?;
            let lifted = CMatrix::identity(b.d_a).kron(&reduced).scale_real(1.0 / b.d_a as f64);
            out += &b.iso.sandwich(&lifted);
        }
        Ok(out)
    }

    /// Blocks with the two tensor factors exchanged.
    pub fn commutant_structure(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block { iso: b.iso.matmul(&swap_operator(b.d_b, b.d_a)), d_a: b.d_b, d_b: b.d_a })
            .collect();
        Self { ambient_dim: self.ambient_dim, blocks }
    }

    /// Kraus form of `P_A` or `P_A'` as a channel on the ambient space.
    pub fn projector_channel(&self, which: Projector) -> Result<Channel> {
        self.require_unital()?;
        let mut kraus = Vec::new();
        for b in &self.blocks {
            let (keep, traced) = match which {
                Projector::Algebra => (b.d_a, b.d_b),
                Projector::Commutant => (b.d_b, b.d_a),
            };
            let scale = 1.0 / (traced as f64).sqrt();
            for j in 0..traced {
                for k in 0..traced {
                    let flip = CMatrix::unit(traced, traced, j, k);
                    let local = match which {
                        Projector::Algebra => CMatrix::identity(keep).kron(&flip),
                        Projector::Commutant => flip.kron(&CMatrix::identity(keep)),
                    };
                    kraus.push(b.iso.sandwich(&local).scale_real(scale));
                }
            }
        }
        Channel::new(kraus)
    }

    /// HS-orthonormal basis `U_i (|p⟩⟨q| ⊗ 1) U_i† / √dB_i`.
    pub fn basis(&self) -> OperatorBasis {
        let mut ops = Vec::with_capacity(self.dimension());
        for b in &self.blocks {
            let scale = 1.0 / (b.d_b as f64).sqrt();
            for p in 0..b.d_a {
                for q in 0..b.d_a {
                    let local = CMatrix::unit(b.d_a, b.d_a, p, q).kron(&CMatrix::identity(b.d_b));
                    ops.push(b.iso.sandwich(&local).scale_real(scale));
                }
            }
        }
        OperatorBasis { ambient_dim: self.ambient_dim, ops }
    }

    /// `(‖X − P_A(X)‖ ≤ tol, ‖X − P_A(X)‖)` in operator norm.
    pub fn membership(&self, x: &CMatrix, tol: f64) -> Result<(bool, f64)> {
        let defect = (x - &self.project_algebra(x)?).op_norm();
        Ok((defect <= tol, defect))
    }

    /// Random element with Ginibre block parts.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let parts: Vec<CMatrix> = self.blocks.iter().map(|b| ginibre(b.d_a, b.d_a, rng)).collect();
        self.element_from_blocks(&parts).expect("parts match the blocks")
    }

    /// Haar-random unitary of the algebra: independent Haar unitaries on each
    /// `dA` factor, identity outside the blocks.
    pub fn haar_unitary<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let mut u = &CMatrix::identity(self.ambient_dim) - &self.unit();
        for b in &self.blocks {
            let local = haar_unitary(b.d_a, rng).kron(&CMatrix::identity(b.d_b));
            u += &b.iso.sandwich(&local);
        }
        u
    }
}

/// `(1/n) Σ_k U_k† B U_k` over Haar-random unitaries `U_k` of the algebra.
pub fn twirl_estimate(alg: &AlgebraStructure, b: &CMatrix, n: usize, seed: u64) -> Result<CMatrix> {
    alg.check_square(b)?;
    if n == 0 {
        return Err(Error::InvalidInput("twirl needs at least one sample".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut acc = CMatrix::zeros(alg.ambient_dim, alg.ambient_dim);
    for _ in 0..n {
        let u = alg.haar_unitary(&mut rng);
        acc += &u.adjoint().matmul(b).matmul(&u);
    }
    Ok(acc.scale_real(1.0 / n as f64))
}

/// Lower bound on `sup ‖[U, B]‖` over unitaries `U` of the algebra: the
/// best of `samples` Haar draws, then random local moves `U ← U·exp(iεH)`
/// with `H` Hermitian in the algebra, halving `ε` when no move improves.
pub fn commutator_sup(alg: &AlgebraStructure, b: &CMatrix, samples: usize, seed: u64) -> Result<f64> {
    alg.check_square(b)?;
    let mut rng = rng_from_seed(seed);
    let eval = |u: &CMatrix| u.commutator(b).op_norm();
    let mut best = (f64::NEG_INFINITY, CMatrix::identity(alg.ambient_dim));
    for _ in 0..samples.max(1) {
        let u = alg.haar_unitary(&mut rng);
        let v = eval(&u);
        if v > best.0 {
            best = (v, u);
        }
    }
    let (mut value, mut u) = best;
    let mut step = 0.5;
    for _ in 0..ASCENT_ROUNDS {
        if step <= 1e-3 {
            break;
        }
        let mut improved = false;
        for _ in 0..8 {
            let h = alg.random_element(&mut rng).hermitian_part();
            let candidate = u.matmul(&expi_hermitian(&h, step));
            let v = eval(&candidate);
            if v > value + ASCENT_GAIN * value.max(1.0) {
                (value, u, improved) = (v, candidate, true);
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(value)
}

/// HS-orthonormal list of operators on a common space.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    ambient_dim: usize,
    ops: Vec<CMatrix>,
}

impl OperatorBasis {
    /// Orthonormal basis of `span(ops)`; vectors within relative `tol` of the
    /// running span are dropped.
    pub fn from_span(ambient_dim: usize, ops: &[CMatrix], tol: f64) -> Result<Self> {
        for op in ops {
            if op.dims() != (ambient_dim, ambient_dim) {
                return Err(Error::DimensionMismatch(format!(
                    "operator {:?} in ambient dimension {ambient_dim}",
                    op.dims()
                )));
            }
            if !op.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let vecs: Vec<Vec<C64>> = ops.iter().map(vectorize).collect();
        let ops = gram_schmidt(&vecs, tol)
            .into_iter()
            .map(|v| unvectorize(&v, ambient_dim, ambient_dim))
            .collect();
        Ok(Self { ambient_dim, ops })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops.len()
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for op in &self.ops {
            out += &op.scale(hs(op, x));
        }
        out
    }

    /// Frobenius distance from `x` to the span.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        (x - &self.project(x)).frobenius_norm()
    }

    pub fn contains(&self, x: &CMatrix, tol: f64) -> bool {
        self.residual(x) <= tol * x.frobenius_norm().max(1.0)
    }

    /// Sine of the largest principal angle between the spans; `1` if the
    /// dimensions differ.
    pub fn span_distance(&self, other: &OperatorBasis) -> f64 {
        if self.dim() != other.dim() || self.ambient_dim != other.ambient_dim {
            return 1.0;
        }
        if self.dim() == 0 {
            return 0.0;
        }
        // ‖(1 − P_other) Q_self‖ with the basis vectors of `self` as columns
        let residuals: Vec<Vec<C64>> =
            self.ops.iter().map(|a| vectorize(&(a - &other.project(a)))).collect();
        singular_values(&CMatrix::from_columns(&residuals)).first().copied().unwrap_or(0.0).min(1.0)
    }

    /// Largest residual of `A†` and `AB` over basis elements, relative to
    /// the span.
    pub fn closure_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.ops {
            worst = worst.max(self.residual(&a.adjoint()));
            for b in &self.ops {
                worst = worst.max(self.residual(&a.matmul(b)));
            }
        }
        worst
    }

    /// Orthonormal Hermitian basis of the same span (requires †-closure).
    fn hermitian_basis(&self, tol: f64) -> Vec<CMatrix> {
        let mut herm = Vec::with_capacity(2 * self.dim());
        for op in &self.ops {
            herm.push(op.hermitian_part());
            herm.push(op.scale(C64::new(0.0, -1.0)).hermitian_part());
        }
        // the ops are normalized, so parts of negligible absolute size are noise
        herm.retain(|h| h.frobenius_norm() > 1e-9);
        let mut out: Vec<Vec<C64>> = Vec::new();
        for h in &herm {
            if let Some(v) = orthogonalize_against(&out, &vectorize(h), tol) {
                out.push(v);
            }
        }
        out.into_iter()
            .map(|v| unvectorize(&v, self.ambient_dim, self.ambient_dim).hermitian_part())
            .collect()
    }
}

/// Smallest †-algebra containing `gens` (and therefore its own unit).
pub fn generate_algebra(gens: &[CMatrix], tol: f64) -> Result<OperatorBasis> {
    let d = gens.first().map(|g| g.rows()).ok_or_else(|| {
        Error::InvalidInput("need at least one generator".into())
    })?;
    let mut seed_ops: Vec<CMatrix> = Vec::with_capacity(2 * gens.len());
    for g in gens {
        seed_ops.push(g.clone());
        seed_ops.push(g.adjoint());
    }
    let mut basis = OperatorBasis::from_span(d, &seed_ops, tol)?;
    for _ in 0..d * d {
        let before = basis.dim();
        let mut vecs: Vec<Vec<C64>> = basis.ops.iter().map(vectorize).collect();
        for i in 0..before {
            for j in 0..before {
                let prod = basis.ops[i].matmul(&basis.ops[j]);
                if let Some(v) = orthogonalize_against(&vecs, &vectorize(&prod), tol) {
                    vecs.push(v);
                }
            }
        }
        basis.ops = vecs.into_iter().map(|v| unvectorize(&v, d, d)).collect();
        if basis.dim() == before {
            return Ok(basis);
        }
    }
    Err(Error::NoConvergence(d * d))
}

/// Operators commuting with every element of `ops`.
pub fn commutant_of_set(ops: &[CMatrix], tol: f64) -> Result<OperatorBasis> {
    let d = ops.first().map(|g| g.rows()).ok_or_else(|| {
        Error::InvalidInput("need at least one operator".into())
    })?;
    // Commutators ignore multiples of the identity, and only the span
    // matters; reducing first bounds the stacked system at d⁴ × d².
    let id = CMatrix::identity(d);
    let traceless: Vec<CMatrix> = ops
        .iter()
        .map(|g| g - &id.scale(g.trace() / d as f64))
        .filter(|g| g.frobenius_norm() > 1e-10)
        .collect();
    let span = OperatorBasis::from_span(d, &traceless, 1e-10)?;
    let n = d * d;
    let null = if span.dim() == 0 {
        (0..n).map(|k| (0..n).map(|j| if j == k { ONE } else { ZERO }).collect()).collect()
    } else {
        let mut stacked = CMatrix::zeros(span.dim() * n, n);
        for (k, g) in span.ops.iter().enumerate() {
            // vec(GX − XG) = (G ⊗ 1 − 1 ⊗ Gᵀ) vec(X) in row-major order
            let l = &g.kron(&id) - &id.kron(&g.transpose());
            stacked.set_block(k * n, 0, &l);
        }
        nullspace(&stacked, tol)
    };
    let basis = OperatorBasis {
        ambient_dim: d,
        ops: null.into_iter().map(|v| unvectorize(&v, d, d)).collect(),
    };
    let defect = basis.closure_defect();
    if defect > 1e-6 {
        return Err(Error::ClosureViolation(format!(
            "commutant basis fails closure by {defect:.3e}; the tolerance is probably too loose"
        )));
    }
    Ok(basis)
}

/// Groups ascending eigenvalues. `None` if some gap is ambiguous.
fn group_eigenvalues(values: &[f64]) -> Option<Vec<std::ops::Range<usize>>> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..values.len() {
        let gap = (values[k] - values[k - 1]) / scale;
        if gap < MERGE_GAP {
            continue;
        }
        if gap < AMBIGUOUS_GAP {
            return None;
        }
        groups.push(start..k);
        start = k;
    }
    groups.push(start..values.len());
    Some(groups)
}

fn random_hermitian_combination<R: Rng + ?Sized>(herm: &[CMatrix], rng: &mut R) -> CMatrix {
    let d = herm[0].rows();
    let mut g = CMatrix::zeros(d, d);
    for h in herm {
        g += &h.scale_real(gaussian_c64(rng).re * std::f64::consts::SQRT_2);
    }
    g.hermitian_part()
}

fn columns_of(m: &CMatrix, range: std::ops::Range<usize>) -> CMatrix {
    m.block(0, range.start, m.rows(), range.len())
}

/// Löwdin orthonormalization `W (W†W)^{-1/2}`.
fn lowdin(w: &CMatrix) -> CMatrix {
    let g = w.adjoint_mul(w);
    let inv_sqrt = eigh(&g).apply_fn(|x| 1.0 / x.max(1e-300).sqrt());
    w.matmul(&inv_sqrt)
}

/// Recovers the block structure of the †-algebra spanned by `basis`.
pub fn structure_from_basis(basis: &OperatorBasis, tol: f64) -> Result<AlgebraStructure> {
    let d = basis.ambient_dim;
    if basis.dim() == 0 {
        return Err(Error::InvalidInput("empty operator basis".into()));
    }
    let defect = basis.closure_defect();
    if defect > tol.max(1e-9) {
        return Err(Error::ClosureViolation(format!("closure defect {defect:.3e}")));
    }
    let herm = basis.hermitian_basis(1e-9);
    let mut last_reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = rng_from_seed(0x5eed_0000 + attempt as u64);
        match try_structure(d, &herm, &mut rng) {
            Ok(alg) => {
                if alg.dimension() != herm.len() {
                    last_reason =
                        format!("recovered dimension {} for a span of {}", alg.dimension(), herm.len());
                    continue;
                }
                let worst = herm
                    .iter()
                    .map(|h| (h - &alg.project_algebra(h).expect("dims match")).frobenius_norm())
                    .fold(0.0, f64::max);
                if worst > tol.max(1e-8) * 10.0 {
                    last_reason = format!("membership defect {worst:.3e}");
                    continue;
                }
                return Ok(alg);
            }
            Err(reason) => last_reason = reason,
        }
    }
    Err(Error::DegenerateSample { attempts: MAX_ATTEMPTS, reason: last_reason })
}

fn try_structure<R: Rng + ?Sized>(
    d: usize,
    herm: &[CMatrix],
    rng: &mut R,
) -> std::result::Result<AlgebraStructure, String> {
    // support of the algebra = range of its unit
    let mut support = CMatrix::zeros(d, d);
    for h in herm {
        support += &h.matmul(h);
    }
    let se = eigh(&support);
    let smax = se.eigenvalues.last().copied().unwrap_or(0.0);
    let first = se.eigenvalues.iter().position(|&v| v > 1e-9 * smax).unwrap_or(d);
    let q = columns_of(&se.eigenvectors, first..d);

    // center: Σ c_k H_k commuting with every H_l
    let n = herm.len();
    let mut system = CMatrix::zeros(n * d * d, n);
    for (l, hl) in herm.iter().enumerate() {
        for (k, hk) in herm.iter().enumerate() {
            let comm = vectorize(&hk.commutator(hl));
            for (r, v) in comm.into_iter().enumerate() {
                system[(l * d * d + r, k)] = v;
            }
        }
    }
    let coeffs = if system.max_abs() < 1e-12 {
        // commutative span: every element is central
        (0..n).map(|k| (0..n).map(|j| if j == k { ONE } else { ZERO }).collect()).collect()
    } else {
        nullspace(&system, 1e-9)
    };
    if coeffs.is_empty() {
        return Err("empty center".into());
    }
    let central: Vec<CMatrix> = coeffs
        .iter()
        .flat_map(|c| {
            let mut z = CMatrix::zeros(d, d);
            for (ck, hk) in c.iter().zip(herm) {
                z += &hk.scale(*ck);
            }
            [z.hermitian_part(), z.scale(C64::new(0.0, -1.0)).hermitian_part()]
        })
        .filter(|z| z.frobenius_norm() > 1e-12)
        .collect();

    let z = random_hermitian_combination(&central, rng);
    let zs = eigh(&q.adjoint().matmul(&z).matmul(&q));
    let groups = group_eigenvalues(&zs.eigenvalues).ok_or("ambiguous central spectrum")?;
    if groups.len() != coeffs.len() {
        return Err(format!("{} central eigenspaces for a center of dimension {}", groups.len(), coeffs.len()));
    }

    let mut blocks = Vec::with_capacity(groups.len());
    for g in groups {
        let w = q.matmul(&columns_of(&zs.eigenvectors, g));
        let s = w.cols();
        let mut local: Vec<CMatrix> = herm.iter().map(|h| w.adjoint().matmul(h).matmul(&w)).collect();
        let biggest = local.iter().map(|m| m.frobenius_norm()).fold(0.0, f64::max);
        local.retain(|m| m.frobenius_norm() > 1e-9 * biggest);
        let local_basis = gram_schmidt(&local.iter().map(vectorize).collect::<Vec<_>>(), 1e-8);
        let rank = local_basis.len();
        let d_a = (rank as f64).sqrt().round() as usize;
        if d_a * d_a != rank || d_a == 0 || !s.is_multiple_of(d_a) {
            return Err(format!("block of size {s} carries a span of dimension {rank}"));
        }
        let d_b = s / d_a;
        let local_herm: Vec<CMatrix> = local_basis
            .iter()
            .map(|v| unvectorize(v, s, s).hermitian_part())
            .filter(|h| h.frobenius_norm() > 1e-12)
            .collect();
        let iso_local = if d_a == 1 {
            CMatrix::identity(s)
        } else {
            factor_block(&local_herm, &local_basis, s, d_a, d_b, rng)?
        };
        blocks.push(Block { iso: w.matmul(&iso_local), d_a, d_b });
    }
    Ok(AlgebraStructure { ambient_dim: d, blocks })
}

/// Tensor basis `v_{a,b}` of a simple block `M_{dA} ⊗ 1_{dB}` on `C^s`.
fn factor_block<R: Rng + ?Sized>(
    local_herm: &[CMatrix],
    local_basis: &[Vec<C64>],
    s: usize,
    d_a: usize,
    d_b: usize,
    rng: &mut R,
) -> std::result::Result<CMatrix, String> {
    let g = random_hermitian_combination(local_herm, rng);
    let ge = eigh(&g);
    let groups = group_eigenvalues(&ge.eigenvalues).ok_or("ambiguous block spectrum")?;
    if groups.len() != d_a || groups.iter().any(|r| r.len() != d_b) {
        return Err(format!("generic element splits a {d_a}x{d_b} block as {groups:?}"));
    }
    let spaces: Vec<CMatrix> = groups.into_iter().map(|r| columns_of(&ge.eigenvectors, r)).collect();

    // generic algebra element; P_a A P_0 maps copy 0 onto copy a
    let mut a = CMatrix::zeros(s, s);
    for v in local_basis {
        a += &unvectorize(v, s, s).scale(gaussian_c64(rng));
    }
    let a_norm = a.op_norm();
    let mut iso = CMatrix::zeros(s, s);
    iso.set_block(0, 0, &spaces[0]);
    for (idx, e) in spaces.iter().enumerate().skip(1) {
        let t = e.adjoint().matmul(&a).matmul(&spaces[0]);
        let alpha = (hs(&t, &t).re / d_b as f64).sqrt();
        if alpha < 1e-6 * a_norm {
            return Err("intertwiner too small".into());
        }
        let copy = lowdin(&e.matmul(&t).scale_real(1.0 / alpha));
        iso.set_block(0, idx * d_b, &copy);
    }
    Ok(iso)
}

/// Algebra drawn from a small catalog (full, diagonal, scalars, `M_a ⊗ 1_b`
/// sums) and conjugated by a Haar unitary.
pub fn random_catalog_algebra<R: Rng + ?Sized>(d: usize, rng: &mut R) -> AlgebraStructure {
    let mut options: Vec<Vec<(usize, usize)>> = vec![vec![(d, 1)], vec![(1, 1); d], vec![(1, d)]];
    for a in 2..d {
        if d.is_multiple_of(a) {
            options.push(vec![(a, d / a)]);
        }
        options.push(vec![(a, 1), (1, d - a)]);
    }
    if d >= 3 {
        let mut parts = vec![(2, 1)];
        parts.extend(std::iter::repeat_n((1, 1), d - 2));
        options.push(parts);
    }
    let choice = &options[rng.random_range(0..options.len())];
    let u = haar_unitary(d, rng);
    AlgebraStructure::block_sum(choice).conjugated(&u).expect("unitary conjugation is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_operator_with_norm;

    fn pauli_x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::diag_real(&[1.0, -1.0])
    }

    fn sample_algebras() -> Vec<AlgebraStructure> {
        let mut rng = rng_from_seed(99);
        vec![
            AlgebraStructure::full(3),
            AlgebraStructure::trivial(3),
            AlgebraStructure::diagonal(3),
            AlgebraStructure::factor(2, 2),
            AlgebraStructure::block_sum(&[(2, 2), (1, 1)]).conjugated(&haar_unitary(5, &mut rng)).unwrap(),
            AlgebraStructure::block_sum(&[(2, 1), (1, 2)]).conjugated(&haar_unitary(4, &mut rng)).unwrap(),
        ]
    }

    #[test]
    fn element_from_blocks_examples() {
        let mut rng = rng_from_seed(1);
        let m = ginibre(3, 3, &mut rng);
        assert!(AlgebraStructure::full(3).element_from_blocks(std::slice::from_ref(&m)).unwrap().approx_eq(&m, 1e-14));
        let alg = &sample_algebras()[4];
        let ids: Vec<CMatrix> = alg.blocks().iter().map(|b| CMatrix::identity(b.d_a())).collect();
        assert!(alg.element_from_blocks(&ids).unwrap().approx_eq(&alg.unit(), 1e-12));
        let parts: Vec<CMatrix> = alg.blocks().iter().map(|b| ginibre(b.d_a(), b.d_a(), &mut rng)).collect();
        let x = alg.element_from_blocks(&parts).unwrap();
        for (b, a) in alg.blocks().iter().zip(&parts) {
            let p = b.projector();
            let expected = b.iso().sandwich(&a.kron(&CMatrix::identity(b.d_b())));
            assert!(p.matmul(&x).matmul(&p).approx_eq(&expected, 1e-12));
        }
        assert!(alg.element_from_blocks(&parts[..1]).is_err());
    }

    #[test]
    fn projection_examples() {
        let mut rng = rng_from_seed(2);
        let x = ginibre(3, 3, &mut rng);
        assert!(AlgebraStructure::full(3).project_algebra(&x).unwrap().approx_eq(&x, 1e-14));
        let expected = CMatrix::identity(3).scale(x.trace() / 3.0);
        assert!(AlgebraStructure::trivial(3).project_algebra(&x).unwrap().approx_eq(&expected, 1e-14));
        assert!(AlgebraStructure::full(3).project_commutant(&x).unwrap().approx_eq(&expected, 1e-14));
        for alg in sample_algebras() {
            let d = alg.ambient_dim();
            let y = alg.random_element(&mut rng);
            assert!(alg.project_algebra(&y).unwrap().approx_eq(&y, 1e-12));
            let c = alg.commutant_structure().random_element(&mut rng);
            assert!(alg.project_commutant(&c).unwrap().approx_eq(&c, 1e-12));
            // commutant of the algebra part lands in the center
            let x = ginibre(d, d, &mut rng);
            let both = alg.project_commutant(&alg.project_algebra(&x).unwrap()).unwrap();
            let mut center = CMatrix::zeros(d, d);
            for b in alg.blocks() {
                let p = b.projector();
                let w = p.matmul(&x).matmul(&p).trace() / p.trace();
                center += &p.scale(w);
            }
            assert!(both.approx_eq(&center, 1e-12));
        }
    }

    #[test]
    fn commutant_structure_examples() {
        let t = AlgebraStructure::full(3).commutant_structure();
        assert_eq!((t.blocks()[0].d_a(), t.blocks()[0].d_b()), (1, 3));
        let diag = AlgebraStructure::diagonal(2);
        assert_eq!(diag.commutant_structure(), diag);
        let mut rng = rng_from_seed(3);
        for alg in sample_algebras() {
            let back = alg.commutant_structure().commutant_structure();
            for (a, b) in alg.blocks().iter().zip(back.blocks()) {
                assert!(a.iso().approx_eq(b.iso(), 1e-15));
            }
            let swapped = alg.commutant_structure();
            let d = alg.ambient_dim();
            let x = ginibre(d, d, &mut rng);
            let lhs = alg.project_commutant(&x).unwrap();
            let rhs = swapped.project_algebra(&x).unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-10));
        }
    }

    #[test]
    fn projector_channels_are_idempotent_self_adjoint_cptp() {
        let mut rng = rng_from_seed(4);
        for alg in sample_algebras() {
            let d = alg.ambient_dim();
            for which in [Projector::Algebra, Projector::Commutant] {
                let ch = alg.projector_channel(which).unwrap();
                let proj = |x: &CMatrix| match which {
                    Projector::Algebra => alg.project_algebra(x).unwrap(),
                    Projector::Commutant => alg.project_commutant(x).unwrap(),
                };
                let x = ginibre(d, d, &mut rng);
                let y = ginibre(d, d, &mut rng);
                assert!(ch.apply(&x).unwrap().approx_eq(&proj(&x), 1e-12));
                assert!(proj(&proj(&x)).approx_eq(&proj(&x), 1e-9));
                assert!((hs(&proj(&x), &y) - hs(&x, &proj(&y))).norm() < 1e-9);
                assert!((proj(&x).trace() - x.trace()).norm() < 1e-9);
                assert!(proj(&CMatrix::identity(d)).approx_eq(&CMatrix::identity(d), 1e-9));
                assert!(eigh(&ch.choi()).eigenvalues[0] > -1e-9);
                assert!(ch.tp_defect() < 1e-9);
            }
        }
    }

    #[test]
    fn projector_kraus_counts() {
        let alg = AlgebraStructure::block_sum(&[(2, 3), (1, 2)]);
        assert_eq!(alg.projector_channel(Projector::Algebra).unwrap().num_kraus(), 9 + 4);
        assert_eq!(alg.projector_channel(Projector::Commutant).unwrap().num_kraus(), 4 + 1);
    }

    #[test]
    fn non_unital_structure_has_no_projector_channel() {
        let iso = CMatrix::from_fn(3, 2, |i, j| if i == j { ONE } else { ZERO });
        let alg = AlgebraStructure::new(3, vec![Block::new(iso, 2, 1).unwrap()]).unwrap();
        assert!(!alg.is_unital());
        assert!(matches!(
            alg.projector_channel(Projector::Algebra),
            Err(Error::NotUnital { covered: 2, ambient: 3 })
        ));
    }

    #[test]
    fn commutant_range_characterization() {
        let mut rng = rng_from_seed(5);
        for alg in sample_algebras() {
            let d = alg.ambient_dim();
            let pc = alg.project_commutant(&ginibre(d, d, &mut rng)).unwrap();
            for a in alg.basis().ops() {
                assert!(pc.commutator(a).max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn basis_is_orthonormal_and_spans_the_algebra() {
        for alg in sample_algebras() {
            let b = alg.basis();
            assert_eq!(b.dim(), alg.dimension());
            for (i, x) in b.ops().iter().enumerate() {
                for (j, y) in b.ops().iter().enumerate() {
                    let expected = if i == j { ONE } else { ZERO };
                    assert!((hs(x, y) - expected).norm() < 1e-9);
                }
                assert!(b.contains(&x.adjoint(), 1e-9));
                assert!(alg.membership(x, 1e-9).unwrap().0);
            }
        }
    }

    #[test]
    fn generate_algebra_examples() {
        let x = pauli_x();
        let g = generate_algebra(std::slice::from_ref(&x), 1e-10).unwrap();
        assert_eq!(g.dim(), 2);
        assert!(g.contains(&CMatrix::identity(2), 1e-10));
        assert_eq!(generate_algebra(&[x, pauli_z()], 1e-10).unwrap().dim(), 4);
        assert_eq!(generate_algebra(&[CMatrix::identity(3)], 1e-10).unwrap().dim(), 1);
        // a non-unital generator yields its own support projector as unit
        let n = CMatrix::unit(3, 3, 0, 1);
        let g = generate_algebra(&[n], 1e-10).unwrap();
        assert_eq!(g.dim(), 4);
        assert!(g.contains(&CMatrix::diag_real(&[1.0, 1.0, 0.0]), 1e-10));
    }

    #[test]
    fn commutant_of_set_examples() {
        let c = commutant_of_set(&[pauli_z()], 1e-9).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&CMatrix::diag_real(&[0.3, -2.0]), 1e-10));
        let full: Vec<CMatrix> = (0..3).flat_map(|i| (0..3).map(move |j| CMatrix::unit(3, 3, i, j))).collect();
        let c = commutant_of_set(&full, 1e-9).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&CMatrix::identity(3), 1e-10));
    }

    #[test]
    fn bicommutant_recovers_generated_algebras() {
        let mut rng = rng_from_seed(6);
        for alg in sample_algebras() {
            let gens = vec![alg.random_element(&mut rng), alg.random_element(&mut rng)];
            let g = generate_algebra(&gens, 1e-10).unwrap();
            let c1 = commutant_of_set(g.ops(), 1e-9).unwrap();
            let c2 = commutant_of_set(c1.ops(), 1e-9).unwrap();
            assert!(c2.span_distance(&g) < 1e-8, "{}", c2.span_distance(&g));
            assert!(g.span_distance(&alg.basis()) < 1e-8);
        }
    }

    #[test]
    fn structure_from_basis_examples() {
        let s = structure_from_basis(&AlgebraStructure::full(3).basis(), 1e-9).unwrap();
        assert_eq!(s.blocks().len(), 1);
        assert_eq!((s.blocks()[0].d_a(), s.blocks()[0].d_b()), (3, 1));

        let zspan = OperatorBasis::from_span(2, &[CMatrix::identity(2), pauli_z()], 1e-12).unwrap();
        let s = structure_from_basis(&zspan, 1e-9).unwrap();
        assert_eq!(s.blocks().len(), 2);
        assert!(s.blocks().iter().all(|b| b.d_a() == 1 && b.d_b() == 1));

        // M₂ ⊗ 1₂ inside M₄: the recovered projection is Tr_B(X)/2 ⊗ 1
        let basis = AlgebraStructure::factor(2, 2).basis();
        let s = structure_from_basis(&basis, 1e-9).unwrap();
        assert_eq!((s.blocks()[0].d_a(), s.blocks()[0].d_b()), (2, 2));
        let x = ginibre(4, 4, &mut rng_from_seed(7));
        let direct =
            partial_trace(&x, (2, 2), Factor::Second).unwrap().kron(&CMatrix::identity(2)).scale_real(0.5);
        assert!(s.project_algebra(&x).unwrap().approx_eq(&direct, 1e-10));
    }

    #[test]
    fn structure_round_trips_random_algebras() {
        let mut rng = rng_from_seed(8);
        for alg in sample_algebras() {
            let s = structure_from_basis(&alg.basis(), 1e-9).unwrap();
            assert!(s.basis().span_distance(&alg.basis()) < 1e-8);
            let mut dims: Vec<(usize, usize)> = s.blocks().iter().map(|b| (b.d_a(), b.d_b())).collect();
            let mut want: Vec<(usize, usize)> = alg.blocks().iter().map(|b| (b.d_a(), b.d_b())).collect();
            dims.sort();
            want.sort();
            assert_eq!(dims, want);
            let d = alg.ambient_dim();
            let x = ginibre(d, d, &mut rng);
            assert!(s.project_commutant(&x).unwrap().approx_eq(&alg.project_commutant(&x).unwrap(), 1e-8));
        }
    }

    #[test]
    fn structure_rejects_non_algebras() {
        let span = OperatorBasis::from_span(2, &[pauli_x(), pauli_z()], 1e-12).unwrap();
        assert!(matches!(structure_from_basis(&span, 1e-9), Err(Error::ClosureViolation(_))));
    }

    #[test]
    fn twirl_examples() {
        let mut rng = rng_from_seed(9);
        let alg = &sample_algebras()[4];
        let c = alg.commutant_structure().random_element(&mut rng);
        assert!(twirl_estimate(alg, &c, 5, 1).unwrap().approx_eq(&c, 1e-12));
        let b = ginibre(3, 3, &mut rng);
        assert!(twirl_estimate(&AlgebraStructure::trivial(3), &b, 7, 2).unwrap().approx_eq(&b, 1e-12));
        let alg = AlgebraStructure::factor(2, 2);
        let b = random_operator_with_norm(4, 1.0, &mut rng);
        let t = twirl_estimate(&alg, &b, 10_000, 3).unwrap();
        assert!((&t - &alg.project_commutant(&b).unwrap()).op_norm() < 0.1);
    }

    #[test]
    fn membership_examples() {
        let alg = AlgebraStructure::diagonal(2);
        let (ok, defect) = alg.membership(&alg.unit(), 1e-12).unwrap();
        assert!(ok && defect <= 1e-12);
        let x = pauli_x();
        let (ok, defect) = alg.membership(&x, 1e-6).unwrap();
        assert!(!ok && (defect - 1.0).abs() < 1e-12);
        let mut rng = rng_from_seed(10);
        let alg = &sample_algebras()[5];
        let y = alg.random_element(&mut rng);
        let d = alg.ambient_dim();
        // perturb orthogonally to the algebra with operator norm 1e-3
        let mut p = ginibre(d, d, &mut rng);
        p = &p - &alg.project_algebra(&p).unwrap();
        p = p.scale_real(1e-3 / p.op_norm());
        let (_, defect) = alg.membership(&(&y + &p), 1e-6).unwrap();
        assert!((defect - 1e-3).abs() < 1e-9);
    }

    #[test]
    fn commutator_sandwich_on_sampled_unitaries() {
        let mut rng = rng_from_seed(11);
        for alg in sample_algebras() {
            let d = alg.ambient_dim();
            let b = random_operator_with_norm(d, 1.0, &mut rng);
            let dist = (&b - &alg.project_commutant(&b).unwrap()).op_norm();
            let sup = (0..1000).map(|_| alg.haar_unitary(&mut rng).commutator(&b).op_norm()).fold(0.0, f64::max);
            assert!(sup >= dist - 0.05 && sup <= 2.0 * dist + 1e-9, "{sup} vs {dist}");
        }
    }

    #[test]
    fn random_catalog_algebras_are_unital() {
        let mut rng = rng_from_seed(12);
        for d in 2..=5 {
            for _ in 0..5 {
                let alg = random_catalog_algebra(d, &mut rng);
                assert!(alg.is_unital());
                let u = alg.haar_unitary(&mut rng);
                assert!(u.adjoint().matmul(&u).approx_eq(&CMatrix::identity(d), 1e-10));
            }
        }
    }
}
