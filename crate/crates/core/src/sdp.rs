//! Small dense complex semidefinite programming.
//!
//! Problems are posed in standard primal form over a block-diagonal Hermitian
//! variable `X = diag(X_1, …, X_k)`:
//!
//! ```text
//! maximize   Re Tr(C X)
//! subject to Tr(A_i X) = b_i,   X ⪰ 0
//! ```
//!
//! with dual `minimize b·y  s.t.  Z = Σ y_i A_i − C ⪰ 0`. The solver is an
//! infeasible primal-dual path-following method with Mehrotra
//! predictor-corrector steps and the HKM search direction, working directly on
//! complex Hermitian blocks.

use log::debug;
use faer::linalg::solvers::{Llt, Solve};
use faer::{Col, Mat, Side};

use crate::error::{Error, Result};
use crate::matcore::{cholesky, eigh, hs, lower_inverse, CMatrix, C64, ZERO};

/// Sparse Hermitian coefficient matrix restricted to one block. Both triangles
/// are stored explicitly.
#[derive(Clone, Debug, Default)]
pub struct BlockTerm {
    pub block: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

/// `Σ_terms Tr(A_term X_block) = rhs`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<BlockTerm>,
    pub rhs: f64,
}

/// Semidefinite program in standard primal form.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    blocks: Vec<usize>,
    objective: Vec<CMatrix>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    /// Primal blocks.
    pub x: Vec<CMatrix>,
    /// Dual slack blocks.
    pub z: Vec<CMatrix>,
    pub y: Vec<f64>,
    pub status: SdpStatus,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        (self.primal_value - self.dual_value).abs()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 200 }
    }
}

impl SdpProblem {
    pub fn new(blocks: Vec<usize>) -> Self {
        let objective = blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        Self { blocks, objective, constraints: Vec::new() }
    }

    /// Single-block problem with dense constraint matrices.
    pub fn dense(objective: CMatrix, constraints: Vec<(CMatrix, f64)>) -> Result<Self> {
        let n = objective.rows();
        if !objective.is_square() {
            return Err(Error::DimensionMismatch("objective must be square".into()));
        }
        check_hermitian(&objective)?;
        let mut p = Self::new(vec![n]);
        p.objective[0] = objective;
        for (a, b) in constraints {
            if a.dims() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {:?} for a {n}x{n} variable",
                    a.dims()
                )));
            }
            check_hermitian(&a)?;
            p.constraints.push(Constraint { terms: vec![dense_term(0, &a)], rhs: b });
        }
        if p.constraints.len() >= n * n {
            return Err(Error::InvalidInput(format!(
                "{} constraints for a {n}x{n} Hermitian variable",
                p.constraints.len()
            )));
        }
        Ok(p)
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn psd_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_objective(&mut self, block: usize, c: CMatrix) {
        assert_eq!(c.dims(), (self.blocks[block], self.blocks[block]));
        self.objective[block] = c.hermitian_part();
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    /// Adds the complex equation `Σ coeff · X_block[row, col] = rhs` as its
    /// real part and, unless `real_only`, its imaginary part.
    pub fn add_complex_equality(
        &mut self,
        terms: &[(usize, usize, usize, C64)],
        rhs: C64,
        real_only: bool,
    ) {
        // Σ c X[r,s] = Tr(K X) with K[s,r] = c; Re → (K+K†)/2, Im → (K−K†)/2i.
        let build = |imag: bool| -> Vec<BlockTerm> {
            let mut out: Vec<BlockTerm> = Vec::new();
            for &(b, row, col, coeff) in terms {
                let (a_sr, a_rs) = if imag {
                    (coeff * C64::new(0.0, -0.5), coeff.conj() * C64::new(0.0, 0.5))
                } else {
                    (coeff * 0.5, coeff.conj() * 0.5)
                };
                let term = match out.iter_mut().find(|t| t.block == b) {
                    Some(t) => t,
                    None => {
                        out.push(BlockTerm { block: b, entries: Vec::new() });
                        out.last_mut().unwrap()
                    }
                };
                term.entries.push((col, row, a_sr));
                term.entries.push((row, col, a_rs));
            }
            for t in &mut out {
                compress(&mut t.entries);
            }
            out.retain(|t| !t.entries.is_empty());
            out
        };
        let re = build(false);
        if !re.is_empty() {
            self.constraints.push(Constraint { terms: re, rhs: rhs.re });
        }
        if !real_only {
            let im = build(true);
            if !im.is_empty() {
                self.constraints.push(Constraint { terms: im, rhs: rhs.im });
            }
        }
    }

    fn apply_a(&self, x: &[CMatrix]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|con| {
                con.terms
                    .iter()
                    .map(|t| {
                        let xb = &x[t.block];
                        t.entries.iter().map(|&(r, s, a)| (a * xb[(s, r)]).re).sum::<f64>()
                    })
                    .sum()
            })
            .collect()
    }

    fn apply_a_adjoint(&self, y: &[f64]) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = self.blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        for (con, &yi) in self.constraints.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for t in &con.terms {
                let ob = &mut out[t.block];
                for &(r, s, a) in &t.entries {
                    ob[(r, s)] += a * yi;
                }
            }
        }
        out
    }

    fn objective_value(&self, x: &[CMatrix]) -> f64 {
        self.objective.iter().zip(x).map(|(c, xb)| hs(c, xb).re).sum()
    }
}

fn check_hermitian(a: &CMatrix) -> Result<()> {
    let d = a.hermiticity_defect();
    if d > 1e-10 * a.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { defect: d });
    }
    Ok(())
}

fn dense_term(block: usize, a: &CMatrix) -> BlockTerm {
    let mut entries = Vec::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)] != ZERO {
                entries.push((i, j, a[(i, j)]));
            }
        }
    }
    BlockTerm { block, entries }
}

fn compress(entries: &mut Vec<(usize, usize, C64)>) {
    entries.sort_by_key(|&(r, s, _)| (r, s));
    let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(entries.len());
    for &(r, s, v) in entries.iter() {
        match merged.last_mut() {
            Some(last) if last.0 == r && last.1 == s => last.2 += v,
            _ => merged.push((r, s, v)),
        }
    }
    let scale = merged.iter().map(|e| e.2.norm()).fold(0.0, f64::max);
    merged.retain(|e| e.2.norm() > 1e-14 * scale.max(1e-300));
    *entries = merged;
}

fn blocks_dot(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| hs(x, y).re).sum()
}

fn blocks_norm(a: &[CMatrix]) -> f64 {
    a.iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest `α ≤ cap` with `X + α ΔX ⪰ 0`, given the Cholesky factor inverse of `X`.
fn max_step(linv: &[CMatrix], dx: &[CMatrix], cap: f64) -> f64 {
    let mut alpha = cap;
    for (li, d) in linv.iter().zip(dx) {
        let m = li.matmul(d).matmul(&li.adjoint());
        let lam = eigh(&m).eigenvalues[0];
        if lam < 0.0 {
            alpha = alpha.min(-1.0 / lam);
        }
    }
    alpha
}

struct Factored {
    linv_x: Vec<CMatrix>,
    z_inv: Vec<CMatrix>,
    linv_z: Vec<CMatrix>,
}

fn factor(x: &[CMatrix], z: &[CMatrix], iteration: usize) -> Result<Factored> {
    let mut linv_x = Vec::with_capacity(x.len());
    let mut linv_z = Vec::with_capacity(x.len());
    let mut z_inv = Vec::with_capacity(x.len());
    for (xb, zb) in x.iter().zip(z) {
        let lx = cholesky(xb).ok_or_else(|| Error::Numerical {
            iteration,
            reason: "primal iterate lost positive definiteness".into(),
        })?;
        let lz = cholesky(zb).ok_or_else(|| Error::Numerical {
            iteration,
            reason: "dual slack lost positive definiteness".into(),
        })?;
        let lzi = lower_inverse(&lz);
        z_inv.push(lzi.adjoint_mul(&lzi));
        linv_x.push(lower_inverse(&lx));
        linv_z.push(lzi);
    }
    Ok(Factored { linv_x, z_inv, linv_z })
}

/// Schur complement `M_ij = Re Tr(A_i X A_j Z⁻¹)`.
fn schur_complement(p: &SdpProblem, x: &[CMatrix], z_inv: &[CMatrix]) -> Mat<f64> {
    let m = p.constraints.len();
    let mut schur = Mat::<f64>::zeros(m, m);
    for (i, ci) in p.constraints.iter().enumerate() {
        // G = X A_i Z⁻¹ on each block this constraint touches
        let g: Vec<(usize, CMatrix)> = ci
            .terms
            .iter()
            .map(|t| {
                let n = p.blocks[t.block];
                let (xb, zb) = (&x[t.block], &z_inv[t.block]);
                let gb = if t.entries.len() > n {
                    let mut a = CMatrix::zeros(n, n);
                    for &(r, s, v) in &t.entries {
                        a[(r, s)] += v;
                    }
                    xb.matmul(&a).matmul(zb)
                } else {
                    let mut gb = CMatrix::zeros(n, n);
                    for &(r, s, v) in &t.entries {
                        for u in 0..n {
                            let xu = xb[(u, r)] * v;
                            if xu == ZERO {
                                continue;
                            }
                            for w in 0..n {
                                gb[(u, w)] += xu * zb[(s, w)];
                            }
                        }
                    }
                    gb
                };
                (t.block, gb)
            })
            .collect();
        for j in i..m {
            let cj = &p.constraints[j];
            let mut acc = 0.0;
            for tj in &cj.terms {
                if let Some((_, gb)) = g.iter().find(|(b, _)| *b == tj.block) {
                    for &(r, s, v) in &tj.entries {
                        acc += (v * gb[(s, r)]).re;
                    }
                }
            }
            schur[(i, j)] = acc;
            schur[(j, i)] = acc;
        }
    }
    schur
}

/// Cholesky of the Schur complement, retried with a growing diagonal shift
/// when rounding has destroyed definiteness close to the optimum.
fn factor_schur(mut schur: Mat<f64>, iteration: usize) -> Result<Llt<f64>> {
    let m = schur.nrows();
    let scale = (0..m).map(|i| schur[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    loop {
        if let Ok(chol) = schur.llt(Side::Lower) {
            return Ok(chol);
        }
        let next = if shift == 0.0 { 1e-14 * scale } else { shift * 100.0 };
        if next > 1e-6 * scale {
            return Err(Error::Numerical {
                iteration,
                reason: "Schur complement is not positive definite".into(),
            });
        }
        debug!("Schur complement regularized by {next:.1e}");
        for i in 0..m {
            schur[(i, i)] += next - shift;
        }
        shift = next;
    }
}

fn hermitize(blocks: &mut [CMatrix]) {
    for b in blocks {
        *b = b.hermitian_part();
    }
}

/// Solves `p` to relative tolerance `tol`.
pub fn sdp_solve(p: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    solve_with(p, SdpOptions { tol, max_iter })
}

pub fn solve_with(p: &SdpProblem, opts: SdpOptions) -> Result<SdpSolution> {
    let m = p.constraints.len();
    let nb = p.blocks.len();
    let n_total = p.psd_dim() as f64;
    let b: Vec<f64> = p.constraints.iter().map(|c| c.rhs).collect();
    let b_norm = vec_norm(&b);
    let c_norm = blocks_norm(&p.objective);

    // starting point
    let mut a_norm_block = vec![0.0f64; nb];
    let mut ratio_block = vec![0.0f64; nb];
    for con in &p.constraints {
        for t in &con.terms {
            let f = t.entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt();
            a_norm_block[t.block] = a_norm_block[t.block].max(f);
            ratio_block[t.block] = ratio_block[t.block].max((1.0 + con.rhs.abs()) / (1.0 + f));
        }
    }
    let mut x: Vec<CMatrix> = Vec::with_capacity(nb);
    let mut z: Vec<CMatrix> = Vec::with_capacity(nb);
    for (k, &n) in p.blocks.iter().enumerate() {
        let nf = n as f64;
        let xi = 10f64.max(nf.sqrt()).max(nf * ratio_block[k]);
        let eta = 10f64
            .max(nf.sqrt())
            .max(a_norm_block[k].max(p.objective[k].frobenius_norm()));
        x.push(CMatrix::identity(n).scale_real(xi));
        z.push(CMatrix::identity(n).scale_real(eta));
    }
    let mut y = vec![0.0f64; m];

    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;
    let (mut pinf, mut dinf);
    loop {
        let ax = p.apply_a(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let aty = p.apply_a_adjoint(&y);
        let rd: Vec<CMatrix> = (0..nb).map(|k| &(&p.objective[k] + &z[k]) - &aty[k]).collect();
        let pobj = p.objective_value(&x);
        let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let xz = blocks_dot(&x, &z);
        let mu = xz / n_total;
        pinf = vec_norm(&rp) / (1.0 + b_norm);
        dinf = blocks_norm(&rd) / (1.0 + c_norm);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let rel_compl = xz.abs() / (1.0 + pobj.abs() + dobj.abs());
        debug!(
            "sdp iter {iterations:3}: pobj {pobj:+.10e} dobj {dobj:+.10e} gap {rel_gap:.2e} \
             compl {rel_compl:.2e} pinf {pinf:.2e} dinf {dinf:.2e}"
        );
        if rel_gap <= opts.tol && rel_compl <= opts.tol && pinf <= opts.tol && dinf <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if blocks_norm(&x) > 1e12 || vec_norm(&y) > 1e12 {
            status = SdpStatus::Infeasible;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }

        let f = factor(&x, &z, iterations)?;
        let schur = schur_complement(p, &x, &f.z_inv);
        let chol = factor_schur(schur, iterations)?;

        // Solve for a direction given Rc Z⁻¹ per block.
        let direction = |rc_zinv: &[CMatrix]| -> (Vec<CMatrix>, Vec<f64>, Vec<CMatrix>) {
            let mut tmp: Vec<CMatrix> = Vec::with_capacity(nb);
            for k in 0..nb {
                tmp.push(&rc_zinv[k] + &x[k].matmul(&rd[k]).matmul(&f.z_inv[k]));
            }
            let a_tmp = p.apply_a(&tmp);
            let h = Col::<f64>::from_fn(m, |i| a_tmp[i] - rp[i]);
            let dy_v = chol.solve(&h);
            let dy: Vec<f64> = dy_v.iter().copied().collect();
            let aty_d = p.apply_a_adjoint(&dy);
            let mut dz: Vec<CMatrix> = (0..nb).map(|k| &aty_d[k] - &rd[k]).collect();
            hermitize(&mut dz);
            let mut dx: Vec<CMatrix> = (0..nb)
                .map(|k| &rc_zinv[k] - &x[k].matmul(&dz[k]).matmul(&f.z_inv[k]))
                .collect();
            hermitize(&mut dx);
            (dx, dy, dz)
        };

        // predictor
        let neg_x: Vec<CMatrix> = x.iter().map(|xb| -xb).collect();
        let (dx_a, _, dz_a) = direction(&neg_x);
        let ap = max_step(&f.linv_x, &dx_a, 1.0);
        let ad = max_step(&f.linv_z, &dz_a, 1.0);
        let mut xz_aff = 0.0;
        for k in 0..nb {
            let xa = &x[k] + &dx_a[k].scale_real(ap);
            let za = &z[k] + &dz_a[k].scale_real(ad);
            xz_aff += hs(&xa, &za).re;
        }
        let mu_aff = xz_aff / n_total;
        let expon = if ap.min(ad) > 0.3 { 3.0 } else { 2.0 };
        let sigma = (mu_aff / mu).max(0.0).powf(expon).min(1.0);

        // corrector
        let rc_zinv: Vec<CMatrix> = (0..nb)
            .map(|k| {
                let corr = dx_a[k].matmul(&dz_a[k]).matmul(&f.z_inv[k]);
                &(&f.z_inv[k].scale_real(sigma * mu) - &x[k]) - &corr
            })
            .collect();
        let (dx, dy, dz) = direction(&rc_zinv);
        let tau = 0.9 + 0.09 * ap.min(ad);
        let ap = (tau * max_step(&f.linv_x, &dx, f64::INFINITY)).min(1.0);
        let ad = (tau * max_step(&f.linv_z, &dz, f64::INFINITY)).min(1.0);
        for k in 0..nb {
            x[k] += &dx[k].scale_real(ap);
            z[k] += &dz[k].scale_real(ad);
        }
        hermitize(&mut x);
        hermitize(&mut z);
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += ad * di;
        }
        iterations += 1;
    }

    let primal_value = p.objective_value(&x);
    let dual_value = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
    let sol = SdpSolution {
        primal_value,
        dual_value,
        x,
        z,
        y,
        status,
        iterations,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
    };
    debug!(
        "sdp finished: {:?} after {} iterations, value {:.12e}",
        sol.status, sol.iterations, sol.primal_value
    );
    Ok(sol)
}

/// Solves and insists on an optimal status.
pub(crate) fn solve_optimal(p: &SdpProblem, opts: SdpOptions) -> Result<SdpSolution> {
    let sol = solve_with(p, opts)?;
    match sol.status {
        SdpStatus::Optimal => Ok(sol),
        _ => Err(Error::SolverStalled {
            iterations: sol.iterations,
            gap: sol.gap(),
            infeas: sol.primal_infeasibility.max(sol.dual_infeasibility),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{r, ONE};
    use crate::random::{random_hermitian, rng_from_seed};

    #[test]
    fn trace_objective() {
        let p = SdpProblem::dense(CMatrix::identity(2), vec![(CMatrix::identity(2), 1.0)]).unwrap();
        let sol = sdp_solve(&p, 1e-9, 100).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn diagonal_objective_picks_ground_state() {
        let p = SdpProblem::dense(CMatrix::diag_real(&[1.0, -1.0]), vec![(CMatrix::identity(2), 1.0)])
            .unwrap();
        let sol = sdp_solve(&p, 1e-9, 100).unwrap();
        assert!((sol.primal_value - 1.0).abs() < 1e-8);
        assert!(sol.x[0].approx_eq(&CMatrix::unit(2, 2, 0, 0), 1e-6));
        assert!(sol.gap() <= 1e-6 * (1.0 + sol.primal_value.abs()));
    }

    // Brute force over pure qubit states on a Bloch-sphere grid. With a single
    // positive-definite constraint the optimum is a rescaled pure state.
    fn bloch_search(c: &CMatrix, a2: &CMatrix, b2: f64) -> f64 {
        let paulis = [
            CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            CMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 1) => C64::new(0.0, -1.0),
                (1, 0) => C64::new(0.0, 1.0),
                _ => ZERO,
            }),
            CMatrix::diag_real(&[1.0, -1.0]),
        ];
        let mut best = f64::NEG_INFINITY;
        let steps = 400;
        for it in 0..=steps {
            let theta = std::f64::consts::PI * it as f64 / steps as f64;
            for ip in 0..2 * steps {
                let phi = std::f64::consts::PI * ip as f64 / steps as f64;
                let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
                let mut x = CMatrix::identity(2).scale_real(0.5);
                for (k, pk) in paulis.iter().enumerate() {
                    x += &pk.scale_real(0.5 * n[k]);
                }
                // the feasible point is (b2 / Tr(A2 x)) · x
                let ax = hs(a2, &x).re;
                if ax <= 1e-12 {
                    continue;
                }
                let val = hs(c, &x).re / ax * b2;
                best = best.max(val);
            }
        }
        best
    }

    #[test]
    fn random_qubit_problem_matches_bloch_search() {
        let mut rng = rng_from_seed(42);
        for _ in 0..3 {
            let c = random_hermitian(2, &mut rng);
            // A = positive definite random, so the feasible set is compact
            let g = random_hermitian(2, &mut rng);
            let a = &g.matmul(&g) + &CMatrix::identity(2).scale_real(0.5);
            let p = SdpProblem::dense(c.clone(), vec![(a.clone(), 1.0)]).unwrap();
            let sol = sdp_solve(&p, 1e-9, 100).unwrap();
            let oracle = bloch_search(&c, &a, 1.0);
            assert!((sol.primal_value - oracle).abs() < 1e-4, "{} vs {}", sol.primal_value, oracle);
        }
    }

    #[test]
    fn complex_equality_builder() {
        // maximize Re X[0,1] s.t. X[0,0] = 1, X[1,1] = 1 → optimum 1 at X = [[1,1],[1,1]]
        let mut p = SdpProblem::new(vec![2]);
        let mut c = CMatrix::zeros(2, 2);
        c[(0, 1)] = r(0.5);
        c[(1, 0)] = r(0.5);
        p.set_objective(0, c);
        p.add_complex_equality(&[(0, 0, 0, ONE)], ONE, true);
        p.add_complex_equality(&[(0, 1, 1, ONE)], ONE, true);
        let sol = sdp_solve(&p, 1e-9, 100).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_value - 1.0).abs() < 1e-7);
        // fix an off-diagonal entry to a complex value and read it back
        let mut p = SdpProblem::new(vec![2]);
        p.add_complex_equality(&[(0, 0, 0, ONE)], ONE, true);
        p.add_complex_equality(&[(0, 1, 1, ONE)], ONE, true);
        p.add_complex_equality(&[(0, 0, 1, ONE)], C64::new(0.3, -0.4), false);
        let sol = sdp_solve(&p, 1e-9, 100).unwrap();
        assert!((sol.x[0][(0, 1)] - C64::new(0.3, -0.4)).norm() < 1e-7);
        assert!((sol.x[0][(1, 0)] - C64::new(0.3, 0.4)).norm() < 1e-7);
    }

    #[test]
    fn rejects_malformed_problems() {
        let mut bad = CMatrix::identity(2);
        bad[(0, 1)] = ONE;
        assert!(SdpProblem::dense(bad, vec![]).is_err());
        assert!(SdpProblem::dense(CMatrix::identity(2), vec![(CMatrix::identity(3), 1.0)]).is_err());
    }

    #[test]
    fn max_iter_is_reported() {
        let p = SdpProblem::dense(CMatrix::identity(3), vec![(CMatrix::identity(3), 1.0)]).unwrap();
        let sol = sdp_solve(&p, 1e-12, 2).unwrap();
        assert_eq!(sol.status, SdpStatus::MaxIter);
        assert_eq!(sol.iterations, 2);
    }
}
