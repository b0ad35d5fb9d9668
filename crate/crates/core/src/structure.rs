//! Conjoined bases, disconjugacy, controllability and the quadratic functional.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, hermitian_eigen, hermitian_part, identity, inverse, max_abs, pinv_with, qr, singular_values,
    rank_kernel, zeros, ComplexMatrix, ComplexVector, C64,
};
use crate::propagation::{semi_inner, MatrixSolution};
use crate::system::SymplecticSystem;
use crate::tolerances;

/// A `2n x n` solution of rank `n` with `Z^* J Z = 0`, certified at `k0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjoinedBasis {
    pub solution: MatrixSolution,
    pub k0: usize,
}

fn real_lambda(lambda: C64) -> bool {
    lambda.im.abs() <= tolerances::RESIDUAL * (1.0 + lambda.re.abs())
}

/// Conjoined-basis test at `k = 0`. The columns must number exactly `n`.
pub fn is_conjoined_basis(j: &ComplexMatrix, z: &MatrixSolution) -> Result<bool> {
    is_conjoined_at(j, z, 0)
}

pub fn is_conjoined_at(j: &ComplexMatrix, z: &MatrixSolution, k: usize) -> Result<bool> {
    let n = j.nrows() / 2;
    if z.is_empty() || z.at(k).nrows() != 2 * n {
        return Err(Error::DimensionMismatch("basis rows must equal 2n".into()));
    }
    if z.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "a conjoined basis has n = {n} columns, got {}",
            z.cols()
        )));
    }
    if !real_lambda(z.lambda) {
        return Ok(false);
    }
    let zk = z.at(k);
    let rank = rank_kernel(zk, tolerances::RANK)?.rank;
    let scale = zk.norm().powi(2).max(f64::MIN_POSITIVE);
    let lagrangian = max_abs(&(zk.adjoint() * j * zk)) <= tolerances::RESIDUAL * scale;
    Ok(rank == n && lagrangian)
}

/// `first_0^* J second_0 = I`.
pub fn is_normalized_pair(j: &ComplexMatrix, first: &MatrixSolution, second: &MatrixSolution) -> bool {
    if first.is_empty() || second.is_empty() || first.cols() != second.cols() {
        return false;
    }
    let w = first.at(0).adjoint() * j * second.at(0);
    let scale = 1.0 + first.at(0).norm() * second.at(0).norm();
    max_abs(&(w - identity(first.cols()))) <= tolerances::RESIDUAL * scale
}

/// Largest deviation of `first_k^* J second_k` from its value at `k = 0`.
pub fn wronskian_drift(j: &ComplexMatrix, first: &MatrixSolution, second: &MatrixSolution) -> f64 {
    let w0 = first.at(0).adjoint() * j * second.at(0);
    first
        .values
        .iter()
        .zip(&second.values)
        .map(|(a, b)| max_abs(&(a.adjoint() * j * b - &w0)))
        .fold(0.0, f64::max)
}

/// Per-step outcome of the disconjugacy test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepWitness {
    pub k: usize,
    pub kernel_ok: bool,
    pub psd_ok: bool,
    /// Smallest eigenvalue of the Hermitian part of `-X_{k+1} X_k^+ B_k`.
    pub min_eigenvalue: f64,
    /// Condition number of `X_k`; `None` when singular.
    pub condition: Option<f64>,
}

impl StepWitness {
    pub fn ok(&self) -> bool {
        self.kernel_ok && self.psd_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisconjugacyReport {
    pub disconjugate: bool,
    pub nu: f64,
    pub window: (usize, usize),
    /// First failing step met while propagating backward from `N`.
    pub first_failure: Option<usize>,
    pub witness: Vec<StepWitness>,
    pub tolerance: f64,
}

/// `X_k`, `X_{k+1}` with the norms of the full blocks `Z_k`, `Z_{k+1}`, which
/// set the scale of rank decisions.
struct LocalStep {
    x: ComplexMatrix,
    x_next: ComplexMatrix,
    z_norm: f64,
    z_next_norm: f64,
}

/// Principal solution at `N` in orthonormalized form: with `Z_{k+1} = Q_{k+1} H`
/// and `Z_k = S_k(nu) Q_{k+1} H`, returns `(X-block of S_k Q_{k+1}, X-block of
/// Q_{k+1})` for `k` in `[from, N]`. The common right factor `H` changes
/// neither the kernels nor `X_{k+1} X_k^+` once `ker X_k` lies in
/// `ker X_{k+1}`, and columns growing at different rates stay resolvable.
fn principal_steps(sys: &SymplecticSystem, nu: f64, n_end: usize, from: usize) -> Vec<LocalStep> {
    let n = sys.n();
    let lambda = C64::new(nu, 0.0);
    let mut q = zeros(2 * n, n);
    q.view_mut((n, 0), (n, n)).copy_from(&(-identity(n)));
    let mut steps = Vec::with_capacity(n_end + 1 - from);
    for k in (from..=n_end).rev() {
        let y = sys.s_lambda(k, lambda) * &q;
        steps.push(LocalStep {
            x: y.rows(0, n).into_owned(),
            x_next: q.rows(0, n).into_owned(),
            z_norm: y.norm(),
            z_next_norm: q.norm(),
        });
        q = qr(&y).0;
    }
    steps.reverse();
    steps
}

fn step_witness(st: &LocalStep, b: &ComplexMatrix, k: usize) -> Result<StepWitness> {
    let (x_k, x_next) = (&st.x, &st.x_next);
    let smax = singular_values(x_k)?.first().copied().unwrap_or(0.0);
    let rtol = if smax > 0.0 {
        tolerances::RANK * st.z_norm / smax
    } else {
        1.0
    };
    let rk = rank_kernel(x_k, rtol)?;
    let kernel_ok = (0..rk.kernel.ncols()).all(|i| {
        (x_next * rk.kernel.column(i)).norm() <= tolerances::RANK * st.z_next_norm
    });
    let xp = pinv_with(x_k, rtol.min(1.0))?;
    let p = -(x_next * &xp * b);
    let values = hermitian_eigen(&hermitian_part(&p))?.values;
    let min_eigenvalue = values.first().copied().unwrap_or(0.0);
    let scale = x_next.norm() * xp.norm() * b.norm();
    let psd_ok = min_eigenvalue >= -tolerances::PSD * scale.max(f64::MIN_POSITIVE);
    let condition = if rk.rank < x_k.ncols() {
        None
    } else {
        Some(condition_number(x_k)?)
    };
    Ok(StepWitness {
        k,
        kernel_ok,
        psd_ok,
        min_eigenvalue,
        condition,
    })
}

fn witnesses(sys: &SymplecticSystem, nu: f64, from: usize, to: usize) -> Result<Vec<StepWitness>> {
    principal_steps(sys, nu, to, from)
        .iter()
        .zip(from..)
        .map(|(st, k)| step_witness(st, &sys.blocks(k).b, k))
        .collect()
}

/// Disconjugacy of the system at real `nu` on `[M, N + 1]`, tested on the
/// principal solution at `N`.
pub fn disconjugacy_check(sys: &SymplecticSystem, nu: f64, m: usize, n_end: usize) -> Result<DisconjugacyReport> {
    if m > n_end {
        return Err(Error::InvalidArgument(format!("window [{m}, {n_end}] is empty")));
    }
    if !nu.is_finite() {
        return Err(Error::InvalidArgument("nu must be finite".into()));
    }
    let witness = witnesses(sys, nu, m, n_end)?;
    let first_failure = witness.iter().rev().find(|w| !w.ok()).map(|w| w.k);
    Ok(DisconjugacyReport {
        disconjugate: first_failure.is_none(),
        nu,
        window: (m, n_end),
        first_failure,
        witness,
        tolerance: tolerances::PSD,
    })
}

/// Whether the only solution of `0 = B_k u_{k+1}`, `u_k = D_k u_{k+1}` on
/// `[from, to - 1]` is trivial.
pub fn controllability_check(sys: &SymplecticSystem, from: usize, to: usize) -> Result<bool> {
    if to <= from {
        return Err(Error::InvalidArgument(format!("interval [{from}, {to}] needs to > from")));
    }
    // Every solution is fixed by u_to; track the admissible u_to directions as
    // the current values u_{k+1}.
    let mut u = identity(sys.n());
    for k in (from..to).rev() {
        let blocks = sys.blocks(k);
        let constraint = &blocks.b * &u;
        let kernel = if max_abs(&constraint) <= tolerances::RANK * blocks.b.norm().max(1.0) * u.norm() {
            identity(u.ncols())
        } else {
            rank_kernel(&constraint, tolerances::RANK)?.kernel
        };
        if kernel.ncols() == 0 {
            return Ok(true);
        }
        u = &blocks.d * (&u * kernel);
        for mut col in u.column_iter_mut() {
            let s = col.norm();
            if s > 0.0 {
                col.scale_mut(1.0 / s);
            }
        }
    }
    Ok(false)
}

fn first_block_defect(sys: &SymplecticSystem, z: &[ComplexVector], k: usize) -> f64 {
    let n = sys.n();
    let bl = sys.blocks(k);
    let x = z[k].rows(0, n);
    let x1 = z[k + 1].rows(0, n);
    let u1 = z[k + 1].rows(n, n);
    let r = x - &bl.a * x1 - &bl.b * u1;
    r.norm() / (1.0 + z[k].norm() + z[k + 1].norm())
}

/// First `k` in `[a, b]` violating `x_k = A_k x_{k+1} + B_k u_{k+1}`.
pub fn admissibility_violation(sys: &SymplecticSystem, z: &[ComplexVector], range: (usize, usize)) -> Result<Option<usize>> {
    let (a, b) = range;
    if a > b || b + 1 >= z.len() {
        return Err(Error::RangeMismatch { a, b, len: z.len() });
    }
    Ok((a..=b).find(|&k| first_block_defect(sys, z, k) > tolerances::RESIDUAL))
}

pub fn is_admissible(sys: &SymplecticSystem, z: &[ComplexVector], range: (usize, usize)) -> Result<bool> {
    Ok(admissibility_violation(sys, z, range)?.is_none())
}

/// Forcing `f_0 ..= f_K` that turns an admissible `z` into a solution of the
/// forced relation at `lambda`: `f_k = (W_k^{-1}(u_k - C_k x_{k+1} - D_k u_{k+1}) - lambda x_k, 0)`.
pub fn admissible_forcing(sys: &SymplecticSystem, z: &[ComplexVector], lambda: C64, horizon: usize) -> Result<Vec<ComplexVector>> {
    if let Some(k) = admissibility_violation(sys, z, (0, horizon))? {
        return Err(Error::NotAdmissible { k });
    }
    let n = sys.n();
    (0..=horizon)
        .map(|k| {
            let bl = sys.blocks(k);
            let q = z[k].rows(n, n) - &bl.c * z[k + 1].rows(0, n) - &bl.d * z[k + 1].rows(n, n);
            let fx = inverse(&bl.w)? * q - z[k].rows(0, n) * lambda;
            let mut f = ComplexVector::zeros(2 * n);
            f.rows_mut(0, n).copy_from(&fx);
            Ok(f)
        })
        .collect()
}

fn shifted(bl: &crate::system::StepBlocks, lambda: C64) -> (ComplexMatrix, ComplexMatrix) {
    let c = &bl.c + (&bl.w * &bl.a) * lambda;
    let d = &bl.d + (&bl.w * &bl.b) * lambda;
    (c, d)
}

fn check_len(z: &[ComplexVector], horizon: usize) -> Result<()> {
    if z.len() < horizon + 2 {
        return Err(Error::RangeMismatch {
            a: 0,
            b: horizon + 1,
            len: z.len(),
        });
    }
    Ok(())
}

/// Truncated quadratic functional over `[0, K]`:
/// `-sum { x+^* C(l)^* A x+ + 2 Re(x+^* C(l)^* B u+) + u+^* D(l)^* B u+ }`.
pub fn quadratic_functional(sys: &SymplecticSystem, z: &[ComplexVector], lambda: C64, horizon: usize) -> Result<C64> {
    check_len(z, horizon)?;
    let n = sys.n();
    let mut total = C64::new(0.0, 0.0);
    for k in 0..=horizon {
        let bl = sys.blocks(k);
        let (cl, dl) = shifted(&bl, lambda);
        let x1 = z[k + 1].rows(0, n);
        let u1 = z[k + 1].rows(n, n);
        let a = (x1.adjoint() * cl.adjoint() * &bl.a * x1)[(0, 0)];
        let b = (x1.adjoint() * cl.adjoint() * &bl.b * u1)[(0, 0)];
        let d = (u1.adjoint() * dl.adjoint() * &bl.b * u1)[(0, 0)];
        total -= a + C64::new(2.0 * b.re, 0.0) + d;
    }
    Ok(total)
}

/// Pieces of the reduced form of the functional on admissible sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedFunctional {
    /// `sum (u_k - C_k(l) x_{k+1} - D_k(l) u_{k+1})^* x_k`.
    pub euler_sum: C64,
    /// `u_{K+1}^* x_{K+1} - u_0^* x_0`.
    pub boundary: C64,
}

impl ReducedFunctional {
    pub fn value(&self) -> C64 {
        self.euler_sum + self.boundary
    }
}

fn euler_sum(sys: &SymplecticSystem, z: &[ComplexVector], lambda: C64, horizon: usize) -> C64 {
    let n = sys.n();
    (0..=horizon)
        .map(|k| {
            let bl = sys.blocks(k);
            let (cl, dl) = shifted(&bl, lambda);
            let e = z[k].rows(n, n) - cl * z[k + 1].rows(0, n) - dl * z[k + 1].rows(n, n);
            (e.adjoint() * z[k].rows(0, n))[(0, 0)]
        })
        .sum()
}

fn boundary_term(sys: &SymplecticSystem, z: &[ComplexVector], horizon: usize) -> C64 {
    let n = sys.n();
    let ux = |k: usize| (z[k].rows(n, n).adjoint() * z[k].rows(0, n))[(0, 0)];
    ux(horizon + 1) - ux(0)
}

/// Reduced form with the shifted coefficients `C(lambda)`, `D(lambda)`.
pub fn reduced_functional(sys: &SymplecticSystem, z: &[ComplexVector], lambda: C64, horizon: usize) -> Result<ReducedFunctional> {
    check_len(z, horizon)?;
    Ok(ReducedFunctional {
        euler_sum: euler_sum(sys, z, lambda, horizon),
        boundary: boundary_term(sys, z, horizon),
    })
}

/// Reduced form with the unshifted coefficients and an explicit
/// `-lambda <z, z>` term.
pub fn reduced_functional_split(sys: &SymplecticSystem, z: &[ComplexVector], lambda: C64, horizon: usize) -> Result<C64> {
    check_len(z, horizon)?;
    let zero = C64::new(0.0, 0.0);
    Ok(euler_sum(sys, z, zero, horizon) + boundary_term(sys, z, horizon)
        - lambda * semi_inner(sys, z, z, (0, horizon))?)
}

/// `|F_lambda(z) - F_nu(z) - (nu - lambda) <z, z>|` on `[0, K]`.
pub fn functional_shift_check(sys: &SymplecticSystem, z: &[ComplexVector], lambda: C64, nu: C64, horizon: usize) -> Result<f64> {
    check_len(z, horizon)?;
    if let Some(k) = admissibility_violation(sys, z, (0, horizon))? {
        return Err(Error::NotAdmissible { k });
    }
    let fl = quadratic_functional(sys, z, lambda, horizon)?;
    let fn_ = quadratic_functional(sys, z, nu, horizon)?;
    let ip = semi_inner(sys, z, z, (0, horizon))?;
    Ok((fl - fn_ - (nu - lambda) * ip).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub nu: f64,
    pub horizon: usize,
    /// Smallest `M` such that every window `[M, N]` with `M < N <= K` passes.
    pub first_m: Option<usize>,
    /// Always set: a finite scan cannot certify the infinite interval.
    pub inconclusive: bool,
}

/// Finite-horizon search for the start of eventual disconjugacy.
///
/// Windows have at least two steps; a one-step window `[N, N]` passes for
/// every system and carries no information.
pub fn nonoscillation_scan(sys: &SymplecticSystem, nu: f64, horizon: usize) -> Result<ScanResult> {
    if horizon < 1 {
        return Err(Error::InvalidArgument("scan horizon must be at least 1".into()));
    }
    // lowest[N] = smallest M with [M, N] passing.
    let mut lowest = vec![0usize; horizon + 1];
    for n_end in 1..=horizon {
        let steps = principal_steps(sys, nu, n_end, 0);
        let mut m = n_end + 1;
        for k in (0..=n_end).rev() {
            if !step_witness(&steps[k], &sys.blocks(k).b, k)?.ok() {
                break;
            }
            m = k;
        }
        lowest[n_end] = m;
    }
    let first_m = (0..horizon).find(|&m| ((m + 1)..=horizon).all(|n_end| lowest[n_end] <= m));
    Ok(ScanResult {
        nu,
        horizon,
        first_m,
        inconclusive: true,
    })
}
