//! Recessive solutions, the Lambda accumulation and the associated dominant
//! solution.
//!
//! Principal solutions `Z^(N)` with `Z_{N+1} = (0; -I)` converge to the
//! recessive solution, but only like `(Lambda_{N+1})^{-1}`. When the system is
//! eventually close to a constant one this is `1 / N`, far too slow for raw
//! anchor comparison. Normalized at `m`, the approximants satisfy
//! `Z^(N) = Z~ - Z' (t I + R)^{-1}` with `t = N + 1` up to terms that vanish
//! with `Lambda`'s deviation from an affine function of `t`. Three anchors fix
//! `Z~`, `Z'` and `R`; a fourth one measures the error. Raw anchors are kept as
//! the alternative for geometric convergence, and the smaller error estimate
//! wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, hermitian_eigen, hermitian_part, identity, inverse, max_abs, pinv_with, qr,
    zeros, ComplexMatrix, ComplexVector, C64,
};
use crate::propagation::{propagate_backward, MatrixSolution, VectorSolution};
use crate::structure::{admissible_forcing, controllability_check, disconjugacy_check, ConjoinedBasis};
use crate::system::SymplecticSystem;
use crate::tolerances;

/// `Z_{N+1} = (0; -I)` propagated backward to `k = 0`, unscaled.
pub fn principal_at(sys: &SymplecticSystem, nu: f64, n_end: usize) -> Result<MatrixSolution> {
    propagate_backward(sys, C64::new(nu, 0.0), &terminal(sys.n()), n_end)
}

fn terminal(n: usize) -> ComplexMatrix {
    let mut z = zeros(2 * n, n);
    z.view_mut((n, 0), (n, n)).copy_from(&(-identity(n)));
    z
}

/// Orthonormalized backward sweep: `Q_k R_k = S_k(nu) Q_{k+1}`, so the
/// principal solution is `Q_k R_k R_{k+1} ... R_N`.
struct Sweep {
    q: Vec<ComplexMatrix>,
    r: Vec<ComplexMatrix>,
}

fn principal_sweep(sys: &SymplecticSystem, nu: f64, n_end: usize) -> Sweep {
    let lambda = C64::new(nu, 0.0);
    let mut q = vec![zeros(0, 0); n_end + 2];
    let mut r = vec![zeros(0, 0); n_end + 1];
    q[n_end + 1] = terminal(sys.n());
    for k in (0..=n_end).rev() {
        let (qk, rk) = qr(&(sys.s_lambda(k, lambda) * &q[k + 1]));
        q[k] = qk;
        r[k] = rk;
    }
    Sweep { q, r }
}

fn top(z: &ComplexMatrix) -> ComplexMatrix {
    let n = z.nrows() / 2;
    z.rows(0, n).into_owned()
}

/// Smallest `k` in `[0, N]` where the top block of the principal subspace at
/// `N` has condition number at most [`tolerances::NORMALIZATION_COND`].
pub fn choose_normalization_point(sys: &SymplecticSystem, nu: f64, n_end: usize) -> Result<usize> {
    let sweep = principal_sweep(sys, nu, n_end);
    for k in 0..=n_end {
        let c = condition_number(&top(&sweep.q[k]))?;
        if c.is_finite() && c <= tolerances::NORMALIZATION_COND {
            return Ok(k);
        }
    }
    Err(Error::SingularX { k: n_end })
}

/// Principal solution at `N` normalized so that `X_m = I`, extended forward
/// past `N + 1` up to `len - 1`.
fn normalized_principal(
    sys: &SymplecticSystem,
    nu: f64,
    n_end: usize,
    m: usize,
    len: usize,
) -> Result<MatrixSolution> {
    if m > n_end {
        return Err(Error::InvalidArgument(format!(
            "normalization point {m} lies beyond anchor {n_end}"
        )));
    }
    let sweep = principal_sweep(sys, nu, n_end);
    let xm = top(&sweep.q[m]);
    let c = condition_number(&xm)?;
    if !c.is_finite() || c > 1.0 / f64::EPSILON {
        return Err(Error::SingularX { k: m });
    }
    let norm = inverse(&xm)?;
    let n = sys.n();
    let mut h = vec![identity(n); n_end + 2];
    for k in (0..m).rev() {
        h[k] = &sweep.r[k] * &h[k + 1];
    }
    for k in m..=n_end {
        let next = sweep.r[k]
            .clone()
            .solve_upper_triangular(&h[k])
            .ok_or_else(|| Error::Singular(format!("R_{k} in the principal sweep")))?;
        h[k + 1] = next;
    }
    let mut values: Vec<ComplexMatrix> = (0..=n_end + 1)
        .map(|k| &sweep.q[k] * &h[k] * &norm)
        .collect();
    let lambda = C64::new(nu, 0.0);
    for k in n_end + 1..len.saturating_sub(1) {
        let next = sys.s_lambda_inverse(k, lambda) * &values[k];
        if max_abs(&next) > tolerances::OVERFLOW || !crate::linalg::is_finite(&next) {
            return Err(Error::Overflow { k: k + 1 });
        }
        values.push(next);
    }
    values.truncate(len.max(1));
    Ok(MatrixSolution::new(lambda, values))
}

/// Which approximation produced the recessive candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extrapolation {
    /// Normalized principal solution at the largest anchor.
    Raw,
    /// Rational fit in `t = N + 1` across the last three anchors.
    Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecessiveResult {
    pub nu: f64,
    pub basis: ConjoinedBasis,
    pub m: usize,
    /// Anchors actually used, ascending.
    pub anchors: Vec<usize>,
    /// Relative discrepancy on `[0, m]` between successive raw anchors.
    pub history: Vec<f64>,
    pub method: Extrapolation,
    /// Relative error estimate of the candidate on `[0, m]`.
    pub error_estimate: f64,
    /// Relative error estimate at every `k` of the candidate.
    pub error_trace: Vec<f64>,
    /// Largest `K` with the estimate below the tolerance on all of `[0, K]`.
    pub reliable_horizon: usize,
    pub condition_at_m: f64,
    /// `lambda_min(Lambda_k)` for `k` in `[m, reliable_horizon]`.
    pub lambda_min_trace: Vec<f64>,
}

impl RecessiveResult {
    pub fn solution(&self) -> &MatrixSolution {
        &self.basis.solution
    }
}

fn relative_gap(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(f64::MIN_POSITIVE)
}

fn gap_trace(a: &MatrixSolution, b: &MatrixSolution) -> Vec<f64> {
    a.values.iter().zip(&b.values).map(|(x, y)| relative_gap(x, y)).collect()
}

/// Fits `A(t) = Z~ - Z' (t I + R)^{-1}` through three normalized approximants
/// and returns `Z~`.
fn rational_fit(
    approx: [&MatrixSolution; 3],
    t: [f64; 3],
    fit_rows: usize,
) -> Option<MatrixSolution> {
    let [a1, a2, a3] = approx;
    let [t1, t2, t3] = t;
    let n = a1.cols();
    let rows = fit_rows.min(a1.len());
    let stack = |x: &MatrixSolution, y: &MatrixSolution| {
        let mut s = zeros(2 * n * rows, n);
        for k in 0..rows {
            s.view_mut((2 * n * k, 0), (2 * n, n))
                .copy_from(&(x.at(k) - y.at(k)));
        }
        s
    };
    let d12 = stack(a1, a2);
    let d23 = stack(a2, a3);
    let c = (t2 - t3) / (t1 - t2);
    let tm = pinv_with(&d12, tolerances::RANK).ok()? * (d23 / C64::new(c, 0.0));
    let eye = identity(n);
    let r = inverse(&(&tm - &eye)).ok()? * (&eye * C64::new(t1, 0.0) - &tm * C64::new(t3, 0.0));
    let shift = |s: f64| &r + &eye * C64::new(s, 0.0);
    let f_inv = shift(t1) * shift(t2) / C64::new(t1 - t2, 0.0);
    let back = inverse(&shift(t3)).ok()?;
    let values: Vec<ComplexMatrix> = (0..a1.len())
        .map(|k| a3.at(k) + (a1.at(k) - a2.at(k)) * &f_inv * &back)
        .collect();
    if values.iter().all(crate::linalg::is_finite) {
        Some(MatrixSolution::new(a1.lambda, values))
    } else {
        None
    }
}

/// Recessive solution at real `nu` from principal solutions at `anchors`,
/// normalized at `m` (chosen automatically when `None`).
pub fn recessive_solution(
    sys: &SymplecticSystem,
    nu: f64,
    anchors: &[usize],
    m: Option<usize>,
) -> Result<RecessiveResult> {
    let mut anchors: Vec<usize> = anchors.to_vec();
    anchors.sort_unstable();
    anchors.dedup();
    let Some(&n_max) = anchors.last() else {
        return Err(Error::NotConverged {
            history: Vec::new(),
            last: f64::INFINITY,
        });
    };
    let m = match m {
        Some(m) => m,
        None => choose_normalization_point(sys, nu, anchors[0])?,
    };
    if anchors[0] <= m {
        return Err(Error::InvalidArgument(format!(
            "anchors must exceed the normalization point {m}"
        )));
    }
    if anchors.len() == 1 {
        return Err(Error::NotConverged {
            history: Vec::new(),
            last: f64::INFINITY,
        });
    }
    if anchors.len() == 3 {
        let (a, b) = (anchors[1], anchors[2]);
        if b - a >= 2 {
            anchors.insert(2, (a + b) / 2);
        }
    }
    if !controllability_check(sys, m, n_max)? {
        return Err(Error::NotControllable { from: m, to: n_max });
    }
    for &n_end in &anchors {
        let rep = disconjugacy_check(sys, nu, m, n_end)?;
        if let Some(k) = rep.first_failure {
            return Err(Error::Oscillatory(format!(
                "disconjugacy fails on [{m}, {n_end}] at k = {k}"
            )));
        }
    }

    let len = n_max + 2;
    let approx: Vec<MatrixSolution> = anchors
        .iter()
        .map(|&n_end| normalized_principal(sys, nu, n_end, m, len))
        .collect::<Result<_>>()?;
    let r = approx.len();
    let history: Vec<f64> = approx
        .windows(2)
        .map(|w| (0..=m).map(|k| relative_gap(w[1].at(k), w[0].at(k))).fold(0.0, f64::max))
        .collect();

    let on_head = |trace: &[f64]| trace[..=m].iter().copied().fold(0.0, f64::max);
    let raw_trace = gap_trace(&approx[r - 1], &approx[r - 2]);
    let mut best = (Extrapolation::Raw, approx[r - 1].clone(), raw_trace);

    if r >= 4 {
        let t = |i: usize| (anchors[i] + 1) as f64;
        let fit_rows = anchors[0] + 2;
        let newer = rational_fit(
            [&approx[r - 3], &approx[r - 2], &approx[r - 1]],
            [t(r - 3), t(r - 2), t(r - 1)],
            fit_rows,
        );
        let older = rational_fit(
            [&approx[r - 4], &approx[r - 3], &approx[r - 2]],
            [t(r - 4), t(r - 3), t(r - 2)],
            fit_rows,
        );
        if let (Some(a), Some(b)) = (newer, older) {
            let trace = gap_trace(&a, &b);
            if on_head(&trace) < on_head(&best.2) {
                best = (Extrapolation::Rational, a, trace);
            }
        }
    }

    let (method, candidate, error_trace) = best;
    let error_estimate = on_head(&error_trace);
    if error_estimate.is_nan() || error_estimate > tolerances::RECESSIVE {
        let mut history = history;
        history.push(error_estimate);
        return Err(Error::NotConverged {
            history,
            last: error_estimate,
        });
    }
    let reliable_horizon = error_trace
        .iter()
        .position(|&e| e.is_nan() || e > tolerances::RECESSIVE)
        .map_or(len - 1, |p| p.saturating_sub(1))
        .max(m);
    let condition_at_m = condition_number(&top(candidate.at(m)))?;
    let lambda_min_trace = lambda_min_trace(sys, &candidate, m, reliable_horizon).unwrap_or_default();
    Ok(RecessiveResult {
        nu,
        basis: ConjoinedBasis {
            solution: candidate,
            k0: m,
        },
        m,
        anchors,
        history,
        method,
        error_estimate,
        error_trace,
        reliable_horizon,
        condition_at_m,
        lambda_min_trace,
    })
}

/// `X^{-1}` through the column-equilibrated `X D^{-1}`, so columns decaying
/// at different rates do not read as singular.
fn scaled_inverse(x: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::SingularX { k });
    }
    let mut scaled = x.clone();
    for (mut c, &v) in scaled.column_iter_mut().zip(&norms) {
        c.unscale_mut(v);
    }
    let mut inv = inverse(&scaled).map_err(|_| Error::SingularX { k })?;
    for (mut r, &v) in inv.row_iter_mut().zip(&norms) {
        r.unscale_mut(v);
    }
    Ok(inv)
}

fn lambda_term(sys: &SymplecticSystem, z: &MatrixSolution, j: usize) -> Result<ComplexMatrix> {
    let xj = scaled_inverse(&z.x(j), j)?;
    let xj1 = scaled_inverse(&z.x(j + 1), j + 1)?.adjoint();
    Ok(-(xj * &sys.blocks(j).b * xj1))
}

/// `Lambda_k = sum_{j=k0}^{k-1} -X_j^{-1} B_j X_{j+1}^{*-1}`.
pub fn lambda_accum(sys: &SymplecticSystem, z: &MatrixSolution, k0: usize, k: usize) -> Result<ComplexMatrix> {
    if k < k0 || k >= z.len() {
        return Err(Error::RangeMismatch {
            a: k0,
            b: k,
            len: z.len(),
        });
    }
    let n = z.n();
    (k0..k).try_fold(zeros(n, n), |acc, j| Ok(acc + lambda_term(sys, z, j)?))
}

/// `lambda_min(Lambda_k)` for `k = k0 ..= K`.
pub fn lambda_min_trace(sys: &SymplecticSystem, z: &MatrixSolution, k0: usize, horizon: usize) -> Result<Vec<f64>> {
    if horizon >= z.len() || horizon < k0 {
        return Err(Error::RangeMismatch {
            a: k0,
            b: horizon,
            len: z.len(),
        });
    }
    let n = z.n();
    let mut acc = zeros(n, n);
    let mut trace = vec![0.0];
    for j in k0..horizon {
        acc += lambda_term(sys, z, j)?;
        let eig = hermitian_eigen(&hermitian_part(&acc))?;
        trace.push(eig.values[0]);
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecessiveCertificate {
    pub ok: bool,
    /// Every Lambda summand is PSD, so the trace never decreases.
    pub monotone: bool,
    /// Monotone but still below the threshold at the horizon.
    pub inconclusive: bool,
    pub threshold: f64,
    pub horizon: usize,
    pub lambda_min_trace: Vec<f64>,
}

/// Finite-horizon proxy for `lambda_min(Lambda_k) -> infinity`, for any
/// candidate basis with `X` invertible on `[k0, K + 1]`.
pub fn certify_basis(sys: &SymplecticSystem, z: &MatrixSolution, k0: usize, horizon: usize) -> Result<RecessiveCertificate> {
    let n = z.n();
    let mut monotone = true;
    let mut acc = zeros(n, n);
    let mut trace = vec![0.0];
    for j in k0..horizon {
        let term = lambda_term(sys, z, j)?;
        let scale = max_abs(&term).max(f64::MIN_POSITIVE);
        let values = hermitian_eigen(&hermitian_part(&term))?.values;
        if values[0] < -tolerances::PSD * scale {
            monotone = false;
        }
        acc += term;
        trace.push(hermitian_eigen(&hermitian_part(&acc))?.values[0]);
    }
    let last = *trace.last().unwrap_or(&0.0);
    let above = last > tolerances::LAMBDA_BIG;
    Ok(RecessiveCertificate {
        ok: monotone && above,
        monotone,
        inconclusive: monotone && !above,
        threshold: tolerances::LAMBDA_BIG,
        horizon,
        lambda_min_trace: trace,
    })
}

pub fn recessive_certificate(sys: &SymplecticSystem, result: &RecessiveResult, horizon: usize) -> Result<RecessiveCertificate> {
    certify_basis(sys, result.solution(), result.m, horizon.min(result.reliable_horizon))
}

/// Companion `Z^` of a recessive basis with `X^_{k0} = 0` and `Z~^* J Z^ = I`:
/// `X^_k = X~_k Lambda_k`, `U^_k = U~_k Lambda_k + X~_k^{*-1}`.
pub fn dominant_solution(sys: &SymplecticSystem, z: &MatrixSolution, k0: usize) -> Result<MatrixSolution> {
    let n = z.n();
    if k0 >= z.len() {
        return Err(Error::RangeMismatch {
            a: k0,
            b: k0,
            len: z.len(),
        });
    }
    let xinv = inverse(&z.x(k0).adjoint()).map_err(|_| Error::SingularX { k: k0 })?;
    let mut start = zeros(2 * n, n);
    start.view_mut((n, 0), (n, n)).copy_from(&xinv);
    let lambda = z.lambda;
    let mut values = vec![zeros(2 * n, n); z.len()];
    values[k0] = start;
    for k in (0..k0).rev() {
        values[k] = sys.s_lambda(k, lambda) * &values[k + 1];
    }
    for k in k0..z.len() - 1 {
        let next = sys.s_lambda_inverse(k, lambda) * &values[k];
        if max_abs(&next) > tolerances::OVERFLOW {
            return Err(Error::Overflow { k: k + 1 });
        }
        values[k + 1] = next;
    }
    let dom = MatrixSolution::new(lambda, values);
    let w = z.at(k0).adjoint() * sys.j() * dom.at(k0);
    let defect = max_abs(&(w - identity(n)));
    if defect > tolerances::RESIDUAL * (1.0 + z.at(k0).norm() * dom.at(k0).norm()) {
        return Err(Error::NotRecessive(format!("companion not normalized (defect {defect:.3e})")));
    }
    Ok(dom)
}

/// Zero on `[0, a]`, equal to `z` on `[b + 1, K + 1]`, and patched on
/// `(a, b]`: `x` interpolates linearly towards `x_b`, `u` follows from the
/// first block equation where `B_k` is invertible and is zero elsewhere.
///
/// When the patch is admissible the forcing `f` with `L(z) = Psi f` is
/// attached, so that `(z, f)` lies in the maximal relation. Beyond `b` it is
/// `lambda x_k` (plus the forcing of `z`, if any).
pub fn trivialize(sys: &SymplecticSystem, z: &VectorSolution, a: usize, b: usize) -> Result<VectorSolution> {
    let len = z.values.len();
    if a >= b || b + 1 >= len {
        return Err(Error::RangeMismatch { a, b, len });
    }
    let n = sys.n();
    let dim = 2 * n;
    let mut values = vec![ComplexVector::zeros(dim); len];
    values[b + 1..].clone_from_slice(&z.values[b + 1..]);
    let xb = z.x(b);
    for k in a + 1..=b {
        let s = (k - a) as f64 / (b - a) as f64;
        values[k].rows_mut(0, n).copy_from(&(&xb * C64::new(s, 0.0)));
    }
    for k in a..b {
        let bl = sys.blocks(k);
        let x = values[k].rows(0, n).into_owned();
        let x1 = values[k + 1].rows(0, n).into_owned();
        let u1 = match inverse(&bl.b) {
            Ok(binv) => binv * (x - &bl.a * x1),
            Err(_) => ComplexVector::zeros(n),
        };
        values[k + 1].rows_mut(n, n).copy_from(&u1);
    }
    let horizon = len - 2;
    let out = VectorSolution::new(z.lambda, values);
    let Ok(mut f) = admissible_forcing(sys, &out.values, C64::new(0.0, 0.0), horizon) else {
        return Ok(out);
    };
    // Past the patch `z` solves the system at its own lambda, so the forcing
    // is known exactly; recomputing it through W^{-1} would amplify rounding.
    for k in b + 1..=horizon {
        let mut fk = ComplexVector::zeros(dim);
        fk.rows_mut(0, n).copy_from(&(z.x(k) * z.lambda));
        if let Some(g) = &z.forcing {
            fk += &g[k];
        }
        f[k] = fk;
    }
    Ok(out.with_forcing(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_matrix};
    use crate::propagation::relation_residuals;
    use crate::structure::{is_conjoined_basis, is_normalized_pair, wronskian_drift};
    use crate::system::examples::{e1, e2};

    #[test]
    fn principal_examples() {
        let sys = e1();
        let p = principal_at(&sys, 0.0, 4).unwrap();
        for k in 0..=5 {
            assert!((p.x(k)[(0, 0)] - c(5.0 - k as f64, 0.0)).norm() < 1e-14);
            assert!((p.u(k)[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-14);
        }
        assert!(is_conjoined_basis(sys.j(), &p).unwrap());
        let end = p.at(5);
        assert_eq!(max_abs(&(end.adjoint() * sys.j() * end)), 0.0);
    }

    #[test]
    fn normalized_principal_matches_direct() {
        let sys = e2();
        let direct = principal_at(&sys, -0.5, 30).unwrap();
        let norm = inverse(&direct.x(3)).unwrap();
        let scaled = normalized_principal(&sys, -0.5, 30, 3, 40).unwrap();
        for k in 0..=31 {
            assert!(relative_gap(scaled.at(k), &(direct.at(k) * &norm)) < 1e-12);
        }
        let res = (31..39)
            .map(|k| max_abs(&(scaled.at(k) - sys.s_lambda(k, c(-0.5, 0.0)) * scaled.at(k + 1))))
            .fold(0.0, f64::max);
        assert!(res < 1e-10);
    }

    #[test]
    fn e1_recessive_is_constant() {
        let sys = e1();
        let rec = recessive_solution(&sys, 0.0, &[40, 80, 160], Some(0)).unwrap();
        assert_eq!(rec.method, Extrapolation::Rational);
        for k in 0..=100 {
            assert!((rec.solution().x(k)[(0, 0)] - c(1.0, 0.0)).norm() < 1e-10);
            assert!(rec.solution().u(k)[(0, 0)].norm() < 1e-10);
        }
        assert!(rec.history.iter().all(|&h| h > 1e-4));
    }

    #[test]
    fn e1_recessive_below_spectrum_decays() {
        let sys = e1();
        let rec = recessive_solution(&sys, -1.0, &[20, 40, 80], Some(0)).unwrap();
        let mu = (3.0 - 5f64.sqrt()) / 2.0;
        let z = rec.solution();
        for k in 0..30 {
            let ratio = z.x(k + 1)[(0, 0)] / z.x(k)[(0, 0)];
            assert!((ratio - c(mu, 0.0)).norm() < 1e-9, "k={k} {ratio}");
        }
    }

    #[test]
    fn single_anchor_does_not_converge() {
        let sys = e1();
        assert!(matches!(
            recessive_solution(&sys, 0.0, &[40], Some(0)),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn oscillation_is_reported() {
        let sys = e1();
        assert!(matches!(
            recessive_solution(&sys, 5.0, &[20, 40, 80], Some(0)),
            Err(Error::Oscillatory(_))
        ));
    }

    #[test]
    fn e2_recessive_converges_rationally() {
        let sys = e2();
        let rec = recessive_solution(&sys, -0.5, &[40, 80, 160], None).unwrap();
        assert!(rec.error_estimate <= tolerances::RECESSIVE);
        let other = recessive_solution(&sys, -0.5, &[60, 120, 240], Some(rec.m)).unwrap();
        for k in 0..=40 {
            assert!(relative_gap(rec.solution().at(k), other.solution().at(k)) < 1e-7);
        }
    }

    #[test]
    fn lambda_examples() {
        let sys = e1();
        let rec = MatrixSolution::new(c(0.0, 0.0), vec![real_matrix(2, 1, &[1.0, 0.0]); 30]);
        for k in [0usize, 1, 7, 20] {
            let l = lambda_accum(&sys, &rec, 0, k).unwrap();
            assert!((l[(0, 0)] - c(k as f64, 0.0)).norm() < 1e-12);
        }
        assert_eq!(lambda_accum(&sys, &rec, 5, 5).unwrap(), zeros(1, 1));
        let singular = MatrixSolution::new(c(0.0, 0.0), vec![real_matrix(2, 1, &[0.0, 1.0]); 5]);
        assert!(matches!(
            lambda_accum(&sys, &singular, 0, 3),
            Err(Error::SingularX { k: 0 })
        ));
    }

    #[test]
    fn lambda_grows_geometrically_below_spectrum() {
        let sys = e1();
        let rec = recessive_solution(&sys, -1.0, &[20, 40, 80], Some(0)).unwrap();
        let trace = lambda_min_trace(&sys, rec.solution(), 0, 30).unwrap();
        let mu = (3.0 + 5f64.sqrt()) / 2.0;
        let ratio = trace[30] / trace[29];
        assert!((ratio - mu * mu).abs() / (mu * mu) < 1e-6, "{ratio}");
    }

    #[test]
    fn certificate_examples() {
        let sys = e1();
        let rec = MatrixSolution::new(c(0.0, 0.0), vec![real_matrix(2, 1, &[1.0, 0.0]); 110]);
        let cert = certify_basis(&sys, &rec, 0, 100).unwrap();
        assert!(cert.ok);
        for (k, v) in cert.lambda_min_trace.iter().enumerate() {
            assert!((v - k as f64).abs() < 1e-12);
        }
        let dom = MatrixSolution::new(
            c(0.0, 0.0),
            (0..110).map(|k| real_matrix(2, 1, &[k as f64, 1.0])).collect(),
        );
        let cert = certify_basis(&sys, &dom, 1, 100).unwrap();
        assert!(!cert.ok && cert.monotone);
        assert!(*cert.lambda_min_trace.last().unwrap() < 1.0);
        let short = certify_basis(&sys, &rec, 0, 5).unwrap();
        assert!(!short.ok && short.inconclusive);
    }

    #[test]
    fn dominant_examples() {
        let sys = e1();
        let rec = MatrixSolution::new(c(0.0, 0.0), vec![real_matrix(2, 1, &[1.0, 0.0]); 20]);
        let dom = dominant_solution(&sys, &rec, 0).unwrap();
        for k in 0..20 {
            assert!(relative_gap(dom.at(k), &real_matrix(2, 1, &[k as f64, 1.0])) < 1e-14);
        }
        assert!(is_normalized_pair(sys.j(), &rec, &dom));
        assert!(wronskian_drift(sys.j(), &rec, &dom) < 1e-13);
        let shifted = dominant_solution(&sys, &rec, 4).unwrap();
        for k in 0..20 {
            let diff = dom.at(k) - shifted.at(k);
            assert!(relative_gap(&diff, &real_matrix(2, 1, &[4.0, 0.0])) < 1e-14);
        }
    }

    #[test]
    fn dominant_matches_lambda_formula() {
        let sys = e2();
        let rec = recessive_solution(&sys, -0.5, &[40, 80, 160], None).unwrap();
        let z = rec.solution();
        let dom = dominant_solution(&sys, z, rec.m).unwrap();
        for k in [rec.m + 3, rec.m + 10] {
            let l = lambda_accum(&sys, z, rec.m, k).unwrap();
            assert!(relative_gap(&dom.x(k), &(z.x(k) * &l)) < 1e-10);
            let hermitian = inverse(&dom.x(k)).unwrap() * z.x(k);
            assert!(crate::linalg::hermitian_defect(&hermitian) < 1e-10);
        }
    }

    #[test]
    fn trivialize_examples() {
        let sys = e1();
        let zero = VectorSolution::zeros(c(0.0, 0.0), 2, 5);
        let t = trivialize(&sys, &zero, 0, 1).unwrap();
        assert!(t.values.iter().all(|v| v.norm() == 0.0));

        let rec = VectorSolution::new(
            c(0.0, 0.0),
            (0..7).map(|_| crate::linalg::real_vector(&[1.0, 0.0])).collect(),
        );
        let t = trivialize(&sys, &rec, 0, 1).unwrap();
        let xs: Vec<f64> = (0..7).map(|k| t.x(k)[0].re).collect();
        assert_eq!(xs, vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let f = t.forcing.clone().expect("admissible patch");
        let res = relation_residuals(&sys, &t.values, &f, c(0.0, 0.0)).unwrap();
        assert!(res.iter().all(|&r| r < 1e-14));
        let a = crate::propagation::semi_inner(&sys, &t.values, &t.values, (2, 5)).unwrap();
        let b = crate::propagation::semi_inner(&sys, &rec.values, &rec.values, (2, 5)).unwrap();
        assert_eq!(a, b);
    }
}
