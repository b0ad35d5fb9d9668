//! Forward and backward propagation on a finite horizon.
//!
//! The system steps from `k + 1` to `k`:
//! `z_k = S_k(lambda) z_{k+1} - J Psi_k f_k`. Forward steps invert this with
//! `S_k(lambda)^{-1} = -J S_k^*(conj lambda) J`, so no linear solve is needed.
//! Horizons are always explicit: a solution on `[0, K]` stores
//! `z_0 ..= z_{K+1}`.

use crate::error::{Error, Result};
use crate::linalg::{identity, max_abs, ComplexMatrix, ComplexVector, C64};
use crate::system::SymplecticSystem;
use crate::tolerances;

/// A vector-valued sequence `z_0 ..= z_{K+1}` with optional forcing
/// `f_0 ..= f_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSolution {
    pub lambda: C64,
    pub values: Vec<ComplexVector>,
    pub forcing: Option<Vec<ComplexVector>>,
}

impl VectorSolution {
    pub fn new(lambda: C64, values: Vec<ComplexVector>) -> Self {
        VectorSolution {
            lambda,
            values,
            forcing: None,
        }
    }

    pub fn with_forcing(mut self, forcing: Vec<ComplexVector>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn zeros(lambda: C64, dim: usize, horizon: usize) -> Self {
        VectorSolution::new(lambda, vec![ComplexVector::zeros(dim); horizon + 2])
    }

    /// `K` such that values cover `[0, K + 1]`.
    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(2)
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, |v| v.len())
    }

    pub fn x(&self, k: usize) -> ComplexVector {
        let n = self.dim() / 2;
        self.values[k].rows(0, n).into_owned()
    }

    pub fn u(&self, k: usize) -> ComplexVector {
        let n = self.dim() / 2;
        self.values[k].rows(n, n).into_owned()
    }
}

/// A matrix-valued sequence `Z_0 ..= Z_{K+1}` of `2n x m` matrices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatrixSolution {
    pub lambda: C64,
    pub values: Vec<ComplexMatrix>,
}

impl MatrixSolution {
    pub fn new(lambda: C64, values: Vec<ComplexMatrix>) -> Self {
        MatrixSolution { lambda, values }
    }

    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(2)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cols(&self) -> usize {
        self.values.first().map_or(0, |z| z.ncols())
    }

    pub fn n(&self) -> usize {
        self.values.first().map_or(0, |z| z.nrows() / 2)
    }

    pub fn at(&self, k: usize) -> &ComplexMatrix {
        &self.values[k]
    }

    /// Top `n` rows.
    pub fn x(&self, k: usize) -> ComplexMatrix {
        let n = self.n();
        self.values[k].rows(0, n).into_owned()
    }

    /// Bottom `n` rows.
    pub fn u(&self, k: usize) -> ComplexMatrix {
        let n = self.n();
        self.values[k].rows(n, n).into_owned()
    }

    pub fn column(&self, j: usize) -> VectorSolution {
        VectorSolution::new(
            self.lambda,
            self.values.iter().map(|z| z.column(j).into_owned()).collect(),
        )
    }

    /// Right multiplication of every value by a constant matrix.
    pub fn right_mul(&self, c: &ComplexMatrix) -> MatrixSolution {
        MatrixSolution::new(self.lambda, self.values.iter().map(|z| z * c).collect())
    }

    pub fn select_columns(&self, cols: &[usize]) -> MatrixSolution {
        MatrixSolution::new(
            self.lambda,
            self.values.iter().map(|z| z.select_columns(cols)).collect(),
        )
    }

    pub fn truncate(&self, horizon: usize) -> MatrixSolution {
        MatrixSolution::new(self.lambda, self.values[..(horizon + 2).min(self.len())].to_vec())
    }
}

fn forcing_term(sys: &SymplecticSystem, k: usize, f: Option<&ComplexVector>) -> Option<ComplexVector> {
    f.map(|f| sys.j() * sys.psi(k) * f)
}

/// `z_k = S_k(lambda) z_{k+1} - J Psi_k f_k`.
pub fn step_backward(
    sys: &SymplecticSystem,
    z_next: &ComplexVector,
    k: usize,
    lambda: C64,
    f: Option<&ComplexVector>,
) -> ComplexVector {
    let mut z = sys.s_lambda(k, lambda) * z_next;
    if let Some(t) = forcing_term(sys, k, f) {
        z -= t;
    }
    z
}

/// Inverse of [`step_backward`]: `z_{k+1} = S_k(lambda)^{-1} (z_k + J Psi_k f_k)`.
pub fn step_forward(
    sys: &SymplecticSystem,
    z: &ComplexVector,
    k: usize,
    lambda: C64,
    f: Option<&ComplexVector>,
) -> ComplexVector {
    let mut rhs = z.clone();
    if let Some(t) = forcing_term(sys, k, f) {
        rhs += t;
    }
    sys.s_lambda_inverse(k, lambda) * rhs
}

fn overflowed(m: &ComplexMatrix) -> bool {
    m.iter()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()) || z.norm() > tolerances::OVERFLOW)
}

/// Propagates a matrix initial value `Z_0` forward to `Z_{K+1}`.
pub fn propagate_forward(
    sys: &SymplecticSystem,
    lambda: C64,
    z0: &ComplexMatrix,
    horizon: usize,
) -> Result<MatrixSolution> {
    let mut values = Vec::with_capacity(horizon + 2);
    values.push(z0.clone());
    for k in 0..=horizon {
        let next = sys.s_lambda_inverse(k, lambda) * &values[k];
        if overflowed(&next) {
            return Err(Error::Overflow { k: k + 1 });
        }
        values.push(next);
    }
    Ok(MatrixSolution::new(lambda, values))
}

/// Propagates a terminal value `Z_{K+1}` backward to `Z_0`.
pub fn propagate_backward(
    sys: &SymplecticSystem,
    lambda: C64,
    z_end: &ComplexMatrix,
    horizon: usize,
) -> Result<MatrixSolution> {
    let mut values = vec![z_end.clone(); horizon + 2];
    for k in (0..=horizon).rev() {
        let prev = sys.s_lambda(k, lambda) * &values[k + 1];
        if overflowed(&prev) {
            return Err(Error::Overflow { k });
        }
        values[k] = prev;
    }
    Ok(MatrixSolution::new(lambda, values))
}

/// `Phi_0 = I`, `Phi_{k+1} = S_k(lambda)^{-1} Phi_k` for `k <= K`.
pub fn fundamental_matrix(sys: &SymplecticSystem, lambda: C64, horizon: usize) -> Result<MatrixSolution> {
    propagate_forward(sys, lambda, &identity(2 * sys.n()), horizon)
}

/// Solves the forced system forward from `z_0` with forcing `f_0 ..= f_K`.
pub fn solve_forced(
    sys: &SymplecticSystem,
    lambda: C64,
    z0: &ComplexVector,
    forcing: &[ComplexVector],
) -> Result<VectorSolution> {
    let mut values = Vec::with_capacity(forcing.len() + 1);
    values.push(z0.clone());
    for (k, f) in forcing.iter().enumerate() {
        let next = step_forward(sys, &values[k], k, lambda, Some(f));
        if next.iter().any(|z| !z.re.is_finite() || z.norm() > tolerances::OVERFLOW) {
            return Err(Error::Overflow { k: k + 1 });
        }
        values.push(next);
    }
    Ok(VectorSolution::new(lambda, values).with_forcing(forcing.to_vec()))
}

/// `sum_{k=a}^{b} z_k^* Psi_k w_k`.
pub fn semi_inner(
    sys: &SymplecticSystem,
    z: &[ComplexVector],
    w: &[ComplexVector],
    range: (usize, usize),
) -> Result<C64> {
    let (a, b) = range;
    let len = z.len().min(w.len());
    if a > b || b >= len {
        return Err(Error::RangeMismatch { a, b, len });
    }
    Ok((a..=b)
        .map(|k| {
            let n = sys.n();
            let w_k = sys.blocks(k).w;
            let xz = z[k].rows(0, n);
            let xw = w[k].rows(0, n);
            (xz.adjoint() * w_k * xw)[(0, 0)]
        })
        .sum())
}

/// Per-step relative residuals of `J (z_k - S_k z_{k+1}) = Psi_k (lambda z_k + f_k)`
/// for `k = 0 ..= K`, each divided by `1 + |z_k|`.
pub fn relation_residuals(
    sys: &SymplecticSystem,
    z: &[ComplexVector],
    f: &[ComplexVector],
    lambda: C64,
) -> Result<Vec<f64>> {
    if z.len() < 2 || f.len() + 1 < z.len() {
        return Err(Error::DimensionMismatch(format!(
            "need z on [0, K+1] and f on [0, K]; got {} and {} entries",
            z.len(),
            f.len()
        )));
    }
    let j = sys.j();
    Ok((0..z.len() - 1)
        .map(|k| {
            let st = sys.step(k);
            let lhs = j * (&z[k] - &st.s * &z[k + 1]);
            let rhs = &st.psi * (&z[k] * lambda + &f[k]);
            let scale = 1.0 + z[k].norm() + (&st.psi * &f[k]).norm();
            (lhs - rhs).norm() / scale
        })
        .collect())
}

/// `w^* J z`.
pub fn wronskian(j: &ComplexMatrix, w: &ComplexVector, z: &ComplexVector) -> C64 {
    (w.adjoint() * j * z)[(0, 0)]
}

/// Discrepancy of the summed Lagrange identity at `lambda = 0`:
///
/// `sum_{k=0}^{K} (w_k^* Psi_k f_k - g_k^* Psi_k z_k) = w_0^* J z_0 - w_{K+1}^* J z_{K+1}`.
///
/// Both pairs must satisfy the relation `L(z) = Psi f` to [`tolerances::RESIDUAL`].
pub fn lagrange_check(
    sys: &SymplecticSystem,
    (z, f): (&[ComplexVector], &[ComplexVector]),
    (w, g): (&[ComplexVector], &[ComplexVector]),
    horizon: usize,
) -> Result<f64> {
    let need = horizon + 2;
    if z.len() < need || w.len() < need || f.len() < need - 1 || g.len() < need - 1 {
        return Err(Error::RangeMismatch {
            a: 0,
            b: horizon + 1,
            len: z.len().min(w.len()),
        });
    }
    let zero = C64::new(0.0, 0.0);
    for (seq, forcing) in [(z, f), (w, g)] {
        let res = relation_residuals(sys, &seq[..need], &forcing[..need - 1], zero)?;
        if let Some((k, &r)) = res
            .iter()
            .enumerate()
            .find(|(_, &r)| r > tolerances::RESIDUAL)
        {
            return Err(Error::NotASolution { k, residual: r });
        }
    }
    let lhs = semi_inner(sys, w, f, (0, horizon))? - semi_inner(sys, g, z, (0, horizon))?;
    let j = sys.j();
    let rhs = wronskian(j, &w[0], &z[0]) - wronskian(j, &w[horizon + 1], &z[horizon + 1]);
    Ok((lhs - rhs).norm())
}

/// Largest deviation of `Phi_k^*(conj lambda) J Phi_k(lambda)` from `J` over
/// the computed horizon.
pub fn symplectic_defect(sys: &SymplecticSystem, lambda: C64, horizon: usize) -> Result<f64> {
    let phi = fundamental_matrix(sys, lambda, horizon)?;
    let phib = fundamental_matrix(sys, lambda.conj(), horizon)?;
    let j = sys.j();
    Ok(phi
        .values
        .iter()
        .zip(&phib.values)
        .map(|(p, pb)| max_abs(&(pb.adjoint() * j * p - j)))
        .fold(0.0, f64::max))
}
