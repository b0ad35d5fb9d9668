//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Matrices in this crate are small (at most a few dozen rows), so everything
//! is a plain `DMatrix<Complex64>`. The functions here add the rank, kernel
//! and definiteness decisions the rest of the crate relies on, all with
//! relative thresholds.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

const SVD_MAX_ITER: usize = 10_000;

// nalgebra's complex SVD occasionally returns factors that do not reproduce
// the input; which inputs fail depends on `eps`. One-sided Jacobi is the
// last resort.
const SVD_EPS_FACTORS: [f64; 4] = [5.0, 50.0, 500.0, 1.0];

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a matrix from real entries given in row-major order.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

/// Builds a matrix from complex entries given in row-major order.
pub fn complex_matrix(rows: usize, cols: usize, entries: &[C64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().copied())
}

pub fn real_vector(entries: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(entries.len(), entries.iter().map(|&x| c(x, 0.0)))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// The skew matrix `J = [[0, I], [-I, 0]]` of size `2n`.
pub fn j_matrix(n: usize) -> ComplexMatrix {
    let mut j = zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = c(1.0, 0.0);
        j[(n + i, i)] = c(-1.0, 0.0);
    }
    j
}

/// Assembles `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block2x2(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c_: &ComplexMatrix,
    d: &ComplexMatrix,
) -> ComplexMatrix {
    let (r, k) = a.shape();
    let mut m = zeros(r + c_.nrows(), k + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, k), b.shape()).copy_from(b);
    m.view_mut((r, 0), c_.shape()).copy_from(c_);
    m.view_mut((r, k), d.shape()).copy_from(d);
    m
}

pub fn hstack(parts: &[&ComplexMatrix]) -> ComplexMatrix {
    let rows = parts.iter().map(|p| p.nrows()).max().unwrap_or(0);
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut m = zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows, "hstack: row counts differ");
        m.view_mut((0, at), p.shape()).copy_from(*p);
        at += p.ncols();
    }
    m
}

pub fn vstack(parts: &[&ComplexMatrix]) -> ComplexMatrix {
    let cols = parts.iter().map(|p| p.ncols()).max().unwrap_or(0);
    let rows = parts.iter().map(|p| p.nrows()).sum();
    let mut m = zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        assert_eq!(p.ncols(), cols, "vstack: column counts differ");
        m.view_mut((at, 0), p.shape()).copy_from(*p);
        at += p.nrows();
    }
    m
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `|M - M*|_F / |M|_F`, zero for the zero matrix.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / scale
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn ensure_finite(m: &ComplexMatrix, what: &str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NumericFailure {
            what: format!("{what}: non-finite input"),
        })
    }
}

/// One-sided Jacobi SVD of a matrix with `rows >= cols`: thin `U`, full `V`.
fn jacobi_svd_tall(m: &ComplexMatrix) -> Option<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = identity(cols);
    let mut converged = false;
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * phase;
                        mat[(i, p)] = x * c - y * sn;
                        mat[(i, q)] = x * sn + y * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let floor = f64::EPSILON * cols as f64 * norms[order[0]];
    let mut u = zeros(rows, cols);
    let mut vs = zeros(cols, cols);
    let mut values = Vec::with_capacity(cols);
    let mut kept = vec![false; cols];
    for (j, &i) in order.iter().enumerate() {
        values.push(norms[i]);
        vs.set_column(j, &v.column(i));
        if norms[i] > floor {
            u.set_column(j, &a.column(i).unscale(norms[i]));
            kept[j] = true;
        }
    }
    // Complete U where singular values are at rounding level.
    for j in 0..cols {
        if kept[j] {
            continue;
        }
        for e in 0..rows {
            let mut col = ComplexVector::zeros(rows);
            col[e] = C64::new(1.0, 0.0);
            for i in 0..cols {
                if i != j && (kept[i] || i < j) {
                    let proj = u.column(i).dotc(&col);
                    col -= u.column(i) * proj;
                }
            }
            let nrm = col.norm();
            if nrm > 0.5 {
                u.set_column(j, &col.unscale(nrm));
                break;
            }
        }
    }
    Some((u, values, vs))
}

fn jacobi_svd(m: &ComplexMatrix) -> Option<SVD<C64, Dyn, Dyn>> {
    let tall = m.nrows() >= m.ncols();
    let (u, values, v) = if tall {
        jacobi_svd_tall(m)?
    } else {
        let (u, values, v) = jacobi_svd_tall(&m.adjoint())?;
        (v, values, u)
    };
    let k = values.len().min(u.ncols()).min(v.ncols());
    Some(SVD {
        u: Some(u.columns(0, k).into_owned()),
        v_t: Some(v.columns(0, k).adjoint()),
        singular_values: DVector::from_iterator(k, values.into_iter().take(k)),
    })
}

/// Full SVD with singular values in descending order, checked against the
/// input.
pub fn svd(m: &ComplexMatrix) -> Result<SVD<C64, Dyn, Dyn>> {
    ensure_finite(m, "svd")?;
    let tol = 1e-11 * max_abs(m) * (1 + m.nrows().max(m.ncols())) as f64;
    let orthonormal = |q: &ComplexMatrix| max_abs(&(q.adjoint() * q - identity(q.ncols()))) <= 1e-11;
    let accept = |svd: &SVD<C64, Dyn, Dyn>| {
        let (Some(u), Some(v_t)) = (&svd.u, &svd.v_t) else {
            return false;
        };
        let back = u * ComplexMatrix::from_diagonal(&svd.singular_values.map(|s| C64::new(s, 0.0))) * v_t;
        max_abs(&(back - m)) <= tol && orthonormal(u) && orthonormal(&v_t.adjoint())
    };
    let candidates = SVD_EPS_FACTORS
        .iter()
        .filter_map(|f| m.clone().try_svd(true, true, f64::EPSILON * f, SVD_MAX_ITER))
        .chain(std::iter::once_with(|| jacobi_svd(m)).flatten());
    for candidate in candidates {
        if accept(&candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::NumericFailure {
        what: "SVD did not converge".into(),
    })
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_finite(m, "singular values")?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    Ok(svd(m)?.singular_values.iter().copied().collect())
}

/// 2-norm condition number; infinite for singular or non-square input.
pub fn condition_number(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() || m.is_empty() {
        return Ok(f64::INFINITY);
    }
    let s = singular_values(m)?;
    let smin = *s.last().unwrap();
    Ok(if smin == 0.0 { f64::INFINITY } else { s[0] / smin })
}

/// Moore-Penrose inverse with the default relative cutoff [`tolerances::RANK`].
pub fn pinv(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    pinv_with(m, tolerances::RANK)
}

/// Moore-Penrose inverse; singular values below `rtol * sigma_max` are
/// treated as zero.
pub fn pinv_with(m: &ComplexMatrix, rtol: f64) -> Result<ComplexMatrix> {
    ensure_finite(m, "pinv")?;
    let (r, k) = m.shape();
    if m.is_empty() {
        return Ok(zeros(k, r));
    }
    let svd = svd(m)?;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rtol * smax;
    let mut out = zeros(k, r);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let vi = v_t.row(i).adjoint();
            let ui = u.column(i).adjoint();
            out += (vi * ui).scale(1.0 / s);
        }
    }
    Ok(out)
}

/// Numeric rank together with an orthonormal kernel basis.
#[derive(Debug, Clone)]
pub struct RankKernel {
    pub rank: usize,
    /// `cols x (cols - rank)`, orthonormal columns.
    pub kernel: ComplexMatrix,
    pub singular_values: Vec<f64>,
}

/// Rank counts singular values above `tau_rank * sigma_max`.
pub fn rank_kernel(m: &ComplexMatrix, tau_rank: f64) -> Result<RankKernel> {
    ensure_finite(m, "rank_kernel")?;
    if tau_rank <= 0.0 {
        return Err(Error::InvalidArgument("tau_rank must be positive".into()));
    }
    let (r, k) = m.shape();
    if k == 0 {
        return Ok(RankKernel {
            rank: 0,
            kernel: zeros(0, 0),
            singular_values: Vec::new(),
        });
    }
    // Pad with zero rows so the SVD returns a full right basis.
    let padded = if r < k {
        vstack(&[m, &zeros(k - r, k)])
    } else {
        m.clone()
    };
    let svd = svd(&padded)?;
    let v = svd.v_t.expect("v_t requested").adjoint();
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let cutoff = tau_rank * smax;
    let rank = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&x| x > cutoff).count()
    };
    let kernel_cols: Vec<usize> = (0..k)
        .filter(|&i| smax == 0.0 || s[i] <= cutoff)
        .collect();
    let mut kernel = zeros(k, kernel_cols.len());
    for (j, &i) in kernel_cols.iter().enumerate() {
        kernel.set_column(j, &v.column(i));
    }
    Ok(RankKernel {
        rank,
        kernel,
        singular_values: s.into_iter().take(r.min(k)).collect(),
    })
}

pub fn rank(m: &ComplexMatrix, tau_rank: f64) -> Result<usize> {
    Ok(rank_kernel(m, tau_rank)?.rank)
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    ensure_finite(m, "hermitian_eigen")?;
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eigen needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermitian_defect(m);
    if defect > tolerances::HERMITIAN {
        return Err(Error::NotHermitian { defect });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(hermitian_part(m), f64::EPSILON, SVD_MAX_ITER).ok_or_else(
        || Error::NumericFailure {
            what: "Hermitian eigen-solver did not converge".into(),
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok(HermitianEigen { values, vectors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

impl Definiteness {
    pub fn is_psd(self) -> bool {
        !matches!(self, Definiteness::Indefinite)
    }
}

/// Classifies a Hermitian matrix by its smallest eigenvalue against
/// `tau * |M|_2`.
pub fn definiteness_of(m: &ComplexMatrix, tau: f64) -> Result<Definiteness> {
    let eig = hermitian_eigen(m)?;
    Ok(classify_spectrum(&eig.values, tau))
}

/// Same classification for a spectrum that is already known.
pub fn classify_spectrum(values: &[f64], tau: f64) -> Definiteness {
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let lmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        return Definiteness::PositiveSemidefinite;
    }
    if lmin > tau * scale && lmin > 0.0 {
        Definiteness::PositiveDefinite
    } else if lmin >= -tau * scale {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Inverse of a square matrix, rejecting numerically singular input.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_finite(m, "inverse")?;
    if !m.is_square() {
        return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    if m.is_empty() {
        return Ok(zeros(0, 0));
    }
    let cond = condition_number(m)?;
    if !cond.is_finite() || cond > 1.0 / f64::EPSILON {
        return Err(Error::Singular(format!("condition number {cond:.3e}")));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("LU factorization failed".into()))
}

/// Thin QR with `R` having a nonnegative real diagonal.
pub fn qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows().min(r.ncols()) {
        let d = r[(i, i)];
        let mag = d.norm();
        if mag > 0.0 {
            let phase = d / mag;
            r.row_mut(i).iter_mut().for_each(|x| *x /= phase);
            q.column_mut(i).iter_mut().for_each(|x| *x *= phase);
        }
    }
    (q, r)
}

/// Serde adapter writing a matrix as rows of `[re, im]` pairs.
pub mod matrix_serde {
    use super::{ComplexMatrix, C64};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
        m.row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>], cols_hint: usize) -> Result<ComplexMatrix, String> {
        let cols = rows.first().map_or(cols_hint, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err("ragged matrix rows".into());
        }
        Ok(ComplexMatrix::from_fn(rows.len(), cols, |i, j| {
            C64::new(rows[i][j][0], rows[i][j][1])
        }))
    }

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Shaped {
            rows: usize,
            cols: usize,
            data: Vec<Vec<[f64; 2]>>,
        }
        Shaped {
            rows: m.nrows(),
            cols: m.ncols(),
            data: to_rows(m),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        #[derive(Deserialize)]
        struct Shaped {
            rows: usize,
            cols: usize,
            data: Vec<Vec<[f64; 2]>>,
        }
        let sh = Shaped::deserialize(d)?;
        if sh.data.len() != sh.rows {
            return Err(D::Error::custom("row count does not match data"));
        }
        let m = from_rows(&sh.data, sh.cols).map_err(D::Error::custom)?;
        if m.ncols() != sh.cols {
            return Err(D::Error::custom("column count does not match data"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn jacobi_svd_reconstructs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let mut gauss = |r: usize, c: usize| {
            ComplexMatrix::from_fn(r, c, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        };
        for (rows, cols, rank) in [(6, 3, 3), (3, 6, 3), (7, 4, 1), (4, 7, 2), (5, 5, 5), (5, 5, 0), (1, 1, 1)] {
            let m = gauss(rows, rank) * gauss(rank, cols);
            let svd = jacobi_svd(&m).unwrap();
            let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
            let s = ComplexMatrix::from_diagonal(&svd.singular_values.map(|x| C64::new(x, 0.0)));
            assert!(close(&(&u * s * &v_t), &m, 1e-13), "{rows}x{cols} rank {rank}");
            assert!(close(&(u.adjoint() * &u), &identity(u.ncols()), 1e-13));
            assert!(close(&(&v_t * v_t.adjoint()), &identity(v_t.nrows()), 1e-13));
            assert!(svd.singular_values.as_slice().windows(2).all(|w| w[0] >= w[1]));
            let nonzero = svd.singular_values.iter().filter(|&&x| x > 1e-12).count();
            assert_eq!(nonzero, rank);
        }
    }

    fn penrose_defect(m: &ComplexMatrix, p: &ComplexMatrix) -> f64 {
        let scale = 1.0 + max_abs(m) * max_abs(p);
        [
            max_abs(&(m * p * m - m)),
            max_abs(&(p * m * p - p)),
            max_abs(&((m * p).adjoint() - m * p)),
            max_abs(&((p * m).adjoint() - p * m)),
        ]
        .into_iter()
        .fold(0.0, f64::max)
            / scale
    }

    #[test]
    fn pinv_identity_zero_and_diagonal() {
        assert!(close(&pinv(&identity(3)).unwrap(), &identity(3), 1e-14));
        let z = pinv(&zeros(2, 3)).unwrap();
        assert_eq!(z.shape(), (3, 2));
        assert_eq!(max_abs(&z), 0.0);
        let d = real_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let p = pinv(&d).unwrap();
        assert!(close(&p, &real_matrix(2, 2, &[0.5, 0.0, 0.0, 0.0]), 1e-14));
        assert!(penrose_defect(&d, &p) < tolerances::PENROSE);
    }

    #[test]
    fn pinv_rejects_nan() {
        let mut m = identity(2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(pinv(&m), Err(Error::NumericFailure { .. })));
    }

    #[test]
    fn rank_kernel_examples() {
        let rk = rank_kernel(&identity(2), tolerances::RANK).unwrap();
        assert_eq!(rk.rank, 2);
        assert_eq!(rk.kernel.ncols(), 0);

        let ones = real_matrix(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let rk = rank_kernel(&ones, tolerances::RANK).unwrap();
        assert_eq!(rk.rank, 1);
        assert_eq!(rk.kernel.ncols(), 1);
        let v = rk.kernel.column(0);
        // span{(1,-1)/sqrt 2}: components opposite, unit norm
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(max_abs(&(&ones * &rk.kernel)) < 1e-12);

        let rk = rank_kernel(&zeros(2, 2), tolerances::RANK).unwrap();
        assert_eq!(rk.rank, 0);
        assert!(close(&(rk.kernel.adjoint() * &rk.kernel), &identity(2), 1e-14));
    }

    #[test]
    fn rank_kernel_wide_matrix() {
        let m = real_matrix(1, 3, &[1.0, 2.0, 2.0]);
        let rk = rank_kernel(&m, tolerances::RANK).unwrap();
        assert_eq!(rk.rank, 1);
        assert_eq!(rk.kernel.ncols(), 2);
        assert!(max_abs(&(&m * &rk.kernel)) < 1e-12);
    }

    #[test]
    fn hermitian_eigen_examples() {
        let e = hermitian_eigen(&real_matrix(2, 2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-14);

        let x = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = hermitian_eigen(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        for j in 0..2 {
            let v = e.vectors.column(j);
            assert!((v[0].norm() - v[1].norm()).abs() < 1e-12);
        }

        let e = hermitian_eigen(&zeros(2, 2)).unwrap();
        assert_eq!(e.values, vec![0.0, 0.0]);
    }

    #[test]
    fn hermitian_eigen_rejects_non_hermitian() {
        let m = real_matrix(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn definiteness_examples() {
        assert_eq!(
            definiteness_of(&identity(2), 1e-9).unwrap(),
            Definiteness::PositiveDefinite
        );
        assert_eq!(
            definiteness_of(&real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]), 1e-9).unwrap(),
            Definiteness::PositiveSemidefinite
        );
        assert_eq!(
            definiteness_of(&real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]), 1e-9).unwrap(),
            Definiteness::Indefinite
        );
    }

    #[test]
    fn qr_reconstructs_with_positive_diagonal() {
        let m = complex_matrix(
            3,
            2,
            &[c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.5), c(3.0, 0.0), c(0.2, -1.0), c(1.0, 1.0)],
        );
        let (q, r) = qr(&m);
        assert!(close(&(&q * &r), &m, 1e-12));
        for i in 0..2 {
            assert!(r[(i, i)].im.abs() < 1e-14 && r[(i, i)].re >= 0.0);
        }
    }

    #[test]
    fn j_matrix_is_orthogonal_and_skew() {
        let j = j_matrix(3);
        assert!(close(&(&j * j.adjoint()), &identity(6), 0.0));
        assert!(close(&(&j + j.transpose()), &zeros(6, 6), 0.0));
    }
}
