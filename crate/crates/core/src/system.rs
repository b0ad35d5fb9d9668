//! Coefficients of the time-reversed symplectic system
//!
//! ```text
//! z_k = (S_k + lambda V_k) z_{k+1} - J Psi_k f_k,   Psi_k = [[W_k, 0], [0, 0]],
//! V_k = -J Psi_k S_k
//! ```
//!
//! and their validation on a probe range.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, block2x2, definiteness_of, hermitian_defect, identity, j_matrix, max_abs, zeros,
    ComplexMatrix, Definiteness, C64,
};
use crate::propagation;
use crate::tolerances;

/// The four `n x n` blocks of `S_k` together with the weight `W_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepBlocks {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
    pub w: ComplexMatrix,
}

impl StepBlocks {
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
        w: ComplexMatrix,
    ) -> Self {
        StepBlocks { a, b, c, d, w }
    }

    /// Scalar blocks (`n = 1`) from real numbers.
    pub fn scalar(a: f64, b: f64, c: f64, d: f64, w: f64) -> Self {
        let m = |x: f64| linalg::real_matrix(1, 1, &[x]);
        StepBlocks::new(m(a), m(b), m(c), m(d), m(w))
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    fn check_dims(&self) -> Result<()> {
        let n = self.a.nrows();
        for (name, m) in [
            ("A", &self.a),
            ("B", &self.b),
            ("C", &self.c),
            ("D", &self.d),
            ("W", &self.w),
        ] {
            if m.shape() != (n, n) || n == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "block {name} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(())
    }

    /// `S = [[A, B], [C, D]]`.
    pub fn s(&self) -> ComplexMatrix {
        block2x2(&self.a, &self.b, &self.c, &self.d)
    }

    pub fn psi(&self) -> ComplexMatrix {
        let n = self.n();
        block2x2(&self.w, &zeros(n, n), &zeros(n, n), &zeros(n, n))
    }

    /// Block-diagonal direct sum of two steps.
    pub fn direct_sum(&self, other: &StepBlocks) -> StepBlocks {
        let ds = |x: &ComplexMatrix, y: &ComplexMatrix| {
            block2x2(x, &zeros(x.nrows(), y.ncols()), &zeros(y.nrows(), x.ncols()), y)
        };
        StepBlocks {
            a: ds(&self.a, &other.a),
            b: ds(&self.b, &other.b),
            c: ds(&self.c, &other.c),
            d: ds(&self.d, &other.d),
            w: ds(&self.w, &other.w),
        }
    }
}

/// Source of the coefficient sequence for every `k >= 0`.
#[derive(Clone)]
pub enum CoefficientProvider {
    Constant(StepBlocks),
    /// `blocks[k mod p]`.
    Periodic(Vec<StepBlocks>),
    /// `blocks[k]`, extended by the final element beyond the stored range.
    Explicit(Vec<StepBlocks>),
    /// Constant `A, B, C, D` with `W_k = W gamma^k`, `gamma > 0`.
    WeightScaled { base: StepBlocks, gamma: f64 },
    /// Block-diagonal direct sum of independent systems.
    DirectSum(Vec<CoefficientProvider>),
    /// Arbitrary formula; `label` is only used in reports.
    Formula {
        n: usize,
        label: String,
        f: Arc<dyn Fn(usize) -> StepBlocks + Send + Sync>,
    },
}

impl std::fmt::Debug for CoefficientProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefficientProvider::Constant(_) => write!(f, "Constant(n={})", self.n()),
            CoefficientProvider::Periodic(v) => write!(f, "Periodic(p={})", v.len()),
            CoefficientProvider::Explicit(v) => write!(f, "Explicit(len={})", v.len()),
            CoefficientProvider::WeightScaled { gamma, .. } => {
                write!(f, "WeightScaled(gamma={gamma})")
            }
            CoefficientProvider::DirectSum(v) => write!(f, "DirectSum({v:?})"),
            CoefficientProvider::Formula { label, .. } => write!(f, "Formula({label})"),
        }
    }
}

impl CoefficientProvider {
    pub fn n(&self) -> usize {
        match self {
            CoefficientProvider::Constant(b) => b.n(),
            CoefficientProvider::Periodic(v) | CoefficientProvider::Explicit(v) => {
                v.first().map_or(0, StepBlocks::n)
            }
            CoefficientProvider::WeightScaled { base, .. } => base.n(),
            CoefficientProvider::DirectSum(parts) => parts.iter().map(|p| p.n()).sum(),
            CoefficientProvider::Formula { n, .. } => *n,
        }
    }

    pub fn blocks(&self, k: usize) -> StepBlocks {
        match self {
            CoefficientProvider::Constant(b) => b.clone(),
            CoefficientProvider::Periodic(v) => v[k % v.len()].clone(),
            CoefficientProvider::Explicit(v) => v[k.min(v.len() - 1)].clone(),
            CoefficientProvider::WeightScaled { base, gamma } => {
                let mut b = base.clone();
                b.w = b.w.scale(gamma.powi(k as i32));
                b
            }
            CoefficientProvider::DirectSum(parts) => {
                let mut it = parts.iter().map(|p| p.blocks(k));
                let first = it.next().expect("direct sum of at least one system");
                it.fold(first, |acc, b| acc.direct_sum(&b))
            }
            CoefficientProvider::Formula { f, .. } => f(k),
        }
    }

    /// Number of leading indices whose validation covers the whole probe
    /// range `[0, probe_end]`.
    fn distinct_steps(&self, probe_end: usize) -> usize {
        match self {
            CoefficientProvider::Constant(_) => 1,
            CoefficientProvider::Periodic(v) => v.len().min(probe_end + 1),
            CoefficientProvider::Explicit(v) => v.len().min(probe_end + 1),
            _ => probe_end + 1,
        }
    }

    fn check_shape(&self) -> Result<()> {
        match self {
            CoefficientProvider::Periodic(v) | CoefficientProvider::Explicit(v) if v.is_empty() => {
                Err(Error::DimensionMismatch("empty coefficient list".into()))
            }
            CoefficientProvider::Periodic(v) | CoefficientProvider::Explicit(v) => {
                let n = v[0].n();
                for b in v {
                    b.check_dims()?;
                    if b.n() != n {
                        return Err(Error::DimensionMismatch(
                            "coefficient list mixes block sizes".into(),
                        ));
                    }
                }
                Ok(())
            }
            CoefficientProvider::WeightScaled { base, gamma } => {
                base.check_dims()?;
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "weight decay base must be positive, got {gamma}"
                    )));
                }
                Ok(())
            }
            CoefficientProvider::Constant(b) => b.check_dims(),
            CoefficientProvider::DirectSum(parts) if parts.is_empty() => {
                Err(Error::DimensionMismatch("empty direct sum".into()))
            }
            CoefficientProvider::DirectSum(parts) => parts.iter().try_for_each(|p| p.check_shape()),
            CoefficientProvider::Formula { n, f, .. } => {
                let b = f(0);
                b.check_dims()?;
                if b.n() != *n {
                    return Err(Error::DimensionMismatch("formula block size".into()));
                }
                Ok(())
            }
        }
    }
}

/// Per-step matrices derived from the blocks.
#[derive(Debug, Clone)]
pub struct StepMatrices {
    pub s: ComplexMatrix,
    pub v: ComplexMatrix,
    pub psi: ComplexMatrix,
}

/// Validated system. Immutable after [`build_system`].
#[derive(Debug, Clone)]
pub struct SymplecticSystem {
    n: usize,
    provider: CoefficientProvider,
    j: ComplexMatrix,
    probe_end: usize,
}

/// Validates a provider on `[0, probe_end]` and wraps it as a system.
pub fn build_system(provider: CoefficientProvider, probe_end: usize) -> Result<SymplecticSystem> {
    if probe_end < 1 {
        return Err(Error::InvalidArgument("probe range must be [0, K] with K >= 1".into()));
    }
    provider.check_shape()?;
    let n = provider.n();
    let sys = SymplecticSystem {
        n,
        j: j_matrix(n),
        provider,
        probe_end,
    };
    for k in 0..sys.provider.distinct_steps(probe_end) {
        sys.validate_step(k)?;
    }
    Ok(sys)
}

impl SymplecticSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn provider(&self) -> &CoefficientProvider {
        &self.provider
    }

    pub fn probe_end(&self) -> usize {
        self.probe_end
    }

    pub fn blocks(&self, k: usize) -> StepBlocks {
        self.provider.blocks(k)
    }

    pub fn step(&self, k: usize) -> StepMatrices {
        let blocks = self.blocks(k);
        let s = blocks.s();
        let psi = blocks.psi();
        let v = -(&self.j * &psi * &s);
        StepMatrices { s, v, psi }
    }

    pub fn s(&self, k: usize) -> ComplexMatrix {
        self.blocks(k).s()
    }

    pub fn psi(&self, k: usize) -> ComplexMatrix {
        self.blocks(k).psi()
    }

    /// `V_k = -J Psi_k S_k`.
    pub fn v(&self, k: usize) -> ComplexMatrix {
        self.step(k).v
    }

    /// `S_k(lambda) = S_k + lambda V_k`.
    pub fn s_lambda(&self, k: usize, lambda: C64) -> ComplexMatrix {
        let st = self.step(k);
        st.s + st.v * lambda
    }

    /// `S_k(lambda)^{-1} = -J S_k(conj lambda)^* J`.
    pub fn s_lambda_inverse(&self, k: usize, lambda: C64) -> ComplexMatrix {
        let sb = self.s_lambda(k, lambda.conj());
        -(&self.j * sb.adjoint() * &self.j)
    }

    fn validate_step(&self, k: usize) -> Result<()> {
        let b = self.blocks(k);
        b.check_dims()?;
        if b.n() != self.n {
            return Err(Error::DimensionMismatch(format!("block size changes at k = {k}")));
        }
        let s = b.s();
        if !linalg::is_finite(&s) || !linalg::is_finite(&b.w) {
            return Err(Error::NumericFailure {
                what: format!("non-finite coefficients at k = {k}"),
            });
        }
        let j = &self.j;
        let scale = 1.0f64.max(max_abs(&s).powi(2));
        let defect = max_abs(&(s.adjoint() * j * &s - j)) / scale;
        if defect > tolerances::SYMPLECTIC {
            return Err(Error::NotSymplectic { k, defect });
        }
        if hermitian_defect(&b.w) > tolerances::HERMITIAN
            || definiteness_of(&b.w, f64::EPSILON * b.w.nrows() as f64)? != Definiteness::PositiveDefinite
        {
            return Err(Error::WeightNotPositive { k });
        }

        let psi = b.psi();
        let v = -(j * &psi * &s);
        let pscale = 1.0f64.max(max_abs(&psi).powi(2));
        let vscale = 1.0f64.max(max_abs(&v) * (max_abs(&v) + max_abs(&s)));
        let checks: [(&'static str, f64, f64); 5] = [
            ("Psi J Psi = 0", max_abs(&(&psi * j * &psi)), pscale),
            ("Psi* J Psi = 0", max_abs(&(psi.adjoint() * j * &psi)), pscale),
            ("V* J V = 0", max_abs(&(v.adjoint() * j * &v)), vscale),
            (
                "V* J S Hermitian",
                {
                    let m = v.adjoint() * j * &s;
                    max_abs(&(&m - m.adjoint()))
                },
                vscale,
            ),
            (
                "Psi = J S J V* J",
                max_abs(&(j * &s * j * v.adjoint() * j - &psi)),
                1.0f64.max(max_abs(&s) * max_abs(&v)),
            ),
        ];
        for (identity, value, scale) in checks {
            let defect = value / scale;
            if defect > tolerances::SYMPLECTIC {
                return Err(Error::StructureViolation { identity, k, defect });
            }
        }
        Ok(())
    }
}

/// Outcome of the definiteness (strong Atkinson) check on a window.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AtkinsonReport {
    pub holds: bool,
    pub window: (usize, usize),
    pub lambda: C64,
    /// Ascending eigenvalues of the Gram matrix scaled to unit diagonal.
    pub eigenvalues: Vec<f64>,
    /// `sigma_min / sigma_max` of the scaled factor, i.e. the square root of
    /// the eigenvalue ratio; the condition holds when it exceeds `tolerance`.
    pub ratio: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub gram: ComplexMatrix,
}

fn hermitian_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = linalg::hermitian_eigen(m)?;
    let v = &eig.vectors;
    let d = ComplexMatrix::from_diagonal(&linalg::ComplexVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&x| C64::new(x.max(0.0).sqrt(), 0.0)),
    ));
    Ok(v * d * v.adjoint())
}

/// Gram matrix `sum_{k=a}^{b} Phi_k^*(lambda) Psi_k Phi_k(lambda)` of the
/// fundamental matrix normalized by `Phi_0 = I`; the condition holds on the
/// window iff it is positive definite.
///
/// The decision is made on the stacked factor `[W_k^{1/2} X_k(Phi)]_k` with
/// unit columns, whose singular values are the square roots of the scaled
/// Gram eigenvalues, so growing solutions cost `kappa` rather than
/// `kappa^2` digits.
pub fn check_atkinson(
    sys: &SymplecticSystem,
    lambda: C64,
    window: (usize, usize),
) -> Result<AtkinsonReport> {
    let (a, b) = window;
    if a > b {
        return Err(Error::InvalidArgument(format!("empty window [{a}, {b}]")));
    }
    let phi = propagation::fundamental_matrix(sys, lambda, b)?;
    let n = sys.n();
    let dim = 2 * n;
    let mut gram = zeros(dim, dim);
    let mut factor = zeros((b - a + 1) * n, dim);
    for k in a..=b {
        let p = phi.at(k);
        gram += p.adjoint() * sys.psi(k) * p;
        let block = hermitian_sqrt(&sys.blocks(k).w)? * p.rows(0, n);
        factor.view_mut(((k - a) * n, 0), (n, dim)).copy_from(&block);
    }
    let gram = linalg::hermitian_part(&gram);
    let norms: Vec<f64> = factor.column_iter().map(|c| c.norm()).collect();
    let tolerance = tolerances::RANK;
    let mut sigma = if norms.iter().all(|&x| x > 0.0) {
        for (mut c, &x) in factor.column_iter_mut().zip(&norms) {
            c.unscale_mut(x);
        }
        linalg::singular_values(&factor)?
    } else {
        Vec::new()
    };
    sigma.resize(dim, 0.0);
    sigma.sort_by(f64::total_cmp);
    let ratio = if sigma[dim - 1] > 0.0 { sigma[0] / sigma[dim - 1] } else { 0.0 };
    Ok(AtkinsonReport {
        holds: ratio > tolerance,
        window,
        lambda,
        eigenvalues: sigma.iter().map(|s| s * s).collect(),
        ratio,
        tolerance,
        gram,
    })
}

/// Scalar example systems used throughout docs and tests.
pub mod examples {
    use super::*;

    /// `A = 1, B = -1, C = 0, D = 1, W = 1`: the discrete second-difference
    /// operator, disconjugate at `nu = 0` and limit point.
    pub fn e1_blocks() -> StepBlocks {
        StepBlocks::scalar(1.0, -1.0, 0.0, 1.0, 1.0)
    }

    pub fn e1() -> SymplecticSystem {
        build_system(CoefficientProvider::Constant(e1_blocks()), 16).expect("E1 is valid")
    }

    /// E1 blocks with `W_k = gamma^k`; limit circle for `gamma = 1/4`.
    pub fn e2_with(gamma: f64) -> SymplecticSystem {
        build_system(
            CoefficientProvider::WeightScaled {
                base: e1_blocks(),
                gamma,
            },
            16,
        )
        .expect("E2 is valid")
    }

    pub fn e2() -> SymplecticSystem {
        e2_with(0.25)
    }

    /// `S_k = I`, `W = 1`: valid but fails the Atkinson condition.
    pub fn identity_system() -> SymplecticSystem {
        build_system(
            CoefficientProvider::Constant(StepBlocks::scalar(1.0, 0.0, 0.0, 1.0, 1.0)),
            4,
        )
        .expect("identity system is valid")
    }

    /// `E1 (+) E2` as a block-diagonal `n = 2` system.
    pub fn e1_plus_e2() -> SymplecticSystem {
        build_system(
            CoefficientProvider::DirectSum(vec![
                CoefficientProvider::Constant(e1_blocks()),
                CoefficientProvider::WeightScaled {
                    base: e1_blocks(),
                    gamma: 0.25,
                },
            ]),
            16,
        )
        .expect("direct sum is valid")
    }

    pub fn identity_blocks(n: usize) -> StepBlocks {
        StepBlocks::new(identity(n), zeros(n, n), zeros(n, n), identity(n), identity(n))
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::linalg::{c, real_matrix};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && max_abs(&(a - b)) <= tol
    }

    #[test]
    fn e1_is_valid_and_identity_system_too() {
        let sys = e1();
        assert_eq!(sys.n(), 1);
        let s = sys.s(3);
        assert!(close(&(s.adjoint() * sys.j() * &s), sys.j(), 0.0));
        identity_system();
    }

    #[test]
    fn non_symplectic_rejected_at_zero() {
        let err = build_system(
            CoefficientProvider::Constant(StepBlocks::scalar(1.0, 0.0, 0.0, 2.0, 1.0)),
            4,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotSymplectic { k: 0, .. }));
    }

    #[test]
    fn zero_weight_rejected() {
        let err = build_system(
            CoefficientProvider::Constant(StepBlocks::scalar(1.0, -1.0, 0.0, 1.0, 0.0)),
            4,
        )
        .unwrap_err();
        assert!(matches!(err, Error::WeightNotPositive { k: 0 }));
    }

    #[test]
    fn explicit_list_failure_reports_index() {
        let mut list = vec![e1_blocks(); 3];
        list.push(StepBlocks::scalar(1.0, 0.0, 0.0, 2.0, 1.0));
        let err = build_system(CoefficientProvider::Explicit(list), 10).unwrap_err();
        assert!(matches!(err, Error::NotSymplectic { k: 3, .. }));
    }

    #[test]
    fn mismatched_blocks_rejected() {
        let mut b = e1_blocks();
        b.w = identity(2);
        let err = build_system(CoefficientProvider::Constant(b), 4).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn explicit_list_extends_by_last() {
        let list = vec![e1_blocks(), StepBlocks::scalar(1.0, 0.0, 0.0, 1.0, 2.0)];
        let p = CoefficientProvider::Explicit(list);
        assert_eq!(p.blocks(7).w[(0, 0)], c(2.0, 0.0));
        assert_eq!(p.blocks(0).w[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn psi_and_v_examples() {
        let sys = e1();
        assert!(close(&sys.psi(0), &real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]), 0.0));
        assert!(close(&sys.v(0), &real_matrix(2, 2, &[0.0, 0.0, 1.0, -1.0]), 0.0));
        let id = identity_system();
        assert!(close(&id.v(0), &real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0]), 0.0));
    }

    #[test]
    fn s_lambda_examples_and_inverse() {
        let sys = e1();
        assert!(close(&sys.s_lambda(5, c(0.0, 0.0)), &real_matrix(2, 2, &[1.0, -1.0, 0.0, 1.0]), 0.0));
        let lam = 0.7;
        assert!(close(
            &sys.s_lambda(2, c(lam, 0.0)),
            &real_matrix(2, 2, &[1.0, -1.0, lam, 1.0 - lam]),
            1e-15
        ));
        let l = c(0.3, -1.2);
        let prod = sys.s_lambda(1, l) * sys.s_lambda_inverse(1, l);
        assert!(close(&prod, &identity(2), 1e-14));
        let sb = sys.s_lambda(1, l.conj());
        let sl = sys.s_lambda(1, l);
        assert!(close(&(sb.adjoint() * sys.j() * sl), sys.j(), 1e-14));
    }

    #[test]
    fn weight_scaled_weights_decay() {
        let sys = e2();
        assert!((sys.blocks(3).w[(0, 0)].re - 0.25f64.powi(3)).abs() < 1e-18);
    }

    #[test]
    fn atkinson_examples() {
        let sys = e1();
        let rep = check_atkinson(&sys, c(0.0, 0.0), (0, 1)).unwrap();
        assert!(rep.holds);
        assert!(close(&rep.gram, &real_matrix(2, 2, &[2.0, 1.0, 1.0, 1.0]), 1e-14));
        let rep = check_atkinson(&sys, c(-1.0, 0.0), (0, 1)).unwrap();
        assert!(rep.holds);
        let rep = check_atkinson(&identity_system(), c(0.0, 0.0), (0, 25)).unwrap();
        assert!(!rep.holds);
    }

    #[test]
    fn atkinson_monotone_in_window() {
        let sys = e2();
        let mut held = false;
        for b in 0..8 {
            let h = check_atkinson(&sys, c(0.5, 0.0), (0, b)).unwrap().holds;
            assert!(!held || h, "lost definiteness when widening to b = {b}");
            held |= h;
        }
        assert!(held);
    }
}
