//! Square-summable solution counts, the Friedrichs boundary data and the
//! membership test for the Friedrichs extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_part, identity, inverse, j_matrix, matrix_serde, max_abs, qr,
    rank, rank_kernel, svd, zeros, ComplexMatrix, ComplexVector, C64,
};
use crate::propagation::{relation_residuals, semi_inner, wronskian, MatrixSolution};
use crate::recessive::{recessive_solution, RecessiveResult};
use crate::structure::disconjugacy_check;
use crate::system::{check_atkinson, SymplecticSystem};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Confidence {
    Stable,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareSummabilityReport {
    pub lambda: C64,
    pub n: usize,
    pub horizons: Vec<usize>,
    /// Eigenvalues (ascending) of the scaled Gram matrix at each horizon.
    pub gram_eigenvalues: Vec<Vec<f64>>,
    /// Count for each pair of successive horizons.
    pub pair_estimates: Vec<usize>,
    pub d_estimate: usize,
    pub confidence: Confidence,
    /// `n <= d <= 2n`.
    pub within_bounds: bool,
    pub growth_ratio: f64,
}

/// Fundamental system on `[0, K+1]` kept as `Y_k = Q_k G_k diag(exp(l_k))`
/// with orthonormal `Q_k` and column-normalized `G_k`.
struct ScaledBasis {
    core: Vec<ComplexMatrix>,
    log_scale: Vec<Vec<f64>>,
}

impl ScaledBasis {
    fn build(sys: &SymplecticSystem, lambda: C64, horizon: usize) -> Result<Self> {
        let dim = 2 * sys.n();
        let mut q = vec![zeros(0, 0); horizon + 2];
        let mut r = vec![zeros(0, 0); horizon + 1];
        q[horizon + 1] = identity(dim);
        for k in (0..=horizon).rev() {
            let (qk, rk) = qr(&(sys.s_lambda(k, lambda) * &q[k + 1]));
            q[k] = qk;
            r[k] = rk;
        }
        let mut g = identity(dim);
        let mut logs = vec![0.0; dim];
        let mut core = Vec::with_capacity(horizon + 2);
        let mut log_scale = Vec::with_capacity(horizon + 2);
        core.push(&q[0] * &g);
        log_scale.push(logs.clone());
        for k in 0..=horizon {
            g = r[k]
                .clone()
                .solve_upper_triangular(&g)
                .ok_or_else(|| Error::Singular(format!("R_{k} in the Lyapunov sweep")))?;
            for (j, mut col) in g.column_iter_mut().enumerate() {
                let s = col.norm();
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::NumericFailure {
                        what: format!("column {j} collapsed at k = {}", k + 1),
                    });
                }
                col.scale_mut(1.0 / s);
                logs[j] += s.ln();
            }
            core.push(&q[k + 1] * &g);
            log_scale.push(logs.clone());
        }
        Ok(ScaledBasis { core, log_scale })
    }

    /// Common column offsets so that every scale factor is at most one.
    fn offsets(&self, upto: usize) -> Vec<f64> {
        let dim = self.log_scale[0].len();
        (0..dim)
            .map(|j| {
                self.log_scale[..=upto]
                    .iter()
                    .map(|l| l[j])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    fn value(&self, k: usize, offsets: &[f64]) -> ComplexMatrix {
        let mut y = self.core[k].clone();
        for (j, mut col) in y.column_iter_mut().enumerate() {
            col.scale_mut((self.log_scale[k][j] - offsets[j]).exp());
        }
        y
    }

    fn grams(&self, sys: &SymplecticSystem, horizons: &[usize], offsets: &[f64]) -> Vec<ComplexMatrix> {
        let dim = offsets.len();
        let mut acc = zeros(dim, dim);
        let mut out = Vec::with_capacity(horizons.len());
        let mut next = 0;
        for k in 0..=*horizons.last().expect("nonempty") {
            let y = self.value(k, offsets);
            acc += y.adjoint() * sys.psi(k) * &y;
            while next < horizons.len() && horizons[next] == k {
                out.push(hermitian_part(&acc));
                next += 1;
            }
        }
        out
    }
}

fn diag_scale(g: &ComplexMatrix) -> ComplexMatrix {
    let d = g.nrows();
    let mut s = zeros(d, d);
    for i in 0..d {
        let v = g[(i, i)].re.max(f64::MIN_POSITIVE);
        s[(i, i)] = C64::new(1.0 / v.sqrt(), 0.0);
    }
    s
}

/// Bounded directions between two horizons: negative inertia of
/// `D^{-1}(G_2 - rho G_1)D^{-1}`, equivalently generalized eigenvalues of
/// `(G_2, G_1)` below `rho`.
fn bounded_directions(g1: &ComplexMatrix, g2: &ComplexMatrix, rho: f64) -> Result<(usize, ComplexMatrix)> {
    let dinv = diag_scale(g2);
    let h = hermitian_part(&(&dinv * (g2 - g1 * C64::new(rho, 0.0)) * &dinv));
    let eig = hermitian_eigen(&h)?;
    let count = eig.values.iter().filter(|&&v| v < 0.0).count();
    let vectors = &dinv * eig.vectors.columns(0, count);
    Ok((count, vectors))
}

fn validate_horizons(horizons: &[usize]) -> Result<()> {
    if horizons.len() < 2 || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "need at least two strictly increasing horizons".into(),
        ));
    }
    Ok(())
}

/// Count of square-summable solutions together with a basis of them on
/// `[0, K_max + 1]`.
pub fn square_summable_solutions(
    sys: &SymplecticSystem,
    lambda: C64,
    horizons: &[usize],
) -> Result<(SquareSummabilityReport, MatrixSolution)> {
    validate_horizons(horizons)?;
    let kmax = *horizons.last().expect("validated");
    let basis = ScaledBasis::build(sys, lambda, kmax)?;
    let offsets = basis.offsets(kmax);
    let grams = basis.grams(sys, horizons, &offsets);
    let dfull = diag_scale(&grams[grams.len() - 1]);
    let gram_eigenvalues = grams
        .iter()
        .map(|g| Ok(hermitian_eigen(&hermitian_part(&(&dfull * g * &dfull)))?.values))
        .collect::<Result<Vec<_>>>()?;
    let mut pair_estimates = Vec::new();
    let mut last_vectors = zeros(0, 0);
    for (i, w) in horizons.windows(2).enumerate() {
        let rho = tolerances::GROWTH_RATIO.powf((w[1] as f64 / w[0] as f64).log2());
        let (count, vectors) = bounded_directions(&grams[i], &grams[i + 1], rho)?;
        pair_estimates.push(count);
        last_vectors = vectors;
    }
    let d_estimate = *pair_estimates.last().expect("at least one pair");
    let stable = pair_estimates.len() >= 2
        && pair_estimates[pair_estimates.len() - 2] == d_estimate;
    let n = sys.n();
    let report = SquareSummabilityReport {
        lambda,
        n,
        horizons: horizons.to_vec(),
        gram_eigenvalues,
        pair_estimates,
        d_estimate,
        confidence: if stable {
            Confidence::Stable
        } else {
            Confidence::Marginal
        },
        within_bounds: (n..=2 * n).contains(&d_estimate),
        growth_ratio: tolerances::GROWTH_RATIO,
    };
    let values = (0..=kmax + 1)
        .map(|k| basis.value(k, &offsets) * &last_vectors)
        .collect();
    Ok((report, MatrixSolution::new(lambda, values)))
}

pub fn count_square_summable(sys: &SymplecticSystem, lambda: C64, horizons: &[usize]) -> Result<SquareSummabilityReport> {
    Ok(square_summable_solutions(sys, lambda, horizons)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "d")]
pub enum Classification {
    LimitPoint,
    LimitCircle,
    Intermediate(usize),
}

pub fn classify(report: &SquareSummabilityReport) -> Classification {
    let (n, d) = (report.n, report.d_estimate);
    if d == n {
        Classification::LimitPoint
    } else if d == 2 * n {
        Classification::LimitCircle
    } else {
        Classification::Intermediate(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LowerBound {
    /// Disconjugacy held on every `[0, N]`, `N <= K`; evidence is finite.
    CertifiedAtLeast { nu: f64, horizon: usize },
    Inconclusive { reason: String },
}

/// `nu` is certified as a lower bound when the system is disconjugate on
/// `[0, N]` for all `N <= K` and the Atkinson condition holds on `window`.
pub fn lower_bound_certificate(
    sys: &SymplecticSystem,
    nu: f64,
    horizon: usize,
    window: (usize, usize),
) -> Result<LowerBound> {
    let atk = check_atkinson(sys, C64::new(nu, 0.0), window)?;
    if !atk.holds {
        return Ok(LowerBound::Inconclusive {
            reason: format!("Atkinson condition fails on [{}, {}]", window.0, window.1),
        });
    }
    for n_end in 0..=horizon {
        let rep = disconjugacy_check(sys, nu, 0, n_end)?;
        if let Some(k) = rep.first_failure {
            return Ok(LowerBound::Inconclusive {
                reason: format!("disconjugacy fails on [0, {n_end}] at k = {k}"),
            });
        }
    }
    Ok(LowerBound::CertifiedAtLeast { nu, horizon })
}

/// Greedy pivoted selection of `cols` rows of `u` forming an invertible block.
pub fn select_rows(u: &ComplexMatrix) -> Result<Vec<usize>> {
    let (rows, cols) = u.shape();
    if cols > rows {
        return Err(Error::RankDeficientComplement { rank: rows, needed: cols });
    }
    let scale = max_abs(u).max(f64::MIN_POSITIVE);
    let mut work = u.clone();
    let mut chosen = Vec::with_capacity(cols);
    for j in 0..cols {
        let (p, mag) = (0..rows)
            .filter(|i| !chosen.contains(i))
            .map(|i| (i, work[(i, j)].norm()))
            .fold((usize::MAX, -1.0), |best, x| if x.1 > best.1 { x } else { best });
        if p == usize::MAX || mag <= tolerances::RANK * scale {
            return Err(Error::RankDeficientComplement { rank: j, needed: cols });
        }
        let pivot = work[(p, j)];
        for i in 0..rows {
            if i != p && !chosen.contains(&i) {
                let f = work[(i, j)] / pivot;
                for c in j..cols {
                    let v = work[(p, c)];
                    work[(i, c)] -= f * v;
                }
            }
        }
        chosen.push(p);
    }
    Ok(chosen)
}

/// Row selection and rescaling of a complement whose top block vanishes at
/// `m`: returns the indices and the right factor making the selected rows of
/// the bottom block the identity.
pub fn normalize_complement(u_m: &ComplexMatrix) -> Result<(Vec<usize>, ComplexMatrix)> {
    let indices = select_rows(u_m)?;
    let block = u_m.select_rows(&indices);
    let factor = inverse(&block).map_err(|_| Error::RankDeficientComplement {
        rank: rank(&block, tolerances::RANK).unwrap_or(0),
        needed: indices.len(),
    })?;
    Ok((indices, factor))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedrichsData {
    pub nu: f64,
    pub lambda: f64,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    /// Rows of the complement selected at `m`, 0-based.
    pub indices: Vec<usize>,
    #[serde(with = "matrix_serde")]
    pub theta_m: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub upsilon: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub m_matrix: ComplexMatrix,
    #[serde(with = "matrix_serde")]
    pub l_matrix: ComplexMatrix,
    /// `|Upsilon_sub - [[0, I], [-I, 0]]|`.
    pub submatrix_defect: f64,
    /// `|M J M^* - L Upsilon_sub L^*|`.
    pub boundary_identity_defect: f64,
    pub rank_ml: usize,
    /// `|Theta_0^* J Theta_0 - Theta_m^* J Theta_m|`.
    pub wronskian_defect: f64,
    #[serde(skip)]
    pub theta: MatrixSolution,
}

impl FriedrichsData {
    /// Columns of `Theta` whose boundary forms enter the membership test.
    pub fn boundary_columns(&self) -> Vec<usize> {
        (0..self.d - self.n).collect()
    }

    pub fn upsilon_sub(&self) -> ComplexMatrix {
        let s = 2 * (self.d - self.n);
        self.upsilon.view((0, 0), (s, s)).into_owned()
    }
}

/// Canonical `M` (`d x 2n`) and `L` (`d x 2(d-n)`).
pub fn canonical_m_l(n: usize, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let p = d - n;
    let mut m = zeros(d, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&identity(n));
    let mut l = zeros(d, 2 * p);
    l.view_mut((n, 0), (p, p)).copy_from(&identity(p));
    (m, l)
}

/// Assembles `Theta = [Z~ E_I^* | Z^^ | Z~ E_S^*]` from a recessive basis with
/// `X~_m = I` and a complement with vanishing top block at `m`.
pub fn assemble_from_parts(
    nu: f64,
    lambda: f64,
    m: usize,
    recessive: &MatrixSolution,
    complement: &MatrixSolution,
) -> Result<FriedrichsData> {
    let n = recessive.n();
    let p = complement.cols();
    let d = n + p;
    if p > n {
        return Err(Error::InvalidArgument(format!("complement has {p} > n columns")));
    }
    let len = recessive.len().min(if p == 0 { usize::MAX } else { complement.len() });
    let (indices, complement) = if p == 0 {
        (Vec::new(), complement.clone())
    } else {
        let (idx, factor) = normalize_complement(&complement.u(m))?;
        (idx, complement.right_mul(&factor))
    };
    let rest: Vec<usize> = (0..n).filter(|i| !indices.contains(i)).collect();
    let values: Vec<ComplexMatrix> = (0..len)
        .map(|k| {
            let z = recessive.at(k);
            let mut theta = zeros(2 * n, d);
            for (c, &i) in indices.iter().enumerate() {
                theta.set_column(c, &z.column(i));
            }
            for c in 0..p {
                theta.set_column(p + c, &complement.at(k).column(c));
            }
            for (c, &i) in rest.iter().enumerate() {
                theta.set_column(2 * p + c, &z.column(i));
            }
            theta
        })
        .collect();
    let theta = MatrixSolution::new(recessive.lambda, values);
    let j = j_matrix(n);
    let upsilon = theta.at(m).adjoint() * &j * theta.at(m);
    let upsilon_0 = theta.at(0).adjoint() * &j * theta.at(0);
    let wronskian_defect = max_abs(&(&upsilon_0 - &upsilon));
    let s = 2 * p;
    let upsilon_sub = upsilon.view((0, 0), (s, s)).into_owned();
    let submatrix_defect = max_abs(&(&upsilon_sub - j_matrix(p)));
    if submatrix_defect > 1e-8 {
        return Err(Error::SubmatrixCheckFailed {
            defect: submatrix_defect,
        });
    }
    let (m_matrix, l_matrix) = canonical_m_l(n, d);
    let ident = &m_matrix * &j * m_matrix.adjoint() - &l_matrix * &upsilon_sub * l_matrix.adjoint();
    let boundary_identity_defect = max_abs(&ident);
    let mut ml = zeros(d, 2 * n + s);
    ml.view_mut((0, 0), (d, 2 * n)).copy_from(&m_matrix);
    ml.view_mut((0, 2 * n), (d, s)).copy_from(&l_matrix);
    let rank_ml = rank_kernel(&ml, tolerances::RANK)?.rank;
    Ok(FriedrichsData {
        nu,
        lambda,
        n,
        d,
        m,
        indices,
        theta_m: theta.at(m).clone(),
        upsilon,
        m_matrix,
        l_matrix,
        submatrix_defect,
        boundary_identity_defect,
        rank_ml,
        wronskian_defect,
        theta,
    })
}

/// Friedrichs data from a certified recessive solution and a basis of the
/// square-summable solutions at the same real `lambda < nu`.
pub fn assemble_theta(
    nu: f64,
    recessive: &RecessiveResult,
    summable: &MatrixSolution,
) -> Result<FriedrichsData> {
    let lambda = recessive.nu;
    if lambda.partial_cmp(&nu) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidArgument(format!(
            "need lambda < nu, got lambda = {lambda}, nu = {nu}"
        )));
    }
    let m = recessive.m;
    let z = recessive.solution();
    let n = z.n();
    let norm = inverse(&z.x(m)).map_err(|_| Error::SingularX { k: m })?;
    let z = z.right_mul(&norm);
    let d = summable.cols();
    if d < n {
        return Err(Error::NotRecessive(format!(
            "only {d} square-summable solutions for n = {n}"
        )));
    }
    let p = d - n;
    let len = z.len().min(summable.len());
    let complement = if p == 0 {
        MatrixSolution::new(z.lambda, vec![zeros(2 * n, 0); len])
    } else {
        let xm = summable.x(m);
        let shifted: Vec<ComplexMatrix> = (0..len)
            .map(|k| summable.at(k) - z.at(k) * &xm)
            .collect();
        let u_m = shifted[m].rows(n, n).into_owned();
        let svd = svd(&u_m)?;
        let r = svd
            .singular_values
            .iter()
            .filter(|&&s| s > tolerances::RANK * svd.singular_values[0])
            .count();
        if r < p {
            return Err(Error::RankDeficientComplement { rank: r, needed: p });
        }
        let v = svd.v_t.expect("requested").adjoint();
        let pick = v.columns(0, p).into_owned();
        MatrixSolution::new(z.lambda, shifted.iter().map(|s| s * &pick).collect())
    };
    let z = z.truncate(len - 2);
    assemble_from_parts(nu, lambda, m, &z, &complement)
}

/// Parameters of the full Friedrichs pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct FriedrichsSetup {
    pub nu: f64,
    pub lambda: f64,
    pub anchors: Vec<usize>,
    pub horizons: Vec<usize>,
    pub m: Option<usize>,
}

pub fn friedrichs_data(sys: &SymplecticSystem, setup: &FriedrichsSetup) -> Result<(FriedrichsData, RecessiveResult, SquareSummabilityReport)> {
    let rec = recessive_solution(sys, setup.lambda, &setup.anchors, setup.m)?;
    let (report, summable) = square_summable_solutions(sys, C64::new(setup.lambda, 0.0), &setup.horizons)?;
    if report.confidence != Confidence::Stable {
        return Err(Error::NotConverged {
            history: report.pair_estimates.iter().map(|&c| c as f64).collect(),
            last: report.d_estimate as f64,
        });
    }
    let data = assemble_theta(setup.nu, &rec, &summable)?;
    Ok((data, rec, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryForm {
    pub value: C64,
    pub oscillation: f64,
    pub converged: bool,
}

/// `theta_K^* J z_K` with its oscillation over `[K - T, K]`.
pub fn boundary_form_limit(j: &ComplexMatrix, z: &[ComplexVector], theta: &[ComplexVector], horizon: usize, tail: usize) -> Result<BoundaryForm> {
    if tail >= horizon || horizon >= z.len().min(theta.len()) {
        return Err(Error::RangeMismatch {
            a: horizon.saturating_sub(tail),
            b: horizon,
            len: z.len().min(theta.len()),
        });
    }
    let w: Vec<C64> = (horizon - tail..=horizon)
        .map(|k| wronskian(j, &theta[k], &z[k]))
        .collect();
    let value = *w.last().expect("nonempty");
    let oscillation = w.iter().map(|x| (x - value).norm()).fold(0.0, f64::max);
    Ok(BoundaryForm {
        value,
        oscillation,
        converged: oscillation <= tolerances::LIMIT,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub tag: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub member: bool,
    pub horizon: usize,
    pub conditions: Vec<ConditionReport>,
}

impl MembershipVerdict {
    pub fn condition(&self, tag: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.tag == tag)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.tag.as_str())
            .collect()
    }
}

fn tail_ratio(sys: &SymplecticSystem, v: &[ComplexVector], horizon: usize, tail: usize) -> Result<f64> {
    let total = semi_inner(sys, v, v, (0, horizon))?.re;
    if total <= 0.0 {
        return Ok(0.0);
    }
    Ok(semi_inner(sys, v, v, (horizon - tail, horizon))?.re / total)
}

/// Checks `(z, f)` against the description of the Friedrichs extension:
/// `tmax` (the pair satisfies `L(z) = Psi f`), `tail` (Psi-tails of `z` and
/// `f`), `x0` (`x_0 = 0`) and one `boundary[j]` per selected column.
pub fn friedrichs_membership(
    sys: &SymplecticSystem,
    z: &[ComplexVector],
    f: &[ComplexVector],
    data: &FriedrichsData,
    horizon: usize,
) -> Result<MembershipVerdict> {
    if z.len() < horizon + 2 || f.len() < horizon + 1 {
        return Err(Error::RangeMismatch {
            a: 0,
            b: horizon + 1,
            len: z.len().min(f.len() + 1),
        });
    }
    let n = sys.n();
    let zero = C64::new(0.0, 0.0);
    let res = relation_residuals(sys, &z[..horizon + 2], &f[..horizon + 1], zero)?;
    let worst = res.iter().copied().fold(0.0, f64::max);
    let mut conditions = vec![ConditionReport {
        tag: "tmax".into(),
        passed: worst <= tolerances::RESIDUAL,
        value: worst,
        tolerance: tolerances::RESIDUAL,
    }];

    let tail = (horizon / 4).max(1);
    let tz = tail_ratio(sys, z, horizon, tail)?;
    let tf = tail_ratio(sys, f, horizon, tail)?;
    let t = tz.max(tf);
    conditions.push(ConditionReport {
        tag: "tail".into(),
        passed: t <= tolerances::TAIL,
        value: t,
        tolerance: tolerances::TAIL,
    });

    let x0 = z[0].rows(0, n).norm();
    let scale = z.iter().map(|v| v.norm()).fold(1.0, f64::max);
    conditions.push(ConditionReport {
        tag: "x0".into(),
        passed: x0 <= tolerances::RESIDUAL * scale,
        value: x0,
        tolerance: tolerances::RESIDUAL * scale,
    });

    if data.d > data.n {
        let h = horizon.min(data.theta.len().saturating_sub(2));
        let j = sys.j();
        for c in data.boundary_columns() {
            let col: Vec<ComplexVector> = data.theta.values.iter().map(|t| t.column(c).into_owned()).collect();
            let bf = boundary_form_limit(j, z, &col, h, (h / 4).max(1))?;
            let size = bf.value.norm().max(bf.oscillation);
            conditions.push(ConditionReport {
                tag: format!("boundary[{c}]"),
                passed: bf.converged && bf.value.norm() <= tolerances::LIMIT,
                value: size,
                tolerance: tolerances::LIMIT,
            });
        }
    }
    Ok(MembershipVerdict {
        member: conditions.iter().all(|c| c.passed),
        horizon,
        conditions,
    })
}
