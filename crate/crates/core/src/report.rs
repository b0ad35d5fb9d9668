//! Command dispatch and the machine-readable run report.
//!
//! Exit codes: 0 when every verdict passes, 1 when a mathematical verdict
//! fails, 2 on numeric failure, 3 on configuration or file errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::csvio;
use crate::error::{Error, Result};
use crate::extension::{
    classify, friedrichs_data, friedrichs_membership, square_summable_solutions, Confidence,
    FriedrichsData, FriedrichsSetup,
};
use crate::linalg::{matrix_serde, ComplexMatrix, ComplexVector, C64};
use crate::propagation::{
    propagate_forward, relation_residuals, semi_inner, solve_forced, symplectic_defect, wronskian,
    MatrixSolution,
};
use crate::recessive::{recessive_certificate, recessive_solution};
use crate::structure::{controllability_check, disconjugacy_check};
use crate::system::{build_system, check_atkinson, SymplecticSystem};
use crate::tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Validate,
    Atkinson,
    Solve,
    Disconjugacy,
    Recessive,
    Classify,
    Friedrichs,
    Membership,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Validate,
        Command::Atkinson,
        Command::Solve,
        Command::Disconjugacy,
        Command::Recessive,
        Command::Classify,
        Command::Friedrichs,
        Command::Membership,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Atkinson => "atkinson",
            Command::Solve => "solve",
            Command::Disconjugacy => "disconjugacy",
            Command::Recessive => "recessive",
            Command::Classify => "classify",
            Command::Friedrichs => "friedrichs",
            Command::Membership => "membership",
        }
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// One checked quantity. `value` is `None` for purely logical checks and for
/// non-finite quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportError {
    pub kind: String,
    pub message: String,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Command,
    pub config: Option<Value>,
    pub seed: u64,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    pub data: Value,
    pub csv_files: Vec<String>,
    pub error: Option<ReportError>,
    pub timing: Timing,
    pub exit_code: i32,
}

impl Report {
    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// The report with timing cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Report {
        Report {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::File(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch(_)
        | Error::RangeMismatch { .. } => EXIT_CONFIG,
        Error::NotSymplectic { .. }
        | Error::WeightNotPositive { .. }
        | Error::StructureViolation { .. }
        | Error::NotASolution { .. }
        | Error::NotAdmissible { .. }
        | Error::NotControllable { .. }
        | Error::Oscillatory(_)
        | Error::NotRecessive(_) => EXIT_VERDICT,
        Error::NumericFailure { .. }
        | Error::Overflow { .. }
        | Error::NotHermitian { .. }
        | Error::SingularX { .. }
        | Error::Singular(_)
        | Error::NotConverged { .. }
        | Error::RankDeficientComplement { .. }
        | Error::SubmatrixCheckFailed { .. } => EXIT_NUMERIC,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::NumericFailure { .. } => "NumericFailure",
        Error::Overflow { .. } => "Overflow",
        Error::NotHermitian { .. } => "NotHermitian",
        Error::DimensionMismatch(_) => "DimensionMismatch",
        Error::NotSymplectic { .. } => "NotSymplectic",
        Error::WeightNotPositive { .. } => "WeightNotPositive",
        Error::StructureViolation { .. } => "StructureViolation",
        Error::RangeMismatch { .. } => "RangeMismatch",
        Error::NotASolution { .. } => "NotASolution",
        Error::NotAdmissible { .. } => "NotAdmissible",
        Error::SingularX { .. } => "SingularX",
        Error::Singular(_) => "Singular",
        Error::NotControllable { .. } => "NotControllable",
        Error::Oscillatory(_) => "Oscillatory",
        Error::NotConverged { .. } => "NotConverged",
        Error::NotRecessive(_) => "NotRecessive",
        Error::RankDeficientComplement { .. } => "RankDeficientComplement",
        Error::SubmatrixCheckFailed { .. } => "SubmatrixCheckFailed",
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::Config { .. } => "Config",
        Error::File(_) => "File",
    }
}

fn report_error(err: &Error) -> ReportError {
    ReportError {
        kind: error_kind(err).into(),
        message: err.to_string(),
        path: match err {
            Error::Config { path, .. } => Some(path.clone()),
            _ => None,
        },
    }
}

/// Report for a run that never got a valid configuration.
pub fn config_failure(command: Command, err: &Error) -> Report {
    Report {
        command,
        config: None,
        seed: 0,
        verdicts: Vec::new(),
        warnings: Vec::new(),
        data: Value::Null,
        csv_files: Vec::new(),
        error: Some(report_error(err)),
        timing: Timing::default(),
        exit_code: exit_code_for(err),
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    json!(matrix_serde::to_rows(m))
}

fn vector_json(v: &ComplexVector) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    csv_dir: Option<PathBuf>,
    verdicts: Vec<Verdict>,
    warnings: Vec<String>,
    data: serde_json::Map<String, Value>,
    csv_files: Vec<String>,
}

impl<'a> Run<'a> {
    fn verdict(&mut self, name: &str, passed: bool, value: Option<f64>, tolerance: f64, horizon: usize) {
        self.verdicts.push(Verdict {
            name: name.into(),
            passed,
            value: value.and_then(finite),
            tolerance,
            horizon,
        });
    }

    /// `value <= tolerance`.
    fn bound(&mut self, name: &str, value: f64, tolerance: f64, horizon: usize) {
        self.verdict(name, value <= tolerance, Some(value), tolerance, horizon);
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(value).expect("data serializes"));
    }

    fn dump(&mut self, name: &str, seq: &[ComplexVector]) -> Result<()> {
        let Some(dir) = &self.csv_dir else {
            return Ok(());
        };
        std::fs::create_dir_all(dir).map_err(|e| Error::File(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        csvio::write_sequence(&path, seq)?;
        self.csv_files.push(name.into());
        Ok(())
    }

    fn dump_columns(&mut self, stem: &str, z: &MatrixSolution) -> Result<()> {
        for c in 0..z.cols() {
            let seq: Vec<ComplexVector> = z.values.iter().map(|v| v.column(c).into_owned()).collect();
            self.dump(&format!("{stem}_c{c}.csv"), &seq)?;
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed)
    }

    fn system(&self) -> Result<SymplecticSystem> {
        build_system(self.cfg.provider()?, self.cfg.horizon)
    }

    /// `lambda` if given, otherwise the real `nu`.
    fn lambda_or_nu(&mut self) -> C64 {
        match self.cfg.lambda_value() {
            Some(l) => l,
            None => {
                self.warnings.push(format!("lambda not given; using nu = {}", self.cfg.nu));
                C64::new(self.cfg.nu, 0.0)
            }
        }
    }

    fn lambda_required(&self) -> Result<C64> {
        self.cfg
            .lambda_value()
            .ok_or_else(|| config_error("lambda", "this command needs lambda"))
    }

    /// Real `lambda < nu` for the Friedrichs pipeline.
    fn friedrichs_setup(&self) -> Result<FriedrichsSetup> {
        let l = self.lambda_required()?;
        if l.im != 0.0 || l.re >= self.cfg.nu {
            return Err(config_error("lambda", format!("needs a real lambda < nu = {}", self.cfg.nu)));
        }
        Ok(FriedrichsSetup {
            nu: self.cfg.nu,
            lambda: l.re,
            anchors: self.cfg.anchors.clone(),
            horizons: self.cfg.horizons.clone(),
            m: self.cfg.normalization_point,
        })
    }

    fn validate(&mut self) -> Result<()> {
        let k = self.cfg.horizon;
        let sys = match self.system() {
            Ok(sys) => sys,
            Err(e) if exit_code_for(&e) == EXIT_VERDICT => {
                self.verdict("coefficients", false, None, tolerances::SYMPLECTIC, k);
                self.put("failure", e.to_string());
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        self.verdict("coefficients", true, None, tolerances::SYMPLECTIC, k);

        let nu = C64::new(self.cfg.nu, 0.0);
        let tol = self.cfg.tolerances.symplectic;
        self.bound("fundamental_symplectic", symplectic_defect(&sys, nu, k)?, tol, k);

        let mut rng = self.rng();
        let dim = 2 * sys.n();
        let start = ComplexMatrix::from_fn(dim, 2, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
        let pair = propagate_forward(&sys, nu, &start, k)?;
        let j = sys.j();
        let col = |k: usize, c: usize| pair.at(k).column(c).into_owned();
        let w0 = wronskian(j, &col(0, 0), &col(0, 1));
        let drift = (0..pair.len())
            .map(|k| {
                let (a, b) = (col(k, 0), col(k, 1));
                (wronskian(j, &a, &b) - w0).norm() / (a.norm() * b.norm()).max(1.0)
            })
            .fold(0.0, f64::max);
        self.bound("wronskian", drift, tol, k);

        let window = (self.cfg.atkinson_window[0], self.cfg.atkinson_window[1]);
        let lambda = self.lambda_or_nu();
        let atk = check_atkinson(&sys, lambda, window)?;
        self.verdict("atkinson", atk.holds, Some(atk.ratio), atk.tolerance, window.1);

        let ctrl = controllability_check(&sys, 0, k)?;
        self.verdict("controllability", ctrl, None, tolerances::RANK, k);
        self.put("n", sys.n());
        self.put("atkinson_window", window);
        Ok(())
    }

    fn atkinson(&mut self) -> Result<()> {
        let sys = self.system()?;
        let window = (self.cfg.atkinson_window[0], self.cfg.atkinson_window[1]);
        let lambda = self.lambda_or_nu();
        let atk = check_atkinson(&sys, lambda, window)?;
        self.verdict("atkinson", atk.holds, Some(atk.ratio), atk.tolerance, window.1);
        self.put("atkinson", &atk);
        Ok(())
    }

    fn solve(&mut self) -> Result<()> {
        let sys = self.system()?;
        let k = self.cfg.horizon;
        let lambda = self.lambda_or_nu();
        let dim = 2 * sys.n();
        let z0 = match self.cfg.initial_vector() {
            Some(z0) => z0,
            None => {
                self.warnings.push(format!("initial not given; drawn from seed {}", self.cfg.seed));
                let mut rng = self.rng();
                let v = ComplexVector::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));
                let norm = v.norm();
                v / C64::new(norm, 0.0)
            }
        };
        let forcing = vec![ComplexVector::zeros(dim); k + 1];
        let z = solve_forced(&sys, lambda, &z0, &forcing)?;
        let residual = relation_residuals(&sys, &z.values, &forcing, lambda)?
            .into_iter()
            .fold(0.0, f64::max);
        self.bound("residual", residual, self.cfg.tolerances.residual, k);
        let energy = semi_inner(&sys, &z.values, &z.values, (0, k))?.re;
        self.put("lambda", [lambda.re, lambda.im]);
        self.put("z0", vector_json(&z0));
        self.put("z_end", vector_json(&z.values[k + 1]));
        self.put("psi_energy", energy);
        self.put(
            "max_norm",
            z.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        );
        self.dump("solution.csv", &z.values)
    }

    fn disconjugacy(&mut self) -> Result<()> {
        let sys = self.system()?;
        let k = self.cfg.horizon;
        let rep = disconjugacy_check(&sys, self.cfg.nu, 0, k)?;
        let min_eig = rep.witness.iter().map(|w| w.min_eigenvalue).fold(f64::INFINITY, f64::min);
        self.verdict("disconjugacy", rep.disconjugate, Some(min_eig), rep.tolerance, k);
        self.put("first_failure", rep.first_failure);
        self.put("nu", rep.nu);
        self.put("window", rep.window);
        if let Some(f) = rep.first_failure {
            let w = rep.witness.iter().find(|w| w.k == f);
            self.put("failure_witness", w);
        }
        Ok(())
    }

    fn recessive(&mut self) -> Result<()> {
        let sys = self.system()?;
        let k = self.cfg.horizon;
        let res = recessive_solution(&sys, self.cfg.nu, &self.cfg.anchors, self.cfg.normalization_point)?;
        let n_max = *res.anchors.last().expect("anchors");
        self.bound("recessive_convergence", res.error_estimate, self.cfg.tolerances.recessive, n_max);
        let cert = recessive_certificate(&sys, &res, k)?;
        let last = cert.lambda_min_trace.last().copied().unwrap_or(0.0);
        let big = self.cfg.tolerances.lambda_big;
        self.verdict("recessive_certificate", cert.monotone && last > big, Some(last), big, cert.horizon);
        if cert.monotone && last <= big {
            self.warnings.push(format!(
                "recessive certificate inconclusive: lambda_min reaches {last:.3e} by k = {}",
                cert.horizon
            ));
        }
        if res.reliable_horizon < k {
            self.warnings.push(format!(
                "recessive candidate reliable only up to k = {}",
                res.reliable_horizon
            ));
        }
        self.put("m", res.m);
        self.put("method", res.method);
        self.put("anchors", &res.anchors);
        self.put("history", &res.history);
        self.put("reliable_horizon", res.reliable_horizon);
        self.put("condition_at_m", res.condition_at_m);
        self.put("z_0", matrix_json(res.solution().at(0)));
        self.put("z_m", matrix_json(res.solution().at(res.m)));
        let z = res.solution().truncate(k.min(res.solution().horizon()));
        self.dump_columns("recessive", &z)
    }

    fn classify(&mut self) -> Result<()> {
        let sys = self.system()?;
        let lambda = self.lambda_required()?;
        let (rep, summable) = square_summable_solutions(&sys, lambda, &self.cfg.horizons)?;
        let h = *rep.horizons.last().expect("horizons");
        let ok = rep.confidence == Confidence::Stable && rep.within_bounds;
        self.verdict("d_estimate", ok, Some(rep.d_estimate as f64), rep.growth_ratio, h);
        if rep.confidence == Confidence::Marginal {
            self.warnings.push(format!("d estimate is marginal: {:?}", rep.pair_estimates));
        }
        self.put("classification", classify(&rep));
        self.put("square_summability", &rep);
        self.dump_columns("summable", &summable)
    }

    fn friedrichs_pipeline(&mut self, sys: &SymplecticSystem) -> Result<FriedrichsData> {
        let setup = self.friedrichs_setup()?;
        let (data, rec, rep) = friedrichs_data(sys, &setup)?;
        let h = *setup.horizons.last().expect("horizons");
        if rec.reliable_horizon < self.cfg.horizon {
            self.warnings.push(format!(
                "recessive candidate reliable only up to k = {}",
                rec.reliable_horizon
            ));
        }
        self.put("classification", classify(&rep));
        self.put("recessive_method", rec.method);
        self.put("recessive_error", rec.error_estimate);
        self.verdict("d_estimate", rep.within_bounds, Some(rep.d_estimate as f64), rep.growth_ratio, h);
        Ok(data)
    }

    fn friedrichs(&mut self) -> Result<()> {
        let sys = self.system()?;
        let data = self.friedrichs_pipeline(&sys)?;
        let h = *self.cfg.anchors.last().expect("anchors");
        let tol = self.cfg.tolerances.symplectic;
        self.bound("upsilon_block", data.submatrix_defect, tol, data.m);
        self.bound("boundary_identity", data.boundary_identity_defect, tolerances::SYMPLECTIC, data.m);
        self.verdict("rank_ml", data.rank_ml == data.d, Some(data.rank_ml as f64), tolerances::RANK, data.m);
        self.bound("theta_wronskian", data.wronskian_defect, tol, h);
        self.put("friedrichs", &data);
        let theta = data.theta.clone();
        self.dump_columns("theta", &theta)
    }

    fn membership(&mut self, files: Option<(PathBuf, PathBuf)>) -> Result<()> {
        let (zp, fp) = match files {
            Some(p) => p,
            None => {
                let m = self
                    .cfg
                    .membership
                    .as_ref()
                    .ok_or_else(|| config_error("membership", "this command needs membership.z and membership.f"))?;
                (self.cfg.resolve(&m.z), self.cfg.resolve(&m.f))
            }
        };
        let sys = self.system()?;
        let dim = 2 * sys.n();
        let k = self.cfg.horizon;
        let z = csvio::read_sequence(&zp, dim)?;
        let f = csvio::read_sequence(&fp, dim)?;
        if z.len() < k + 2 || f.len() < k + 1 {
            return Err(Error::DimensionMismatch(format!(
                "sequences must cover [0, {}]; z has {} rows, f has {}",
                k + 1,
                z.len(),
                f.len()
            )));
        }
        let data = self.friedrichs_pipeline(&sys)?;
        let v = friedrichs_membership(&sys, &z, &f, &data, k)?;
        let t = self.cfg.tolerances;
        for c in &v.conditions {
            let tolerance = match c.tag.as_str() {
                "tmax" => t.residual,
                "tail" => t.tail,
                "x0" => c.tolerance * t.residual / tolerances::RESIDUAL,
                _ => t.limit,
            };
            self.bound(&format!("membership.{}", c.tag), c.value, tolerance, v.horizon);
        }
        let member = self
            .verdicts
            .iter()
            .filter(|v| v.name.starts_with("membership."))
            .all(|v| v.passed);
        self.put("member", member);
        self.put("m", data.m);
        self.put("d", data.d);
        Ok(())
    }
}

/// Runs `command` with `cfg`, writing CSV dumps to `csv_dir` (or to the
/// configured output directory).
pub fn run(command: Command, cfg: &RunConfig, csv_dir: Option<&Path>) -> Report {
    run_with(command, cfg, csv_dir, None)
}

/// Membership of the pair stored in `z_path` and `f_path`.
pub fn emit_membership(cfg: &RunConfig, z_path: &Path, f_path: &Path) -> Report {
    run_with(
        Command::Membership,
        cfg,
        None,
        Some((z_path.to_path_buf(), f_path.to_path_buf())),
    )
}

fn run_with(command: Command, cfg: &RunConfig, csv_dir: Option<&Path>, files: Option<(PathBuf, PathBuf)>) -> Report {
    let start = Instant::now();
    let csv_dir = csv_dir
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.csv_dir.as_deref().map(|d| cfg.resolve(d)));
    let mut r = Run {
        cfg,
        csv_dir,
        verdicts: Vec::new(),
        warnings: Vec::new(),
        data: serde_json::Map::new(),
        csv_files: Vec::new(),
    };
    let outcome = match command {
        Command::Validate => r.validate(),
        Command::Atkinson => r.atkinson(),
        Command::Solve => r.solve(),
        Command::Disconjugacy => r.disconjugacy(),
        Command::Recessive => r.recessive(),
        Command::Classify => r.classify(),
        Command::Friedrichs => r.friedrichs(),
        Command::Membership => r.membership(files),
    };
    let (error, exit_code) = match &outcome {
        Err(e) => (Some(report_error(e)), exit_code_for(e)),
        Ok(()) if r.verdicts.iter().all(|v| v.passed) => (None, EXIT_OK),
        Ok(()) => (None, EXIT_VERDICT),
    };
    Report {
        command,
        config: Some(cfg.echo()),
        seed: cfg.seed,
        verdicts: r.verdicts,
        warnings: r.warnings,
        data: Value::Object(r.data),
        csv_files: r.csv_files,
        error,
        timing: Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
        exit_code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const E1: &str = r#"{"n":1,"coefficients":{"type":"constant","A":[[1]],"B":[[-1]],"C":[[0]],"D":[[1]],"W":[[1]]},"horizon":200,"lambda":-1}"#;

    fn e1_with(extra: &str) -> RunConfig {
        parse_config(&E1.replace("\"horizon\":200", &format!("\"horizon\":200{extra}"))).unwrap()
    }

    #[test]
    fn validate_e1() {
        let r = run(Command::Validate, &e1_with(""), None);
        assert_eq!(r.exit_code, 0, "{}", r.to_json());
        for name in ["coefficients", "fundamental_symplectic", "wronskian", "atkinson", "controllability"] {
            assert!(r.verdict(name).unwrap().passed, "{name}");
        }
    }

    #[test]
    fn friedrichs_e1() {
        let r = run(Command::Friedrichs, &e1_with(""), None);
        assert_eq!(r.exit_code, 0, "{}", r.to_json());
        let data: FriedrichsData = serde_json::from_value(r.data["friedrichs"].clone()).unwrap();
        assert_eq!(data.d, 1);
        assert_eq!(data.m_matrix.shape(), (1, 2));
        assert!((data.m_matrix[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(data.m_matrix[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn disconjugacy_fails_above_spectrum() {
        let r = run(Command::Disconjugacy, &e1_with(",\"nu\":5"), None);
        assert_eq!(r.exit_code, 1);
        assert!(!r.verdict("disconjugacy").unwrap().passed);
        assert!(r.data["first_failure"].is_u64());
    }

    #[test]
    fn missing_lambda_is_a_config_error() {
        let cfg = parse_config(&E1.replace(",\"lambda\":-1", "")).unwrap();
        let r = run(Command::Classify, &cfg, None);
        assert_eq!(r.exit_code, 3);
        assert_eq!(r.error.unwrap().path.as_deref(), Some("lambda"));
    }

    #[test]
    fn report_round_trips_and_is_deterministic() {
        let cfg = e1_with("");
        let a = run(Command::Recessive, &cfg, None);
        let b = run(Command::Recessive, &cfg, None);
        assert_eq!(a.without_timing(), b.without_timing());
        let back: Report = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn command_names_parse() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }
}
