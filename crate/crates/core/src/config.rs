//! JSON run configuration for the `sympext` pipeline.
//!
//! Matrix entries are either numbers or `[re, im]` pairs. Defaults are filled
//! in by [`parse_config`], so the echoed configuration is always complete.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, C64};
use crate::system::{CoefficientProvider, StepBlocks};
use crate::tolerances;

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    #[serde(rename = "A")]
    pub a: MatrixSpec,
    #[serde(rename = "B")]
    pub b: MatrixSpec,
    #[serde(rename = "C")]
    pub c: MatrixSpec,
    #[serde(rename = "D")]
    pub d: MatrixSpec,
    #[serde(rename = "W")]
    pub w: MatrixSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightScaledSpec {
    #[serde(rename = "A")]
    pub a: MatrixSpec,
    #[serde(rename = "B")]
    pub b: MatrixSpec,
    #[serde(rename = "C")]
    pub c: MatrixSpec,
    #[serde(rename = "D")]
    pub d: MatrixSpec,
    #[serde(rename = "W")]
    pub w: MatrixSpec,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepsSpec {
    pub steps: Vec<BlockSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartsSpec {
    pub parts: Vec<CoefficientSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoefficientSpec {
    Constant(BlockSpec),
    /// `W_k = W gamma^k`.
    WeightScaled(WeightScaledSpec),
    Periodic(StepsSpec),
    Explicit(StepsSpec),
    DirectSum(PartsSpec),
}

/// Optional overrides of the verdict thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub residual: Option<f64>,
    pub symplectic: Option<f64>,
    pub recessive: Option<f64>,
    pub tail: Option<f64>,
    pub limit: Option<f64>,
    pub lambda_big: Option<f64>,
}

/// Verdict thresholds after applying overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub residual: f64,
    pub symplectic: f64,
    pub recessive: f64,
    pub tail: f64,
    pub limit: f64,
    pub lambda_big: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            residual: tolerances::RESIDUAL,
            symplectic: 1e-8,
            recessive: tolerances::RECESSIVE,
            tail: tolerances::TAIL,
            limit: tolerances::LIMIT,
            lambda_big: tolerances::LAMBDA_BIG,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipFiles {
    pub z: String,
    pub f: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv_dir: Option<String>,
}

/// Raw document as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    coefficients: CoefficientSpec,
    horizon: usize,
    #[serde(default)]
    nu: f64,
    lambda: Option<Scalar>,
    atkinson_window: Option<[usize; 2]>,
    anchors: Option<Vec<usize>>,
    horizons: Option<Vec<usize>>,
    normalization_point: Option<usize>,
    initial: Option<Vec<Scalar>>,
    membership: Option<MembershipFiles>,
    tolerances: Option<ToleranceOverrides>,
    #[serde(default)]
    seed: u64,
    output: Option<OutputSpec>,
}

/// Validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub coefficients: CoefficientSpec,
    pub horizon: usize,
    pub nu: f64,
    pub lambda: Option<Scalar>,
    pub atkinson_window: [usize; 2],
    pub anchors: Vec<usize>,
    pub horizons: Vec<usize>,
    pub normalization_point: Option<usize>,
    pub initial: Option<Vec<Scalar>>,
    pub membership: Option<MembershipFiles>,
    pub tolerances: Thresholds,
    pub seed: u64,
    pub output: OutputSpec,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Path of a deserialization error; missing fields are appended to the
/// path of the enclosing object.
fn error_path(err: &serde_path_to_error::Error<serde_json::Error>) -> String {
    let mut path = err.path().to_string();
    if path == "." {
        path.clear();
    }
    let msg = err.inner().to_string();
    if let Some(rest) = msg.strip_prefix("missing field `") {
        if let Some(field) = rest.split('`').next() {
            if !path.is_empty() {
                path.push('.');
            }
            path.push_str(field);
        }
    }
    if path.is_empty() {
        ".".into()
    } else {
        path
    }
}

fn located<T: serde::de::DeserializeOwned>(value: &Value, prefix: &str) -> Option<(String, String)> {
    let err = serde_path_to_error::deserialize::<_, T>(value.clone()).err()?;
    let inner = error_path(&err);
    let path = if inner == "." {
        prefix.to_string()
    } else if inner.starts_with('[') {
        format!("{prefix}{inner}")
    } else {
        format!("{prefix}.{inner}")
    };
    Some((path, err.into_inner().to_string()))
}

/// Locates an error inside a tagged coefficient object, which the derived
/// deserializer only reports at the object itself.
fn diagnose_coefficients(value: &Value, prefix: &str) -> Option<(String, String)> {
    let obj = value.as_object()?;
    let mut rest = obj.clone();
    let kind = rest.remove("type")?;
    let rest = Value::Object(rest);
    match kind.as_str()? {
        "constant" => located::<BlockSpec>(&rest, prefix),
        "weight_scaled" => located::<WeightScaledSpec>(&rest, prefix),
        "periodic" | "explicit" => located::<StepsSpec>(&rest, prefix),
        "direct_sum" => {
            if let Some(parts) = rest.get("parts").and_then(Value::as_array) {
                for (i, part) in parts.iter().enumerate() {
                    let p = format!("{prefix}.parts[{i}]");
                    if let Some(found) = diagnose_coefficients(part, &p) {
                        return Some(found);
                    }
                }
            }
            located::<PartsSpec>(&rest, prefix)
        }
        _ => None,
    }
}

fn schedule(horizon: usize) -> Vec<usize> {
    vec![horizon / 4, horizon / 2, horizon]
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| config_error(".", format!("invalid JSON: {e}")))?;
    config_from_value(value)
}

pub fn config_from_value(value: Value) -> Result<RunConfig> {
    let coefficients = value.get("coefficients").cloned();
    let raw: RawConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = error_path(&e);
        if path.starts_with("coefficients") {
            if let Some((p, m)) = coefficients.as_ref().and_then(|c| diagnose_coefficients(c, "coefficients")) {
                return config_error(p, m);
            }
        }
        config_error(path, e.into_inner().to_string())
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<RunConfig> {
    let k = raw.horizon;
    if raw.n == 0 {
        return Err(config_error("n", "must be at least 1"));
    }
    if k < 8 {
        return Err(config_error("horizon", format!("must be at least 8, got {k}")));
    }
    if !raw.nu.is_finite() {
        return Err(config_error("nu", "must be finite"));
    }
    if let Some(l) = raw.lambda {
        let v = l.value();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(config_error("lambda", "must be finite"));
        }
    }
    let atkinson_window = raw.atkinson_window.unwrap_or([0, k.min(4 * raw.n)]);
    if atkinson_window[0] > atkinson_window[1] || atkinson_window[1] > k {
        return Err(config_error(
            "atkinson_window",
            format!("need a <= b <= horizon, got {atkinson_window:?}"),
        ));
    }
    let anchors = raw.anchors.unwrap_or_else(|| schedule(k));
    check_schedule("anchors", &anchors, 2, k)?;
    let horizons = raw.horizons.unwrap_or_else(|| schedule(k));
    check_schedule("horizons", &horizons, 2, k)?;
    if let Some(m) = raw.normalization_point {
        if m >= anchors[0] {
            return Err(config_error(
                "normalization_point",
                "must lie below the smallest anchor",
            ));
        }
    }
    if let Some(init) = &raw.initial {
        if init.len() != 2 * raw.n {
            return Err(config_error(
                "initial",
                format!("expected {} entries, got {}", 2 * raw.n, init.len()),
            ));
        }
    }
    let tolerances = thresholds(raw.tolerances.unwrap_or_default())?;
    let parsed = RunConfig {
        n: raw.n,
        coefficients: raw.coefficients,
        horizon: k,
        nu: raw.nu,
        lambda: raw.lambda,
        atkinson_window,
        anchors,
        horizons,
        normalization_point: raw.normalization_point,
        initial: raw.initial,
        membership: raw.membership,
        tolerances,
        seed: raw.seed,
        output: raw.output.unwrap_or_default(),
        base_dir: None,
    };
    let provided = spec_n(&parsed.coefficients, "coefficients")?;
    if provided != parsed.n {
        return Err(config_error(
            "coefficients",
            format!("blocks have size {provided}, but n = {}", parsed.n),
        ));
    }
    Ok(parsed)
}

fn check_schedule(key: &str, s: &[usize], min_len: usize, horizon: usize) -> Result<()> {
    if s.len() < min_len {
        return Err(config_error(key, format!("needs at least {min_len} entries")));
    }
    if s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_error(key, "must be strictly increasing"));
    }
    if s[0] == 0 || s[s.len() - 1] > horizon {
        return Err(config_error(key, "entries must lie in [1, horizon]"));
    }
    Ok(())
}

fn thresholds(o: ToleranceOverrides) -> Result<Thresholds> {
    let d = Thresholds::default();
    let pick = |key: &str, v: Option<f64>, default: f64| match v {
        Some(x) if x.is_finite() && x > 0.0 => Ok(x),
        Some(x) => Err(config_error(format!("tolerances.{key}"), format!("must be positive, got {x}"))),
        None => Ok(default),
    };
    Ok(Thresholds {
        residual: pick("residual", o.residual, d.residual)?,
        symplectic: pick("symplectic", o.symplectic, d.symplectic)?,
        recessive: pick("recessive", o.recessive, d.recessive)?,
        tail: pick("tail", o.tail, d.tail)?,
        limit: pick("limit", o.limit, d.limit)?,
        lambda_big: pick("lambda_big", o.lambda_big, d.lambda_big)?,
    })
}

fn matrix(spec: &MatrixSpec, n: usize, path: &str) -> Result<ComplexMatrix> {
    if spec.len() != n || spec.iter().any(|r| r.len() != n) {
        return Err(config_error(path, format!("expected a {n}x{n} matrix")));
    }
    let m = ComplexMatrix::from_fn(n, n, |i, j| spec[i][j].value());
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(config_error(path, "entries must be finite"));
    }
    Ok(m)
}

fn blocks(a: &MatrixSpec, b: &MatrixSpec, c: &MatrixSpec, d: &MatrixSpec, w: &MatrixSpec, path: &str) -> Result<StepBlocks> {
    let n = a.len();
    if n == 0 {
        return Err(config_error(format!("{path}.A"), "empty matrix"));
    }
    Ok(StepBlocks::new(
        matrix(a, n, &format!("{path}.A"))?,
        matrix(b, n, &format!("{path}.B"))?,
        matrix(c, n, &format!("{path}.C"))?,
        matrix(d, n, &format!("{path}.D"))?,
        matrix(w, n, &format!("{path}.W"))?,
    ))
}

fn step_list(steps: &[BlockSpec], path: &str) -> Result<Vec<StepBlocks>> {
    if steps.is_empty() {
        return Err(config_error(format!("{path}.steps"), "needs at least one step"));
    }
    let n = steps[0].a.len();
    steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = format!("{path}.steps[{i}]");
            if s.a.len() != n {
                return Err(config_error(format!("{p}.A"), "steps mix block sizes"));
            }
            blocks(&s.a, &s.b, &s.c, &s.d, &s.w, &p)
        })
        .collect()
}

fn spec_n(spec: &CoefficientSpec, path: &str) -> Result<usize> {
    Ok(provider_at(spec, path)?.n())
}

fn provider_at(spec: &CoefficientSpec, path: &str) -> Result<CoefficientProvider> {
    Ok(match spec {
        CoefficientSpec::Constant(s) => {
            CoefficientProvider::Constant(blocks(&s.a, &s.b, &s.c, &s.d, &s.w, path)?)
        }
        CoefficientSpec::WeightScaled(s) => {
            if !(s.gamma.is_finite() && s.gamma > 0.0) {
                return Err(config_error(format!("{path}.gamma"), "must be positive"));
            }
            CoefficientProvider::WeightScaled {
                base: blocks(&s.a, &s.b, &s.c, &s.d, &s.w, path)?,
                gamma: s.gamma,
            }
        }
        CoefficientSpec::Periodic(s) => CoefficientProvider::Periodic(step_list(&s.steps, path)?),
        CoefficientSpec::Explicit(s) => CoefficientProvider::Explicit(step_list(&s.steps, path)?),
        CoefficientSpec::DirectSum(PartsSpec { parts }) => {
            if parts.is_empty() {
                return Err(config_error(format!("{path}.parts"), "needs at least one part"));
            }
            CoefficientProvider::DirectSum(
                parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| provider_at(p, &format!("{path}.parts[{i}]")))
                    .collect::<Result<_>>()?,
            )
        }
    })
}

impl RunConfig {
    pub fn provider(&self) -> Result<CoefficientProvider> {
        provider_at(&self.coefficients, "coefficients")
    }

    pub fn lambda_value(&self) -> Option<C64> {
        self.lambda.map(Scalar::value)
    }

    pub fn initial_vector(&self) -> Option<ComplexVector> {
        self.initial
            .as_ref()
            .map(|v| ComplexVector::from_iterator(v.len(), v.iter().map(|s| s.value())))
    }

    /// Resolves a path from the configuration against its directory.
    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Echo of the configuration as JSON.
    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("configuration serializes")
    }
}

/// Sets `key` (dotted, array indices as numbers) to `value`, parsed as JSON
/// when possible and as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_error(assignment, "override must have the form key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(config_error(assignment, "empty override key"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        cur = match cur {
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| config_error(key, format!("`{part}` is not an array index")))?;
                items
                    .get_mut(idx)
                    .ok_or_else(|| config_error(key, format!("index {idx} out of range")))?
            }
            Value::Object(map) => map.entry(part.to_string()).or_insert_with(|| {
                if last {
                    Value::Null
                } else {
                    Value::Object(Default::default())
                }
            }),
            _ => return Err(config_error(key, format!("cannot descend into `{part}`"))),
        };
    }
    *cur = value;
    Ok(())
}

/// Reads a configuration file and applies overrides in order.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(".", format!("cannot read {}: {e}", path.display())))?;
    let mut doc: Value =
        serde_json::from_str(&text).map_err(|e| config_error(".", format!("invalid JSON: {e}")))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let mut cfg = config_from_value(doc)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    Ok(cfg)
}
