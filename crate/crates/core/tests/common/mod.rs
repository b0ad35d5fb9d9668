#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sympext::linalg::{identity, qr, ComplexMatrix, ComplexVector, C64};
use sympext::system::{build_system, CoefficientProvider, StepBlocks, SymplecticSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> ComplexVector {
    ComplexVector::from_fn(dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn real_vector(rng: &mut ChaCha8Rng, dim: usize) -> ComplexVector {
    ComplexVector::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0))
}

fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// `diag(U, U) [[I, eps B], [0, I]] [[I, 0], [eps C, I]]` with unitary `U`,
/// Hermitian `B` (kept away from singular) and `C`, and a positive weight.
pub fn random_blocks(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> StepBlocks {
    let (u, _) = qr(&gaussian_matrix(rng, n, n));
    let e = C64::new(eps, 0.0);
    let b = hermitian(rng, n) + identity(n) * C64::new(2.0, 0.0);
    let c = hermitian(rng, n);
    let g = gaussian_matrix(rng, n, n) * C64::new(0.3, 0.0);
    let w = identity(n) + &g * g.adjoint();
    StepBlocks::new(
        &u * (identity(n) + &b * &c * (e * e)),
        &u * &b * e,
        &u * &c * e,
        u.clone(),
        w,
    )
}

/// Periodic system of size `n` with near-identity steps.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, period: usize, eps: f64) -> SymplecticSystem {
    let steps = (0..period).map(|_| random_blocks(rng, n, eps)).collect();
    build_system(CoefficientProvider::Periodic(steps), period.max(1)).expect("random system is valid")
}

/// Random admissible sequence on `[0, K + 1]`: `u` and `x_{K+1}` are free,
/// `x_k = A_k x_{k+1} + B_k u_{k+1}`.
pub fn random_admissible(sys: &SymplecticSystem, rng: &mut ChaCha8Rng, horizon: usize) -> Vec<ComplexVector> {
    let n = sys.n();
    let mut z = vec![ComplexVector::zeros(2 * n); horizon + 2];
    z[horizon + 1] = real_vector(rng, 2 * n);
    for k in (0..=horizon).rev() {
        let bl = sys.blocks(k);
        let x1 = z[k + 1].rows(0, n).into_owned();
        let u1 = z[k + 1].rows(n, n).into_owned();
        let x = &bl.a * x1 + &bl.b * u1;
        z[k].rows_mut(0, n).copy_from(&x);
        let u = real_vector(rng, n);
        z[k].rows_mut(n, n).copy_from(&u);
    }
    z
}

pub fn report_schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Schema violations of a report document, empty when valid.
pub fn schema_errors(report: &Value) -> Vec<String> {
    let schema = report_schema();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    validator.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path)).collect()
}

pub fn config_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}
