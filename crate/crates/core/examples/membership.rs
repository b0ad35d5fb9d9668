//! Builds member and non-member pairs for the shipped configurations, writes
//! them as CSV and checks them against the Friedrichs extension.
//!
//! `cargo run --example membership -- [output dir]` (default: `configs/`).

use std::path::{Path, PathBuf};

use sympext::config::load_config;
use sympext::csvio::write_sequence;
use sympext::linalg::{C64, ComplexVector};
use sympext::recessive::{recessive_solution, trivialize};
use sympext::report::{emit_membership, Report};
use sympext::system::build_system;

fn summary(label: &str, r: &Report) {
    let failed: Vec<&str> = r
        .verdicts
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.name.as_str())
        .collect();
    println!("{label:<28} member = {:<5} exit {} failed {failed:?}", r.data["member"], r.exit_code);
}

fn main() -> sympext::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let out: PathBuf = std::env::args().nth(1).map_or(root.clone(), PathBuf::from);
    std::fs::create_dir_all(&out).map_err(|e| sympext::Error::File(e.to_string()))?;

    for name in ["e1", "e2"] {
        let cfg = load_config(&root.join(format!("{name}.json")), &[])?;
        let sys = build_system(cfg.provider()?, cfg.horizon)?;
        let k = cfg.horizon;
        let lambda = cfg.lambda_value().expect("shipped configs set lambda").re;

        // A longer schedule keeps the column accurate on all of [0, K + 1].
        let rec = recessive_solution(&sys, lambda, &[k / 2, k, 2 * k], None)?;
        let col = rec.solution().column(0);
        let z = trivialize(&sys, &col, 2, 6)?;
        let f = z.forcing.clone().expect("E1 blocks give an admissible patch");
        let z: Vec<ComplexVector> = z.values[..k + 2].to_vec();
        let f: Vec<ComplexVector> = f[..k + 1].to_vec();

        let zp = out.join(format!("{name}_member_z.csv"));
        let fp = out.join(format!("{name}_member_f.csv"));
        write_sequence(&zp, &z)?;
        write_sequence(&fp, &f)?;
        summary(&format!("{name}: trivialized recessive"), &emit_membership(&cfg, &zp, &fp));

        let mut shifted = z.clone();
        shifted[0][0] += C64::new(1e-3, 0.0);
        let sp = out.join(format!("{name}_x0_z.csv"));
        write_sequence(&sp, &shifted)?;
        summary(&format!("{name}: x_0 = 1e-3"), &emit_membership(&cfg, &sp, &fp));

        let zero = vec![ComplexVector::zeros(2 * sys.n()); k + 2];
        let zp0 = out.join(format!("{name}_zero.csv"));
        write_sequence(&zp0, &zero)?;
        summary(&format!("{name}: zero pair"), &emit_membership(&cfg, &zp0, &zp0));
        for p in [sp, zp0] {
            std::fs::remove_file(p).ok();
        }
    }
    Ok(())
}
