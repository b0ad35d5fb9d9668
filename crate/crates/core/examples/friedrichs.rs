//! Boundary data of the Friedrichs extension: the matrices `M` and `L`, the
//! Wronskian block and the solutions whose boundary forms define it.
//!
//! `cargo run --example friedrichs -- [csv dir]`

use std::path::PathBuf;

use sympext::csvio::write_sequence;
use sympext::extension::{friedrichs_data, FriedrichsSetup};
use sympext::system::examples::{e1, e2};

fn main() -> sympext::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let setup = FriedrichsSetup {
        nu: 0.0,
        lambda: -1.0,
        anchors: vec![40, 80, 160],
        horizons: vec![40, 80, 160],
        m: None,
    };
    for (name, sys) in [("E1", e1()), ("E2", e2())] {
        let (data, rec, count) = friedrichs_data(&sys, &setup)?;
        println!("{name}: d = {} ({:?}), m = {}, recessive error {:.1e}", data.d, count.confidence, data.m, rec.error_estimate);
        println!("  M = {:.4}  L = {:.4}", data.m_matrix, data.l_matrix);
        println!("  Upsilon = {:.6}", data.upsilon);
        println!(
            "  rank [M L] = {}, boundary identity {:.1e}, Wronskian drift {:.1e}, boundary columns {:?}",
            data.rank_ml,
            data.boundary_identity_defect,
            data.wronskian_defect,
            data.boundary_columns()
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).map_err(|e| sympext::Error::File(e.to_string()))?;
            for j in 0..data.theta.cols() {
                let path = dir.join(format!("{}_theta_c{j}.csv", name.to_lowercase()));
                write_sequence(&path, &data.theta.column(j).values)?;
                println!("  wrote {}", path.display());
            }
        }
    }
    Ok(())
}
