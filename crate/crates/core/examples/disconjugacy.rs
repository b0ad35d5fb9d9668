//! Disconjugacy on finite windows, the search for eventual
//! disconjugacy and controllability.

use sympext::structure::{controllability_check, disconjugacy_check, nonoscillation_scan};
use sympext::system::examples::{e1, e1_plus_e2};

fn main() -> sympext::Result<()> {
    let sys = e1();
    for nu in [-1.0, 0.0, 0.001, 0.5, 5.0] {
        let r = disconjugacy_check(&sys, nu, 0, 100)?;
        println!(
            "E1 nu = {nu:>5}: disconjugate on [0, 100] = {:<5} first failure {:?}",
            r.disconjugate, r.first_failure
        );
    }
    let w = &disconjugacy_check(&sys, 0.0, 0, 100)?.witness[..3];
    for s in w {
        println!("  k = {}: kernel {} psd {} min eigenvalue {:.3}", s.k, s.kernel_ok, s.psd_ok, s.min_eigenvalue);
    }

    let scan = nonoscillation_scan(&sys, 0.5, 80)?;
    println!("E1 nu = 0.5: every window from {:?} on passes up to {}", scan.first_m, scan.horizon);

    let sum = e1_plus_e2();
    println!("E1+E2 nu = -2: {}", disconjugacy_check(&sum, -2.0, 0, 160)?.disconjugate);
    println!("E1 controllable on [0, 50]: {}", controllability_check(&sys, 0, 50)?);
    Ok(())
}
