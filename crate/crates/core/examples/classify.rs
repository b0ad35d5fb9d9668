//! Counting square-summable solutions and the limit point / limit circle
//! classification.

use sympext::extension::{classify, count_square_summable, lower_bound_certificate};
use sympext::linalg::c;
use sympext::system::examples::{e1, e1_plus_e2, e2};

fn main() -> sympext::Result<()> {
    let horizons = [40, 80, 160];
    for (name, sys) in [("E1", e1()), ("E2", e2()), ("E1+E2", e1_plus_e2())] {
        for lambda in [c(0.0, 1.0), c(-1.0, 0.0)] {
            let r = count_square_summable(&sys, lambda, &horizons)?;
            println!(
                "{name:<6} lambda = {lambda}: d = {} {:?} -> {:?}",
                r.d_estimate,
                r.confidence,
                classify(&r)
            );
        }
        println!("  nu = -0.5 as lower bound: {:?}", lower_bound_certificate(&sys, -0.5, 60, (0, 4 * sys.n()))?);
    }
    Ok(())
}
