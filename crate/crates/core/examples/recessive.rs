//! Recessive solutions at infinity, their certificate and the companion
//! dominant solution.

use sympext::recessive::{dominant_solution, recessive_certificate, recessive_solution};
use sympext::structure::is_normalized_pair;
use sympext::system::examples::{e1, e1_plus_e2, e2};

fn main() -> sympext::Result<()> {
    for (name, sys, nu) in [("E1", e1(), 0.0), ("E2", e2(), -0.5), ("E1+E2", e1_plus_e2(), -1.0)] {
        let rec = recessive_solution(&sys, nu, &[40, 80, 160], None)?;
        let cert = recessive_certificate(&sys, &rec, 160)?;
        println!(
            "{name:<6} nu = {nu:>4}: m = {}, method {:?}, error {:.1e}, reliable to {}, certificate ok = {}",
            rec.m, rec.method, rec.error_estimate, rec.reliable_horizon, cert.ok
        );
        let z = rec.solution().truncate(rec.reliable_horizon.min(100));
        for k in [0, 10, 50] {
            println!("  X~_{k} = {:.6e}", z.x(k)[(0, 0)]);
        }
        let dom = dominant_solution(&sys, &z, rec.m)?;
        println!("  normalized pair: {}", is_normalized_pair(sys.j(), &z, &dom));
    }
    Ok(())
}
