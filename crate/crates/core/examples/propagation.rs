//! Forward and backward propagation, forced solutions and the Lagrange
//! identity.

use sympext::linalg::{c, identity, real_vector, ComplexVector};
use sympext::propagation::{
    fundamental_matrix, lagrange_check, propagate_backward, relation_residuals, solve_forced, wronskian,
};
use sympext::system::examples::e1;

fn main() -> sympext::Result<()> {
    let sys = e1();
    let k = 50;

    // At lambda = 0 the fundamental matrix of E1 grows linearly.
    let phi = fundamental_matrix(&sys, c(0.0, 0.0), k)?;
    println!("Phi_10 = {:.3}", phi.at(10));
    let back = propagate_backward(&sys, c(0.0, 0.0), phi.at(k + 1), k)?;
    println!("backward from Phi_(K+1) returns to I: {:.1e}", (back.at(0) - identity(2)).norm());

    let zero = c(0.0, 0.0);
    let f: Vec<ComplexVector> = (0..=k).map(|i| real_vector(&[(i as f64 * 0.3).sin(), 0.0])).collect();
    let g: Vec<ComplexVector> = (0..=k).map(|i| real_vector(&[1.0 / (1.0 + i as f64), 0.0])).collect();
    let z = solve_forced(&sys, zero, &real_vector(&[1.0, 0.0]), &f)?;
    let w = solve_forced(&sys, zero, &real_vector(&[0.0, 1.0]), &g)?;
    let worst = relation_residuals(&sys, &z.values, &f, zero)?
        .into_iter()
        .fold(0.0, f64::max);
    println!("forced solution residual {worst:.1e}");
    println!("w_0* J z_0 = {:.4}", wronskian(sys.j(), &w.values[0], &z.values[0]));
    let d = lagrange_check(&sys, (&z.values, &f), (&w.values, &g), k)?;
    println!("Lagrange identity discrepancy on [0, {k}] = {d:.1e}");
    Ok(())
}
