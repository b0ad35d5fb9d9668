//! The quadratic functional on an admissible sequence, its reduced form and
//! its dependence on the spectral parameter.

use sympext::linalg::{c, real_vector, ComplexVector};
use sympext::structure::{functional_shift_check, is_admissible, quadratic_functional, reduced_functional};
use sympext::system::examples::e1;

fn main() -> sympext::Result<()> {
    let sys = e1();
    let k = 20;
    // x_k = x_{k+1} - u_{k+1} with a bump x and x_0 = x_{K+1} = 0.
    let x: Vec<f64> = (0..k + 2)
        .map(|i| (std::f64::consts::PI * i as f64 / (k + 1) as f64).sin())
        .collect();
    let mut z = vec![real_vector(&[0.0, 0.3])];
    for i in 0..=k {
        z.push(real_vector(&[x[i + 1], x[i + 1] - x[i]]));
    }
    let z: Vec<ComplexVector> = z;
    println!("admissible: {}", is_admissible(&sys, &z, (0, k))?);

    for lambda in [-1.0, 0.0, 0.02, 0.05] {
        let f = quadratic_functional(&sys, &z, c(lambda, 0.0), k)?;
        let r = reduced_functional(&sys, &z, c(lambda, 0.0), k)?;
        println!(
            "lambda = {lambda:>5}: F = {:>9.5}  euler sum {:>9.5}  boundary {:>8.5}",
            f.re,
            r.euler_sum.re,
            r.boundary.re
        );
    }
    let gap = functional_shift_check(&sys, &z, c(0.0, 0.0), c(-1.0, 0.0), k)?;
    println!("F_0 - F_-1 - (-1 - 0) <z, z> = {gap:.1e}");
    Ok(())
}
