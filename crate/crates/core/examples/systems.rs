//! Coefficient providers, the symplectic structure of each step and the
//! definiteness condition on a window.

use sympext::linalg::{c, max_abs, real_matrix};
use sympext::propagation::symplectic_defect;
use sympext::system::examples::{e1, e1_plus_e2, e2};
use sympext::system::{build_system, check_atkinson, CoefficientProvider, StepBlocks};

fn main() -> sympext::Result<()> {
    // A two-periodic rotation-like system built by hand.
    let steps = vec![
        StepBlocks::scalar(1.0, -1.0, 0.0, 1.0, 1.0),
        StepBlocks::new(
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 1, &[-0.5]),
            real_matrix(1, 1, &[0.0]),
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 1, &[2.0]),
        ),
    ];
    let periodic = build_system(CoefficientProvider::Periodic(steps), 2)?;

    for (name, sys) in [("E1", e1()), ("E2", e2()), ("E1+E2", e1_plus_e2()), ("periodic", periodic)] {
        let j = sys.j();
        let s = sys.s_lambda(3, c(0.5, 0.25));
        let sb = sys.s_lambda(3, c(0.5, -0.25));
        let step = max_abs(&(sb.adjoint() * j * &s - j));
        let whole = symplectic_defect(&sys, c(1.0, 0.0), 200)?;
        let atk = check_atkinson(&sys, c(0.0, 0.0), (0, 4 * sys.n()))?;
        println!(
            "{name:<9} n = {}  step defect {step:.1e}  Phi defect on [0, 200] {whole:.1e}  definite on [0, {}]: {} (eigenvalues {:.3?})",
            sys.n(),
            4 * sys.n(),
            atk.holds,
            atk.eigenvalues
        );
    }
    Ok(())
}
