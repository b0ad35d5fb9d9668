mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sympext::config::load_config;
use sympext::extension::{canonical_m_l, friedrichs_data, FriedrichsSetup};
use sympext::linalg::{
    hermitian_eigen, hstack, identity, j_matrix, max_abs, pinv, qr, rank, rank_kernel, ComplexMatrix,
    ComplexVector, C64,
};
use sympext::propagation::{propagate_forward, solve_forced, step_backward, step_forward, symplectic_defect, wronskian};
use sympext::recessive::{dominant_solution, recessive_solution, trivialize};
use sympext::report::{run, Command, Report};
use sympext::structure::{
    disconjugacy_check, is_conjoined_at, is_normalized_pair, quadratic_functional, reduced_functional,
    reduced_functional_split,
};
use sympext::system::examples::{e1, e1_plus_e2, e2};
use sympext::system::{check_atkinson, SymplecticSystem};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn low_rank(seed: u64, rows: usize, cols: usize, r: usize) -> ComplexMatrix {
    let mut g = rng(seed);
    gaussian_matrix(&mut g, rows, r) * gaussian_matrix(&mut g, r, cols)
}

fn example(which: usize) -> SymplecticSystem {
    match which {
        0 => e1(),
        1 => e2(),
        _ => e1_plus_e2(),
    }
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn pinv_satisfies_penrose(seed: u64, rows in 1usize..=8, cols in 1usize..=8, r in 1usize..=8) {
        let a = low_rank(seed, rows, cols, r.min(rows).min(cols));
        let p = pinv(&a).unwrap();
        let s = max_abs(&a).max(1.0);
        let ps = max_abs(&p).max(1.0);
        prop_assert!(max_abs(&(&a * &p * &a - &a)) <= 1e-9 * s);
        prop_assert!(max_abs(&(&p * &a * &p - &p)) <= 1e-9 * ps);
        let ap = &a * &p;
        let pa = &p * &a;
        prop_assert!(max_abs(&(&ap - ap.adjoint())) <= 1e-9);
        prop_assert!(max_abs(&(&pa - pa.adjoint())) <= 1e-9);
    }

    #[test]
    fn rank_and_kernel(seed: u64, rows in 1usize..=8, cols in 1usize..=8, r in 1usize..=8) {
        let r = r.min(rows).min(cols);
        let a = low_rank(seed, rows, cols, r);
        let rk = rank_kernel(&a, 1e-10).unwrap();
        prop_assert_eq!(rk.rank, r);
        prop_assert_eq!(rk.kernel.ncols(), cols - r);
        prop_assert!(max_abs(&(&a * &rk.kernel)) <= 1e-10 * max_abs(&a).max(1.0));
        let mut g = rng(seed ^ 0x5eed);
        let (u, _) = qr(&gaussian_matrix(&mut g, rows, rows));
        let (v, _) = qr(&gaussian_matrix(&mut g, cols, cols));
        prop_assert_eq!(rank(&(&u * &a * &v), 1e-10).unwrap(), r);
    }

    #[test]
    fn hermitian_eigen_reconstructs(seed: u64, n in 1usize..=8) {
        let mut g = rng(seed);
        let m = gaussian_matrix(&mut g, n, n);
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let e = hermitian_eigen(&h).unwrap();
        let v = &e.vectors;
        prop_assert!(max_abs(&(v.adjoint() * v - identity(n))) <= 1e-12);
        let d = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(n, e.values.iter().map(|&x| C64::new(x, 0.0))));
        prop_assert!(max_abs(&(v * d * v.adjoint() - &h)) <= 1e-12 * max_abs(&h).max(1.0));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn single_steps_are_symplectic(seed: u64, n in 1usize..=4, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let mut g = rng(seed);
        let sys = random_system(&mut g, n, 3, 0.3);
        let lambda = C64::new(re, im);
        let j = sys.j();
        for k in 0..3 {
            let s = sys.s_lambda(k, lambda);
            let sb = sys.s_lambda(k, lambda.conj());
            let scale = max_abs(&s).powi(2).max(1.0);
            prop_assert!(max_abs(&(sb.adjoint() * j * &s - j)) <= 1e-12 * scale);
            let psi = sys.psi(k);
            prop_assert!(max_abs(&(&psi - psi.adjoint())) <= 1e-14);
            prop_assert!(hermitian_eigen(&psi).unwrap().values[0] >= -1e-12);
            prop_assert!(max_abs(&(&psi * j * &psi)) <= 1e-12);
        }
    }

    #[test]
    fn backward_then_forward_is_identity(seed: u64, n in 1usize..=4, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let mut g = rng(seed);
        let sys = random_system(&mut g, n, 2, 0.2);
        let lambda = C64::new(re, im);
        let z = random_vector(&mut g, 2 * n);
        let f = random_vector(&mut g, 2 * n);
        for forcing in [None, Some(&f)] {
            let back = step_backward(&sys, &z, 1, lambda, forcing);
            let again = step_forward(&sys, &back, 1, lambda, forcing);
            prop_assert!((again - &z).norm() <= 1e-12 * (1.0 + z.norm()));
        }
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn atkinson_is_monotone_in_the_window(seed: u64, which in 0usize..4, a in 0usize..6, len in 0usize..10, grow in 0usize..6) {
        let mut g = rng(seed);
        let sys = if which == 3 { random_system(&mut g, 2, 2, 0.1) } else { example(which) };
        let lambda = C64::new(g.random_range(-0.5..0.5), 0.0);
        let small = check_atkinson(&sys, lambda, (a, a + len)).unwrap();
        let big = check_atkinson(&sys, lambda, (a.saturating_sub(grow), a + len + grow)).unwrap();
        let low = |g: &ComplexMatrix| hermitian_eigen(g).unwrap().values;
        let (ls, lb) = (low(&small.gram), low(&big.gram));
        prop_assert!(lb[0] >= ls[0] - 1e-12 * lb.last().unwrap().max(1.0));
        if small.holds {
            prop_assert!(big.holds);
        }
    }

    #[test]
    fn atkinson_does_not_depend_on_lambda(which in 0usize..3, b in 0usize..8, l1 in -1.0f64..1.0, l2 in -1.0f64..1.0, im in -1.0f64..1.0) {
        let sys = example(which);
        let first = check_atkinson(&sys, C64::new(l1, 0.0), (0, b)).unwrap().holds;
        let second = check_atkinson(&sys, C64::new(l2, im), (0, b)).unwrap().holds;
        prop_assert_eq!(first, second);
    }

    #[test]
    fn real_lambda_fundamental_matrix_is_symplectic(seed: u64, n in 1usize..=4, lambda in -0.05f64..0.05) {
        let mut g = rng(seed);
        let sys = random_system(&mut g, n, 3, 0.01);
        prop_assert!(symplectic_defect(&sys, C64::new(lambda, 0.0), 100).unwrap() <= 1e-9);
    }

    #[test]
    fn wronskian_is_constant(seed: u64, n in 1usize..=3, re in -0.05f64..0.05) {
        let mut g = rng(seed);
        let sys = random_system(&mut g, n, 2, 0.02);
        let lambda = C64::new(re, 0.0);
        let start = gaussian_matrix(&mut g, 2 * n, 2);
        let pair = propagate_forward(&sys, lambda, &start, 100).unwrap();
        let w = |k: usize| wronskian(sys.j(), &pair.at(k).column(0).into_owned(), &pair.at(k).column(1).into_owned());
        let w0 = w(0);
        for k in 0..pair.len() {
            prop_assert!((w(k) - w0).norm() <= 1e-10);
        }
    }

    #[test]
    fn conjoined_bases_stay_conjoined(seed: u64, n in 1usize..=3, re in -0.05f64..0.05) {
        let mut g = rng(seed);
        let sys = random_system(&mut g, n, 2, 0.02);
        let h = gaussian_matrix(&mut g, n, n);
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let z0 = sympext::linalg::vstack(&[&identity(n), &h]);
        let z = propagate_forward(&sys, C64::new(re, 0.0), &z0, 60).unwrap();
        for k in 0..z.len() {
            prop_assert!(is_conjoined_at(sys.j(), &z, k).unwrap());
        }
    }

    #[test]
    fn functional_matches_reduced_form(seed: u64, n in 1usize..=3, re in -1.0f64..1.0) {
        let mut g = rng(seed);
        let sys = random_system(&mut g, n, 3, 0.2);
        let horizon = 30;
        let z = random_admissible(&sys, &mut g, horizon);
        let lambda = C64::new(re, 0.0);
        let full = quadratic_functional(&sys, &z, lambda, horizon).unwrap();
        let reduced = reduced_functional(&sys, &z, lambda, horizon).unwrap().value();
        let split = reduced_functional_split(&sys, &z, lambda, horizon).unwrap();
        let scale = 1.0 + z.iter().map(|v| v.norm_squared()).sum::<f64>();
        prop_assert!((full - reduced).norm() <= 1e-10 * scale);
        prop_assert!((full - split).norm() <= 1e-10 * scale);
    }

    #[test]
    fn disconjugacy_restricts_to_subintervals(which in 0usize..3, nu in -2.0f64..0.5, m in 0usize..10, len in 1usize..40, cut_lo in 0usize..10, cut_hi in 0usize..10) {
        let sys = example(which);
        let n_end = m + len;
        let whole = disconjugacy_check(&sys, nu, m, n_end).unwrap();
        prop_assume!(whole.disconjugate);
        let lo = m + cut_lo.min(len - 1);
        let hi = n_end.saturating_sub(cut_hi).max(lo + 1);
        prop_assert!(disconjugacy_check(&sys, nu, lo, hi).unwrap().disconjugate);
    }

    #[test]
    fn disconjugacy_gives_a_positive_functional(seed: u64, which in 0usize..2, nu in -1.0f64..0.05, len in 2usize..30) {
        // E1 and E2 share A = 1, B = -1, so x_k = x_{k+1} - u_{k+1}.
        let sys = example(which);
        prop_assume!(disconjugacy_check(&sys, nu, 0, len).unwrap().disconjugate);
        let mut g = rng(seed);
        let mut x = vec![0.0; len + 2];
        for v in x.iter_mut().take(len + 1).skip(1) {
            *v = g.random_range(-1.0..1.0);
        }
        let mut z = vec![ComplexVector::zeros(2); len + 2];
        z[0][1] = C64::new(g.random_range(-1.0..1.0), 0.0);
        for k in 0..=len {
            z[k + 1][0] = C64::new(x[k + 1], 0.0);
            z[k + 1][1] = C64::new(x[k + 1] - x[k], 0.0);
        }
        let value = quadratic_functional(&sys, &z, C64::new(nu, 0.0), len).unwrap();
        prop_assert!(value.re > 0.0);
        prop_assert!(value.im.abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(cases(8))]

    #[test]
    fn dominant_and_recessive_form_a_normalized_pair(which in 0usize..2, nu in -2.0f64..-0.1) {
        let sys = example(which);
        let rec = recessive_solution(&sys, nu, &[40, 80, 160], None).unwrap();
        let z = rec.solution().truncate(rec.reliable_horizon.min(100));
        let dom = dominant_solution(&sys, &z, rec.m).unwrap();
        prop_assert!(is_normalized_pair(sys.j(), &z, &dom));
        let ratio: Vec<f64> = (rec.m + 1..=z.horizon())
            .map(|k| (z.x(k)[(0, 0)] / dom.x(k)[(0, 0)]).norm())
            .collect();
        prop_assert!(ratio.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    }

    #[test]
    fn recessive_is_unique_up_to_a_right_factor(which in 0usize..3, nu in -2.0f64..-0.2) {
        let sys = example(which);
        let a = recessive_solution(&sys, nu, &[40, 80, 160], None).unwrap();
        let b = recessive_solution(&sys, nu, &[30, 60, 90, 120], Some(a.m + 1)).unwrap();
        let m = a.m.max(b.m);
        let factor = sympext::linalg::inverse(&b.solution().x(m)).unwrap() * a.solution().x(m);
        let upto = a.reliable_horizon.min(b.reliable_horizon).min(80);
        for k in 0..=upto {
            let diff = max_abs(&(b.solution().at(k) * &factor - a.solution().at(k)));
            prop_assert!(diff <= 1e-6 * max_abs(a.solution().at(k)).max(1e-300));
        }
    }

    #[test]
    fn friedrichs_data_is_consistent(lambda in -3.0f64..-0.3) {
        let setup = FriedrichsSetup { nu: 0.0, lambda, anchors: vec![40, 80, 160], horizons: vec![40, 80, 160], m: None };
        let (data, _, _) = friedrichs_data(&e2(), &setup).unwrap();
        prop_assert_eq!(data.rank_ml, data.d);
        prop_assert!(data.submatrix_defect <= 1e-8);
        prop_assert!(data.boundary_identity_defect <= 1e-10);
        prop_assert!(data.wronskian_defect <= 1e-8);
    }

    #[test]
    fn boundary_forms_of_members_vanish(l1 in -3.0f64..-0.3, l2 in -3.0f64..-0.3) {
        let sys = e2();
        let member = |lambda: f64| {
            let rec = recessive_solution(&sys, lambda, &[80, 160, 320], None).unwrap();
            trivialize(&sys, &rec.solution().column(0), 2, 6).unwrap().values
        };
        let (z, w) = (member(l1), member(l2));
        let form = |k: usize| (wronskian(sys.j(), &w[0], &z[0]) - wronskian(sys.j(), &w[k + 1], &z[k + 1])).norm();
        prop_assert!(form(160) <= form(40) + 1e-12);
        prop_assert!(form(160) <= 1e-6);
    }

    #[test]
    fn reports_are_deterministic_and_round_trip(seed: u64, command in prop::sample::select(vec![Command::Validate, Command::Solve, Command::Recessive])) {
        let path = config_path("e1.json");
        let cfg = load_config(&path, &[format!("seed={seed}"), "initial=null".into(), "horizon=60".into(), "anchors=[15,30,60]".into(), "horizons=[15,30,60]".into()]).unwrap();
        let a = run(command, &cfg, None);
        let b = run(command, &cfg, None);
        prop_assert_eq!(a.without_timing(), b.without_timing());
        let back: Report = serde_json::from_str(&a.to_json()).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn canonical_boundary_matrices() {
    for n in 1..=4 {
        for d in n..=2 * n {
            let (m, l) = canonical_m_l(n, d);
            let lhs = &m * j_matrix(n) * m.adjoint();
            let rhs = if d > n { &l * j_matrix(d - n) * l.adjoint() } else { ComplexMatrix::zeros(d, d) };
            assert!(max_abs(&(lhs - rhs)) <= 1e-15, "n = {n}, d = {d}");
            assert_eq!(rank(&hstack(&[&m, &l]), 1e-12).unwrap(), d);
        }
    }
}

#[test]
fn forced_solutions_reach_their_forcing() {
    let mut g = rng(11);
    let sys = random_system(&mut g, 2, 2, 0.1);
    let f: Vec<ComplexVector> = (0..=20).map(|_| random_vector(&mut g, 4)).collect();
    let z = solve_forced(&sys, C64::new(0.3, 0.1), &random_vector(&mut g, 4), &f).unwrap();
    for k in 0..=20 {
        let back = step_backward(&sys, &z.values[k + 1], k, z.lambda, Some(&f[k]));
        assert!((back - &z.values[k]).norm() <= 1e-12 * (1.0 + z.values[k].norm()));
    }
}
