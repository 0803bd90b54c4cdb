//! Time evolution and success probability against closed forms and structural
//! properties of unitary dynamics.

use std::f64::consts::PI;

use johnson_walk::coupling::gamma_star;
use johnson_walk::dynamics::{
    energy, evolve, find_peak, run_time, scan, success_probability, ComplexState, ReducedSearch,
};
use johnson_walk::eigen::{jacobi_eig, sym_eig, tridiagonal_eig};
use johnson_walk::johnson::adjacency_matrix;
use johnson_walk::spectral::{overlap, reduced_hamiltonian, reduced_initial_state};
use johnson_walk::{Error, GraphParams, SymMatrix, DEFAULT_FULL_CAP};
use proptest::prelude::*;

fn params(n: usize, k: usize) -> GraphParams {
    GraphParams::new(n, k).unwrap()
}

/// p(t) for k = 1 from the analytic exponential of a 2×2 symmetric matrix.
fn two_level_probability(n: usize, gamma: f64, t: f64) -> f64 {
    let p = params(n, 1);
    let (p0, p1) = (overlap(&p, 0).unwrap(), overlap(&p, 1).unwrap());
    let a = -gamma * (n - 1) as f64 - p0 * p0;
    let d = gamma - p1 * p1;
    let b = -p0 * p1;
    let delta = (d - a) / 2.0;
    let omega = (delta * delta + b * b).sqrt();
    let (s, c) = (omega * t).sin_cos();
    p0 * p0 * c * c + (p0 * delta - p1 * b).powi(2) * s * s / (omega * omega)
}

#[test]
fn two_level_dynamics_match_closed_form() {
    for n in [2, 3, 7, 50, 1000] {
        for gamma in [gamma_star(&params(n, 1)), 0.3, 2.0 / n as f64] {
            let model = ReducedSearch::new(&params(n, 1), gamma).unwrap();
            for i in 0..200 {
                let t = i as f64 * 0.173;
                let diff = (model.probability(t) - two_level_probability(n, gamma, t)).abs();
                assert!(diff <= 1e-12, "n={n} gamma={gamma} t={t}: {diff:e}");
            }
        }
    }
}

#[test]
fn edge_graph_peak_at_critical_coupling() {
    // n = 2: γ° = 1/4, Ω = √5/4, so the first maximum is p = 9/10 at t = 2π/√5
    let p = params(2, 1);
    assert_eq!(gamma_star(&p), 0.25);
    let t_run = run_time(&p);
    assert!((t_run - PI * 2f64.sqrt() / 2.0).abs() < 1e-15);
    let (t_peak, p_peak) = find_peak(&p, 0.25, (0.0, 2.0 * t_run)).unwrap();
    let t_exact = 2.0 * PI / 5f64.sqrt();
    assert!((t_peak - t_exact).abs() <= 1e-6 * t_exact);
    assert!((p_peak - 0.9).abs() <= 1e-12);
    assert!(p_peak >= success_probability(&p, 0.25, t_run).unwrap());
}

#[test]
fn probability_at_time_zero_is_one_over_n() {
    for (n, k) in [(2, 1), (6, 3), (30, 4), (1000, 3)] {
        let p = params(n, k);
        let expect = 1.0 / p.num_vertices() as f64;
        let got = success_probability(&p, gamma_star(&p), 0.0).unwrap();
        assert!((got - expect).abs() <= 1e-14 * expect.max(1e-3));
    }
}

#[test]
fn run_time_examples() {
    assert!((run_time(&params(100, 1)) - 5.0 * PI).abs() < 1e-12);
    assert!((run_time(&params(100, 2)) - 100.0 * PI / (2.0 * 2f64.sqrt())).abs() < 1e-10);
    for n in [2, 17, 1000] {
        let p = params(n, 1);
        assert!((run_time(&p) / (PI * (n as f64).sqrt() / 2.0) - 1.0).abs() < 1e-15);
    }
    for k in 2..=3 {
        let mut previous = f64::INFINITY;
        for n in [100, 1000, 10_000, 100_000] {
            let p = params(n, k);
            let dev = (run_time(&p) / (PI * (p.num_vertices() as f64).sqrt() / 2.0) - 1.0).abs();
            assert!(dev < previous);
            previous = dev;
        }
        assert!(previous < 1e-4);
    }
}

#[test]
fn scan_grid_and_errors() {
    let p = params(6, 3);
    let gamma = gamma_star(&p);
    let two = scan(&p, gamma, 0.0, 3.0, 2).unwrap();
    assert_eq!(two.times, vec![0.0, 3.0]);
    assert!((two.probs[0] - 0.05).abs() < 1e-15);
    assert!((two.probs[1] - success_probability(&p, gamma, 3.0).unwrap()).abs() < 1e-15);
    let many = scan(&p, gamma, 1.0, 2.0, 11).unwrap();
    assert_eq!(many.times.len(), 11);
    assert_eq!(*many.times.last().unwrap(), 2.0);
    assert!(matches!(scan(&p, gamma, 0.0, 1.0, 1), Err(Error::Domain(_))));
    assert!(matches!(scan(&p, gamma, 1.0, 1.0, 5), Err(Error::Domain(_))));
    assert!(matches!(scan(&p, gamma, -1.0, 1.0, 5), Err(Error::Domain(_))));
}

#[test]
fn peak_needs_an_interior_maximum() {
    let p = params(20, 2);
    let t_run = run_time(&p);
    // p(t) rises monotonically on a short initial window
    let err = find_peak(&p, gamma_star(&p), (0.0, 0.05 * t_run)).unwrap_err();
    assert!(matches!(err, Error::Bracket { .. }));
}

#[test]
fn peak_dominates_running_time_sample() {
    for (n, k) in [(6, 3), (20, 2), (40, 3), (100, 1), (30, 5)] {
        let p = params(n, k);
        let gamma = gamma_star(&p);
        let t_run = run_time(&p);
        let (t_peak, p_peak) = find_peak(&p, gamma, (0.0, 2.0 * t_run)).unwrap();
        assert!(p_peak >= success_probability(&p, gamma, t_run).unwrap() - 1e-15);
        assert!(t_peak > 0.0 && t_peak < 2.0 * t_run);
    }
    // small-n deviation of the peak time from t_run; the full-space scan puts
    // the maximum p = 0.916064 at t_peak / t_run = 0.8227
    let p = params(6, 3);
    let (t_peak, p_peak) = find_peak(&p, gamma_star(&p), (0.0, 2.0 * run_time(&p))).unwrap();
    assert!((t_peak / run_time(&p) - 0.8227).abs() < 1e-3);
    assert!((p_peak - 0.916064).abs() < 1e-6);
}

/// Least-squares residual of y against span{1, cos ωt, sin ωt} via modified Gram–Schmidt.
fn trig_fit_residual(times: &[f64], y: &[f64], freqs: &[f64]) -> f64 {
    let mut columns: Vec<Vec<f64>> = vec![vec![1.0; times.len()]];
    for &w in freqs {
        columns.push(times.iter().map(|t| (w * t).cos()).collect());
        columns.push(times.iter().map(|t| (w * t).sin()).collect());
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut c in columns {
        for q in &basis {
            let d: f64 = c.iter().zip(q).map(|(a, b)| a * b).sum();
            c.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(c.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut r = y.to_vec();
    for q in &basis {
        let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
        r.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
    }
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn probability_is_a_trigonometric_polynomial() {
    for (n, k) in [(4, 1), (9, 2), (10, 3), (14, 3)] {
        let p = params(n, k);
        let model = ReducedSearch::new(&p, gamma_star(&p)).unwrap();
        let e = &model.decomposition().values;
        let mut freqs: Vec<f64> = Vec::new();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                freqs.push(e[j] - e[i]);
            }
        }
        assert!(freqs.len() < (k + 2) * (k + 1) / 2);
        let t1 = 2.0 * run_time(&p);
        let times: Vec<f64> = (0..400).map(|i| t1 * i as f64 / 399.0).collect();
        let y: Vec<f64> = times.iter().map(|&t| model.probability(t)).collect();
        let residual = trig_fit_residual(&times, &y, &freqs);
        assert!(residual <= 1e-10, "({n},{k}): {residual:e}");
        // dropping the dominant frequency must leave a visible residual
        let slow = freqs.iter().copied().fold(f64::INFINITY, f64::min);
        let without: Vec<f64> = freqs.iter().copied().filter(|&f| f != slow).collect();
        assert!(trig_fit_residual(&times, &y, &without) > 1e-3);
    }
}

#[test]
fn energy_is_conserved_along_a_scan() {
    for (n, k) in [(6, 3), (25, 2), (60, 4)] {
        let p = params(n, k);
        let h = reduced_hamiltonian(&p, gamma_star(&p)).unwrap().matrix;
        let dec = sym_eig(&h).unwrap();
        let psi0 = ComplexState::from_real(&reduced_initial_state(&p));
        let e0 = energy(&h, &psi0);
        for i in 0..100 {
            let psi = evolve(&dec, &psi0, i as f64 * run_time(&p) / 50.0).unwrap();
            assert!((energy(&h, &psi) - e0).abs() <= 1e-10);
        }
    }
}

#[test]
fn evolve_identity_and_dimension_check() {
    let p = params(6, 3);
    let h = reduced_hamiltonian(&p, 0.2).unwrap().matrix;
    let dec = sym_eig(&h).unwrap();
    let psi0 = ComplexState::from_real(&[0.5, -0.5, 0.5, 0.5]);
    assert!(evolve(&dec, &psi0, 0.0).unwrap().max_abs_diff(&psi0) <= 1e-14);
    assert!(evolve(&dec, &ComplexState::from_real(&[1.0, 0.0]), 1.0).is_err());
}

#[test]
fn eigensolver_examples() {
    let one = sym_eig(&SymMatrix::diagonal(&[2.5])).unwrap();
    assert_eq!(one.values, vec![2.5]);
    assert_eq!(one.vector(0).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1.0]);
    let d = sym_eig(&SymMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
    assert_eq!(d.values, vec![1.0, 2.0, 3.0]);
    for (j, row) in [1usize, 2, 0].iter().enumerate() {
        assert_eq!(d.component(*row, j).abs(), 1.0);
    }
    let p = params(6, 3);
    let h = reduced_hamiltonian(&p, gamma_star(&p)).unwrap().matrix;
    let dec = sym_eig(&h).unwrap();
    assert!(dec.reconstruct().add_scaled(-1.0, &h).max_abs() <= 1e-10);
}

#[test]
fn jacobi_and_tridiagonal_solvers_agree() {
    for (n, k) in [(9, 3), (10, 2), (8, 4)] {
        let a = adjacency_matrix(&params(n, k), DEFAULT_FULL_CAP).unwrap();
        let jac = jacobi_eig(&a).unwrap();
        let ql = tridiagonal_eig(&a).unwrap();
        for (x, y) in jac.values.iter().zip(&ql.values) {
            assert!((x - y).abs() <= 1e-10);
        }
        for dec in [&jac, &ql] {
            assert!(dec.orthogonality_residual() <= 1e-12);
            assert!(dec.residual(&a) <= 1e-10);
        }
    }
    // above the Jacobi limit the dispatcher uses the tridiagonal path
    let big = adjacency_matrix(&params(12, 4), DEFAULT_FULL_CAP).unwrap();
    let dec = sym_eig(&big).unwrap();
    assert_eq!(dec.dim(), 495);
    assert!(dec.residual(&big) <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn evolution_is_unitary(k in 1usize..=5, extra in 0usize..40, scale in -1.0f64..1.0, t1 in 0.0f64..50.0, t2 in 0.0f64..50.0) {
        let p = params(2 * k + extra, k);
        let gamma = gamma_star(&p) * 10f64.powf(scale);
        let dec = sym_eig(&reduced_hamiltonian(&p, gamma).unwrap().matrix).unwrap();
        let psi0 = ComplexState::from_real(&reduced_initial_state(&p));
        let a = evolve(&dec, &psi0, t1).unwrap();
        prop_assert!((a.norm() - 1.0).abs() <= 1e-12);
        prop_assert!(evolve(&dec, &a, -t1).unwrap().max_abs_diff(&psi0) <= 1e-12);
        let b = evolve(&dec, &a, t2).unwrap();
        prop_assert!(evolve(&dec, &psi0, t1 + t2).unwrap().max_abs_diff(&b) <= 1e-12);
    }
}
