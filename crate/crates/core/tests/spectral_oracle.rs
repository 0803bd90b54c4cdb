//! Closed-form spectral data against dense eigendecompositions of the full graph.

use johnson_walk::eigen::sym_eig;
use johnson_walk::johnson::full_hamiltonian;
use johnson_walk::spectral::{
    eigenvalue, multiplicity, overlap, overlap_sq_factorial, reduced_hamiltonian, reduced_initial_state,
    reduced_marked_state, SpectralData,
};
use johnson_walk::validation::{check_spectrum, AdjacencyOracle};
use johnson_walk::{GraphParams, VertexId, DEFAULT_FULL_CAP};

fn params(n: usize, k: usize) -> GraphParams {
    GraphParams::new(n, k).unwrap()
}

fn oracle_instances() -> impl Iterator<Item = GraphParams> {
    (1..=4).flat_map(|k| (2 * k..=12).map(move |n| params(n, k))).filter(|p| p.num_vertices() <= 500)
}

#[test]
fn eigenvalues_and_multiplicities_of_small_graphs() {
    let cases: [(usize, usize, &[f64], &[u64]); 2] =
        [(6, 3, &[9.0, 3.0, -1.0, -3.0], &[1, 5, 9, 5]), (4, 2, &[4.0, 0.0, -2.0], &[1, 3, 2])];
    for (n, k, lambdas, mults) in cases {
        let p = params(n, k);
        for ell in 0..=k {
            assert_eq!(eigenvalue(&p, ell).unwrap(), lambdas[ell]);
            assert_eq!(multiplicity(&p, ell).unwrap(), mults[ell]);
        }
        let clusters = AdjacencyOracle::new(&p, DEFAULT_FULL_CAP).unwrap().clusters();
        assert_eq!(clusters.len(), k + 1);
        for ((value, count), (&lam, &m)) in clusters.iter().zip(lambdas.iter().zip(mults)) {
            assert!((value - lam).abs() < 1e-10);
            assert_eq!(*count, m);
        }
    }
}

#[test]
fn closed_form_spectrum_matches_dense_eigensolve() {
    for p in oracle_instances() {
        let report = check_spectrum(&p, DEFAULT_FULL_CAP).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }
}

#[test]
fn explicit_projectors_reproduce_overlaps() {
    for p in oracle_instances().filter(|p| p.num_vertices() <= 220) {
        let oracle = AdjacencyOracle::new(&p, DEFAULT_FULL_CAP).unwrap();
        for w in [0, p.num_vertices() - 1] {
            let projected = oracle.projected_marked(VertexId(w)).unwrap();
            for (ell, v) in projected.iter().enumerate() {
                let norm_sq: f64 = v.iter().map(|x| x * x).sum();
                let expect = overlap(&p, ell).unwrap().powi(2);
                assert!((norm_sq - expect).abs() < 1e-10, "J({},{}) ℓ={ell}", p.n(), p.k());
            }
        }
    }
}

#[test]
fn overlaps_of_j63() {
    let p = params(6, 3);
    let expect = [0.05f64, 0.25, 0.45, 0.25];
    for (ell, e) in expect.iter().enumerate() {
        assert!((overlap(&p, ell).unwrap() - e.sqrt()).abs() < 1e-15);
    }
    let marked = reduced_marked_state(&p);
    assert_eq!(marked.len(), 4);
    assert!((marked[0] - (1.0f64 / 20.0).sqrt()).abs() < 1e-16);
}

#[test]
fn overlap_forms_agree_and_are_complete() {
    for k in 1..=8 {
        for n in 2 * k..=60 {
            let p = params(n, k);
            let spec = SpectralData::new(&p).unwrap();
            assert_eq!(spec.mults.iter().sum::<u64>(), p.num_vertices());
            let total: f64 = spec.overlaps_sq.iter().sum();
            assert!((total - 1.0).abs() <= 1e-14);
            for ell in 0..=k {
                let ratio = spec.overlaps_sq[ell];
                let fact = overlap_sq_factorial(&p, ell).unwrap();
                assert!(((fact - ratio) / ratio).abs() <= 1e-13, "({n},{k}) ℓ={ell}");
            }
        }
    }
}

#[test]
fn overlaps_complete_for_huge_graphs() {
    for (n, k) in [(1_000_000, 3), (100_000, 3), (1000, 6), (200, 10)] {
        let spec = SpectralData::new(&params(n, k)).unwrap();
        let total: f64 = spec.overlaps_sq.iter().sum();
        assert!((total - 1.0).abs() <= 1e-14, "({n},{k}): {total}");
        let p0 = 1.0 / (params(n, k).num_vertices() as f64).sqrt();
        assert!((spec.overlaps[0] - p0).abs() <= 1e-15 * p0);
    }
}

#[test]
fn reduced_states() {
    for (n, k) in [(2, 1), (6, 3), (12, 5)] {
        let p = params(n, k);
        let s = reduced_initial_state(&p);
        let w = reduced_marked_state(&p);
        assert_eq!(s[0], 1.0);
        assert!(s[1..].iter().all(|&x| x == 0.0));
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-14);
        let p0 = 1.0 / (p.num_vertices() as f64).sqrt();
        assert!((w[0] - p0).abs() <= 1e-15 * p0);
    }
}

#[test]
fn reduced_hamiltonian_of_k2_edge() {
    let h = reduced_hamiltonian(&params(2, 1), 1.0).unwrap().matrix;
    let expect = [[-1.5, -0.5], [-0.5, 0.5]];
    for (i, row) in expect.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            assert!((h.get(i, j) - e).abs() < 1e-15);
        }
    }
    assert!(reduced_hamiltonian(&params(2, 1), 0.0).is_err());
}

#[test]
fn conjugated_full_hamiltonian_is_the_reduced_one() {
    for p in oracle_instances().filter(|p| p.num_vertices() <= 220) {
        let gamma = 0.37 / p.n() as f64;
        let w = VertexId(p.num_vertices() / 3);
        let oracle = AdjacencyOracle::new(&p, DEFAULT_FULL_CAP).unwrap();
        let basis: Vec<Vec<f64>> = oracle
            .projected_marked(w)
            .unwrap()
            .into_iter()
            .map(|v| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / norm).collect()
            })
            .collect();
        let full = full_hamiltonian(&p, gamma, w, DEFAULT_FULL_CAP).unwrap();
        let conj = full.conjugate_by(&basis);
        let reduced = reduced_hamiltonian(&p, gamma).unwrap().matrix;
        let diff = conj.add_scaled(-1.0, &reduced).max_abs();
        assert!(diff <= 1e-10, "J({},{}): {diff:e}", p.n(), p.k());
    }
}

#[test]
fn reduced_eigenvalues_appear_in_full_spectrum() {
    for p in oracle_instances().filter(|p| p.num_vertices() <= 220) {
        let gamma = 1.3 / p.n() as f64;
        let full = sym_eig(&full_hamiltonian(&p, gamma, VertexId(0), DEFAULT_FULL_CAP).unwrap()).unwrap();
        let reduced = sym_eig(&reduced_hamiltonian(&p, gamma).unwrap().matrix).unwrap();
        for e in &reduced.values {
            let nearest = full.values.iter().map(|f| (f - e).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest <= 1e-10, "J({},{}) eigenvalue {e}", p.n(), p.k());
        }
    }
}
