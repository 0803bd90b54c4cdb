//! Closed-form spectrum of J(n,k) and the (k+1)-dimensional reduced model.
//!
//! The adjacency operator has eigenvalues λ_ℓ = (k−ℓ)(n−k−ℓ)−ℓ with multiplicity
//! C(n,ℓ)−C(n,ℓ−1). With P_ℓ the eigenprojector, the vectors P_ℓ|w⟩/‖P_ℓ|w⟩‖ form an
//! orthonormal basis of the invariant subspace around the marked vertex w. In that
//! basis A is diag(λ_0,…,λ_k) and |w⟩⟨w| is the rank-one matrix p pᵀ with
//! p_ℓ = ‖P_ℓ|w⟩‖ = √(m_ℓ/N), so H = −γA − |w⟩⟨w| becomes a (k+1)×(k+1) matrix.

use crate::error::{Error, Result};
use crate::johnson::{binomial, GraphParams};
use crate::matrix::SymMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub params: GraphParams,
    /// λ_0 > λ_1 > … > λ_k
    pub lambdas: Vec<f64>,
    pub mults: Vec<u64>,
    /// p_ℓ = ‖P_ℓ|w⟩‖
    pub overlaps: Vec<f64>,
    /// p_ℓ² = m_ℓ / N, rounded once from the exact ratio
    pub overlaps_sq: Vec<f64>,
}

impl SpectralData {
    pub fn new(params: &GraphParams) -> Result<Self> {
        let k = params.k();
        let lambdas: Vec<f64> = (0..=k).map(|ell| eigenvalue_exact(params, ell) as f64).collect();
        if lambdas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::domain(format!(
                "eigenvalues of J({},{}) are not strictly decreasing",
                params.n(),
                k
            )));
        }
        let mults: Vec<u64> = (0..=k).map(|ell| multiplicity_exact(params, ell)).collect();
        let big_n = params.num_vertices();
        let overlaps_sq: Vec<f64> = mults.iter().map(|&m| exact_ratio(m, big_n)).collect();
        let overlaps = overlaps_sq.iter().map(|x| x.sqrt()).collect();
        Ok(SpectralData { params: *params, lambdas, mults, overlaps, overlaps_sq })
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }
}

/// m / N correctly rounded even when m and N exceed 2^53.
fn exact_ratio(m: u64, big_n: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    if m < (1 << 53) && big_n < (1 << 53) {
        return m as f64 / big_n as f64;
    }
    // q = floor(m·2^s / N) carries at least 64 significant bits; m·2^s < 2^128
    let shift = 64 + m.leading_zeros() - big_n.leading_zeros();
    let num = (m as u128) << shift;
    let q = num / big_n as u128;
    let r = num % big_n as u128;
    // sticky bit so the conversion of q rounds correctly
    let q = if r != 0 { q | 1 } else { q };
    q as f64 / 2f64.powi(shift as i32)
}

fn check_ell(params: &GraphParams, ell: usize) -> Result<()> {
    if ell > params.k() {
        return Err(Error::domain(format!("level {ell} is outside 0..={}", params.k())));
    }
    Ok(())
}

fn eigenvalue_exact(params: &GraphParams, ell: usize) -> i64 {
    let (n, k, l) = (params.n() as i64, params.k() as i64, ell as i64);
    (k - l) * (n - k - l) - l
}

fn multiplicity_exact(params: &GraphParams, ell: usize) -> u64 {
    let n = params.n() as u64;
    let upper = binomial(n, ell as u64).expect("C(n,ℓ) <= C(n,k) fits");
    let lower = if ell == 0 { 0 } else { binomial(n, ell as u64 - 1).expect("fits") };
    upper - lower
}

/// λ_ℓ = (k−ℓ)(n−k−ℓ)−ℓ
pub fn eigenvalue(params: &GraphParams, ell: usize) -> Result<f64> {
    check_ell(params, ell)?;
    Ok(eigenvalue_exact(params, ell) as f64)
}

/// m_ℓ = C(n,ℓ) − C(n,ℓ−1), exact.
pub fn multiplicity(params: &GraphParams, ell: usize) -> Result<u64> {
    check_ell(params, ell)?;
    Ok(multiplicity_exact(params, ell))
}

/// p_ℓ = ‖P_ℓ|w⟩‖ = √(m_ℓ/N).
pub fn overlap(params: &GraphParams, ell: usize) -> Result<f64> {
    check_ell(params, ell)?;
    Ok(exact_ratio(multiplicity_exact(params, ell), params.num_vertices()).sqrt())
}

/// ⟨w|P_ℓ|w⟩ in its factorial form k!(n−k)!(n−2ℓ+1) / (ℓ!(n−ℓ+1)!), evaluated with
/// literal binary64 factorials. Only a cross-check for [`overlap`]; needs n ≤ 170.
pub fn overlap_sq_factorial(params: &GraphParams, ell: usize) -> Result<f64> {
    check_ell(params, ell)?;
    let n = params.n();
    if n > 170 {
        return Err(Error::domain(format!("factorial form overflows binary64 for n = {n} > 170")));
    }
    let fact = |m: usize| (1..=m).fold(1.0f64, |acc, i| acc * i as f64);
    let k = params.k();
    Ok(fact(k) * fact(n - k) * (n + 1 - 2 * ell) as f64 / (fact(ell) * fact(n + 1 - ell)))
}

/// The search Hamiltonian restricted to the invariant subspace, in the
/// {P_ℓ|w⟩/p_ℓ} basis: −γ·diag(λ) − p pᵀ.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHamiltonian {
    pub params: GraphParams,
    pub gamma: f64,
    pub matrix: SymMatrix,
}

pub fn reduced_hamiltonian(params: &GraphParams, gamma: f64) -> Result<ReducedHamiltonian> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must be positive and finite, got {gamma}")));
    }
    let spec = SpectralData::new(params)?;
    let p = &spec.overlaps;
    let matrix = SymMatrix::from_upper_fn(spec.dim(), |i, j| {
        if i == j {
            -gamma * spec.lambdas[i] - spec.overlaps_sq[i]
        } else {
            -p[i] * p[j]
        }
    });
    Ok(ReducedHamiltonian { params: *params, gamma, matrix })
}

/// |s⟩ = |λ_0⟩ = e_0 in the reduced basis.
pub fn reduced_initial_state(params: &GraphParams) -> Vec<f64> {
    let mut e0 = vec![0.0; params.k() + 1];
    e0[0] = 1.0;
    e0
}

/// |w⟩ = Σ_ℓ p_ℓ |λ_ℓ⟩ in the reduced basis.
pub fn reduced_marked_state(params: &GraphParams) -> Vec<f64> {
    (0..=params.k())
        .map(|ell| overlap(params, ell).expect("ell in range"))
        .collect()
}
