//! Rescaled quantities and the critical hopping rate γ°.
//!
//! With ε = 1/√n and η = 1/(γn) = ε²/γ, the reduced Hamiltonian satisfies
//! −ηH = diag(r_0(ε),…,r_k(ε)) + η p(ε)p(ε)ᵀ where r_ℓ(ε) = ε²λ_ℓ and p_ℓ(ε) = ‖P_ℓ|w⟩‖
//! are explicit functions of ε. The search runs at
//!
//! ```text
//! η° = ( Σ_{ℓ=1..k} p_ℓ(ε)² / (r_0(ε) − r_ℓ(ε)) )⁻¹,    γ° = ε² / η°.
//! ```
//!
//! Only terms up to degree k+2 in ε matter asymptotically, but γ° is always the
//! exact sum here; the rational closed forms for k = 3, 4, 5 are kept as a cross-check.

use crate::error::{Error, Result};
use crate::johnson::GraphParams;
use crate::matrix::SymMatrix;
use crate::spectral::SpectralData;

/// Neumaier's compensated summation.
pub(crate) fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// ε together with k, restricted to (2k−1)ε² < 1 where p_ℓ(ε) is real-analytic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    eps: f64,
    eps_sq: f64,
    k: usize,
}

impl ScaledParams {
    pub fn new(eps: f64, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k must be at least 1"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::domain(format!("eps must be positive and finite, got {eps}")));
        }
        let eps_sq = eps * eps;
        if (2 * k - 1) as f64 * eps_sq >= 1.0 {
            return Err(Error::domain(format!(
                "eps = {eps} violates (2k-1)·eps² < 1 for k = {k}"
            )));
        }
        Ok(ScaledParams { eps, eps_sq, k })
    }

    /// ε = 1/√n; ε² is kept as the correctly rounded 1/n.
    pub fn from_graph(params: &GraphParams) -> Self {
        let eps_sq = 1.0 / params.n() as f64;
        ScaledParams { eps: eps_sq.sqrt(), eps_sq, k: params.k() }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_sq(&self) -> f64 {
        self.eps_sq
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn check_ell(&self, ell: usize) -> Result<()> {
        if ell > self.k {
            return Err(Error::domain(format!("level {ell} is outside 0..={}", self.k)));
        }
        Ok(())
    }
}

/// r_ℓ(ε) = (k−ℓ)(1−(k+ℓ)ε²) − ℓε²
pub fn r_ell(sp: &ScaledParams, ell: usize) -> Result<f64> {
    sp.check_ell(ell)?;
    let (k, l, e2) = (sp.k as f64, ell as f64, sp.eps_sq);
    Ok((k - l) * (1.0 - (k + l) * e2) - l * e2)
}

/// p_ℓ(ε)² = (k!/ℓ!) ε^{2(k−ℓ)} (1−(2ℓ−1)ε²) / Π_{j=ℓ−1}^{k−1} (1−jε²)
pub fn p_ell_scaled_sq(sp: &ScaledParams, ell: usize) -> Result<f64> {
    sp.check_ell(ell)?;
    let e2 = sp.eps_sq;
    let falling: f64 = ((ell + 1)..=sp.k).map(|i| i as f64).product();
    let denom: f64 = ((ell as i64 - 1)..sp.k as i64).map(|j| 1.0 - j as f64 * e2).product();
    let numer = 1.0 - (2.0 * ell as f64 - 1.0) * e2;
    Ok(falling * e2.powi((sp.k - ell) as i32) * numer / denom)
}

/// p_ℓ(ε) = ‖P_ℓ|w⟩‖ as a function of ε.
pub fn p_ell_scaled(sp: &ScaledParams, ell: usize) -> Result<f64> {
    p_ell_scaled_sq(sp, ell).map(f64::sqrt)
}

/// Σ_{ℓ=1..k} p_ℓ(ε)² / (r_0(ε) − r_ℓ(ε)), i.e. 1/η°.
fn inverse_eta_sum(sp: &ScaledParams) -> f64 {
    let r0 = r_ell(sp, 0).expect("0 <= k");
    compensated_sum((1..=sp.k).map(|ell| {
        let p_sq = p_ell_scaled_sq(sp, ell).expect("in range");
        p_sq / (r0 - r_ell(sp, ell).expect("in range"))
    }))
}

/// η°(ε); tends to k as ε → 0.
pub fn eta_star(sp: &ScaledParams) -> f64 {
    1.0 / inverse_eta_sum(sp)
}

/// γ° = ε²/η° at ε = 1/√n.
pub fn gamma_star(params: &GraphParams) -> f64 {
    let sp = ScaledParams::from_graph(params);
    sp.eps_sq * inverse_eta_sum(&sp)
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Exact rational expressions of γ° in ε² for k = 3, 4, 5.
pub fn gamma_closed_form(sp: &ScaledParams) -> Result<f64> {
    let e = sp.eps_sq;
    let sq = |j: f64| (1.0 - j * e).powi(2);
    match sp.k {
        3 => {
            let poly = horner(&[2.0, 1.0, 16.0, -52.0, 24.0], e);
            Ok(e * (1.0 - 3.0 * e) * poly / (6.0 * sq(1.0) * sq(2.0)))
        }
        4 => {
            let poly = horner(&[3.0, -11.0, 33.0, 47.0, -660.0, 1116.0, -432.0], e);
            Ok(e * (1.0 - 4.0 * e) * poly / (12.0 * sq(1.0) * sq(2.0) * sq(3.0)))
        }
        5 => {
            let poly = horner(
                &[12.0, -117.0, 532.0, -1107.0, 2508.0, -22588.0, 80448.0, -99648.0, 34560.0],
                e,
            );
            Ok(e * (1.0 - 5.0 * e) * poly / (60.0 * sq(1.0) * sq(2.0) * sq(3.0) * sq(4.0)))
        }
        k => Err(Error::Unsupported(format!(
            "closed-form coupling is only available for k in {{3, 4, 5}}, got k = {k}"
        ))),
    }
}

/// The reduced Hamiltonian at γ = γ°, written as `shift·I + matrix` with the
/// (0,0) entry of `matrix` exactly zero.
///
/// Substituting γ° = Σ_{ℓ≥1} p_ℓ²/(λ_0−λ_ℓ) into the diagonal gives, for j ≥ 1,
/// `H_jj − H_00 = p_0² + Σ_{ℓ≥1, ℓ≠j} p_ℓ² (λ_0−λ_j)/(λ_0−λ_ℓ)`, a sum of positive
/// terms. Forming the diagonal this way avoids the cancellation in
/// `−γλ_k − p_k² + γλ_0 + p_0²`, whose true value is far below one ulp of the
/// O(1) entries once n^{k/2} is large. The shift only contributes a global phase.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalHamiltonian {
    pub params: GraphParams,
    pub gamma: f64,
    pub shift: f64,
    pub matrix: SymMatrix,
}

pub fn critical_hamiltonian(params: &GraphParams) -> Result<CriticalHamiltonian> {
    let spec = SpectralData::new(params)?;
    let k = params.k();
    let p_sq = &spec.overlaps_sq;
    let p = &spec.overlaps;
    let n = params.n() as f64;
    // λ_0 − λ_ℓ = ℓ(n − ℓ + 1), exact in binary64 for every accepted n
    let drop = |ell: usize| ell as f64 * (n - ell as f64 + 1.0);
    let gamma = compensated_sum((1..=k).map(|ell| p_sq[ell] / drop(ell)));
    let shift = -gamma * spec.lambdas[0] - p_sq[0];
    let matrix = SymMatrix::from_upper_fn(k + 1, |i, j| {
        if i != j {
            -p[i] * p[j]
        } else if i == 0 {
            0.0
        } else {
            let ratio_sum = compensated_sum(
                (1..=k).filter(|&ell| ell != i).map(|ell| p_sq[ell] * drop(i) / drop(ell)),
            );
            p_sq[0] + ratio_sum
        }
    });
    Ok(CriticalHamiltonian { params: *params, gamma, shift, matrix })
}
