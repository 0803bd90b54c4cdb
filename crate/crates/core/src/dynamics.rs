//! Unitary evolution ψ(t) = e^{−iHt}ψ(0) by exact eigendecomposition, success
//! probabilities, the running time, and peak search.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coupling::critical_hamiltonian;
use crate::eigen::{sym_eig, EigDecomp};
use crate::error::{Error, Result};
use crate::johnson::GraphParams;
use crate::matrix::SymMatrix;
use crate::spectral::{reduced_hamiltonian, reduced_initial_state, reduced_marked_state};

/// Points in the coarse scan that seeds [`find_peak`].
pub const PEAK_GRID: usize = 2001;
/// Relative time tolerance of the golden-section refinement.
pub const PEAK_REL_TOL: f64 = 1e-6;
/// Overshoot beyond [0, 1] tolerated silently before clamping.
pub const PROB_WARN_EXCESS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexState {
    pub amplitudes: Vec<Complex64>,
}

impl ComplexState {
    pub fn from_real(x: &[f64]) -> Self {
        ComplexState { amplitudes: x.iter().map(|&r| Complex64::new(r, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &ComplexState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// |⟨target|ψ⟩|² for a real target vector.
    pub fn overlap_sq(&self, target: &[f64]) -> f64 {
        self.amplitudes.iter().zip(target).map(|(a, &t)| a * t).sum::<Complex64>().norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &ComplexState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }
}

/// ⟨ψ|H|ψ⟩
pub fn energy(h: &SymMatrix, psi: &ComplexState) -> f64 {
    let re: Vec<f64> = psi.amplitudes.iter().map(|a| a.re).collect();
    let im: Vec<f64> = psi.amplitudes.iter().map(|a| a.im).collect();
    let h_re = h.mul_vec(&re);
    let h_im = h.mul_vec(&im);
    re.iter().zip(&h_re).map(|(a, b)| a * b).sum::<f64>()
        + im.iter().zip(&h_im).map(|(a, b)| a * b).sum::<f64>()
}

/// ψ(t) = V·diag(e^{−iE_j t})·Vᵀ·ψ0
pub fn evolve(dec: &EigDecomp, psi0: &ComplexState, t: f64) -> Result<ComplexState> {
    let n = dec.dim();
    if psi0.len() != n {
        return Err(Error::domain(format!(
            "state has dimension {}, Hamiltonian has {n}",
            psi0.len()
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (i, a) in psi0.amplitudes.iter().enumerate() {
        for (c, &v) in coeffs.iter_mut().zip(dec.row(i)) {
            *c += a * v;
        }
    }
    for (c, &e) in coeffs.iter_mut().zip(&dec.values) {
        *c *= Complex64::from_polar(1.0, -e * t);
    }
    let amplitudes = (0..n)
        .map(|i| dec.row(i).iter().zip(&coeffs).map(|(&v, c)| c * v).sum())
        .collect();
    Ok(ComplexState { amplitudes })
}

pub(crate) fn clamp_probability(p: f64) -> f64 {
    if !(-PROB_WARN_EXCESS..=1.0 + PROB_WARN_EXCESS).contains(&p) {
        log::warn!("probability {p} is outside [0, 1] by more than {PROB_WARN_EXCESS:e}; clamping");
    }
    p.clamp(0.0, 1.0)
}

/// πn^{k/2}/(2√k!), asymptotically π√N/2.
pub fn run_time(params: &GraphParams) -> f64 {
    let k = params.k();
    let k_fact: f64 = (1..=k).map(|i| i as f64).product();
    std::f64::consts::PI * (params.n() as f64).powf(k as f64 / 2.0) / (2.0 * k_fact.sqrt())
}

/// Success probability of the reduced model as a function of time, with the
/// eigendecomposition done once.
///
/// |⟨w|ψ(t)⟩|² = |Σ_j c_j e^{−iE_j t}|² with c_j = ⟨w|v_j⟩⟨v_j|s⟩.
#[derive(Debug, Clone)]
pub struct ReducedSearch {
    pub params: GraphParams,
    pub gamma: f64,
    dec: EigDecomp,
    weights: Vec<f64>,
}

impl ReducedSearch {
    pub fn new(params: &GraphParams, gamma: f64) -> Result<Self> {
        let h = reduced_hamiltonian(params, gamma)?;
        Self::from_matrix(params, gamma, &h.matrix)
    }

    /// At γ = γ°, built from the shifted cancellation-free matrix. Eigenvalues are
    /// relative to the shift, which only changes a global phase.
    pub fn critical(params: &GraphParams) -> Result<Self> {
        let h = critical_hamiltonian(params)?;
        Self::from_matrix(params, h.gamma, &h.matrix)
    }

    fn from_matrix(params: &GraphParams, gamma: f64, matrix: &SymMatrix) -> Result<Self> {
        let dec = sym_eig(matrix)?;
        let s = dec.to_eigenbasis(&reduced_initial_state(params));
        let w = dec.to_eigenbasis(&reduced_marked_state(params));
        let weights = s.iter().zip(&w).map(|(a, b)| a * b).collect();
        Ok(ReducedSearch { params: *params, gamma, dec, weights })
    }

    pub fn decomposition(&self) -> &EigDecomp {
        &self.dec
    }

    pub fn probability(&self, t: f64) -> f64 {
        let amp: Complex64 = self
            .weights
            .iter()
            .zip(&self.dec.values)
            .map(|(&c, &e)| Complex64::from_polar(c, -e * t))
            .sum();
        clamp_probability(amp.norm_sqr())
    }

    pub fn scan(&self, t0: f64, t1: f64, m: usize) -> Result<ScanResult> {
        let times = time_grid(t0, t1, m)?;
        let probs = times.par_iter().map(|&t| self.probability(t)).collect();
        Ok(ScanResult { params: self.params, gamma: self.gamma, times, probs })
    }

    /// Coarse scan of [`PEAK_GRID`] points over the bracket, then golden-section
    /// refinement around the best interior sample.
    pub fn peak(&self, bracket: (f64, f64)) -> Result<(f64, f64)> {
        let (t0, t1) = bracket;
        let coarse = self.scan(t0, t1, PEAK_GRID)?;
        let best = coarse
            .probs
            .iter()
            .enumerate()
            .fold(0, |best, (i, &p)| if p > coarse.probs[best] { i } else { best });
        if best == 0 || best == coarse.probs.len() - 1 {
            return Err(Error::Bracket { t0, t1 });
        }
        let (mut a, mut b) = (coarse.times[best - 1], coarse.times[best + 1]);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let (mut f1, mut f2) = (self.probability(x1), self.probability(x2));
        while b - a > PEAK_REL_TOL * 0.5 * (a + b).abs() {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = self.probability(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = self.probability(x2);
            }
        }
        let (t_fine, p_fine) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
        if p_fine >= coarse.probs[best] {
            Ok((t_fine, p_fine))
        } else {
            Ok((coarse.times[best], coarse.probs[best]))
        }
    }
}

fn time_grid(t0: f64, t1: f64, m: usize) -> Result<Vec<f64>> {
    if !(t0.is_finite() && t1.is_finite() && 0.0 <= t0 && t0 < t1) {
        return Err(Error::domain(format!("time grid needs 0 <= t0 < t1, got [{t0}, {t1}]")));
    }
    if m < 2 {
        return Err(Error::domain(format!("time grid needs at least 2 samples, got {m}")));
    }
    let step = (t1 - t0) / (m - 1) as f64;
    let mut times: Vec<f64> = (0..m).map(|i| t0 + step * i as f64).collect();
    times[m - 1] = t1;
    Ok(times)
}

/// |⟨w|e^{−iH_red t}|s⟩|² on the reduced model.
pub fn success_probability(params: &GraphParams, gamma: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(ReducedSearch::new(params, gamma)?.probability(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub params: GraphParams,
    pub gamma: f64,
    pub times: Vec<f64>,
    pub probs: Vec<f64>,
}

pub fn scan(params: &GraphParams, gamma: f64, t0: f64, t1: f64, m: usize) -> Result<ScanResult> {
    ReducedSearch::new(params, gamma)?.scan(t0, t1, m)
}

/// Returns `(t_peak, p_peak)` inside `bracket`.
pub fn find_peak(params: &GraphParams, gamma: f64, bracket: (f64, f64)) -> Result<(f64, f64)> {
    ReducedSearch::new(params, gamma)?.peak(bracket)
}
