//! Exact construction of the Johnson graph J(n,k) in the full N-dimensional space.
//!
//! Vertices are k-subsets of {1,…,n}, identified by their colexicographic rank
//! (combinatorial number system). Everything here is dense and only meant for
//! instances with N = C(n,k) under a configurable cap; the reduced model in
//! [`crate::spectral`] has no such limit.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Largest N for which full-space matrices are built unless overridden.
pub const DEFAULT_FULL_CAP: u64 = 3003;

/// Exact binomial coefficient, `None` on u64 overflow. `C(n, k) = 0` for `k > n`.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc = C(n, i) here, so acc * (n - i) is divisible by i + 1
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// The pair (n, k) defining J(n,k).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct GraphParams {
    n: usize,
    k: usize,
    num_vertices: u64,
}

impl GraphParams {
    /// Requires `k >= 1`, `n >= 2k` and `C(n,k)` representable in a u64.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k must be at least 1"));
        }
        if n < 2 * k {
            return Err(Error::domain(format!("n = {n} must satisfy n >= 2k = {}", 2 * k)));
        }
        let num_vertices = binomial(n as u64, k as u64)
            .ok_or_else(|| Error::domain(format!("C({n},{k}) overflows a 64-bit integer")))?;
        Ok(GraphParams { n, k, num_vertices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// N = C(n, k).
    pub fn num_vertices(&self) -> u64 {
        self.num_vertices
    }

    /// Degree k(n−k) of the regular graph.
    pub fn degree(&self) -> u64 {
        (self.k * (self.n - self.k)) as u64
    }

    /// Fails with a capacity error when N exceeds `cap`; returns N as an index bound.
    pub fn full_dim(&self, cap: u64) -> Result<usize> {
        if self.num_vertices > cap {
            return Err(Error::Capacity { dim: self.num_vertices, cap });
        }
        Ok(self.num_vertices as usize)
    }
}

/// Colexicographic rank of a vertex, in `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct VertexId(pub u64);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A k-subset of {1,…,n} stored as a bitmask; bit `i - 1` marks element `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    fn empty(n: usize) -> Self {
        VertexSet { n, words: vec![0; n.div_ceil(64).max(1)] }
    }

    /// Builds a set from 1-based elements. Order does not matter; duplicates and
    /// elements outside `1..=n` are rejected.
    pub fn from_elements(elements: &[usize], n: usize) -> Result<Self> {
        let mut set = Self::empty(n);
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::domain(format!("element {e} is outside 1..={n}")));
            }
            if set.contains(e) {
                return Err(Error::domain(format!("element {e} appears twice")));
            }
            set.words[(e - 1) / 64] |= 1 << ((e - 1) % 64);
        }
        Ok(set)
    }

    /// Interprets raw bits (bit `i` is element `i + 1`) over a ground set of size `n`.
    pub fn from_bits(words: Vec<u64>, n: usize) -> Result<Self> {
        let mut set = Self::empty(n);
        if words.len() > set.words.len()
            && words[set.words.len()..].iter().any(|&w| w != 0)
        {
            return Err(Error::domain(format!("bitmask has bits set beyond position {n}")));
        }
        for (dst, src) in set.words.iter_mut().zip(&words) {
            *dst = *src;
        }
        if !n.is_multiple_of(64) {
            let last = set.words.len() - 1;
            if set.words[last] >> (n % 64) != 0 {
                return Err(Error::domain(format!("bitmask has bits set beyond position {n}")));
            }
        }
        Ok(set)
    }

    pub fn bits(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, element: usize) -> bool {
        element >= 1
            && element <= self.n
            && self.words[(element - 1) / 64] & (1 << ((element - 1) % 64)) != 0
    }

    /// Elements in increasing order (1-based).
    pub fn elements(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * 64 + b + 1);
                w &= w - 1;
            }
        }
        out
    }

    pub fn intersection_size(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

fn check_set(v: &VertexSet, params: &GraphParams) -> Result<()> {
    if v.n != params.n {
        return Err(Error::domain(format!(
            "subset lives in a ground set of size {}, expected {}",
            v.n, params.n
        )));
    }
    if v.len() != params.k {
        return Err(Error::domain(format!(
            "subset has {} elements, expected k = {}",
            v.len(),
            params.k
        )));
    }
    Ok(())
}

/// Rank of sorted 1-based elements: Σ_i C(c_i − 1, i).
fn rank_sorted(elements: &[usize]) -> u64 {
    elements
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial((c - 1) as u64, (i + 1) as u64).expect("bounded by N"))
        .sum()
}

pub fn rank_subset(v: &VertexSet, params: &GraphParams) -> Result<VertexId> {
    check_set(v, params)?;
    Ok(VertexId(rank_sorted(&v.elements())))
}

fn unrank_elements(id: u64, k: usize, n: usize) -> Vec<usize> {
    let mut rest = id;
    let mut elements = vec![0; k];
    let mut upper = n;
    for i in (1..=k).rev() {
        // largest c <= upper with C(c - 1, i) <= rest
        let mut c = upper;
        while binomial((c - 1) as u64, i as u64).expect("bounded by N") > rest {
            c -= 1;
        }
        rest -= binomial((c - 1) as u64, i as u64).expect("bounded by N");
        elements[i - 1] = c;
        upper = c - 1;
    }
    elements
}

pub fn unrank_subset(id: VertexId, params: &GraphParams) -> Result<VertexSet> {
    if id.0 >= params.num_vertices {
        return Err(Error::domain(format!(
            "vertex id {} is out of range for N = {}",
            id.0, params.num_vertices
        )));
    }
    VertexSet::from_elements(&unrank_elements(id.0, params.k, params.n), params.n)
}

/// Vertex ids adjacent to `id`: swap one element of the subset for one outside it.
fn neighbours(id: u64, params: &GraphParams) -> Vec<u64> {
    let elements = unrank_elements(id, params.k, params.n);
    let mut outside = Vec::with_capacity(params.n - params.k);
    let mut it = elements.iter().peekable();
    for e in 1..=params.n {
        if it.peek() == Some(&&e) {
            it.next();
        } else {
            outside.push(e);
        }
    }
    let mut out = Vec::with_capacity(elements.len() * outside.len());
    let mut scratch = Vec::with_capacity(params.k);
    for i in 0..elements.len() {
        for &y in &outside {
            scratch.clear();
            scratch.extend(elements.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e));
            let pos = scratch.partition_point(|&e| e < y);
            scratch.insert(pos, y);
            out.push(rank_sorted(&scratch));
        }
    }
    out
}

/// Dense 0/1 adjacency matrix of J(n,k).
pub fn adjacency_matrix(params: &GraphParams, cap: u64) -> Result<SymMatrix> {
    let dim = params.full_dim(cap)?;
    let mut a = SymMatrix::zeros(dim);
    for u in 0..dim as u64 {
        for v in neighbours(u, params) {
            a.set(u as usize, v as usize, 1.0);
        }
    }
    Ok(a)
}

/// The sets ν_ℓ = {v : |v ∩ w| = k − ℓ} for ℓ = 0..=k.
#[derive(Debug, Clone, PartialEq)]
pub struct DistancePartition {
    pub classes: Vec<Vec<VertexId>>,
    pub marked: VertexId,
}

impl DistancePartition {
    /// Normalized class indicator |ν_ℓ⟩ as a dense vector of length N.
    pub fn class_state(&self, ell: usize, dim: usize) -> Vec<f64> {
        let class = &self.classes[ell];
        let amp = 1.0 / (class.len() as f64).sqrt();
        let mut out = vec![0.0; dim];
        for v in class {
            out[v.index()] = amp;
        }
        out
    }
}

pub fn distance_partition(params: &GraphParams, w: VertexId, cap: u64) -> Result<DistancePartition> {
    let marked = unrank_subset(w, params)?;
    let dim = params.full_dim(cap)?;
    let mut classes = vec![Vec::new(); params.k + 1];
    for id in 0..dim as u64 {
        let v = VertexSet::from_elements(&unrank_elements(id, params.k, params.n), params.n)?;
        let ell = params.k - v.intersection_size(&marked);
        classes[ell].push(VertexId(id));
    }
    Ok(DistancePartition { classes, marked: w })
}

/// H = −γA − |w⟩⟨w| on the full space.
pub fn full_hamiltonian(params: &GraphParams, gamma: f64, w: VertexId, cap: u64) -> Result<SymMatrix> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must be positive and finite, got {gamma}")));
    }
    if w.0 >= params.num_vertices {
        return Err(Error::domain(format!(
            "marked vertex {} is out of range for N = {}",
            w.0, params.num_vertices
        )));
    }
    let a = adjacency_matrix(params, cap)?;
    let mut h = SymMatrix::zeros(a.dim()).add_scaled(-gamma, &a);
    let i = w.index();
    h.set(i, i, h.get(i, i) - 1.0);
    Ok(h)
}

/// Uniform superposition |s⟩ over all N vertices.
pub fn uniform_state(dim: usize) -> Vec<f64> {
    vec![1.0 / (dim as f64).sqrt(); dim]
}
