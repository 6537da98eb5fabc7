//! Adapt and fusion steps.

use crate::error::{Error, Result};
use crate::vecops;

/// Gradient of the instantaneous loss `(d - u ψ)²`, i.e. `-2 uᵀ (d - u ψ)`.
pub fn stochastic_gradient(psi: &[f64], u: &[f64], d: f64) -> Vec<f64> {
    let mut g = vec![0.0; psi.len()];
    gradient_into(psi, u, d, &mut g);
    g
}

#[inline]
fn gradient_into(psi: &[f64], u: &[f64], d: f64, out: &mut [f64]) {
    let residual = d - vecops::dot(u, psi);
    for (o, &uj) in out.iter_mut().zip(u) {
        *o = -2.0 * uj * residual;
    }
}

/// Per-agent learner state.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub psi: Vec<f64>,
    pub w: Vec<f64>,
    pub step_size: f64,
}

impl AgentState {
    pub fn new(dim: usize, step_size: f64) -> Self {
        AgentState {
            psi: vec![0.0; dim],
            w: vec![0.0; dim],
            step_size,
        }
    }

    /// Stand-alone stochastic-gradient step on `psi`.
    pub fn adapt(&mut self, u: &[f64], d: f64) -> Result<(), NonFinite> {
        adapt_in_place(&mut self.psi, self.step_size, u, d)
    }
}

/// Raised when an adapt step produces a non-finite iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonFinite;

/// `ψ ← ψ - μ ∇Q(ψ; u, d)`.
#[inline]
pub fn adapt_in_place(psi: &mut [f64], step_size: f64, u: &[f64], d: f64) -> Result<(), NonFinite> {
    let residual = d - vecops::dot(u, psi);
    for (p, &uj) in psi.iter_mut().zip(u) {
        *p -= step_size * (-2.0 * uj * residual);
    }
    if vecops::all_finite(psi) {
        Ok(())
    } else {
        Err(NonFinite)
    }
}

/// Left-stochastic combination matrix stored column-wise and sparsely: the
/// column of agent `k` lists `(l, a_lk)` for each `l` in the believed
/// neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    columns: Vec<Vec<(usize, f64)>>,
}

impl CombinationMatrix {
    pub fn n_agents(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[(usize, f64)] {
        &self.columns[k]
    }

    /// `a_lk`.
    pub fn weight(&self, l: usize, k: usize) -> f64 {
        self.columns[k]
            .iter()
            .find(|(m, _)| *m == l)
            .map_or(0.0, |(_, a)| *a)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.columns.len();
        let mut a = vec![vec![0.0; n]; n];
        for (k, col) in self.columns.iter().enumerate() {
            for &(l, w) in col {
                a[l][k] = w;
            }
        }
        a
    }
}

/// Uniform weights `a_lk = 1/|N_{k,i}|` over each believed neighborhood.
pub fn build_uniform_weights(neighborhoods: &[Vec<usize>]) -> CombinationMatrix {
    let columns = neighborhoods
        .iter()
        .enumerate()
        .map(|(k, nbhd)| {
            debug_assert!(
                nbhd.contains(&k),
                "believed neighborhood must contain the agent"
            );
            uniform_column(nbhd)
        })
        .collect();
    CombinationMatrix { columns }
}

pub(crate) fn uniform_column(nbhd: &[usize]) -> Vec<(usize, f64)> {
    let a = 1.0 / nbhd.len() as f64;
    nbhd.iter().map(|&l| (l, a)).collect()
}

/// `w_k = Σ_l a_lk x_l` for one column of weights, where `source(l)` yields
/// the vector contributed by `l`.
pub fn fuse<'a, F>(column: &[(usize, f64)], dim: usize, mut source: F) -> Result<Vec<f64>>
where
    F: FnMut(usize) -> &'a [f64],
{
    let mut out = vec![0.0; dim];
    for &(l, a) in column {
        let x = source(l);
        if x.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: x.len(),
            });
        }
        for (o, &xj) in out.iter_mut().zip(x) {
            *o += a * xj;
        }
    }
    Ok(out)
}

#[inline]
pub(crate) fn fuse_into<'a, F>(column: &[(usize, f64)], out: &mut [f64], mut source: F)
where
    F: FnMut(usize) -> &'a [f64],
{
    out.iter_mut().for_each(|o| *o = 0.0);
    for &(l, a) in column {
        for (o, &xj) in out.iter_mut().zip(source(l)) {
            *o += a * xj;
        }
    }
}
