//! Network model: topology, cluster ground truth, and the streaming
//! linear-regression data source.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, tag};
use crate::vecops;

/// Retry budget for random topology generation.
pub const TOPOLOGY_ATTEMPTS: usize = 256;
/// Candidate draws allowed when sampling separated cluster models.
pub const MODEL_ATTEMPTS: usize = 100_000;

/// Undirected agent graph. Every agent is its own neighbor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    n_agents: usize,
    adjacency: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
}

impl Topology {
    /// Build from an undirected edge list. Self loops are implied and may be
    /// omitted; duplicates are merged. The graph must be connected.
    pub fn from_edges(n_agents: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::config("topology needs at least one agent"));
        }
        let mut adjacency = vec![false; n_agents * n_agents];
        for k in 0..n_agents {
            adjacency[k * n_agents + k] = true;
        }
        for &(a, b) in edges {
            if a >= n_agents || b >= n_agents {
                return Err(Error::config(format!(
                    "edge ({a}, {b}) references an agent outside 0..{n_agents}"
                )));
            }
            adjacency[a * n_agents + b] = true;
            adjacency[b * n_agents + a] = true;
        }
        let topo = Self::from_adjacency_unchecked(n_agents, adjacency);
        if !topo.is_connected() {
            return Err(Error::config("topology is not connected"));
        }
        Ok(topo)
    }

    fn from_adjacency_unchecked(n_agents: usize, adjacency: Vec<bool>) -> Self {
        let neighbors = (0..n_agents)
            .map(|k| {
                (0..n_agents)
                    .filter(|&l| adjacency[l * n_agents + k])
                    .collect()
            })
            .collect();
        Topology {
            n_agents,
            adjacency,
            neighbors,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// `y_{lk}`.
    #[inline]
    pub fn is_linked(&self, l: usize, k: usize) -> bool {
        self.adjacency[l * self.n_agents + k]
    }

    /// Sorted neighborhood of `k`, including `k`.
    #[inline]
    pub fn neighbors(&self, k: usize) -> &[usize] {
        &self.neighbors[k]
    }

    /// Neighbors of `k` other than `k`.
    pub fn neighbors_excl(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[k].iter().copied().filter(move |&l| l != k)
    }

    /// Number of neighbors excluding self.
    pub fn degree(&self, k: usize) -> usize {
        self.neighbors[k].len() - 1
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n_agents)
            .map(|k| self.degree(k))
            .max()
            .unwrap_or(0)
    }

    /// Dense adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n_agents)
            .map(|l| {
                (0..self.n_agents)
                    .map(|k| self.is_linked(l, k) as u8)
                    .collect()
            })
            .collect()
    }

    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n_agents {
            for &b in &self.neighbors[a] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n_agents];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(k) = stack.pop() {
            for &l in &self.neighbors[k] {
                if !seen[l] {
                    seen[l] = true;
                    count += 1;
                    stack.push(l);
                }
            }
        }
        count == self.n_agents
    }
}

/// How [`generate_topology`] builds a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "model")]
pub enum ConnectivityModel {
    /// Agents dropped uniformly in the unit square; pairs are linked
    /// nearest-first while both endpoints have spare degree.
    RandomGeometricCapped,
    /// A ring plus `chords` random extra links that respect the cap.
    RingPlusChords { chords: usize },
    /// A fixed edge list.
    Explicit { edges: Vec<(usize, usize)> },
}

/// Build a connected topology with at most `n_max` neighbors per agent
/// (excluding self). Deterministic for a fixed seed.
pub fn generate_topology(
    n_agents: usize,
    n_max: usize,
    model: &ConnectivityModel,
    seed: u64,
) -> Result<Topology> {
    if n_agents < 2 {
        return Err(Error::config("topology needs at least two agents"));
    }
    if n_max < 1 {
        return Err(Error::config("n_max must be at least 1"));
    }
    let topo = match model {
        ConnectivityModel::Explicit { edges } => Topology::from_edges(n_agents, edges)?,
        ConnectivityModel::RandomGeometricCapped => {
            let mut found = None;
            for attempt in 0..TOPOLOGY_ATTEMPTS {
                let mut rng = rng::stream(seed, tag::TOPOLOGY, attempt as u64);
                let t = geometric_capped(n_agents, n_max, &mut rng);
                if t.is_connected() {
                    found = Some(t);
                    break;
                }
            }
            found.ok_or(Error::TopologyGeneration {
                attempts: TOPOLOGY_ATTEMPTS,
            })?
        }
        ConnectivityModel::RingPlusChords { chords } => {
            if n_agents > 2 && n_max < 2 {
                return Err(Error::config("a ring needs n_max >= 2"));
            }
            let mut rng = rng::stream(seed, tag::TOPOLOGY, 0);
            ring_plus_chords(n_agents, n_max, *chords, &mut rng)
        }
    };
    if topo.max_degree() > n_max {
        return Err(Error::config(format!(
            "topology has an agent with {} neighbors, cap is {n_max}",
            topo.max_degree()
        )));
    }
    Ok(topo)
}

fn geometric_capped<R: Rng>(n: usize, n_max: usize, rng: &mut R) -> Topology {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let d = (pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2);
            pairs.push((d, a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut degree = vec![0usize; n];
    let mut adjacency = vec![false; n * n];
    for k in 0..n {
        adjacency[k * n + k] = true;
    }
    for (_, a, b) in pairs {
        if degree[a] < n_max && degree[b] < n_max {
            degree[a] += 1;
            degree[b] += 1;
            adjacency[a * n + b] = true;
            adjacency[b * n + a] = true;
        }
    }
    Topology::from_adjacency_unchecked(n, adjacency)
}

fn ring_plus_chords<R: Rng>(n: usize, n_max: usize, chords: usize, rng: &mut R) -> Topology {
    let mut adjacency = vec![false; n * n];
    let mut degree = vec![0usize; n];
    let link = |a: usize, b: usize, adjacency: &mut Vec<bool>, degree: &mut Vec<usize>| {
        if a != b && !adjacency[a * n + b] {
            adjacency[a * n + b] = true;
            adjacency[b * n + a] = true;
            degree[a] += 1;
            degree[b] += 1;
        }
    };
    for k in 0..n {
        adjacency[k * n + k] = true;
    }
    for k in 0..n {
        link(k, (k + 1) % n, &mut adjacency, &mut degree);
    }
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !adjacency[a * n + b])
        .collect();
    candidates.shuffle(rng);
    let mut added = 0;
    for (a, b) in candidates {
        if added == chords {
            break;
        }
        if degree[a] < n_max && degree[b] < n_max {
            link(a, b, &mut adjacency, &mut degree);
            added += 1;
        }
    }
    Topology::from_adjacency_unchecked(n, adjacency)
}

/// Cluster models and the agent-to-cluster map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterGroundTruth {
    /// One M-vector per cluster.
    pub models: Vec<Vec<f64>>,
    /// Cluster index of each agent (0-based).
    pub assignment: Vec<usize>,
    /// Minimum separation between distinct models.
    pub delta: f64,
}

impl ClusterGroundTruth {
    pub fn new(models: Vec<Vec<f64>>, assignment: Vec<usize>, delta: f64) -> Result<Self> {
        let truth = ClusterGroundTruth {
            models,
            assignment,
            delta,
        };
        truth.validate()?;
        Ok(truth)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.models.len();
        if c == 0 {
            return Err(Error::config("at least one cluster model is required"));
        }
        let m = self.models[0].len();
        if m == 0 {
            return Err(Error::config("model dimension must be positive"));
        }
        if self.models.iter().any(|w| w.len() != m) {
            return Err(Error::config("cluster models have different dimensions"));
        }
        if self.models.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::config("cluster models must be finite"));
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(Error::config("delta must be positive"));
        }
        if self.min_separation() < self.delta {
            return Err(Error::config(format!(
                "models are only {:.6} apart, delta is {}",
                self.min_separation(),
                self.delta
            )));
        }
        validate_assignment(&self.assignment, c)
    }

    pub fn n_clusters(&self) -> usize {
        self.models.len()
    }

    pub fn dim(&self) -> usize {
        self.models[0].len()
    }

    /// w°_k for agent `k`.
    pub fn model_of(&self, k: usize) -> &[f64] {
        &self.models[self.assignment[k]]
    }

    /// Smallest pairwise distance between models; infinite for one cluster.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..self.models.len() {
            for b in a + 1..self.models.len() {
                best = best.min(vecops::dist_sq(&self.models[a], &self.models[b]).sqrt());
            }
        }
        best
    }

    pub fn same_cluster(&self, l: usize, k: usize) -> bool {
        self.assignment[l] == self.assignment[k]
    }
}

pub(crate) fn validate_assignment(assignment: &[usize], n_clusters: usize) -> Result<()> {
    if let Some(&bad) = assignment.iter().find(|&&c| c >= n_clusters) {
        return Err(Error::config(format!(
            "assignment uses cluster {bad}, only {n_clusters} clusters exist"
        )));
    }
    let mut used = vec![false; n_clusters];
    for &c in assignment {
        used[c] = true;
    }
    if used.iter().any(|u| !u) {
        return Err(Error::config("every cluster needs at least one agent"));
    }
    Ok(())
}

/// Draw `n_clusters` models with entries uniform in `range` and pairwise
/// distance at least `delta`.
pub fn generate_models(
    n_clusters: usize,
    dim: usize,
    delta: f64,
    range: (f64, f64),
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if n_clusters == 0 || dim == 0 {
        return Err(Error::config("need at least one cluster and dimension"));
    }
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::config("value range must be finite with lo < hi"));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::config("delta must be positive"));
    }
    let infeasible = Error::InfeasibleSeparation {
        clusters: n_clusters,
        delta,
        attempts: MODEL_ATTEMPTS,
    };
    if n_clusters > 1 && delta > (hi - lo) * (dim as f64).sqrt() {
        return Err(infeasible);
    }
    let mut rng = rng::stream(seed, tag::MODELS, 0);
    let mut models: Vec<Vec<f64>> = Vec::with_capacity(n_clusters);
    let mut draws = 0;
    while models.len() < n_clusters {
        if draws == MODEL_ATTEMPTS {
            return Err(infeasible);
        }
        draws += 1;
        let cand: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
        if models
            .iter()
            .all(|w| vecops::dist_sq(w, &cand) >= delta * delta)
        {
            models.push(cand);
        } else if draws % 1000 == 0 {
            // restart from scratch in case an early model blocks the rest
            models.clear();
        }
    }
    Ok(models)
}

/// Uniform random assignment of agents to clusters, redrawn until every
/// cluster is non-empty.
pub fn random_assignment<R: Rng>(
    n_agents: usize,
    n_clusters: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n_clusters == 0 || n_agents < n_clusters {
        return Err(Error::config(format!(
            "cannot place {n_agents} agents into {n_clusters} non-empty clusters"
        )));
    }
    loop {
        let a: Vec<usize> = (0..n_agents)
            .map(|_| rng.random_range(0..n_clusters))
            .collect();
        if validate_assignment(&a, n_clusters).is_ok() {
            return Ok(a);
        }
    }
}

/// Regressor and noise statistics of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentDataSpec {
    dim: usize,
    covariance: Vec<f64>,
    cholesky: Vec<f64>,
    noise_variance: f64,
}

impl AgentDataSpec {
    /// `covariance` is an M×M row-major SPD matrix.
    pub fn new(dim: usize, covariance: Vec<f64>, noise_variance: f64) -> Result<Self> {
        if covariance.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                got: covariance.len(),
            });
        }
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(Error::config(
                "noise variance must be finite and non-negative",
            ));
        }
        let mat = DMatrix::from_row_slice(dim, dim, &covariance);
        if !is_symmetric(&mat) {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = mat.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        let cholesky = (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .map(|(r, c)| l[(r, c)])
            .collect();
        Ok(AgentDataSpec {
            dim,
            covariance,
            cholesky,
            noise_variance,
        })
    }

    pub fn diagonal(diag: &[f64], noise_variance: f64) -> Result<Self> {
        let m = diag.len();
        let mut cov = vec![0.0; m * m];
        for (j, &v) in diag.iter().enumerate() {
            cov[j * m + j] = v;
        }
        Self::new(m, cov, noise_variance)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// R_u, row-major.
    pub fn covariance(&self) -> &[f64] {
        &self.covariance
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.covariance)
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim)
            .map(|j| self.covariance[j * self.dim + j])
            .sum()
    }

    /// Draw one `(u, d)` pair; `u` is written in place and `d` returned.
    pub fn sample_into<R: Rng>(&self, true_model: &[f64], rng: &mut R, u: &mut [f64]) -> f64 {
        let m = self.dim;
        let mut z = [0.0f64; 16];
        let mut z_heap;
        let z: &mut [f64] = if m <= 16 {
            &mut z[..m]
        } else {
            z_heap = vec![0.0; m];
            &mut z_heap
        };
        for zj in z.iter_mut() {
            *zj = rng.sample(StandardNormal);
        }
        for (r, ur) in u.iter_mut().enumerate() {
            *ur = (0..=r).map(|c| self.cholesky[r * m + c] * z[c]).sum();
        }
        let v: f64 = rng.sample::<f64, _>(StandardNormal) * self.noise_variance.sqrt();
        vecops::dot(u, true_model) + v
    }
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.amax().max(1.0);
    (0..m.nrows()).all(|r| (0..r).all(|c| (m[(r, c)] - m[(c, r)]).abs() <= 1e-12 * scale))
}

/// One streaming observation of the linear regression model.
#[derive(Debug, Clone, PartialEq)]
pub struct Datum {
    pub u: Vec<f64>,
    pub d: f64,
}

/// `d = u w° + v` with `u ~ N(0, R_u)` and `v ~ N(0, σ²_v)`.
pub fn sample_datum<R: Rng>(spec: &AgentDataSpec, true_model: &[f64], rng: &mut R) -> Datum {
    let mut u = vec![0.0; spec.dim()];
    let d = spec.sample_into(true_model, rng, &mut u);
    Datum { u, d }
}

/// Random per-agent profiles: diagonal R_u with trace uniform in
/// `trace_range`, noise variance log-uniform in `noise_range`.
pub fn random_profiles<R: Rng>(
    n_agents: usize,
    dim: usize,
    noise_range: (f64, f64),
    trace_range: (f64, f64),
    rng: &mut R,
) -> Result<Vec<AgentDataSpec>> {
    let (nlo, nhi) = noise_range;
    let (tlo, thi) = trace_range;
    if !(nlo > 0.0 && nlo <= nhi && nhi.is_finite()) {
        return Err(Error::config("noise range must satisfy 0 < lo <= hi"));
    }
    if !(tlo > 0.0 && tlo <= thi && thi.is_finite()) {
        return Err(Error::config("trace range must satisfy 0 < lo <= hi"));
    }
    (0..n_agents)
        .map(|_| {
            let noise = (nlo.ln() + rng.random::<f64>() * (nhi.ln() - nlo.ln())).exp();
            let trace = tlo + rng.random::<f64>() * (thi - tlo);
            let weights: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..1.5)).collect();
            let total: f64 = weights.iter().sum();
            let diag: Vec<f64> = weights.iter().map(|w| trace * w / total).collect();
            AgentDataSpec::diagonal(&diag, noise)
        })
        .collect()
}

/// Curvature constants of the quadratic risk `J(w) = E(d - u w)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskSpec {
    /// Strong-convexity constant τ = 2 λ_min(R_u).
    pub strong_convexity: f64,
    /// Gradient Lipschitz constant ζ = 2 λ_max(R_u).
    pub lipschitz_gradient: f64,
    /// Hessian Lipschitz constant; zero for a quadratic risk.
    pub hessian_lipschitz: f64,
    /// Fourth-moment constant β of the gradient noise.
    pub noise_beta: f64,
}

pub fn compute_risk_constants(spec: &AgentDataSpec) -> Result<RiskSpec> {
    let (lmin, lmax) = spd_extreme_eigenvalues(&spec.covariance_matrix())?;
    Ok(RiskSpec {
        strong_convexity: 2.0 * lmin,
        lipschitz_gradient: 2.0 * lmax,
        hessian_lipschitz: 0.0,
        noise_beta: 0.0,
    })
}

pub(crate) fn spd_extreme_eigenvalues(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    if m.nrows() != m.ncols() || m.nrows() == 0 || !is_symmetric(m) {
        return Err(Error::NotPositiveDefinite);
    }
    let eig = SymmetricEigen::new(m.clone());
    let lmin = eig.eigenvalues.min();
    let lmax = eig.eigenvalues.max();
    if lmin.is_nan() || lmin <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok((lmin, lmax))
}

/// Learning and clustering parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub step_sizes: Vec<f64>,
    pub alpha: f64,
    pub nu: f64,
    pub gamma: f64,
}

impl HyperParams {
    pub fn uniform(n_agents: usize, mu: f64, alpha: f64, nu: f64, gamma: f64) -> Self {
        HyperParams {
            step_sizes: vec![mu; n_agents],
            alpha,
            nu,
            gamma,
        }
    }

    /// Checks parameter ranges, including `alpha < delta²`.
    pub fn validate(&self, n_agents: usize, delta: f64) -> Result<()> {
        if self.step_sizes.len() != n_agents {
            return Err(Error::config(format!(
                "{} step sizes given for {n_agents} agents",
                self.step_sizes.len()
            )));
        }
        if self.step_sizes.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::config("step sizes must be positive"));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::config("nu must lie in (0, 1)"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config("gamma must lie in (0, 1)"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::config("alpha must be positive"));
        }
        if self.alpha >= delta * delta {
            return Err(Error::config(format!(
                "alpha = {} must be below delta² = {}",
                self.alpha,
                delta * delta
            )));
        }
        Ok(())
    }
}

/// One fully realized network instance.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub topology: Topology,
    pub truth: ClusterGroundTruth,
    pub profiles: Vec<AgentDataSpec>,
    pub hyper: HyperParams,
}

impl Scenario {
    pub fn new(
        topology: Topology,
        truth: ClusterGroundTruth,
        profiles: Vec<AgentDataSpec>,
        hyper: HyperParams,
    ) -> Result<Self> {
        let n = topology.n_agents();
        truth.validate()?;
        if truth.assignment.len() != n {
            return Err(Error::config(format!(
                "assignment covers {} agents, topology has {n}",
                truth.assignment.len()
            )));
        }
        if profiles.len() != n {
            return Err(Error::config(format!(
                "{} data profiles for {n} agents",
                profiles.len()
            )));
        }
        if profiles.iter().any(|p| p.dim() != truth.dim()) {
            return Err(Error::config(
                "data profile dimension differs from model dimension",
            ));
        }
        hyper.validate(n, truth.delta)?;
        Ok(Scenario {
            topology,
            truth,
            profiles,
            hyper,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.topology.n_agents()
    }

    pub fn dim(&self) -> usize {
        self.truth.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_agent_ring_is_complete() {
        let t =
            generate_topology(2, 1, &ConnectivityModel::RingPlusChords { chords: 0 }, 1).unwrap();
        assert_eq!(t.adjacency_matrix(), vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn geometric_graph_respects_cap_and_is_connected() {
        for seed in 0..20 {
            let t =
                generate_topology(50, 6, &ConnectivityModel::RandomGeometricCapped, seed).unwrap();
            assert!(t.is_connected());
            assert!((0..50).all(|k| t.neighbors(k).len() <= 7));
            assert!((0..50).all(|k| t.is_linked(k, k)));
            for l in 0..50 {
                for k in 0..50 {
                    assert_eq!(t.is_linked(l, k), t.is_linked(k, l));
                }
            }
        }
    }

    #[test]
    fn explicit_path_neighbors() {
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        let t = generate_topology(5, 2, &ConnectivityModel::Explicit { edges }, 0).unwrap();
        assert_eq!(t.neighbors(0), &[0, 1]);
        assert_eq!(t.neighbors(2), &[1, 2, 3]);
        assert_eq!(t.neighbors(4), &[3, 4]);
        assert_eq!(t.edges(), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn explicit_disconnected_or_out_of_range_rejected() {
        assert!(Topology::from_edges(4, &[(0, 1), (2, 3)]).is_err());
        assert!(Topology::from_edges(3, &[(0, 1), (1, 7)]).is_err());
    }

    #[test]
    fn topology_is_seed_deterministic() {
        let m = ConnectivityModel::RandomGeometricCapped;
        assert_eq!(
            generate_topology(30, 4, &m, 9).unwrap(),
            generate_topology(30, 4, &m, 9).unwrap()
        );
        let r = ConnectivityModel::RingPlusChords { chords: 5 };
        assert_eq!(
            generate_topology(30, 4, &r, 9).unwrap(),
            generate_topology(30, 4, &r, 9).unwrap()
        );
    }

    #[test]
    fn single_model_has_no_separation_constraint() {
        let w = generate_models(1, 2, 0.17, (-1.0, 1.0), 3).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn three_models_are_separated() {
        for seed in 0..50 {
            let w = generate_models(3, 2, 0.17, (-1.0, 1.0), seed).unwrap();
            for a in 0..3 {
                for b in a + 1..3 {
                    assert!(vecops::dist_sq(&w[a], &w[b]).sqrt() >= 0.17);
                }
            }
        }
    }

    #[test]
    fn infeasible_separation_is_an_error() {
        assert!(matches!(
            generate_models(2, 1, 3.0, (-1.0, 1.0), 0),
            Err(Error::InfeasibleSeparation { .. })
        ));
    }

    #[test]
    fn noiseless_zero_model_gives_zero_measurement() {
        let spec = AgentDataSpec::diagonal(&[1.0, 1.0], 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_datum(&spec, &[0.0, 0.0], &mut rng).d, 0.0);
        }
    }

    #[test]
    fn non_spd_covariance_rejected() {
        assert!(AgentDataSpec::new(2, vec![1.0, 2.0, 2.0, 1.0], 0.1).is_err());
        assert!(AgentDataSpec::new(2, vec![1.0, 0.5, 0.0, 1.0], 0.1).is_err());
        assert!(
            compute_risk_constants(&AgentDataSpec::diagonal(&[1.0, 4.0], 0.1).unwrap()).is_ok()
        );
    }

    #[test]
    fn risk_constants_of_simple_spectra() {
        let r =
            compute_risk_constants(&AgentDataSpec::diagonal(&[1.0, 1.0], 0.1).unwrap()).unwrap();
        assert!(
            (r.strong_convexity - 2.0).abs() < 1e-12 && (r.lipschitz_gradient - 2.0).abs() < 1e-12
        );
        let r =
            compute_risk_constants(&AgentDataSpec::diagonal(&[1.0, 4.0], 0.1).unwrap()).unwrap();
        assert!(
            (r.strong_convexity - 2.0).abs() < 1e-12 && (r.lipschitz_gradient - 8.0).abs() < 1e-12
        );
        assert_eq!(r.hessian_lipschitz, 0.0);
    }

    #[test]
    fn sampled_data_recover_configured_statistics() {
        let cov = vec![1.3, 0.4, 0.4, 0.7];
        let spec = AgentDataSpec::new(2, cov.clone(), 0.02).unwrap();
        let wo = [0.4, -0.9];
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 100_000;
        let mut s = [0.0; 4];
        let mut v2 = 0.0;
        for _ in 0..n {
            let x = sample_datum(&spec, &wo, &mut rng);
            s[0] += x.u[0] * x.u[0];
            s[1] += x.u[0] * x.u[1];
            s[3] += x.u[1] * x.u[1];
            let v = x.d - (x.u[0] * wo[0] + x.u[1] * wo[1]);
            v2 += v * v;
        }
        s[2] = s[1];
        let emp: Vec<f64> = s.iter().map(|x| x / n as f64).collect();
        let err: f64 = emp
            .iter()
            .zip(&cov)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = cov.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(
            err / norm < 0.05,
            "relative covariance error {}",
            err / norm
        );
        let var = v2 / n as f64;
        assert!((var / 0.02 - 1.0).abs() < 0.05, "noise variance {var}");
    }

    #[test]
    fn risk_constants_match_closed_form_2x2_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let a: f64 = rng.random_range(0.1..3.0);
            let c: f64 = rng.random_range(0.1..3.0);
            let b: f64 = rng.random_range(-1.0..1.0) * (a * c).sqrt() * 0.95;
            let spec = AgentDataSpec::new(2, vec![a, b, b, c], 0.1).unwrap();
            let r = compute_risk_constants(&spec).unwrap();
            // roots of λ² - (a+c)λ + (ac - b²)
            let mid = 0.5 * (a + c);
            let rad = (0.25 * (a - c).powi(2) + b * b).sqrt();
            assert!((r.strong_convexity - 2.0 * (mid - rad)).abs() < 1e-10);
            assert!((r.lipschitz_gradient - 2.0 * (mid + rad)).abs() < 1e-10);
        }
    }

    #[test]
    fn alpha_must_stay_below_delta_squared() {
        let h = HyperParams::uniform(3, 0.05, 0.03, 0.98, 0.5);
        assert!(h.validate(3, 0.17).is_err());
        let h = HyperParams::uniform(3, 0.05, 0.015, 0.98, 0.5);
        assert!(h.validate(3, 0.17).is_ok());
        assert!(h.validate(4, 0.17).is_err());
    }

    #[test]
    fn random_assignment_covers_all_clusters() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_assignment(5, 3, &mut rng).unwrap();
        assert!(validate_assignment(&a, 3).is_ok());
        assert!(random_assignment(2, 3, &mut rng).is_err());
    }
}
