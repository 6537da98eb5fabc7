//! Relay extension: each agent forwards to every neighbor `l` the iterate,
//! among its own and those of its neighbors outside `N_l`, that lies closest
//! to `ψ_l`. Links that clustering ignores thereby carry same-task iterates
//! between agents with no direct connection.

use serde::{Deserialize, Serialize};

use crate::clustering::{self, TrustMatrices};
use crate::learning;
use crate::model::{HyperParams, Topology};
use crate::vecops::{self, Iterates};

/// Index of the agent whose iterate `k` relays to `l`:
/// argmin over `{k} ∪ {m ∈ N_k : m ∉ N_l}` of `‖ψ_m - ψ_l‖²`, ties to the
/// smaller index.
pub fn select_relay(k: usize, l: usize, psi: &Iterates, topology: &Topology) -> usize {
    let target = psi.agent(l);
    let mut best = k;
    let mut best_d = vecops::dist_sq(psi.agent(k), target);
    for &m in topology.neighbors(k) {
        if m == k || topology.is_linked(m, l) {
            continue;
        }
        let d = vecops::dist_sq(psi.agent(m), target);
        if d < best_d || (d == best_d && m < best) {
            best = m;
            best_d = d;
        }
    }
    best
}

/// One relay decision, for the provenance log. The vector selected at
/// `selected_round` is consumed by `to` at `selected_round + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelayRecord {
    pub selected_round: usize,
    pub from: usize,
    pub to: usize,
    pub source: usize,
}

/// Relay vectors `φ_{k→l}` for every ordered edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayState {
    dim: usize,
    /// `outgoing[k][j]` describes `φ_{k→l}` for the j-th neighbor `l` of `k`
    /// (excluding `k`), in topology order.
    targets: Vec<Vec<usize>>,
    sources: Vec<Vec<Option<usize>>>,
    values: Vec<Vec<f64>>,
    /// `incoming[k][j]` = position of `k` in the target list of its j-th
    /// neighbor, so `φ_{l→k}` can be found without searching.
    incoming: Vec<Vec<usize>>,
}

impl RelayState {
    /// `Φ_{-1} = 0` with no source.
    pub fn zeros(topology: &Topology, dim: usize) -> Self {
        let n = topology.n_agents();
        let targets: Vec<Vec<usize>> = (0..n)
            .map(|k| topology.neighbors_excl(k).collect())
            .collect();
        let incoming = (0..n)
            .map(|k| {
                targets[k]
                    .iter()
                    .map(|&l| {
                        targets[l]
                            .iter()
                            .position(|&x| x == k)
                            .expect("symmetric topology")
                    })
                    .collect()
            })
            .collect();
        RelayState {
            dim,
            sources: targets.iter().map(|t| vec![None; t.len()]).collect(),
            values: targets.iter().map(|t| vec![0.0; t.len() * dim]).collect(),
            targets,
            incoming,
        }
    }

    /// `φ_{from→to}` and the agent it originated from.
    pub fn get(&self, from: usize, to: usize) -> Option<(&[f64], Option<usize>)> {
        let j = self.targets[from].iter().position(|&x| x == to)?;
        Some((
            &self.values[from][j * self.dim..(j + 1) * self.dim],
            self.sources[from][j],
        ))
    }

    /// `φ_{l→k}` where `l` is the j-th neighbor of `k`.
    #[inline]
    fn incoming_value(&self, k: usize, j: usize, l: usize) -> &[f64] {
        let pos = self.incoming[k][j];
        &self.values[l][pos * self.dim..(pos + 1) * self.dim]
    }

    /// Recompute every `φ_{k→l}` from the current iterates.
    pub fn update(
        &mut self,
        psi: &Iterates,
        topology: &Topology,
        round: usize,
        mut log: Option<&mut Vec<RelayRecord>>,
    ) {
        let dim = self.dim;
        for k in 0..self.targets.len() {
            for (j, &l) in self.targets[k].iter().enumerate() {
                let m = select_relay(k, l, psi, topology);
                self.sources[k][j] = Some(m);
                self.values[k][j * dim..(j + 1) * dim].copy_from_slice(psi.agent(m));
                if let Some(log) = log.as_deref_mut() {
                    log.push(RelayRecord {
                        selected_round: round,
                        from: k,
                        to: l,
                        source: m,
                    });
                }
            }
        }
    }
}

/// Combine phase of a linked round, after every agent has adapted.
///
/// For each agent `k`: test and smooth the relayed `φ_{l→k}` (from the
/// previous round) against `w_{k,i-1}`, decide, fuse `ψ_{k,i}` with the
/// accepted relays into `w_{k,i}`, and finally refresh all relays from the
/// round-`i` iterates.
#[allow(clippy::too_many_arguments)]
pub fn linked_round(
    psi: &Iterates,
    w_prev: &Iterates,
    w_next: &mut Iterates,
    trust: &mut TrustMatrices,
    relay: &mut RelayState,
    topology: &Topology,
    hyper: &HyperParams,
    round: usize,
    log: Option<&mut Vec<RelayRecord>>,
) {
    let (alpha, nu, gamma) = (hyper.alpha, hyper.nu, hyper.gamma);
    for k in 0..topology.n_agents() {
        let links = trust.column_mut(k);
        for (j, link) in links.iter_mut().enumerate() {
            let phi = relay.incoming_value(k, j, link.neighbor);
            link.b = clustering::proximity_test(phi, w_prev.agent(k), alpha);
            link.f = clustering::trust_update(link.f, link.b, nu);
            link.e = clustering::cluster_decision(link.f, gamma);
        }
        let accepted: Vec<usize> = links
            .iter()
            .enumerate()
            .filter(|(_, t)| t.e)
            .map(|(j, _)| j)
            .collect();
        let a = 1.0 / (accepted.len() + 1) as f64;
        let out = w_next.agent_mut(k);
        for (o, &p) in out.iter_mut().zip(psi.agent(k)) {
            *o = a * p;
        }
        for &j in &accepted {
            let l = links[j].neighbor;
            let phi = relay.incoming_value(k, j, l);
            for (o, &x) in out.iter_mut().zip(phi) {
                *o += a * x;
            }
        }
    }
    relay.update(psi, topology, round, log);
}

/// Uniform weights used by [`linked_round`], exposed for inspection.
pub fn linked_weights(trust: &TrustMatrices, k: usize) -> Vec<(usize, f64)> {
    learning::uniform_column(&trust.believed_neighborhood(k))
}
