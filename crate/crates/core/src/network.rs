//! Round-synchronous execution of one simulation run.
//!
//! Every round has two phases separated by a barrier: all agents adapt from
//! their round `i-1` state, then all agents exchange and combine using only
//! the frozen round-`i` iterates and their own `w_{k,i-1}`.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, RoundMetrics, TailCounts};
use crate::clustering::TrustMatrices;
use crate::error::{Error, Result};
use crate::learning;
use crate::linking::{self, RelayRecord, RelayState};
use crate::model::{self, Scenario};
use crate::rng::{self, tag};
use crate::vecops::{self, Iterates};

/// Which cooperation rule the agents follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Stand-alone learners, `w_k = ψ_k`.
    NonCooperative,
    /// Online clustering with fusion over believed neighbors.
    Clustering,
    /// Clustering plus relaying across foreign-task links.
    ClusteringLinking,
    /// Fusion over the true same-cluster neighbors from round 0.
    Oracle,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::NonCooperative,
        Scheme::Clustering,
        Scheme::ClusteringLinking,
        Scheme::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::NonCooperative => "non_cooperative",
            Scheme::Clustering => "clustering",
            Scheme::ClusteringLinking => "clustering_linking",
            Scheme::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_").to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == norm)
            .ok_or_else(|| Error::config(format!("unknown scheme '{s}'")))
    }
}

/// Agent that produced a non-finite iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Diverged {
    pub round: usize,
    pub agent: usize,
}

/// State of one run.
pub struct Simulation<'s> {
    scenario: &'s Scenario,
    scheme: Scheme,
    assignment: Vec<usize>,
    true_nbhd: Vec<Vec<usize>>,
    psi: Iterates,
    w: Iterates,
    w_next: Iterates,
    trust: TrustMatrices,
    relay: Option<RelayState>,
    streams: Vec<ChaCha8Rng>,
    u_buf: Vec<f64>,
    round: usize,
    relay_log: Option<Vec<RelayRecord>>,
}

impl<'s> Simulation<'s> {
    /// `ψ_{-1} = w_{-1} = 0`, `F = B = E = I`, `Φ_{-1} = 0`. Agent `k` draws
    /// its data from stream `(data_seed, DATA, k)`, whatever the scheme.
    pub fn new(scenario: &'s Scenario, scheme: Scheme, data_seed: u64) -> Self {
        let n = scenario.n_agents();
        let m = scenario.dim();
        let mut sim = Simulation {
            scenario,
            scheme,
            assignment: scenario.truth.assignment.clone(),
            true_nbhd: Vec::new(),
            psi: Iterates::zeros(n, m),
            w: Iterates::zeros(n, m),
            w_next: Iterates::zeros(n, m),
            trust: TrustMatrices::identity(&scenario.topology),
            relay: (scheme == Scheme::ClusteringLinking)
                .then(|| RelayState::zeros(&scenario.topology, m)),
            streams: (0..n)
                .map(|k| rng::stream(data_seed, tag::DATA, k as u64))
                .collect(),
            u_buf: vec![0.0; m],
            round: 0,
            relay_log: None,
        };
        sim.refresh_truth();
        sim
    }

    /// Record every relay decision from now on.
    pub fn enable_relay_log(&mut self) {
        self.relay_log.get_or_insert_with(Vec::new);
    }

    pub fn take_relay_log(&mut self) -> Option<Vec<RelayRecord>> {
        self.relay_log.take()
    }

    fn refresh_truth(&mut self) {
        let topo = &self.scenario.topology;
        self.true_nbhd = (0..topo.n_agents())
            .map(|k| {
                topo.neighbors(k)
                    .iter()
                    .copied()
                    .filter(|&l| self.assignment[l] == self.assignment[k])
                    .collect()
            })
            .collect();
    }

    /// Change which model generates each agent's data. Iterates, trust and
    /// relays are left untouched.
    pub fn set_assignment(&mut self, assignment: Vec<usize>) -> Result<()> {
        if assignment.len() != self.scenario.n_agents() {
            return Err(Error::Dimension {
                expected: self.scenario.n_agents(),
                got: assignment.len(),
            });
        }
        model::validate_assignment(&assignment, self.scenario.truth.n_clusters())?;
        self.assignment = assignment;
        self.refresh_truth();
        Ok(())
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Index of the next round to execute.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn psi(&self) -> &Iterates {
        &self.psi
    }

    pub fn w(&self) -> &Iterates {
        &self.w
    }

    pub fn trust(&self) -> &TrustMatrices {
        &self.trust
    }

    pub fn relay(&self) -> Option<&RelayState> {
        self.relay.as_ref()
    }

    /// Columns of E°: agent `k` and its same-cluster neighbors.
    pub fn true_neighborhoods(&self) -> &[Vec<usize>] {
        &self.true_nbhd
    }

    /// w°_k under the current assignment.
    pub fn true_model(&self, k: usize) -> &[f64] {
        &self.scenario.truth.models[self.assignment[k]]
    }

    /// Believed neighborhood `N_{k,i}` used by the last fusion.
    pub fn believed_neighborhood(&self, k: usize) -> Vec<usize> {
        match self.scheme {
            Scheme::NonCooperative => vec![k],
            Scheme::Oracle => self.true_nbhd[k].clone(),
            Scheme::Clustering | Scheme::ClusteringLinking => self.trust.believed_neighborhood(k),
        }
    }

    /// Execute one round.
    pub fn step(&mut self) -> std::result::Result<(), Diverged> {
        let round = self.round;
        let scenario = self.scenario;
        let hyper = &scenario.hyper;
        let topo = &scenario.topology;

        for k in 0..scenario.n_agents() {
            let w_true = &scenario.truth.models[self.assignment[k]];
            let d = scenario.profiles[k].sample_into(w_true, &mut self.streams[k], &mut self.u_buf);
            learning::adapt_in_place(self.psi.agent_mut(k), hyper.step_sizes[k], &self.u_buf, d)
                .map_err(|_| Diverged { round, agent: k })?;
        }

        match self.scheme {
            Scheme::NonCooperative => {
                self.w_next.clone_from(&self.psi);
            }
            Scheme::Clustering | Scheme::Oracle => {
                let psi = &self.psi;
                for k in 0..scenario.n_agents() {
                    self.trust.update_column(
                        k,
                        self.w.agent(k),
                        hyper.alpha,
                        hyper.nu,
                        hyper.gamma,
                        |l| psi.agent(l),
                    );
                    let column = if self.scheme == Scheme::Oracle {
                        let truth = &self.true_nbhd[k];
                        for link in self.trust.column_mut(k) {
                            link.e = truth.binary_search(&link.neighbor).is_ok();
                        }
                        learning::uniform_column(truth)
                    } else {
                        learning::uniform_column(&self.trust.believed_neighborhood(k))
                    };
                    learning::fuse_into(&column, self.w_next.agent_mut(k), |l| psi.agent(l));
                }
            }
            Scheme::ClusteringLinking => {
                let relay = self
                    .relay
                    .as_mut()
                    .expect("linking scheme carries relay state");
                linking::linked_round(
                    &self.psi,
                    &self.w,
                    &mut self.w_next,
                    &mut self.trust,
                    relay,
                    topo,
                    hyper,
                    round,
                    self.relay_log.as_mut(),
                );
            }
        }
        std::mem::swap(&mut self.w, &mut self.w_next);
        self.round += 1;
        Ok(())
    }

    /// Normalized type-I/II errors of every agent against E°.
    pub fn per_agent_errors(&self) -> Vec<(f64, f64)> {
        let topo = &self.scenario.topology;
        let mut believed = Vec::new();
        let mut truth = Vec::new();
        (0..topo.n_agents())
            .map(|k| {
                let nb = topo.neighbors(k);
                believed.clear();
                truth.clear();
                let own = self.believed_neighborhood(k);
                for &l in nb {
                    believed.push(own.binary_search(&l).is_ok());
                    truth.push(self.true_nbhd[k].binary_search(&l).is_ok());
                }
                analysis::normalized_errors(&believed, &truth, nb.len())
                    .expect("columns have equal length")
            })
            .collect()
    }

    /// Metrics of the state left by the last executed round.
    pub fn metrics(&self) -> RoundMetrics {
        let n = self.scenario.n_agents();
        let mut msd_psi = 0.0;
        let mut msd_w = 0.0;
        let mut max_psi = 0.0f64;
        let mut max_w = 0.0f64;
        let mut err = vec![0.0; self.scenario.dim()];
        for k in 0..n {
            let wo = self.true_model(k);
            for (e, (a, b)) in err.iter_mut().zip(wo.iter().zip(self.psi.agent(k))) {
                *e = a - b;
            }
            let sp = vecops::norm_sq(&err);
            for (e, (a, b)) in err.iter_mut().zip(wo.iter().zip(self.w.agent(k))) {
                *e = a - b;
            }
            let sw = vecops::norm_sq(&err);
            msd_psi += sp;
            msd_w += sw;
            max_psi = max_psi.max(sp.sqrt());
            max_w = max_w.max(sw.sqrt());
        }
        let errs = self.per_agent_errors();
        let v1_bar = errs.iter().map(|e| e.0).sum::<f64>() / n as f64;
        let v2_bar = errs.iter().map(|e| e.1).sum::<f64>() / n as f64;
        RoundMetrics {
            round: self.round.saturating_sub(1),
            msd_psi,
            msd_w,
            v1_bar,
            v2_bar,
            max_err_psi: max_psi,
            max_err_w: max_w,
        }
    }

    /// Add the current round's proximity tests and trust levels to `counts`.
    pub fn accumulate_tail(&self, counts: &mut TailCounts) {
        if self.scheme == Scheme::NonCooperative {
            return;
        }
        let gamma = self.scenario.hyper.gamma;
        for k in 0..self.scenario.n_agents() {
            for link in self.trust.column(k) {
                if self.assignment[link.neighbor] == self.assignment[k] {
                    counts.same_links += 1;
                    counts.same_b1 += link.b as u64;
                    counts.same_f_below += (link.f < gamma) as u64;
                } else {
                    counts.cross_links += 1;
                    counts.cross_b1 += link.b as u64;
                    counts.cross_f_at_least += (link.f >= gamma) as u64;
                }
            }
        }
    }
}
