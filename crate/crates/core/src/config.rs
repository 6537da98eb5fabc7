//! Scenario document.
//!
//! A scenario is a TOML document with the tables `topology`, `clusters`,
//! `data_profiles`, `hyperparams`, `schedule` and an optional `experiment`
//! table. Anything left unspecified is drawn per Monte-Carlo run from
//! streams derived from the run seed; anything given explicitly is shared by
//! all runs. Agent and cluster indices are 0-based. See the README for the
//! full schema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, AgentDataSpec, ClusterGroundTruth, ConnectivityModel, HyperParams, Scenario, Topology,
};
use crate::network::Scheme;
use crate::rng::{self, tag};

/// Upper limits that keep a parsed document from requesting absurd work.
pub const MAX_AGENTS: usize = 4096;
pub const MAX_DIM: usize = 64;
pub const MAX_CLUSTERS: usize = 1024;
pub const MAX_ROUNDS: usize = 10_000_000;
pub const MAX_MONTE_CARLO: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub topology: TopologyConfig,
    pub clusters: ClustersConfig,
    #[serde(default)]
    pub data_profiles: ProfilesConfig,
    pub hyperparams: HyperConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    RandomGeometricCapped,
    RingPlusChords,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub model: TopologyKind,
    pub n_agents: usize,
    /// Degree cap excluding self. Defaults to 6 for generated graphs and to
    /// no cap for explicit ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chords: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    /// Edge list in text form, one `a b` pair per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_list: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClustersConfig {
    pub n_clusters: usize,
    pub dim: usize,
    /// Required when models are drawn; defaults to the actual minimum
    /// separation when models are explicit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_value_range")]
    pub value_range: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
}

fn default_value_range() -> [f64; 2] {
    [-1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilesConfig {
    /// Log-uniform range for drawn noise variances.
    #[serde(default = "default_noise_range")]
    pub noise_variance_range: [f64; 2],
    /// Uniform range for drawn `tr(R_u)`.
    #[serde(default = "default_trace_range")]
    pub trace_range: [f64; 2],
    /// Explicit noise variances: one value for all agents or one per agent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_variance: Option<Vec<f64>>,
    /// Explicit diagonals of `R_u`: one row for all agents or one per agent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regressor_diag: Option<Vec<Vec<f64>>>,
}

fn default_noise_range() -> [f64; 2] {
    [1e-3, 1e-2]
}

fn default_trace_range() -> [f64; 2] {
    [1.0, 2.0]
}

impl Default for ProfilesConfig {
    fn default() -> Self {
        ProfilesConfig {
            noise_variance_range: default_noise_range(),
            trace_range: default_trace_range(),
            noise_variance: None,
            regressor_diag: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_sizes: Option<Vec<f64>>,
    pub alpha: f64,
    pub nu: f64,
    pub gamma: f64,
    /// Gradient-noise fourth-moment constant used by the stability bound.
    #[serde(default)]
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchKind {
    /// Agents of cluster `c` switch to the model of cluster `(c+1) mod C`.
    CyclicShift,
    /// A fresh uniform assignment with every cluster non-empty.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SwitchAssignment {
    Named(SwitchKind),
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchEvent {
    pub round: usize,
    pub assignment: SwitchAssignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub switches: Vec<SwitchEvent>,
}

fn default_rounds() -> usize {
    800
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            rounds: default_rounds(),
            switches: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergencePolicy {
    Abort,
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_mc")]
    pub monte_carlo: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_decimate")]
    pub decimate: usize,
    #[serde(default = "default_policy")]
    pub on_divergence: DivergencePolicy,
    /// Record relay provenance of the first run (linking scheme only).
    #[serde(default)]
    pub relay_log: bool,
}

fn default_scheme() -> Scheme {
    Scheme::Clustering
}
fn default_mc() -> usize {
    1
}
fn default_decimate() -> usize {
    1
}
fn default_policy() -> DivergencePolicy {
    DivergencePolicy::Abort
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            scheme: default_scheme(),
            monte_carlo: default_mc(),
            seed: 0,
            decimate: default_decimate(),
            on_divergence: default_policy(),
            relay_log: false,
        }
    }
}

/// Parse `a b` pairs, one per line. `#` starts a comment; blank lines are
/// skipped; a comma may separate the two indices.
pub fn parse_edge_list(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::EdgeList {
            line: i + 1,
            msg: msg.to_string(),
        };
        let mut parts = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty());
        let a = parts.next().ok_or_else(|| err("missing first index"))?;
        let b = parts.next().ok_or_else(|| err("missing second index"))?;
        if parts.next().is_some() {
            return Err(err("expected exactly two indices"));
        }
        let a: usize = a
            .parse()
            .map_err(|_| err("first index is not an unsigned integer"))?;
        let b: usize = b
            .parse()
            .map_err(|_| err("second index is not an unsigned integer"))?;
        edges.push((a, b));
    }
    Ok(edges)
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn finite_range(r: [f64; 2], what: &str, positive: bool) -> Result<()> {
    let ok = r[0].is_finite() && r[1].is_finite() && r[0] <= r[1] && (!positive || r[0] > 0.0);
    if ok {
        Ok(())
    } else {
        Err(Error::config(format!(
            "{what} must be a finite range [lo, hi]"
        )))
    }
}

fn broadcast_len<T>(v: &[T], n: usize, what: &str) -> Result<()> {
    if v.len() == 1 || v.len() == n {
        Ok(())
    } else {
        Err(Error::config(format!(
            "{what} needs 1 or {n} entries, got {}",
            v.len()
        )))
    }
}

impl ScenarioConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn n_agents(&self) -> usize {
        self.topology.n_agents
    }

    /// The separation the hyperparameters are checked against.
    pub fn effective_delta(&self) -> Result<f64> {
        let c = &self.clusters;
        match (c.delta, &c.models) {
            (Some(d), _) => Ok(d),
            (None, Some(models)) => {
                let sep = ClusterGroundTruth {
                    models: models.clone(),
                    assignment: Vec::new(),
                    delta: 0.0,
                }
                .min_separation();
                Ok(sep)
            }
            (None, None) => Err(Error::config(
                "clusters.delta is required when models are drawn",
            )),
        }
    }

    pub fn explicit_edges(&self) -> Result<Option<Vec<(usize, usize)>>> {
        let t = &self.topology;
        match (&t.edges, &t.edge_list) {
            (Some(_), Some(_)) => Err(Error::config(
                "give either topology.edges or topology.edge_list",
            )),
            (Some(e), None) => Ok(Some(e.iter().map(|p| (p[0], p[1])).collect())),
            (None, Some(text)) => Ok(Some(parse_edge_list(text)?)),
            (None, None) => Ok(None),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.topology.n_agents;
        if !(2..=MAX_AGENTS).contains(&n) {
            return Err(Error::config(format!(
                "n_agents must be in 2..={MAX_AGENTS}"
            )));
        }
        let t = &self.topology;
        let edges = self.explicit_edges()?;
        match t.model {
            TopologyKind::Explicit => {
                let edges = edges.ok_or_else(|| Error::config("explicit topology needs edges"))?;
                if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= n || *b >= n) {
                    return Err(Error::config(format!("edge ({a}, {b}) is out of range")));
                }
            }
            TopologyKind::RandomGeometricCapped | TopologyKind::RingPlusChords => {
                if edges.is_some() {
                    return Err(Error::config(
                        "edges are only allowed for explicit topologies",
                    ));
                }
            }
        }
        if t.n_max == Some(0) {
            return Err(Error::config("n_max must be at least 1"));
        }
        if t.chords.is_some() && t.model != TopologyKind::RingPlusChords {
            return Err(Error::config("chords only apply to ring-plus-chords"));
        }
        if t.model == TopologyKind::RingPlusChords && n > 2 && self.n_max() < 2 {
            return Err(Error::config("a ring needs n_max >= 2"));
        }

        let c = &self.clusters;
        if !(1..=MAX_CLUSTERS).contains(&c.n_clusters) || c.n_clusters > n {
            return Err(Error::config("n_clusters must be between 1 and n_agents"));
        }
        if !(1..=MAX_DIM).contains(&c.dim) {
            return Err(Error::config(format!("dim must be in 1..={MAX_DIM}")));
        }
        finite_range(c.value_range, "clusters.value_range", false)?;
        if c.value_range[0] >= c.value_range[1] {
            return Err(Error::config("clusters.value_range must have lo < hi"));
        }
        if let Some(d) = c.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::config("clusters.delta must be positive"));
            }
        }
        if let Some(models) = &c.models {
            if models.len() != c.n_clusters || models.iter().any(|w| w.len() != c.dim) {
                return Err(Error::config(
                    "clusters.models must be n_clusters vectors of length dim",
                ));
            }
            if models.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::config("clusters.models must be finite"));
            }
        }
        if let Some(a) = &c.assignment {
            if a.len() != n {
                return Err(Error::config(
                    "clusters.assignment needs one entry per agent",
                ));
            }
            model::validate_assignment(a, c.n_clusters)?;
        }
        let delta = self.effective_delta()?;
        if let (Some(models), true) = (&c.models, c.n_clusters > 1) {
            let sep = ClusterGroundTruth {
                models: models.clone(),
                assignment: Vec::new(),
                delta,
            }
            .min_separation();
            if sep.is_nan() || sep < delta {
                return Err(Error::config("explicit models are closer than delta"));
            }
        }

        let p = &self.data_profiles;
        finite_range(
            p.noise_variance_range,
            "data_profiles.noise_variance_range",
            true,
        )?;
        finite_range(p.trace_range, "data_profiles.trace_range", true)?;
        if let Some(v) = &p.noise_variance {
            broadcast_len(v, n, "data_profiles.noise_variance")?;
            if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::config(
                    "noise variances must be finite and non-negative",
                ));
            }
        }
        if let Some(rows) = &p.regressor_diag {
            broadcast_len(rows, n, "data_profiles.regressor_diag")?;
            if rows.iter().any(|r| r.len() != c.dim) {
                return Err(Error::config("each regressor_diag row needs dim entries"));
            }
            if rows.iter().flatten().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::config("regressor variances must be positive"));
            }
        }

        self.hyper_params()?.validate(
            n,
            if c.n_clusters > 1 {
                delta
            } else {
                f64::INFINITY
            },
        )?;
        if !(self.hyperparams.beta.is_finite() && self.hyperparams.beta >= 0.0) {
            return Err(Error::config("beta must be finite and non-negative"));
        }

        let s = &self.schedule;
        if !(1..=MAX_ROUNDS).contains(&s.rounds) {
            return Err(Error::config(format!("rounds must be in 1..={MAX_ROUNDS}")));
        }
        let mut last = None;
        for ev in &s.switches {
            if ev.round >= s.rounds || last.is_some_and(|r| ev.round <= r) {
                return Err(Error::config(
                    "switch rounds must be strictly increasing and below rounds",
                ));
            }
            last = Some(ev.round);
            if let SwitchAssignment::Explicit(a) = &ev.assignment {
                if a.len() != n {
                    return Err(Error::config("switch assignment needs one entry per agent"));
                }
                model::validate_assignment(a, c.n_clusters)?;
            }
        }

        let e = &self.experiment;
        if !(1..=MAX_MONTE_CARLO).contains(&e.monte_carlo) {
            return Err(Error::config(format!(
                "monte_carlo must be in 1..={MAX_MONTE_CARLO}"
            )));
        }
        if e.decimate == 0 {
            return Err(Error::config("decimate must be at least 1"));
        }
        Ok(())
    }

    fn n_max(&self) -> usize {
        match (self.topology.n_max, self.topology.model) {
            (Some(m), _) => m,
            (None, TopologyKind::Explicit) => self.topology.n_agents.saturating_sub(1).max(1),
            (None, _) => 6,
        }
    }

    pub fn hyper_params(&self) -> Result<HyperParams> {
        let h = &self.hyperparams;
        let n = self.topology.n_agents;
        let step_sizes = match (h.step_size, &h.step_sizes) {
            (Some(mu), None) => vec![mu; n],
            (None, Some(v)) => {
                broadcast_len(v, n, "hyperparams.step_sizes")?;
                if v.len() == 1 {
                    vec![v[0]; n]
                } else {
                    v.clone()
                }
            }
            _ => return Err(Error::config("give exactly one of step_size or step_sizes")),
        };
        Ok(HyperParams {
            step_sizes,
            alpha: h.alpha,
            nu: h.nu,
            gamma: h.gamma,
        })
    }

    /// Draw one network instance. Identical `(self, seed)` give identical
    /// instances.
    pub fn realize(&self, seed: u64) -> Result<Scenario> {
        let n = self.topology.n_agents;
        let c = &self.clusters;
        let model = match self.topology.model {
            TopologyKind::RandomGeometricCapped => ConnectivityModel::RandomGeometricCapped,
            TopologyKind::RingPlusChords => ConnectivityModel::RingPlusChords {
                chords: self.topology.chords.unwrap_or(0),
            },
            TopologyKind::Explicit => ConnectivityModel::Explicit {
                edges: self.explicit_edges()?.unwrap_or_default(),
            },
        };
        let topology: Topology = model::generate_topology(n, self.n_max(), &model, seed)?;

        let delta = self.effective_delta()?;
        let models = match &c.models {
            Some(m) => m.clone(),
            None => model::generate_models(
                c.n_clusters,
                c.dim,
                delta,
                (c.value_range[0], c.value_range[1]),
                seed,
            )?,
        };
        let assignment = match &c.assignment {
            Some(a) => a.clone(),
            None => model::random_assignment(
                n,
                c.n_clusters,
                &mut rng::stream(seed, tag::ASSIGNMENT, 0),
            )?,
        };
        // a single explicit model has infinite separation
        let truth = ClusterGroundTruth::new(models, assignment, delta.min(f64::MAX))?;

        let profiles = self.realize_profiles(seed)?;
        let hyper = self.hyper_params()?;
        Scenario::new(topology, truth, profiles, hyper)
    }

    fn realize_profiles(&self, seed: u64) -> Result<Vec<AgentDataSpec>> {
        let n = self.topology.n_agents;
        let dim = self.clusters.dim;
        let p = &self.data_profiles;
        let mut rng = rng::stream(seed, tag::PROFILES, 0);
        let drawn = model::random_profiles(
            n,
            dim,
            (p.noise_variance_range[0], p.noise_variance_range[1]),
            (p.trace_range[0], p.trace_range[1]),
            &mut rng,
        )?;
        let pick = |v: &[f64], k: usize| if v.len() == 1 { v[0] } else { v[k] };
        drawn
            .into_iter()
            .enumerate()
            .map(|(k, spec)| {
                let noise = p
                    .noise_variance
                    .as_deref()
                    .map_or(spec.noise_variance(), |v| pick(v, k));
                match &p.regressor_diag {
                    Some(rows) => {
                        let row = if rows.len() == 1 { &rows[0] } else { &rows[k] };
                        AgentDataSpec::diagonal(row, noise)
                    }
                    None => AgentDataSpec::new(dim, spec.covariance().to_vec(), noise),
                }
            })
            .collect()
    }

    /// A copy of this document with every random component replaced by the
    /// values realized for `seed`.
    pub fn freeze(&self, seed: u64) -> Result<ScenarioConfig> {
        let sc = self.realize(seed)?;
        let mut out = self.clone();
        let n = sc.n_agents();
        out.topology.model = TopologyKind::Explicit;
        out.topology.chords = None;
        out.topology.edge_list = None;
        out.topology.edges = Some(
            sc.topology
                .edges()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
        );
        out.topology.n_max = Some(sc.topology.max_degree().max(1));
        out.clusters.models = Some(sc.truth.models.clone());
        out.clusters.assignment = Some(sc.truth.assignment.clone());
        out.clusters.delta = Some(self.effective_delta()?);
        let diag = |s: &AgentDataSpec| -> Vec<f64> {
            (0..s.dim())
                .map(|j| s.covariance()[j * s.dim() + j])
                .collect()
        };
        out.data_profiles.noise_variance =
            Some((0..n).map(|k| sc.profiles[k].noise_variance()).collect());
        out.data_profiles.regressor_diag = Some(sc.profiles.iter().map(diag).collect());
        Ok(out)
    }
}

/// Built-in scenarios.
pub mod presets {
    use super::*;

    pub const NAMES: [&str; 5] = ["reference", "easy", "bridge", "decay", "standalone"];

    pub fn by_name(name: &str) -> Result<ScenarioConfig> {
        match name {
            "reference" => Ok(reference()),
            "easy" => Ok(easy()),
            "bridge" => Ok(bridge()),
            "decay" => Ok(decay()),
            "standalone" => Ok(standalone()),
            other => Err(Error::config(format!(
                "unknown preset '{other}', expected one of {}",
                NAMES.join(", ")
            ))),
        }
    }

    fn hyper(mu: f64, alpha: f64, nu: f64, gamma: f64) -> HyperConfig {
        HyperConfig {
            step_size: Some(mu),
            step_sizes: None,
            alpha,
            nu,
            gamma,
            beta: 0.0,
        }
    }

    /// 50 agents, 3 clusters in the plane, degree cap 6, models cyclically
    /// reassigned at round 400.
    pub fn reference() -> ScenarioConfig {
        ScenarioConfig {
            topology: TopologyConfig {
                model: TopologyKind::RandomGeometricCapped,
                n_agents: 50,
                n_max: Some(6),
                chords: None,
                edges: None,
                edge_list: None,
            },
            clusters: ClustersConfig {
                n_clusters: 3,
                dim: 2,
                delta: Some(0.17),
                value_range: [-1.0, 1.0],
                models: None,
                assignment: None,
            },
            data_profiles: ProfilesConfig::default(),
            hyperparams: hyper(0.05, 0.015, 0.98, 0.5),
            schedule: ScheduleConfig {
                rounds: 800,
                switches: vec![SwitchEvent {
                    round: 400,
                    assignment: SwitchAssignment::Named(SwitchKind::CyclicShift),
                }],
            },
            experiment: ExperimentSection {
                monte_carlo: 100,
                seed: 2016,
                ..ExperimentSection::default()
            },
        }
    }

    /// Well separated models and low, uniform noise.
    pub fn easy() -> ScenarioConfig {
        let mut cfg = reference();
        cfg.clusters.delta = Some(0.5);
        cfg.data_profiles.noise_variance = Some(vec![1e-3]);
        cfg.schedule = ScheduleConfig {
            rounds: 600,
            switches: Vec::new(),
        };
        cfg
    }

    /// Ring of 12 agents alternating between two clusters: no agent has a
    /// same-cluster neighbor, every agent has two at distance two.
    pub fn bridge() -> ScenarioConfig {
        let n = 12;
        let edges = (0..n).map(|k| [k, (k + 1) % n]).collect();
        ScenarioConfig {
            topology: TopologyConfig {
                model: TopologyKind::Explicit,
                n_agents: n,
                n_max: Some(2),
                chords: None,
                edges: Some(edges),
                edge_list: None,
            },
            clusters: ClustersConfig {
                n_clusters: 2,
                dim: 2,
                delta: Some(0.5),
                value_range: [-1.0, 1.0],
                models: None,
                assignment: Some((0..n).map(|k| k % 2).collect()),
            },
            data_profiles: ProfilesConfig::default(),
            hyperparams: hyper(0.05, 0.015, 0.98, 0.5),
            schedule: ScheduleConfig {
                rounds: 600,
                switches: Vec::new(),
            },
            experiment: ExperimentSection {
                scheme: Scheme::ClusteringLinking,
                monte_carlo: 100,
                seed: 6,
                relay_log: true,
                ..ExperimentSection::default()
            },
        }
    }

    /// Two nearby models and noisy data, so that both kinds of proximity
    /// test error occur often enough to be counted.
    pub fn decay() -> ScenarioConfig {
        let n = 20;
        ScenarioConfig {
            topology: TopologyConfig {
                model: TopologyKind::RingPlusChords,
                n_agents: n,
                n_max: Some(4),
                chords: Some(20),
                edges: None,
                edge_list: None,
            },
            clusters: ClustersConfig {
                n_clusters: 2,
                dim: 2,
                delta: Some(0.26),
                value_range: [-1.0, 1.0],
                models: Some(vec![vec![0.13, 0.0], vec![-0.13, 0.0]]),
                assignment: Some((0..n).map(|k| k % 2).collect()),
            },
            data_profiles: ProfilesConfig {
                noise_variance: Some(vec![0.03]),
                regressor_diag: Some(vec![vec![1.0, 1.0]]),
                ..ProfilesConfig::default()
            },
            hyperparams: hyper(0.05, 0.01, 0.98, 0.5),
            schedule: ScheduleConfig {
                rounds: 1500,
                switches: Vec::new(),
            },
            experiment: ExperimentSection {
                monte_carlo: 100,
                seed: 86,
                ..ExperimentSection::default()
            },
        }
    }

    /// Two non-cooperating agents with fixed, known data statistics, for
    /// steady-state distribution checks.
    pub fn standalone() -> ScenarioConfig {
        ScenarioConfig {
            topology: TopologyConfig {
                model: TopologyKind::Explicit,
                n_agents: 2,
                n_max: Some(1),
                chords: None,
                edges: Some(vec![[0, 1]]),
                edge_list: None,
            },
            clusters: ClustersConfig {
                n_clusters: 2,
                dim: 2,
                delta: Some(1.0),
                value_range: [-1.0, 1.0],
                models: Some(vec![vec![0.6, -0.4], vec![-0.6, 0.4]]),
                assignment: Some(vec![0, 1]),
            },
            data_profiles: ProfilesConfig {
                noise_variance: Some(vec![0.01]),
                regressor_diag: Some(vec![vec![1.2, 0.8]]),
                ..ProfilesConfig::default()
            },
            hyperparams: hyper(0.005, 0.015, 0.98, 0.5),
            schedule: ScheduleConfig {
                rounds: 20_000,
                switches: Vec::new(),
            },
            experiment: ExperimentSection {
                scheme: Scheme::NonCooperative,
                monte_carlo: 5,
                seed: 78,
                ..ExperimentSection::default()
            },
        }
    }
}
