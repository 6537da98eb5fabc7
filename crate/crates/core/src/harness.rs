//! Monte-Carlo experiments, parameter sweeps, scheme comparisons, outputs.
//!
//! Run `r` of an experiment with master seed `s` uses the run seed
//! `derive_seed(s, RUN, r)`. That seed realizes the network instance and
//! feeds the per-agent data streams, so two schemes run with the same
//! master seed see the same networks and the same data.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, Bound, PairedDiff, RoundMetrics, TailCounts, TailProbs};
use crate::config::{DivergencePolicy, ScenarioConfig, SwitchAssignment, SwitchEvent, SwitchKind};
use crate::error::{Error, Result};
use crate::linking::RelayRecord;
use crate::model::{self, Scenario};
use crate::network::{Scheme, Simulation};
use crate::plot::{self, Series};
use crate::rng::{self, tag};

/// Fraction of each segment, counted from its end, treated as steady state.
pub const STEADY_FRACTION: f64 = 0.2;

/// One experiment: a scenario template plus execution settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub scheme: Scheme,
    pub n_rounds: usize,
    pub n_monte_carlo: usize,
    pub switches: Vec<SwitchEvent>,
    pub seed: u64,
    pub decimate: usize,
    pub on_divergence: DivergencePolicy,
    pub relay_log: bool,
}

impl ExperimentConfig {
    /// Take execution settings from the document's `schedule` and
    /// `experiment` tables.
    pub fn from_scenario(scenario: ScenarioConfig) -> Self {
        let e = scenario.experiment.clone();
        ExperimentConfig {
            scheme: e.scheme,
            n_rounds: scenario.schedule.rounds,
            n_monte_carlo: e.monte_carlo,
            switches: scenario.schedule.switches.clone(),
            seed: e.seed,
            decimate: e.decimate,
            on_divergence: e.on_divergence,
            relay_log: e.relay_log,
            scenario,
        }
    }

    /// The scenario document with execution settings written back, so that
    /// its own validation covers them.
    fn merged(&self) -> ScenarioConfig {
        let mut s = self.scenario.clone();
        s.schedule.rounds = self.n_rounds;
        s.schedule.switches = self.switches.clone();
        s.experiment.scheme = self.scheme;
        s.experiment.monte_carlo = self.n_monte_carlo;
        s.experiment.seed = self.seed;
        s.experiment.decimate = self.decimate;
        s.experiment.on_divergence = self.on_divergence;
        s.experiment.relay_log = self.relay_log;
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.merged().validate()
    }

    pub fn plan(&self) -> RunPlan {
        RunPlan {
            scheme: self.scheme,
            n_rounds: self.n_rounds,
            switches: self.switches.clone(),
            decimate: self.decimate,
            relay_log: self.relay_log,
        }
    }
}

pub fn run_seed(master: u64, run: usize) -> u64 {
    rng::derive_seed(master, tag::RUN, run as u64)
}

/// Execution settings of a single run on an already realized scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub scheme: Scheme,
    pub n_rounds: usize,
    pub switches: Vec<SwitchEvent>,
    pub decimate: usize,
    pub relay_log: bool,
}

impl RunPlan {
    pub fn new(scheme: Scheme, n_rounds: usize) -> Self {
        RunPlan {
            scheme,
            n_rounds,
            switches: Vec::new(),
            decimate: 1,
            relay_log: false,
        }
    }

    /// `[start, end)` of every segment between switches.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let mut bounds: Vec<usize> = std::iter::once(0)
            .chain(self.switches.iter().map(|s| s.round))
            .collect();
        bounds.push(self.n_rounds);
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// First round of the steady window of `[start, end)`.
pub fn steady_start(start: usize, end: usize) -> usize {
    let len = end - start;
    let window = ((len as f64 * STEADY_FRACTION).round() as usize).clamp(1, len);
    end - window
}

/// Steady-state averages over one segment of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSteady {
    pub start: usize,
    pub end: usize,
    pub window_start: usize,
    pub msd_psi: f64,
    pub msd_w: f64,
    pub v1_bar: f64,
    pub v2_bar: f64,
}

/// Everything recorded from one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub run: usize,
    pub seed: u64,
    /// Metrics of rounds `0, d, 2d, ...` for decimation `d`.
    pub metrics: Vec<RoundMetrics>,
    pub segments: Vec<SegmentSteady>,
    /// Proximity tests and trust levels over all steady windows.
    pub tail: TailCounts,
    pub final_f: Vec<Vec<f64>>,
    pub final_e: Vec<Vec<f64>>,
    pub relay_log: Option<Vec<RelayRecord>>,
    /// Rounds with `max_k ‖w̃_k‖ > max_k ‖ψ̃_k‖`.
    pub fusion_bound_violations: usize,
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

impl RunTrace {
    /// Steady `MSD_w` of the first segment, in dB.
    pub fn steady_msd_w_db(&self) -> f64 {
        analysis::to_db(self.segments[0].msd_w)
    }
}

fn next_assignment(
    event: &SwitchEvent,
    index: usize,
    current: &[usize],
    n_clusters: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    match &event.assignment {
        SwitchAssignment::Named(SwitchKind::CyclicShift) => {
            Ok(current.iter().map(|&c| (c + 1) % n_clusters).collect())
        }
        SwitchAssignment::Named(SwitchKind::Random) => model::random_assignment(
            current.len(),
            n_clusters,
            &mut rng::stream(seed, tag::SWITCH, index as u64),
        ),
        SwitchAssignment::Explicit(a) => Ok(a.clone()),
    }
}

/// Execute one run on a realized scenario. Divergence is reported as
/// [`Error::Divergence`] carrying `run`.
pub fn run_single(scenario: &Scenario, plan: &RunPlan, run: usize, seed: u64) -> Result<RunTrace> {
    if plan.n_rounds == 0 || plan.decimate == 0 {
        return Err(Error::config("rounds and decimate must be at least 1"));
    }
    let started = Instant::now();
    let mut sim = Simulation::new(scenario, plan.scheme, seed);
    if plan.relay_log && plan.scheme == Scheme::ClusteringLinking {
        sim.enable_relay_log();
    }
    let segments = plan.segments();
    let mut steady: Vec<SegmentSteady> = segments
        .iter()
        .map(|&(start, end)| SegmentSteady {
            start,
            end,
            window_start: steady_start(start, end),
            msd_psi: 0.0,
            msd_w: 0.0,
            v1_bar: 0.0,
            v2_bar: 0.0,
        })
        .collect();
    let mut metrics = Vec::with_capacity(plan.n_rounds / plan.decimate + 1);
    let mut tail = TailCounts::default();
    let mut violations = 0;
    let mut seg = 0;
    let mut next_switch = 0;

    for i in 0..plan.n_rounds {
        if let Some(ev) = plan.switches.get(next_switch).filter(|ev| ev.round == i) {
            let a = next_assignment(
                ev,
                next_switch,
                sim.assignment(),
                scenario.truth.n_clusters(),
                seed,
            )?;
            sim.set_assignment(a)?;
            next_switch += 1;
        }
        sim.step().map_err(|d| Error::Divergence {
            run,
            round: d.round,
            agent: d.agent,
        })?;
        let m = sim.metrics();
        if m.max_err_w > m.max_err_psi {
            violations += 1;
        }
        if i % plan.decimate == 0 {
            metrics.push(m);
        }
        while i >= steady[seg].end {
            seg += 1;
        }
        let s = &mut steady[seg];
        if i >= s.window_start {
            s.msd_psi += m.msd_psi;
            s.msd_w += m.msd_w;
            s.v1_bar += m.v1_bar;
            s.v2_bar += m.v2_bar;
            sim.accumulate_tail(&mut tail);
        }
    }
    for s in &mut steady {
        let len = (s.end - s.window_start) as f64;
        s.msd_psi /= len;
        s.msd_w /= len;
        s.v1_bar /= len;
        s.v2_bar /= len;
    }
    Ok(RunTrace {
        run,
        seed,
        metrics,
        segments: steady,
        tail,
        final_f: sim.trust().dense_f(),
        final_e: sim.trust().dense_e(),
        relay_log: sim.take_relay_log(),
        fusion_bound_violations: violations,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

/// Monte-Carlo means across the included runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub scheme: Scheme,
    pub seed: u64,
    pub n_rounds: usize,
    pub n_runs: usize,
    pub excluded_runs: Vec<usize>,
    pub rounds: Vec<usize>,
    pub msd_psi_db: Vec<f64>,
    pub msd_w_db: Vec<f64>,
    pub v1_bar: Vec<f64>,
    pub v2_bar: Vec<f64>,
    /// Per-segment steady averages; MSD values in dB of the MC-mean.
    pub segments: Vec<SegmentSteady>,
    pub tail: TailProbs,
    pub fusion_bound_violations: usize,
    /// Bounds evaluated at the estimated `P_d`, `P_f`.
    pub p_i_bound: Option<Bound>,
    pub p_ii_bound: Option<Bound>,
}

/// Runs kept after the divergence policy plus their aggregate.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub runs: Vec<RunTrace>,
    pub report: AggregateReport,
}

/// Execute all Monte-Carlo runs in parallel.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Ensemble> {
    cfg.validate()?;
    let plan = cfg.plan();
    let outcomes: Vec<Result<RunTrace>> = (0..cfg.n_monte_carlo)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(cfg.seed, r);
            let scenario = cfg.scenario.realize(seed)?;
            let plan = RunPlan {
                relay_log: plan.relay_log && r == 0,
                ..plan.clone()
            };
            run_single(&scenario, &plan, r, seed)
        })
        .collect();
    let mut runs = Vec::with_capacity(outcomes.len());
    let mut excluded = Vec::new();
    for (r, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(t) => runs.push(t),
            Err(Error::Divergence { .. }) if cfg.on_divergence == DivergencePolicy::Exclude => {
                excluded.push(r)
            }
            Err(e) => return Err(e),
        }
    }
    if runs.is_empty() {
        return Err(Error::AllRunsDiverged {
            runs: excluded.len(),
        });
    }
    let report = aggregate(cfg, &runs, excluded)?;
    Ok(Ensemble { runs, report })
}

fn aggregate(
    cfg: &ExperimentConfig,
    runs: &[RunTrace],
    excluded: Vec<usize>,
) -> Result<AggregateReport> {
    let n = runs.len() as f64;
    let len = runs[0].metrics.len();
    let mut psi = vec![0.0; len];
    let mut w = vec![0.0; len];
    let mut v1 = vec![0.0; len];
    let mut v2 = vec![0.0; len];
    for t in runs {
        for (j, m) in t.metrics.iter().enumerate() {
            psi[j] += m.msd_psi / n;
            w[j] += m.msd_w / n;
            v1[j] += m.v1_bar / n;
            v2[j] += m.v2_bar / n;
        }
    }
    let segments = (0..runs[0].segments.len())
        .map(|s| {
            let first = runs[0].segments[s];
            let avg = |f: fn(&SegmentSteady) -> f64| {
                runs.iter().map(|t| f(&t.segments[s])).sum::<f64>() / n
            };
            SegmentSteady {
                msd_psi: analysis::to_db(avg(|x| x.msd_psi)),
                msd_w: analysis::to_db(avg(|x| x.msd_w)),
                v1_bar: avg(|x| x.v1_bar),
                v2_bar: avg(|x| x.v2_bar),
                ..first
            }
        })
        .collect();
    let counts: Vec<TailCounts> = runs.iter().map(|t| t.tail).collect();
    let tail = analysis::estimate_tail_probs(&counts).unwrap_or(TailProbs {
        p_d: None,
        p_f: None,
        miss: None,
        p_i: None,
        p_ii: None,
    });
    let h = &cfg.scenario.hyperparams;
    let (p_i_bound, p_ii_bound) = match (tail.p_d, tail.p_f) {
        (Some(d), Some(f)) => {
            let (a, b) = analysis::trust_error_bounds(d.p_hat, f.p_hat, h.nu, h.gamma);
            (Some(a), Some(b))
        }
        _ => (None, None),
    };
    Ok(AggregateReport {
        scheme: cfg.scheme,
        seed: cfg.seed,
        n_rounds: cfg.n_rounds,
        n_runs: runs.len(),
        excluded_runs: excluded,
        rounds: runs[0].metrics.iter().map(|m| m.round).collect(),
        msd_psi_db: psi.into_iter().map(analysis::to_db).collect(),
        msd_w_db: w.into_iter().map(analysis::to_db).collect(),
        v1_bar: v1,
        v2_bar: v2,
        segments,
        tail,
        fusion_bound_violations: runs.iter().map(|t| t.fusion_bound_violations).sum(),
        p_i_bound,
        p_ii_bound,
    })
}

/// Hyperparameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Mu,
    Nu,
    Gamma,
    Alpha,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mu" | "step_size" => Ok(SweepParam::Mu),
            "nu" => Ok(SweepParam::Nu),
            "gamma" => Ok(SweepParam::Gamma),
            "alpha" => Ok(SweepParam::Alpha),
            other => Err(Error::config(format!("unknown sweep parameter '{other}'"))),
        }
    }
}

impl SweepParam {
    fn apply(self, cfg: &mut ExperimentConfig, value: f64) {
        let h = &mut cfg.scenario.hyperparams;
        match self {
            SweepParam::Mu => {
                h.step_size = Some(value);
                h.step_sizes = None;
            }
            SweepParam::Nu => h.nu = value,
            SweepParam::Gamma => h.gamma = value,
            SweepParam::Alpha => h.alpha = value,
        }
    }
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub report: AggregateReport,
}

impl SweepRow {
    pub fn steady_msd_w_db(&self) -> f64 {
        self.report.segments[0].msd_w
    }

    pub fn steady_msd_psi_db(&self) -> f64 {
        self.report.segments[0].msd_psi
    }
}

/// Run one experiment per value. Every value is validated before the
/// first run starts.
pub fn sweep(
    template: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    let configs: Vec<ExperimentConfig> = values
        .iter()
        .map(|&v| {
            let mut c = template.clone();
            param.apply(&mut c, v);
            c.validate()
                .map_err(|e| Error::config(format!("sweep value {v}: {e}")))?;
            Ok(c)
        })
        .collect::<Result<_>>()?;
    configs
        .iter()
        .zip(values)
        .map(|(c, &value)| {
            Ok(SweepRow {
                value,
                report: run_experiment(c)?.report,
            })
        })
        .collect()
}

/// Paired comparison of one scheme against the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeDiff {
    pub scheme: Scheme,
    pub baseline: Scheme,
    /// Per-run steady `MSD_w` (dB) of `scheme` minus that of `baseline`.
    pub diff_db: PairedDiff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reports: Vec<AggregateReport>,
    pub diffs: Vec<SchemeDiff>,
    /// Per-run steady `MSD_w` in dB, one row per scheme, paired by run.
    pub per_run_db: Vec<Vec<f64>>,
    pub paired_runs: Vec<usize>,
    pub notes: Vec<String>,
}

const LINKING_NOTE: &str = "clustering_linking fuses neighbor vectors relayed at the end of the \
previous round, so neighbor contributions lag by one round; the agent's own term is its current iterate";

/// Run every scheme on the same seeds and compare against the first.
pub fn compare_schemes(cfg: &ExperimentConfig, schemes: &[Scheme]) -> Result<Comparison> {
    if schemes.len() < 2 {
        return Err(Error::config("a comparison needs at least two schemes"));
    }
    let ensembles = schemes
        .iter()
        .map(|&s| {
            let c = ExperimentConfig {
                scheme: s,
                relay_log: cfg.relay_log && s == Scheme::ClusteringLinking,
                ..cfg.clone()
            };
            run_experiment(&c)
        })
        .collect::<Result<Vec<_>>>()?;
    let paired_runs: Vec<usize> = ensembles[0]
        .runs
        .iter()
        .map(|t| t.run)
        .filter(|r| ensembles.iter().all(|e| e.runs.iter().any(|t| t.run == *r)))
        .collect();
    let per_run_db: Vec<Vec<f64>> = ensembles
        .iter()
        .map(|e| {
            e.runs
                .iter()
                .filter(|t| paired_runs.contains(&t.run))
                .map(RunTrace::steady_msd_w_db)
                .collect()
        })
        .collect();
    let diffs = (1..schemes.len())
        .map(|j| {
            Ok(SchemeDiff {
                scheme: schemes[j],
                baseline: schemes[0],
                diff_db: analysis::paired_difference(&per_run_db[j], &per_run_db[0])?,
            })
        })
        .collect::<Result<_>>()?;
    let notes = if schemes.contains(&Scheme::ClusteringLinking) {
        vec![LINKING_NOTE.to_string()]
    } else {
        Vec::new()
    };
    Ok(Comparison {
        reports: ensembles.into_iter().map(|e| e.report).collect(),
        diffs,
        per_run_db,
        paired_runs,
        notes,
    })
}

/// Aggregate trace as CSV: `round,msd_psi_db,msd_w_db,v1_bar,v2_bar`.
pub fn trace_csv(report: &AggregateReport) -> String {
    let mut out = String::from("round,msd_psi_db,msd_w_db,v1_bar,v2_bar\n");
    for j in 0..report.rounds.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            report.rounds[j],
            report.msd_psi_db[j],
            report.msd_w_db[j],
            report.v1_bar[j],
            report.v2_bar[j]
        ));
    }
    out
}

pub fn relay_log_csv(log: &[RelayRecord]) -> String {
    let mut out = String::from("selected_round,from,to,source\n");
    for r in log {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.selected_round, r.from, r.to, r.source
        ));
    }
    out
}

pub fn sweep_csv(param: SweepParam, rows: &[SweepRow]) -> String {
    let name = serde_json::to_value(param)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let mut out =
        format!("{name},steady_msd_psi_db,steady_msd_w_db,p_d,p_f,p_i,p_ii,p_i_bound,p_ii_bound\n");
    let p = |e: Option<analysis::ProbEstimate>| e.map_or(String::new(), |e| e.p_hat.to_string());
    let b = |x: Option<Bound>| {
        x.and_then(Bound::value)
            .map_or(String::new(), |v| v.to_string())
    };
    for row in rows {
        let r = &row.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.value,
            r.segments[0].msd_psi,
            r.segments[0].msd_w,
            p(r.tail.p_d),
            p(r.tail.p_f),
            p(r.tail.p_i),
            p(r.tail.p_ii),
            b(r.p_i_bound),
            b(r.p_ii_bound),
        ));
    }
    out
}

pub fn comparison_csv(cmp: &Comparison) -> String {
    let mut out = String::from("scheme,baseline,n,mean_diff_db,ci_low_db,ci_high_db\n");
    for d in &cmp.diffs {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            d.scheme, d.baseline, d.diff_db.n, d.diff_db.mean, d.diff_db.ci_low, d.diff_db.ci_high
        ));
    }
    out
}

pub fn msd_svg(reports: &[&AggregateReport]) -> String {
    let xs: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| r.rounds.iter().map(|&i| i as f64).collect())
        .collect();
    let names: Vec<String> = reports
        .iter()
        .map(|r| format!("{} (w)", r.scheme))
        .collect();
    let series: Vec<Series<'_>> = reports
        .iter()
        .enumerate()
        .map(|(j, r)| Series {
            name: &names[j],
            xs: &xs[j],
            ys: &r.msd_w_db,
        })
        .collect();
    plot::line_chart("Network MSD", "round", "MSD (dB)", &series)
}

pub fn clustering_error_svg(report: &AggregateReport) -> String {
    let xs: Vec<f64> = report.rounds.iter().map(|&i| i as f64).collect();
    plot::line_chart(
        &format!("Clustering errors ({})", report.scheme),
        "round",
        "normalized error",
        &[
            Series {
                name: "type I",
                xs: &xs,
                ys: &report.v1_bar,
            },
            Series {
                name: "type II",
                xs: &xs,
                ys: &report.v2_bar,
            },
        ],
    )
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Parse(e.to_string()))
}

/// Write `trace.csv`, `report.json`, `relay_log.csv` when present, and the
/// SVG charts when `svg` is set.
pub fn write_experiment(dir: &Path, ensemble: &Ensemble, svg: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("trace.csv"), trace_csv(&ensemble.report))?;
    fs::write(dir.join("report.json"), json(&ensemble.report)?)?;
    if let Some(log) = ensemble.runs.first().and_then(|t| t.relay_log.as_ref()) {
        fs::write(dir.join("relay_log.csv"), relay_log_csv(log))?;
    }
    if svg {
        fs::write(dir.join("msd.svg"), msd_svg(&[&ensemble.report]))?;
        fs::write(
            dir.join("clustering_errors.svg"),
            clustering_error_svg(&ensemble.report),
        )?;
    }
    Ok(())
}

pub fn write_sweep(dir: &Path, param: SweepParam, rows: &[SweepRow], svg: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), sweep_csv(param, rows))?;
    fs::write(dir.join("sweep.json"), json(&rows)?)?;
    for (j, row) in rows.iter().enumerate() {
        fs::write(dir.join(format!("trace_{j}.csv")), trace_csv(&row.report))?;
    }
    if svg {
        let refs: Vec<&AggregateReport> = rows.iter().map(|r| &r.report).collect();
        fs::write(dir.join("msd.svg"), msd_svg(&refs))?;
    }
    Ok(())
}

pub fn write_comparison(dir: &Path, cmp: &Comparison, svg: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("comparison.csv"), comparison_csv(cmp))?;
    fs::write(dir.join("comparison.json"), json(cmp)?)?;
    for r in &cmp.reports {
        fs::write(dir.join(format!("trace_{}.csv", r.scheme)), trace_csv(r))?;
    }
    if svg {
        let refs: Vec<&AggregateReport> = cmp.reports.iter().collect();
        fs::write(dir.join("msd.svg"), msd_svg(&refs))?;
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    json(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::presets;
    use crate::learning;
    use crate::model::{AgentDataSpec, ClusterGroundTruth, HyperParams, Topology};

    fn small(scheme: Scheme) -> ExperimentConfig {
        let mut s = presets::easy();
        s.topology.n_agents = 12;
        let mut c = ExperimentConfig::from_scenario(s);
        c.scheme = scheme;
        c.n_rounds = 120;
        c.n_monte_carlo = 4;
        c
    }

    #[test]
    fn segments_and_windows() {
        let mut p = RunPlan::new(Scheme::Clustering, 800);
        p.switches.push(SwitchEvent {
            round: 400,
            assignment: SwitchAssignment::Named(SwitchKind::CyclicShift),
        });
        assert_eq!(p.segments(), vec![(0, 400), (400, 800)]);
        assert_eq!(steady_start(0, 400), 320);
        assert_eq!(steady_start(400, 800), 720);
        assert_eq!(steady_start(0, 1), 0);
    }

    #[test]
    fn single_agent_oracle_is_standalone_sgd() {
        let topo = Topology::from_edges(1, &[]).unwrap();
        let truth = ClusterGroundTruth::new(vec![vec![0.3, -0.2]], vec![0], 1.0).unwrap();
        let spec = AgentDataSpec::diagonal(&[1.0, 0.5], 0.01).unwrap();
        let hyper = HyperParams::uniform(1, 0.05, 0.015, 0.98, 0.5);
        let sc = Scenario::new(topo, truth, vec![spec.clone()], hyper).unwrap();
        let trace = run_single(&sc, &RunPlan::new(Scheme::Oracle, 200), 0, 17).unwrap();

        let mut rng = rng::stream(17, tag::DATA, 0);
        let mut agent = learning::AgentState::new(2, 0.05);
        let wo = [0.3, -0.2];
        for m in &trace.metrics {
            let x = model::sample_datum(&spec, &wo, &mut rng);
            agent.adapt(&x.u, x.d).unwrap();
            let e: f64 = wo
                .iter()
                .zip(&agent.psi)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            assert_eq!(m.msd_w, e);
            assert_eq!(m.msd_psi, e);
        }
    }

    #[test]
    fn decimation_length_and_replay() {
        let mut c = small(Scheme::Clustering);
        c.decimate = 7;
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.runs[0].metrics.len(), 120usize.div_ceil(7));
        assert_eq!(a.report, b.report);
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.metrics, y.metrics);
            assert_eq!(x.final_f, y.final_f);
            assert_eq!(x.tail, y.tail);
        }
        assert_eq!(trace_csv(&a.report), trace_csv(&b.report));
    }

    #[test]
    fn aggregate_is_independent_of_thread_count() {
        let c = small(Scheme::Clustering);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&c).unwrap());
        let parallel = run_experiment(&c).unwrap();
        assert_eq!(serial.report, parallel.report);
    }

    #[test]
    fn switch_keeps_state_and_moves_models() {
        let mut c = small(Scheme::Clustering);
        c.switches.push(SwitchEvent {
            round: 60,
            assignment: SwitchAssignment::Named(SwitchKind::CyclicShift),
        });
        let e = run_experiment(&c).unwrap();
        let t = &e.runs[0];
        assert!(t.metrics[60].msd_w > 10.0 * t.metrics[59].msd_w);
        assert_eq!(t.segments.len(), 2);
    }

    #[test]
    fn sweep_rejects_before_running() {
        let c = small(Scheme::Clustering);
        assert!(sweep(&c, SweepParam::Mu, &[]).is_err());
        assert!(sweep(&c, SweepParam::Nu, &[0.9, 1.5]).is_err());
        let rows = sweep(&c, SweepParam::Mu, &[0.1, 0.05]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(sweep_csv(SweepParam::Mu, &rows).lines().count(), 3);
    }

    #[test]
    fn comparison_needs_two_schemes_and_pairs_runs() {
        let c = small(Scheme::Clustering);
        assert!(compare_schemes(&c, &[Scheme::Clustering]).is_err());
        let cmp = compare_schemes(&c, &[Scheme::NonCooperative, Scheme::Clustering]).unwrap();
        assert_eq!(cmp.diffs.len(), 1);
        assert_eq!(cmp.paired_runs, vec![0, 1, 2, 3]);
        assert!(cmp.diffs[0].diff_db.mean < 0.0);
        assert!(cmp.notes.is_empty());
        let cmp = compare_schemes(&c, &[Scheme::Clustering, Scheme::ClusteringLinking]).unwrap();
        assert_eq!(cmp.notes.len(), 1);
    }

    #[test]
    fn divergence_policies() {
        let mut c = small(Scheme::NonCooperative);
        c.scenario.hyperparams.step_size = Some(1.9);
        c.scenario.data_profiles.regressor_diag = Some(vec![vec![3.0, 3.0]]);
        c.n_rounds = 2000;
        assert!(matches!(
            run_experiment(&c),
            Err(Error::Divergence { run: 0, .. })
        ));
        c.on_divergence = DivergencePolicy::Exclude;
        assert!(matches!(
            run_experiment(&c),
            Err(Error::AllRunsDiverged { runs: 4 })
        ));
    }

    #[test]
    fn writes_outputs() {
        let mut c = small(Scheme::ClusteringLinking);
        c.relay_log = true;
        let e = run_experiment(&c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_experiment(dir.path(), &e, true).unwrap();
        for f in [
            "trace.csv",
            "report.json",
            "relay_log.csv",
            "msd.svg",
            "clustering_errors.svg",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        assert_eq!(csv.lines().count(), 121);
    }
}
