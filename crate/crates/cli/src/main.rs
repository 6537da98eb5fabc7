//! `diffclust` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 configuration error,
//! 3 a run diverged under the `abort` policy.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use diffclust::analysis;
use diffclust::config::{self, presets, ScenarioConfig};
use diffclust::harness::{self, ExperimentConfig, SweepParam};
use diffclust::network::Scheme;
use diffclust::Error;

#[derive(Parser)]
#[command(
    name = "diffclust",
    version,
    about = "Clustering and linking over multi-task diffusion networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte-Carlo experiment.
    Run(Common),
    /// Run one experiment per value of a hyperparameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of mu, nu, gamma, alpha.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
    },
    /// Run several schemes on the same seeds and report paired differences
    /// against the first.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Comma-separated scheme names.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "non_cooperative,clustering,clustering_linking,oracle"
        )]
        schemes: Vec<Scheme>,
    },
    /// Theory report for the network instance of run 0.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// Detection probability fed to the trust error bounds.
        #[arg(long, default_value_t = 0.95)]
        p_d: f64,
        /// False-alarm probability fed to the trust error bounds.
        #[arg(long, default_value_t = 0.05)]
        p_f: f64,
    },
    /// Print a scenario document.
    GenScenario {
        #[command(flatten)]
        common: Common,
        /// Replace random components with the instance realized for run 0.
        #[arg(long)]
        freeze: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: reference, easy, bridge, decay, standalone.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed; overrides the document.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte-Carlo runs.
    #[arg(long)]
    mc: Option<usize>,
    /// Number of rounds per run.
    #[arg(long)]
    rounds: Option<usize>,
    /// non_cooperative, clustering, clustering_linking or oracle.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Output directory. Without it, tables go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep every n-th round of the traces.
    #[arg(long)]
    decimate: Option<usize>,
    /// Also render SVG charts (needs --out).
    #[arg(long)]
    svg: bool,
}

impl Common {
    fn scenario(&self) -> Result<ScenarioConfig, Error> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
                config::parse_scenario(&text)?
            }
            (None, Some(name)) => presets::by_name(name)?,
            (None, None) => return Err(Error::config("give --config <path> or --preset <name>")),
        };
        let e = &mut cfg.experiment;
        if let Some(s) = self.seed {
            e.seed = s;
        }
        if let Some(n) = self.mc {
            e.monte_carlo = n;
        }
        if let Some(s) = self.scheme {
            e.scheme = s;
        }
        if let Some(d) = self.decimate {
            e.decimate = d;
        }
        if let Some(r) = self.rounds {
            cfg.schedule.rounds = r;
            cfg.schedule.switches.retain(|s| s.round < r);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn experiment(&self) -> Result<ExperimentConfig, Error> {
        Ok(ExperimentConfig::from_scenario(self.scenario()?))
    }

    fn check_svg(&self) -> Result<(), Error> {
        if self.svg && self.out.is_none() {
            return Err(Error::config("--svg needs --out"));
        }
        Ok(())
    }
}

fn emit(out: Option<&Path>, file: &str, text: &str) -> Result<(), Error> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(file), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(common) => {
            common.check_svg()?;
            let cfg = common.experiment()?;
            let ens = harness::run_experiment(&cfg)?;
            let r = &ens.report;
            for (j, s) in r.segments.iter().enumerate() {
                eprintln!(
                    "segment {j} [{}, {}): steady MSD_w {:.2} dB, MSD_psi {:.2} dB, v1 {:.4}, v2 {:.4}",
                    s.start, s.end, s.msd_w, s.msd_psi, s.v1_bar, s.v2_bar
                );
            }
            if !r.excluded_runs.is_empty() {
                eprintln!("excluded diverged runs: {:?}", r.excluded_runs);
            }
            match &common.out {
                Some(dir) => harness::write_experiment(dir, &ens, common.svg)?,
                None => print!("{}", harness::trace_csv(r)),
            }
        }
        Command::Sweep {
            common,
            param,
            values,
        } => {
            common.check_svg()?;
            let cfg = common.experiment()?;
            let rows = harness::sweep(&cfg, param, &values)?;
            match &common.out {
                Some(dir) => harness::write_sweep(dir, param, &rows, common.svg)?,
                None => print!("{}", harness::sweep_csv(param, &rows)),
            }
        }
        Command::Compare { common, schemes } => {
            common.check_svg()?;
            let cfg = common.experiment()?;
            let cmp = harness::compare_schemes(&cfg, &schemes)?;
            for note in &cmp.notes {
                eprintln!("note: {note}");
            }
            match &common.out {
                Some(dir) => harness::write_comparison(dir, &cmp, common.svg)?,
                None => print!("{}", harness::comparison_csv(&cmp)),
            }
        }
        Command::Bounds { common, p_d, p_f } => {
            if !(0.0..=1.0).contains(&p_d) || !(0.0..=1.0).contains(&p_f) {
                return Err(Error::config("--p-d and --p-f must lie in [0, 1]"));
            }
            let cfg = common.scenario()?;
            let sc = cfg.realize(harness::run_seed(cfg.experiment.seed, 0))?;
            let report = analysis::theory_report(&sc, cfg.hyperparams.beta, p_d, p_f)?;
            emit(
                common.out.as_deref(),
                "bounds.json",
                &harness::to_json(&report)?,
            )?;
        }
        Command::GenScenario { common, freeze } => {
            let cfg = common.scenario()?;
            let cfg = if freeze {
                cfg.freeze(harness::run_seed(cfg.experiment.seed, 0))?
            } else {
                cfg
            };
            emit(common.out.as_deref(), "scenario.toml", &cfg.to_toml()?)?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Divergence { .. } | Error::AllRunsDiverged { .. } => 3,
        Error::Config(_)
        | Error::Parse(_)
        | Error::EdgeList { .. }
        | Error::TopologyGeneration { .. }
        | Error::InfeasibleSeparation { .. }
        | Error::NotPositiveDefinite
        | Error::Dimension { .. } => 2,
        Error::Empty(_) | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
