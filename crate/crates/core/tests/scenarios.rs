use std::fs;
use std::path::PathBuf;

use diffclust::config::{self, presets};
use diffclust::harness::{self, ExperimentConfig};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn shipped_preset_files_match_presets() {
    for name in presets::NAMES {
        let text = fs::read_to_string(scenario_dir().join(format!("{name}.toml"))).unwrap();
        assert_eq!(
            config::parse_scenario(&text).unwrap(),
            presets::by_name(name).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn every_shipped_file_runs() {
    for entry in fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        let cfg = config::parse_scenario(&fs::read_to_string(&path).unwrap()).unwrap();
        let mut exp = ExperimentConfig::from_scenario(cfg);
        exp.n_monte_carlo = 2;
        exp.n_rounds = exp.n_rounds.min(100);
        exp.switches.retain(|s| s.round < exp.n_rounds);
        let ens =
            harness::run_experiment(&exp).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(ens.report.rounds.len(), exp.n_rounds.div_ceil(exp.decimate));
    }
}

#[test]
fn custom_schedule_recovers_after_each_switch() {
    let text = fs::read_to_string(scenario_dir().join("custom.toml")).unwrap();
    let exp = ExperimentConfig::from_scenario(config::parse_scenario(&text).unwrap());
    let ens = harness::run_experiment(&exp).unwrap();
    let r = &ens.report;
    assert_eq!(r.segments.len(), 3);
    for s in &r.segments {
        assert!(s.msd_w < -20.0, "segment {s:?}");
        assert!(s.v1_bar < 0.05 && s.v2_bar < 0.05, "segment {s:?}");
    }
    for &switch in &[300usize, 600] {
        assert!(r.msd_w_db[switch] > r.segments[0].msd_w + 15.0);
    }
}
