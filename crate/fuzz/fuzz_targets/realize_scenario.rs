#![no_main]

use diffclust::network::{Scheme, Simulation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((seed_bytes, doc)) = data.split_first_chunk::<8>() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(doc) else {
        return;
    };
    let Ok(cfg) = diffclust::config::parse_scenario(text) else {
        return;
    };
    if cfg.n_agents() > 64 || cfg.clusters.dim > 8 {
        return;
    }
    let Ok(sc) = cfg.realize(u64::from_le_bytes(*seed_bytes)) else {
        return;
    };
    for scheme in Scheme::ALL {
        let mut sim = Simulation::new(&sc, scheme, 0);
        for _ in 0..20 {
            if sim.step().is_err() {
                break;
            }
            let m = sim.metrics();
            assert!((0.0..=1.0).contains(&m.v1_bar) && (0.0..=1.0).contains(&m.v2_bar));
        }
    }
});
