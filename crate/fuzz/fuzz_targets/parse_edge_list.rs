#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(edges) = diffclust::config::parse_edge_list(text) {
            let n = edges
                .iter()
                .map(|&(a, b)| a.max(b))
                .max()
                .map_or(0, |m| m.saturating_add(1));
            if n <= 256 {
                let _ = diffclust::model::Topology::from_edges(n, &edges);
            }
        }
    }
});
