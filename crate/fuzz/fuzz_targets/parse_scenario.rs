#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = diffclust::config::parse_scenario(text) {
            let again = cfg.to_toml().expect("valid documents serialize");
            let back =
                diffclust::config::parse_scenario(&again).expect("serialized documents parse");
            assert_eq!(back, cfg);
        }
    }
});
