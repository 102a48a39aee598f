#![no_main]

use growthlab::experiment::SweepConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = SweepConfig::from_json(text) {
        assert!(!cfg.points.is_empty());
        let sizes = cfg.snapshot_sizes();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        assert!(sizes.iter().all(|&s| s <= cfg.n_target));
    }
});
