#![no_main]

use cone_index_cli::parse_r_ladder;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(ladder) = parse_r_ladder(data) {
        assert!(!ladder.is_empty());
        assert!(ladder.iter().all(|r| r.is_finite() && *r > 1.0));
        assert!(ladder.windows(2).all(|w| w[0] < w[1]));
    }
});
