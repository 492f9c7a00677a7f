#![no_main]

use cone_index_cli::{parse_run_config, Command, PartialConfig, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let Ok(partial) = parse_run_config(data) else { return };
    let with_command = PartialConfig {
        command: Some(Command::Stability),
        ..Default::default()
    };
    if let Ok(config) = RunConfig::resolve(partial.merged(with_command)) {
        assert!(!config.n_list.is_empty());
        assert!(config.r_ladder.iter().all(|r| r.is_finite() && *r > 1.0));
        let text = serde_json::to_string(&config).expect("config serializes");
        let again = RunConfig::resolve(parse_run_config(&text).expect("own output parses")).expect("own output resolves");
        assert_eq!(again, config);
    }
});
