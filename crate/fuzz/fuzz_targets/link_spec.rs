#![no_main]

use cone_index_cli::config::parse_link_list;
use cone_index_cli::parse_link_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(spec) = parse_link_spec(data) {
        assert_eq!(parse_link_spec(&spec.to_string()).expect("display parses"), spec);
    }
    let _ = parse_link_list(data);
});
