//! Replays the checked-in fuzz seeds through the parsers with the same
//! checks the fuzz targets make.

use std::path::PathBuf;

use cone_index::MinimalLink;
use cone_index_cli::config::parse_link_list;
use cone_index_cli::{parse_link_spec, parse_r_ladder, parse_run_config, Command, PartialConfig, RunConfig};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let bytes = std::fs::read(&path).unwrap();
            (path, String::from_utf8_lossy(&bytes).into_owned())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn raw_link_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("raw_link") {
        if let Ok(link) = MinimalLink::from_json(&text, "raw:fuzz") {
            assert!(link.volume > 0.0 && link.volume.is_finite(), "{}", path.display());
            assert!(link.shape_norm_sq >= 0.0);
            assert!(link.jacobi_spectrum(1).unwrap().levels[0].eigenvalue.is_finite());
            accepted += 1;
        }
    }
    assert_eq!(accepted, 2);
}

#[test]
fn run_config_seeds() {
    let mut accepted = 0;
    for (path, text) in seeds("run_config") {
        let Ok(partial) = parse_run_config(&text) else { continue };
        let with_command = PartialConfig {
            command: Some(Command::Stability),
            ..Default::default()
        };
        if let Ok(config) = RunConfig::resolve(partial.merged(with_command)) {
            assert!(config.r_ladder.iter().all(|r| r.is_finite() && *r > 1.0), "{}", path.display());
            let text = serde_json::to_string(&config).unwrap();
            assert_eq!(RunConfig::resolve(parse_run_config(&text).unwrap()).unwrap(), config);
            accepted += 1;
        }
    }
    assert_eq!(accepted, 2);
}

#[test]
fn link_spec_seeds() {
    for (path, text) in seeds("link_spec") {
        if let Ok(spec) = parse_link_spec(&text) {
            assert_eq!(parse_link_spec(&spec.to_string()).unwrap(), spec, "{}", path.display());
        }
        let _ = parse_link_list(&text);
    }
}

#[test]
fn r_ladder_seeds() {
    for (path, text) in seeds("r_ladder") {
        if let Ok(ladder) = parse_r_ladder(&text) {
            assert!(ladder.iter().all(|r| r.is_finite() && *r > 1.0), "{}", path.display());
            assert!(ladder.windows(2).all(|w| w[0] < w[1]));
        }
    }
    assert_eq!(parse_r_ladder("1000, 10 ,10").unwrap(), vec![10.0, 1000.0]);
}
