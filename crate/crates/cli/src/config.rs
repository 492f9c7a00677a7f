//! Run configuration: a flat JSON document whose keys mirror the flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Index,
    Stability,
    Density,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `equator`, `clifford:p` or `raw:path`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LinkSpec {
    Equator,
    Clifford { p: usize },
    Raw { path: PathBuf },
}

impl fmt::Display for LinkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkSpec::Equator => write!(f, "equator"),
            LinkSpec::Clifford { p } => write!(f, "clifford:{p}"),
            LinkSpec::Raw { path } => write!(f, "raw:{}", path.display()),
        }
    }
}

impl FromStr for LinkSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_link_spec(s)
    }
}

impl TryFrom<String> for LinkSpec {
    type Error = ParseError;

    fn try_from(s: String) -> Result<Self, ParseError> {
        parse_link_spec(&s)
    }
}

impl From<LinkSpec> for String {
    fn from(l: LinkSpec) -> String {
        l.to_string()
    }
}

pub fn parse_link_spec(text: &str) -> Result<LinkSpec, ParseError> {
    let bad = |why: &str| ParseError::LinkSpec {
        spec: text.to_string(),
        reason: why.to_string(),
    };
    let s = text.trim();
    if s == "equator" {
        return Ok(LinkSpec::Equator);
    }
    if let Some(rest) = s.strip_prefix("clifford:") {
        let p: usize = rest.parse().map_err(|_| bad("p must be a positive integer"))?;
        if p == 0 {
            return Err(bad("p must be at least 1"));
        }
        return Ok(LinkSpec::Clifford { p });
    }
    if let Some(rest) = s.strip_prefix("raw:") {
        if rest.is_empty() {
            return Err(bad("empty path"));
        }
        return Ok(LinkSpec::Raw { path: rest.into() });
    }
    Err(bad("expected equator, clifford:<p> or raw:<path>"))
}

/// Comma-separated list of link specs; a `raw:` path runs to the end of its
/// item, so paths cannot contain commas.
pub fn parse_link_list(text: &str) -> Result<Vec<LinkSpec>, ParseError> {
    let specs: Vec<LinkSpec> = text.split(',').map(parse_link_spec).collect::<Result<_, _>>()?;
    if specs.is_empty() {
        return Err(ParseError::LinkSpec {
            spec: text.into(),
            reason: "no link given".into(),
        });
    }
    Ok(specs)
}

/// Comma-separated multiples of R0, each finite and above 1; returned sorted
/// and without duplicates.
pub fn parse_r_ladder(text: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        let v: f64 = item.parse().map_err(|_| ParseError::Ladder {
            text: text.into(),
            reason: format!("'{item}' is not a number"),
        })?;
        out.push(v);
    }
    normalize_ladder(out).map_err(|reason| ParseError::Ladder {
        text: text.into(),
        reason,
    })
}

fn normalize_ladder(mut values: Vec<f64>) -> Result<Vec<f64>, String> {
    if values.is_empty() {
        return Err("empty ladder".into());
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 1.0)) {
        return Err(format!("R/R0 = {v} must be finite and greater than 1"));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

fn parse_usize_list(field: &'static str, text: &str) -> Result<Vec<usize>, ParseError> {
    text.split(',')
        .map(|s| {
            s.trim().parse().map_err(|_| ParseError::Field {
                field,
                reason: format!("'{s}' is not a non-negative integer"),
            })
        })
        .collect()
}

pub fn parse_n_list(text: &str) -> Result<Vec<usize>, ParseError> {
    parse_usize_list("n_list", text)
}

/// Every key optional; the same shape serves the config file and the flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub n_list: Option<Vec<usize>>,
    pub m: Option<f64>,
    pub link_specs: Option<Vec<LinkSpec>>,
    #[serde(rename = "R_ladder", alias = "r_ladder")]
    pub r_ladder: Option<Vec<f64>>,
    pub k_max: Option<usize>,
    pub grid_size: Option<usize>,
    pub profile_tolerance: Option<f64>,
    pub density_rungs: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl PartialConfig {
    /// Values in `over` win.
    pub fn merged(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            command: over.command.or(self.command),
            n_list: over.n_list.or(self.n_list),
            m: over.m.or(self.m),
            link_specs: over.link_specs.or(self.link_specs),
            r_ladder: over.r_ladder.or(self.r_ladder),
            k_max: over.k_max.or(self.k_max),
            grid_size: over.grid_size.or(self.grid_size),
            profile_tolerance: over.profile_tolerance.or(self.profile_tolerance),
            density_rungs: over.density_rungs.or(self.density_rungs),
            output: over.output.or(self.output),
            format: over.format.or(self.format),
        }
    }
}

/// Decodes a config document, reporting line and column on failure.
pub fn parse_run_config(text: &str) -> Result<PartialConfig, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Config {
        line: e.line(),
        column: e.column(),
        reason: e.to_string(),
    })
}

/// Fully resolved configuration, embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n_list: Vec<usize>,
    pub m: f64,
    pub link_specs: Vec<LinkSpec>,
    #[serde(rename = "R_ladder")]
    pub r_ladder: Vec<f64>,
    pub k_max: usize,
    pub grid_size: usize,
    pub profile_tolerance: f64,
    pub density_rungs: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const MAX_DIMENSION: usize = 64;
pub const MAX_K: usize = 500;
pub const MIN_GRID: usize = 16;
pub const MAX_GRID: usize = 1 << 20;

impl RunConfig {
    pub fn resolve(p: PartialConfig) -> Result<Self, ParseError> {
        let field = |field: &'static str, reason: String| ParseError::Field { field, reason };
        let command = p.command.ok_or_else(|| field("command", "no command given".into()))?;
        let n_list = p.n_list.unwrap_or_else(|| vec![4]);
        if n_list.is_empty() {
            return Err(field("n_list", "empty list".into()));
        }
        if let Some(n) = n_list.iter().find(|&&n| !(4..=MAX_DIMENSION).contains(&n)) {
            return Err(field("n_list", format!("n = {n} outside 4..={MAX_DIMENSION}")));
        }
        let mut n_list = n_list;
        n_list.sort_unstable();
        n_list.dedup();
        let m = p.m.unwrap_or(2.0);
        if !(m.is_finite() && m > 0.0) {
            return Err(field("m", format!("mass {m} must be positive and finite")));
        }
        let link_specs = p.link_specs.unwrap_or_else(|| vec![LinkSpec::Equator]);
        if link_specs.is_empty() {
            return Err(field("link_specs", "empty list".into()));
        }
        let r_ladder = normalize_ladder(p.r_ladder.unwrap_or_else(|| vec![10.0, 100.0, 1000.0]))
            .map_err(|r| field("R_ladder", r))?;
        let k_max = p.k_max.unwrap_or(cone_index::index::DEFAULT_K_MAX);
        if !(1..=MAX_K).contains(&k_max) {
            return Err(field("k_max", format!("{k_max} outside 1..={MAX_K}")));
        }
        let grid_size = p.grid_size.unwrap_or(2000);
        if !(MIN_GRID..=MAX_GRID).contains(&grid_size) {
            return Err(field("grid_size", format!("{grid_size} outside {MIN_GRID}..={MAX_GRID}")));
        }
        let profile_tolerance = p.profile_tolerance.unwrap_or(1e-12);
        if !(profile_tolerance > 0.0 && profile_tolerance < 1.0) {
            return Err(field("profile_tolerance", format!("{profile_tolerance} outside (0, 1)")));
        }
        let density_rungs = p.density_rungs.unwrap_or(6);
        if !(1..=40).contains(&density_rungs) {
            return Err(field("density_rungs", format!("{density_rungs} outside 1..=40")));
        }
        Ok(RunConfig {
            command,
            n_list,
            m,
            link_specs,
            r_ladder,
            k_max,
            grid_size,
            profile_tolerance,
            density_rungs,
            output: p.output,
            format: p.format.unwrap_or_default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_specs() {
        assert_eq!(parse_link_spec("equator").unwrap(), LinkSpec::Equator);
        assert_eq!(parse_link_spec("clifford:3").unwrap(), LinkSpec::Clifford { p: 3 });
        assert!(parse_link_spec("clifford:0").is_err());
        assert!(parse_link_spec("clifford:x").is_err());
        assert!(parse_link_spec("raw:").is_err());
        assert!(parse_link_spec("torus").is_err());
        assert_eq!(parse_link_spec(" raw:a.json ").unwrap().to_string(), "raw:a.json");
    }

    #[test]
    fn ladders() {
        assert_eq!(parse_r_ladder("100, 10,100").unwrap(), vec![10.0, 100.0]);
        assert!(parse_r_ladder("1").is_err());
        assert!(parse_r_ladder("inf").is_err());
        assert!(parse_r_ladder("").is_err());
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let err = parse_run_config("{\n  \"command\": \"index\",\n  \"colour\": 1\n}").unwrap_err();
        match err {
            ParseError::Config { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flags_override_file() {
        let file = parse_run_config(r#"{"command":"index","n_list":[5],"m":1.0}"#).unwrap();
        let flags = PartialConfig {
            n_list: Some(vec![6]),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(file.merged(flags)).unwrap();
        assert_eq!(cfg.n_list, vec![6]);
        assert_eq!(cfg.m, 1.0);
        assert_eq!(cfg.command, Command::Index);
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = RunConfig::resolve(PartialConfig {
            command: Some(Command::Density),
            link_specs: Some(vec![LinkSpec::Clifford { p: 1 }]),
            ..Default::default()
        })
        .unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: PartialConfig = parse_run_config(&text).unwrap();
        assert_eq!(RunConfig::resolve(back).unwrap(), cfg);
    }
}
