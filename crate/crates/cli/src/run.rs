//! Command execution and report rendering.

use std::path::Path;

use cone_index::density::{self, DensityReport};
use cone_index::{index_report, IndexReport, MinimalLink, SchwarzschildSpace};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, Format, LinkSpec, RunConfig};
use crate::error::{ParseError, RunError, EXIT_VERIFY};
use crate::verify;

pub const TOOL: &str = "cone-index";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of `schema/report.schema.json`.
pub const SCHEMA_ID: &str = "cone-index-report/1";
pub const THREADS_ENV: &str = "CONE_INDEX_THREADS";

/// One command's output before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: Command,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub records: Vec<Value>,
    /// Failing checks (only `verify` produces any).
    pub failures: usize,
}

impl Table {
    fn new(command: Command, header: &str) -> Self {
        Table {
            command,
            columns: header.split(',').map(String::from).collect(),
            rows: Vec::new(),
            records: Vec::new(),
            failures: 0,
        }
    }

    fn push(&mut self, row: Vec<String>, record: impl Serialize) {
        self.rows.push(row);
        self.records.push(serde_json::to_value(record).expect("records serialize"));
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures > 0 {
            EXIT_VERIFY
        } else {
            0
        }
    }
}

fn core<T>(context: impl FnOnce() -> String, r: cone_index::Result<T>) -> Result<T, RunError> {
    r.map_err(|e| RunError::from_core(context(), e))
}

/// Worker pool capped by `CONE_INDEX_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let threads: usize = raw.trim().parse().ok().filter(|&t| t >= 1).ok_or_else(|| ParseError::Field {
            field: THREADS_ENV,
            reason: format!("'{raw}' is not a positive integer"),
        })?;
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(|e| {
        RunError::from_core(
            "thread pool",
            cone_index::Error::Numeric {
                op: "thread_pool",
                detail: e.to_string(),
            },
        )
    })
}

/// Builds the link named by `spec` in dimension `n`.
pub fn build_link(spec: &LinkSpec, n: usize) -> Result<MinimalLink, RunError> {
    let ctx = || format!("link {spec} for n = {n}");
    match spec {
        LinkSpec::Equator => core(ctx, MinimalLink::equator(n)),
        LinkSpec::Clifford { p } => core(ctx, MinimalLink::clifford(n, *p)),
        LinkSpec::Raw { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| ParseError::File {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            let link = core(ctx, MinimalLink::from_json(&text, spec.to_string()))?;
            if link.ambient_dimension != n {
                return Err(ParseError::Field {
                    field: "link_specs",
                    reason: format!("{spec} has ambient_n = {}, requested n = {n}", link.ambient_dimension),
                }
                .into());
            }
            Ok(link)
        }
    }
}

fn space(config: &RunConfig, n: usize) -> Result<SchwarzschildSpace, RunError> {
    core(|| format!("space n = {n}, m = {}", config.m), SchwarzschildSpace::new(n, config.m))
}

/// `(n, links)` in configuration order, every link validated up front.
fn links_by_dimension(config: &RunConfig) -> Result<Vec<(usize, Vec<MinimalLink>)>, RunError> {
    config
        .n_list
        .iter()
        .map(|&n| {
            let links = config
                .link_specs
                .iter()
                .map(|s| build_link(s, n))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((n, links))
        })
        .collect()
}

pub fn run(config: &RunConfig) -> Result<Table, RunError> {
    let pool = thread_pool()?;
    pool.install(|| match config.command {
        Command::Spectrum => spectrum(config),
        Command::Stability => stability(config),
        Command::Index => index(config),
        Command::Density => density_table(config),
        Command::Verify => verify_table(config),
    })
}

fn spectrum(config: &RunConfig) -> Result<Table, RunError> {
    let mut table = Table::new(Command::Spectrum, "n,link,level,eigenvalue,multiplicity");
    for (n, links) in links_by_dimension(config)? {
        for link in links {
            let count = match &link.kind {
                cone_index::LinkKind::Raw { levels } => levels.len().min(config.k_max + 1),
                _ => config.k_max + 1,
            };
            let spec = core(|| format!("spectrum of {} for n = {n}", link.label), link.jacobi_spectrum(count))?;
            for (k, level) in spec.levels.iter().enumerate() {
                table.push(
                    vec![
                        n.to_string(),
                        link.label.clone(),
                        k.to_string(),
                        level.eigenvalue.to_string(),
                        level.multiplicity.to_string(),
                    ],
                    json!({"n": n, "link": link.label, "level": k, "eigenvalue": level.eigenvalue, "multiplicity": level.multiplicity}),
                );
            }
        }
    }
    Ok(table)
}

/// Verdict of the margin test: a non-negative margin certifies stability,
/// a negative one certifies nothing.
pub fn stability_verdict(link: &MinimalLink) -> &'static str {
    let n = link.ambient_dimension as f64;
    let scale = (4.0 * link.first_eigenvalue()).abs().max(n * n);
    if link.stability_margin() >= -1e-12 * scale {
        "Stable"
    } else {
        "NotCertified"
    }
}

fn stability(config: &RunConfig) -> Result<Table, RunError> {
    let mut table = Table::new(Command::Stability, "n,link,first_eigenvalue,stability_margin,verdict");
    for (n, links) in links_by_dimension(config)? {
        for link in links {
            let verdict = stability_verdict(&link);
            table.push(
                vec![
                    n.to_string(),
                    link.label.clone(),
                    link.first_eigenvalue().to_string(),
                    link.stability_margin().to_string(),
                    verdict.to_string(),
                ],
                json!({
                    "n": n,
                    "link": link.label,
                    "first_eigenvalue": link.first_eigenvalue(),
                    "stability_margin": link.stability_margin(),
                    "verdict": verdict,
                }),
            );
        }
    }
    Ok(table)
}

fn index(config: &RunConfig) -> Result<Table, RunError> {
    let mut cells = Vec::new();
    for (n, links) in links_by_dimension(config)? {
        let s = space(config, n)?;
        for link in links {
            for &ratio in &config.r_ladder {
                cells.push((s, link.clone(), ratio));
            }
        }
    }
    let reports: Vec<Result<IndexReport, RunError>> = cells
        .par_iter()
        .map(|(s, link, ratio)| {
            core(
                || format!("index_report n = {}, link {}, R/R0 = {ratio}", s.dimension, link.label),
                index_report(s, link, ratio * s.horizon_radius, config.k_max, config.grid_size),
            )
        })
        .collect();
    let mut table = Table::new(Command::Index, IndexReport::CSV_HEADER);
    for rep in reports {
        let rep = rep?;
        table.push(rep.csv_fields(), &rep);
    }
    Ok(table)
}

fn density_table(config: &RunConfig) -> Result<Table, RunError> {
    let groups = links_by_dimension(config)?;
    let reports: Vec<Result<Vec<DensityReport>, RunError>> = groups
        .par_iter()
        .map(|(n, links)| {
            let s = space(config, *n)?;
            let profile = core(
                || format!("areal profile n = {n}"),
                s.areal_profile(s.default_profile_extent(), config.profile_tolerance),
            )?;
            let reference = core(|| format!("equator n = {n}"), MinimalLink::equator(*n))?;
            let ladder = density::default_rho_ladder(&profile, config.density_rungs);
            links
                .iter()
                .map(|link| {
                    core(
                        || format!("density_report n = {n}, link {}", link.label),
                        density::density_report(&profile, link, &reference, &ladder),
                    )
                })
                .collect()
        })
        .collect();
    let mut table = Table::new(Command::Density, DensityReport::CSV_HEADER);
    for group in reports {
        for rep in group? {
            table.push(rep.csv_fields(), &rep);
        }
    }
    Ok(table)
}

fn verify_table(config: &RunConfig) -> Result<Table, RunError> {
    let suites: Vec<Result<(usize, Vec<verify::Check>), RunError>> = config
        .n_list
        .par_iter()
        .map(|&n| {
            let s = space(config, n)?;
            Ok((n, verify::identity_suite(&s, config.profile_tolerance)?))
        })
        .collect();
    let mut table = Table::new(Command::Verify, "n,m,check,value,tolerance,passed");
    for suite in suites {
        let (n, checks) = suite?;
        for c in checks {
            if !c.passed {
                table.failures += 1;
            }
            table.push(
                vec![
                    n.to_string(),
                    config.m.to_string(),
                    c.name.clone(),
                    format!("{:.3e}", c.value),
                    format!("{:.1e}", c.tolerance),
                    c.passed.to_string(),
                ],
                json!({"n": n, "m": config.m, "check": c}),
            );
        }
    }
    Ok(table)
}

/// Renders the table with the resolved config and tool version embedded.
///
/// CSV output starts with `#` comment lines carrying that metadata.
pub fn render(table: &Table, config: &RunConfig) -> String {
    let config_json = serde_json::to_value(config).expect("config serializes");
    match config.format {
        Format::Json => {
            let doc = json!({
                "schema": SCHEMA_ID,
                "tool": TOOL,
                "version": VERSION,
                "command": table.command,
                "config": config_json,
                "columns": table.columns,
                "failures": table.failures,
                "rows": table.records,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = format!("# {TOOL} {VERSION} {SCHEMA_ID}\n# config {config_json}\n");
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row).expect("in-memory write");
            }
            let body = w.into_inner().expect("in-memory flush");
            out.push_str(&String::from_utf8(body).expect("utf-8 cells"));
            out
        }
    }
}

/// Writes the rendered report to `path`, or returns it for stdout.
pub fn emit(table: &Table, config: &RunConfig, path: Option<&Path>) -> Result<Option<String>, RunError> {
    let text = render(table, config);
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|inner| RunError::Output {
                path: p.display().to_string(),
                inner,
            })?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}
