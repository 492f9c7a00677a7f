use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use cone_index_cli::config::{parse_link_list, parse_n_list, parse_r_ladder, Command, Format, PartialConfig, RunConfig};
use cone_index_cli::error::{ParseError, RunError, EXIT_NUMERIC};
use cone_index_cli::run::{emit, run};

#[derive(Parser, Debug)]
#[command(name = "cone-index", version, about = "Index, stability and density tables for minimal cones in Schwarzschild space")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Jacobi levels of each link.
    Spectrum(Flags),
    /// Morse index counts over (n, link, R).
    Index(Flags),
    /// Stability margin and verdict per link.
    Stability(Flags),
    /// Densities at infinity relative to the equator cone.
    Density(Flags),
    /// Identity suite; exits 1 if any check fails.
    Verify(Flags),
}

#[derive(clap::Args, Debug)]
struct Flags {
    /// JSON config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ambient dimensions, comma separated.
    #[arg(long)]
    n: Option<String>,
    /// Mass m > 0.
    #[arg(long)]
    m: Option<f64>,
    /// Links: equator, clifford:<p> or raw:<path>, comma separated.
    #[arg(long)]
    link: Option<String>,
    /// Outer radii as multiples of R0, comma separated.
    #[arg(long = "R")]
    r: Option<String>,
    /// Number of link levels used.
    #[arg(long)]
    kmax: Option<usize>,
    /// Radial grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn resolve(command: Command, flags: Flags) -> Result<RunConfig, RunError> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ParseError::File {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            cone_index_cli::parse_run_config(&text).map_err(|e| ParseError::File {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?
        }
        None => PartialConfig::default(),
    };
    let over = PartialConfig {
        command: Some(command),
        n_list: flags.n.as_deref().map(parse_n_list).transpose()?,
        m: flags.m,
        link_specs: flags.link.as_deref().map(parse_link_list).transpose()?,
        r_ladder: flags.r.as_deref().map(parse_r_ladder).transpose()?,
        k_max: flags.kmax,
        grid_size: flags.grid,
        output: flags.out,
        format: flags.format,
        ..Default::default()
    };
    Ok(RunConfig::resolve(file.merged(over))?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Sub::Spectrum(f) => (Command::Spectrum, f),
        Sub::Index(f) => (Command::Index, f),
        Sub::Stability(f) => (Command::Stability, f),
        Sub::Density(f) => (Command::Density, f),
        Sub::Verify(f) => (Command::Verify, f),
    };
    let outcome = resolve(command, flags).and_then(|config| {
        let table = run(&config)?;
        let text = emit(&table, &config, config.output.as_deref())?;
        Ok((table.exit_code(), text))
    });
    match outcome {
        Ok((code, text)) => {
            if let Some(text) = text {
                let written = std::io::stdout()
                    .lock()
                    .write_all(text.as_bytes())
                    .context("writing report to stdout");
                if let Err(e) = written {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(EXIT_NUMERIC as u8);
                }
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            let code = e.exit_code();
            let e = anyhow::Error::new(e).context(format!("{} failed", command_name(command)));
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Spectrum => "spectrum",
        Command::Index => "index",
        Command::Stability => "stability",
        Command::Density => "density",
        Command::Verify => "verify",
    }
}
