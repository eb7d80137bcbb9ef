//! Command-line front end: run configuration, method dispatch, comparison
//! runs, figure sweeps and shape checks, all emitting one CSV schema.

pub mod config;
pub mod engine;
mod error;
pub mod table;
pub mod verify;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};

pub use config::{Method, MethodChoice, RegimeKind, RunConfig};
pub use engine::{Computed, Engine};
pub use error::{usage, CliError};
pub use table::Row;
pub use verify::{Property, Report};

/// Rows of `config` by its chosen method(s).
pub fn compute(config: &RunConfig) -> Result<Vec<Computed>, CliError> {
    Engine::new(config)?.run()
}

/// One pairwise check of a comparison run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub x: f64,
    pub r: f64,
    pub first: Method,
    pub second: Method,
    pub deviation: f64,
    pub bound: f64,
}

impl Deviation {
    pub fn passes(&self) -> bool {
        self.deviation <= self.bound
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<Computed>,
    pub deviations: Vec<Deviation>,
}

impl Comparison {
    pub fn passes(&self) -> bool {
        self.deviations.iter().all(Deviation::passes)
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>10} {:>10}  {:<42} {:>13} {:>13}  status", "x", "r", "pair", "deviation", "bound")?;
        for d in &self.deviations {
            writeln!(
                f,
                "{:>10} {:>10}  {:<42} {:>13.6e} {:>13.6e}  {}",
                table::format_sig(d.x),
                table::format_sig(d.r),
                format!("{} vs {}", d.first, d.second),
                d.deviation,
                d.bound,
                if d.passes() { "pass" } else { "FAIL" }
            )?;
        }
        let failed = self.deviations.iter().filter(|d| !d.passes()).count();
        write!(f, "{} checks, {failed} failed", self.deviations.len())
    }
}

/// All applicable methods at every point, compared pairwise: analytic pairs
/// against `tol`, simulation against 3 standard errors plus any truncation
/// allowance.
pub fn compare(config: &RunConfig) -> Result<Comparison, CliError> {
    if config.method != MethodChoice::All {
        return Err(usage("compare needs method = all"));
    }
    let rows = compute(config)?;
    let mut deviations = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.row.x != b.row.x || a.row.r != b.row.r {
                continue;
            }
            let (ra, rb) = (&a.row, &b.row);
            let bound = match (ra.sampling, rb.sampling) {
                (None, None) => config.tol,
                (sa, sb) => {
                    let s = sa.map_or(0.0, |s| s.stderr).hypot(sb.map_or(0.0, |s| s.stderr));
                    3.0 * s + a.allowance + b.allowance
                }
            };
            let deviation = if ra.value == rb.value { 0.0 } else { (ra.value - rb.value).abs() };
            deviations.push(Deviation {
                x: ra.x,
                r: ra.r,
                first: ra.method,
                second: rb.method,
                deviation,
                bound,
            });
        }
    }
    if deviations.is_empty() {
        return Err(usage("nothing to compare"));
    }
    Ok(Comparison { rows, deviations })
}

/// Parameter sets of the published figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Favorable jumps, γ = 0.1.
    Fig1,
    /// Adverse jumps, γ = 0.1.
    Fig2a,
    /// Adverse jumps, γ = 4.
    Fig2b,
    /// Stable jumps in the continuum limit, K = v = b = 1.
    Continuum,
}

impl Preset {
    pub fn config(self) -> RunConfig {
        let base = RunConfig {
            x: (0..=40).map(|i| i as f64 / 40.0).collect(),
            ..RunConfig::default()
        };
        match self {
            Self::Fig1 => base,
            Self::Fig2a => RunConfig {
                regime: RegimeKind::Adverse,
                ..base
            },
            Self::Fig2b => RunConfig {
                regime: RegimeKind::Adverse,
                gamma: 4.0,
                ..base
            },
            Self::Continuum => RunConfig {
                regime: RegimeKind::Continuum,
                v: 1.0,
                k_limit: 1.0,
                r: vec![0.0],
                ..base
            },
        }
    }
}

/// Flag overrides for every config key; `--waiting-table` sets `waiting_table`.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub pairs: Vec<(String, String)>,
}

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

impl FromArgMatches for Overrides {
    fn from_arg_matches(m: &ArgMatches) -> Result<Self, clap::Error> {
        let mut pairs = Vec::new();
        for key in config::KEYS {
            if let Some(v) = m.get_one::<String>(&flag(key)) {
                pairs.push((key.to_string(), v.clone()));
            }
        }
        if let Some(sets) = m.get_many::<String>("set") {
            for s in sets {
                let (k, v) = s.split_once('=').ok_or_else(|| {
                    clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("--set expects key=value, got '{s}'\n"))
                })?;
                pairs.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        Ok(Self { pairs })
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> Result<(), clap::Error> {
        *self = Self::from_arg_matches(m)?;
        Ok(())
    }
}

impl Args for Overrides {
    fn augment_args(cmd: Command) -> Command {
        let cmd = cmd.arg(
            Arg::new("set")
                .long("set")
                .value_name("KEY=VALUE")
                .action(clap::ArgAction::Append)
                .help("Set any config key"),
        );
        config::KEYS.iter().fold(cmd, |cmd, key| {
            cmd.arg(
                Arg::new(flag(key))
                    .long(flag(key))
                    .value_name("VALUE")
                    .help(format!("Override config key {key}"))
                    .allow_hyphen_values(true),
            )
        })
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Parser)]
#[command(name = "ctrw", version, about = "Mean exit times of drifting continuous-time random walks")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Debug, Subcommand)]
enum Commands {
    /// Evaluate the configured method(s) on the x and r grids.
    Compute(RunArgs),
    /// Monte Carlo estimates only.
    Simulate(RunArgs),
    /// Run every applicable method and check agreement.
    Compare(RunArgs),
    /// Compute the curves behind a figure preset.
    Sweep {
        #[arg(long, value_enum)]
        preset: Preset,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a qualitative property of the curves in a CSV.
    Verify {
        csv: PathBuf,
        #[arg(long)]
        property: String,
        /// Restrict to one method's curves.
        #[arg(long)]
        method: Option<String>,
    },
    /// Print the resolved configuration.
    Config(RunArgs),
}

fn resolve(base: RunConfig, args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut config = base;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        for (k, v) in config::parse_pairs(&text)? {
            config.set(&k, &v)?;
        }
    }
    for (k, v) in &args.overrides.pairs {
        config.set(k, v)?;
    }
    Ok(config)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_of(rows: &[Computed]) -> String {
    table::to_csv(&rows.iter().map(|c| c.row).collect::<Vec<_>>())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Commands::Compute(args) => {
            let config = resolve(RunConfig::default(), &args)?;
            emit(out, config.out.as_deref(), &csv_of(&compute(&config)?))
        }
        Commands::Simulate(args) => {
            let mut config = resolve(RunConfig::default(), &args)?;
            config.method = MethodChoice::One(Method::MonteCarlo);
            emit(out, config.out.as_deref(), &csv_of(&compute(&config)?))
        }
        Commands::Compare(args) => {
            let config = resolve(
                RunConfig {
                    method: MethodChoice::All,
                    ..RunConfig::default()
                },
                &args,
            )?;
            let cmp = compare(&config)?;
            if let Some(p) = &config.out {
                std::fs::write(p, csv_of(&cmp.rows))?;
            }
            writeln!(out, "{cmp}")?;
            if cmp.passes() {
                Ok(())
            } else {
                Err(CliError::Verification("methods disagree beyond tolerance".into()))
            }
        }
        Commands::Sweep { preset, run } => {
            let config = resolve(preset.config(), &run)?;
            emit(out, config.out.as_deref(), &csv_of(&compute(&config)?))
        }
        Commands::Verify { csv, property, method } => {
            let property: Property = property.parse()?;
            let method = method.map(|m| m.parse::<Method>()).transpose()?;
            let text = std::fs::read_to_string(&csv).map_err(|e| usage(format!("{}: {e}", csv.display())))?;
            let report = verify::verify(&table::from_csv(&text)?, property, method)?;
            writeln!(out, "{report}")?;
            if report.holds {
                Ok(())
            } else {
                Err(CliError::Verification(format!("{property} does not hold")))
            }
        }
        Commands::Config(args) => {
            let config = resolve(RunConfig::default(), &args)?;
            write!(out, "{config}")?;
            Ok(())
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
