//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ctrw_core::continuum::ContinuumSpec;
use ctrw_core::distributions::TabulatedDensity;
use ctrw_core::{InversionMethod, JumpModel, ProcessSpec, WaitingTimeModel};

use crate::error::{usage, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegimeKind {
    Favorable,
    Adverse,
    TwoSided,
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ClosedForm,
    TransformInversion,
    IntegralEquation,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::ClosedForm,
        Method::TransformInversion,
        Method::IntegralEquation,
        Method::MonteCarlo,
    ];

    pub fn is_analytic(self) -> bool {
        self != Method::MonteCarlo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    One(Method),
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaitingKind {
    Exponential,
    Erlang,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    Exponential,
    Stable,
    Point,
    Tabulated,
}

/// Negative component of a two-sided mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeKind {
    Exponential,
    Point,
    ShiftedExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionKind {
    Talbot,
    Stehfest,
}

macro_rules! keyword_enum {
    ($ty:ty { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = CliError;
            fn from_str(s: &str) -> Result<Self, CliError> {
                match s {
                    $($name => Ok($variant),)+
                    _ => Err(usage(format!(
                        "unknown value '{s}', expected one of: {}",
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

keyword_enum!(RegimeKind {
    "favorable" => RegimeKind::Favorable,
    "adverse" => RegimeKind::Adverse,
    "two-sided" => RegimeKind::TwoSided,
    "continuum" => RegimeKind::Continuum,
});

keyword_enum!(Method {
    "closed-form" => Method::ClosedForm,
    "transform-inversion" => Method::TransformInversion,
    "integral-equation" => Method::IntegralEquation,
    "monte-carlo" => Method::MonteCarlo,
});

keyword_enum!(WaitingKind {
    "exponential" => WaitingKind::Exponential,
    "erlang" => WaitingKind::Erlang,
    "tabulated" => WaitingKind::Tabulated,
});

keyword_enum!(JumpKind {
    "exponential" => JumpKind::Exponential,
    "stable" => JumpKind::Stable,
    "point" => JumpKind::Point,
    "tabulated" => JumpKind::Tabulated,
});

keyword_enum!(NegativeKind {
    "exponential" => NegativeKind::Exponential,
    "point" => NegativeKind::Point,
    "shifted-exponential" => NegativeKind::ShiftedExponential,
});

keyword_enum!(InversionKind {
    "talbot" => InversionKind::Talbot,
    "stehfest" => InversionKind::Stehfest,
});

impl FromStr for MethodChoice {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "all" {
            Ok(Self::All)
        } else {
            s.parse().map(Self::One)
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::One(m) => m.fmt(f),
            Self::All => f.write_str("all"),
        }
    }
}

/// Every setting of a run. Jump parameters are read according to `regime`:
/// `jumps` names the upward law in the favorable and two-sided regimes and
/// the downward law in the adverse one; `negative` is the downward part of
/// a two-sided mixture, taken with probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub regime: RegimeKind,
    pub waiting: WaitingKind,
    pub lambda: f64,
    pub shape: u32,
    pub waiting_table: Option<PathBuf>,
    pub jumps: JumpKind,
    pub gamma: f64,
    pub k: f64,
    pub jump_at: f64,
    pub jump_table: Option<PathBuf>,
    pub p: f64,
    pub negative: NegativeKind,
    pub negative_rate: f64,
    pub negative_offset: f64,
    pub v: f64,
    pub b: f64,
    /// Continuum limit of `k/μ`.
    pub k_limit: f64,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub method: MethodChoice,
    pub inversion: InversionKind,
    pub points: usize,
    pub paths: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    /// Monte Carlo stand-in for `b = ∞`; defaults to 200 mean jump sizes.
    pub barrier: Option<f64>,
    /// Analytic-analytic comparison tolerance.
    pub tol: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            regime: RegimeKind::Favorable,
            waiting: WaitingKind::Erlang,
            lambda: 1.0,
            shape: 2,
            waiting_table: None,
            jumps: JumpKind::Exponential,
            gamma: 0.1,
            k: 1.0,
            jump_at: 1.0,
            jump_table: None,
            p: 0.5,
            negative: NegativeKind::Exponential,
            negative_rate: 0.1,
            negative_offset: 0.0,
            v: 0.1,
            b: 1.0,
            k_limit: 1.0,
            x: vec![0.0, 0.25, 0.5, 0.75],
            r: vec![0.0, 0.4, 10.0],
            method: MethodChoice::One(Method::ClosedForm),
            inversion: InversionKind::Talbot,
            points: ctrw_core::exit::DEFAULT_POINTS,
            paths: 100_000,
            seed: 1,
            workers: None,
            barrier: None,
            tol: 1e-5,
            out: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "regime",
    "waiting",
    "lambda",
    "shape",
    "waiting_table",
    "jumps",
    "gamma",
    "k",
    "jump_at",
    "jump_table",
    "p",
    "negative",
    "negative_rate",
    "negative_offset",
    "v",
    "b",
    "k_limit",
    "x",
    "r",
    "method",
    "inversion",
    "points",
    "paths",
    "seed",
    "workers",
    "barrier",
    "tol",
    "out",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| usage(format!("{key}: cannot parse '{value}': {e}")))
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, CliError>
where
    T::Err: fmt::Display,
{
    if value.is_empty() || value == "none" {
        Ok(None)
    } else {
        parse_value(key, value).map(Some)
    }
}

/// A comma list, or `start:stop:count` for `count` evenly spaced values.
pub fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let grid = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b): (f64, f64) = (parse_value(key, start)?, parse_value(key, stop)?);
            let n: usize = parse_value(key, count)?;
            if n < 2 {
                return Err(usage(format!("{key}: a range needs at least two points")));
            }
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        }
        [list] => list
            .split(',')
            .map(|s| parse_value(key, s.trim()))
            .collect::<Result<Vec<f64>, _>>()?,
        _ => return Err(usage(format!("{key}: expected a list or start:stop:count"))),
    };
    if grid.is_empty() {
        return Err(usage(format!("{key}: empty grid")));
    }
    Ok(grid)
}

fn show_list(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn show_optional<T: fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map_or_else(String::new, T::to_string)
}

/// Lines of `key = value`; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!("line {}: expected key = value", n + 1)));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "regime" => self.regime = parse_value(key, value)?,
            "waiting" => self.waiting = parse_value(key, value)?,
            "lambda" => self.lambda = parse_value(key, value)?,
            "shape" => self.shape = parse_value(key, value)?,
            "waiting_table" => self.waiting_table = parse_optional(key, value)?,
            "jumps" => self.jumps = parse_value(key, value)?,
            "gamma" => self.gamma = parse_value(key, value)?,
            "k" => self.k = parse_value(key, value)?,
            "jump_at" => self.jump_at = parse_value(key, value)?,
            "jump_table" => self.jump_table = parse_optional(key, value)?,
            "p" => self.p = parse_value(key, value)?,
            "negative" => self.negative = parse_value(key, value)?,
            "negative_rate" => self.negative_rate = parse_value(key, value)?,
            "negative_offset" => self.negative_offset = parse_value(key, value)?,
            "v" => self.v = parse_value(key, value)?,
            "b" => self.b = parse_value(key, value)?,
            "k_limit" => self.k_limit = parse_value(key, value)?,
            "x" => self.x = parse_grid(key, value)?,
            "r" => self.r = parse_grid(key, value)?,
            "method" => self.method = parse_value(key, value)?,
            "inversion" => self.inversion = parse_value(key, value)?,
            "points" => self.points = parse_value(key, value)?,
            "paths" => self.paths = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "workers" => self.workers = parse_optional(key, value)?,
            "barrier" => self.barrier = parse_optional(key, value)?,
            "tol" => self.tol = parse_value(key, value)?,
            "out" => self.out = parse_optional(key, value)?,
            _ => return Err(usage(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "regime" => self.regime.to_string(),
            "waiting" => self.waiting.to_string(),
            "lambda" => self.lambda.to_string(),
            "shape" => self.shape.to_string(),
            "waiting_table" => show_optional(&self.waiting_table.as_ref().map(|p| p.display())),
            "jumps" => self.jumps.to_string(),
            "gamma" => self.gamma.to_string(),
            "k" => self.k.to_string(),
            "jump_at" => self.jump_at.to_string(),
            "jump_table" => show_optional(&self.jump_table.as_ref().map(|p| p.display())),
            "p" => self.p.to_string(),
            "negative" => self.negative.to_string(),
            "negative_rate" => self.negative_rate.to_string(),
            "negative_offset" => self.negative_offset.to_string(),
            "v" => self.v.to_string(),
            "b" => self.b.to_string(),
            "k_limit" => self.k_limit.to_string(),
            "x" => show_list(&self.x),
            "r" => show_list(&self.r),
            "method" => self.method.to_string(),
            "inversion" => self.inversion.to_string(),
            "points" => self.points.to_string(),
            "paths" => self.paths.to_string(),
            "seed" => self.seed.to_string(),
            "workers" => show_optional(&self.workers),
            "barrier" => show_optional(&self.barrier),
            "tol" => self.tol.to_string(),
            "out" => show_optional(&self.out.as_ref().map(|p| p.display())),
            _ => return None,
        })
    }

    /// Defaults overlaid with `pairs` in order.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, CliError> {
        let mut config = Self::default();
        for (k, v) in pairs {
            config.set(k, v)?;
        }
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let pairs = parse_pairs(text)?;
        Self::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    pub fn to_map(&self) -> BTreeMap<&'static str, String> {
        KEYS.iter().map(|&k| (k, self.get(k).expect("known key"))).collect()
    }

    pub fn inversion_method(&self) -> InversionMethod {
        match self.inversion {
            InversionKind::Talbot => InversionMethod::DEFAULT_TALBOT,
            InversionKind::Stehfest => InversionMethod::DEFAULT_STEHFEST,
        }
    }

    fn waiting_model(&self) -> Result<WaitingTimeModel, CliError> {
        Ok(match self.waiting {
            WaitingKind::Exponential => WaitingTimeModel::exponential(self.lambda)?,
            WaitingKind::Erlang => WaitingTimeModel::erlang(self.lambda, self.shape)?,
            WaitingKind::Tabulated => {
                let table = read_table(&self.waiting_table, "waiting_table")?;
                if table.lower() < 0.0 {
                    return Err(usage("waiting_table must be supported on [0, ∞)"));
                }
                WaitingTimeModel::Tabulated(table)
            }
        })
    }

    /// The upward (or, in the adverse regime, downward) law named by `jumps`.
    fn primary_jumps(&self, upward: bool) -> Result<JumpModel, CliError> {
        let sign = if upward { 1.0 } else { -1.0 };
        let model = match self.jumps {
            JumpKind::Exponential if upward => JumpModel::exponential_positive(self.gamma)?,
            JumpKind::Exponential => JumpModel::exponential_negative(self.gamma)?,
            JumpKind::Stable if upward => JumpModel::one_sided_stable_half(self.k)?,
            JumpKind::Stable => return Err(usage("stable jumps are upward only")),
            JumpKind::Point => JumpModel::point_mass(sign * self.jump_at.abs())?,
            JumpKind::Tabulated => JumpModel::Tabulated(read_table(&self.jump_table, "jump_table")?),
        };
        Ok(model)
    }

    fn negative_jumps(&self) -> Result<JumpModel, CliError> {
        Ok(match self.negative {
            NegativeKind::Exponential => JumpModel::exponential_negative(self.negative_rate)?,
            NegativeKind::Point => JumpModel::point_mass(-self.negative_offset.abs())?,
            NegativeKind::ShiftedExponential => {
                JumpModel::shifted_exponential_negative(self.negative_rate, self.negative_offset)?
            }
        })
    }

    pub fn jump_model(&self) -> Result<JumpModel, CliError> {
        match self.regime {
            RegimeKind::Favorable => self.primary_jumps(true),
            RegimeKind::Adverse => self.primary_jumps(false),
            RegimeKind::TwoSided => Ok(JumpModel::mixture(self.p, self.primary_jumps(true)?, self.negative_jumps()?)?),
            RegimeKind::Continuum => Err(usage("the continuum regime has no jump law")),
        }
    }

    /// The walk described by the config; fails for the continuum regime and
    /// when the jump law contradicts `regime`.
    pub fn process(&self) -> Result<ProcessSpec, CliError> {
        let spec = ProcessSpec::new(self.v, self.b, self.waiting_model()?, self.jump_model()?)?;
        let expected = match self.regime {
            RegimeKind::Favorable => ctrw_core::Regime::Favorable,
            RegimeKind::Adverse => ctrw_core::Regime::Adverse,
            RegimeKind::TwoSided => ctrw_core::Regime::TwoSided,
            RegimeKind::Continuum => unreachable!("rejected by jump_model"),
        };
        if spec.regime() != expected {
            return Err(usage(format!(
                "regime is {} but the jump law is {:?}",
                self.regime,
                spec.regime()
            )));
        }
        Ok(spec)
    }

    pub fn continuum(&self, x: f64) -> Result<ContinuumSpec, CliError> {
        Ok(ContinuumSpec::new(self.v, self.b, self.k_limit, x)?)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for key in KEYS {
            writeln!(f, "{key} = {}", self.get(key).expect("known key"))?;
        }
        Ok(())
    }
}

fn read_table(path: &Option<PathBuf>, key: &str) -> Result<TabulatedDensity, CliError> {
    let Some(path) = path else {
        return Err(usage(format!("{key} is required for tabulated laws")));
    };
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(TabulatedDensity::from_csv(&text)?)
}
