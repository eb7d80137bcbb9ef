//! Event-driven simulation of exit times from `(0, b)`.
//!
//! Paths are linear between jumps, so the drift crossing of `b` is found
//! exactly and no time step enters. Every path draws from its own ChaCha8
//! stream keyed by `(seed, path index)`, and results are reduced by pairwise
//! summation in index order, so estimates do not depend on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::WaitingTimeModel;
use crate::error::{bail, Result};
use crate::process::ProcessSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitTimeEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: u64,
    /// Exits through `b`, by drift or by a jump.
    pub upper_exits: u64,
    pub lower_exits: u64,
    /// Exits through `b` reached by the drift alone.
    pub drift_only_exits: u64,
    pub seed: u64,
    /// Barrier standing in for `b = ∞`; paths reaching it count as upper exits.
    pub truncation_horizon: Option<f64>,
}

impl ExitTimeEstimate {
    /// Fraction of paths stopped at the truncation barrier.
    pub fn truncated_fraction(&self) -> f64 {
        match self.truncation_horizon {
            Some(_) => self.upper_exits as f64 / self.paths as f64,
            None => 0.0,
        }
    }

    pub fn lower_fraction(&self) -> f64 {
        self.lower_exits as f64 / self.paths as f64
    }
}

/// Clock state at the start of the simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    /// The present is a jump instant.
    AfterJump,
    /// The present is `r` time units after the last renewal origin.
    At(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub paths: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Stand-in for the upper boundary when `b = ∞`.
    pub truncation_barrier: Option<f64>,
}

impl SimulationConfig {
    pub fn new(paths: u64, seed: u64) -> Self {
        Self {
            paths,
            seed,
            workers: None,
            truncation_barrier: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_truncation(mut self, barrier: f64) -> Self {
        self.truncation_barrier = Some(barrier);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Drift,
    UpperJump,
    Lower,
}

fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `E_r = t_{N_r+1} - r` from one renewal sequence started at 0.
fn draw_excess_life(waiting: &WaitingTimeModel, r: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut t = waiting.sample(rng);
    while t <= r {
        t += waiting.sample(rng);
    }
    t - r
}

fn simulate_path(spec: &ProcessSpec, b: f64, x: f64, start: Start, rng: &mut ChaCha8Rng) -> (f64, Side) {
    let v = spec.drift;
    let mut wait = match start {
        Start::AfterJump => spec.waiting.sample(rng),
        Start::At(r) => draw_excess_life(&spec.waiting, r, rng),
    };
    let (mut pos, mut clock) = (x, 0.0);
    if pos >= b {
        return (0.0, Side::Drift);
    }
    loop {
        if v > 0.0 {
            let to_b = (b - pos) / v;
            if wait >= to_b {
                return (clock + to_b, Side::Drift);
            }
        }
        clock += wait;
        pos += v * wait + spec.jumps.sample(rng);
        if pos >= b {
            return (clock, Side::UpperJump);
        }
        if pos <= 0.0 {
            return (clock, Side::Lower);
        }
        wait = spec.waiting.sample(rng);
    }
}

/// Sum in fixed pairwise order.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn run_in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::Error::Numerical(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn simulate_outcomes(
    spec: &ProcessSpec,
    x: f64,
    start: Start,
    config: &SimulationConfig,
) -> Result<Vec<(f64, Side)>> {
    if config.paths == 0 {
        bail!(Domain, "need at least one path");
    }
    let b = if spec.boundary.is_finite() {
        spec.check_position(x)?;
        if config.truncation_barrier.is_some() {
            bail!(Domain, "truncation applies to b = ∞ only");
        }
        spec.boundary
    } else {
        let Some(barrier) = config.truncation_barrier else {
            bail!(Domain, "b = ∞ needs a truncation barrier");
        };
        if !(x >= 0.0 && x < barrier) {
            bail!(Domain, "position {x} outside [0, {barrier})");
        }
        barrier
    };
    if let Start::At(r) = start {
        if !(r >= 0.0 && r.is_finite()) {
            bail!(Domain, "observation time must be finite and non-negative, got {r}");
        }
    }
    let seed = config.seed;
    run_in_pool(config.workers, || {
        (0..config.paths)
            .into_par_iter()
            .map(|i| simulate_path(spec, b, x, start, &mut path_rng(seed, i)))
            .collect()
    })
}

/// Individual exit times, in path order.
pub fn sample_exit_times(spec: &ProcessSpec, x: f64, start: Start, config: &SimulationConfig) -> Result<Vec<f64>> {
    Ok(simulate_outcomes(spec, x, start, config)?.into_iter().map(|o| o.0).collect())
}

/// Mean exit time estimate from `x` with the given clock state.
pub fn simulate_exit(spec: &ProcessSpec, x: f64, start: Start, config: &SimulationConfig) -> Result<ExitTimeEstimate> {
    let outcomes = simulate_outcomes(spec, x, start, config)?;
    let seed = config.seed;
    let times: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let n = times.len() as f64;
    let mean = pairwise_sum(&times) / n;
    let squares: Vec<f64> = times.iter().map(|t| (t - mean) * (t - mean)).collect();
    let variance = if times.len() > 1 { pairwise_sum(&squares) / (n - 1.0) } else { 0.0 };
    let count = |side: Side| outcomes.iter().filter(|o| o.1 == side).count() as u64;
    let drift_only = count(Side::Drift);
    Ok(ExitTimeEstimate {
        mean,
        stderr: (variance / n).sqrt(),
        paths: config.paths,
        upper_exits: drift_only + count(Side::UpperJump),
        lower_exits: count(Side::Lower),
        drift_only_exits: drift_only,
        seed,
        truncation_horizon: config.truncation_barrier,
    })
}

/// Estimate of `T̃_b(x)`.
pub fn estimate_exit_after_jump(spec: &ProcessSpec, x: f64, paths: u64, seed: u64) -> Result<ExitTimeEstimate> {
    simulate_exit(spec, x, Start::AfterJump, &SimulationConfig::new(paths, seed))
}

/// Estimate of `T_b(x, r)`: the renewal sequence is run from 0 to find the
/// excess life at `r`, then the walk starts from `x` with that first wait.
pub fn estimate_exit_at(spec: &ProcessSpec, x: f64, r: f64, paths: u64, seed: u64) -> Result<ExitTimeEstimate> {
    simulate_exit(spec, x, Start::At(r), &SimulationConfig::new(paths, seed))
}

/// `n` independent draws of the excess life `E_r`.
pub fn sample_excess_life(waiting: &WaitingTimeModel, r: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    if !(r >= 0.0 && r.is_finite()) {
        bail!(Domain, "observation time must be finite and non-negative, got {r}");
    }
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| draw_excess_life(waiting, r, &mut path_rng(seed, i)))
        .collect())
}

/// Kolmogorov–Smirnov statistic `sup |F_n - F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS rejection threshold `√(-ln(α/2)/2)/√n`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
