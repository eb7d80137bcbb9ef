//! Mean exit times from `(0, b)`.
//!
//! [`favorable`], [`adverse`] and [`twosided`] hold the transform and
//! closed-form routes of each jump regime; [`nystrom`] is the grid solver
//! shared by all of them.

pub mod adverse;
pub mod favorable;
pub mod nystrom;
pub mod twosided;

pub use nystrom::{ExitTable, DEFAULT_POINTS};

use crate::error::{bail, Result};
use crate::process::{ProcessSpec, Regime};
use crate::renewal::{ExcessLifeLaw, ObservationTime};
use crate::quadrature::GaussKronrod;
use crate::WaitingTimeModel;

/// A mean time that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanTime {
    Finite(f64),
    /// `boundary_case` marks the critical parameter set separating the two.
    Infinite { boundary_case: bool },
}

impl MeanTime {
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(t) => t,
            Self::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

/// Law of the wait until the first jump after the observation instant.
pub trait FirstWait: Sync {
    fn cdf(&self, t: f64) -> f64;
    fn pdf(&self, t: f64) -> f64;
    /// `E[min(W, t)]`.
    fn integrated_survival(&self, t: f64) -> f64;
    fn mean(&self) -> f64;
}

impl FirstWait for WaitingTimeModel {
    fn cdf(&self, t: f64) -> f64 {
        WaitingTimeModel::cdf(self, t)
    }
    fn pdf(&self, t: f64) -> f64 {
        WaitingTimeModel::pdf(self, t)
    }
    fn integrated_survival(&self, t: f64) -> f64 {
        WaitingTimeModel::integrated_survival(self, t)
    }
    fn mean(&self) -> f64 {
        WaitingTimeModel::mean(self)
    }
}

impl FirstWait for ExcessLifeLaw {
    fn cdf(&self, t: f64) -> f64 {
        ExcessLifeLaw::cdf(self, t)
    }
    fn pdf(&self, t: f64) -> f64 {
        ExcessLifeLaw::pdf(self, t)
    }
    fn integrated_survival(&self, t: f64) -> f64 {
        ExcessLifeLaw::integrated_survival(self, t)
    }
    fn mean(&self) -> f64 {
        ExcessLifeLaw::mean(self)
    }
}

/// `T̃_b(x)` by the preferred route for the spec's regime.
pub fn mean_exit_after_jump(spec: &ProcessSpec, x: f64) -> Result<f64> {
    match spec.regime() {
        Regime::Favorable => favorable::mean_exit_after_jump(spec, x),
        Regime::Adverse => adverse::mean_exit_after_jump_adverse(spec, x),
        Regime::TwoSided => twosided::mean_exit_twosided(spec, x),
    }
}

/// `T_b(x, r)` by the preferred route for the spec's regime.
pub fn mean_exit_at(spec: &ProcessSpec, x: f64, time: ObservationTime) -> Result<f64> {
    match spec.regime() {
        Regime::Favorable => favorable::mean_exit_at(spec, x, time),
        Regime::Adverse => adverse::mean_exit_at_adverse(spec, x, time),
        Regime::TwoSided => twosided::mean_exit_at_twosided(spec, x, time),
    }
}

/// `T_b(x, r)` from an evaluator of `T̃_b` on `[0, b]`:
/// `E[min(W, ϱ)] + ∫_0^ϱ w(l) G(x + vl) dl` with `G(y) = E[T̃(y + J); 0 < y + J < b]`,
/// both integrals by quadrature. `after_jump` must be finite on `[0, b]`.
pub fn mean_exit_from_after_jump(
    spec: &ProcessSpec,
    x: f64,
    law: &dyn FirstWait,
    after_jump: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<f64> {
    spec.check_position(x)?;
    let b = spec.boundary;
    if !b.is_finite() {
        bail!(Domain, "needs a finite boundary");
    }
    let g = |y: f64| spec.jumps.expect_between(-y, b - y, |u| after_jump(y + u));
    let v = spec.drift;
    if v == 0.0 {
        return Ok(law.mean() + g(x));
    }
    let rho = spec.drift_time(x);
    if rho <= 0.0 {
        return Ok(0.0);
    }
    let est = GaussKronrod::with_tolerance(1e-11, 1e-10).integrate(|l| law.pdf(l) * g(x + v * l), 0.0, rho);
    Ok(law.integrated_survival(rho) + est.value)
}
