//! The drifting CTRW `X_t = X_{t0} + v(t - t0) + Σ J_n θ(t - t_n)`.

use crate::distributions::{JumpModel, Support, WaitingTimeModel};
use crate::error::{bail, Result};

/// Which way jumps push relative to the (upward) drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Jumps are almost surely non-negative: exit only through `b`.
    Favorable,
    /// Jumps are almost surely non-positive: Cramér–Lundberg setting.
    Adverse,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    /// Drift `v ≥ 0`; zero is the drift-less walk.
    pub drift: f64,
    /// Upper boundary `b`; `f64::INFINITY` only for ruin-type runs.
    pub boundary: f64,
    pub waiting: WaitingTimeModel,
    pub jumps: JumpModel,
}

impl ProcessSpec {
    pub fn new(drift: f64, boundary: f64, waiting: WaitingTimeModel, jumps: JumpModel) -> Result<Self> {
        if !(drift >= 0.0 && drift.is_finite()) {
            bail!(Model, "drift must be finite and non-negative, got {drift}");
        }
        if !(boundary > 0.0) {
            bail!(Model, "boundary must be positive, got {boundary}");
        }
        Ok(Self {
            drift,
            boundary,
            waiting,
            jumps,
        })
    }

    pub fn regime(&self) -> Regime {
        match self.jumps.support() {
            Support::Positive => Regime::Favorable,
            Support::Negative => Regime::Adverse,
            Support::TwoSided => Regime::TwoSided,
        }
    }

    pub fn require_regime(&self, regime: Regime) -> Result<()> {
        if self.regime() != regime {
            bail!(Regime, "expected {regime:?} jumps, the spec is {:?}", self.regime());
        }
        Ok(())
    }

    /// Fails unless `0 ≤ x ≤ b`.
    pub fn check_position(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x <= self.boundary) {
            bail!(Domain, "position {x} outside [0, {}]", self.boundary);
        }
        Ok(())
    }

    /// Drift time to the upper boundary, `ϱ = (b - x)/v`.
    pub fn drift_time(&self, x: f64) -> f64 {
        (self.boundary - x) / self.drift
    }

    /// `(λ, γ)` when waiting times are Erlang(λ, 2) and jumps exponential with
    /// rate γ (of either sign).
    pub fn erlang2_exponential(&self) -> Option<(f64, f64)> {
        let lambda = self.waiting.erlang2_rate()?;
        match self.jumps {
            JumpModel::ExponentialPositive { rate } | JumpModel::ExponentialNegative { rate } => {
                Some((lambda, rate))
            }
            _ => None,
        }
    }
}
