//! Jumps of both signs.
//!
//! In general the after-jump mean exit time comes from the Nyström grid. When
//! every downward jump overshoots the lower boundary (`h₋` supported below
//! `-b`), upward jumps are `Exp(γ)` and sojourns Erlang(λ, 2), the transform
//! in `y = b - x` is rational with a cubic denominator in `z = sv`:
//! `F̂ = (v/z)(2λγv + (2λ + γv)z + z²) / (pλ²γv + λ(λ + 2γv)z + (2λ + γv)z² + z³)`.

use super::{ExitTable, MeanTime, DEFAULT_POINTS};
use crate::error::{bail, Result};
use crate::laplace::{Poly, RationalInverse};
use crate::process::{ProcessSpec, Regime};
use crate::renewal::{ExcessLifeLaw, ObservationTime};
use crate::{Complex64, JumpModel};

/// Parameters of the ruin-jump specialisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinJump {
    pub lambda: f64,
    pub gamma: f64,
    pub drift: f64,
    /// `p = P(J < 0)`.
    pub p: f64,
}

impl RuinJump {
    /// Also accepts the endpoint mixtures `p = 0` and `p = 1`.
    pub fn from_spec(spec: &ProcessSpec) -> Option<Self> {
        let lambda = spec.waiting.erlang2_rate()?;
        let JumpModel::Mixture {
            negative_prob,
            positive,
            negative,
        } = &spec.jumps
        else {
            return None;
        };
        let JumpModel::ExponentialPositive { rate } = **positive else {
            return None;
        };
        let lands_outside = negative.support_max() <= -spec.boundary;
        (spec.drift > 0.0 && lands_outside).then_some(
            Self {
                lambda,
                gamma: rate,
                drift: spec.drift,
                p: *negative_prob,
            },
        )
    }

    /// Coefficients of the cubic `z³ + a₂z² + a₁z + a₀`, lowest first.
    pub fn cubic(&self) -> [f64; 4] {
        let (l, g, v) = (self.lambda, self.gamma, self.drift);
        [self.p * l * l * g * v, l * (l + 2.0 * g * v), 2.0 * l + g * v, 1.0]
    }

    /// Numerator and denominator of `F̂(s)` in powers of `s`, lowest first.
    pub fn rational(&self) -> (Vec<f64>, Vec<f64>) {
        let (l, g, v) = (self.lambda, self.gamma, self.drift);
        let [a0, a1, a2, _] = self.cubic();
        let num = vec![2.0 * l * g * v * v, (2.0 * l + g * v) * v * v, v * v * v];
        let den = vec![0.0, a0 * v, a1 * v * v, a2 * v * v * v, v.powi(4)];
        (num, den)
    }

    pub fn transform(&self, s: Complex64) -> Complex64 {
        let (l, g, v) = (self.lambda, self.gamma, self.drift);
        let z = s * v;
        let [a0, a1, a2, _] = self.cubic();
        let num = (z * z + z * (2.0 * l + g * v) + 2.0 * l * g * v) * v;
        let den = z * (((z + a2) * z + a1) * z + a0);
        num / den
    }

    /// Roots of the cubic in `z`.
    pub fn cubic_roots(&self) -> Result<Vec<Complex64>> {
        Poly::new(self.cubic().to_vec()).nonzero_roots()
    }

    /// Routh–Hurwitz: every root of the cubic has negative real part.
    pub fn is_hurwitz(&self) -> bool {
        let [a0, a1, a2, _] = self.cubic();
        a0 > 0.0 && a1 > 0.0 && a2 > 0.0 && a2 * a1 > a0
    }

    /// Residue form of `T̃` as a function of `y = b - x`.
    pub fn inverse(&self) -> Result<RationalInverse> {
        let (num, den) = self.rational();
        RationalInverse::new(&num, &den)
    }

    pub fn after_jump(&self, y: f64) -> Result<f64> {
        self.inverse()?.eval(y)
    }
}

/// `F̂(s)` for the ruin-jump specialisation.
pub fn transform_f_ruinjump(spec: &ProcessSpec, s: Complex64) -> Result<Complex64> {
    let Some(rj) = RuinJump::from_spec(spec) else {
        bail!(Regime, "spec is not an Erlang-2 / exponential-up / overshooting-down mixture");
    };
    if s.norm() == 0.0 {
        bail!(Singularity, "F̂ has a pole at s = 0");
    }
    let f = rj.transform(s);
    if !f.is_finite() {
        bail!(Singularity, "F̂ is singular at s = {s}");
    }
    Ok(f)
}

/// Roots of the cubic denominator for the ruin-jump specialisation.
pub fn cubic_roots(spec: &ProcessSpec) -> Result<Vec<Complex64>> {
    match RuinJump::from_spec(spec) {
        Some(rj) => rj.cubic_roots(),
        None => bail!(Regime, "spec is not a ruin-jump specialisation"),
    }
}

/// `T̃_b(x)` for the ruin-jump specialisation by rational inversion.
pub fn mean_exit_ruinjump(spec: &ProcessSpec, x: f64) -> Result<f64> {
    spec.check_position(x)?;
    let Some(rj) = RuinJump::from_spec(spec) else {
        bail!(Regime, "spec is not a ruin-jump specialisation");
    };
    rj.after_jump(spec.boundary - x)
}

/// Closed form when `λ = γv`: the cubic becomes `(z + λ)³ - qλ³` and
/// `T̃ = 2/(pλ) + Σ_j (1 + q^{-1/3}ω^{-j}) e^{z_j ϱ} / (3z_j)` with
/// `z_j = λ(q^{1/3}ω^j - 1)`.
pub fn mean_exit_equal_rates(spec: &ProcessSpec, x: f64) -> Result<f64> {
    spec.check_position(x)?;
    let Some(rj) = RuinJump::from_spec(spec) else {
        bail!(Regime, "spec is not a ruin-jump specialisation");
    };
    let l = rj.lambda;
    if !(rj.p > 0.0 && rj.p < 1.0) {
        bail!(Domain, "equal-rates form needs 0 < p < 1, got {}", rj.p);
    }
    if (l - rj.gamma * rj.drift).abs() > 1e-12 * l {
        bail!(Regime, "equal-rates form needs λ = γv, got λ = {l}, γv = {}", rj.gamma * rj.drift);
    }
    let rho = spec.drift_time(x);
    let c = (1.0 - rj.p).cbrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..3 {
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 3.0);
        let z = (omega * c - 1.0) * l;
        sum += (omega.inv() / c + 1.0) * (z * rho).exp() / (z * 3.0);
    }
    Ok(2.0 / (rj.p * l) + sum.re)
}

/// Limit of `T̃_b(x)` as `b - x → ∞`: `2/(pλ)` when downward jumps always
/// overshoot.
pub fn asymptotic_mean_exit(spec: &ProcessSpec) -> Result<MeanTime> {
    match RuinJump::from_spec(spec) {
        Some(rj) if rj.p == 0.0 => Ok(MeanTime::Infinite { boundary_case: false }),
        Some(rj) => Ok(MeanTime::Finite(2.0 / (rj.p * rj.lambda))),
        None => bail!(Regime, "asymptote is known for the ruin-jump specialisation only"),
    }
}

/// Nyström route for any two-sided spec.
pub fn mean_exit_twosided_general(spec: &ProcessSpec, x: f64, points: usize) -> Result<f64> {
    spec.require_regime(Regime::TwoSided)?;
    spec.check_position(x)?;
    ExitTable::solve(spec, points)?.after_jump(x)
}

/// `T̃_b(x)`: rational inversion for the ruin-jump specialisation, the
/// Nyström grid otherwise.
pub fn mean_exit_twosided(spec: &ProcessSpec, x: f64) -> Result<f64> {
    spec.require_regime(Regime::TwoSided)?;
    spec.check_position(x)?;
    match RuinJump::from_spec(spec) {
        Some(rj) => rj.after_jump(spec.boundary - x),
        None => mean_exit_twosided_general(spec, x, DEFAULT_POINTS),
    }
}

/// `T_b(x, r)` by quadrature against the excess-life law on the Nyström table.
pub fn mean_exit_at_twosided(spec: &ProcessSpec, x: f64, time: ObservationTime) -> Result<f64> {
    spec.require_regime(Regime::TwoSided)?;
    spec.check_position(x)?;
    if time.is_jump_instant() {
        return mean_exit_twosided(spec, x);
    }
    let law = ExcessLifeLaw::new(&spec.waiting, time)?;
    ExitTable::solve(spec, DEFAULT_POINTS)?.at(x, &law)
}
