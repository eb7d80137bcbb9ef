//! Continuum limit: exponential sojourns of mean `μ` and one-sided stable
//! jumps with `ĥ(s) = e^{-k√s}`, with `μ, k → 0` at fixed `K = k/μ`.
//!
//! In this limit `F̂(s) → 1/(vs² + Ks^{3/2})` and the mean exit time is
//! `T̃_b(x) = (2/K)√((b - x)/π) + (v/K²)[e^{z²}Erfc(z) - 1]`, `z = K√(b - x)/v`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::laplace::{invert, InversionMethod, LaplaceFunction};
use crate::special::{erfc, erfcx};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumSpec {
    pub drift: f64,
    pub boundary: f64,
    /// `K = lim k/μ`.
    pub k_limit: f64,
    pub position: f64,
}

impl ContinuumSpec {
    pub fn new(drift: f64, boundary: f64, k_limit: f64, position: f64) -> Result<Self> {
        if !(drift > 0.0 && drift.is_finite()) {
            bail!(Model, "continuum drift must be positive and finite, got {drift}");
        }
        if !(boundary > 0.0 && boundary.is_finite()) {
            bail!(Model, "continuum boundary must be positive and finite, got {boundary}");
        }
        if !(k_limit > 0.0 && k_limit.is_finite()) {
            bail!(Model, "K must be positive and finite, got {k_limit}");
        }
        if !(0.0..=boundary).contains(&position) {
            bail!(Domain, "position {position} outside [0, {boundary}]");
        }
        Ok(Self {
            drift,
            boundary,
            k_limit,
            position,
        })
    }

    /// `b - x`.
    pub fn distance(&self) -> f64 {
        self.boundary - self.position
    }

    /// Time for the drift alone to reach `b`.
    pub fn drift_time(&self) -> f64 {
        self.distance() / self.drift
    }
}

/// Exact and small-parameter forms of the propagator in the
/// Laplace–Laplace domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    /// `(1/s₂)(1 - ψ̂(s₂))/(1 - ψ̂(s₂)ĥ(s₁))`.
    pub exact: Complex64,
    /// `μ/(μs₂ + k√s₁)`.
    pub limiting: Complex64,
}

/// `p̂(s₁, s₂)` for exponential sojourns of mean `μ` and stable jumps of
/// scale `k`.
pub fn propagator_double_laplace(k: f64, mu: f64, s1: Complex64, s2: Complex64) -> Result<Propagator> {
    if !(k > 0.0 && mu > 0.0) {
        bail!(Model, "need k, μ > 0");
    }
    if !(s1.re > 0.0 && s2.re > 0.0) {
        bail!(Domain, "need Re s₁, Re s₂ > 0");
    }
    let psi = 1.0 / (1.0 + s2 * mu);
    let h = (-s1.sqrt() * k).exp();
    let den = 1.0 - psi * h;
    let lim_den = s2 * mu + s1.sqrt() * k;
    if den.norm() < 1e-300 || lim_den.norm() < 1e-300 {
        bail!(Singularity, "propagator denominator vanishes at s₁ = {s1}, s₂ = {s2}");
    }
    Ok(Propagator {
        exact: (1.0 - psi) / (den * s2),
        limiting: mu / lim_den,
    })
}

/// Density of the accumulated jump length at time `t`:
/// `p(u, t) = (Kt/(2√(πu³))) e^{-K²t²/(4u)}`.
pub fn stable_density(k_limit: f64, u: f64, t: f64) -> f64 {
    if u <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    let c = k_limit * t;
    c / (2.0 * (PI * u * u * u).sqrt()) * (-c * c / (4.0 * u)).exp()
}

/// Argument of the complementary error function in `Π_b(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErfcArgument {
    /// `Kt/(2√(b - x - vt))`, the exact integral of `p(u, t)`.
    #[default]
    Integrated,
    /// `K²t²/(2√(b - x - vt))`, kept for comparison only.
    Printed,
}

/// Survival probability `Π_b(x, t) = ∫_0^{b-x-vt} p(u, t) du`.
pub fn survival_probability(spec: &ContinuumSpec, t: f64) -> Result<f64> {
    survival_probability_with(spec, t, ErfcArgument::Integrated)
}

pub fn survival_probability_with(spec: &ContinuumSpec, t: f64, argument: ErfcArgument) -> Result<f64> {
    if !(t >= 0.0) {
        bail!(Domain, "time must be non-negative, got {t}");
    }
    let room = spec.distance() - spec.drift * t;
    if room <= 0.0 {
        return Ok(0.0);
    }
    let kt = spec.k_limit * t;
    let arg = match argument {
        ErfcArgument::Integrated => kt / (2.0 * room.sqrt()),
        ErfcArgument::Printed => kt * kt / (2.0 * room.sqrt()),
    };
    Ok(erfc(arg))
}

/// Closed-form continuum mean exit time.
pub fn mean_exit_continuum(spec: &ContinuumSpec) -> f64 {
    let (k, v, y) = (spec.k_limit, spec.drift, spec.distance());
    if y == 0.0 {
        return 0.0;
    }
    let z = k * y.sqrt() / v;
    2.0 / k * (y / PI).sqrt() + v / (k * k) * (erfcx(z) - 1.0)
}

/// `F̂(s) = 1/(vs² + Ks^{3/2})`, principal branch.
pub fn continuum_transform(drift: f64, k_limit: f64) -> LaplaceFunction {
    LaplaceFunction::new(0.0, move |s: Complex64| 1.0 / (s * s * drift + s * s.sqrt() * k_limit))
}

/// Mean exit time by numerical inversion of the branch-cut transform at
/// `t = b - x`.
pub fn mean_exit_continuum_via_inversion(spec: &ContinuumSpec, method: InversionMethod) -> Result<f64> {
    let y = spec.distance();
    if y == 0.0 {
        return Ok(0.0);
    }
    invert(&continuum_transform(spec.drift, spec.k_limit), y, method)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_value() {
        let spec = ContinuumSpec::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let direct = 2.0 / PI.sqrt() + (1.0f64.exp() * erfc(1.0) - 1.0);
        assert!((mean_exit_continuum(&spec) - direct).abs() < 1e-14);
        assert!((mean_exit_continuum(&spec) - 0.555_963).abs() < 1e-6);
    }

    #[test]
    fn boundary_and_small_drift() {
        assert_eq!(mean_exit_continuum(&ContinuumSpec::new(1.0, 1.0, 1.0, 1.0).unwrap()), 0.0);
        let slow = ContinuumSpec::new(1e-6, 1.0, 1.0, 0.0).unwrap();
        assert!((mean_exit_continuum(&slow) - 2.0 / PI.sqrt()).abs() < 2e-6);
    }

    #[test]
    fn survival_endpoints() {
        let spec = ContinuumSpec::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(survival_probability(&spec, 0.0).unwrap(), 1.0);
        assert_eq!(survival_probability(&spec, 1.0).unwrap(), 0.0);
        assert!(survival_probability(&spec, 1.0 - 1e-12).unwrap() < 1e-100);
    }

    #[test]
    fn propagator_mass_and_formula() {
        let s2 = Complex64::new(0.7, 0.2);
        let p = propagator_double_laplace(0.3, 0.5, Complex64::new(1e-14, 0.0), s2).unwrap();
        assert!((p.exact - 1.0 / s2).norm() < 1e-6);
        let p = propagator_double_laplace(0.5, 0.5, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let want = (1.0 - 1.0 / 1.5) / (1.0 - (-0.5f64).exp() / 1.5);
        assert!((p.exact.re - want).abs() < 1e-10);
    }
}
