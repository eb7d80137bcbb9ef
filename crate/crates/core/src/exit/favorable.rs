//! Drift and jumps both upward: the walk can only leave through `b`.
//!
//! With `y = b - x`, `F(y) = T̃_b(b - y)` has the transform
//! `F̂(s) = (1/(vs²))(1 - ψ̂(sv))/(1 - ψ̂(sv)ĥ(s))`, and the mean exit time at
//! an arbitrary present, `J(y|r) = T_b(b - y, r)`, differs from it by a term
//! proportional to `φ̂(sv|r) - ψ̂(sv)`.

use num_complex::Complex64;

use super::{ExitTable, FirstWait, DEFAULT_POINTS};
use crate::error::{bail, Result};
use crate::laplace::{invert, InversionMethod, LaplaceFunction};
use crate::process::{ProcessSpec, Regime};
use crate::renewal::{zero_drift_correction, ExcessLifeLaw, ObservationTime};
use crate::JumpModel;

fn require_drift(spec: &ProcessSpec) -> Result<()> {
    spec.require_regime(Regime::Favorable)?;
    if spec.drift <= 0.0 {
        bail!(Regime, "the transform route needs v > 0; v = 0 has its own branch");
    }
    Ok(())
}

/// `F̂(s)`.
pub fn transform_f(spec: &ProcessSpec, s: Complex64) -> Result<Complex64> {
    require_drift(spec)?;
    let v = spec.drift;
    let psi = spec.waiting.laplace(s * v)?;
    let h = spec.jumps.laplace(s)?;
    let den = 1.0 - psi * h;
    if den.norm() < 1e-12 || s.norm() == 0.0 {
        bail!(Singularity, "F̂ is singular at s = {s}");
    }
    Ok((1.0 - psi) / (den * v * s * s))
}

/// `Ĵ(s|r)` for the given excess-life law.
pub fn transform_j_with(spec: &ProcessSpec, law: &ExcessLifeLaw, s: Complex64) -> Result<Complex64> {
    require_drift(spec)?;
    let v = spec.drift;
    let f = transform_f(spec, s)?;
    let psi = spec.waiting.laplace(s * v)?;
    let h = spec.jumps.laplace(s)?;
    let den = 1.0 - psi * h;
    let correction = match law.time() {
        ObservationTime::SteadyState => {
            let mu = spec.waiting.mean();
            (1.0 - h) * (1.0 - (1.0 + s * v * mu) * psi) / (den * v * v * s * s * s * mu)
        }
        ObservationTime::Finite(_) => (1.0 - h) / (den * v * s * s) * (law.laplace(s * v)? - psi),
    };
    Ok(f - correction)
}

/// `Ĵ(s|r)`; equals `F̂(s)` at `r = 0`.
pub fn transform_j(spec: &ProcessSpec, time: ObservationTime, s: Complex64) -> Result<Complex64> {
    let law = ExcessLifeLaw::new(&spec.waiting, time)?;
    transform_j_with(spec, &law, s)
}

/// Erlang(λ, 2) sojourns with exponential(γ) jumps, in closed form.
///
/// The non-zero poles of `F̂` sit at `s = -z±/v` with
/// `z± = λ + (γv/2)(1 ± √(1 - 4λ/(γv)))`; the inverse transforms are written
/// as divided differences over the two poles, which stay real when `z±` are
/// complex conjugates and reduce to derivatives when they merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FavorableClosedForm {
    pub lambda: f64,
    pub gamma: f64,
    pub drift: f64,
    pub z_plus: Complex64,
    pub z_minus: Complex64,
}

/// `z±` as defined for the Erlang-2/exponential case.
pub fn z_roots(lambda: f64, gamma: f64, v: f64) -> (Complex64, Complex64) {
    let gv = gamma * v;
    let root = Complex64::new(1.0 - 4.0 * lambda / gv, 0.0).sqrt();
    let base = Complex64::new(lambda + 0.5 * gv, 0.0);
    (base + 0.5 * gv * root, base - 0.5 * gv * root)
}

/// `(f(a) - f(c))/(a - c)` for a pair of real or conjugate points, with the
/// derivative `df` used when they coincide.
fn divided_difference(
    f: impl Fn(Complex64) -> Complex64,
    df: impl Fn(Complex64) -> Complex64,
    a: Complex64,
    c: Complex64,
) -> f64 {
    let gap = (a - c).norm();
    if gap < 1e-7 * a.norm() {
        return df(0.5 * (a + c)).re;
    }
    if a.im != 0.0 {
        // Conjugate pair: the quotient is Im f(a)/Im a.
        return f(a).im / a.im;
    }
    ((f(a) - f(c)) / (a - c)).re
}

impl FavorableClosedForm {
    pub fn new(lambda: f64, gamma: f64, drift: f64) -> Result<Self> {
        if !(lambda > 0.0 && gamma > 0.0 && drift > 0.0) {
            bail!(Model, "need λ, γ, v > 0 (got {lambda}, {gamma}, {drift})");
        }
        let (z_plus, z_minus) = z_roots(lambda, gamma, drift);
        Ok(Self {
            lambda,
            gamma,
            drift,
            z_plus,
            z_minus,
        })
    }

    /// Applies to favorable Erlang(λ, 2)/exponential(γ) specs with `v > 0`.
    pub fn from_spec(spec: &ProcessSpec) -> Option<Self> {
        if spec.regime() != Regime::Favorable || spec.drift <= 0.0 {
            return None;
        }
        let (lambda, gamma) = spec.erlang2_exponential()?;
        Self::new(lambda, gamma, spec.drift).ok()
    }

    /// `F(y) = T̃_b(b - y)`.
    pub fn after_jump(&self, y: f64) -> f64 {
        let (l, g, v) = (self.lambda, self.gamma, self.drift);
        let (a, c) = (self.z_plus / v, self.z_minus / v);
        // Numerator of F̂ = N(s)/(v² s² (s + a)(s + c)).
        let num = |s: Complex64| (2.0 * l + s * v) * (g + s);
        let dnum = |s: Complex64| v * (g + s) + (2.0 * l + s * v);
        let gf = |w: Complex64| num(-w) * (-w * y).exp() / (w * w * v * v);
        let dgf = |w: Complex64| {
            (-dnum(-w) - (y + 2.0 / w) * num(-w)) * (-w * y).exp() / (w * w * v * v)
        };
        let k0 = 2.0 * g / (l + 2.0 * g * v);
        let k1 = k0 * (v / (2.0 * l) + 1.0 / g - v * (2.0 * l + g * v) / (l * (l + 2.0 * g * v)));
        k0 * y + k1 - divided_difference(gf, dgf, a, c)
    }

    /// `J(y|r) = T_b(b - y, r)`.
    pub fn at(&self, y: f64, time: ObservationTime) -> f64 {
        let (l, g, v) = (self.lambda, self.gamma, self.drift);
        let d = match time {
            ObservationTime::SteadyState => 1.0,
            ObservationTime::Finite(r) => -(-2.0 * l * r).exp_m1(),
        };
        if d == 0.0 {
            return self.after_jump(y);
        }
        let (a, c) = (self.z_plus / v, self.z_minus / v);
        // Inverse of 1/(s D(s)), D(s) = v²(s + a)(s + c).
        let kf = |w: Complex64| (-w * y).exp() / (w * v * v);
        let dkf = |w: Complex64| -(y + 1.0 / w) * kf(w);
        let inverse = 1.0 / (l * (l + 2.0 * g * v)) + divided_difference(kf, dkf, a, c);
        self.after_jump(y) - 0.5 * d * l * inverse
    }
}

/// Drift-less walk: `T̃(x) = μ(1 + γ(b - x))` for exponential jumps, a grid
/// solve otherwise.
fn zero_drift_after_jump(spec: &ProcessSpec, x: f64) -> Result<f64> {
    if let JumpModel::ExponentialPositive { rate } = spec.jumps {
        return Ok(spec.waiting.mean() * (1.0 + rate * (spec.boundary - x)));
    }
    ExitTable::solve(spec, DEFAULT_POINTS)?.after_jump(x)
}

/// `T̃_b(x)`: closed form when available, otherwise inversion of `F̂`.
pub fn mean_exit_after_jump(spec: &ProcessSpec, x: f64) -> Result<f64> {
    spec.require_regime(Regime::Favorable)?;
    spec.check_position(x)?;
    if spec.drift == 0.0 {
        return zero_drift_after_jump(spec, x);
    }
    let y = spec.boundary - x;
    if y == 0.0 {
        return Ok(0.0);
    }
    if let Some(closed) = FavorableClosedForm::from_spec(spec) {
        return Ok(closed.after_jump(y));
    }
    mean_exit_after_jump_inversion(spec, x, InversionMethod::default())
}

/// `T̃_b(x)` by numerical inversion of `F̂` at `y = b - x`.
pub fn mean_exit_after_jump_inversion(spec: &ProcessSpec, x: f64, method: InversionMethod) -> Result<f64> {
    require_drift(spec)?;
    spec.check_position(x)?;
    let y = spec.boundary - x;
    if y == 0.0 {
        return Ok(0.0);
    }
    let owned = spec.clone();
    let f = LaplaceFunction::new(0.0, move |s| {
        transform_f(&owned, s).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    });
    invert(&f, y, method)
}

/// `T_b(x, r)`: closed form for Erlang-2/exponential, the zero-drift relation
/// for `v = 0`, quadrature against the excess-life density otherwise.
pub fn mean_exit_at(spec: &ProcessSpec, x: f64, time: ObservationTime) -> Result<f64> {
    spec.require_regime(Regime::Favorable)?;
    spec.check_position(x)?;
    if time.is_jump_instant() {
        return mean_exit_after_jump(spec, x);
    }
    if spec.drift == 0.0 {
        return zero_drift_correction(spec, time, zero_drift_after_jump(spec, x)?);
    }
    let y = spec.boundary - x;
    if y == 0.0 {
        return Ok(0.0);
    }
    if let Some(closed) = FavorableClosedForm::from_spec(spec) {
        return Ok(closed.at(y, time));
    }
    let law = ExcessLifeLaw::new(&spec.waiting, time)?;
    mean_exit_at_quadrature(spec, x, &law)
}

/// `T_b(x, r) = ∫_0^ϱ [1 - Φ(l|r)] dl + ∫_0^ϱ φ(l|r) G(x + vl) dl` on a
/// Nyström table of `T̃_b`.
pub fn mean_exit_at_quadrature(spec: &ProcessSpec, x: f64, law: &dyn FirstWait) -> Result<f64> {
    spec.require_regime(Regime::Favorable)?;
    ExitTable::solve(spec, DEFAULT_POINTS)?.at(x, law)
}

/// `T_b(x, r)` by numerical inversion of `Ĵ(s|r)`.
pub fn mean_exit_at_inversion(
    spec: &ProcessSpec,
    x: f64,
    time: ObservationTime,
    method: InversionMethod,
) -> Result<f64> {
    require_drift(spec)?;
    spec.check_position(x)?;
    let y = spec.boundary - x;
    if y == 0.0 {
        return Ok(0.0);
    }
    let law = ExcessLifeLaw::new(&spec.waiting, time)?;
    let owned = spec.clone();
    let f = LaplaceFunction::new(0.0, move |s| {
        transform_j_with(&owned, &law, s).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    });
    invert(&f, y, method)
}

/// Expansion of `Ĵ(s|r)` in the drift `v` about the exact `F̂(s)`:
/// order 0 is `F̂ - (μ - μ_r)/s`; order 1 adds
/// `v[ĥ/(1 - ĥ)·μ(μ - μ_r) - (E[E_r²] - E[τ²])/2]`.
pub fn small_v_expansion(spec: &ProcessSpec, time: ObservationTime, s: Complex64, order: u8) -> Result<Complex64> {
    if order > 1 {
        bail!(Domain, "expansion order must be 0 or 1, got {order}");
    }
    let law = ExcessLifeLaw::new(&spec.waiting, time)?;
    let mu = spec.waiting.mean();
    let mu_r = law.mean();
    if !(mu.is_finite() && mu_r.is_finite()) {
        bail!(Model, "the expansion needs finite μ and μ_r");
    }
    let mut value = transform_f(spec, s)? - (mu - mu_r) / s;
    if order == 1 {
        let h = spec.jumps.laplace(s)?;
        let second = law.second_moment() - spec.waiting.moment(2);
        value += spec.drift * (h / (1.0 - h) * mu * (mu - mu_r) - 0.5 * second);
    }
    Ok(value)
}
