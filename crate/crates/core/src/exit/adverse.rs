//! Upward drift against downward jumps (the Cramér–Lundberg setting): the
//! walk leaves either by drifting through `b` or by jumping below `0`.
//!
//! For Erlang(λ, 2) sojourns and jump magnitudes `u ~ Exp(γ)` the after-jump
//! mean exit time solves
//! `T'' - (2λ/v)T' + (λ²/v²)T = 2λ/v² + (λ²/v²)∫_0^x h(u)T(x - u)du`
//! with `T(b) = 0`, `T'(b) = -1/v`, and its transform in `x` is rational and
//! linear in the unknowns `A = T(0)` and `B = T'(0)`.

use super::{ExitTable, MeanTime, DEFAULT_POINTS};
use crate::error::{bail, Error, Result};
use crate::interp::UniformTable;
use crate::laplace::RationalInverse;
use crate::process::{ProcessSpec, Regime};
use crate::quadrature::GaussKronrod;
use crate::renewal::{ExcessLifeLaw, ObservationTime};
use crate::JumpModel;

/// `ξ± = λ/v - γ/2 ± (γ/2)√(1 + 4λ/(γv))`, the non-zero poles of `T̂`.
pub fn xi_roots(lambda: f64, gamma: f64, v: f64) -> (f64, f64) {
    let centre = lambda / v - 0.5 * gamma;
    let half = 0.5 * gamma * (1.0 + 4.0 * lambda / (gamma * v)).sqrt();
    (centre + half, centre - half)
}

fn erlang2_exponential_negative(spec: &ProcessSpec) -> Option<(f64, f64)> {
    match spec.jumps {
        JumpModel::ExponentialNegative { rate } => Some((spec.waiting.erlang2_rate()?, rate)),
        _ => None,
    }
}

/// Coefficients `[c₀, c₁, r₊, r₋]` of `c₀ + c₁x + r₊e^{ξ₊x} + r₋e^{ξ₋x}`.
fn exponential_coefficients(inv: &RationalInverse, xi: (f64, f64)) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for term in &inv.terms {
        let z = term.pole.re;
        let slot = if term.pole.norm() == 0.0 {
            out[1] = term.linear.re;
            0
        } else if (z - xi.0).abs() <= 1e-8 * xi.0.abs() {
            2
        } else if (z - xi.1).abs() <= 1e-8 * xi.1.abs() {
            3
        } else {
            bail!(Numerical, "unexpected pole {} in the adverse transform", term.pole);
        };
        if slot > 0 && term.multiplicity > 1 {
            bail!(Unsupported, "repeated pole {z} in the adverse transform");
        }
        out[slot] = term.constant.re;
    }
    Ok(out)
}

fn solve2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> Result<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|c| c.abs()).fold(0.0, f64::max).powi(2);
    if !(det.abs() > 1e-14 * scale) {
        bail!(Singularity, "2×2 boundary-fit system is singular (det {det:.3e})");
    }
    Ok([
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    ])
}

/// `T̃_b = G₀ + A·G_A + B·G_B` with `A`, `B` fitted to the conditions at `b`.
///
/// The fit is carried out on the amplitudes `u₊`, `u₋` of the modes
/// `e^{ξ±(x - b)}`, which stay bounded when `ξ₊b` is large.
#[derive(Debug, Clone)]
pub struct AdverseClosedForm {
    pub lambda: f64,
    pub gamma: f64,
    pub drift: f64,
    pub boundary: f64,
    /// `T̃(0)`.
    pub a: f64,
    /// `T̃'(0)`.
    pub b: f64,
    xi: (f64, f64),
    /// `[c₀, c₁, u₊, u₋]`.
    coeffs: [f64; 4],
}

impl AdverseClosedForm {
    /// Fails with `Unsupported` when `λ = 2γv`, where the pole at the origin
    /// becomes triple.
    pub fn new(lambda: f64, gamma: f64, v: f64, boundary: f64) -> Result<Self> {
        if !(lambda > 0.0 && gamma > 0.0 && v > 0.0 && boundary > 0.0 && boundary.is_finite()) {
            bail!(Model, "need λ, γ, v > 0 and finite b > 0");
        }
        let den = [0.0, 0.0, lambda * (lambda - 2.0 * gamma * v), (gamma * v - 2.0 * lambda) * v, v * v];
        let g0 = RationalInverse::new(&[2.0 * lambda * gamma, 2.0 * lambda], &den)?;
        let ga = RationalInverse::new(
            &[0.0, -2.0 * lambda * v * gamma, gamma * v * v - 2.0 * lambda * v, v * v],
            &den,
        )?;
        let gb = RationalInverse::new(&[0.0, gamma * v * v, v * v], &den)?;
        let xi = xi_roots(lambda, gamma, v);
        let [k0, ka, kb] = [&g0, &ga, &gb].map(|g| exponential_coefficients(g, xi));
        let (k0, ka, kb) = (k0?, ka?, kb?);
        let bb = boundary;
        let (ep, em) = ((-xi.0 * bb).exp(), (-xi.1 * bb).exp());
        // (A, B) = M⁻¹[(u₊e^{-ξ₊b} - k0₊), (u₋e^{-ξ₋b} - k0₋)], linear in (u₊, u₋).
        let m = [[ka[2], kb[2]], [ka[3], kb[3]]];
        let ab_const = solve2(m, [-k0[2], -k0[3]])?;
        let ab_up = solve2(m, [ep, 0.0])?;
        let ab_um = solve2(m, [0.0, em])?;
        // c₀ and c₁ as affine functions of (u₊, u₋).
        let affine = |slot: usize| {
            let at = |ab: [f64; 2]| ka[slot] * ab[0] + kb[slot] * ab[1];
            (k0[slot] + at(ab_const), at(ab_up), at(ab_um))
        };
        let (c0, c0p, c0m) = affine(0);
        let (c1, c1p, c1m) = affine(1);
        // T(b) = 0 and T'(b) = -1/v.
        let [up, um] = solve2(
            [[c0p + c1p * bb + 1.0, c0m + c1m * bb + 1.0], [c1p + xi.0, c1m + xi.1]],
            [-(c0 + c1 * bb), -1.0 / v - c1],
        )?;
        let coeffs = [c0 + c0p * up + c0m * um, c1 + c1p * up + c1m * um, up, um];
        let mut out = Self {
            lambda,
            gamma,
            drift: v,
            boundary,
            a: 0.0,
            b: 0.0,
            xi,
            coeffs,
        };
        out.a = out.eval(0.0)?;
        out.b = out.derivative(0.0)?;
        Ok(out)
    }

    pub fn from_spec(spec: &ProcessSpec) -> Option<Result<Self>> {
        if spec.drift <= 0.0 || !spec.boundary.is_finite() {
            return None;
        }
        let (lambda, gamma) = erlang2_exponential_negative(spec)?;
        Some(Self::new(lambda, gamma, spec.drift, spec.boundary))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let [c0, c1, up, um] = self.coeffs;
        let y = x - self.boundary;
        Ok(c0 + c1 * x + up * (self.xi.0 * y).exp() + um * (self.xi.1 * y).exp())
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        let [_, c1, up, um] = self.coeffs;
        let y = x - self.boundary;
        Ok(c1 + up * self.xi.0 * (self.xi.0 * y).exp() + um * self.xi.1 * (self.xi.1 * y).exp())
    }

    pub fn xi(&self) -> (f64, f64) {
        self.xi
    }
}

/// Closed form (when it applies) and Nyström table for one adverse spec.
#[derive(Debug, Clone)]
pub struct AdverseSolution {
    closed: Option<AdverseClosedForm>,
    table: ExitTable,
}

impl AdverseSolution {
    pub fn new(spec: &ProcessSpec, points: usize) -> Result<Self> {
        spec.require_regime(Regime::Adverse)?;
        let closed = match AdverseClosedForm::from_spec(spec) {
            Some(Ok(c)) => Some(c),
            Some(Err(Error::Unsupported(_) | Error::Numerical(_) | Error::Singularity(_))) | None => None,
            Some(Err(e)) => return Err(e),
        };
        Ok(Self {
            closed,
            table: ExitTable::solve(spec, points)?,
        })
    }

    pub fn closed_form(&self) -> Option<&AdverseClosedForm> {
        self.closed.as_ref()
    }

    pub fn table(&self) -> &ExitTable {
        &self.table
    }

    pub fn after_jump(&self, x: f64) -> Result<f64> {
        self.table.spec().check_position(x)?;
        match &self.closed {
            Some(c) => c.eval(x),
            None => self.table.after_jump(x),
        }
    }

    pub fn at(&self, x: f64, time: ObservationTime) -> Result<f64> {
        if time.is_jump_instant() {
            return self.after_jump(x);
        }
        let law = ExcessLifeLaw::new(&self.table.spec().waiting, time)?;
        self.table.at(x, &law)
    }
}

/// Nyström table of `T̃_b` on `points` nodes.
pub fn solve_adverse_nystrom(spec: &ProcessSpec, points: usize) -> Result<ExitTable> {
    spec.require_regime(Regime::Adverse)?;
    ExitTable::solve(spec, points)
}

/// `T̃_b(x)`: closed form for Erlang-2/exponential (Nyström when the closed
/// form degenerates), Nyström otherwise.
pub fn mean_exit_after_jump_adverse(spec: &ProcessSpec, x: f64) -> Result<f64> {
    spec.require_regime(Regime::Adverse)?;
    spec.check_position(x)?;
    if !spec.boundary.is_finite() {
        bail!(Domain, "b = ∞ is the ruin problem; see ruin_mean_time");
    }
    match AdverseClosedForm::from_spec(spec) {
        Some(Ok(c)) => c.eval(x),
        Some(Err(Error::Unsupported(_) | Error::Numerical(_) | Error::Singularity(_))) | None => {
            solve_adverse_nystrom(spec, DEFAULT_POINTS)?.after_jump(x)
        }
        Some(Err(e)) => Err(e),
    }
}

/// `T_b(x, r)` by quadrature against the excess-life law on the Nyström table.
pub fn mean_exit_at_adverse(spec: &ProcessSpec, x: f64, time: ObservationTime) -> Result<f64> {
    spec.require_regime(Regime::Adverse)?;
    spec.check_position(x)?;
    if time.is_jump_instant() {
        return mean_exit_after_jump_adverse(spec, x);
    }
    let law = ExcessLifeLaw::new(&spec.waiting, time)?;
    solve_adverse_nystrom(spec, DEFAULT_POINTS)?.at(x, &law)
}

/// Sup-norm residual of the Erlang-2 integro-differential equation for a
/// table of `T̃` on the uniform grid `0, step, …` over `[0, b]`, using
/// centred differences at interior nodes.
pub fn integro_differential_residual(spec: &ProcessSpec, values: &[f64], step: f64) -> Result<f64> {
    spec.require_regime(Regime::Adverse)?;
    let Some(lambda) = spec.waiting.erlang2_rate() else {
        bail!(Regime, "the integro-differential form holds for Erlang-2 sojourns only");
    };
    if spec.drift <= 0.0 {
        bail!(Regime, "the integro-differential form needs v > 0");
    }
    if values.len() < 4 {
        bail!(Domain, "need at least four table values");
    }
    let v = spec.drift;
    let table = UniformTable::new(0.0, step, values.to_vec());
    let quad = GaussKronrod::with_tolerance(1e-12, 1e-10);
    let mut worst: f64 = 0.0;
    for i in 1..values.len() - 1 {
        let x = i as f64 * step;
        let d1 = (values[i + 1] - values[i - 1]) / (2.0 * step);
        let d2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (step * step);
        // ∫_0^x h(u) T(x - u) du with h the density of the magnitude -J.
        let conv = quad
            .integrate(|u| spec.jumps.pdf(-u) * table.eval(x - u), 0.0, x)
            .value
            + spec
                .jumps
                .atoms()
                .into_iter()
                .filter(|&(a, _)| -a > 0.0 && -a < x)
                .map(|(a, w)| w * table.eval(x + a))
                .sum::<f64>();
        let l2 = lambda * lambda / (v * v);
        let lhs = d2 - 2.0 * lambda / v * d1 + l2 * values[i];
        let rhs = 2.0 * lambda / (v * v) + l2 * conv;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Mean time to ruin from `x` when `b = ∞`:
/// `2(1 + γx)/(λ - 2γv)` if `λ > 2γv`, infinite otherwise.
pub fn ruin_mean_time(spec: &ProcessSpec, x: f64) -> Result<MeanTime> {
    let Some((lambda, gamma)) = erlang2_exponential_negative(spec) else {
        bail!(Regime, "ruin mean time needs Erlang-2 sojourns and exponential downward jumps");
    };
    if !(x >= 0.0) {
        bail!(Domain, "position must be ≥ 0, got {x}");
    }
    let margin = lambda - 2.0 * gamma * spec.drift;
    Ok(if margin > 0.0 {
        MeanTime::Finite(2.0 * (1.0 + gamma * x) / margin)
    } else {
        MeanTime::Infinite {
            boundary_case: margin == 0.0,
        }
    })
}
