//! Renewal function `m(t)` of the jump instants and the excess-life law
//! `Φ(t|r) = P(E_r ≤ t)`, where `E_r` is the time from `r` to the next jump.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::interp::UniformTable;
use crate::process::ProcessSpec;
use crate::quadrature::GaussKronrod;
use crate::WaitingTimeModel;

/// How a [`RenewalSolution`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenewalSource {
    VolterraNumeric,
    ClosedFormErlang2,
    ClosedFormPoisson,
}

/// `m(t)` sampled on the uniform grid `0, Δt, …, horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalSolution {
    table: UniformTable,
    source: RenewalSource,
    rate: f64,
}

/// `m(t) = (2λt + e^{-2λt} - 1)/4` for Erlang(λ, 2) sojourn times.
pub fn renewal_erlang2(rate: f64, t: f64) -> f64 {
    let u = 2.0 * rate * t;
    // e^{-u} - 1 + u loses digits for small u.
    if u < 1e-3 {
        return u * u / 8.0 * (1.0 - u / 3.0 + u * u / 12.0);
    }
    (u + (-u).exp_m1()) / 4.0
}

/// Solves `y(t) = f(t) + ∫_0^t k(t') y(t - t') dt'` on a uniform grid with
/// trapezoidal product integration; `forcing` and `kernel` are sampled at
/// the grid nodes.
pub fn solve_volterra_convolution(forcing: &[f64], kernel: &[f64], step: f64) -> Result<Vec<f64>> {
    let n = forcing.len();
    if kernel.len() < n {
        bail!(Domain, "kernel must be sampled on at least as many nodes as the forcing");
    }
    let diag = 1.0 - 0.5 * step * kernel[0];
    if diag.abs() < 1e-12 {
        bail!(Singularity, "trapezoid diagonal 1 - Δt·k(0)/2 vanishes");
    }
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = forcing[i];
        if i > 0 {
            acc += 0.5 * step * kernel[i] * y[0];
            let mut inner = 0.0;
            for j in 1..i {
                inner += kernel[j] * y[i - j];
            }
            acc += step * inner;
        }
        y.push(acc / diag);
    }
    Ok(y)
}

/// Trapezoidal solution of `m(t) = Ψ(t) + ∫_0^t m(t - t') ψ(t') dt'`.
pub fn solve_renewal_numeric(waiting: &WaitingTimeModel, horizon: f64, step: f64) -> Result<RenewalSolution> {
    if !(step > 0.0 && horizon >= step && horizon.is_finite()) {
        bail!(Domain, "need 0 < step ≤ horizon < ∞ (step {step}, horizon {horizon})");
    }
    let points = (horizon / step).round() as usize + 1;
    let points = points.max(4);
    let grid: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
    let kernel: Vec<f64> = grid.iter().map(|&t| waiting.pdf(t)).collect();
    if kernel.iter().any(|k| !k.is_finite()) {
        bail!(Model, "sojourn density is not finite on [0, {horizon}]");
    }
    let forcing: Vec<f64> = grid.iter().map(|&t| waiting.cdf(t)).collect();
    if forcing.last().is_some_and(|&p| p > 1.0 + 1e-9) {
        bail!(Model, "sojourn law carries more than unit mass on [0, {horizon}]");
    }
    let mut values = solve_volterra_convolution(&forcing, &kernel, step)?;
    values[0] = 0.0;
    Ok(RenewalSolution {
        table: UniformTable::new(0.0, step, values),
        source: RenewalSource::VolterraNumeric,
        rate: 1.0 / waiting.mean(),
    })
}

impl RenewalSolution {
    /// Tabulates the Erlang(λ, 2) closed form.
    pub fn erlang2(rate: f64, horizon: f64, step: f64) -> Self {
        let points = ((horizon / step).round() as usize + 1).max(4);
        let values = (0..points).map(|i| renewal_erlang2(rate, i as f64 * step)).collect();
        Self {
            table: UniformTable::new(0.0, step, values),
            source: RenewalSource::ClosedFormErlang2,
            rate,
        }
    }

    /// Tabulates `m(t) = λt` of a Poisson stream.
    pub fn poisson(rate: f64, horizon: f64, step: f64) -> Self {
        let points = ((horizon / step).round() as usize + 1).max(4);
        let values = (0..points).map(|i| rate * i as f64 * step).collect();
        Self {
            table: UniformTable::new(0.0, step, values),
            source: RenewalSource::ClosedFormPoisson,
            rate,
        }
    }

    /// Closed form when one exists, otherwise the Volterra solve.
    pub fn for_model(waiting: &WaitingTimeModel, horizon: f64, step: f64) -> Result<Self> {
        match waiting.erlang_parameters() {
            Some((rate, 1)) => Ok(Self::poisson(rate, horizon, step)),
            Some((rate, 2)) => Ok(Self::erlang2(rate, horizon, step)),
            _ => solve_renewal_numeric(waiting, horizon, step),
        }
    }

    pub fn source(&self) -> RenewalSource {
        self.source
    }

    pub fn step(&self) -> f64 {
        self.table.step()
    }

    pub fn horizon(&self) -> f64 {
        self.table.end()
    }

    pub fn values(&self) -> &[f64] {
        self.table.values()
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.table.nodes()
    }

    /// `m(t)` for `0 ≤ t ≤ horizon`: exact for closed forms, cubic
    /// interpolation of the grid otherwise.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Ok(0.0);
        }
        if t > self.horizon() * (1.0 + 1e-12) {
            bail!(Coverage, "t = {t} lies beyond the renewal grid horizon {}", self.horizon());
        }
        Ok(match self.source {
            RenewalSource::ClosedFormErlang2 => renewal_erlang2(self.rate, t),
            RenewalSource::ClosedFormPoisson => self.rate * t,
            RenewalSource::VolterraNumeric => self.table.eval(t),
        })
    }

    /// `∫_{a}^{b} f(y) dm(y)` by trapezoid-consistent increments on the grid.
    fn stieltjes(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let h = self.step();
        let m = self.values();
        let first = (a / h).floor() as usize + 1;
        let last = ((b / h).ceil() as usize).saturating_sub(1);
        let mut prev_t = a;
        let mut prev_m = self.eval(a)?;
        let mut prev_f = f(a);
        let mut total = 0.0;
        for i in first..=last.min(m.len() - 1) {
            let t = i as f64 * h;
            if t <= a || t >= b {
                continue;
            }
            let ft = f(t);
            total += 0.5 * (prev_f + ft) * (m[i] - prev_m);
            prev_t = t;
            prev_m = m[i];
            prev_f = ft;
        }
        debug_assert!(prev_t < b);
        let mb = self.eval(b)?;
        total += 0.5 * (prev_f + f(b)) * (mb - prev_m);
        Ok(total)
    }
}

/// Present time `r` at which the walk is observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationTime {
    Finite(f64),
    /// `r → ∞`, the stationary renewal process.
    SteadyState,
}

impl ObservationTime {
    /// `f64::INFINITY` maps to [`ObservationTime::SteadyState`].
    pub fn new(r: f64) -> Result<Self> {
        if r == f64::INFINITY {
            return Ok(Self::SteadyState);
        }
        if !(r >= 0.0 && r.is_finite()) {
            bail!(Domain, "observation time must be ≥ 0, got {r}");
        }
        Ok(Self::Finite(r))
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(r) => r,
            Self::SteadyState => f64::INFINITY,
        }
    }

    pub fn is_jump_instant(self) -> bool {
        self == Self::Finite(0.0)
    }
}

impl From<f64> for ObservationTime {
    /// Panics on negative or NaN input; use [`ObservationTime::new`] to validate.
    fn from(r: f64) -> Self {
        Self::new(r).expect("invalid observation time")
    }
}

#[derive(Debug, Clone)]
enum Backend {
    /// `Φ(·|r) = Ψ`: at a jump instant or for memoryless sojourns.
    Sojourn,
    /// Erlang(λ, 2): `Φ = 1 - e^{-λt}[1 + cλt]`, `c = (1 + e^{-2λr})/2`.
    Erlang2 { rate: f64, c: f64 },
    Renewal { renewal: Arc<RenewalSolution>, r: f64 },
    Stationary,
}

/// Law of the excess life `E_r`.
#[derive(Debug, Clone)]
pub struct ExcessLifeLaw {
    waiting: WaitingTimeModel,
    time: ObservationTime,
    backend: Backend,
}

/// Grid used when a renewal function must be computed numerically.
fn default_renewal_grid(waiting: &WaitingTimeModel, r: f64) -> (f64, f64) {
    let mu = waiting.mean();
    (r + 40.0 * mu, mu / 500.0)
}

impl ExcessLifeLaw {
    /// Picks a closed form when available and solves for `m(t)` otherwise.
    pub fn new(waiting: &WaitingTimeModel, time: ObservationTime) -> Result<Self> {
        let backend = match time {
            ObservationTime::SteadyState => Backend::Stationary,
            ObservationTime::Finite(0.0) => Backend::Sojourn,
            ObservationTime::Finite(r) => match waiting.erlang_parameters() {
                Some((_, 1)) => Backend::Sojourn,
                Some((rate, 2)) => Backend::Erlang2 {
                    rate,
                    c: 0.5 * (1.0 + (-2.0 * rate * r).exp()),
                },
                _ => {
                    let (horizon, step) = default_renewal_grid(waiting, r);
                    Backend::Renewal {
                        renewal: Arc::new(solve_renewal_numeric(waiting, horizon, step)?),
                        r,
                    }
                }
            },
        };
        Ok(Self {
            waiting: waiting.clone(),
            time,
            backend,
        })
    }

    /// `Φ(·|r)` by Stieltjes quadrature against a given renewal function.
    pub fn from_renewal(waiting: &WaitingTimeModel, renewal: Arc<RenewalSolution>, r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            bail!(Domain, "observation time must be ≥ 0, got {r}");
        }
        if r > renewal.horizon() {
            bail!(Coverage, "r = {r} lies beyond the renewal grid horizon {}", renewal.horizon());
        }
        Ok(Self {
            waiting: waiting.clone(),
            time: ObservationTime::Finite(r),
            backend: Backend::Renewal { renewal, r },
        })
    }

    pub fn time(&self) -> ObservationTime {
        self.time
    }

    pub fn waiting(&self) -> &WaitingTimeModel {
        &self.waiting
    }

    /// `Φ(t|r)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let w = &self.waiting;
        match &self.backend {
            Backend::Sojourn => w.cdf(t),
            Backend::Erlang2 { rate, c } => {
                let lt = rate * t;
                // 1 - e^{-u}(1 + c u) = (1 - e^{-u}) - c u e^{-u}
                -(-lt).exp_m1() - c * lt * (-lt).exp()
            }
            Backend::Stationary => w.integrated_survival(t) / w.mean(),
            Backend::Renewal { renewal, r } => {
                let r = *r;
                if r + t <= renewal.horizon() {
                    renewal
                        .stieltjes(r, r + t, |y| w.survival(r + t - y))
                        .expect("grid covers [r, r + t]")
                } else {
                    // Same law written over [0, r] only.
                    w.cdf(r + t)
                        - renewal
                            .stieltjes(0.0, r, |y| w.survival(r + t - y))
                            .expect("grid covers [0, r]")
                }
            }
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        match &self.backend {
            Backend::Erlang2 { rate, c } if t > 0.0 => {
                let lt = rate * t;
                (-lt).exp() * (1.0 + c * lt)
            }
            Backend::Sojourn => self.waiting.survival(t),
            _ => 1.0 - self.cdf(t),
        }
    }

    /// Density `φ(t|r)`.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let w = &self.waiting;
        match &self.backend {
            Backend::Sojourn => w.pdf(t),
            Backend::Erlang2 { rate, c } => {
                let lt = rate * t;
                rate * (-lt).exp() * (1.0 - c + c * lt)
            }
            Backend::Stationary => w.survival(t) / w.mean(),
            Backend::Renewal { renewal, r } => {
                let r = *r;
                w.pdf(r + t)
                    + renewal
                        .stieltjes(0.0, r, |y| w.pdf(r + t - y))
                        .expect("grid covers [0, r]")
            }
        }
    }

    /// `∫_0^t [1 - Φ(u|r)] du = E[min(E_r, t)]`.
    pub fn integrated_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let w = &self.waiting;
        match &self.backend {
            Backend::Sojourn => w.integrated_survival(t),
            Backend::Erlang2 { rate, c } => {
                let lt = rate * t;
                let e = (-lt).exp();
                (-(-lt).exp_m1() + c * (-(-lt).exp_m1() - lt * e)) / rate
            }
            Backend::Stationary => GaussKronrod::with_tolerance(1e-14, 1e-12)
                .integrate(|u| 1.0 - w.integrated_survival(u) / w.mean(), 0.0, t)
                .value,
            Backend::Renewal { renewal, r } => {
                let r = *r;
                let iw = |u: f64| w.integrated_survival(u);
                iw(r + t) - iw(r)
                    + renewal
                        .stieltjes(0.0, r, |y| iw(r + t - y) - iw(r - y))
                        .expect("grid covers [0, r]")
            }
        }
    }

    /// Mean excess life `μ_r`.
    pub fn mean(&self) -> f64 {
        let w = &self.waiting;
        let mu = w.mean();
        match &self.backend {
            Backend::Sojourn => mu,
            Backend::Erlang2 { rate, c } => (1.0 + c) / rate,
            Backend::Stationary => w.moment(2) / (2.0 * mu),
            Backend::Renewal { renewal, r } => {
                let r = *r;
                let iw = |u: f64| w.integrated_survival(u);
                mu - iw(r)
                    + renewal
                        .stieltjes(0.0, r, |y| mu - iw(r - y))
                        .expect("grid covers [0, r]")
            }
        }
    }

    /// `E[E_r²]`.
    pub fn second_moment(&self) -> f64 {
        let w = &self.waiting;
        match &self.backend {
            Backend::Sojourn => w.moment(2),
            Backend::Erlang2 { rate, c } => (2.0 + 4.0 * c) / (rate * rate),
            Backend::Stationary => w.moment(3) / (3.0 * w.mean()),
            Backend::Renewal { .. } => {
                2.0 * GaussKronrod::with_tolerance(1e-12, 1e-10)
                    .integrate_to_infinity(|t| t * self.survival(t), 0.0)
                    .value
            }
        }
    }

    /// `φ̂(s|r)`. Closed forms continue analytically into `Re(s) ≤ 0`; the
    /// renewal-grid backend needs `Re(s) > 0`.
    pub fn laplace(&self, s: Complex64) -> Result<Complex64> {
        let w = &self.waiting;
        match &self.backend {
            Backend::Sojourn => w.laplace(s),
            Backend::Erlang2 { rate, c } => {
                let psi = w.laplace(s)?;
                let q = s + rate;
                Ok(psi + 2.0 * (1.0 - c) * rate * s / (2.0 * q * q))
            }
            Backend::Stationary => {
                if s.norm() < 1e-8 {
                    // (1 - ψ̂(s))/(sμ) = 1 - s E[τ²]/(2μ) + O(s²)
                    return Ok(1.0 - s * w.moment(2) / (2.0 * w.mean()));
                }
                Ok((1.0 - w.laplace(s)?) / (s * w.mean()))
            }
            Backend::Renewal { renewal, r } => {
                if s.re <= 0.0 {
                    bail!(Domain, "tail integral ∫ e^(-sl) dm(l) diverges for Re(s) = {} ≤ 0", s.re);
                }
                let r = *r;
                let end = renewal.horizon();
                if end <= r {
                    bail!(Coverage, "renewal grid ends at r = {r}");
                }
                // e^{sr} ∫_r^∞ e^{-sl} dm(l), with dm ≈ dl/μ beyond the grid.
                let body_re = renewal.stieltjes(r, end, |l| (-(s * (l - r))).exp().re)?;
                let body_im = renewal.stieltjes(r, end, |l| (-(s * (l - r))).exp().im)?;
                let tail = (-(s * (end - r))).exp() / (s * w.mean());
                Ok((1.0 - w.laplace(s)?) * (Complex64::new(body_re, body_im) + tail))
            }
        }
    }
}

/// `Φ(·|r)` from a precomputed renewal function.
pub fn excess_life(waiting: &WaitingTimeModel, renewal: Arc<RenewalSolution>, r: f64) -> Result<ExcessLifeLaw> {
    ExcessLifeLaw::from_renewal(waiting, renewal, r)
}

/// `φ̂(s|r)`; `ObservationTime::SteadyState` gives `(1 - ψ̂(s))/(sμ)`.
pub fn excess_life_laplace(waiting: &WaitingTimeModel, time: ObservationTime, s: Complex64) -> Result<Complex64> {
    ExcessLifeLaw::new(waiting, time)?.laplace(s)
}

/// Zero-drift relation `T_b(x, r) = T̃_b(x) - μ + μ_r`.
pub fn zero_drift_correction(spec: &ProcessSpec, time: ObservationTime, after_jump: f64) -> Result<f64> {
    if spec.drift != 0.0 {
        bail!(Regime, "the additive correction holds only without drift (v = {})", spec.drift);
    }
    let law = ExcessLifeLaw::new(&spec.waiting, time)?;
    Ok(after_jump - spec.waiting.mean() + law.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_to_infinity;

    fn erlang2() -> WaitingTimeModel {
        WaitingTimeModel::erlang(1.0, 2).unwrap()
    }

    fn sup_error(sol: &RenewalSolution, exact: impl Fn(f64) -> f64) -> f64 {
        sol.grid()
            .zip(sol.values())
            .map(|(t, m)| (m - exact(t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn poisson_renewal_is_linear() {
        let w = WaitingTimeModel::exponential(1.0).unwrap();
        let sol = solve_renewal_numeric(&w, 10.0, 1e-3).unwrap();
        assert_eq!(sol.values()[0], 0.0);
        assert!(sup_error(&sol, |t| t) < 1e-4);
    }

    #[test]
    fn erlang2_renewal_matches_closed_form() {
        let sol = solve_renewal_numeric(&erlang2(), 10.0, 1e-3).unwrap();
        assert!(sup_error(&sol, |t| renewal_erlang2(1.0, t)) < 1e-4);
        assert!((sol.eval(1.0).unwrap() - 0.283_834).abs() < 1e-4);
    }

    #[test]
    fn erlang2_closed_form_values() {
        assert_eq!(renewal_erlang2(1.0, 0.0), 0.0);
        assert!((renewal_erlang2(1.0, 1.0) - 0.283_833_8).abs() < 1e-7);
        let big = renewal_erlang2(1.0, 1000.0);
        assert!((big - 499.75).abs() < 1e-3 * 499.75);
        // Series branch joins the direct formula.
        let t: f64 = 0.45e-3;
        let direct = (2.0 * t + (-2.0 * t).exp_m1()) / 4.0;
        assert!(((renewal_erlang2(1.0, t) - direct) / direct).abs() < 1e-8);
    }

    #[test]
    fn beyond_grid_is_a_coverage_error() {
        let sol = RenewalSolution::erlang2(1.0, 5.0, 0.01);
        assert!(matches!(sol.eval(6.0), Err(crate::Error::Coverage(_))));
        let law = ExcessLifeLaw::from_renewal(&erlang2(), Arc::new(sol), 7.0);
        assert!(matches!(law, Err(crate::Error::Coverage(_))));
    }

    #[test]
    fn steady_state_law() {
        let law = ExcessLifeLaw::new(&erlang2(), ObservationTime::SteadyState).unwrap();
        assert!((law.cdf(1.0) - 0.448_181).abs() < 1e-5);
        let v = law.laplace(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 0.375).abs() < 1e-14);
        assert!((law.mean() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn excess_life_at_origin_is_sojourn() {
        let w = erlang2();
        let sol = Arc::new(solve_renewal_numeric(&w, 12.0, 1e-3).unwrap());
        let law = excess_life(&w, sol, 0.0).unwrap();
        for t in [0.1, 0.5, 1.0, 3.0, 8.0] {
            assert!((law.cdf(t) - w.cdf(t)).abs() < 1e-6, "t = {t}");
        }
        for s in [0.5, 1.0, 2.0] {
            let got = excess_life_laplace(&w, ObservationTime::Finite(0.0), Complex64::new(s, 0.0)).unwrap();
            assert!((got - w.laplace(Complex64::new(s, 0.0)).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_drift_correction_erlang2() {
        let spec = ProcessSpec::new(
            0.0,
            1.0,
            erlang2(),
            crate::JumpModel::exponential_positive(0.1).unwrap(),
        )
        .unwrap();
        let at = |r: f64| zero_drift_correction(&spec, ObservationTime::new(r).unwrap(), 2.2).unwrap();
        assert_eq!(at(0.0), 2.2);
        assert!((at(0.4) - 2.2 + 0.275_336).abs() < 1e-6);
        assert!((at(f64::INFINITY) - 1.7).abs() < 1e-12);
        // Oracle for μ_∞: quadrature of the stationary survival function.
        let law = ExcessLifeLaw::new(&erlang2(), ObservationTime::SteadyState).unwrap();
        let q = integrate_to_infinity(|t| law.survival(t), 0.0);
        assert!((q - 1.5).abs() < 1e-8);

        let drifting = ProcessSpec { drift: 0.1, ..spec };
        assert!(matches!(
            zero_drift_correction(&drifting, ObservationTime::Finite(1.0), 2.2),
            Err(crate::Error::Regime(_))
        ));
    }
}
