use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::TabulatedDensity;
use crate::error::{bail, Result};

/// Law of the sojourn time between consecutive jumps.
#[derive(Debug, Clone, PartialEq)]
pub enum WaitingTimeModel {
    Exponential { rate: f64 },
    Erlang { rate: f64, shape: u32 },
    Tabulated(TabulatedDensity),
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate.is_finite()) {
        bail!(Model, "rate must be positive and finite, got {rate}");
    }
    Ok(())
}

/// `e^{-x} Σ_{k<n} x^k/k!`, the probability that a Poisson(x) count is below `n`.
fn poisson_below(n: u32, x: f64) -> f64 {
    let mut term = (-x).exp();
    let mut sum = term;
    for k in 1..n {
        term *= x / k as f64;
        sum += term;
    }
    sum
}

/// `e^{-x} Σ_{k≥n} x^k/k!`, summed directly to avoid cancellation for small `x`.
fn poisson_at_least(n: u32, x: f64) -> f64 {
    if x > n as f64 + 10.0 {
        return 1.0 - poisson_below(n, x);
    }
    let mut term = (-x).exp();
    for k in 1..=n {
        term *= x / k as f64;
    }
    let mut sum = 0.0;
    let mut k = n;
    while term > 1e-18 * sum || sum == 0.0 {
        sum += term;
        k += 1;
        term *= x / k as f64;
        if term == 0.0 {
            break;
        }
    }
    sum
}

impl WaitingTimeModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn erlang(rate: f64, shape: u32) -> Result<Self> {
        check_rate(rate)?;
        if shape == 0 {
            bail!(Model, "Erlang shape must be at least 1");
        }
        Ok(Self::Erlang { rate, shape })
    }

    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        let density = TabulatedDensity::new(points)?;
        if density.lower() < 0.0 {
            bail!(Model, "waiting times must be supported on [0, ∞)");
        }
        Ok(Self::Tabulated(density))
    }

    /// `(rate, shape)` for the exponential and Erlang families.
    pub fn erlang_parameters(&self) -> Option<(f64, u32)> {
        match *self {
            Self::Exponential { rate } => Some((rate, 1)),
            Self::Erlang { rate, shape } => Some((rate, shape)),
            Self::Tabulated(_) => None,
        }
    }

    /// The rate `λ` when the law is Erlang with shape two.
    pub fn erlang2_rate(&self) -> Option<f64> {
        match self.erlang_parameters() {
            Some((rate, 2)) => Some(rate),
            _ => None,
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            Self::Tabulated(d) => d.pdf(t),
            _ => {
                let (rate, n) = self.erlang_parameters().unwrap();
                if n == 1 {
                    return rate * (-rate * t).exp();
                }
                if t == 0.0 {
                    return 0.0;
                }
                let ln_fact: f64 = (1..n).map(|k| (k as f64).ln()).sum();
                (n as f64 * rate.ln() + (n - 1) as f64 * t.ln() - rate * t - ln_fact).exp()
            }
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Tabulated(d) => d.cdf(t),
            _ => {
                let (rate, n) = self.erlang_parameters().unwrap();
                poisson_at_least(n, rate * t)
            }
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match self {
            Self::Tabulated(d) => 1.0 - d.cdf(t),
            _ => {
                let (rate, n) = self.erlang_parameters().unwrap();
                poisson_below(n, rate * t)
            }
        }
    }

    /// `∫_0^t [1 - Ψ(u)] du = E[min(τ, t)]`.
    pub fn integrated_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Tabulated(d) => d.integrated_survival(t),
            _ => {
                let (rate, n) = self.erlang_parameters().unwrap();
                (1..=n).map(|k| poisson_at_least(k, rate * t)).sum::<f64>() / rate
            }
        }
    }

    /// `ψ̂(s) = ∫_0^∞ e^{-st} ψ(t) dt`.
    ///
    /// Closed forms are continued analytically to `Re(s) < 0`; the only
    /// failure is evaluation at the pole `s = -λ`.
    pub fn laplace(&self, s: Complex64) -> Result<Complex64> {
        match self {
            Self::Tabulated(d) => Ok(d.laplace(s)),
            _ => {
                let (rate, n) = self.erlang_parameters().unwrap();
                let denom = s + rate;
                if denom.norm() == 0.0 {
                    bail!(Domain, "ψ̂(s) has a pole at s = -{rate}");
                }
                Ok((rate / denom).powu(n))
            }
        }
    }

    /// Raw moment `E[τ^k]`.
    pub fn moment(&self, k: u32) -> f64 {
        match self {
            Self::Tabulated(d) => d.moment(k as i32),
            _ => {
                let (rate, n) = self.erlang_parameters().unwrap();
                (0..k).map(|j| (n + j) as f64).product::<f64>() / rate.powi(k as i32)
            }
        }
    }

    /// Mean sojourn time `μ`.
    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Tabulated(d) => d.sample(rng),
            _ => {
                let (rate, n) = self.erlang_parameters().unwrap();
                let total: f64 = (0..n).map(|_| -> f64 { Exp1.sample(rng) }).sum::<f64>();
                total / rate
            }
        }
    }
}
