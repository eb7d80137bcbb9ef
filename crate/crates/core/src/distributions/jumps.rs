use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{Moment, TabulatedDensity};
use crate::error::{bail, Result};
use crate::quadrature::GaussKronrod;
use crate::special::erfc;

/// Law of the jump sizes `J_n`.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpModel {
    /// `h(u) = γ e^{-γu}` on `u > 0`.
    ExponentialPositive { rate: f64 },
    /// `h(u) = γ e^{γu}` on `u < 0`.
    ExponentialNegative { rate: f64 },
    /// `J = -(offset + E)` with `E ~ Exp(rate)`, supported on `(-∞, -offset]`.
    ShiftedExponentialNegative { rate: f64, offset: f64 },
    /// Degenerate law at a non-zero point.
    PointMass { at: f64 },
    /// One-sided stable law of index 1/2 with `ĥ(s) = e^{-k√s}`.
    OneSidedStableHalf { scale: f64 },
    Tabulated(TabulatedDensity),
    /// `h = q h₊ + p h₋` with `p = negative_prob`.
    Mixture {
        negative_prob: f64,
        positive: Box<JumpModel>,
        negative: Box<JumpModel>,
    },
}

/// Sign structure of the jump law, which decides the exit regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Positive,
    Negative,
    TwoSided,
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        bail!(Model, "{name} must be positive and finite, got {value}");
    }
    Ok(())
}

impl JumpModel {
    pub fn exponential_positive(rate: f64) -> Result<Self> {
        check_positive("jump rate", rate)?;
        Ok(Self::ExponentialPositive { rate })
    }

    pub fn exponential_negative(rate: f64) -> Result<Self> {
        check_positive("jump rate", rate)?;
        Ok(Self::ExponentialNegative { rate })
    }

    pub fn shifted_exponential_negative(rate: f64, offset: f64) -> Result<Self> {
        check_positive("jump rate", rate)?;
        if !(offset >= 0.0 && offset.is_finite()) {
            bail!(Model, "offset must be non-negative, got {offset}");
        }
        Ok(Self::ShiftedExponentialNegative { rate, offset })
    }

    pub fn point_mass(at: f64) -> Result<Self> {
        if at == 0.0 || !at.is_finite() {
            bail!(Model, "point mass must sit at a finite non-zero location");
        }
        Ok(Self::PointMass { at })
    }

    pub fn one_sided_stable_half(scale: f64) -> Result<Self> {
        check_positive("stable scale", scale)?;
        Ok(Self::OneSidedStableHalf { scale })
    }

    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        Ok(Self::Tabulated(TabulatedDensity::new(points)?))
    }

    pub fn mixture(negative_prob: f64, positive: JumpModel, negative: JumpModel) -> Result<Self> {
        if !(0.0..=1.0).contains(&negative_prob) {
            bail!(Model, "mixture probability must lie in [0, 1], got {negative_prob}");
        }
        if positive.support() != Support::Positive {
            bail!(Model, "positive mixture component must be supported on (0, ∞)");
        }
        if negative.support() != Support::Negative {
            bail!(Model, "negative mixture component must be supported on (-∞, 0)");
        }
        Ok(Self::Mixture {
            negative_prob,
            positive: Box::new(positive),
            negative: Box::new(negative),
        })
    }

    pub fn support(&self) -> Support {
        let neg = self.prob_negative();
        let pos = 1.0 - neg;
        match (neg > 0.0, pos > 0.0) {
            (false, _) => Support::Positive,
            (true, false) => Support::Negative,
            (true, true) => Support::TwoSided,
        }
    }

    /// `p = P(J < 0)`.
    pub fn prob_negative(&self) -> f64 {
        match self {
            Self::ExponentialPositive { .. } | Self::OneSidedStableHalf { .. } => 0.0,
            Self::ExponentialNegative { .. } | Self::ShiftedExponentialNegative { .. } => 1.0,
            Self::PointMass { at } => (*at < 0.0) as u8 as f64,
            Self::Tabulated(d) => d.cdf(0.0),
            Self::Mixture { negative_prob, .. } => *negative_prob,
        }
    }

    /// `q = 1 - p` and the positive-side law `h₊`.
    pub fn positive_part(&self) -> Option<(f64, &JumpModel)> {
        match self {
            Self::Mixture {
                negative_prob,
                positive,
                ..
            } => Some((1.0 - negative_prob, positive.as_ref())),
            _ if self.support() == Support::Positive => Some((1.0, self)),
            _ => None,
        }
    }

    /// `p` and the negative-side law `h₋`.
    pub fn negative_part(&self) -> Option<(f64, &JumpModel)> {
        match self {
            Self::Mixture {
                negative_prob,
                negative,
                ..
            } => Some((*negative_prob, negative.as_ref())),
            _ if self.support() == Support::Negative => Some((1.0, self)),
            _ => None,
        }
    }

    /// Supremum of the support.
    pub fn support_max(&self) -> f64 {
        match self {
            Self::ExponentialPositive { .. } | Self::OneSidedStableHalf { .. } => f64::INFINITY,
            Self::ExponentialNegative { .. } => 0.0,
            Self::ShiftedExponentialNegative { offset, .. } => -offset,
            Self::PointMass { at } => *at,
            Self::Tabulated(d) => d.upper(),
            Self::Mixture {
                negative_prob,
                positive,
                negative,
            } => {
                if *negative_prob < 1.0 {
                    positive.support_max()
                } else {
                    negative.support_max()
                }
            }
        }
    }

    /// Density of the absolutely continuous part.
    pub fn pdf(&self, u: f64) -> f64 {
        match self {
            Self::ExponentialPositive { rate } => {
                if u > 0.0 { rate * (-rate * u).exp() } else { 0.0 }
            }
            Self::ExponentialNegative { rate } => {
                if u < 0.0 { rate * (rate * u).exp() } else { 0.0 }
            }
            Self::ShiftedExponentialNegative { rate, offset } => {
                let w = -u - offset;
                if w > 0.0 { rate * (-rate * w).exp() } else { 0.0 }
            }
            Self::PointMass { .. } => 0.0,
            Self::OneSidedStableHalf { scale } => {
                if u > 0.0 {
                    scale / (2.0 * (PI * u * u * u).sqrt()) * (-scale * scale / (4.0 * u)).exp()
                } else {
                    0.0
                }
            }
            Self::Tabulated(d) => d.pdf(u),
            Self::Mixture {
                negative_prob,
                positive,
                negative,
            } => (1.0 - negative_prob) * positive.pdf(u) + negative_prob * negative.pdf(u),
        }
    }

    /// `P(J ≤ u)`.
    pub fn cdf(&self, u: f64) -> f64 {
        match self {
            Self::ExponentialPositive { rate } => {
                if u > 0.0 { -(-rate * u).exp_m1() } else { 0.0 }
            }
            Self::ExponentialNegative { rate } => {
                if u < 0.0 { (rate * u).exp() } else { 1.0 }
            }
            Self::ShiftedExponentialNegative { rate, offset } => {
                let w = -u - offset;
                if w > 0.0 { (-rate * w).exp() } else { 1.0 }
            }
            Self::PointMass { at } => (u >= *at) as u8 as f64,
            Self::OneSidedStableHalf { scale } => {
                if u > 0.0 { erfc(scale / (2.0 * u.sqrt())) } else { 0.0 }
            }
            Self::Tabulated(d) => d.cdf(u),
            Self::Mixture {
                negative_prob,
                positive,
                negative,
            } => (1.0 - negative_prob) * positive.cdf(u) + negative_prob * negative.cdf(u),
        }
    }

    /// `P(lo < J ≤ hi)`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }

    /// Locations and weights of atoms.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self {
            Self::PointMass { at } => vec![(*at, 1.0)],
            Self::Mixture {
                negative_prob,
                positive,
                negative,
            } => positive
                .atoms()
                .into_iter()
                .map(|(a, w)| (a, w * (1.0 - negative_prob)))
                .chain(negative.atoms().into_iter().map(|(a, w)| (a, w * negative_prob)))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            Self::ShiftedExponentialNegative { offset, .. } => vec![-offset, 0.0],
            Self::Tabulated(d) => d.nodes().to_vec(),
            Self::Mixture {
                positive, negative, ..
            } => {
                let mut k = positive.kinks();
                k.extend(negative.kinks());
                k.push(0.0);
                k
            }
            _ => vec![0.0],
        }
    }

    /// `E[f(J); lo < J < hi]`, splitting at density kinks and adding atoms.
    pub fn expect_between(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.expect_dyn(lo, hi, &f)
    }

    fn expect_dyn(&self, lo: f64, hi: f64, f: &dyn Fn(f64) -> f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let quad = GaussKronrod::with_tolerance(1e-13, 1e-11);
        let mut cuts: Vec<f64> = self.kinks().into_iter().filter(|&k| k > lo && k < hi).collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.is_infinite() && b.is_infinite() {
                total += self.expect_dyn(a, 0.0, f) + self.expect_dyn(0.0, b, f);
                continue;
            }
            if a.is_finite() && b.is_finite() {
                total += quad.integrate(|u| self.pdf(u) * f(u), a, b).value;
            } else if a.is_finite() {
                total += quad.integrate_to_infinity(|u| self.pdf(u) * f(u), a).value;
            } else {
                total += quad.integrate_to_infinity(|u| self.pdf(-u) * f(-u), -b).value;
            }
        }
        for (at, weight) in self.atoms() {
            if at > lo && at < hi {
                total += weight * f(at);
            }
        }
        total
    }

    /// One-sided transform `ĥ(s) = ∫_0^∞ e^{-su} h(u) du` of a positive law.
    pub fn laplace(&self, s: Complex64) -> Result<Complex64> {
        match self {
            Self::ExponentialPositive { rate } => {
                let denom = s + rate;
                if denom.norm() == 0.0 {
                    bail!(Domain, "ĥ(s) has a pole at s = -{rate}");
                }
                Ok(*rate / denom)
            }
            Self::OneSidedStableHalf { scale } => Ok((-*scale * s.sqrt()).exp()),
            Self::PointMass { at } if *at > 0.0 => Ok((-s * *at).exp()),
            Self::Tabulated(d) if d.lower() >= 0.0 => Ok(d.laplace(s)),
            Self::Mixture {
                negative_prob,
                positive,
                ..
            } if *negative_prob == 0.0 => positive.laplace(s),
            _ => bail!(
                Regime,
                "one-sided transform needs positive jumps; use positive_part() on {:?}",
                self.support()
            ),
        }
    }

    pub fn mean(&self) -> Moment {
        match self {
            Self::ExponentialPositive { rate } => Moment::Finite(1.0 / rate),
            Self::ExponentialNegative { rate } => Moment::Finite(-1.0 / rate),
            Self::ShiftedExponentialNegative { rate, offset } => Moment::Finite(-offset - 1.0 / rate),
            Self::PointMass { at } => Moment::Finite(*at),
            Self::OneSidedStableHalf { .. } => Moment::Undefined,
            Self::Tabulated(d) => Moment::Finite(d.moment(1)),
            Self::Mixture {
                negative_prob,
                positive,
                negative,
            } => match (positive.mean(), negative.mean()) {
                (Moment::Finite(a), Moment::Finite(b)) => {
                    Moment::Finite((1.0 - negative_prob) * a + negative_prob * b)
                }
                _ => Moment::Undefined,
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::ExponentialPositive { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            Self::ExponentialNegative { rate } => {
                let e: f64 = Exp1.sample(rng);
                -e / rate
            }
            Self::ShiftedExponentialNegative { rate, offset } => {
                let e: f64 = Exp1.sample(rng);
                -offset - e / rate
            }
            Self::PointMass { at } => *at,
            Self::OneSidedStableHalf { scale } => {
                // Lévy law with c = k²/2 is c/Z² for standard normal Z.
                let z: f64 = StandardNormal.sample(rng);
                scale * scale / (2.0 * z * z)
            }
            Self::Tabulated(d) => d.sample(rng),
            Self::Mixture {
                negative_prob,
                positive,
                negative,
            } => {
                if rng.random::<f64>() < *negative_prob {
                    negative.sample(rng)
                } else {
                    positive.sample(rng)
                }
            }
        }
    }
}
