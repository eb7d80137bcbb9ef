//! Inverse Laplace transforms: contour quadrature on a Talbot-type path,
//! Gaver–Stehfest on the real axis, and exact residue inversion of rational
//! transforms.

mod poly;
mod rational;

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{bail, Result};
pub use poly::Poly;
pub use rational::{invert_rational, PoleTerm, RationalInverse};

type Evaluator = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Structural class of a transform.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformClass {
    /// `numerator / denominator`, coefficients in ascending powers of `s`.
    Rational { numerator: Vec<f64>, denominator: Vec<f64> },
    General,
}

/// A transform `ĝ(s)` that can be evaluated right of its abscissa.
#[derive(Clone)]
pub struct LaplaceFunction {
    eval: Evaluator,
    abscissa: f64,
    class: TransformClass,
}

impl fmt::Debug for LaplaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaplaceFunction")
            .field("abscissa", &self.abscissa)
            .field("class", &self.class)
            .finish()
    }
}

impl LaplaceFunction {
    /// `abscissa` bounds the real part of every singularity from above.
    pub fn new(abscissa: f64, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            abscissa,
            class: TransformClass::General,
        }
    }

    pub fn rational(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        let inverse = RationalInverse::new(&numerator, &denominator)?;
        let num = Poly::new(numerator.clone());
        let den = Poly::new(denominator.clone());
        Ok(Self {
            eval: Arc::new(move |s| num.eval(s) / den.eval(s)),
            abscissa: inverse.abscissa().max(f64::NEG_INFINITY),
            class: TransformClass::Rational {
                numerator,
                denominator,
            },
        })
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        (self.eval)(s)
    }

    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    pub fn class(&self) -> &TransformClass {
        &self.class
    }

    /// `a·self + b·other`; stays rational when both operands are.
    pub fn combine(&self, a: f64, other: &LaplaceFunction, b: f64) -> LaplaceFunction {
        let abscissa = self.abscissa.max(other.abscissa);
        if let (
            TransformClass::Rational {
                numerator: n1,
                denominator: d1,
            },
            TransformClass::Rational {
                numerator: n2,
                denominator: d2,
            },
        ) = (&self.class, &other.class)
        {
            let (n1, d1, n2, d2) = (
                Poly::new(n1.clone()),
                Poly::new(d1.clone()),
                Poly::new(n2.clone()),
                Poly::new(d2.clone()),
            );
            let num = &(&(&n1 * &d2) * a) + &(&(&n2 * &d1) * b);
            let den = &d1 * &d2;
            if let Ok(f) = LaplaceFunction::rational(num.0, den.0) {
                return f;
            }
        }
        let (f, g) = (self.eval.clone(), other.eval.clone());
        LaplaceFunction::new(abscissa, move |s| a * f(s) + b * g(s))
    }
}

/// Numerical inversion scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionMethod {
    /// Midpoint rule with `nodes` points on a cotangent (Talbot-type) contour.
    Talbot { nodes: usize },
    /// Gaver–Stehfest with an even number of real-axis samples.
    GaverStehfest { terms: usize },
}

impl InversionMethod {
    pub const DEFAULT_TALBOT: Self = Self::Talbot { nodes: 48 };
    pub const DEFAULT_STEHFEST: Self = Self::GaverStehfest { terms: 16 };
}

impl Default for InversionMethod {
    fn default() -> Self {
        Self::DEFAULT_TALBOT
    }
}

/// `g(t)` from `ĝ(s)`.
pub fn invert(f: &LaplaceFunction, t: f64, method: InversionMethod) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        bail!(Domain, "inversion requires t > 0, got {t}");
    }
    // Shift singularities into the left half-plane when needed.
    let shift = if f.abscissa > 0.0 { f.abscissa + 1.0 / t } else { 0.0 };
    let value = match method {
        InversionMethod::Talbot { nodes } => talbot(f, t, nodes, shift)?,
        InversionMethod::GaverStehfest { terms } => stehfest(f, t, terms, shift)?,
    };
    Ok(value)
}

// Contour s(θ) = (N/t)(-A + Bθ cot(αθ) + iCθ), θ ∈ (-π, π).
const CONTOUR_A: f64 = 0.6122;
const CONTOUR_B: f64 = 0.5017;
const CONTOUR_C: f64 = 0.2645;
const CONTOUR_ALPHA: f64 = 0.6407;

fn talbot(f: &LaplaceFunction, t: f64, nodes: usize, shift: f64) -> Result<f64> {
    if nodes < 4 || nodes % 2 != 0 {
        bail!(Domain, "Talbot node count must be even and ≥ 4, got {nodes}");
    }
    let scale = nodes as f64 / t;
    let h = 2.0 * PI / nodes as f64;
    let mut total = Complex64::new(0.0, 0.0);
    // Conjugate symmetry: sum over θ > 0 and double the real part.
    for k in nodes / 2..nodes {
        let theta = -PI + (k as f64 + 0.5) * h;
        let at = CONTOUR_ALPHA * theta;
        let cot = at.cos() / at.sin();
        let s = shift
            + scale * Complex64::new(-CONTOUR_A + CONTOUR_B * theta * cot, CONTOUR_C * theta);
        let ds = scale
            * Complex64::new(
                CONTOUR_B * (cot - at / (at.sin() * at.sin())),
                CONTOUR_C,
            );
        let value = f.eval(s);
        if !(value.re.is_finite() && value.im.is_finite()) {
            bail!(
                Numerical,
                "transform is not finite at contour node θ = {theta:.4}, s = {s:.6} (t = {t}, shift = {shift})"
            );
        }
        total += (s * t).exp() * value * ds / Complex64::new(0.0, 1.0);
    }
    Ok(h / PI * total.re)
}

fn stehfest_weights(terms: usize) -> Vec<f64> {
    let half = terms / 2;
    let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
    (1..=terms)
        .map(|k| {
            let lo = k.div_ceil(2);
            let hi = k.min(half);
            let sum: f64 = (lo..=hi)
                .map(|j| {
                    (j as f64).powi(half as i32) * fact(2 * j)
                        / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
                })
                .sum();
            if (k + half) % 2 == 0 { sum } else { -sum }
        })
        .collect()
}

fn stehfest(f: &LaplaceFunction, t: f64, terms: usize, shift: f64) -> Result<f64> {
    if terms < 2 || terms % 2 != 0 {
        bail!(Domain, "Gaver-Stehfest term count must be even and ≥ 2, got {terms}");
    }
    let a = LN_2 / t;
    let mut total = 0.0;
    for (k, w) in stehfest_weights(terms).into_iter().enumerate() {
        let s = Complex64::new(shift + a * (k + 1) as f64, 0.0);
        let value = f.eval(s);
        if !value.re.is_finite() {
            bail!(Numerical, "transform is not finite at s = {} (t = {t})", s.re);
        }
        total += w * value.re;
    }
    Ok((shift * t).exp() * a * total)
}
