use num_complex::Complex64;

use super::poly::Poly;
use crate::error::{bail, Result};

/// Roots closer than this (relative to the largest root) are merged into a
/// double root.
const CLUSTER_TOL: f64 = 1e-7;
/// Tolerated imaginary part of a reconstructed real signal.
const LEAKAGE_TOL: f64 = 1e-8;

/// One pole's contribution `(c + d·t) e^{z t}` to the inverse transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub multiplicity: u8,
    pub constant: Complex64,
    pub linear: Complex64,
}

/// Closed-form inverse of a strictly proper rational transform as a sum of
/// exponential-polynomial terms, one per distinct pole.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalInverse {
    pub terms: Vec<PoleTerm>,
}

impl RationalInverse {
    /// Build the residue expansion of `numerator / denominator` (ascending coefficients).
    pub fn new(numerator: &[f64], denominator: &[f64]) -> Result<Self> {
        let mut num = Poly::new(numerator.to_vec());
        let mut den = Poly::new(denominator.to_vec());
        if den.is_zero() {
            bail!(Domain, "denominator polynomial is identically zero");
        }
        if num.is_zero() {
            return Ok(Self { terms: Vec::new() });
        }
        // Cancel common powers of s.
        let common = num.zero_order().min(den.zero_order());
        num = num.shift_down(common);
        den = den.shift_down(common);
        if num.degree() >= den.degree() {
            bail!(
                Domain,
                "transform must be strictly proper (numerator degree {} ≥ denominator degree {})",
                num.degree(),
                den.degree()
            );
        }

        let zero_order = den.zero_order();
        let mut poles: Vec<(Complex64, u8)> = Vec::new();
        if zero_order > 2 {
            bail!(Unsupported, "pole of order {zero_order} at s = 0");
        }
        if zero_order > 0 {
            poles.push((Complex64::new(0.0, 0.0), zero_order as u8));
        }
        let mut roots = den.nonzero_roots()?;
        let scale = roots.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        while let Some(z) = roots.pop() {
            if zero_order > 0 && z.norm() < CLUSTER_TOL * scale {
                bail!(Unsupported, "pole of order > {zero_order} at s = 0");
            }
            let close: Vec<usize> = (0..roots.len())
                .filter(|&j| (roots[j] - z).norm() < CLUSTER_TOL * scale)
                .collect();
            match close.len() {
                0 => poles.push((snap_real(z, scale), 1)),
                1 => {
                    let partner = roots.remove(close[0]);
                    poles.push((snap_real(0.5 * (z + partner), scale), 2));
                }
                k => bail!(Unsupported, "pole of order {} near s = {z}", k + 1),
            }
        }

        let d1 = den.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let n1 = num.derivative();
        let terms = poles
            .into_iter()
            .map(|(z, m)| {
                if m == 1 {
                    PoleTerm {
                        pole: z,
                        multiplicity: 1,
                        constant: num.eval(z) / d1.eval(z),
                        linear: Complex64::new(0.0, 0.0),
                    }
                } else {
                    // D(s) = (s - z)² E(s): E(z) = D''(z)/2, E'(z) = D'''(z)/6.
                    let e0 = d2.eval(z) * 0.5;
                    let e1 = d3.eval(z) / 6.0;
                    let nz = num.eval(z);
                    PoleTerm {
                        pole: z,
                        multiplicity: 2,
                        constant: (n1.eval(z) * e0 - nz * e1) / (e0 * e0),
                        linear: nz / e0,
                    }
                }
            })
            .collect();
        let inverse = Self { terms };
        inverse.check_reconstruction(&num, &den, scale)?;
        Ok(inverse)
    }

    /// The partial-fraction sum must reproduce the transform off the poles;
    /// this catches unresolved higher-order clusters.
    fn check_reconstruction(&self, num: &Poly, den: &Poly, scale: f64) -> Result<()> {
        let shift = self.abscissa().max(0.0) + scale.max(1.0);
        for probe in [Complex64::new(shift, 0.37 * shift), Complex64::new(2.0 * shift, -1.3 * shift)] {
            let want = num.eval(probe) / den.eval(probe);
            let mut got = Complex64::new(0.0, 0.0);
            let mut magnitude = 0.0;
            for term in &self.terms {
                let w = 1.0 / (probe - term.pole);
                let part = term.constant * w + term.linear * w * w;
                magnitude += part.norm();
                got += part;
            }
            if (got - want).norm() > 1e-8 * want.norm().max(1e-300) + 1e-12 * magnitude {
                bail!(
                    Numerical,
                    "partial fractions fail to reproduce the transform at s = {probe} ({got} vs {want}); \
                     the denominator likely has a root of multiplicity > 2"
                );
            }
        }
        Ok(())
    }

    fn sum(&self, t: f64, derivative: bool) -> Result<f64> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for term in &self.terms {
            let e = (term.pole * t).exp();
            let value = if derivative {
                (term.linear + term.pole * (term.constant + term.linear * t)) * e
            } else {
                (term.constant + term.linear * t) * e
            };
            magnitude += value.norm();
            total += value;
        }
        if total.im.abs() > LEAKAGE_TOL * magnitude.max(1.0) {
            bail!(
                Numerical,
                "imaginary residue leakage {:.3e} at t = {t} (term magnitude {:.3e})",
                total.im,
                magnitude
            );
        }
        Ok(total.re)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.sum(t, false)
    }

    /// First derivative of the inverse transform.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.sum(t, true)
    }

    /// Rightmost pole real part (abscissa of convergence).
    pub fn abscissa(&self) -> f64 {
        self.terms.iter().map(|t| t.pole.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn snap_real(z: Complex64, scale: f64) -> Complex64 {
    if z.im.abs() <= 1e-12 * scale.max(1.0) {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

/// Inverse Laplace transform of a strictly proper real rational function at `t`,
/// by residues at the poles.
pub fn invert_rational(numerator: &[f64], denominator: &[f64], t: f64) -> Result<f64> {
    RationalInverse::new(numerator, denominator)?.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_pole() {
        let v = invert_rational(&[1.0], &[1.0, 1.0], 1.0).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn double_pole_at_origin() {
        let v = invert_rational(&[1.0], &[0.0, 0.0, 1.0], 3.0).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn renewal_function_transform() {
        // λ²/(s²(2λ+s)) with λ = 1  ->  (2t + e^{-2t} - 1)/4
        let inv = RationalInverse::new(&[1.0], &[0.0, 0.0, 2.0, 1.0]).unwrap();
        let want = (2.0 + (-2.0f64).exp() - 1.0) / 4.0;
        assert!((inv.eval(1.0).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.283_833_8).abs() < 1e-7);
        let dwant = (2.0 - 2.0 * (-2.0f64).exp()) / 4.0;
        assert!((inv.derivative(1.0).unwrap() - dwant).abs() < 1e-12);
    }

    #[test]
    fn complex_pair_is_real() {
        // 1/((s+1)² + 4) -> e^{-t} sin(2t)/2
        let v = invert_rational(&[1.0], &[5.0, 2.0, 1.0], 0.7).unwrap();
        let want = (-0.7f64).exp() * (1.4f64).sin() / 2.0;
        assert!((v - want).abs() < 1e-13);
    }

    #[test]
    fn near_degenerate_pair_is_collapsed() {
        // (s+1)(s+1+1e-9) ≈ (s+1)²: inverse of 1/(s+1)² is t e^{-t}.
        let eps = 1e-9;
        let den = [1.0 + eps, 2.0 + eps, 1.0];
        let inv = RationalInverse::new(&[1.0], &den).unwrap();
        assert_eq!(inv.terms.len(), 1);
        assert_eq!(inv.terms[0].multiplicity, 2);
        let v = inv.eval(2.0).unwrap();
        assert!((v - 2.0 * (-2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn common_factors_of_s_cancel() {
        // s/(s²(s+1)) = 1/(s(s+1)) -> 1 - e^{-t}
        let v = invert_rational(&[0.0, 1.0], &[0.0, 0.0, 1.0, 1.0], 1.5).unwrap();
        assert!((v - (1.0 - (-1.5f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn rejects_improper_and_high_order() {
        assert!(matches!(
            invert_rational(&[1.0, 1.0], &[1.0, 1.0], 1.0),
            Err(crate::Error::Domain(_))
        ));
        assert!(matches!(
            invert_rational(&[1.0], &[0.0, 0.0, 0.0, 1.0], 1.0),
            Err(crate::Error::Unsupported(_))
        ));
        // (s+1)³
        assert!(matches!(
            invert_rational(&[1.0], &[1.0, 3.0, 3.0, 1.0], 1.0),
            Err(crate::Error::Unsupported(_) | crate::Error::Numerical(_))
        ));
    }
}
