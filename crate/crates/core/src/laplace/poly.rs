use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{bail, Result};

/// Real polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() == 1 {
            return Poly(vec![0.0]);
        }
        Poly::new(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    /// Number of vanishing low-order coefficients, i.e. the order of the root at zero.
    pub fn zero_order(&self) -> usize {
        self.0.iter().take_while(|&&c| c == 0.0).count().min(self.degree())
    }

    /// Divide by `s^k`; the caller guarantees the low coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Poly {
        Poly::new(self.0[k..].to_vec())
    }

    /// Roots of the polynomial, excluding exact zeros, from the eigenvalues
    /// of the companion matrix, refined by Newton steps.
    pub fn nonzero_roots(&self) -> Result<Vec<Complex64>> {
        let reduced = self.shift_down(self.zero_order());
        let n = reduced.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = reduced.0[n];
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -reduced.0[i] / lead;
        }
        let eig = companion.complex_eigenvalues();
        let deriv = reduced.derivative();
        let mut roots = Vec::with_capacity(n);
        for &z0 in eig.iter() {
            if !(z0.re.is_finite() && z0.im.is_finite()) {
                bail!(Numerical, "companion eigenvalue solver returned {z0}");
            }
            let mut z = z0;
            for _ in 0..4 {
                let d = deriv.eval(z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = reduced.eval(z) / d;
                if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > 1e-3 * (1.0 + z.norm()) {
                    break;
                }
                z -= step;
            }
            roots.push(z);
        }
        Ok(roots)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0.0) + rhs.0.get(i).copied().unwrap_or(0.0))
                .collect(),
        )
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Mul<f64> for &Poly {
    type Output = Poly;
    fn mul(self, k: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * k).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cubic() {
        // (s+1)(s+2)(s-3) = s³ - 7s - 6
        let p = Poly::new(vec![-6.0, -7.0, 0.0, 1.0]);
        let mut r: Vec<f64> = p.nonzero_roots().unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (got, want) in r.iter().zip([-2.0, -1.0, 3.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_roots_are_split_off() {
        // s²(s+4)
        let p = Poly::new(vec![0.0, 0.0, 4.0, 1.0]);
        assert_eq!(p.zero_order(), 2);
        let r = p.nonzero_roots().unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] + 4.0).norm() < 1e-14);
    }

    #[test]
    fn arithmetic() {
        let a = Poly::new(vec![1.0, 1.0]);
        let b = Poly::new(vec![-1.0, 1.0]);
        assert_eq!(&a * &b, Poly::new(vec![-1.0, 0.0, 1.0]));
        assert_eq!(&a + &b, Poly::new(vec![0.0, 2.0]));
        assert_eq!((&a * &b).derivative(), Poly::new(vec![0.0, 2.0]));
    }
}
