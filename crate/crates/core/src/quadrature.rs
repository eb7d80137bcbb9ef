//! Adaptive Gauss–Kronrod quadrature over real and complex integrands.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: closed under addition and real scaling.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub converged: bool,
}

/// Global adaptive G7/K15 integrator.
#[derive(Debug, Clone, Copy)]
pub struct GaussKronrod {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for GaussKronrod {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_intervals: 2000,
        }
    }
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<V: Integrand, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).magnitude();
    (value, error)
}

impl GaussKronrod {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<V: Integrand, F: Fn(f64) -> V>(&self, f: F, a: f64, b: f64) -> Estimate<V> {
        if a == b {
            return Estimate {
                value: V::zero(),
                error: 0.0,
                converged: true,
            };
        }
        let (value, error) = kronrod(&f, a, b);
        let mut heap = BinaryHeap::new();
        heap.push(Segment { a, b, value, error });
        let mut total = value;
        let mut total_err = error;
        let mut count = 1;
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.magnitude());
            if total_err <= tol {
                return Estimate {
                    value: total,
                    error: total_err,
                    converged: true,
                };
            }
            if count >= self.max_intervals {
                break;
            }
            let worst = heap.pop().expect("heap never empties");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                heap.push(worst);
                break;
            }
            let (lv, le) = kronrod(&f, worst.a, mid);
            let (rv, re) = kronrod(&f, mid, worst.b);
            total = total - worst.value + lv + rv;
            total_err += le + re - worst.error;
            heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
            heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
            count += 1;
        }
        // Re-sum to shed accumulated round-off from the running updates.
        let mut value = V::zero();
        let mut error = 0.0;
        for seg in heap {
            value = value + seg.value;
            error += seg.error;
        }
        Estimate {
            value,
            error,
            converged: false,
        }
    }

    /// Integral over `[a, ∞)` via the map `t = a + u/(1-u)`.
    pub fn integrate_to_infinity<V: Integrand, F: Fn(f64) -> V>(&self, f: F, a: f64) -> Estimate<V> {
        self.integrate(
            |u| {
                if u >= 1.0 {
                    return V::zero();
                }
                let w = 1.0 - u;
                f(a + u / w) * (1.0 / (w * w))
            },
            0.0,
            1.0,
        )
    }
}

/// Integrate with default tolerances, returning only the value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    GaussKronrod::default().integrate(f, a, b).value
}

/// Integrate over `[a, ∞)` with default tolerances.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64) -> f64 {
    GaussKronrod::default().integrate_to_infinity(f, a).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0);
        assert!((v - (8.0 + 1.0 - 1.5 + 6.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_and_peaked() {
        let v = integrate(|x| (-x).exp(), 0.0, 3.0);
        assert!((v - (1.0 - (-3.0f64).exp())).abs() < 1e-13);
        let peak = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0);
        let exact = 2.0 * (1.0 / 1e-2f64).atan() / 1e-2;
        assert!(((peak - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite() {
        let v = integrate_to_infinity(|x| x * (-x).exp(), 0.0);
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn complex_integrand() {
        let s = Complex64::new(1.0, 2.0);
        let est = GaussKronrod::default().integrate_to_infinity(|t| (-s * t).exp(), 0.0);
        assert!((est.value - 1.0 / s).norm() < 1e-10);
    }
}
