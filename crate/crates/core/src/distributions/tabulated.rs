use num_complex::Complex64;
use rand::Rng;

use crate::error::{bail, Result};
use crate::quadrature::GaussKronrod;

/// A density given on a grid and linearly interpolated between nodes.
///
/// The interpolant is renormalized to unit mass at construction; outside
/// the grid the density is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    nodes: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            bail!(Model, "tabulated density needs at least two grid points");
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                bail!(Model, "tabulated grid must be strictly increasing");
            }
        }
        if points.iter().any(|&(t, f)| !t.is_finite() || !f.is_finite() || f < 0.0) {
            bail!(Model, "tabulated density values must be finite and non-negative");
        }
        let nodes: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut density: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mut cumulative = Vec::with_capacity(nodes.len());
        cumulative.push(0.0);
        for i in 1..nodes.len() {
            let area = 0.5 * (density[i] + density[i - 1]) * (nodes[i] - nodes[i - 1]);
            cumulative.push(cumulative[i - 1] + area);
        }
        let mass = *cumulative.last().unwrap();
        if mass <= 0.0 {
            bail!(Model, "tabulated density has zero mass");
        }
        density.iter_mut().for_each(|f| *f /= mass);
        cumulative.iter_mut().for_each(|c| *c /= mass);
        Ok(Self {
            nodes,
            density,
            cumulative,
        })
    }

    /// Parse two-column CSV (`t,density`); a non-numeric first line is a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                bail!(Model, "line {}: expected two columns", lineno + 1);
            };
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(f)) => points.push((t, f)),
                _ if points.is_empty() && lineno == 0 => continue,
                _ => bail!(Model, "line {}: cannot parse '{line}'", lineno + 1),
            }
        }
        Self::new(&points)
    }

    pub fn lower(&self) -> f64 {
        self.nodes[0]
    }

    pub fn upper(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn segment(&self, x: f64) -> usize {
        self.nodes.partition_point(|&t| t <= x).saturating_sub(1).min(self.nodes.len() - 2)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lower() || x > self.upper() {
            return 0.0;
        }
        let i = self.segment(x);
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let w = (x - a) / (b - a);
        self.density[i] * (1.0 - w) + self.density[i + 1] * w
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lower() {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        let i = self.segment(x);
        let d = x - self.nodes[i];
        self.cumulative[i] + 0.5 * (self.density[i] + self.pdf(x)) * d
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let i = self.cumulative.partition_point(|&c| c <= p).saturating_sub(1).min(self.nodes.len() - 2);
        let width = self.nodes[i + 1] - self.nodes[i];
        let f0 = self.density[i];
        let slope = (self.density[i + 1] - f0) / width;
        let need = p - self.cumulative[i];
        // Solve f0·d + slope·d²/2 = need for d in [0, width].
        let d = if slope.abs() < 1e-14 * (1.0 + f0.abs()) {
            if f0 > 0.0 { need / f0 } else { 0.0 }
        } else {
            let disc = (f0 * f0 + 2.0 * slope * need).max(0.0);
            2.0 * need / (f0 + disc.sqrt())
        };
        self.nodes[i] + d.clamp(0.0, width)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// Exact transform of the piecewise-linear interpolant.
    pub fn laplace(&self, s: Complex64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..self.nodes.len() - 1 {
            let a = self.nodes[i];
            let d = self.nodes[i + 1] - a;
            let f0 = self.density[i];
            let slope = (self.density[i + 1] - f0) / d;
            let w = s * d;
            let (i0, i1) = if w.norm() < 0.1 {
                // d·Σ(-w)^k/(k+1)!  and  d²·Σ(-w)^k/(k!(k+2))
                let mut i0 = Complex64::new(0.0, 0.0);
                let mut i1 = Complex64::new(0.0, 0.0);
                let mut pow = Complex64::new(1.0, 0.0);
                let mut fact = 1.0;
                for k in 0..16 {
                    i0 += pow / (fact * (k as f64 + 1.0));
                    i1 += pow / (fact * (k as f64 + 2.0));
                    pow *= -w;
                    fact *= k as f64 + 1.0;
                }
                (i0 * d, i1 * d * d)
            } else {
                let e = (-w).exp();
                ((1.0 - e) / s, (1.0 - e * (1.0 + w)) / (s * s))
            };
            total += (-s * a).exp() * (i0 * f0 + i1 * slope);
        }
        total
    }

    /// `∫ x^k f(x) dx` over `(lo, hi)`, exact for the interpolant.
    pub fn partial_moment(&self, k: i32, lo: f64, hi: f64) -> f64 {
        let quad = GaussKronrod::with_tolerance(0.0, 1e-14);
        let mut total = 0.0;
        for i in 0..self.nodes.len() - 1 {
            let a = self.nodes[i].max(lo);
            let b = self.nodes[i + 1].min(hi);
            if b > a {
                total += quad.integrate(|x| x.powi(k) * self.pdf(x), a, b).value;
            }
        }
        total
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.partial_moment(k, self.lower(), self.upper())
    }

    /// `∫_0^t (1 - F(u)) du` for a density supported on `[0, ∞)`.
    pub fn integrated_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let quad = GaussKronrod::with_tolerance(0.0, 1e-14);
        let mut breaks: Vec<f64> = std::iter::once(0.0)
            .chain(self.nodes.iter().copied().filter(|&x| x > 0.0 && x < t))
            .chain(std::iter::once(t))
            .collect();
        breaks.dedup();
        breaks
            .windows(2)
            .map(|w| quad.integrate(|u| 1.0 - self.cdf(u), w[0], w[1]).value)
            .sum()
    }
}
