//! Dense Nyström solve of the after-jump equation on a uniform grid over
//! `[0, b]`, valid for every jump regime.
//!
//! With `G(z) = E[T̃(z + J); 0 < z + J < b]` the after-jump mean exit time
//! satisfies `T̃(x) = E[min(τ, ϱ)] + ∫_0^ϱ ψ(l) G(x + vl) dl`. `T̃` and `G`
//! are represented by piecewise-linear interpolants, and every integral
//! against `ψ` or `h` is taken exactly for that interpolant, so the grid
//! equations are `(I - P·H) T = f` with Toeplitz factors `P` and `H`.

use nalgebra::{DMatrix, DVector};

use super::FirstWait;
use crate::error::{bail, Result};
use crate::interp::UniformTable;
use crate::process::ProcessSpec;
use crate::quadrature::GaussKronrod;
use crate::JumpModel;

pub const DEFAULT_POINTS: usize = 2001;

/// Solved after-jump table and the jump-continuation function `G`.
#[derive(Debug, Clone)]
pub struct ExitTable {
    spec: ProcessSpec,
    after_jump: UniformTable,
    continuation: UniformTable,
}

/// `L[d]`, `R[d]` for `d ∈ [-(n-1), n-1]`: expected left and right half-hat
/// weights of a jump landing `d` cells away.
fn hat_moments(jumps: &JumpModel, n: usize, dx: f64) -> (Vec<f64>, Vec<f64>) {
    let quad = GaussKronrod::with_tolerance(1e-15, 1e-12);
    let offset = n as isize - 1;
    let mut left = vec![0.0; 2 * n - 1];
    let mut right = vec![0.0; 2 * n - 1];
    for d in -offset..=offset {
        let slot = (d + offset) as usize;
        let (lo, mid, hi) = ((d - 1) as f64 * dx, d as f64 * dx, (d + 1) as f64 * dx);
        let df = d as f64;
        if jumps.cdf(mid) - jumps.cdf(lo) > 0.0 {
            left[slot] = quad
                .integrate(|u| jumps.pdf(u) * (u / dx - (df - 1.0)), lo, mid)
                .value;
        }
        if jumps.cdf(hi) - jumps.cdf(mid) > 0.0 {
            right[slot] = quad.integrate(|u| jumps.pdf(u) * (df + 1.0 - u / dx), mid, hi).value;
        }
    }
    for (at, weight) in jumps.atoms() {
        let u = at / dx;
        // Left halves cover (d-1, d], right halves (d, d+1].
        let d_left = u.ceil();
        if d_left.abs() <= offset as f64 {
            left[(d_left as isize + offset) as usize] += weight * (u - (d_left - 1.0));
        }
        let d_right = u.ceil() - 1.0;
        if d_right.abs() <= offset as f64 {
            right[(d_right as isize + offset) as usize] += weight * (d_right + 1.0 - u);
        }
    }
    (left, right)
}

fn jump_matrix(jumps: &JumpModel, n: usize, dx: f64) -> DMatrix<f64> {
    let (left, right) = hat_moments(jumps, n, dx);
    let offset = n as isize - 1;
    DMatrix::from_fn(n, n, |k, j| {
        let slot = (j as isize - k as isize + offset) as usize;
        let mut w = 0.0;
        if j >= 1 {
            w += left[slot];
        }
        if j + 1 < n {
            w += right[slot];
        }
        w
    })
}

/// Weights of `G` at the nodes in `∫_0^ϱ w(l) G(x_i + vl) dl`.
fn transport_matrix(law: &dyn FirstWait, n: usize, dx: f64, v: f64) -> DMatrix<f64> {
    let quad = GaussKronrod::with_tolerance(1e-15, 1e-12);
    let delta = dx / v;
    let mut low = vec![0.0; n - 1];
    let mut high = vec![0.0; n - 1];
    for d in 0..n - 1 {
        let (a, b) = (d as f64 * delta, (d + 1) as f64 * delta);
        let mass = law.cdf(b) - law.cdf(a);
        let first = quad.integrate(|l| law.pdf(l) * (l - a), a, b).value / delta;
        low[d] = mass - first;
        high[d] = first;
    }
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        for d in 0..n - 1 - i {
            p[(i, i + d)] += low[d];
            p[(i, i + d + 1)] += high[d];
        }
    }
    p
}

impl ExitTable {
    /// Solves on `points` equally spaced nodes covering `[0, b]`.
    pub fn solve(spec: &ProcessSpec, points: usize) -> Result<Self> {
        let b = spec.boundary;
        if !b.is_finite() {
            bail!(Domain, "the Nyström solve needs a finite boundary");
        }
        if points < 5 {
            bail!(Domain, "need at least 5 grid points, got {points}");
        }
        let n = points;
        let dx = b / (n - 1) as f64;
        let v = spec.drift;
        let h = jump_matrix(&spec.jumps, n, dx);
        let (system, rhs) = if v > 0.0 {
            let p = transport_matrix(&spec.waiting, n, dx, v);
            let rhs = DVector::from_fn(n, |i, _| {
                spec.waiting.integrated_survival((b - i as f64 * dx) / v)
            });
            (DMatrix::identity(n, n) - p * &h, rhs)
        } else {
            (DMatrix::identity(n, n) - &h, DVector::from_element(n, spec.waiting.mean()))
        };
        let t = system.lu().solve(&rhs).ok_or_else(|| {
            crate::Error::Discretization(format!("singular Nyström matrix on {n} nodes"))
        })?;
        if t.iter().any(|x| !x.is_finite()) {
            bail!(Discretization, "Nyström solution is not finite on {n} nodes");
        }
        let g = &h * &t;
        Ok(Self {
            spec: spec.clone(),
            after_jump: UniformTable::new(0.0, dx, t.iter().copied().collect()),
            continuation: UniformTable::new(0.0, dx, g.iter().copied().collect()),
        })
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn step(&self) -> f64 {
        self.after_jump.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.after_jump.nodes()
    }

    /// `T̃` at the grid nodes as solved.
    pub fn values(&self) -> &[f64] {
        self.after_jump.values()
    }

    /// `G` at the grid nodes.
    pub fn continuation(&self) -> &[f64] {
        self.continuation.values()
    }

    /// `T̃(x)` by Nyström interpolation.
    pub fn after_jump(&self, x: f64) -> Result<f64> {
        self.at(x, &self.spec.waiting)
    }

    /// Mean exit time when the first jump arrives after a wait drawn from `law`:
    /// `E[min(W, ϱ)] + ∫_0^ϱ w(l) G(x + vl) dl`.
    pub fn at(&self, x: f64, law: &dyn FirstWait) -> Result<f64> {
        self.spec.check_position(x)?;
        let v = self.spec.drift;
        if v == 0.0 {
            return Ok(law.mean() + self.continuation.eval(x));
        }
        let rho = self.spec.drift_time(x);
        if rho <= 0.0 {
            return Ok(0.0);
        }
        let g = &self.continuation;
        let est = GaussKronrod::with_tolerance(1e-12, 1e-11)
            .integrate(|l| law.pdf(l) * g.eval(x + v * l), 0.0, rho);
        Ok(law.integrated_survival(rho) + est.value)
    }

    /// Five-point one-sided derivative of `T̃` at `x = b`.
    pub fn boundary_derivative(&self) -> f64 {
        let t = self.values();
        let n = t.len();
        (25.0 * t[n - 1] - 48.0 * t[n - 2] + 36.0 * t[n - 3] - 16.0 * t[n - 4] + 3.0 * t[n - 5])
            / (12.0 * self.step())
    }
}
