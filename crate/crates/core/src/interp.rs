//! Piecewise-cubic interpolation on uniform grids.

/// Values sampled on `start, start + step, …`; evaluated by local
/// four-point Lagrange interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformTable {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

impl UniformTable {
    /// Panics when fewer than four samples or a non-positive step are given.
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Self {
        assert!(values.len() >= 4, "cubic interpolation needs four samples");
        assert!(step > 0.0, "grid step must be positive");
        Self { start, step, values }
    }

    pub fn from_fn(start: f64, end: f64, points: usize, f: impl Fn(f64) -> f64) -> Self {
        let step = (end - start) / (points - 1) as f64;
        let values = (0..points).map(|i| f(start + i as f64 * step)).collect();
        Self::new(start, step, values)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.start + i as f64 * self.step)
    }

    /// Interpolated value; arguments outside the grid are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let u = ((x - self.start) / self.step).clamp(0.0, (n - 1) as f64);
        let cell = (u.floor() as usize).min(n - 2);
        let first = cell.saturating_sub(1).min(n - 4);
        let t = u - first as f64;
        let y = &self.values[first..first + 4];
        // Lagrange basis on nodes 0,1,2,3.
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        y[0] * l0 + y[1] * l1 + y[2] * l2 + y[3] * l3
    }
}
