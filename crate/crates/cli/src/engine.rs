//! Dispatch of (regime, method, r) to the solvers of `ctrw-core`.

use ctrw_core::continuum::{mean_exit_continuum, mean_exit_continuum_via_inversion};
use ctrw_core::exit::adverse::{ruin_mean_time, AdverseClosedForm};
use ctrw_core::exit::favorable::{self, FavorableClosedForm};
use ctrw_core::exit::twosided::RuinJump;
use ctrw_core::exit::{mean_exit_from_after_jump, ExitTable, FirstWait, MeanTime};
use ctrw_core::laplace::{invert, LaplaceFunction, RationalInverse};
use ctrw_core::montecarlo::{simulate_exit, SimulationConfig, Start};
use ctrw_core::{ExcessLifeLaw, JumpModel, ObservationTime, ProcessSpec};

use crate::config::{Method, MethodChoice, RegimeKind, RunConfig};
use crate::error::{usage, CliError};
use crate::table::{Row, Sampling};

/// A computed row plus what the CSV cannot carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Computed {
    pub row: Row,
    /// Bias bound for barrier-truncated Monte Carlo rows.
    pub allowance: f64,
    pub truncated_fraction: f64,
}

enum Model {
    Walk(ProcessSpec),
    Continuum,
}

/// Solvers built once per run and shared by every grid point.
pub struct Engine {
    config: RunConfig,
    model: Model,
    favorable: Option<FavorableClosedForm>,
    adverse: Option<AdverseClosedForm>,
    ruin_jump: Option<(RuinJump, RationalInverse)>,
    table: Option<ExitTable>,
}

fn mean_abs_jump(jumps: &JumpModel) -> Option<f64> {
    jumps.mean().finite().ok().map(f64::abs).filter(|m| *m > 0.0)
}

impl Engine {
    pub fn new(config: &RunConfig) -> Result<Self, CliError> {
        if config.x.is_empty() || config.r.is_empty() {
            return Err(usage("x and r grids must be non-empty"));
        }
        if config.r.iter().any(|r| !(*r >= 0.0)) {
            return Err(usage("observation times must be ≥ 0"));
        }
        let model = match config.regime {
            RegimeKind::Continuum => {
                for &x in &config.x {
                    config.continuum(x)?;
                }
                Model::Continuum
            }
            _ => Model::Walk(config.process()?),
        };
        let mut engine = Self {
            config: config.clone(),
            model,
            favorable: None,
            adverse: None,
            ruin_jump: None,
            table: None,
        };
        if let Model::Walk(spec) = &engine.model {
            engine.favorable = FavorableClosedForm::from_spec(spec).filter(|_| spec.drift > 0.0);
            engine.adverse = AdverseClosedForm::from_spec(spec).and_then(Result::ok);
            engine.ruin_jump = match RuinJump::from_spec(spec) {
                Some(rj) if config.regime == RegimeKind::TwoSided => Some((rj, rj.inverse()?)),
                _ => None,
            };
        }
        let methods = engine.selected_methods()?;
        if methods.contains(&Method::IntegralEquation) {
            if let Model::Walk(spec) = &engine.model {
                engine.table = Some(ExitTable::solve(spec, config.points)?);
            }
        }
        Ok(engine)
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Why `method` cannot produce a value at observation time `r`, if it cannot.
    pub fn unavailable(&self, method: Method, r: f64) -> Option<String> {
        let at_jump = r == 0.0;
        let spec = match &self.model {
            Model::Continuum => {
                return match method {
                    _ if !at_jump => Some("the continuum mean is defined at a jump instant only (r = 0)".into()),
                    Method::ClosedForm | Method::TransformInversion => None,
                    _ => Some(format!("{method} is not implemented for the continuum limit")),
                };
            }
            Model::Walk(spec) => spec,
        };
        let ruin = !spec.boundary.is_finite();
        if ruin {
            return match method {
                _ if self.config.regime != RegimeKind::Adverse => Some("b = ∞ applies to the adverse regime only".into()),
                _ if !at_jump => Some("b = ∞ runs are defined at a jump instant only (r = 0)".into()),
                Method::ClosedForm if spec.erlang2_exponential().is_none() => {
                    Some("the ruin mean time needs Erlang-2 sojourns and exponential jumps".into())
                }
                Method::ClosedForm => None,
                Method::MonteCarlo if self.barrier().is_none() => Some("b = ∞ needs a finite barrier".into()),
                Method::MonteCarlo => None,
                _ => Some(format!("{method} needs a finite boundary")),
            };
        }
        match method {
            Method::MonteCarlo if !r.is_finite() => Some("simulation needs a finite r".into()),
            Method::MonteCarlo | Method::IntegralEquation => None,
            Method::ClosedForm => match self.config.regime {
                RegimeKind::Favorable if spec.drift == 0.0 => {
                    (!matches!(spec.jumps, JumpModel::ExponentialPositive { .. }))
                        .then(|| "the drift-less closed form needs exponential jumps".into())
                }
                RegimeKind::Favorable => self
                    .favorable
                    .is_none()
                    .then(|| "closed form needs Erlang-2 sojourns and exponential jumps".into()),
                RegimeKind::Adverse => self
                    .adverse
                    .is_none()
                    .then(|| "closed form needs Erlang-2 sojourns, exponential jumps and λ ≠ 2γv".into()),
                RegimeKind::TwoSided => self
                    .ruin_jump
                    .is_none()
                    .then(|| "closed form needs the ruin-jump specialisation".into()),
                RegimeKind::Continuum => unreachable!(),
            },
            Method::TransformInversion => match self.config.regime {
                RegimeKind::Favorable if spec.drift == 0.0 => Some("transform routes need v > 0".into()),
                RegimeKind::Favorable => {
                    let closed_excess = matches!(spec.waiting.erlang_parameters(), Some((_, 1 | 2)));
                    (!(at_jump || closed_excess || r == f64::INFINITY))
                        .then(|| "the excess-life transform is closed only for exponential and Erlang-2 sojourns".into())
                }
                RegimeKind::TwoSided if self.ruin_jump.is_none() => {
                    Some("transform inversion needs the ruin-jump specialisation".into())
                }
                RegimeKind::TwoSided => (!at_jump).then(|| "two-sided inversion is at a jump instant only".into()),
                _ => Some(format!("{method} is not available in the {} regime", self.config.regime)),
            },
        }
    }

    pub fn applicable(&self, r: f64) -> Vec<Method> {
        Method::ALL
            .into_iter()
            .filter(|&m| self.unavailable(m, r).is_none())
            .collect()
    }

    /// The methods the run needs, after checking each is usable at every `r`.
    pub fn selected_methods(&self) -> Result<Vec<Method>, CliError> {
        match self.config.method {
            MethodChoice::One(m) => {
                for &r in &self.config.r {
                    if let Some(why) = self.unavailable(m, r) {
                        return Err(usage(format!("{m} at r = {r}: {why}")));
                    }
                }
                Ok(vec![m])
            }
            MethodChoice::All => {
                let mut all = Vec::new();
                for &r in &self.config.r {
                    let here = self.applicable(r);
                    if here.len() < 2 {
                        return Err(usage(format!(
                            "method all needs two applicable methods at r = {r}, found {}",
                            here.len()
                        )));
                    }
                    all.extend(here);
                }
                all.sort();
                all.dedup();
                Ok(all)
            }
        }
    }

    fn barrier(&self) -> Option<f64> {
        let Model::Walk(spec) = &self.model else {
            return None;
        };
        self.config
            .barrier
            .or_else(|| mean_abs_jump(&spec.jumps).map(|m| 200.0 * m))
    }

    /// Every row of the run, ordered by `r`, then `x`, then method.
    pub fn run(&self) -> Result<Vec<Computed>, CliError> {
        let methods = self.selected_methods()?;
        let mut rows = Vec::new();
        let nx = self.config.x.len();
        for (ir, &r) in self.config.r.iter().enumerate() {
            for (ix, &x) in self.config.x.iter().enumerate() {
                let seed = self.config.seed.wrapping_add((ir * nx + ix) as u64);
                for &m in &methods {
                    if self.unavailable(m, r).is_some() {
                        continue;
                    }
                    rows.push(self.point(m, x, r, seed)?);
                }
            }
        }
        Ok(rows)
    }

    fn analytic(&self, value: f64, method: Method, x: f64, r: f64) -> Computed {
        Computed {
            row: Row {
                x,
                r,
                method,
                value,
                sampling: None,
            },
            allowance: 0.0,
            truncated_fraction: 0.0,
        }
    }

    /// One value; `seed` is used by simulation only.
    pub fn point(&self, method: Method, x: f64, r: f64, seed: u64) -> Result<Computed, CliError> {
        if let Some(why) = self.unavailable(method, r) {
            return Err(usage(format!("{method} at r = {r}: {why}")));
        }
        let time = ObservationTime::new(r)?;
        let spec = match &self.model {
            Model::Continuum => {
                let c = self.config.continuum(x)?;
                let value = match method {
                    Method::ClosedForm => mean_exit_continuum(&c),
                    _ => mean_exit_continuum_via_inversion(&c, self.config.inversion_method())?,
                };
                return Ok(self.analytic(value, method, x, r));
            }
            Model::Walk(spec) => spec,
        };
        if method == Method::MonteCarlo {
            return self.simulate(spec, x, r, seed);
        }
        if !spec.boundary.is_finite() {
            let value = match ruin_mean_time(spec, x)? {
                MeanTime::Finite(t) => t,
                MeanTime::Infinite { .. } => f64::INFINITY,
            };
            return Ok(self.analytic(value, method, x, r));
        }
        spec.check_position(x)?;
        let law: Box<dyn FirstWait> = if time.is_jump_instant() {
            Box::new(spec.waiting.clone())
        } else {
            Box::new(ExcessLifeLaw::new(&spec.waiting, time)?)
        };
        let value = match (method, self.config.regime) {
            (Method::IntegralEquation, _) => self.table.as_ref().expect("table solved for this method").at(x, &*law)?,
            (Method::ClosedForm, RegimeKind::Favorable) => favorable::mean_exit_at(spec, x, time)?,
            (Method::ClosedForm, RegimeKind::Adverse) => {
                let closed = self.adverse.as_ref().expect("checked applicable");
                if time.is_jump_instant() {
                    closed.eval(x)?
                } else {
                    let f = |z: f64| closed.eval(z).unwrap_or(f64::NAN);
                    mean_exit_from_after_jump(spec, x, &*law, &f)?
                }
            }
            (Method::ClosedForm, RegimeKind::TwoSided) => {
                let (_, inverse) = self.ruin_jump.as_ref().expect("checked applicable");
                let b = spec.boundary;
                if time.is_jump_instant() {
                    inverse.eval(b - x)?
                } else {
                    let f = |z: f64| inverse.eval(b - z).unwrap_or(f64::NAN);
                    mean_exit_from_after_jump(spec, x, &*law, &f)?
                }
            }
            (Method::TransformInversion, RegimeKind::Favorable) => {
                let inversion = self.config.inversion_method();
                if time.is_jump_instant() {
                    favorable::mean_exit_after_jump_inversion(spec, x, inversion)?
                } else {
                    favorable::mean_exit_at_inversion(spec, x, time, inversion)?
                }
            }
            (Method::TransformInversion, RegimeKind::TwoSided) => {
                let (rj, _) = *self.ruin_jump.as_ref().expect("checked applicable");
                let y = spec.boundary - x;
                if y == 0.0 {
                    0.0
                } else {
                    let f = LaplaceFunction::new(0.0, move |s| rj.transform(s));
                    invert(&f, y, self.config.inversion_method())?
                }
            }
            _ => unreachable!("filtered by unavailable"),
        };
        if !value.is_finite() {
            return Err(CliError::Numerical(format!("{method} produced {value} at x = {x}, r = {r}")));
        }
        Ok(self.analytic(value, method, x, r))
    }

    fn simulate(&self, spec: &ProcessSpec, x: f64, r: f64, seed: u64) -> Result<Computed, CliError> {
        let mut sim = SimulationConfig::new(self.config.paths, seed);
        if let Some(w) = self.config.workers {
            sim = sim.with_workers(w);
        }
        let mut residual = 0.0;
        if !spec.boundary.is_finite() {
            let barrier = self.barrier().expect("checked applicable");
            sim = sim.with_truncation(barrier);
            // A truncated path misses the mean ruin time from the barrier.
            residual = ruin_mean_time(spec, barrier).map_or(f64::INFINITY, MeanTime::value);
        }
        let start = if r == 0.0 { Start::AfterJump } else { Start::At(r) };
        let est = simulate_exit(spec, x, start, &sim)?;
        let truncated = est.truncated_fraction();
        Ok(Computed {
            row: Row {
                x,
                r,
                method: Method::MonteCarlo,
                value: est.mean,
                sampling: Some(Sampling {
                    stderr: est.stderr,
                    paths: est.paths,
                    seed,
                }),
            },
            allowance: if truncated > 0.0 { truncated * residual } else { 0.0 },
            truncated_fraction: truncated,
        })
    }
}
