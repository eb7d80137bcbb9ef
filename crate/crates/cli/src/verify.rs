//! Qualitative shape checks on computed curves.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::config::Method;
use crate::error::{usage, CliError};
use crate::table::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// Every curve with `r > 0` peaks strictly inside the grid.
    InteriorMaximum,
    /// The largest-`r` curve lies below the `r = 0` curve at the first grid
    /// point and above it at the last point short of `b`.
    Crossover,
    /// Every curve is nonincreasing in `x`.
    Monotone,
    /// The position of the maximum does not decrease with `r`.
    ArgmaxNondecreasing,
}

impl FromStr for Property {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "interior-maximum" => Self::InteriorMaximum,
            "crossover" => Self::Crossover,
            "monotone" => Self::Monotone,
            "argmax-nondecreasing" => Self::ArgmaxNondecreasing,
            _ => {
                return Err(usage(format!(
                    "unknown property '{s}', expected interior-maximum, crossover, monotone or argmax-nondecreasing"
                )))
            }
        })
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InteriorMaximum => "interior-maximum",
            Self::Crossover => "crossover",
            Self::Monotone => "monotone",
            Self::ArgmaxNondecreasing => "argmax-nondecreasing",
        })
    }
}

/// One `(method, r)` curve sorted by `x`.
#[derive(Debug, Clone)]
struct Curve {
    r: f64,
    x: Vec<f64>,
    value: Vec<f64>,
    stderr: Vec<f64>,
}

impl Curve {
    fn argmax(&self) -> usize {
        (0..self.value.len())
            .max_by(|&i, &j| self.value[i].total_cmp(&self.value[j]))
            .expect("non-empty curve")
    }

    /// Resolution for comparing two values of the curve.
    fn slack(&self, i: usize, j: usize) -> f64 {
        let scale = self.value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        1e-10 * scale + 3.0 * self.stderr[i].hypot(self.stderr[j])
    }
}

/// Outcome of a check, with one line per curve examined.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub property: Property,
    pub holds: bool,
    pub lines: Vec<String>,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        write!(f, "{}: {}", self.property, self.holds)
    }
}

fn curves(rows: &[Row], method: Method) -> Result<Vec<Curve>, CliError> {
    let mut by_r: BTreeMap<u64, Vec<&Row>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.method == method) {
        by_r.entry(row.r.to_bits()).or_default().push(row);
    }
    let mut out: Vec<Curve> = by_r
        .into_values()
        .map(|mut pts| {
            pts.sort_by(|a, b| a.x.total_cmp(&b.x));
            Curve {
                r: pts[0].r,
                x: pts.iter().map(|p| p.x).collect(),
                value: pts.iter().map(|p| p.value).collect(),
                stderr: pts.iter().map(|p| p.sampling.map_or(0.0, |s| s.stderr)).collect(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.r.total_cmp(&b.r));
    for c in &out {
        if c.x.windows(2).any(|w| w[0] == w[1]) {
            return Err(usage(format!("duplicate x for {method} at r = {}", c.r)));
        }
    }
    Ok(out)
}

fn check_curves(property: Property, method: Method, curves: &[Curve]) -> (bool, Vec<String>) {
    let mut lines = Vec::new();
    let mut holds = true;
    let mut note = |ok: bool, text: String| {
        holds &= ok;
        lines.push(format!("{method}: {text}: {ok}"));
    };
    match property {
        Property::Monotone => {
            for c in curves {
                let bad = (1..c.x.len()).find(|&i| c.value[i] > c.value[i - 1] + c.slack(i, i - 1));
                match bad {
                    None => note(true, format!("r = {} nonincreasing", c.r)),
                    Some(i) => note(false, format!("r = {} rises at x = {}", c.r, c.x[i])),
                }
            }
        }
        Property::InteriorMaximum => {
            let positive: Vec<&Curve> = curves.iter().filter(|c| c.r > 0.0).collect();
            if positive.is_empty() {
                note(false, "no curve with r > 0".into());
            }
            for c in positive {
                let k = c.argmax();
                let last = c.x.len() - 1;
                let ok = k > 0
                    && k < last
                    && c.value[k] > c.value[0] + c.slack(k, 0)
                    && c.value[k] > c.value[last] + c.slack(k, last);
                note(ok, format!("r = {} peaks at x = {}", c.r, c.x[k]));
            }
        }
        Property::Crossover => {
            let base = curves.iter().find(|c| c.r == 0.0);
            let top = curves.iter().rfind(|c| c.r > 0.0);
            match (base, top) {
                (Some(base), Some(top)) if base.x == top.x => {
                    // Last grid point where the r = 0 curve has not yet vanished.
                    let scale = base.value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    let near_b = (0..base.x.len()).rev().find(|&i| base.value[i] > 1e-9 * scale);
                    let diff = |i: usize| top.value[i] - base.value[i];
                    let tol = |i: usize| {
                        let scale = base.value[i].abs().max(top.value[i].abs());
                        1e-10 * scale + 3.0 * base.stderr[i].hypot(top.stderr[i])
                    };
                    match near_b {
                        Some(j) if j > 0 => {
                            let (d0, d1) = (diff(0), diff(j));
                            note(
                                d0 < -tol(0) && d1 > tol(j),
                                format!(
                                    "r = {} minus r = 0 is {d0:.6e} at x = {} and {d1:.6e} at x = {}",
                                    top.r, base.x[0], base.x[j]
                                ),
                            );
                        }
                        _ => note(false, "r = 0 curve vanishes on the grid".into()),
                    }
                }
                (Some(_), Some(_)) => note(false, "curves use different x grids".into()),
                _ => note(false, "need an r = 0 curve and one with r > 0".into()),
            }
        }
        Property::ArgmaxNondecreasing => {
            let peaks: Vec<(f64, f64)> = curves.iter().map(|c| (c.r, c.x[c.argmax()])).collect();
            if peaks.len() < 2 {
                note(false, "need at least two curves".into());
            }
            for w in peaks.windows(2) {
                note(w[1].1 >= w[0].1, format!("argmax {} at r = {} then {} at r = {}", w[0].1, w[0].0, w[1].1, w[1].0));
            }
        }
    }
    (holds, lines)
}

/// Checks `property` on the curves of `method`, or of every method present.
pub fn verify(rows: &[Row], property: Property, method: Option<Method>) -> Result<Report, CliError> {
    let mut methods: Vec<Method> = match method {
        Some(m) => vec![m],
        None => rows.iter().map(|r| r.method).collect(),
    };
    methods.sort();
    methods.dedup();
    let mut report = Report {
        property,
        holds: true,
        lines: Vec::new(),
    };
    for m in methods {
        let cs = curves(rows, m)?;
        if cs.is_empty() {
            return Err(usage(format!("no {m} rows in the table")));
        }
        let (ok, lines) = check_curves(property, m, &cs);
        report.holds &= ok;
        report.lines.extend(lines);
    }
    if report.lines.is_empty() {
        return Err(usage("the table has no rows"));
    }
    Ok(report)
}
