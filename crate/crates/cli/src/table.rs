//! The `x,r,method,value,stderr,paths,seed` CSV schema.

use std::fmt::Write as _;

use crate::config::Method;
use crate::error::{usage, CliError};

pub const HEADER: &str = "x,r,method,value,stderr,paths,seed";

/// Monte Carlo bookkeeping of one row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub stderr: f64,
    pub paths: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub r: f64,
    pub method: Method,
    pub value: f64,
    pub sampling: Option<Sampling>,
}

/// `value` to 12 significant digits, fixed or scientific like `%.12g`.
pub fn format_sig(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{value:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{value:.*}", (11 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for row in rows {
        let (stderr, paths, seed) = match row.sampling {
            Some(s) => (format_sig(s.stderr), s.paths.to_string(), s.seed.to_string()),
            None => Default::default(),
        };
        writeln!(
            out,
            "{},{},{},{},{stderr},{paths},{seed}",
            format_sig(row.x),
            format_sig(row.r),
            row.method,
            format_sig(row.value)
        )
        .expect("write to string");
    }
    out
}

pub fn from_csv(text: &str) -> Result<Vec<Row>, CliError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(usage(format!("expected CSV header '{HEADER}'"))),
    }
    lines
        .map(|(n, line)| parse_row(line).map_err(|e| usage(format!("line {}: {e}", n + 1))))
        .collect()
}

fn parse_row(line: &str) -> Result<Row, CliError> {
    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
    let [x, r, method, value, stderr, paths, seed] = cols.as_slice() else {
        return Err(usage(format!("expected 7 columns, found {}", cols.len())));
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("not a number: '{s}'")));
    let sampling = if stderr.is_empty() && paths.is_empty() && seed.is_empty() {
        None
    } else {
        Some(Sampling {
            stderr: num(stderr)?,
            paths: paths.parse().map_err(|_| usage(format!("bad path count '{paths}'")))?,
            seed: seed.parse().map_err(|_| usage(format!("bad seed '{seed}'")))?,
        })
    };
    Ok(Row {
        x: num(x)?,
        r: num(r)?,
        method: method.parse()?,
        value: num(value)?,
        sampling,
    })
}
