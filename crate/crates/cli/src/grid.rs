//! `lo:hi:steps` ranges.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log10,
}

/// A sweep range as typed on the command line, before units are applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:steps, got '{s}'"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"));
        let steps = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("'{}': {e}", parts[2]))?;
        Ok(Range {
            lo: num(parts[0])?,
            hi: num(parts[1])?,
            steps,
        })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.steps)
    }
}

impl Range {
    /// Grid points. A single step yields `lo`.
    pub fn points(&self, spacing: Spacing) -> Result<Vec<f64>> {
        let Range { lo, hi, steps } = *self;
        if steps == 0 {
            return Err(CliError::usage("range needs at least one step"));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(CliError::usage(format!(
                "range bounds must be finite: {self}"
            )));
        }
        if steps > 1 && !(lo < hi) {
            return Err(CliError::usage(format!("range needs lo < hi: {self}")));
        }
        if spacing == Spacing::Log10 && lo <= 0.0 {
            return Err(CliError::usage(format!("log range needs lo > 0: {self}")));
        }
        if steps == 1 {
            return Ok(vec![lo]);
        }
        let n = (steps - 1) as f64;
        let pts = match spacing {
            Spacing::Linear => (0..steps).map(|k| lo + (hi - lo) * k as f64 / n).collect(),
            Spacing::Log10 => {
                let (a, b) = (lo.log10(), hi.log10());
                (0..steps)
                    .map(|k| match k {
                        0 => lo,
                        k if k == steps - 1 => hi,
                        k => 10f64.powf(a + (b - a) * k as f64 / n),
                    })
                    .collect()
            }
        };
        Ok(pts)
    }
}
