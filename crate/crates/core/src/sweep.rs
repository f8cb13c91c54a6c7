//! Parameter sweeps over a one-dimensional grid at fixed slab width.

use std::fmt;
use std::str::FromStr;

use crate::casimir::{free_energy_antiperiodic, FreeEnergyBreakdown, Route, Slab};
use crate::error::{CasimirError, Result};
use crate::lattice::SumControl;
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepVariable {
    #[default]
    Xi,
    Beta,
    /// Temperature T = 1/β.
    T,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Xi => "xi",
            SweepVariable::Beta => "beta",
            SweepVariable::T => "T",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = CasimirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xi" => Ok(SweepVariable::Xi),
            "beta" => Ok(SweepVariable::Beta),
            "T" | "t" => Ok(SweepVariable::T),
            other => Err(CasimirError::invalid(
                "variable",
                format!("expected xi, beta or T, got '{other}'"),
            )),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

impl Spacing {
    pub fn as_str(self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    }
}

impl FromStr for Spacing {
    type Err = CasimirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(CasimirError::invalid(
                "spacing",
                format!("expected linear or log, got '{other}'"),
            )),
        }
    }
}

/// A one-dimensional sweep at fixed width `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub a: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite()) || self.from >= self.to {
            return Err(CasimirError::invalid(
                "from",
                format!("need from < to, got {} and {}", self.from, self.to),
            ));
        }
        if self.points < 2 {
            return Err(CasimirError::invalid(
                "points",
                format!("need at least 2, got {}", self.points),
            ));
        }
        if self.from <= 0.0 {
            let field = if self.spacing == Spacing::Log { "from" } else { "variable" };
            return Err(CasimirError::invalid(
                field,
                format!("{} must be positive, got {}", self.variable, self.from),
            ));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(CasimirError::invalid(
                "a",
                format!("must be positive and finite, got {}", self.a),
            ));
        }
        Ok(())
    }

    /// Grid values of the swept variable, endpoints included exactly.
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(grid(self.from, self.to, self.points, self.spacing))
    }

    /// The slab at each grid point.
    pub fn slabs(&self) -> Result<Vec<Slab>> {
        self.grid()?
            .into_iter()
            .map(|v| match self.variable {
                SweepVariable::Xi => Slab::from_xi(self.a, v),
                SweepVariable::Beta => Slab::new(self.a, v),
                SweepVariable::T => Slab::new(self.a, 1.0 / v),
            })
            .collect()
    }
}

/// `points` values from `from` to `to`, inclusive.
pub fn grid(from: f64, to: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    let last = points - 1;
    (0..points)
        .map(|i| {
            if i == 0 {
                return from;
            }
            if i == last {
                return to;
            }
            let t = i as f64 / last as f64;
            match spacing {
                Spacing::Linear => from + t * (to - from),
                Spacing::Log => (from.ln() + t * (to.ln() - from.ln())).exp(),
            }
        })
        .collect()
}

/// Rows computed before the first failure, and that failure if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<FreeEnergyBreakdown>,
    pub failure: Option<SweepFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub slab: Slab,
    pub error: CasimirError,
}

/// Evaluates every grid point (concurrently when `exec` allows) and returns
/// rows in grid order, stopping at the first point that fails.
pub fn run_sweep(
    spec: &SweepSpec,
    route: Route,
    ctl: &SumControl,
    exec: Execution,
) -> Result<SweepOutcome> {
    ctl.validate()?;
    let slabs = spec.slabs()?;
    let results = par::map_ordered(exec, &slabs, |s| free_energy_antiperiodic(s, route, ctl));
    let mut rows = Vec::with_capacity(slabs.len());
    for (slab, r) in slabs.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(error) => {
                return Ok(SweepOutcome {
                    rows,
                    failure: Some(SweepFailure { slab: *slab, error }),
                })
            }
        }
    }
    Ok(SweepOutcome {
        rows,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(points: usize) -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::Xi,
            from: 0.05,
            to: 20.0,
            points,
            spacing: Spacing::Log,
            a: 1.0,
        }
    }

    #[test]
    fn grid_endpoints_and_spacing() {
        let g = spec(25).grid().unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[24], 20.0);
        let r0 = g[1] / g[0];
        assert!(g.windows(2).all(|w| ((w[1] / w[0]) - r0).abs() < 1e-12));
        let lin = grid(1.0, 2.0, 5, Spacing::Linear);
        assert_eq!(lin, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn invalid_specs() {
        assert!(SweepSpec { points: 1, ..spec(2) }.validate().is_err());
        assert!(SweepSpec { from: 3.0, to: 2.0, ..spec(5) }.validate().is_err());
        assert!(SweepSpec { from: 0.0, ..spec(5) }.validate().is_err());
        assert!(SweepSpec { a: -1.0, ..spec(5) }.validate().is_err());
    }

    #[test]
    fn sweep_is_ordered_and_thermal_monotone() {
        let ctl = SumControl::default();
        let seq = run_sweep(&spec(25), Route::Decomposition, &ctl, Execution::Sequential).unwrap();
        let par = run_sweep(&spec(25), Route::Decomposition, &ctl, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert!(seq.failure.is_none());
        let th: Vec<f64> = seq.rows.iter().map(|r| r.thermal).collect();
        assert!(th.iter().all(|&t| t < 0.0));
        assert!(th.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn failure_stops_the_sweep() {
        let ctl = SumControl::naive(1e-10, 64);
        let out = run_sweep(&spec(6), Route::Decomposition, &ctl, Execution::Parallel).unwrap();
        let fail = out.failure.expect("naive sums cannot reach 1e-10 within 64 terms");
        assert!(fail.error.is_numerical());
        assert!(out.rows.len() < 6);
    }
}
