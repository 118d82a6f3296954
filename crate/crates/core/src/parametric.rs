//! One-factor-at-a-time sweeps through a trained model and the
//! actual-vs-predicted export.
//!
//! The model's only output is product flow, so sweeps report predicted
//! product flow; any statement about extraction is read off that proxy.

use std::fmt;
use std::fmt::Write as _;

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::model::Model;

/// Consecutive differences within `±FLAT_TOLERANCE` m^3/hr count as flat.
pub const FLAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    variable: Column,
    grid: Vec<f64>,
    baseline: [f64; 4],
}

impl SweepSpec {
    /// `baseline` holds all four inputs in schema order; the swept entry is ignored.
    pub fn new(variable: Column, grid: Vec<f64>, baseline: [f64; 4]) -> Result<Self> {
        if !variable.is_input() {
            return Err(Error::InvalidConfig(format!(
                "`{variable}` is not an input variable"
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "sweep grid needs at least 2 points, got {}",
                grid.len()
            )));
        }
        if !grid.iter().all(|v| v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "sweep grid must be finite and strictly increasing".into(),
            ));
        }
        if !baseline.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("baseline values must be finite".into()));
        }
        Ok(SweepSpec {
            variable,
            grid,
            baseline,
        })
    }

    /// `steps` evenly spaced points from `from` to `to` inclusive.
    pub fn linspace(
        variable: Column,
        from: f64,
        to: f64,
        steps: usize,
        baseline: [f64; 4],
    ) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "sweep needs at least 2 steps, got {steps}"
            )));
        }
        let last = (steps - 1) as f64;
        let grid = (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    to
                } else {
                    from + (to - from) * i as f64 / last
                }
            })
            .collect();
        SweepSpec::new(variable, grid, baseline)
    }

    pub fn variable(&self) -> Column {
        self.variable
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn baseline(&self) -> [f64; 4] {
        self.baseline
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Non-decreasing; includes the all-flat case.
    Increasing,
    Decreasing,
    NonMonotone,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
            Direction::NonMonotone => "non-monotone",
        })
    }
}

/// A step against the reference direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    /// Grid index of the later point of the offending step.
    pub index: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trend {
    pub direction: Direction,
    /// The sense violations are counted against. Equals `direction` unless
    /// the series is non-monotone, where it is the sense with fewer
    /// violations (increasing on a tie).
    pub reference: Direction,
    pub violations: Vec<Violation>,
}

impl Trend {
    pub fn violation_count(&self) -> usize {
        self.violations.len()
    }

    pub fn max_violation(&self) -> f64 {
        self.violations.iter().map(|v| v.magnitude).fold(0.0, f64::max)
    }
}

/// Classifies a series from its consecutive differences.
pub fn classify_trend(values: &[f64]) -> Trend {
    let mut falls = Vec::new();
    let mut rises = Vec::new();
    for (i, w) in values.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d < -FLAT_TOLERANCE {
            falls.push(Violation {
                index: i + 1,
                magnitude: -d,
            });
        } else if d > FLAT_TOLERANCE {
            rises.push(Violation {
                index: i + 1,
                magnitude: d,
            });
        }
    }
    let (direction, reference, violations) = if falls.is_empty() {
        (Direction::Increasing, Direction::Increasing, falls)
    } else if rises.is_empty() {
        (Direction::Decreasing, Direction::Decreasing, rises)
    } else if falls.len() <= rises.len() {
        (Direction::NonMonotone, Direction::Increasing, falls)
    } else {
        (Direction::NonMonotone, Direction::Decreasing, rises)
    };
    Trend {
        direction,
        reference,
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// m^3/hr.
    pub predicted_flow: f64,
    /// Some normalized input fell outside the fitted band.
    pub extrapolated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: Column,
    pub rows: Vec<SweepRow>,
    pub trend: Trend,
}

impl SweepResult {
    pub fn predicted(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.predicted_flow).collect()
    }

    pub fn any_extrapolated(&self) -> bool {
        self.rows.iter().any(|r| r.extrapolated)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},predicted_flow_m3hr\n", self.variable.short_name());
        for r in &self.rows {
            let _ = writeln!(out, "{},{}", r.value, r.predicted_flow);
        }
        let _ = writeln!(
            out,
            "# trend: {}, violations: {}",
            self.trend.direction,
            self.trend.violation_count()
        );
        out
    }
}

pub fn monotonicity_report(result: &SweepResult) -> Result<Trend> {
    if result.rows.is_empty() {
        return Err(Error::InvalidConfig("empty sweep result".into()));
    }
    Ok(classify_trend(&result.predicted()))
}

pub fn sweep(model: &Model, spec: &SweepSpec) -> Result<SweepResult> {
    let norm = model.normalization();
    let (lo, hi) = norm.bounds();
    let slot = spec.variable.index();
    let rows = spec
        .grid
        .iter()
        .map(|&value| {
            let mut point = spec.baseline;
            point[slot] = value;
            let extrapolated = norm
                .normalize_inputs(&point)
                .iter()
                .any(|z| *z < lo - 1e-12 || *z > hi + 1e-12);
            Ok(SweepRow {
                value,
                predicted_flow: model.predict(&point)?,
                extrapolated,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let trend = classify_trend(&rows.iter().map(|r| r.predicted_flow).collect::<Vec<_>>());
    Ok(SweepResult {
        variable: spec.variable,
        rows,
        trend,
    })
}

/// `(actual, predicted)` flow pairs in dataset order.
pub fn scatter_export(model: &Model, validation: &Dataset) -> Result<Vec<(f64, f64)>> {
    if validation.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let set = model.evaluate(validation)?;
    Ok(set
        .denormalized_desired
        .as_slice()
        .iter()
        .copied()
        .zip(set.denormalized_outputs.as_slice().iter().copied())
        .collect())
}

pub fn scatter_csv(pairs: &[(f64, f64)]) -> String {
    let mut out = String::from("actual,predicted\n");
    for (a, p) in pairs {
        let _ = writeln!(out, "{a},{p}");
    }
    out
}
