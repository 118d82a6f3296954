//! Performance indices: %Error on denormalized values, MSE on normalized
//! values, and the per-exemplar relative-error summary.
//!
//! Matrices are `exemplars x elements` (rows are exemplars). Sums run over
//! exactly `N' * P` terms.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Mean absolute relative deviation in percent:
/// `100 / (N' P) * sum_j sum_i |dy_ij - dd_ij| / dd_ij`.
///
/// The denominator is the signed desired value, so targets are expected to
/// be positive. A zero target is an error naming the exemplar (row index).
pub fn percent_error(dy: &Matrix, dd: &Matrix) -> Result<f64> {
    dy.ensure_same_shape(dd)?;
    check_nonempty(dd)?;
    check_nonzero(dd)?;
    let (n, p) = dd.shape();
    let mut sum = 0.0;
    for j in 0..p {
        for i in 0..n {
            sum += (dy[(i, j)] - dd[(i, j)]).abs() / dd[(i, j)];
        }
    }
    Ok(100.0 / (n * p) as f64 * sum)
}

/// `sum_j sum_i (d_ij - y_ij)^2 / (N' P)`.
pub fn mse(y: &Matrix, d: &Matrix) -> Result<f64> {
    y.ensure_same_shape(d)?;
    check_nonempty(d)?;
    let (n, p) = d.shape();
    let mut sum = 0.0;
    for j in 0..p {
        for i in 0..n {
            let e = d[(i, j)] - y[(i, j)];
            sum += e * e;
        }
    }
    Ok(sum / (n * p) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrors {
    /// Mean over exemplars of the per-exemplar relative error, in percent.
    pub average_pct: f64,
    /// Largest per-exemplar relative error, in percent.
    pub maximum_pct: f64,
}

/// Per-exemplar relative error `r_i = 100 * |dy_i - dd_i| / dd_i`, averaged
/// over output elements first when there is more than one.
pub fn relative_errors(dy: &Matrix, dd: &Matrix) -> Result<RelativeErrors> {
    dy.ensure_same_shape(dd)?;
    check_nonempty(dd)?;
    check_nonzero(dd)?;
    let (n, p) = dd.shape();
    let mut total = 0.0;
    let mut maximum = f64::NEG_INFINITY;
    for i in 0..n {
        let r: f64 = (0..p)
            .map(|j| (dy[(i, j)] - dd[(i, j)]).abs() / dd[(i, j)])
            .sum::<f64>()
            * 100.0
            / p as f64;
        total += r;
        maximum = maximum.max(r);
    }
    Ok(RelativeErrors {
        average_pct: total / n as f64,
        maximum_pct: maximum,
    })
}

fn check_nonempty(m: &Matrix) -> Result<()> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

fn check_nonzero(dd: &Matrix) -> Result<()> {
    for (i, row) in dd.iter_rows().enumerate() {
        if let Some(j) = row.iter().position(|&v| v == 0.0) {
            return Err(Error::DivisionByZero {
                exemplar: i,
                element: j,
            });
        }
    }
    Ok(())
}

/// Network outputs and targets in both normalized and engineering units.
#[derive(Debug, Clone)]
pub struct PredictionSet {
    pub normalized_outputs: Matrix,
    pub normalized_desired: Matrix,
    pub denormalized_outputs: Matrix,
    pub denormalized_desired: Matrix,
}

impl PredictionSet {
    pub fn new(
        normalized_outputs: Matrix,
        normalized_desired: Matrix,
        denormalized_outputs: Matrix,
        denormalized_desired: Matrix,
    ) -> Result<Self> {
        normalized_outputs.ensure_same_shape(&normalized_desired)?;
        normalized_outputs.ensure_same_shape(&denormalized_outputs)?;
        normalized_outputs.ensure_same_shape(&denormalized_desired)?;
        check_nonempty(&normalized_outputs)?;
        Ok(PredictionSet {
            normalized_outputs,
            normalized_desired,
            denormalized_outputs,
            denormalized_desired,
        })
    }

    pub fn exemplars(&self) -> usize {
        self.normalized_outputs.rows()
    }

    pub fn report(&self) -> Result<MetricsReport> {
        let rel = relative_errors(&self.denormalized_outputs, &self.denormalized_desired)?;
        Ok(MetricsReport {
            exemplars: self.exemplars(),
            mse: mse(&self.normalized_outputs, &self.normalized_desired)?,
            percent_error: percent_error(&self.denormalized_outputs, &self.denormalized_desired)?,
            average_relative_error_pct: rel.average_pct,
            maximum_relative_error_pct: rel.maximum_pct,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub exemplars: usize,
    /// Normalized units.
    pub mse: f64,
    pub percent_error: f64,
    pub average_relative_error_pct: f64,
    pub maximum_relative_error_pct: f64,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str =
        "label,exemplars,mse,pct_error,avg_relative_error_pct,max_relative_error_pct";

    /// `key = value` block; keys are prefixed with `label`.
    pub fn to_text(&self, label: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{label}.exemplars = {}", self.exemplars);
        let _ = writeln!(out, "{label}.mse = {}", self.mse);
        let _ = writeln!(out, "{label}.pct_error = {}", self.percent_error);
        let _ = writeln!(
            out,
            "{label}.avg_relative_error_pct = {}",
            self.average_relative_error_pct
        );
        let _ = writeln!(
            out,
            "{label}.max_relative_error_pct = {}",
            self.maximum_relative_error_pct
        );
        out
    }

    pub fn to_csv_row(&self, label: &str) -> String {
        format!(
            "{label},{},{},{},{},{}",
            self.exemplars,
            self.mse,
            self.percent_error,
            self.average_relative_error_pct,
            self.maximum_relative_error_pct
        )
    }
}
