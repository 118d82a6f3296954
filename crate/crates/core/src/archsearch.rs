//! Hidden-layer size selection.
//!
//! Every candidate is trained on the same split and scored on validation
//! data. The winner minimizes validation MSE, then validation %Error, then
//! hidden-node count. Candidates that fail to train rank last.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::data::{Column, Dataset, NormalizationSpec, NormalizedSet};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics;
use crate::net::Network;
use crate::training::{predict_set, set_mse, train, TrainConfig};

/// Scores of one trained candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateScore {
    pub train_mse: f64,
    pub val_mse: f64,
    pub val_pct_error: f64,
}

/// Trains and scores one candidate size. Implementations must be pure in
/// `(hidden_nodes, seed)` for the report to be reproducible.
pub trait CandidateEvaluator: Sync {
    fn evaluate(&self, hidden_nodes: usize, seed: u64) -> Result<CandidateScore>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchSearchRow {
    pub hidden_nodes: usize,
    pub train_mse: f64,
    pub val_mse: f64,
    pub val_pct_error: f64,
    pub seed: u64,
    /// Set when training failed; the metrics are then infinite.
    pub failure: Option<String>,
}

impl ArchSearchRow {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchSearchReport {
    rows: Vec<ArchSearchRow>,
    selected: usize,
}

impl ArchSearchReport {
    pub const CSV_HEADER: &'static str = "hidden_nodes,train_mse,val_mse,val_pct_error";

    /// Rows in ascending hidden-node order.
    pub fn rows(&self) -> &[ArchSearchRow] {
        &self.rows
    }

    /// Hidden-node count of the winner.
    pub fn selected(&self) -> usize {
        self.selected
    }

    pub fn selected_row(&self) -> &ArchSearchRow {
        self.rows
            .iter()
            .find(|r| r.hidden_nodes == self.selected)
            .expect("selected row is always present")
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.hidden_nodes, r.train_mse, r.val_mse, r.val_pct_error
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>8}  {:>14}  {:>14}  {:>12}",
            "hidden", "train MSE", "val MSE", "val % Error"
        );
        for r in &self.rows {
            let mark = if r.hidden_nodes == self.selected { " *" } else { "" };
            let note = r
                .failure
                .as_deref()
                .map(|f| format!("  (failed: {f})"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:>8}  {:>14.6}  {:>14.6}  {:>12.4}{mark}{note}",
                r.hidden_nodes, r.train_mse, r.val_mse, r.val_pct_error
            );
        }
        let _ = writeln!(out, "selected hidden nodes: {}", self.selected);
        out
    }
}

/// Per-candidate seed: `base + hidden_nodes`.
pub fn candidate_seed(base: u64, hidden_nodes: usize) -> u64 {
    base.wrapping_add(hidden_nodes as u64)
}

fn rank(a: &ArchSearchRow, b: &ArchSearchRow) -> Ordering {
    a.failed()
        .cmp(&b.failed())
        .then(a.val_mse.total_cmp(&b.val_mse))
        .then(a.val_pct_error.total_cmp(&b.val_pct_error))
        .then(a.hidden_nodes.cmp(&b.hidden_nodes))
}

/// Runs `evaluator` for each candidate (in parallel) and assembles the report.
pub fn search_with<E: CandidateEvaluator>(
    candidates: &[usize],
    base_seed: u64,
    evaluator: &E,
) -> Result<ArchSearchReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("no candidate sizes given".into()));
    }
    if candidates.contains(&0) {
        return Err(Error::InvalidConfig("candidate sizes must be >= 1".into()));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig(format!("candidate {} listed twice", w[0])));
    }

    let rows: Vec<ArchSearchRow> = sorted
        .par_iter()
        .map(|&h| {
            let seed = candidate_seed(base_seed, h);
            let outcome = match evaluator.evaluate(h, seed) {
                Ok(s) if [s.train_mse, s.val_mse, s.val_pct_error].iter().all(|v| v.is_finite()) => {
                    Ok(s)
                }
                Ok(_) => Err("non-finite score".to_string()),
                Err(e) => Err(e.to_string()),
            };
            match outcome {
                Ok(s) => ArchSearchRow {
                    hidden_nodes: h,
                    train_mse: s.train_mse,
                    val_mse: s.val_mse,
                    val_pct_error: s.val_pct_error,
                    seed,
                    failure: None,
                },
                Err(e) => ArchSearchRow {
                    hidden_nodes: h,
                    train_mse: f64::INFINITY,
                    val_mse: f64::INFINITY,
                    val_pct_error: f64::INFINITY,
                    seed,
                    failure: Some(e),
                },
            }
        })
        .collect();

    let winner = rows.iter().min_by(|a, b| rank(a, b)).expect("non-empty");
    if winner.failed() {
        return Err(Error::AllCandidatesFailed(rows.len()));
    }
    let selected = winner.hidden_nodes;
    Ok(ArchSearchReport { rows, selected })
}

/// Train-and-validate evaluator over one fixed split.
pub struct TrainingEvaluator {
    train: NormalizedSet,
    validation: NormalizedSet,
    validation_flows: Matrix,
    normalization: NormalizationSpec,
    config: TrainConfig,
}

impl TrainingEvaluator {
    /// Fits the normalizer on `train` and prepares both sets.
    pub fn new(train: &Dataset, validation: &Dataset, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        let normalization = NormalizationSpec::fit(train)?;
        Ok(TrainingEvaluator {
            train: normalization.normalize(train)?,
            validation: normalization.normalize(validation)?,
            validation_flows: Matrix::column(&validation.column(Column::ProductFlow)),
            normalization,
            config: config.clone(),
        })
    }
}

impl CandidateEvaluator for TrainingEvaluator {
    fn evaluate(&self, hidden_nodes: usize, seed: u64) -> Result<CandidateScore> {
        let config = TrainConfig {
            seed,
            ..self.config.clone()
        };
        let net = Network::init(4, hidden_nodes, 1, seed)?;
        let (net, _) = train(net, &self.train, &config)?;
        let val_out = predict_set(&net, &self.validation)?;
        let val_flows = val_out.map(|v| self.normalization.denormalize_output(v));
        Ok(CandidateScore {
            train_mse: set_mse(&net, &self.train)?,
            val_mse: metrics::mse(&val_out, self.validation.targets())?,
            val_pct_error: metrics::percent_error(&val_flows, &self.validation_flows)?,
        })
    }
}

/// Splits once, then trains a `4-H-1` network for every candidate `H`.
pub fn search(
    ds: &Dataset,
    candidates: &[usize],
    config: &TrainConfig,
    train_fraction: f64,
    split_seed: u64,
) -> Result<ArchSearchReport> {
    let (train_ds, val_ds) = ds.split(train_fraction, split_seed)?;
    let evaluator = TrainingEvaluator::new(&train_ds, &val_ds, config)?;
    search_with(candidates, config.seed, &evaluator)
}
