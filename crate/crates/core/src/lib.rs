//! Feed-forward perceptron surrogate for rotating-disc-contactor product flow.
//!
//! The pipeline: load or synthesize operating records ([`data`]), split and
//! min-max normalize them, train a `4-H-1` sigmoid/linear network by
//! backpropagation ([`net`], [`training`]), score it with %Error and MSE
//! ([`metrics`]), choose `H` ([`archsearch`]), persist the result
//! ([`model`]) and probe it one input at a time ([`parametric`]).

pub mod archsearch;
pub mod data;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod net;
pub mod parametric;
pub mod training;

pub use archsearch::{search, search_with, ArchSearchReport, ArchSearchRow, CandidateEvaluator, CandidateScore};
pub use data::{
    generate_synthetic, load_csv, surrogate_flow, write_csv, Column, Dataset, NormalizationSpec,
    NormalizedSet, Sample, SurrogateRanges,
};
pub use error::{Error, ErrorKind, Result};
pub use matrix::Matrix;
pub use metrics::{mse, percent_error, relative_errors, MetricsReport, PredictionSet, RelativeErrors};
pub use model::Model;
pub use net::{sigmoid, Activation, Network};
pub use parametric::{scatter_export, sweep, Direction, SweepResult, SweepSpec, Trend};
pub use training::{backprop_gradients, gradient_check, train, Gradients, TrainConfig, TrainHistory};
