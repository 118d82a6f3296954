//! Backpropagation, per-sample SGD with classical momentum, and a
//! central-difference gradient check.
//!
//! The per-sample loss is `0.5 * ||y - d||^2` on normalized values.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::NormalizedSet;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::net::Network;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    /// Number of full passes over the training set.
    pub iterations: usize,
    /// Drives per-epoch shuffling. Initialization takes its own seed.
    pub seed: u64,
    pub shuffle_each_epoch: bool,
    /// Record the training MSE every this many epochs (epoch 0 and the last
    /// epoch are always recorded).
    pub history_stride: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            momentum: 0.9,
            iterations: 100_000,
            seed: 0,
            shuffle_each_epoch: true,
            history_stride: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.history_stride == 0 {
            return Err(Error::InvalidConfig("history stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// `(epoch, training MSE)` pairs; epoch 0 is the untrained network.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    records: Vec<(usize, f64)>,
}

impl TrainHistory {
    pub fn records(&self) -> &[(usize, f64)] {
        &self.records
    }

    pub fn initial_mse(&self) -> Option<f64> {
        self.records.first().map(|r| r.1)
    }

    pub fn final_mse(&self) -> Option<f64> {
        self.records.last().map(|r| r.1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mse\n");
        for (epoch, mse) in &self.records {
            let _ = writeln!(out, "{epoch},{mse}");
        }
        out
    }

    fn push(&mut self, epoch: usize, mse: f64) {
        debug_assert!(self.records.last().is_none_or(|r| r.0 < epoch));
        self.records.push((epoch, mse));
    }
}

/// `dL/dtheta` laid out like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub hidden_weights: Matrix,
    pub hidden_biases: Vec<f64>,
    pub output_weights: Matrix,
    pub output_biases: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        let (i, h, o) = net.dims();
        Gradients {
            hidden_weights: Matrix::zeros(h, i),
            hidden_biases: vec![0.0; h],
            output_weights: Matrix::zeros(o, h),
            output_biases: vec![0.0; o],
        }
    }

    /// Same order as [`Network::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        [
            self.hidden_weights.as_slice(),
            &self.hidden_biases,
            self.output_weights.as_slice(),
            &self.output_biases,
        ]
        .concat()
    }

    /// Inverse of [`Gradients::to_flat`] for a network of the same shape.
    pub fn from_flat(net: &Network, flat: &[f64]) -> Result<Self> {
        let mut g = Gradients::zeros_like(net);
        if flat.len() != net.param_count() {
            return Err(Error::DimensionMismatch {
                what: "flat gradient vector",
                expected: net.param_count(),
                actual: flat.len(),
            });
        }
        let mut rest = flat;
        for slice in g.slices_mut() {
            let (head, tail) = rest.split_at(slice.len());
            slice.copy_from_slice(head);
            rest = tail;
        }
        Ok(g)
    }

    fn slices_mut(&mut self) -> [&mut [f64]; 4] {
        [
            self.hidden_weights.as_mut_slice(),
            &mut self.hidden_biases,
            self.output_weights.as_mut_slice(),
            &mut self.output_biases,
        ]
    }

    fn slices(&self) -> [&[f64]; 4] {
        [
            self.hidden_weights.as_slice(),
            &self.hidden_biases,
            self.output_weights.as_slice(),
            &self.output_biases,
        ]
    }
}

/// Reusable buffers for one forward/backward pass.
struct Scratch {
    hidden: Vec<f64>,
    output: Vec<f64>,
    delta_out: Vec<f64>,
    grads: Gradients,
}

impl Scratch {
    fn new(net: &Network) -> Self {
        Scratch {
            hidden: vec![0.0; net.hidden_dim()],
            output: vec![0.0; net.output_dim()],
            delta_out: vec![0.0; net.output_dim()],
            grads: Gradients::zeros_like(net),
        }
    }

    /// Fills `self.grads` and returns the sample loss.
    fn backprop(&mut self, net: &Network, input: &[f64], target: &[f64]) -> f64 {
        net.forward_into(input, &mut self.hidden, &mut self.output);

        let mut loss = 0.0;
        for ((d, y), t) in self.delta_out.iter_mut().zip(&self.output).zip(target) {
            *d = y - t;
            loss += 0.5 * *d * *d;
        }

        let g = &mut self.grads;
        for (o, &delta) in self.delta_out.iter().enumerate() {
            g.output_biases[o] = delta;
            for (w, h) in g.output_weights.row_mut(o).iter_mut().zip(&self.hidden) {
                *w = delta * h;
            }
        }
        for (j, &h) in self.hidden.iter().enumerate() {
            let back: f64 = self
                .delta_out
                .iter()
                .enumerate()
                .map(|(o, d)| d * net.output_weights()[(o, j)])
                .sum();
            let delta_hidden = back * h * (1.0 - h);
            g.hidden_biases[j] = delta_hidden;
            for (w, x) in g.hidden_weights.row_mut(j).iter_mut().zip(input) {
                *w = delta_hidden * x;
            }
        }
        loss
    }
}

fn check_pattern(net: &Network, input: &[f64], target: &[f64]) -> Result<()> {
    net.check_input(input)?;
    if target.len() != net.output_dim() {
        return Err(Error::DimensionMismatch {
            what: "target",
            expected: net.output_dim(),
            actual: target.len(),
        });
    }
    Ok(())
}

/// Per-sample loss `0.5 * ||forward(input) - target||^2`.
pub fn sample_loss(net: &Network, input: &[f64], target: &[f64]) -> Result<f64> {
    check_pattern(net, input, target)?;
    let y = net.forward(input)?;
    Ok(y.iter()
        .zip(target)
        .map(|(y, d)| 0.5 * (y - d) * (y - d))
        .sum())
}

/// Analytic gradient of the per-sample loss.
pub fn backprop_gradients(net: &Network, input: &[f64], target: &[f64]) -> Result<Gradients> {
    check_pattern(net, input, target)?;
    let mut scratch = Scratch::new(net);
    scratch.backprop(net, input, target);
    Ok(scratch.grads)
}

/// Network outputs for every pattern, `exemplars x outputs`.
pub fn predict_set(net: &Network, set: &NormalizedSet) -> Result<Matrix> {
    if set.input_dim() != net.input_dim() {
        return Err(Error::DimensionMismatch {
            what: "pattern inputs",
            expected: net.input_dim(),
            actual: set.input_dim(),
        });
    }
    let mut out = Matrix::zeros(set.len(), net.output_dim());
    let mut hidden = vec![0.0; net.hidden_dim()];
    for i in 0..set.len() {
        net.forward_into(set.input(i), &mut hidden, out.row_mut(i));
    }
    Ok(out)
}

/// MSE over a normalized set.
pub fn set_mse(net: &Network, set: &NormalizedSet) -> Result<f64> {
    crate::metrics::mse(&predict_set(net, set)?, set.targets())
}

/// Trains `net` in place of a copy and returns the result with its history.
///
/// Per pattern: `v <- momentum * v - learning_rate * grad`, `theta <- theta + v`.
/// A non-finite loss or parameter aborts with [`Error::Divergence`].
pub fn train(
    net: Network,
    set: &NormalizedSet,
    config: &TrainConfig,
) -> Result<(Network, TrainHistory)> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if set.input_dim() != net.input_dim() || set.output_dim() != net.output_dim() {
        return Err(Error::DimensionMismatch {
            what: "pattern width",
            expected: net.input_dim() + net.output_dim(),
            actual: set.input_dim() + set.output_dim(),
        });
    }

    let mut net = net;
    let mut scratch = Scratch::new(&net);
    let mut velocity = vec![0.0; net.param_count()];
    let mut order: Vec<usize> = (0..set.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(2);

    let diverged = |epoch| Error::Divergence {
        epoch,
        learning_rate: config.learning_rate,
    };

    let mut history = TrainHistory::default();
    history.push(0, set_mse(&net, set)?);

    for epoch in 1..=config.iterations {
        if config.shuffle_each_epoch {
            order.shuffle(&mut rng);
        }
        for &i in &order {
            let loss = scratch.backprop(&net, set.input(i), set.target(i));
            if !loss.is_finite() {
                return Err(diverged(epoch));
            }
            let mut k = 0;
            for (params, grads) in net.param_slices_mut().into_iter().zip(scratch.grads.slices()) {
                for (p, g) in params.iter_mut().zip(grads) {
                    let v = &mut velocity[k];
                    *v = config.momentum * *v - config.learning_rate * g;
                    *p += *v;
                    k += 1;
                }
            }
        }
        if !net.is_finite() {
            return Err(diverged(epoch));
        }
        if epoch % config.history_stride == 0 || epoch == config.iterations {
            let mse = set_mse(&net, set)?;
            if !mse.is_finite() {
                return Err(diverged(epoch));
            }
            history.push(epoch, mse);
        }
    }
    Ok((net, history))
}

/// Worst relative discrepancy between backprop and central differences.
pub fn gradient_check(net: &Network, input: &[f64], target: &[f64], epsilon: f64) -> Result<f64> {
    gradient_check_with(net, input, target, epsilon, backprop_gradients)
}

/// Below this magnitude (both sides) the absolute difference is used.
pub const GRADIENT_CHECK_ABS_FLOOR: f64 = 1e-10;

/// [`gradient_check`] against an arbitrary analytic gradient.
pub fn gradient_check_with<F>(
    net: &Network,
    input: &[f64],
    target: &[f64],
    epsilon: f64,
    analytic: F,
) -> Result<f64>
where
    F: Fn(&Network, &[f64], &[f64]) -> Result<Gradients>,
{
    if !(epsilon > 0.0 && epsilon <= 1e-3) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be in (0, 1e-3], got {epsilon}"
        )));
    }
    check_pattern(net, input, target)?;
    let analytic = analytic(net, input, target)?.to_flat();
    let (i, h, o) = net.dims();
    let mut params = net.to_flat();

    let mut worst: f64 = 0.0;
    for k in 0..params.len() {
        let orig = params[k];
        params[k] = orig + epsilon;
        let plus = sample_loss(&Network::from_flat(i, h, o, &params)?, input, target)?;
        params[k] = orig - epsilon;
        let minus = sample_loss(&Network::from_flat(i, h, o, &params)?, input, target)?;
        params[k] = orig;

        let numeric = (plus - minus) / (2.0 * epsilon);
        let a = analytic[k];
        let diff = (a - numeric).abs();
        let scale = a.abs().max(numeric.abs());
        let discrepancy = if scale < GRADIENT_CHECK_ABS_FLOOR {
            diff
        } else {
            diff / scale
        };
        worst = worst.max(discrepancy);
    }
    Ok(worst)
}
