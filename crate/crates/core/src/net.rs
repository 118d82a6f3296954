//! Single-hidden-layer feed-forward perceptron.
//!
//! Topology is `input_dim -> hidden_dim -> output_dim`. The hidden layer is
//! always sigmoid with a learnable per-node bias; the output layer is linear so
//! that denormalized predictions can leave the sigmoid's range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Logistic activation with an additive bias: `1 / (1 + exp(-x - bias))`.
///
/// Saturates to exactly `0.0`/`1.0` in `f64` once `|x + bias|` exceeds ~37.
#[inline]
pub fn sigmoid(x: f64, bias: f64) -> f64 {
    let z = x + bias;
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Sigmoid,
    Linear,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sigmoid" => Some(Activation::Sigmoid),
            "linear" => Some(Activation::Linear),
            _ => None,
        }
    }
}

/// Half-width of the uniform initialization interval.
pub const INIT_HALF_WIDTH: f64 = 0.5;

/// Weights and biases of an `input -> hidden -> output` perceptron.
///
/// Flat parameter order, used by initialization, gradients and the optimizer:
/// `hidden_weights` (row-major, `hidden x input`), `hidden_biases`,
/// `output_weights` (row-major, `output x hidden`), `output_biases`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    hidden_weights: Matrix,
    hidden_biases: Vec<f64>,
    output_weights: Matrix,
    output_biases: Vec<f64>,
}

impl Network {
    pub const HIDDEN_ACTIVATION: Activation = Activation::Sigmoid;
    pub const OUTPUT_ACTIVATION: Activation = Activation::Linear;

    /// Uniform `[-0.5, 0.5]` initialization from a seeded ChaCha8 stream.
    pub fn init(input_dim: usize, hidden_dim: usize, output_dim: usize, seed: u64) -> Result<Self> {
        let mut net = Network::zeros(input_dim, hidden_dim, output_dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for slice in net.param_slices_mut() {
            for p in slice.iter_mut() {
                *p = rng.random_range(-INIT_HALF_WIDTH..=INIT_HALF_WIDTH);
            }
        }
        Ok(net)
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize, output_dim: usize) -> Result<Self> {
        check_dims(input_dim, hidden_dim, output_dim)?;
        Ok(Network {
            hidden_weights: Matrix::zeros(hidden_dim, input_dim),
            hidden_biases: vec![0.0; hidden_dim],
            output_weights: Matrix::zeros(output_dim, hidden_dim),
            output_biases: vec![0.0; output_dim],
        })
    }

    /// Assembles a network from explicit parameters, validating shapes and finiteness.
    pub fn from_parts(
        hidden_weights: Matrix,
        hidden_biases: Vec<f64>,
        output_weights: Matrix,
        output_biases: Vec<f64>,
    ) -> Result<Self> {
        let (hidden_dim, input_dim) = hidden_weights.shape();
        let output_dim = output_weights.rows();
        check_dims(input_dim, hidden_dim, output_dim)?;
        let expect = |what, expected, actual| {
            if expected == actual {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    what,
                    expected,
                    actual,
                })
            }
        };
        expect("hidden biases", hidden_dim, hidden_biases.len())?;
        expect("output weight columns", hidden_dim, output_weights.cols())?;
        expect("output biases", output_dim, output_biases.len())?;
        let net = Network {
            hidden_weights,
            hidden_biases,
            output_weights,
            output_biases,
        };
        if !net.is_finite() {
            return Err(Error::InvalidConfig(
                "network parameters must be finite".into(),
            ));
        }
        Ok(net)
    }

    /// Rebuilds a network of the given shape from a flat parameter vector.
    pub fn from_flat(
        input_dim: usize,
        hidden_dim: usize,
        output_dim: usize,
        params: &[f64],
    ) -> Result<Self> {
        let mut net = Network::zeros(input_dim, hidden_dim, output_dim)?;
        if params.len() != net.param_count() {
            return Err(Error::DimensionMismatch {
                what: "flat parameter vector",
                expected: net.param_count(),
                actual: params.len(),
            });
        }
        let mut rest = params;
        for slice in net.param_slices_mut() {
            let (head, tail) = rest.split_at(slice.len());
            slice.copy_from_slice(head);
            rest = tail;
        }
        if !net.is_finite() {
            return Err(Error::InvalidConfig(
                "network parameters must be finite".into(),
            ));
        }
        Ok(net)
    }

    pub fn input_dim(&self) -> usize {
        self.hidden_weights.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_weights.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.output_weights.rows()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.input_dim(), self.hidden_dim(), self.output_dim())
    }

    pub fn param_count(&self) -> usize {
        param_count(self.input_dim(), self.hidden_dim(), self.output_dim())
    }

    pub fn hidden_weights(&self) -> &Matrix {
        &self.hidden_weights
    }

    pub fn hidden_biases(&self) -> &[f64] {
        &self.hidden_biases
    }

    pub fn output_weights(&self) -> &Matrix {
        &self.output_weights
    }

    pub fn output_biases(&self) -> &[f64] {
        &self.output_biases
    }

    pub fn param_slices(&self) -> [&[f64]; 4] {
        [
            self.hidden_weights.as_slice(),
            &self.hidden_biases,
            self.output_weights.as_slice(),
            &self.output_biases,
        ]
    }

    pub(crate) fn param_slices_mut(&mut self) -> [&mut [f64]; 4] {
        [
            self.hidden_weights.as_mut_slice(),
            &mut self.hidden_biases,
            self.output_weights.as_mut_slice(),
            &mut self.output_biases,
        ]
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.param_slices().concat()
    }

    pub fn is_finite(&self) -> bool {
        self.param_slices()
            .iter()
            .all(|s| s.iter().all(|v| v.is_finite()))
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.forward_with_hidden(input).map(|(_, out)| out)
    }

    /// Forward pass that also returns the hidden-layer activations.
    pub fn forward_with_hidden(&self, input: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_input(input)?;
        let mut hidden = vec![0.0; self.hidden_dim()];
        let mut output = vec![0.0; self.output_dim()];
        self.forward_into(input, &mut hidden, &mut output);
        Ok((hidden, output))
    }

    /// Unchecked forward pass into caller-provided buffers.
    pub(crate) fn forward_into(&self, input: &[f64], hidden: &mut [f64], output: &mut [f64]) {
        for (j, h) in hidden.iter_mut().enumerate() {
            let x: f64 = self
                .hidden_weights
                .row(j)
                .iter()
                .zip(input)
                .map(|(w, v)| w * v)
                .sum();
            *h = sigmoid(x, self.hidden_biases[j]);
        }
        for (o, y) in output.iter_mut().enumerate() {
            let z: f64 = self
                .output_weights
                .row(o)
                .iter()
                .zip(hidden.iter())
                .map(|(w, h)| w * h)
                .sum();
            *y = z + self.output_biases[o];
        }
    }

    pub(crate) fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "network input",
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        Ok(())
    }
}

pub fn param_count(input_dim: usize, hidden_dim: usize, output_dim: usize) -> usize {
    hidden_dim * input_dim + hidden_dim + output_dim * hidden_dim + output_dim
}

fn check_dims(input_dim: usize, hidden_dim: usize, output_dim: usize) -> Result<()> {
    if input_dim == 0 || hidden_dim == 0 || output_dim == 0 {
        return Err(Error::InvalidConfig(format!(
            "network dimensions must be >= 1, got {input_dim}-{hidden_dim}-{output_dim}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_net() -> Network {
        Network::from_parts(
            Matrix::from_rows(&[[1.0]]).unwrap(),
            vec![0.0],
            Matrix::from_rows(&[[1.0]]).unwrap(),
            vec![0.0],
        )
        .unwrap()
    }

    #[test]
    fn sigmoid_reference_values() {
        assert_eq!(sigmoid(0.0, 0.0), 0.5);
        // 1 / (1 + exp(-1.5)) = 0.81757447619364365960... (40-digit evaluation)
        assert!((sigmoid(1.0, 0.5) - 0.817_574_476_193_643_66).abs() < 1e-15);
        assert!(sigmoid(40.0, 0.0) > 1.0 - 1e-15);
        assert!(sigmoid(-40.0, 0.0) < 1e-15);
        assert!(sigmoid(-40.0, 0.0) > 0.0);
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = Network::zeros(4, 7, 1).unwrap();
        let (hidden, out) = net.forward_with_hidden(&[0.3, -2.0, 9.0, 0.1]).unwrap();
        assert_eq!(out, vec![0.0]);
        assert!(hidden.iter().all(|&h| h == 0.5));
    }

    #[test]
    fn unit_network_hand_values() {
        let net = unit_net();
        assert_eq!(net.forward(&[0.0]).unwrap(), vec![0.5]);
        let (hidden, out) = net.forward_with_hidden(&[1.0]).unwrap();
        assert!((hidden[0] - 0.731_058_578_630_004_88).abs() < 1e-15);
        assert_eq!(out[0], hidden[0]);
    }

    #[test]
    fn four_input_topology_has_one_output() {
        let net = Network::init(4, 7, 1, 3).unwrap();
        let out = net.forward(&[0.1, 0.9, 0.5, 0.3]).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].is_finite());
        assert_eq!(net.param_count(), 43);
        assert_eq!(net.to_flat().len(), 4 * 7 + 7 + 7 + 1);
    }

    #[test]
    fn wrong_input_length_is_reported() {
        let net = Network::init(4, 7, 1, 0).unwrap();
        let err = net.forward(&[0.0; 3]).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 4,
                actual: 3,
                ..
            }
        ));
        assert!(err.to_string().contains("expected 4, got 3"));
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = Network::init(4, 7, 1, 42).unwrap();
        let b = Network::init(4, 7, 1, 42).unwrap();
        let c = Network::init(4, 7, 1, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.to_flat(), c.to_flat());
        assert!(a.to_flat().iter().all(|p| p.abs() <= INIT_HALF_WIDTH));
    }

    #[test]
    fn zero_dims_rejected() {
        assert!(Network::init(0, 7, 1, 0).is_err());
        assert!(Network::init(4, 0, 1, 0).is_err());
        assert!(Network::init(4, 7, 0, 0).is_err());
    }

    #[test]
    fn from_parts_rejects_non_finite() {
        let err = Network::from_parts(
            Matrix::from_rows(&[[f64::NAN]]).unwrap(),
            vec![0.0],
            Matrix::from_rows(&[[1.0]]).unwrap(),
            vec![0.0],
        );
        assert!(err.is_err());
    }

    #[test]
    fn flat_round_trip() {
        let net = Network::init(3, 5, 2, 9).unwrap();
        let back = Network::from_flat(3, 5, 2, &net.to_flat()).unwrap();
        assert_eq!(net, back);
    }

    proptest! {
        #[test]
        fn sigmoid_is_antisymmetric(x in -50.0f64..50.0, b in -50.0f64..50.0) {
            prop_assert!((sigmoid(x, b) + sigmoid(-x, -b) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn bias_is_a_pre_activation_shift(x in -1e3f64..1e3, b in -1e3f64..1e3) {
            prop_assert_eq!(sigmoid(x, b), sigmoid(x + b, 0.0));
        }

        #[test]
        fn sigmoid_is_monotone(x in -20.0f64..20.0, b in -5.0f64..5.0, dx in 1e-3f64..1.0) {
            let s = sigmoid(x, b);
            prop_assert!(s > 0.0 && s < 1.0);
            prop_assert!(sigmoid(x + dx, b) > s);
            prop_assert!(sigmoid(x, b + dx) > s);
        }

        #[test]
        fn forward_is_deterministic_and_lipschitz(
            seed in any::<u64>(),
            input in prop::array::uniform4(-2.0f64..2.0),
            k in 0usize..4,
        ) {
            let net = Network::init(4, 7, 1, seed).unwrap();
            let y = net.forward(&input).unwrap()[0];
            prop_assert_eq!(y.to_bits(), net.forward(&input).unwrap()[0].to_bits());

            // |dy/dx_k| <= sum_j |v_j| * 1/4 * |w_jk|
            let lipschitz: f64 = (0..7)
                .map(|j| net.output_weights()[(0, j)].abs() * 0.25 * net.hidden_weights()[(j, k)].abs())
                .sum();
            let delta = 1e-8;
            let mut moved = input;
            moved[k] += delta;
            let y2 = net.forward(&moved).unwrap()[0];
            prop_assert!((y2 - y).abs() <= lipschitz * delta + 1e-15);
        }
    }
}
