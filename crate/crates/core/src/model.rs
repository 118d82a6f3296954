//! Self-contained trained model: network, fitted normalization and the
//! training-set input means, persisted as versioned plain text.
//!
//! ```text
//! rdcann-model v1
//! dims 4 7 1
//! activation hidden=sigmoid output=linear
//! hidden_weights
//! <hidden rows, input values each>
//! hidden_biases
//! <hidden values>
//! output_weights
//! <output rows, hidden values each>
//! output_biases
//! <output values>
//! norm <csv column> <min> <max>      (x5, schema order)
//! norm_range 0.1 0.9
//! mean <csv input column> <value>    (x4, schema order)
//! ```
//!
//! Parameters use 17 significant digits so every `f64` round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::data::{Column, ColumnRange, Dataset, NormalizationSpec};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::PredictionSet;
use crate::net::{Activation, Network};
use crate::training::predict_set;

pub const MODEL_MAGIC: &str = "rdcann-model v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    network: Network,
    normalization: NormalizationSpec,
    input_means: [f64; 4],
}

impl Model {
    pub fn new(network: Network, normalization: NormalizationSpec, input_means: [f64; 4]) -> Result<Self> {
        if network.input_dim() != 4 {
            return Err(Error::DimensionMismatch {
                what: "model inputs",
                expected: 4,
                actual: network.input_dim(),
            });
        }
        if network.output_dim() != 1 {
            return Err(Error::DimensionMismatch {
                what: "model outputs",
                expected: 1,
                actual: network.output_dim(),
            });
        }
        if !input_means.iter().all(|m| m.is_finite()) {
            return Err(Error::InvalidConfig("input means must be finite".into()));
        }
        Ok(Model {
            network,
            normalization,
            input_means,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn normalization(&self) -> &NormalizationSpec {
        &self.normalization
    }

    /// Mean of each input column over the training split.
    pub fn input_means(&self) -> [f64; 4] {
        self.input_means
    }

    /// Predicted product flow in m^3/hr for raw operating conditions.
    pub fn predict(&self, inputs: &[f64; 4]) -> Result<f64> {
        let x = self.normalization.normalize_inputs(inputs);
        let y = self.network.forward(&x)?[0];
        Ok(self.normalization.denormalize_output(y))
    }

    /// Normalized and denormalized outputs against `ds`'s recorded flows.
    pub fn evaluate(&self, ds: &Dataset) -> Result<PredictionSet> {
        let set = self.normalization.normalize(ds)?;
        let outputs = predict_set(&self.network, &set)?;
        let denorm = outputs.map(|v| self.normalization.denormalize_output(v));
        let desired = Matrix::column(&ds.column(Column::ProductFlow));
        PredictionSet::new(outputs, set.targets().clone(), denorm, desired)
    }

    pub fn to_text(&self) -> String {
        let net = &self.network;
        let (i, h, o) = net.dims();
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC}");
        let _ = writeln!(out, "dims {i} {h} {o}");
        let _ = writeln!(
            out,
            "activation hidden={} output={}",
            Network::HIDDEN_ACTIVATION.name(),
            Network::OUTPUT_ACTIVATION.name()
        );
        write_block(&mut out, "hidden_weights", net.hidden_weights().iter_rows());
        write_block(&mut out, "hidden_biases", std::iter::once(net.hidden_biases()));
        write_block(&mut out, "output_weights", net.output_weights().iter_rows());
        write_block(&mut out, "output_biases", std::iter::once(net.output_biases()));
        for c in Column::ALL {
            let r = self.normalization.range(c);
            let _ = writeln!(out, "norm {} {} {}", c.csv_name(), fmt_f64(r.min), fmt_f64(r.max));
        }
        let (lo, hi) = self.normalization.bounds();
        let _ = writeln!(out, "norm_range {lo} {hi}");
        for (c, m) in Column::INPUTS.iter().zip(self.input_means) {
            let _ = writeln!(out, "mean {} {}", c.csv_name(), fmt_f64(m));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Parser::new(text).parse()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_text(&text)
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_block<'a>(out: &mut String, label: &str, rows: impl Iterator<Item = &'a [f64]>) {
    out.push_str(label);
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

struct Parser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line_no: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: text.lines().enumerate().peekable(),
            line_no: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::ModelFormat {
            line: self.line_no,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        loop {
            match self.lines.next() {
                Some((i, line)) => {
                    self.line_no = i + 1;
                    let line = line.trim();
                    if !line.is_empty() {
                        return Ok(line);
                    }
                }
                None => return Err(self.err("unexpected end of file")),
            }
        }
    }

    /// Next line split into words, requiring the given leading keyword.
    fn keyword(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self.next_line()?;
        let mut words = line.split_whitespace();
        match words.next() {
            Some(k) if k == key => Ok(words.collect()),
            _ => Err(self.err(format!("expected `{key}`, found `{line}`"))),
        }
    }

    fn number<T: std::str::FromStr>(&self, word: &str) -> Result<T> {
        word.parse()
            .map_err(|_| self.err(format!("not a number: `{word}`")))
    }

    fn float(&self, word: &str) -> Result<f64> {
        let v: f64 = self.number(word)?;
        if !v.is_finite() {
            return Err(self.err(format!("non-finite value `{word}`")));
        }
        Ok(v)
    }

    fn block(&mut self, label: &str, rows: usize, cols: usize) -> Result<Matrix> {
        let rest = self.keyword(label)?;
        if !rest.is_empty() {
            return Err(self.err(format!("unexpected tokens after `{label}`")));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = self.next_line()?;
            let values = line
                .split_whitespace()
                .map(|w| self.float(w))
                .collect::<Result<Vec<_>>>()?;
            if values.len() != cols {
                return Err(self.err(format!(
                    "`{label}` row has {} values, expected {cols}",
                    values.len()
                )));
            }
            data.extend(values);
        }
        Matrix::from_vec(rows, cols, data)
    }

    fn parse(mut self) -> Result<Model> {
        let magic = self.next_line()?;
        if magic != MODEL_MAGIC {
            return Err(self.err(format!("expected header `{MODEL_MAGIC}`, found `{magic}`")));
        }

        let dims = self.keyword("dims")?;
        if dims.len() != 3 {
            return Err(self.err("`dims` needs three counts"));
        }
        let [i, h, o] = [dims[0], dims[1], dims[2]].map(|w| self.number::<usize>(w));
        let (i, h, o) = (i?, h?, o?);

        let act = self.keyword("activation")?;
        let expected = [
            format!("hidden={}", Network::HIDDEN_ACTIVATION.name()),
            format!("output={}", Network::OUTPUT_ACTIVATION.name()),
        ];
        if act != expected {
            let known = act
                .iter()
                .filter_map(|kv| kv.split_once('='))
                .all(|(_, v)| Activation::from_name(v).is_some());
            return Err(self.err(if known {
                format!("unsupported activation pair `{}`", act.join(" "))
            } else {
                format!("unknown activation in `{}`", act.join(" "))
            }));
        }

        let hidden_weights = self.block("hidden_weights", h, i)?;
        let hidden_biases = self.block("hidden_biases", 1, h)?;
        let output_weights = self.block("output_weights", o, h)?;
        let output_biases = self.block("output_biases", 1, o)?;
        let network = Network::from_parts(
            hidden_weights,
            hidden_biases.as_slice().to_vec(),
            output_weights,
            output_biases.as_slice().to_vec(),
        )?;

        let mut ranges = [ColumnRange { min: 0.0, max: 0.0 }; 5];
        for c in Column::ALL {
            let words = self.keyword("norm")?;
            if words.len() != 3 || words[0] != c.csv_name() {
                return Err(self.err(format!("expected `norm {} <min> <max>`", c.csv_name())));
            }
            ranges[c.index()] = ColumnRange {
                min: self.float(words[1])?,
                max: self.float(words[2])?,
            };
        }
        let range = self.keyword("norm_range")?;
        if range.len() != 2 {
            return Err(self.err("`norm_range` needs two values"));
        }
        let (lo, hi) = (self.float(range[0])?, self.float(range[1])?);
        let normalization = NormalizationSpec::new(ranges, lo, hi)?;

        let mut means = [0.0; 4];
        for (slot, c) in means.iter_mut().zip(Column::INPUTS) {
            let words = self.keyword("mean")?;
            if words.len() != 2 || words[0] != c.csv_name() {
                return Err(self.err(format!("expected `mean {} <value>`", c.csv_name())));
            }
            *slot = self.float(words[1])?;
        }

        if let Ok(extra) = self.next_line() {
            return Err(self.err(format!("trailing content `{extra}`")));
        }
        Model::new(network, normalization, means)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synthetic;

    fn fixture() -> Model {
        let ds = generate_synthetic(40, 2, 0.01).unwrap();
        let spec = NormalizationSpec::fit(&ds).unwrap();
        Model::new(Network::init(4, 7, 1, 5).unwrap(), spec, ds.input_means().unwrap()).unwrap()
    }

    #[test]
    fn text_round_trip_is_exact() {
        let model = fixture();
        let text = model.to_text();
        let back = Model::from_text(&text).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.to_text(), text);
        let bits = |m: &Model| m.network().to_flat().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&model));
        assert_eq!(bits(&back).len(), 43);
    }

    #[test]
    fn header_lines() {
        let text = fixture().to_text();
        let lines: Vec<&str> = text.lines().take(4).collect();
        assert_eq!(lines, [MODEL_MAGIC, "dims 4 7 1", "activation hidden=sigmoid output=linear", "hidden_weights"]);
        assert!(text.contains("\nnorm_range 0.1 0.9\n"));
        assert!(text.contains("\nnorm product_flow_m3hr "));
    }

    #[test]
    fn seventeen_significant_digits() {
        let text = fixture().to_text();
        let row = text.lines().nth(4).unwrap();
        for word in row.split_whitespace() {
            let mantissa = word.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{word}");
        }
    }

    #[test]
    fn rejects_wrong_magic_and_truncation() {
        let text = fixture().to_text();
        let err = Model::from_text(&text.replace(MODEL_MAGIC, "rdcann-model v2")).unwrap_err();
        assert!(matches!(err, Error::ModelFormat { line: 1, .. }));
        let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(matches!(Model::from_text(&cut), Err(Error::ModelFormat { .. })));
        let extra = format!("{text}junk\n");
        assert!(Model::from_text(&extra).is_err());
    }

    #[test]
    fn rejects_wrong_schema_dims() {
        let ds = generate_synthetic(20, 2, 0.0).unwrap();
        let spec = NormalizationSpec::fit(&ds).unwrap();
        let err = Model::new(Network::init(3, 7, 1, 0).unwrap(), spec, [0.0; 4]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 4, actual: 3, .. }));
    }

    #[test]
    fn rejects_bad_activation_and_values() {
        let text = fixture().to_text();
        let relu = text.replace("output=linear", "output=relu");
        assert!(Model::from_text(&relu).unwrap_err().to_string().contains("unknown activation"));
        let sig = text.replace("output=linear", "output=sigmoid");
        assert!(Model::from_text(&sig).unwrap_err().to_string().contains("unsupported"));
        let nan = text.replacen("hidden_biases\n", "hidden_biases\nNaN ", 1);
        assert!(Model::from_text(&nan).is_err());
    }

    #[test]
    fn predict_matches_manual_pipeline() {
        let model = fixture();
        let x = [2.0, 80.0, 90.0, 30.0];
        let z = model.normalization().normalize_inputs(&x);
        let y = model.network().forward(&z).unwrap()[0];
        assert_eq!(model.predict(&x).unwrap(), model.normalization().denormalize_output(y));
    }
}
