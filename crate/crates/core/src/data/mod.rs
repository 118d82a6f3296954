//! Dataset schema, ingestion, min-max scaling, train/validation split and the
//! synthetic column surrogate.

mod csv_io;
mod normalize;
mod synthetic;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use csv_io::{dataset_to_csv, load_csv, read_csv, write_csv, CSV_HEADER};
pub use normalize::{ColumnRange, NormalizationSpec, NormalizedSet, NORM_RANGE};
pub use synthetic::{generate_synthetic, generate_synthetic_with, surrogate_flow, SurrogateRanges};

/// One of the five schema columns. The first four are network inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Column {
    SfRatio,
    FeedTemp,
    SolventTemp,
    Rotation,
    ProductFlow,
}

impl Column {
    pub const ALL: [Column; 5] = [
        Column::SfRatio,
        Column::FeedTemp,
        Column::SolventTemp,
        Column::Rotation,
        Column::ProductFlow,
    ];

    pub const INPUTS: [Column; 4] = [
        Column::SfRatio,
        Column::FeedTemp,
        Column::SolventTemp,
        Column::Rotation,
    ];

    /// Header name in CSV and model files.
    pub fn csv_name(self) -> &'static str {
        match self {
            Column::SfRatio => "sf_ratio",
            Column::FeedTemp => "feed_temp_c",
            Column::SolventTemp => "solvent_temp_c",
            Column::Rotation => "rotation_rpm",
            Column::ProductFlow => "product_flow_m3hr",
        }
    }

    /// Short name used on the command line (`sf_ratio=1.5,rotation=30`).
    pub fn short_name(self) -> &'static str {
        match self {
            Column::SfRatio => "sf_ratio",
            Column::FeedTemp => "feed_temp",
            Column::SolventTemp => "solvent_temp",
            Column::Rotation => "rotation",
            Column::ProductFlow => "product_flow",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_input(self) -> bool {
        self != Column::ProductFlow
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Column {
    type Err = Error;

    /// Accepts either the short or the CSV name.
    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.short_name() == s || c.csv_name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variable `{s}`")))
    }
}

/// One operating record: four conditions and the measured product flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Solvent-to-feed ratio, dimensionless.
    pub sf_ratio: f64,
    /// Feed temperature, degrees C.
    pub feed_temp: f64,
    /// Solvent temperature, degrees C.
    pub solvent_temp: f64,
    /// Disc rotation rate, rpm.
    pub rotation: f64,
    /// Main product flow rate, m^3/hr.
    pub product_flow: f64,
}

impl Sample {
    pub fn inputs(&self) -> [f64; 4] {
        [self.sf_ratio, self.feed_temp, self.solvent_temp, self.rotation]
    }

    pub fn get(&self, column: Column) -> f64 {
        match column {
            Column::SfRatio => self.sf_ratio,
            Column::FeedTemp => self.feed_temp,
            Column::SolventTemp => self.solvent_temp,
            Column::Rotation => self.rotation,
            Column::ProductFlow => self.product_flow,
        }
    }

    pub fn from_values(v: [f64; 5]) -> Self {
        Sample {
            sf_ratio: v[0],
            feed_temp: v[1],
            solvent_temp: v[2],
            rotation: v[3],
            product_flow: v[4],
        }
    }

    /// Checks the record invariants; the message names the offending column.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for c in Column::ALL {
            if !self.get(c).is_finite() {
                return Err(format!("`{}` is not finite", c.csv_name()));
            }
        }
        if self.product_flow <= 0.0 {
            return Err(format!(
                "`{}` must be > 0, got {}",
                Column::ProductFlow.csv_name(),
                self.product_flow
            ));
        }
        if self.sf_ratio <= 0.0 {
            return Err(format!(
                "`{}` must be > 0, got {}",
                Column::SfRatio.csv_name(),
                self.sf_ratio
            ));
        }
        if self.rotation < 0.0 {
            return Err(format!(
                "`{}` must be >= 0, got {}",
                Column::Rotation.csv_name(),
                self.rotation
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    provenance: String,
}

impl Dataset {
    /// Validates every sample; errors report 1-based positions.
    pub fn new(samples: Vec<Sample>, provenance: impl Into<String>) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            s.validate()
                .map_err(|message| Error::CsvRow { row: i + 1, message })?;
        }
        Ok(Dataset {
            samples,
            provenance: provenance.into(),
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn column(&self, column: Column) -> Vec<f64> {
        self.samples.iter().map(|s| s.get(column)).collect()
    }

    /// Arithmetic mean of each input column.
    pub fn input_means(&self) -> Result<[f64; 4]> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n = self.len() as f64;
        let mut means = [0.0; 4];
        for s in &self.samples {
            for (m, v) in means.iter_mut().zip(s.inputs()) {
                *m += v;
            }
        }
        Ok(means.map(|m| m / n))
    }

    /// Seeded shuffle, then the first `floor(n * train_fraction)` rows train.
    pub fn split(&self, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train fraction must be in (0, 1), got {train_fraction}"
            )));
        }
        if self.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 samples to split, got {}",
                self.len()
            )));
        }
        let n_train = (self.len() as f64 * train_fraction).floor() as usize;
        if n_train == 0 || n_train == self.len() {
            return Err(Error::InvalidConfig(format!(
                "train fraction {train_fraction} leaves an empty partition of {} samples",
                self.len()
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pick = |idx: &[usize]| idx.iter().map(|&i| self.samples[i]).collect::<Vec<_>>();
        let train = Dataset {
            samples: pick(&order[..n_train]),
            provenance: format!("{} [train, split seed {seed}]", self.provenance),
        };
        let validation = Dataset {
            samples: pick(&order[n_train..]),
            provenance: format!("{} [validation, split seed {seed}]", self.provenance),
        };
        Ok((train, validation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn numbered(n: usize) -> Dataset {
        let samples = (0..n)
            .map(|i| Sample::from_values([1.0 + i as f64, 80.0, 80.0, 30.0, 10.0 + i as f64]))
            .collect();
        Dataset::new(samples, "fixture").unwrap()
    }

    #[test]
    fn split_sizes() {
        let (tr, va) = numbered(400).split(0.8, 1).unwrap();
        assert_eq!((tr.len(), va.len()), (320, 80));
        let (tr, va) = numbered(10).split(0.8, 1).unwrap();
        assert_eq!((tr.len(), va.len()), (8, 2));
    }

    #[test]
    fn split_is_seeded() {
        let ds = numbered(50);
        assert_eq!(ds.split(0.8, 7).unwrap(), ds.split(0.8, 7).unwrap());
        assert_ne!(ds.split(0.8, 7).unwrap().0, ds.split(0.8, 8).unwrap().0);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let ds = numbered(10);
        for f in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(ds.split(f, 0), Err(Error::InvalidConfig(_))), "{f}");
        }
        assert!(numbered(1).split(0.5, 0).is_err());
    }

    #[test]
    fn invalid_sample_rejected() {
        let bad = Sample::from_values([1.0, 80.0, 80.0, 30.0, 0.0]);
        let err = Dataset::new(vec![bad], "x").unwrap_err();
        assert!(err.to_string().contains("product_flow_m3hr"));
        assert!(Sample::from_values([0.0, 80.0, 80.0, 30.0, 1.0]).validate().is_err());
        assert!(Sample::from_values([1.0, 80.0, 80.0, -1.0, 1.0]).validate().is_err());
        assert!(Sample::from_values([1.0, f64::NAN, 80.0, 1.0, 1.0]).validate().is_err());
    }

    #[test]
    fn column_names_parse() {
        assert_eq!("rotation".parse::<Column>().unwrap(), Column::Rotation);
        assert_eq!("feed_temp_c".parse::<Column>().unwrap(), Column::FeedTemp);
        assert!("pressure".parse::<Column>().is_err());
    }

    proptest! {
        #[test]
        fn split_is_an_exact_partition(n in 2usize..200, frac in 0.05f64..0.95, seed in any::<u64>()) {
            let ds = numbered(n);
            if let Ok((tr, va)) = ds.split(frac, seed) {
                prop_assert_eq!(tr.len() + va.len(), n);
                let mut ids: Vec<u64> = tr.samples().iter().chain(va.samples())
                    .map(|s| s.sf_ratio as u64).collect();
                ids.sort_unstable();
                prop_assert_eq!(ids, (1..=n as u64).collect::<Vec<_>>());
            }
        }
    }
}
