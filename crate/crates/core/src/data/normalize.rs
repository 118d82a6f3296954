use super::{Column, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Target interval of the affine min-max map.
pub const NORM_RANGE: (f64, f64) = (0.1, 0.9);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
}

/// Per-column min-max parameters mapping `[min, max]` onto `[lo, hi]`.
///
/// Values outside the fitted range map outside `[lo, hi]`; nothing is clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationSpec {
    ranges: [ColumnRange; 5],
    lo: f64,
    hi: f64,
}

impl NormalizationSpec {
    /// Fits ranges on `ds`, which should be the training split only.
    pub fn fit(ds: &Dataset) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut ranges = [ColumnRange {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }; 5];
        for s in ds.samples() {
            for c in Column::ALL {
                let r = &mut ranges[c.index()];
                let v = s.get(c);
                r.min = r.min.min(v);
                r.max = r.max.max(v);
            }
        }
        Self::new(ranges, NORM_RANGE.0, NORM_RANGE.1)
    }

    pub fn new(ranges: [ColumnRange; 5], lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!(
                "normalization range must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        for c in Column::ALL {
            let r = ranges[c.index()];
            if !(r.min.is_finite() && r.max.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "non-finite range for `{}`",
                    c.csv_name()
                )));
            }
            if r.max <= r.min {
                return Err(Error::ConstantColumn(c.csv_name()));
            }
        }
        Ok(NormalizationSpec { ranges, lo, hi })
    }

    pub fn range(&self, column: Column) -> ColumnRange {
        self.ranges[column.index()]
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn normalize_value(&self, column: Column, value: f64) -> f64 {
        let r = self.ranges[column.index()];
        self.lo + (value - r.min) / (r.max - r.min) * (self.hi - self.lo)
    }

    pub fn denormalize_value(&self, column: Column, value: f64) -> f64 {
        let r = self.ranges[column.index()];
        r.min + (value - self.lo) / (self.hi - self.lo) * (r.max - r.min)
    }

    /// Network output back to m^3/hr.
    pub fn denormalize_output(&self, value: f64) -> f64 {
        self.denormalize_value(Column::ProductFlow, value)
    }

    pub fn normalize_inputs(&self, inputs: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, c) in Column::INPUTS.into_iter().enumerate() {
            out[i] = self.normalize_value(c, inputs[i]);
        }
        out
    }

    pub fn normalize(&self, ds: &Dataset) -> Result<NormalizedSet> {
        if ds.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut inputs = Matrix::zeros(ds.len(), 4);
        let mut targets = Matrix::zeros(ds.len(), 1);
        for (i, s) in ds.samples().iter().enumerate() {
            inputs.row_mut(i).copy_from_slice(&self.normalize_inputs(&s.inputs()));
            targets[(i, 0)] = self.normalize_value(Column::ProductFlow, s.product_flow);
        }
        NormalizedSet::new(inputs, targets)
    }
}

/// Network-scale training patterns: one input row and one target row per exemplar.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSet {
    inputs: Matrix,
    targets: Matrix,
}

impl NormalizedSet {
    pub fn new(inputs: Matrix, targets: Matrix) -> Result<Self> {
        if inputs.rows() != targets.rows() {
            return Err(Error::DimensionMismatch {
                what: "target rows",
                expected: inputs.rows(),
                actual: targets.rows(),
            });
        }
        if inputs.rows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if inputs.cols() == 0 || targets.cols() == 0 {
            return Err(Error::InvalidConfig("patterns need at least one column".into()));
        }
        if !inputs.as_slice().iter().chain(targets.as_slice()).all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("patterns must be finite".into()));
        }
        Ok(NormalizedSet { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.targets.cols()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        self.inputs.row(i)
    }

    pub fn target(&self, i: usize) -> &[f64] {
        self.targets.row(i)
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn targets(&self) -> &Matrix {
        &self.targets
    }
}

#[cfg(test)]
mod tests {
    use super::super::Sample;
    use super::*;
    use proptest::prelude::*;

    fn two_rows(a: [f64; 5], b: [f64; 5]) -> Dataset {
        Dataset::new(vec![Sample::from_values(a), Sample::from_values(b)], "t").unwrap()
    }

    fn fixture_spec() -> NormalizationSpec {
        let ds = two_rows([1.0, 60.0, 60.0, 0.0, 10.0], [3.0, 110.0, 110.0, 10.0, 20.0]);
        NormalizationSpec::fit(&ds).unwrap()
    }

    #[test]
    fn affine_map_hand_values() {
        let spec = fixture_spec();
        let c = Column::Rotation;
        assert_eq!(spec.normalize_value(c, 0.0), 0.1);
        assert_eq!(spec.normalize_value(c, 10.0), 0.9);
        assert!((spec.normalize_value(c, 5.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn denormalize_output_midpoint() {
        // target range [10, 20]
        assert_eq!(fixture_spec().denormalize_output(0.5), 15.0);
    }

    #[test]
    fn extrapolates_without_clamping() {
        let spec = fixture_spec();
        assert!(spec.normalize_value(Column::Rotation, 20.0) > 0.9);
        assert!(spec.normalize_value(Column::Rotation, -5.0) < 0.1);
    }

    #[test]
    fn constant_column_named() {
        let ds = two_rows([1.0, 60.0, 70.0, 0.0, 10.0], [3.0, 60.0, 110.0, 10.0, 20.0]);
        let err = NormalizationSpec::fit(&ds).unwrap_err();
        assert!(matches!(err, Error::ConstantColumn("feed_temp_c")));
    }

    #[test]
    fn normalized_training_rows_stay_in_band() {
        let ds = crate::data::generate_synthetic(200, 4, 0.01).unwrap();
        let spec = NormalizationSpec::fit(&ds).unwrap();
        let set = spec.normalize(&ds).unwrap();
        for v in set.inputs().as_slice().iter().chain(set.targets().as_slice()) {
            assert!((0.1 - 1e-15..=0.9 + 1e-15).contains(v), "{v}");
        }
    }

    #[test]
    fn target_column_round_trip() {
        let ds = crate::data::generate_synthetic(100, 5, 0.02).unwrap();
        let spec = NormalizationSpec::fit(&ds).unwrap();
        let set = spec.normalize(&ds).unwrap();
        for (i, s) in ds.samples().iter().enumerate() {
            let back = spec.denormalize_output(set.target(i)[0]);
            assert!((back - s.product_flow).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn round_trip_within_range(t in 0.0f64..=1.0, col in 0usize..5) {
            let spec = fixture_spec();
            let c = Column::ALL[col];
            let r = spec.range(c);
            let v = r.min + t * (r.max - r.min);
            let back = spec.denormalize_value(c, spec.normalize_value(c, v));
            prop_assert!((back - v).abs() < 1e-12);
        }

        #[test]
        fn map_is_affine(a in 0.0f64..10.0, b in 0.0f64..10.0, alpha in 0.0f64..=1.0) {
            let spec = fixture_spec();
            let c = Column::Rotation;
            let lhs = spec.normalize_value(c, alpha * a + (1.0 - alpha) * b);
            let rhs = alpha * spec.normalize_value(c, a) + (1.0 - alpha) * spec.normalize_value(c, b);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
