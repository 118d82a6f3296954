//! Synthetic stand-in for plant records.
//!
//! Product flow (m^3/hr) is a smooth closed-form function of the operating
//! conditions:
//!
//! ```text
//! Q(s, Tf, Ts, N) = 8
//!                 + 6 (1 - exp(-0.7 s))
//!                 + 3 (1 - exp(-N / 50))
//!                 + 0.02 (Tf - 85) - 0.0004 (Tf - 85)^2
//!                 + 0.015 (Ts - 85) - 0.0003 (Ts - 85)^2
//! ```
//!
//! with `s` the solvent/feed ratio, `Tf`/`Ts` the feed and solvent
//! temperatures in degrees C and `N` the rotation rate in rpm. `Q` is strictly
//! increasing in `s` and `N` and concave in both temperatures. Noisy samples
//! use `Q * (1 + noise_sd * z)` with `z ~ N(0, 1)`, redrawing `z` until the
//! flow is positive. The constants describe no real column.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, Sample};
use crate::error::{Error, Result};

const MAX_NOISE_REDRAWS: usize = 10_000;

/// The closed-form surrogate `Q(s, Tf, Ts, N)`.
pub fn surrogate_flow(sf_ratio: f64, feed_temp: f64, solvent_temp: f64, rotation: f64) -> f64 {
    let tf = feed_temp - 85.0;
    let ts = solvent_temp - 85.0;
    8.0 + 6.0 * (1.0 - (-0.7 * sf_ratio).exp())
        + 3.0 * (1.0 - (-rotation / 50.0).exp())
        + 0.02 * tf
        - 0.0004 * tf * tf
        + 0.015 * ts
        - 0.0003 * ts * ts
}

/// Closed intervals the inputs are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateRanges {
    pub sf_ratio: (f64, f64),
    pub feed_temp: (f64, f64),
    pub solvent_temp: (f64, f64),
    pub rotation: (f64, f64),
}

impl Default for SurrogateRanges {
    fn default() -> Self {
        SurrogateRanges {
            sf_ratio: (1.0, 3.0),
            feed_temp: (60.0, 110.0),
            solvent_temp: (60.0, 110.0),
            rotation: (10.0, 60.0),
        }
    }
}

impl SurrogateRanges {
    fn as_array(&self) -> [(&'static str, (f64, f64)); 4] {
        [
            ("sf_ratio", self.sf_ratio),
            ("feed_temp", self.feed_temp),
            ("solvent_temp", self.solvent_temp),
            ("rotation", self.rotation),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in self.as_array() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "range for {name} must be finite with lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        if self.sf_ratio.0 <= 0.0 {
            return Err(Error::InvalidConfig("sf_ratio range must be > 0".into()));
        }
        if self.rotation.0 < 0.0 {
            return Err(Error::InvalidConfig("rotation range must be >= 0".into()));
        }
        Ok(())
    }
}

pub fn generate_synthetic(n: usize, seed: u64, noise_sd: f64) -> Result<Dataset> {
    generate_synthetic_with(n, seed, noise_sd, &SurrogateRanges::default())
}

/// Inputs and noise come from independent ChaCha8 streams of the same seed, so
/// the drawn operating points do not depend on `noise_sd`.
pub fn generate_synthetic_with(
    n: usize,
    seed: u64,
    noise_sd: f64,
    ranges: &SurrogateRanges,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be >= 1".into()));
    }
    if !(noise_sd.is_finite() && noise_sd >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "noise_sd must be finite and >= 0, got {noise_sd}"
        )));
    }
    ranges.validate()?;

    let mut input_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
    noise_rng.set_stream(1);

    let mut samples = Vec::with_capacity(n);
    for row in 1..=n {
        let [s, tf, ts, rot] = ranges
            .as_array()
            .map(|(_, (lo, hi))| input_rng.random_range(lo..=hi));
        let clean = surrogate_flow(s, tf, ts, rot);
        if clean <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "surrogate flow is non-positive ({clean}) at row {row}; narrow the input ranges"
            )));
        }
        let product_flow = if noise_sd == 0.0 {
            clean
        } else {
            noisy(clean, noise_sd, &mut noise_rng).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "noise_sd {noise_sd} cannot produce a positive flow at row {row}"
                ))
            })?
        };
        samples.push(Sample {
            sf_ratio: s,
            feed_temp: tf,
            solvent_temp: ts,
            rotation: rot,
            product_flow,
        });
    }
    Dataset::new(
        samples,
        format!("synthetic(n={n}, seed={seed}, noise_sd={noise_sd})"),
    )
}

fn noisy(clean: f64, noise_sd: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
    (0..MAX_NOISE_REDRAWS).find_map(|_| {
        let z: f64 = StandardNormal.sample(rng);
        let q = clean * (1.0 + noise_sd * z);
        (q > 0.0).then_some(q)
    })
}
