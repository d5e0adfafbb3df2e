//! Learning algorithms that map a training set to a decoding metric (and,
//! for VSEE, a code rate), plus their sample-size calculators.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::info::miller_madow_counts;
use crate::math::powf;
use crate::prob::{DecodingMetric, TrainingSet};

mod adversary;
mod bounds;

pub use adversary::{adversarial_channel, adversarial_channel_with_tau, lemma2_bound, Adversary};
pub use bounds::{
    optimal_alpha, rho, vsa_sample_size, vsa_sample_size_bound, vsee_conditions, vsee_nu,
    vsee_sample_size_ok, RuleOfThumb, VseeConditions,
};

/// A learner whose output depends on the training set only through its
/// count table.
///
/// The exact-distribution machinery evaluates learners on one canonical
/// sequence per count table, which is only valid under this contract. It is
/// declared, not checked.
pub trait ExchangeableLearner: Sync {
    fn learn(&self, train: &TrainingSet) -> DecodingMetric;
}

/// Plug-in learner: `k(x, y) = N(x, y) / N(x)`, or `1 / |Y|` for inputs that
/// never occur.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlugIn;

/// Virtual-sample learner: `k(x, y) = N(x, y) + n^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualSample {
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VseeParams {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerOutput {
    pub metric: DecodingMetric,
    /// Code rate in bits; only VSEE produces one.
    pub rate: Option<f64>,
}

impl ExchangeableLearner for PlugIn {
    fn learn(&self, train: &TrainingSet) -> DecodingMetric {
        plug_in(train)
    }
}

impl ExchangeableLearner for VirtualSample {
    fn learn(&self, train: &TrainingSet) -> DecodingMetric {
        virtual_sample(train, self.alpha)
    }
}

pub fn plug_in(train: &TrainingSet) -> DecodingMetric {
    let counts = train.counts();
    let (ni, no) = (counts.inputs(), counts.outputs());
    let mut values = Vec::with_capacity(ni * no);
    for x in 0..ni {
        let row = counts.row_total(x);
        if row == 0 {
            values.extend(core::iter::repeat_n(1.0 / no as f64, no));
        } else {
            values.extend((0..no).map(|y| counts.get(x, y) as f64 / row as f64));
        }
    }
    DecodingMetric::from_flat(ni, no, values).expect("rows are normalized")
}

/// Any real `alpha` is accepted; guarantees only hold for `1/2 < alpha < 1`.
pub fn virtual_sample(train: &TrainingSet, alpha: f64) -> DecodingMetric {
    let counts = train.counts();
    let virtual_count = powf(counts.n() as f64, alpha);
    let values = counts
        .as_flat()
        .iter()
        .map(|&c| c as f64 + virtual_count)
        .collect();
    DecodingMetric::from_flat(counts.inputs(), counts.outputs(), values)
        .expect("entries are at least n^alpha > 0")
}

/// Virtual sample and entropy estimation.
///
/// Returns the virtual-sample metric and the rate
/// `H_MM(x) + H_MM(y) - H_MM(x, y) - n^-beta`, which may be negative.
pub fn vsee(train: &TrainingSet, params: VseeParams) -> Result<LearnerOutput> {
    let n = train.n() as u64;
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    let counts = train.counts();
    let (ni, no) = (counts.inputs(), counts.outputs());
    let hx = miller_madow_counts(&counts.x_counts(), ni)?;
    let hy = miller_madow_counts(&counts.y_counts(), no)?;
    let hxy = miller_madow_counts(counts.as_flat(), ni * no)?;
    let estimate = hx.value + hy.value - hxy.value;
    Ok(LearnerOutput {
        metric: virtual_sample(train, params.alpha),
        rate: Some(estimate - powf(n as f64, -params.beta)),
    })
}
