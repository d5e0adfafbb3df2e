//! Seeded sampling of training sets.
//!
//! Every trial draws from its own ChaCha8 stream, selected by the trial
//! index under a common master seed, so results do not depend on how trials
//! are scheduled across threads.

use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prob::{joint_of, Channel, Pmf, TrainingSet};

/// Identifier recorded in run manifests.
pub const RNG_ALGORITHM: &str = "rand_chacha 0.9 ChaCha8Rng; seed_from_u64(master), stream = trial";

/// The generator for trial `stream` under `master`.
pub fn trial_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Draws i.i.d. pairs from `p x w`, indexing cells row-major.
#[derive(Debug, Clone)]
pub struct JointSampler {
    inputs: usize,
    outputs: usize,
    cells: WeightedIndex<f64>,
}

impl JointSampler {
    pub fn new(p: &Pmf, w: &Channel) -> Result<Self> {
        let joint = joint_of(p, w)?;
        let cells = WeightedIndex::new(joint.as_flat().iter().copied())
            .map_err(|_| Error::NotNormalized { sum: 0.0 })?;
        Ok(Self {
            inputs: w.inputs(),
            outputs: w.outputs(),
            cells,
        })
    }

    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let j = self.cells.sample(rng);
        (j / self.outputs, j % self.outputs)
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> TrainingSet {
        let pairs = (0..n).map(|_| self.sample_pair(rng)).collect();
        TrainingSet::new(self.inputs, self.outputs, pairs).expect("sampled symbols are in range")
    }
}

pub fn sample_training_set<R: Rng + ?Sized>(
    p: &Pmf,
    w: &Channel,
    n: usize,
    rng: &mut R,
) -> Result<TrainingSet> {
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    Ok(JointSampler::new(p, w)?.sample(n, rng))
}

/// Training set of trial `stream` under `master`.
pub fn sample_training_set_seeded(
    p: &Pmf,
    w: &Channel,
    n: usize,
    master: u64,
    stream: u64,
) -> Result<TrainingSet> {
    sample_training_set(p, w, n, &mut trial_rng(master, stream))
}

/// `n` i.i.d. symbols from `p`.
pub fn sample_symbols<R: Rng + ?Sized>(p: &Pmf, n: usize, rng: &mut R) -> Result<Vec<usize>> {
    let dist = WeightedIndex::new(p.probs().iter().copied())
        .map_err(|_| Error::NotNormalized { sum: 0.0 })?;
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}
