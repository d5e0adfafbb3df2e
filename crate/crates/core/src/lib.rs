//! Learning decoding metrics and code rates for discrete memoryless channels
//! (DMCs) whose transition law is only known through i.i.d. input-output
//! samples.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every numeric kernel:
//!
//! - [`prob`]: finite-alphabet PMFs, channels, joint tables, training sets and
//!   their empirical distributions.
//! - [`info`]: entropy, mutual information and the Miller-Madow estimator.
//! - [`lmrate`]: the LM rate of a decoding metric, solved as an I-projection
//!   and certified by an explicit dual lower bound.
//! - [`learners`]: plug-in, virtual-sample and VSEE learners together with
//!   their sample-size calculators and the plug-in failure construction.
//! - [`exact`]: exact distribution of the LM rate of an exchangeable learner
//!   by enumerating every count table of size `n`.
//! - [`sampling`]: seeded, stream-split sampling of training sets.
//!
//! All information quantities are in bits.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod exact;
pub mod info;
pub mod learners;
pub mod lmrate;
pub mod prob;
pub mod sampling;

pub use error::{Error, Result};
pub use exact::{Atom, Composition, Compositions, RateAtom, RatePmf};
pub use info::EntropyEstimate;
pub use learners::{ExchangeableLearner, LearnerOutput, PlugIn, VirtualSample, VseeParams};
pub use lmrate::{LmRateCertificate, SolverConfig, Status};
pub use prob::{
    Alphabet, Channel, CountTable, DecodingMetric, JointPmf, Pmf, TrainingSet, PROB_TOL,
};
