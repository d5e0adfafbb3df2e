//! Experiment harnesses: VSEE trials and virtual-sample success sweeps.

use pacdmc_core::exact::{composition_count, ExactJob};
use pacdmc_core::info::mutual_information;
use pacdmc_core::learners::{vsee, VirtualSample};
use pacdmc_core::lmrate::lm_rate;
use pacdmc_core::sampling::{trial_rng, JointSampler};
use pacdmc_core::{Channel, Pmf, SolverConfig, Status, VseeParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_par::{self, ExactError};

/// Above this many compositions a sweep falls back to sampling.
pub const EXACT_SWEEP_CAP: u128 = 100_000;

/// The swept virtual-sample exponents `{0.5, 0.5325, 0.55, 0.6, ..., 0.95}`.
pub fn default_alphas() -> Vec<f64> {
    let mut alphas = vec![0.5, 0.5325, 0.55];
    alphas.extend((12..=19).map(|i| i as f64 * 0.05));
    alphas
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub p: Pmf,
    pub w: Channel,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub solver: SolverConfig,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<(), ExactError> {
        if self.trials == 0 {
            return Err(pacdmc_core::Error::ParameterRange("trials must be positive").into());
        }
        if self.n == 0 {
            return Err(pacdmc_core::Error::EmptyTrainingSet.into());
        }
        self.solver.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub lm_rate: f64,
    pub rate: Option<f64>,
    pub status: String,
    /// `I(p, w) - eps <= R <= lm_rate`; `None` when the LM rate was not
    /// certified.
    pub success: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VseeSummary {
    pub records: Vec<TrialRecord>,
    pub mutual_information: f64,
    pub successes: usize,
    pub uncertified: usize,
}

impl VseeSummary {
    /// Successes over trials with a certified LM rate.
    pub fn success_fraction(&self) -> f64 {
        let counted = self.records.len() - self.uncertified;
        if counted == 0 {
            return f64::NAN;
        }
        self.successes as f64 / counted as f64
    }
}

pub fn run_vsee_trials(spec: &ExperimentSpec, params: VseeParams) -> Result<VseeSummary, ExactError> {
    spec.validate()?;
    if spec.n < 2 {
        return Err(pacdmc_core::Error::TooFewSamples {
            min: 2,
            got: spec.n as u64,
        }
        .into());
    }
    let info = mutual_information(&spec.p, &spec.w)?;
    let sampler = JointSampler::new(&spec.p, &spec.w)?;
    let records: Vec<TrialRecord> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|t| -> Result<TrialRecord, ExactError> {
            let train = sampler.sample(spec.n, &mut trial_rng(spec.seed, t));
            let out = vsee(&train, params)?;
            let rate = out.rate.expect("VSEE reports a rate");
            let cert = lm_rate(&spec.p, &spec.w, &out.metric, &spec.solver)?;
            let success = match cert.status {
                Status::IterationLimit => None,
                _ => Some(info - spec.epsilon <= rate && rate <= cert.value),
            };
            Ok(TrialRecord {
                trial: t,
                lm_rate: cert.value,
                rate: Some(rate),
                status: cert.status.as_str().to_owned(),
                success,
            })
        })
        .collect::<Result<_, _>>()?;
    let successes = records.iter().filter(|r| r.success == Some(true)).count();
    let uncertified = records.iter().filter(|r| r.success.is_none()).count();
    Ok(VseeSummary {
        records,
        mutual_information: info,
        successes,
        uncertified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMethod {
    Exact,
    MonteCarlo,
}

impl SweepMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMethod::Exact => "exact",
            SweepMethod::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    /// `P[I(p, w) - eps <= R_LM(p, w, K)]`.
    pub success_prob: f64,
    /// Zero in exact mode.
    pub std_error: f64,
    /// Probability mass (exact) or fraction of trials (sampled) whose LM rate
    /// was not certified. Such mass is not counted as success.
    pub uncertified: f64,
    pub method: SweepMethod,
}

/// Success probability of the virtual-sample learner for each `alpha`.
///
/// Exact when the number of compositions is at most `exact_cap`; otherwise
/// `spec.trials` sampled training sets, shared across all `alpha`.
pub fn run_vsa_sweep(
    spec: &ExperimentSpec,
    alphas: &[f64],
    exact_cap: u128,
) -> Result<Vec<SweepRow>, ExactError> {
    spec.validate()?;
    let info = mutual_information(&spec.p, &spec.w)?;
    let threshold = info - spec.epsilon;
    let cells = spec.w.inputs() * spec.w.outputs();
    let count = composition_count(spec.n as u64, cells).unwrap_or(u128::MAX);
    if count <= exact_cap {
        let all = exact_par::compositions(spec.n as u64, cells, exact_cap)?;
        alphas
            .iter()
            .map(|&alpha| {
                let learner = VirtualSample { alpha };
                let job = ExactJob::new(&learner, &spec.p, &spec.w, spec.n as u64, spec.solver)?;
                let atoms = exact_par::atoms(&job, &all)?;
                let mut success = 0.0;
                let mut uncertified = 0.0;
                for a in &atoms {
                    if a.status == Status::IterationLimit {
                        uncertified += a.prob;
                    } else if a.rate >= threshold {
                        success += a.prob;
                    }
                }
                Ok(SweepRow {
                    alpha,
                    success_prob: success,
                    std_error: 0.0,
                    uncertified,
                    method: SweepMethod::Exact,
                })
            })
            .collect()
    } else {
        let sampler = JointSampler::new(&spec.p, &spec.w)?;
        let trials = spec.trials as f64;
        alphas
            .iter()
            .map(|&alpha| {
                let learner = VirtualSample { alpha };
                let outcomes: Vec<Option<bool>> = (0..spec.trials as u64)
                    .into_par_iter()
                    .map(|t| -> Result<Option<bool>, ExactError> {
                        let train = sampler.sample(spec.n, &mut trial_rng(spec.seed, t));
                        let k = pacdmc_core::ExchangeableLearner::learn(&learner, &train);
                        let cert = lm_rate(&spec.p, &spec.w, &k, &spec.solver)?;
                        Ok(match cert.status {
                            Status::IterationLimit => None,
                            _ => Some(cert.value >= threshold),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let hits = outcomes.iter().filter(|o| **o == Some(true)).count() as f64;
                let bad = outcomes.iter().filter(|o| o.is_none()).count() as f64;
                let prob = hits / trials;
                Ok(SweepRow {
                    alpha,
                    success_prob: prob,
                    std_error: (prob * (1.0 - prob) / trials).sqrt(),
                    uncertified: bad / trials,
                    method: SweepMethod::MonteCarlo,
                })
            })
            .collect()
    }
}
