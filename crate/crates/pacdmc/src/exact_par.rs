//! Parallel evaluation of the exact rate distribution.

use pacdmc_core::exact::{composition_count, Atom, ExactJob, GROUPING_TOL};
use pacdmc_core::{Channel, Composition, ExchangeableLearner, Pmf, RatePmf, SolverConfig};
use rayon::prelude::*;

/// Compositions handed to one worker at a time.
const CHUNK: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error("{count} compositions exceed the cap of {cap}")]
    TooManyCompositions { count: u128, cap: u128 },
    #[error(transparent)]
    Core(#[from] pacdmc_core::Error),
}

/// Enumerates every composition of `n` into `cells`, refusing above `cap`.
pub fn compositions(n: u64, cells: usize, cap: u128) -> Result<Vec<Composition>, ExactError> {
    let count = composition_count(n, cells).unwrap_or(u128::MAX);
    if count > cap {
        return Err(ExactError::TooManyCompositions { count, cap });
    }
    Ok(pacdmc_core::exact::enumerate_all(n, cells)?.collect())
}

/// Atoms of `compositions` in input order; chunks are solved in parallel on
/// the current rayon pool and concatenated in chunk order.
pub fn atoms<L: ExchangeableLearner + ?Sized>(
    job: &ExactJob<'_, L>,
    compositions: &[Composition],
) -> Result<Vec<Atom>, ExactError> {
    let chunks: Vec<Vec<Atom>> = compositions
        .par_chunks(CHUNK)
        .map(|chunk| job.evaluate_all(chunk.iter().cloned()))
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Same result as `pacdmc_core::exact::exact_rate_pmf` for any thread count.
pub fn exact_rate_pmf<L: ExchangeableLearner + ?Sized>(
    learner: &L,
    p: &Pmf,
    w: &Channel,
    n: u64,
    cfg: &SolverConfig,
    cap: u128,
) -> Result<RatePmf, ExactError> {
    let job = ExactJob::new(learner, p, w, n, *cfg)?;
    let all = compositions(n, job.cells(), cap)?;
    Ok(RatePmf::from_atoms(atoms(&job, &all)?, GROUPING_TOL))
}
