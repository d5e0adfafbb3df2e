//! Exact distribution of the LM rate over all training sets of a given size.
//!
//! A training set of `n` i.i.d. pairs enters an exchangeable learner only
//! through its count table, i.e. through a composition `(c_0, ..., c_{J-1})`
//! of `n` into `J = |X||Y|` cells ordered row-major. Enumerating the
//! compositions and weighting each by its multinomial probability gives the
//! rate distribution without sampling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::learners::ExchangeableLearner;
use crate::lmrate::{lm_rate, SolverConfig, Status};
use crate::math::{exp, ln, ln_gamma};
use crate::prob::{Channel, CountTable, Pmf, TrainingSet};

/// Default tolerance, in bits, under which distinct rates share one atom.
pub const GROUPING_TOL: f64 = 1e-9;

/// Cell counts summing to `n`. Cell `j` is the pair `(j / |Y|, j % |Y|)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<u64>,
    n: u64,
}

impl Composition {
    /// `(n, 0, ..., 0)`, the composition of least `(n+1)`-ary value.
    pub fn first(n: u64, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if n == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let mut parts = vec![0; cells];
        parts[0] = n;
        Ok(Self { parts, n })
    }

    pub fn from_parts(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let n = parts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or(Error::SampleSizeOverflow)?;
        if n == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        Ok(Self { parts, n })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.parts.len()
    }

    /// All mass in the last cell.
    pub fn is_last(&self) -> bool {
        self.parts[self.parts.len() - 1] == self.n
    }

    /// `sum_j c_j (n+1)^j`, or `None` if it does not fit in 128 bits.
    pub fn radix_value(&self) -> Option<u128> {
        let base = u128::from(self.n) + 1;
        let mut value = 0u128;
        for &c in self.parts.iter().rev() {
            value = value.checked_mul(base)?.checked_add(u128::from(c))?;
        }
        Some(value)
    }

    /// Steps in place to the composition with the next larger `(n+1)`-ary
    /// value. Returns `false`, leaving `self` untouched, if this is the last.
    pub fn advance(&mut self) -> bool {
        if self.is_last() {
            return false;
        }
        let l = self
            .parts
            .iter()
            .position(|&c| c > 0)
            .expect("a composition of n >= 1 has a positive part");
        let c_l = self.parts[l];
        self.parts[l] = 0;
        self.parts[l + 1] += 1;
        self.parts[0] = c_l - 1;
        true
    }

    pub fn successor(&self) -> Option<Self> {
        let mut next = self.clone();
        next.advance().then_some(next)
    }

    pub fn to_count_table(&self, inputs: usize, outputs: usize) -> Result<CountTable> {
        CountTable::from_flat(inputs, outputs, self.parts.clone())
    }
}

/// All compositions of `n` into a fixed number of cells, in increasing
/// `(n+1)`-ary value.
#[derive(Debug, Clone)]
pub struct Compositions {
    next: Option<Composition>,
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let current = self.next.take()?;
        self.next = current.successor();
        Some(current)
    }
}

pub fn enumerate_all(n: u64, cells: usize) -> Result<Compositions> {
    Ok(Compositions {
        next: Some(Composition::first(n, cells)?),
    })
}

/// `binom(n + cells - 1, cells - 1)`, or `None` on overflow.
pub fn composition_count(n: u64, cells: usize) -> Option<u128> {
    if cells == 0 {
        return None;
    }
    let k = (cells - 1) as u128;
    let n = u128::from(n);
    let mut count = 1u128;
    for i in 1..=k {
        // count * (n + i) is divisible by i at every step.
        count = count.checked_mul(n + i)? / i;
    }
    Some(count)
}

/// Rate of one composition together with its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub rate: f64,
    pub prob: f64,
    pub status: Status,
}

/// Everything needed to turn compositions into atoms: the true channel, the
/// learner and the log cell probabilities. Shared read-only between workers.
pub struct ExactJob<'a, L: ExchangeableLearner + ?Sized> {
    p: &'a Pmf,
    w: &'a Channel,
    learner: &'a L,
    cfg: SolverConfig,
    n: u64,
    ln_cell: Vec<f64>,
    ln_n_factorial: f64,
}

impl<'a, L: ExchangeableLearner + ?Sized> ExactJob<'a, L> {
    pub fn new(
        learner: &'a L,
        p: &'a Pmf,
        w: &'a Channel,
        n: u64,
        cfg: SolverConfig,
    ) -> Result<Self> {
        if p.len() != w.inputs() {
            return Err(Error::AlphabetMismatch(
                "input distribution and channel disagree on |X|",
            ));
        }
        if n == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        cfg.validate()?;
        let outputs = w.outputs();
        let ln_cell = (0..w.inputs() * outputs)
            .map(|j| {
                let pi = p.get(j / outputs) * w.get(j / outputs, j % outputs);
                if pi > 0.0 {
                    ln(pi)
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        Ok(Self {
            p,
            w,
            learner,
            cfg,
            n,
            ln_cell,
            ln_n_factorial: ln_gamma(n as f64 + 1.0),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.ln_cell.len()
    }

    pub fn compositions(&self) -> Compositions {
        enumerate_all(self.n, self.cells()).expect("n and cells validated in new")
    }

    /// Multinomial probability of drawing exactly these counts.
    pub fn probability(&self, c: &Composition) -> f64 {
        let mut log_prob = self.ln_n_factorial;
        for (&count, &ln_pi) in c.parts().iter().zip(&self.ln_cell) {
            if count == 0 {
                continue;
            }
            if ln_pi == f64::NEG_INFINITY {
                return 0.0;
            }
            log_prob += count as f64 * ln_pi - ln_gamma(count as f64 + 1.0);
        }
        exp(log_prob)
    }

    /// The atom of one composition; `None` when it has probability zero.
    pub fn evaluate(&self, c: &Composition) -> Result<Option<Atom>> {
        if c.n() != self.n || c.cells() != self.cells() {
            return Err(Error::LengthMismatch {
                expected: self.cells(),
                got: c.cells(),
            });
        }
        let prob = self.probability(c);
        if prob == 0.0 {
            return Ok(None);
        }
        let counts = c.to_count_table(self.w.inputs(), self.w.outputs())?;
        let train = TrainingSet::canonical(&counts)?;
        let k = self.learner.learn(&train);
        let cert = lm_rate(self.p, self.w, &k, &self.cfg)?;
        Ok(Some(Atom {
            rate: cert.value,
            prob,
            status: cert.status,
        }))
    }

    /// Atoms of a run of compositions, in the given order.
    pub fn evaluate_all<I>(&self, compositions: I) -> Result<Vec<Atom>>
    where
        I: IntoIterator<Item = Composition>,
    {
        let mut atoms = Vec::new();
        for c in compositions {
            if let Some(atom) = self.evaluate(&c)? {
                atoms.push(atom);
            }
        }
        Ok(atoms)
    }
}

/// Exact PMF of `R_LM(p, w, learner(S))` for `S` of `n` i.i.d. pairs.
///
/// Cost is one solve per composition of positive probability, at most
/// `binom(n + |X||Y| - 1, |X||Y| - 1)`.
pub fn exact_rate_pmf<L: ExchangeableLearner + ?Sized>(
    learner: &L,
    p: &Pmf,
    w: &Channel,
    n: u64,
    cfg: &SolverConfig,
) -> Result<RatePmf> {
    let job = ExactJob::new(learner, p, w, n, *cfg)?;
    let atoms = job.evaluate_all(job.compositions())?;
    Ok(RatePmf::from_atoms(atoms, GROUPING_TOL))
}

/// One grouped atom of a [`RatePmf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateAtom {
    /// Smallest rate in the group.
    pub rate: f64,
    pub prob: f64,
    /// Part of `prob` from rates that were not certified.
    pub uncertified_prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePmf {
    atoms: Vec<RateAtom>,
    tolerance: f64,
    uncertified_count: usize,
}

impl RatePmf {
    /// Groups raw atoms. After a stable sort by rate, each group starts at an
    /// anchor and absorbs every following rate within `tolerance` of it, so
    /// no rate moves by more than `tolerance`. The result depends only on the
    /// order of `atoms`, not on how they were produced.
    pub fn from_atoms(mut atoms: Vec<Atom>, tolerance: f64) -> Self {
        atoms.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        let mut grouped: Vec<RateAtom> = Vec::new();
        let mut uncertified_count = 0;
        for atom in atoms {
            let bad = matches!(atom.status, Status::IterationLimit);
            if bad {
                uncertified_count += 1;
            }
            let bad_prob = if bad { atom.prob } else { 0.0 };
            match grouped.last_mut() {
                Some(g) if atom.rate - g.rate <= tolerance => {
                    g.prob += atom.prob;
                    g.uncertified_prob += bad_prob;
                }
                _ => grouped.push(RateAtom {
                    rate: atom.rate,
                    prob: atom.prob,
                    uncertified_prob: bad_prob,
                }),
            }
        }
        Self {
            atoms: grouped,
            tolerance,
            uncertified_count,
        }
    }

    pub fn atoms(&self) -> &[RateAtom] {
        &self.atoms
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    /// Running sums `(rate, P[R <= rate])` at each atom.
    pub fn cdf(&self) -> Vec<(f64, f64)> {
        let mut total = 0.0;
        self.atoms
            .iter()
            .map(|a| {
                total += a.prob;
                (a.rate, total)
            })
            .collect()
    }

    pub fn prob_at_most(&self, rate: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.rate <= rate)
            .map(|a| a.prob)
            .sum()
    }

    pub fn prob_greater(&self, rate: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.rate > rate)
            .map(|a| a.prob)
            .sum()
    }

    /// Mass of rates within the grouping tolerance of zero.
    pub fn prob_zero(&self) -> f64 {
        self.prob_at_most(self.tolerance)
    }

    pub fn uncertified_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.uncertified_prob).sum()
    }

    /// Number of compositions whose rate hit the iteration limit.
    pub fn uncertified_count(&self) -> usize {
        self.uncertified_count
    }
}
