//! Entropy, mutual information and the Miller-Madow estimator. All values
//! are in bits; `0 log 0` is taken as 0.

use alloc::vec;

use crate::error::{Error, Result};
use crate::math::{ln, log2, neg_xlog2x, sqrt, LOG2_E};
use crate::prob::{Channel, Pmf};

/// Entropy of a probability vector that is assumed to be normalized.
pub fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| neg_xlog2x(p)).sum()
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs())
}

/// `h(tau) = -tau log2 tau - (1 - tau) log2 (1 - tau)`.
pub fn binary_entropy(tau: f64) -> f64 {
    neg_xlog2x(tau) + neg_xlog2x(1.0 - tau)
}

/// `I(p, w) = H(pw) - sum_x p(x) H(w(.|x))`.
pub fn mutual_information(p: &Pmf, w: &Channel) -> Result<f64> {
    let pw = w.output_pmf(p)?;
    let conditional: f64 = p
        .support()
        .map(|x| p.get(x) * entropy_of(w.row(x)))
        .sum();
    Ok((entropy(&pw) - conditional).max(0.0))
}

/// Miller-Madow corrected entropy estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Plug-in entropy plus `correction`.
    pub value: f64,
    /// Entropy of the empirical PMF.
    pub plug_in: f64,
    /// `((alphabet_size - 1) / 2n) log2 e`.
    pub correction: f64,
    pub n: u64,
    pub alphabet_size: usize,
}

/// Bias correction `((l - 1) / 2n) log2 e`.
pub fn mm_correction(n: u64, alphabet_size: usize) -> f64 {
    (alphabet_size as f64 - 1.0) / (2.0 * n as f64) * LOG2_E
}

/// Miller-Madow estimate from symbol counts. `counts.len()` may be smaller
/// than `alphabet_size`; missing symbols are unseen.
pub fn miller_madow_counts(counts: &[u64], alphabet_size: usize) -> Result<EntropyEstimate> {
    if alphabet_size == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if counts.len() > alphabet_size {
        return Err(Error::LengthMismatch {
            expected: alphabet_size,
            got: counts.len(),
        });
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let nf = n as f64;
    let plug_in: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / nf;
            -f * log2(f)
        })
        .sum();
    let correction = mm_correction(n, alphabet_size);
    Ok(EntropyEstimate {
        value: plug_in + correction,
        plug_in,
        correction,
        n,
        alphabet_size,
    })
}

/// Miller-Madow estimate of the entropy of an i.i.d. sequence over an
/// alphabet of `alphabet_size` symbols.
pub fn miller_madow<I>(seq: I, alphabet_size: usize) -> Result<EntropyEstimate>
where
    I: IntoIterator<Item = usize>,
{
    if alphabet_size == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let mut counts = vec![0u64; alphabet_size];
    for symbol in seq {
        if symbol >= alphabet_size {
            return Err(Error::SymbolOutOfRange {
                symbol,
                size: alphabet_size,
            });
        }
        counts[symbol] += 1;
    }
    miller_madow_counts(&counts, alphabet_size)
}

/// High-probability bound on the Miller-Madow error:
/// `((l - 1) / 2n) log2 e + log2(n) sqrt((2/n) ln(2/delta))`.
///
/// With probability at least `1 - delta`, the estimate from `n >= 2` i.i.d.
/// samples is within this many bits of the true entropy.
pub fn mm_error_bound(n: u64, alphabet_size: usize, delta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    if alphabet_size == 0 {
        return Err(Error::EmptyAlphabet);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterRange("delta must lie in (0, 1)"));
    }
    let nf = n as f64;
    Ok(mm_correction(n, alphabet_size) + log2(nf) * sqrt(2.0 / nf * ln(2.0 / delta)))
}
