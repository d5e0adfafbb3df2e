//! A channel on which every plug-in learner fails with probability above
//! `delta`, although its mutual information exceeds `epsilon`.

use alloc::vec;

use crate::error::{Error, Result};
use crate::info::binary_entropy;
use crate::math::powf;
use crate::prob::{Channel, Pmf};

/// Input distribution, channel and noise level of the construction.
///
/// Symbols `a = 0`, `a' = 1` carry the input mass; `b = 0`, `b' = 1` are the
/// only reachable outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Adversary {
    pub p: Pmf,
    pub w: Channel,
    pub tau: f64,
    /// Largest `tau` in `(0, 1/2]` with `1 - h(tau) >= epsilon`.
    pub tau_entropy_limit: f64,
    /// `2 (1 - (delta + 2^-n)^{1/n})`.
    pub tau_sample_limit: f64,
    /// `(1 - p(a) w(b|a))^n - (1 - p(a))^n` at the chosen `tau`.
    pub zero_rate_bound: f64,
}

/// `(1 - p_a w_ba)^n - (1 - p_a)^n`, a lower bound on the probability that
/// the plug-in metric has a zero on a cell of positive probability.
pub fn lemma2_bound(p_a: f64, w_ba: f64, n: u64) -> f64 {
    let n = n as f64;
    powf(1.0 - p_a * w_ba, n) - powf(1.0 - p_a, n)
}

/// Solves `h(tau) = 1 - epsilon` on `(0, 1/2)` by bisection.
fn entropy_threshold(epsilon: f64) -> f64 {
    let target = 1.0 - epsilon;
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn check(epsilon: f64, delta: f64, n: u64, x_size: usize, y_size: usize) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::ParameterRange("epsilon must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::ParameterRange("delta must lie in (0, 1/2)"));
    }
    if n == 0 {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    if x_size < 2 || y_size < 2 {
        return Err(Error::ParameterRange(
            "both alphabets need at least two symbols",
        ));
    }
    Ok(())
}

fn tau_limits(epsilon: f64, delta: f64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let sample = 2.0 * (1.0 - powf(delta + powf(2.0, -nf), 1.0 / nf));
    (entropy_threshold(epsilon), sample)
}

/// Builds the construction with `tau` at the midpoint of the feasible
/// interval `(0, min(limits))`.
pub fn adversarial_channel(
    epsilon: f64,
    delta: f64,
    n: u64,
    x_size: usize,
    y_size: usize,
) -> Result<Adversary> {
    check(epsilon, delta, n, x_size, y_size)?;
    let (he, hs) = tau_limits(epsilon, delta, n);
    let upper = he.min(hs);
    assert!(upper > 0.0, "empty feasible interval for tau");
    build(0.5 * upper, he, hs, n, x_size, y_size)
}

/// Builds the construction at a caller-chosen `tau`, which must be feasible.
pub fn adversarial_channel_with_tau(
    epsilon: f64,
    delta: f64,
    n: u64,
    x_size: usize,
    y_size: usize,
    tau: f64,
) -> Result<Adversary> {
    check(epsilon, delta, n, x_size, y_size)?;
    let (he, hs) = tau_limits(epsilon, delta, n);
    if !(tau > 0.0 && tau < hs && 1.0 - binary_entropy(tau) > epsilon) {
        return Err(Error::ParameterRange(
            "tau needs 1 - h(tau) > epsilon and tau < 2(1 - (delta + 2^-n)^(1/n))",
        ));
    }
    build(tau, he, hs, n, x_size, y_size)
}

fn build(
    tau: f64,
    tau_entropy_limit: f64,
    tau_sample_limit: f64,
    n: u64,
    x_size: usize,
    y_size: usize,
) -> Result<Adversary> {
    let mut probs = vec![0.0; x_size];
    probs[0] = 0.5;
    probs[1] = 0.5;
    let p = Pmf::new(probs)?;

    let mut data = vec![0.0; x_size * y_size];
    for x in 0..x_size {
        let (to_b, to_b_prime) = if x == 0 { (tau, 1.0 - tau) } else { (1.0 - tau, tau) };
        data[x * y_size] = to_b;
        data[x * y_size + 1] = to_b_prime;
    }
    let w = Channel::from_flat(x_size, y_size, data)?;

    Ok(Adversary {
        p,
        w,
        tau,
        tau_entropy_limit,
        tau_sample_limit,
        zero_rate_bound: lemma2_bound(0.5, tau, n),
    })
}
