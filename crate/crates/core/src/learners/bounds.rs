//! Worst-case sample sizes for the virtual-sample and VSEE learners.

use crate::error::{Error, Result};
use crate::math::{ceil, exp, ln, log2, powf, sqrt, LN_2, LOG2_E};

fn check_eps_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::ParameterRange("epsilon must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterRange("delta must lie in (0, 1)"));
    }
    Ok(())
}

fn cells(x_size: usize, y_size: usize) -> Result<f64> {
    if x_size == 0 || y_size == 0 {
        return Err(Error::EmptyAlphabet);
    }
    Ok((x_size * y_size) as f64)
}

/// Real-valued virtual-sample sample size
/// `max((|X||Y| / (eps ln 2))^{1/(1-alpha)}, (ln(|X||Y|/delta) / 2)^{1/(2 alpha - 1)})`.
///
/// May be `+inf` when the first term overflows.
pub fn vsa_sample_size_bound(
    alpha: f64,
    epsilon: f64,
    delta: f64,
    x_size: usize,
    y_size: usize,
) -> Result<f64> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::ParameterRange("alpha must lie in (1/2, 1)"));
    }
    check_eps_delta(epsilon, delta)?;
    let j = cells(x_size, y_size)?;
    let accuracy = powf(j / (epsilon * LN_2), 1.0 / (1.0 - alpha));
    let confidence = powf(0.5 * ln(j / delta), 1.0 / (2.0 * alpha - 1.0));
    Ok(accuracy.max(confidence))
}

/// Smallest integer sample size meeting both virtual-sample conditions.
pub fn vsa_sample_size(
    alpha: f64,
    epsilon: f64,
    delta: f64,
    x_size: usize,
    y_size: usize,
) -> Result<u64> {
    let bound = ceil(vsa_sample_size_bound(alpha, epsilon, delta, x_size, y_size)?);
    if !(bound < u64::MAX as f64) {
        return Err(Error::SampleSizeOverflow);
    }
    Ok(bound as u64)
}

/// The hyper-parameter rule of thumb for the virtual-sample learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleOfThumb {
    pub zeta: f64,
    pub eta: f64,
    /// `(zeta + eta) / (2 zeta + eta)`, where the two sample-size terms meet.
    pub alpha: f64,
    /// `e^{zeta / (1 - alpha)}`, the minimized sample size.
    pub nu: f64,
}

pub fn optimal_alpha(
    epsilon: f64,
    delta: f64,
    x_size: usize,
    y_size: usize,
) -> Result<RuleOfThumb> {
    check_eps_delta(epsilon, delta)?;
    let j = cells(x_size, y_size)?;
    let zeta = ln(j / (epsilon * LN_2));
    let eta = ln(0.5 * ln(j / delta));
    if !(zeta > 0.0) {
        return Err(Error::ParameterRange(
            "zeta = ln(|X||Y| / (eps ln 2)) must be positive",
        ));
    }
    if !(eta > 0.0) {
        return Err(Error::ParameterRange(
            "eta = ln(ln(|X||Y| / delta) / 2) must be positive",
        ));
    }
    let alpha = (zeta + eta) / (2.0 * zeta + eta);
    Ok(RuleOfThumb {
        zeta,
        eta,
        alpha,
        nu: exp(zeta / (1.0 - alpha)),
    })
}

/// Combined Miller-Madow deviation of the three entropy estimates in VSEE,
/// `((|X||Y| + |X| + |Y| - 3) / 2n) log2 e + 3 log2(n) sqrt((2/n) ln(8/delta))`.
pub fn rho(n: u64, delta: f64, x_size: usize, y_size: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterRange("delta must lie in (0, 1)"));
    }
    cells(x_size, y_size)?;
    Ok(rho_real(n as f64, delta, x_size, y_size))
}

fn rho_real(n: f64, delta: f64, x_size: usize, y_size: usize) -> f64 {
    let bias = (x_size * y_size + x_size + y_size) as f64 - 3.0;
    bias / (2.0 * n) * LOG2_E + 3.0 * log2(n) * sqrt(2.0 / n * ln(8.0 / delta))
}

/// The three VSEE sample-size inequalities evaluated at one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VseeConditions {
    pub rho: f64,
    /// `ln 2 * n^{1-alpha} (n^-beta - rho) >= |X||Y|`.
    pub margin_ok: bool,
    /// `n^-beta + rho <= eps`.
    pub accuracy_ok: bool,
    /// `(ln(4|X||Y|/delta) / 2)^{1/(2 alpha - 1)} <= n`.
    pub confidence_ok: bool,
}

impl VseeConditions {
    pub fn all(&self) -> bool {
        self.margin_ok && self.accuracy_ok && self.confidence_ok
    }
}

fn check_vsee_region(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.5) {
        return Err(Error::ParameterRange("alpha must exceed 1/2"));
    }
    if !(beta > 0.0) {
        return Err(Error::ParameterRange("beta must be positive"));
    }
    if !(alpha + beta < 1.0) {
        return Err(Error::ParameterRange("alpha + beta must be below 1"));
    }
    Ok(())
}

fn conditions_real(
    n: f64,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    delta: f64,
    x_size: usize,
    y_size: usize,
) -> VseeConditions {
    let j = (x_size * y_size) as f64;
    let r = rho_real(n, delta, x_size, y_size);
    let margin = powf(n, -beta);
    VseeConditions {
        rho: r,
        margin_ok: LN_2 * powf(n, 1.0 - alpha) * (margin - r) >= j,
        accuracy_ok: margin + r <= epsilon,
        confidence_ok: powf(0.5 * ln(4.0 * j / delta), 1.0 / (2.0 * alpha - 1.0)) <= n,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn vsee_conditions(
    n: u64,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    delta: f64,
    x_size: usize,
    y_size: usize,
) -> Result<VseeConditions> {
    check_vsee_region(alpha, beta)?;
    check_eps_delta(epsilon, delta)?;
    cells(x_size, y_size)?;
    if n == 0 {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    Ok(conditions_real(
        n as f64, alpha, beta, epsilon, delta, x_size, y_size,
    ))
}

/// Whether all three VSEE sample-size inequalities hold at `n`.
pub fn vsee_sample_size_ok(
    n: u64,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    delta: f64,
    x_size: usize,
    y_size: usize,
) -> Result<bool> {
    Ok(vsee_conditions(n, alpha, beta, epsilon, delta, x_size, y_size)?.all())
}

/// Approximate VSEE sample size: the least `n` from which the three
/// inequalities hold at every point of the doubling grid up to `n_max`,
/// refined by bisection inside the last grid interval.
///
/// `None` when the conditions fail at `n_max`. The answer is only as good as
/// the grid: monotonicity between grid points is assumed, not proven.
#[allow(clippy::too_many_arguments)]
pub fn vsee_nu(
    alpha: f64,
    beta: f64,
    epsilon: f64,
    delta: f64,
    x_size: usize,
    y_size: usize,
    n_max: u64,
) -> Result<Option<u64>> {
    check_vsee_region(alpha, beta)?;
    check_eps_delta(epsilon, delta)?;
    cells(x_size, y_size)?;
    let ok = |n: u64| conditions_real(n as f64, alpha, beta, epsilon, delta, x_size, y_size).all();

    let mut grid = alloc::vec::Vec::new();
    let mut n = 1u64;
    while n < n_max {
        grid.push(n);
        n = n.saturating_mul(2);
    }
    grid.push(n_max.max(1));

    let Some(last_false) = grid.iter().rposition(|&n| !ok(n)) else {
        return Ok(Some(1));
    };
    if last_false + 1 == grid.len() {
        return Ok(None);
    }
    let (mut lo, mut hi) = (grid[last_false], grid[last_false + 1]);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
