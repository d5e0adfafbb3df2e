//! Certified computation of the LM rate
//!
//! ```text
//! R_LM(p, w, k) = min I(p, w~)  over w~ with  p w~ = p w,
//!                 E_{p x w~} log2 k >= E_{p x w} log2 k.
//! ```
//!
//! The minimization runs over the joint `q = p x w~`. With both marginals
//! pinned, `I(p, w~) = D(q || p (x) pw)` and the problem is an I-projection
//! onto two marginal constraints and one metric half-space. The optimum lies
//! in the exponential family
//!
//! ```text
//! q(x, y) = pw(y) p(x) k(x, y)^theta 2^{a(x)} / Z_y(theta, a)
//! ```
//!
//! whose parameters are exactly the variables of the dual lower bound
//! computed by [`dual_objective`]. For fixed `theta` the optimal `a` is found
//! by a damped Newton ascent on the (concave) dual, which amounts to
//! iterative proportional scaling of the rows. The metric expectation under
//! `q` is nondecreasing in `theta`, so the active multiplier is located by a
//! safeguarded regula falsi on `theta`, keeping the upper end of the bracket
//! primal feasible.
//!
//! Every returned value is accompanied by a dual point `(theta, a)` whose
//! objective is evaluated independently through [`dual_objective`]; the gap
//! between the two is what certifies the result.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::info::mutual_information;
use crate::math::{exp2, log2, log2_sum_exp2, sqrt, LN_2};
use crate::prob::{Channel, DecodingMetric, Pmf};

/// Tolerances and iteration budget of the LM-rate solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Certification threshold on `value - dual_value`, in bits.
    pub gap_tol: f64,
    /// Allowed violation of the marginal and metric constraints.
    pub feas_tol: f64,
    /// Budget of Newton iterations over the whole solve.
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            feas_tol: 1e-8,
            max_iter: 10_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0 && self.gap_tol.is_finite()) {
            return Err(Error::ParameterRange("gap_tol must be positive"));
        }
        if !(self.feas_tol > 0.0 && self.feas_tol.is_finite()) {
            return Err(Error::ParameterRange("feas_tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::ParameterRange("max_iter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// Gap and feasibility residuals are within tolerance.
    Certified,
    /// The metric vanishes on a cell of positive probability, so the rate is
    /// zero without any optimization.
    ZeroByLemma1,
    /// The iteration budget ran out before the gap closed. `value` is still a
    /// feasible upper bound and `dual_value` a valid lower bound.
    IterationLimit,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::ZeroByLemma1 => "zero-by-lemma1",
            Status::IterationLimit => "iteration-limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmRateCertificate {
    /// `I(p, primal_w)`, in bits.
    pub value: f64,
    /// Minimizing transition function.
    pub primal_w: Channel,
    pub dual_theta: f64,
    /// One entry per input symbol; entries outside `supp(p)` are zero and do
    /// not affect the dual objective.
    pub dual_a: Vec<f64>,
    /// [`dual_objective`] at `(dual_theta, dual_a)`.
    pub dual_value: f64,
    /// `value - dual_value`.
    pub gap: f64,
    pub status: Status,
    /// `max_y |(p primal_w)(y) - (p w)(y)|`.
    pub marginal_residual: f64,
    /// Shortfall of the metric expectation under `p x primal_w`, zero when
    /// the constraint holds.
    pub metric_residual: f64,
    pub iterations: usize,
}

fn check_shapes(p: &Pmf, w: &Channel, k: &DecodingMetric) -> Result<()> {
    if p.len() != w.inputs() {
        return Err(Error::AlphabetMismatch(
            "input distribution and channel disagree on |X|",
        ));
    }
    if k.inputs() != w.inputs() || k.outputs() != w.outputs() {
        return Err(Error::AlphabetMismatch(
            "decoding metric and channel disagree on X x Y",
        ));
    }
    Ok(())
}

/// A cell `(a, b)` with `p(a) w(b|a) > 0` and `k(a, b) = 0`, if any. Its
/// existence forces the LM rate to zero.
pub fn lemma1_zero_cell(p: &Pmf, w: &Channel, k: &DecodingMetric) -> Option<(usize, usize)> {
    for x in p.support() {
        for y in 0..w.outputs() {
            if w.get(x, y) > 0.0 && k.get(x, y) == 0.0 {
                return Some((x, y));
            }
        }
    }
    None
}

/// `E_{p x w} log2 k`, `-inf` when `k` vanishes on a cell of positive
/// probability.
pub fn metric_expectation(p: &Pmf, w: &Channel, k: &DecodingMetric) -> Result<f64> {
    check_shapes(p, w, k)?;
    let mut total = 0.0;
    for x in p.support() {
        for y in 0..w.outputs() {
            let mass = p.get(x) * w.get(x, y);
            if mass > 0.0 {
                let kv = k.get(x, y);
                if kv == 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                total += mass * log2(kv);
            }
        }
    }
    Ok(total)
}

/// Dual objective of the LM rate,
///
/// ```text
/// E_{p x w} log2( k^theta(X, Y) 2^{a(X)} / sum_x p(x) k^theta(x, Y) 2^{a(x)} ),
/// ```
///
/// which lower-bounds the LM rate for every `theta >= 0` and every `a`.
/// `k^0` is taken as 1 on every cell. Returns `f64::NEG_INFINITY` when
/// `theta > 0` and `k` vanishes on a cell of positive probability.
pub fn dual_objective(
    p: &Pmf,
    w: &Channel,
    k: &DecodingMetric,
    theta: f64,
    a: &[f64],
) -> Result<f64> {
    check_shapes(p, w, k)?;
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::ParameterRange("theta must be finite and >= 0"));
    }
    if a.len() != p.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            got: a.len(),
        });
    }
    let support: Vec<usize> = p.support().collect();
    let tilt = |x: usize, y: usize| -> f64 {
        if theta == 0.0 {
            0.0
        } else {
            let kv = k.get(x, y);
            if kv == 0.0 {
                f64::NEG_INFINITY
            } else {
                theta * log2(kv)
            }
        }
    };
    let mut total = 0.0;
    for y in 0..w.outputs() {
        let column_mass: f64 = support.iter().map(|&x| p.get(x) * w.get(x, y)).sum();
        if column_mass == 0.0 {
            continue;
        }
        let log_den = log2_sum_exp2(
            support
                .iter()
                .map(|&x| log2(p.get(x)) + tilt(x, y) + a[x]),
        );
        for &x in &support {
            let mass = p.get(x) * w.get(x, y);
            if mass == 0.0 {
                continue;
            }
            let num = tilt(x, y);
            if num == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            total += mass * (num + a[x] - log_den);
        }
    }
    Ok(total)
}

/// Sufficient condition for `I(p, w) - epsilon < R_LM(p, w, k)`: for every
/// `(x, y)` with `p(x) w(y|x) > 0`,
///
/// ```text
/// 2^{epsilon / (|Y| pw(y))} pw(y) k(x, y) > p(x) w(y|x) sum_x' k(x', y).
/// ```
pub fn lemma3_check(p: &Pmf, w: &Channel, k: &DecodingMetric, epsilon: f64) -> Result<bool> {
    check_shapes(p, w, k)?;
    if !(epsilon > 0.0) {
        return Err(Error::ParameterRange("epsilon must be positive"));
    }
    let pw = w.output_pmf(p)?;
    let ny = w.outputs() as f64;
    for x in p.support() {
        for y in 0..w.outputs() {
            let mass = p.get(x) * w.get(x, y);
            if mass == 0.0 {
                continue;
            }
            let py = pw.get(y);
            let column: f64 = (0..k.inputs()).map(|xx| k.get(xx, y)).sum();
            let lhs = exp2(epsilon / (ny * py)) * py * k.get(x, y);
            if !(lhs > mass * column) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Computes the LM rate with a primal-dual certificate.
///
/// Errors only on malformed input. Numerical trouble is reported through
/// [`Status::IterationLimit`], never by a silently wrong value.
pub fn lm_rate(
    p: &Pmf,
    w: &Channel,
    k: &DecodingMetric,
    cfg: &SolverConfig,
) -> Result<LmRateCertificate> {
    check_shapes(p, w, k)?;
    cfg.validate()?;
    let pw = w.output_pmf(p)?;

    if lemma1_zero_cell(p, w, k).is_some() {
        return trivial_certificate(p, w, k, product_channel(w, &pw), Status::ZeroByLemma1);
    }
    if p.support().nth(1).is_none() {
        // I(p, .) vanishes identically when p is a point mass.
        return trivial_certificate(p, w, k, w.clone(), Status::Certified);
    }

    let problem = Problem::new(p, w, k, &pw);
    Solver::new(&problem, p, w, k, cfg).run()
}

fn product_channel(w: &Channel, pw: &Pmf) -> Channel {
    let mut data = Vec::with_capacity(w.inputs() * w.outputs());
    for _ in 0..w.inputs() {
        data.extend_from_slice(pw.probs());
    }
    Channel::from_flat(w.inputs(), w.outputs(), data).expect("rows equal a valid PMF")
}

fn trivial_certificate(
    p: &Pmf,
    w: &Channel,
    k: &DecodingMetric,
    primal_w: Channel,
    status: Status,
) -> Result<LmRateCertificate> {
    let a = vec![0.0; p.len()];
    let dual_value = dual_objective(p, w, k, 0.0, &a)?;
    let (marginal_residual, metric_residual) = residuals(p, w, k, &primal_w);
    Ok(LmRateCertificate {
        value: 0.0,
        primal_w,
        dual_theta: 0.0,
        dual_a: a,
        dual_value,
        gap: -dual_value,
        status,
        marginal_residual,
        metric_residual,
        iterations: 0,
    })
}

/// Marginal and metric residuals of a candidate `w~`.
fn residuals(p: &Pmf, w: &Channel, k: &DecodingMetric, cand: &Channel) -> (f64, f64) {
    let target = metric_expectation(p, w, k).expect("shapes checked");
    let mut marginal: f64 = 0.0;
    for y in 0..w.outputs() {
        let mut diff = 0.0;
        for x in p.support() {
            diff += p.get(x) * (cand.get(x, y) - w.get(x, y));
        }
        marginal = marginal.max(diff.abs());
    }
    let achieved = metric_expectation(p, cand, k).expect("shapes checked");
    let metric = if target == f64::NEG_INFINITY {
        0.0
    } else if achieved == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (target - achieved).max(0.0)
    };
    (marginal, metric)
}

/// The optimization restricted to `supp(p) x supp(pw)`.
struct Problem {
    xs: Vec<usize>,
    ys: Vec<usize>,
    log_px: Vec<f64>,
    py: Vec<f64>,
    px: Vec<f64>,
    /// `log2 k` on the reduced grid (row-major over `xs x ys`).
    log_k: Vec<f64>,
    /// Cells that can carry mass in some plan with the required marginals.
    active: Vec<bool>,
    /// Row sets whose multipliers are pushed down to suppress cells that
    /// carry no mass in any plan.
    suppress: Vec<Vec<bool>>,
    /// `E_{p x w} log2 k`.
    target: f64,
    has_zero_metric: bool,
}

impl Problem {
    fn new(p: &Pmf, w: &Channel, k: &DecodingMetric, pw: &Pmf) -> Self {
        let xs: Vec<usize> = p.support().collect();
        let ys: Vec<usize> = pw.support().collect();
        let (m, l) = (xs.len(), ys.len());
        let px: Vec<f64> = xs.iter().map(|&x| p.get(x)).collect();
        let py: Vec<f64> = ys.iter().map(|&y| pw.get(y)).collect();
        let log_px = px.iter().map(|&v| log2(v)).collect();

        let mut log_k = vec![f64::NEG_INFINITY; m * l];
        let mut allowed = vec![false; m * l];
        let mut positive = vec![false; m * l];
        let mut has_zero_metric = false;
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let kv = k.get(x, y);
                if kv > 0.0 {
                    log_k[i * l + j] = log2(kv);
                    allowed[i * l + j] = true;
                } else {
                    has_zero_metric = true;
                }
                positive[i * l + j] = w.get(x, y) > 0.0;
            }
        }

        // A cell of `allowed` outside supp(p x w) can carry mass in some plan
        // iff an alternating cycle through it exists: from its column, step to
        // rows through cells of p x w and back to columns through allowed
        // cells, until the cell's own row is reached.
        let mut active = allowed.clone();
        let mut suppress: Vec<Vec<bool>> = Vec::new();
        for i0 in 0..m {
            for j0 in 0..l {
                let c = i0 * l + j0;
                if !allowed[c] || positive[c] {
                    continue;
                }
                let mut row_seen = vec![false; m];
                let mut col_seen = vec![false; l];
                let mut queue = VecDeque::from([j0]);
                col_seen[j0] = true;
                while let Some(j) = queue.pop_front() {
                    for i in 0..m {
                        if row_seen[i] || !positive[i * l + j] {
                            continue;
                        }
                        row_seen[i] = true;
                        for jj in 0..l {
                            if allowed[i * l + jj] && !col_seen[jj] {
                                col_seen[jj] = true;
                                queue.push_back(jj);
                            }
                        }
                    }
                }
                if !row_seen[i0] {
                    active[c] = false;
                    let complement: Vec<bool> = row_seen.iter().map(|&s| !s).collect();
                    if !suppress.contains(&complement) {
                        suppress.push(complement);
                    }
                }
            }
        }

        let target = metric_expectation(p, w, k).expect("shapes checked");
        Self {
            xs,
            ys,
            log_px,
            py,
            px,
            log_k,
            active,
            suppress,
            target,
            has_zero_metric,
        }
    }

    fn rows(&self) -> usize {
        self.xs.len()
    }

    fn cols(&self) -> usize {
        self.ys.len()
    }
}

/// Exponential-family point for a fixed `theta`.
#[derive(Clone)]
struct Point {
    theta: f64,
    a: Vec<f64>,
    /// Joint on the reduced grid.
    q: Vec<f64>,
    /// `E_q log2 k`.
    metric: f64,
}

struct Eval {
    phi: f64,
    q: Vec<f64>,
    rows: Vec<f64>,
    /// `sum_y pw(y) (diag pi_y - pi_y pi_y^T)`, row-major `m x m`.
    hessian: Vec<f64>,
}

fn evaluate(problem: &Problem, theta: f64, a: &[f64], want_hessian: bool) -> Eval {
    let (m, l) = (problem.rows(), problem.cols());
    let mut q = vec![0.0; m * l];
    let mut rows = vec![0.0; m];
    let mut hessian = if want_hessian { vec![0.0; m * m] } else { Vec::new() };
    let mut phi: f64 = problem.px.iter().zip(a).map(|(p, a)| p * a).sum();
    let mut logits = vec![f64::NEG_INFINITY; m];
    let mut pi = vec![0.0; m];
    for j in 0..l {
        for i in 0..m {
            let c = i * l + j;
            logits[i] = if problem.active[c] {
                problem.log_px[i] + theta * problem.log_k[c] + a[i]
            } else {
                f64::NEG_INFINITY
            };
        }
        let log_z = log2_sum_exp2(logits.iter().copied());
        phi -= problem.py[j] * log_z;
        for i in 0..m {
            pi[i] = if logits[i] == f64::NEG_INFINITY {
                0.0
            } else {
                exp2(logits[i] - log_z)
            };
            let v = problem.py[j] * pi[i];
            q[i * l + j] = v;
            rows[i] += v;
        }
        if want_hessian {
            for i in 0..m {
                if pi[i] == 0.0 {
                    continue;
                }
                hessian[i * m + i] += problem.py[j] * pi[i];
                for r in 0..m {
                    hessian[i * m + r] -= problem.py[j] * pi[i] * pi[r];
                }
            }
        }
    }
    Eval {
        phi,
        q,
        rows,
        hessian,
    }
}

/// Solves `(h + lambda I) x = b` for a symmetric positive semidefinite `h`.
fn solve_spd(h: &mut [f64], b: &mut [f64], n: usize) -> bool {
    let scale = (0..n).map(|i| h[i * n + i]).fold(0.0_f64, f64::max);
    let lambda = 1e-12 * scale.max(1e-300);
    for i in 0..n {
        h[i * n + i] += lambda;
    }
    // Cholesky, lower factor stored in place.
    for j in 0..n {
        let mut d = h[j * n + j];
        for s in 0..j {
            d -= h[j * n + s] * h[j * n + s];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = sqrt(d);
        h[j * n + j] = d;
        for i in j + 1..n {
            let mut v = h[i * n + j];
            for s in 0..j {
                v -= h[i * n + s] * h[j * n + s];
            }
            h[i * n + j] = v / d;
        }
    }
    for i in 0..n {
        let mut v = b[i];
        for s in 0..i {
            v -= h[i * n + s] * b[s];
        }
        b[i] = v / h[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for s in i + 1..n {
            v -= h[s * n + i] * b[s];
        }
        b[i] = v / h[i * n + i];
    }
    true
}

struct Solver<'a> {
    problem: &'a Problem,
    p: &'a Pmf,
    w: &'a Channel,
    k: &'a DecodingMetric,
    cfg: &'a SolverConfig,
    iterations: usize,
    row_tol: f64,
    metric_slack: f64,
    primals: Vec<(f64, Channel, f64, f64)>,
    best_dual: Option<(f64, f64, Vec<f64>)>,
}

const MAX_OUTER: usize = 200;
const THETA_MAX: f64 = 1.0e6;

impl<'a> Solver<'a> {
    fn new(
        problem: &'a Problem,
        p: &'a Pmf,
        w: &'a Channel,
        k: &'a DecodingMetric,
        cfg: &'a SolverConfig,
    ) -> Self {
        Self {
            problem,
            p,
            w,
            k,
            cfg,
            iterations: 0,
            row_tol: (cfg.feas_tol * 1e-3).clamp(1e-14, 1e-9),
            metric_slack: 1e-12 * (1.0 + problem.target.abs()),
            primals: Vec::new(),
            best_dual: None,
        }
    }

    fn budget_left(&self) -> bool {
        self.iterations < self.cfg.max_iter
    }

    /// Maximizes the dual over `a` at fixed `theta`, starting from `a0`.
    fn fit(&mut self, theta: f64, a0: &[f64]) -> Point {
        let m = self.problem.rows();
        let mut a = a0.to_vec();
        let mut ev = evaluate(self.problem, theta, &a, true);
        // Trust radius on the Newton step. It grows while full steps are
        // accepted, so multipliers that must travel far (large theta) get
        // there in logarithmically many steps.
        let mut radius = 0.0_f64;
        // Near the rounding floor of the row sums accepted steps stop
        // reducing the residual; give up after a few of those.
        let mut best_resid = f64::INFINITY;
        let mut stalled = 0;
        loop {
            let grad: Vec<f64> = (0..m).map(|i| self.problem.px[i] - ev.rows[i]).collect();
            let resid = grad.iter().fold(0.0_f64, |acc, g| acc.max(g.abs()));
            if resid <= self.row_tol || !self.budget_left() {
                break;
            }
            if resid < 0.5 * best_resid {
                best_resid = resid;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled > 50 {
                    break;
                }
            }
            self.iterations += 1;

            // Proportional row scaling, expressed relative to the gauge a[0].
            let log_ratio = |i: usize| log2(self.problem.px[i]) - log2(ev.rows[i].max(1e-300));
            let scaling: Vec<f64> = (1..m).map(|i| log_ratio(i) - log_ratio(0)).collect();
            let scaling_size = scaling.iter().fold(0.0_f64, |acc, s| acc.max(s.abs()));

            // Newton step on the free coordinates; a[0] fixes the gauge. When
            // the columns saturate the Hessian is nearly singular, so the
            // step is capped by the trust radius.
            let n = m - 1;
            let mut h = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] = ev.hessian[(i + 1) * m + (j + 1)] * LN_2;
                }
            }
            let mut step: Vec<f64> = grad[1..].to_vec();
            radius = radius.max(2.0 * scaling_size + 1.0);
            let mut capped = false;
            let mut directions = Vec::with_capacity(2);
            if solve_spd(&mut h, &mut step, n) {
                let size = step.iter().fold(0.0_f64, |acc, s| acc.max(s.abs()));
                if size.is_finite() {
                    if size > radius {
                        capped = true;
                        let shrink = radius / size;
                        step.iter_mut().for_each(|s| *s *= shrink);
                    }
                    directions.push((true, step));
                }
            }
            directions.push((false, scaling));

            let noise = 1e-15 * (1.0 + ev.phi.abs());
            let shifted = |a: &[f64], direction: &[f64], t: f64| -> Vec<f64> {
                core::iter::once(a[0])
                    .chain(a[1..].iter().zip(direction).map(|(ai, si)| ai + t * si))
                    .collect()
            };
            let mut accepted = false;
            for (newton, direction) in directions {
                let slope: f64 = grad[1..].iter().zip(&direction).map(|(g, s)| g * s).sum();
                let tries = if newton { 60 } else { 30 };
                let mut t = 1.0;
                for _ in 0..tries {
                    let trial = shifted(&a, &direction, t);
                    if trial == a {
                        break;
                    }
                    let next = evaluate(self.problem, theta, &trial, true);
                    if next.phi >= ev.phi + 1e-4 * t * slope.max(0.0) - noise
                        && next.phi > ev.phi - noise
                    {
                        a = trial;
                        ev = next;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if !accepted {
                    continue;
                }
                if newton {
                    radius = if t == 1.0 && capped {
                        4.0 * radius
                    } else {
                        (t * radius).max(1.0)
                    };
                } else {
                    radius = 0.0;
                    // Across saturated stretches the dual is close to linear
                    // in `a` and the scaling step is far too short; keep
                    // doubling it while the dual still rises.
                    if t == 1.0 {
                        let base = a.clone();
                        let mut t = 1.0;
                        for _ in 0..60 {
                            t *= 2.0;
                            let trial = shifted(&base, &direction, t - 1.0);
                            let next = evaluate(self.problem, theta, &trial, true);
                            if !(next.phi > ev.phi + noise) {
                                break;
                            }
                            a = trial;
                            ev = next;
                        }
                    }
                }
                break;
            }
            if !accepted {
                break;
            }
        }
        let (m, l) = (self.problem.rows(), self.problem.cols());
        let metric: f64 = (0..m * l)
            .filter(|&c| ev.q[c] > 0.0)
            .map(|c| ev.q[c] * self.problem.log_k[c])
            .sum();
        Point {
            theta,
            a,
            q: ev.q,
            metric,
        }
    }

    fn feasible(&self, point: &Point) -> bool {
        point.metric >= self.problem.target - self.metric_slack
    }

    /// Transition function of a point, completed off the reduced grid.
    fn channel_of(&self, point: &Point) -> Channel {
        let (ni, no) = (self.w.inputs(), self.w.outputs());
        let l = self.problem.cols();
        let mut data = self.w.as_flat().to_vec();
        for (i, &x) in self.problem.xs.iter().enumerate() {
            let row = &point.q[i * l..(i + 1) * l];
            let total: f64 = row.iter().sum();
            let out = &mut data[x * no..(x + 1) * no];
            out.iter_mut().for_each(|v| *v = 0.0);
            for (j, &y) in self.problem.ys.iter().enumerate() {
                out[y] = row[j] / total;
            }
        }
        Channel::from_flat(ni, no, data).expect("normalized rows")
    }

    fn offer_primal(&mut self, channel: Channel) {
        let (marginal, metric) = residuals(self.p, self.w, self.k, &channel);
        if marginal > self.cfg.feas_tol || metric > self.cfg.feas_tol {
            return;
        }
        let value = mutual_information(self.p, &channel).expect("shapes checked");
        self.primals.push((value, channel, marginal, metric));
    }

    /// Smallest primal value that does not undercut the best dual bound.
    ///
    /// Candidates are only feasible up to `feas_tol`. Where the feasible set
    /// is thin, a candidate violating the metric constraint by a rounding
    /// sized amount can sit measurably below the true minimum; no feasible
    /// point can beat a dual value, so candidates undercutting the dual by
    /// more than the refinement target are dropped.
    fn best_primal(&self) -> &(f64, Channel, f64, f64) {
        let slack = 1e-3 * self.cfg.gap_tol;
        let floor = self
            .best_dual
            .as_ref()
            .map_or(f64::NEG_INFINITY, |(d, ..)| d - slack);
        let admissible = self
            .primals
            .iter()
            .filter(|c| c.0 >= floor)
            .min_by(|a, b| a.0.total_cmp(&b.0));
        // p x w is the first candidate and is feasible exactly.
        admissible.unwrap_or(&self.primals[0])
    }

    /// Lifts a reduced multiplier vector to the full input alphabet.
    fn full_multipliers(&self, point: &Point) -> Vec<f64> {
        let mut a = point.a.clone();
        if !self.problem.suppress.is_empty() {
            let spread = a.iter().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v))
                - a.iter().fold(f64::INFINITY, |acc, &v| acc.min(v));
            let (lo, hi) = self
                .problem
                .log_k
                .iter()
                .filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            let range = if hi >= lo { hi - lo } else { 0.0 };
            let shift = 64.0 + spread + point.theta * range;
            for rows in &self.problem.suppress {
                for (ai, &down) in a.iter_mut().zip(rows) {
                    if down {
                        *ai -= shift;
                    }
                }
            }
        }
        let gauge = a[0];
        let mut full = vec![0.0; self.p.len()];
        for (i, &x) in self.problem.xs.iter().enumerate() {
            full[x] = a[i] - gauge;
        }
        full
    }

    fn offer_dual(&mut self, point: &Point) {
        let a = self.full_multipliers(point);
        let value =
            dual_objective(self.p, self.w, self.k, point.theta, &a).expect("shapes checked");
        if !value.is_finite() {
            return;
        }
        if self
            .best_dual
            .as_ref()
            .map_or(true, |(best, ..)| value > *best)
        {
            self.best_dual = Some((value, point.theta, a));
        }
    }

    fn gap(&self) -> f64 {
        match &self.best_dual {
            Some((dual, ..)) => self.best_primal().0 - dual,
            None => f64::INFINITY,
        }
    }

    /// Iteration continues well past the certification threshold so that
    /// values are reproducible to far better than `gap_tol`; the budget and
    /// the bracket width still bound the work.
    fn closed(&self) -> bool {
        self.gap() <= 1e-3 * self.cfg.gap_tol
    }

    fn run(mut self) -> Result<LmRateCertificate> {
        // p x w is always feasible.
        self.offer_primal(self.w.clone());

        let theta_min = if self.problem.has_zero_metric { 1e-10 } else { 0.0 };
        let m = self.problem.rows();
        let start = vec![0.0; m];
        let low = self.fit(theta_min, &start);
        self.offer_dual(&low);

        if self.feasible(&low) {
            let ch = self.channel_of(&low);
            self.offer_primal(ch);
            return self.finish();
        }

        // Bracket the active multiplier.
        let mut lo = low;
        let mut hi: Option<Point> = None;
        let mut theta = 1.0_f64.max(2.0 * theta_min);
        let mut outer = 0;
        while theta <= THETA_MAX && outer < MAX_OUTER && self.budget_left() {
            outer += 1;
            let a0 = lo.a.clone();
            let point = self.fit(theta, &a0);
            self.offer_dual(&point);
            if self.feasible(&point) {
                let ch = self.channel_of(&point);
                self.offer_primal(ch);
                hi = Some(point);
                break;
            }
            lo = point;
            if self.closed() {
                return self.finish();
            }
            theta *= 2.0;
        }
        let Some(mut hi) = hi else {
            return self.finish();
        };

        // Regula falsi with the Illinois modification.
        let target = self.problem.target;
        let mut f_lo = lo.metric - target;
        let mut f_hi = hi.metric - target;
        let mut side = 0i8;
        while !self.closed() && outer < MAX_OUTER && self.budget_left() {
            outer += 1;
            let width = hi.theta - lo.theta;
            if width <= 1e-15 * hi.theta.max(1.0) {
                break;
            }
            let mut theta = hi.theta - f_hi * width / (f_hi - f_lo);
            let margin = 1e-3 * width;
            if !(theta > lo.theta + margin && theta < hi.theta - margin) {
                theta = 0.5 * (lo.theta + hi.theta);
            }
            let a0 = if f_hi.abs() < f_lo.abs() {
                hi.a.clone()
            } else {
                lo.a.clone()
            };
            let point = self.fit(theta, &a0);
            self.offer_dual(&point);
            let f = point.metric - target;
            if self.feasible(&point) {
                let ch = self.channel_of(&point);
                self.offer_primal(ch);
                hi = point;
                f_hi = f.max(0.0);
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            } else {
                lo = point;
                f_lo = f;
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            }
        }
        self.finish()
    }

    fn finish(self) -> Result<LmRateCertificate> {
        let gap = self.gap();
        let (value, primal_w, marginal_residual, metric_residual) = self.best_primal().clone();
        let (dual_value, dual_theta, dual_a) = self
            .best_dual
            .unwrap_or((f64::NEG_INFINITY, 0.0, vec![0.0; self.p.len()]));
        let status = if gap <= self.cfg.gap_tol {
            Status::Certified
        } else {
            Status::IterationLimit
        };
        Ok(LmRateCertificate {
            value,
            primal_w,
            dual_theta,
            dual_a,
            dual_value,
            gap: value - dual_value,
            status,
            marginal_residual,
            metric_residual,
            iterations: self.iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::mutual_information;

    fn eq16() -> (Pmf, Channel) {
        let p = Pmf::uniform(2).unwrap();
        let w = Channel::new(vec![vec![0.86, 0.1, 0.04], vec![0.04, 0.1, 0.86]]).unwrap();
        (p, w)
    }

    const I_EQ16: f64 = 0.663_919_902_347_097;

    #[test]
    fn ml_metric_recovers_mutual_information() {
        let (p, w) = eq16();
        let k = DecodingMetric::from_channel(&w);
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Certified);
        assert!((cert.value - I_EQ16).abs() < 1e-9, "{}", cert.value);
        assert!(cert.gap <= 1e-6 && cert.gap >= -1e-8);
    }

    #[test]
    fn zero_on_positive_cell_short_circuits() {
        let (p, w) = eq16();
        let k = DecodingMetric::new(vec![vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]).unwrap();
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::ZeroByLemma1);
        assert_eq!(cert.value, 0.0);
        assert_eq!(cert.iterations, 0);
    }

    #[test]
    fn constant_metric_gives_zero() {
        let (p, w) = eq16();
        let k = DecodingMetric::constant(2, 3, 1.0).unwrap();
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Certified);
        assert!(cert.value.abs() < 1e-9);
        // The product channel with rows pw is the minimizer.
        for x in 0..2 {
            for (y, pw) in [0.45, 0.1, 0.45].into_iter().enumerate() {
                assert!((cert.primal_w.get(x, y) - pw).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn dual_objective_examples() {
        let (p, w) = eq16();
        let k = DecodingMetric::from_channel(&w);
        let zero = dual_objective(&p, &w, &k, 0.0, &[0.0, 0.0]).unwrap();
        assert!(zero.abs() < 1e-15);
        let a: Vec<f64> = p.probs().iter().map(|v| -log2(*v)).collect();
        let one = dual_objective(&p, &w, &k, 1.0, &a).unwrap();
        assert!((one - I_EQ16).abs() < 1e-12);
    }

    #[test]
    fn dual_objective_sentinel_on_zero_cell() {
        let (p, w) = eq16();
        let k = DecodingMetric::new(vec![vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]).unwrap();
        let v = dual_objective(&p, &w, &k, 0.5, &[0.0, 0.0]).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
        // theta = 0 ignores the metric altogether.
        assert!(dual_objective(&p, &w, &k, 0.0, &[0.0, 0.0]).unwrap().is_finite());
    }

    #[test]
    fn lemma3_examples() {
        let (p, w) = eq16();
        let k = DecodingMetric::from_channel(&w);
        assert!(lemma3_check(&p, &w, &k, 0.05).unwrap());

        let kz = DecodingMetric::new(vec![vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]).unwrap();
        assert!(!lemma3_check(&p, &w, &kz, 0.05).unwrap());
        assert!(!lemma3_check(&p, &w, &kz, 100.0).unwrap());

        let id = Channel::identity(2).unwrap();
        let kid = DecodingMetric::from_channel(&id);
        assert!(lemma3_check(&p, &id, &kid, 0.01).unwrap());
    }

    #[test]
    fn noiseless_channel_keeps_full_rate() {
        let p = Pmf::uniform(2).unwrap();
        let w = Channel::identity(2).unwrap();
        let k = DecodingMetric::from_channel(&w);
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Certified);
        assert!((cert.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unattained_dual_supremum_is_certified() {
        // Noiseless channel, strictly diagonal-favoring positive metric: the
        // optimum is p x w itself, reached only as theta grows without bound.
        let p = Pmf::uniform(2).unwrap();
        let w = Channel::identity(2).unwrap();
        let k = DecodingMetric::new(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Certified);
        assert!((cert.value - 1.0).abs() < 1e-6);
        assert!(cert.dual_value <= cert.value + 1e-12);
    }

    #[test]
    fn forced_zero_cells_are_suppressed_in_the_dual() {
        // k vanishes only where p x w does; cell (1, 0) has k > 0 but no plan
        // with the fixed marginals can place mass on it.
        let p = Pmf::uniform(2).unwrap();
        let w = Channel::identity(2).unwrap();
        let k = DecodingMetric::new(vec![vec![1.0, 0.0], vec![0.5, 1.0]]).unwrap();
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Certified);
        assert!((cert.value - 1.0).abs() < 1e-9);
        assert!(cert.gap <= 1e-6);
    }

    #[test]
    fn point_mass_input_has_zero_rate() {
        let (_, w) = eq16();
        let p = Pmf::point_mass(2, 1).unwrap();
        let k = DecodingMetric::from_channel(&w);
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.value, 0.0);
        assert_eq!(cert.status, Status::Certified);
    }

    #[test]
    fn zero_output_column_is_dropped() {
        let p = Pmf::uniform(2).unwrap();
        let w = Channel::new(vec![vec![0.7, 0.3, 0.0], vec![0.2, 0.8, 0.0]]).unwrap();
        let k = DecodingMetric::from_channel(&w);
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Certified);
        let i = mutual_information(&p, &w).unwrap();
        assert!((cert.value - i).abs() < 1e-8);
    }

    #[test]
    fn iteration_budget_is_reported() {
        let (p, w) = eq16();
        let k = DecodingMetric::new(vec![vec![3.0, 1.0, 0.5], vec![0.2, 1.0, 2.0]]).unwrap();
        let cfg = SolverConfig {
            max_iter: 1,
            ..SolverConfig::default()
        };
        let cert = lm_rate(&p, &w, &k, &cfg).unwrap();
        assert_eq!(cert.status, Status::IterationLimit);
        // Still a sound sandwich.
        assert!(cert.dual_value <= cert.value + 1e-9);
        assert!(cert.value <= mutual_information(&p, &w).unwrap() + 1e-12);
    }

    #[test]
    fn rejects_bad_config_and_shapes() {
        let (p, w) = eq16();
        let k = DecodingMetric::from_channel(&w);
        let cfg = SolverConfig {
            gap_tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(lm_rate(&p, &w, &k, &cfg).is_err());
        let k2 = DecodingMetric::constant(2, 2, 1.0).unwrap();
        assert!(matches!(
            lm_rate(&p, &w, &k2, &SolverConfig::default()),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn weak_interaction_needs_a_large_multiplier() {
        // Virtual-sample metric for counts [[4, 0, 0], [6, 1, 1]] at n = 12.
        // Its interaction term is about 0.01 bits, so the optimum sits near
        // theta = 750 where the column softmaxes are close to saturation.
        // Reference value from an independent conic solver: 0.5795086.
        let (p, w) = eq16();
        let v = libm::pow(12.0, 0.5325);
        let k = DecodingMetric::new(vec![
            vec![4.0 + v, v, v],
            vec![6.0 + v, 1.0 + v, 1.0 + v],
        ])
        .unwrap();
        let cert = lm_rate(&p, &w, &k, &SolverConfig::default()).unwrap();
        assert_eq!(cert.status, Status::Certified);
        assert!(cert.gap <= 1e-6);
        assert!((cert.value - 0.579_508_6).abs() < 2e-6, "{}", cert.value);
        assert!(cert.dual_theta > 100.0);
    }
}
