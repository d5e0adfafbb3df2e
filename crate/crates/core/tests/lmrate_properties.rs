mod common;

use common::{channel, instance, metric, pmf};
use pacdmc_core::info::mutual_information;
use pacdmc_core::lmrate::{dual_objective, lemma1_zero_cell, lemma3_check, lm_rate, metric_expectation};
use pacdmc_core::{Channel, DecodingMetric, Pmf, SolverConfig, Status};
use proptest::prelude::*;

fn solve(p: &Pmf, w: &Channel, k: &DecodingMetric) -> pacdmc_core::LmRateCertificate {
    lm_rate(p, w, k, &SolverConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certificate_is_consistent((p, w, k) in instance()) {
        let cfg = SolverConfig::default();
        let cert = solve(&p, &w, &k);
        let info = mutual_information(&p, &w).unwrap();
        prop_assert_eq!(cert.status, Status::Certified);
        prop_assert!(cert.value >= 0.0);
        prop_assert!(cert.value <= info + 1e-9);
        prop_assert!(cert.dual_value <= cert.value + 1e-6);
        prop_assert!(cert.gap <= cfg.gap_tol);
        prop_assert!(cert.marginal_residual <= cfg.feas_tol);
        prop_assert!(cert.metric_residual <= cfg.feas_tol);

        // The reported dual value is reproducible from the reported point.
        let again = dual_objective(&p, &w, &k, cert.dual_theta, &cert.dual_a).unwrap();
        prop_assert_eq!(again, cert.dual_value);

        // The primal channel meets the constraints it claims to meet.
        let pw = w.output_pmf(&p).unwrap();
        let pw2 = cert.primal_w.output_pmf(&p).unwrap();
        for (a, b) in pw.probs().iter().zip(pw2.probs()) {
            prop_assert!((a - b).abs() <= cfg.feas_tol);
        }
        let e0 = metric_expectation(&p, &w, &k).unwrap();
        let e1 = metric_expectation(&p, &cert.primal_w, &k).unwrap();
        prop_assert!(e1 >= e0 - cfg.feas_tol);
        prop_assert!((mutual_information(&p, &cert.primal_w).unwrap() - cert.value).abs() < 1e-12);
    }

    #[test]
    fn dual_is_a_lower_bound_anywhere(
        (p, w, k) in instance(),
        theta in 0.0..20.0f64,
        a in prop::collection::vec(-5.0..5.0f64, 4),
    ) {
        let a = &a[..p.len()];
        let cert = solve(&p, &w, &k);
        let d = dual_objective(&p, &w, &k, theta, a).unwrap();
        prop_assert!(d <= cert.value + 1e-9, "dual {} above value {}", d, cert.value);
    }

    #[test]
    fn scaling_the_metric_changes_nothing((p, w, k) in instance(), c in 0.01..100.0f64) {
        let a = solve(&p, &w, &k).value;
        let b = solve(&p, &w, &k.scaled(c).unwrap()).value;
        prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn lemma3_is_sound((p, w, k) in instance(), eps in 0.001..1.0f64) {
        if lemma3_check(&p, &w, &k, eps).unwrap() {
            let info = mutual_information(&p, &w).unwrap();
            prop_assert!(solve(&p, &w, &k).value > info - eps - 1e-6);
        }
    }

    #[test]
    fn zero_on_a_used_cell_gives_zero(
        (p, w, k) in instance(),
        pick in 0usize..16,
    ) {
        let cells: Vec<(usize, usize)> = (0..p.len())
            .flat_map(|x| (0..w.outputs()).map(move |y| (x, y)))
            .filter(|&(x, y)| p.get(x) * w.get(x, y) > 0.0)
            .collect();
        let (x0, y0) = cells[pick % cells.len()];
        let mut values = k.as_flat().to_vec();
        values[x0 * w.outputs() + y0] = 0.0;
        let k0 = DecodingMetric::from_flat(k.inputs(), k.outputs(), values).unwrap();
        prop_assert!(lemma1_zero_cell(&p, &w, &k0).is_some());
        let cert = solve(&p, &w, &k0);
        prop_assert_eq!(cert.value, 0.0);
        prop_assert_eq!(cert.status, Status::ZeroByLemma1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matched_metric_attains_mutual_information(
        (p, w) in (2usize..=4, 2usize..=4)
            .prop_flat_map(|(m, l)| (pmf(m, 0.0), channel(m, l, 0.0))),
    ) {
        let k = DecodingMetric::from_channel(&w);
        let cert = solve(&p, &w, &k);
        let info = mutual_information(&p, &w).unwrap();
        prop_assert!((cert.value - info).abs() <= 1e-5, "{} vs {}", cert.value, info);
    }

    /// On 2 x 2 the joint has one free coordinate `t = q(0, 0)`, so the
    /// feasible set can be scanned directly.
    #[test]
    fn grid_search_never_beats_the_solver_on_2x2(
        p in pmf(2, 0.0),
        w in channel(2, 2, 0.0),
        k in metric(2, 2),
    ) {
        let cert = solve(&p, &w, &k);
        let pw = w.output_pmf(&p).unwrap();
        let (p0, p1) = (p.get(0), p.get(1));
        let (py0, py1) = (pw.get(0), pw.get(1));
        let lo = (p0 - py1).max(0.0);
        let hi = p0.min(py0);
        let e0 = metric_expectation(&p, &w, &k).unwrap();
        let lk = |x, y| k.get(x, y).log2();
        let mut best = f64::INFINITY;
        let steps = ((hi - lo) / 1e-3).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = lo + (hi - lo) * s as f64 / steps as f64;
            let q = [t, p0 - t, py0 - t, p1 - py0 + t];
            if q.iter().any(|&v| v < -1e-15) {
                continue;
            }
            let e = q[0] * lk(0, 0) + q[1] * lk(0, 1) + q[2] * lk(1, 0) + q[3] * lk(1, 1);
            if e < e0 - 1e-12 {
                continue;
            }
            let prod = [p0 * py0, p0 * py1, p1 * py0, p1 * py1];
            let i: f64 = q
                .iter()
                .zip(prod)
                .filter(|(v, _)| **v > 0.0)
                .map(|(v, r)| v * (v / r).log2())
                .sum();
            best = best.min(i);
        }
        prop_assert!(best >= cert.value - 5e-3, "grid {} below solver {}", best, cert.value);

        // The metric constraint is linear in t and I is minimized at the
        // product point, so the exact answer is 0 or I(p, w).
        let product_t = p0 * py0;
        let c = lk(0, 0) - lk(0, 1) - lk(1, 0) + lk(1, 1);
        let t0 = p0 * w.get(0, 0);
        let info = mutual_information(&p, &w).unwrap();
        let exact = if c * (product_t - t0) >= 0.0 { 0.0 } else { info };
        prop_assert!((cert.value - exact).abs() <= 1e-6, "{} vs {}", cert.value, exact);
    }
}
