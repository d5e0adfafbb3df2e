mod common;

use common::{channel, eq16, pmf};
use pacdmc_core::exact::{composition_count, enumerate_all, exact_rate_pmf, ExactJob, GROUPING_TOL};
use pacdmc_core::info::mutual_information;
use pacdmc_core::learners::lemma2_bound;
use pacdmc_core::{Atom, Composition, PlugIn, RatePmf, SolverConfig, Status, VirtualSample};
use proptest::prelude::*;

/// Every nonnegative `cells`-tuple summing to `n`, by plain recursion.
fn brute_force(n: u64, cells: usize) -> Vec<Vec<u64>> {
    fn go(prefix: &mut Vec<u64>, left: u64, cells: usize, out: &mut Vec<Vec<u64>>) {
        if prefix.len() + 1 == cells {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            go(prefix, left - c, cells, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, cells, &mut out);
    out
}

/// `sum_j c_j (n+1)^j`, the order in which compositions are visited.
fn radix(parts: &[u64], n: u64) -> u128 {
    parts
        .iter()
        .rev()
        .fold(0u128, |acc, &c| acc * (n as u128 + 1) + c as u128)
}

fn binomial(n: u64, k: u64) -> u128 {
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) as u128 / i as u128)
}

#[test]
fn successor_examples() {
    let c = Composition::from_parts(vec![3, 0, 0]).unwrap();
    assert_eq!(c.successor().unwrap().parts(), &[2, 1, 0]);

    let c = Composition::from_parts(vec![0, 3, 0]).unwrap();
    assert_eq!(c.successor().unwrap().parts(), &[2, 0, 1]);

    let c = Composition::from_parts(vec![0, 0, 3]).unwrap();
    assert!(c.is_last());
    assert!(c.successor().is_none());
}

#[test]
fn composition_counts() {
    assert_eq!(enumerate_all(3, 3).unwrap().count(), 10);
    assert_eq!(enumerate_all(12, 6).unwrap().count(), 6188);
    let single: Vec<_> = enumerate_all(1, 1).unwrap().collect();
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].parts(), &[1]);
    assert_eq!(composition_count(12, 6), Some(6188));
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 1..=5u64 {
        for cells in 1..=4usize {
            let listed: Vec<Vec<u64>> = enumerate_all(n, cells)
                .unwrap()
                .map(|c| c.parts().to_vec())
                .collect();
            assert_eq!(listed[0][0], n);

            let values: Vec<u128> = listed.iter().map(|c| radix(c, n)).collect();
            assert!(values.windows(2).all(|v| v[0] < v[1]), "n={n} J={cells}");

            let mut expected = brute_force(n, cells);
            expected.sort_by_key(|c| radix(c, n));
            assert_eq!(listed, expected, "n={n} J={cells}");

            let count = binomial(n + cells as u64 - 1, cells as u64 - 1);
            assert_eq!(listed.len() as u128, count);
            assert_eq!(composition_count(n, cells), Some(count));
        }
    }
}

#[test]
fn radix_value_agrees_with_the_oracle() {
    for c in enumerate_all(4, 3).unwrap() {
        assert_eq!(c.radix_value(), Some(radix(c.parts(), 4)));
    }
}

#[test]
fn cdf_examples() {
    let point = RatePmf::from_atoms(
        vec![Atom {
            rate: 0.0,
            prob: 1.0,
            status: Status::ZeroByLemma1,
        }],
        GROUPING_TOL,
    );
    assert_eq!(point.cdf(), vec![(0.0, 1.0)]);

    let two = RatePmf::from_atoms(
        vec![
            Atom {
                rate: 0.5,
                prob: 0.7,
                status: Status::Certified,
            },
            Atom {
                rate: 0.0,
                prob: 0.3,
                status: Status::Certified,
            },
        ],
        GROUPING_TOL,
    );
    let cdf = two.cdf();
    assert_eq!(cdf.len(), 2);
    assert_eq!(cdf[0], (0.0, 0.3));
    assert_eq!(cdf[1].0, 0.5);
    assert!((cdf[1].1 - 1.0).abs() < 1e-15);
}

#[test]
fn plug_in_at_twelve_is_almost_always_zero() {
    let (p, w) = eq16();
    let pmf = exact_rate_pmf(&PlugIn, &p, &w, 12, &SolverConfig::default()).unwrap();
    assert!((pmf.total_mass() - 1.0).abs() < 1e-9);
    assert_eq!(pmf.uncertified_count(), 0);
    assert!(pmf.prob_zero() >= 0.95, "{}", pmf.prob_zero());
}

#[test]
fn virtual_sample_at_twelve_is_accurate() {
    let (p, w) = eq16();
    let info = mutual_information(&p, &w).unwrap();
    let vsa = VirtualSample { alpha: 0.5325 };
    let pmf = exact_rate_pmf(&vsa, &p, &w, 12, &SolverConfig::default()).unwrap();
    assert!((pmf.total_mass() - 1.0).abs() < 1e-9);
    assert_eq!(pmf.uncertified_count(), 0);
    assert!(pmf.prob_greater(info - 0.05) > 0.90);
}

#[test]
fn point_mass_input_gives_a_point_mass_at_zero() {
    let p = pacdmc_core::Pmf::point_mass(2, 0).unwrap();
    let (_, w) = eq16();
    for n in [1, 4, 7] {
        let job = ExactJob::new(&PlugIn, &p, &w, n, SolverConfig::default()).unwrap();
        for c in job.compositions() {
            if job.probability(&c) > 0.0 {
                assert!(c.parts()[3..].iter().all(|&v| v == 0));
            }
        }
        let pmf = exact_rate_pmf(&PlugIn, &p, &w, n, &SolverConfig::default()).unwrap();
        assert_eq!(pmf.atoms().len(), 1);
        assert_eq!(pmf.atoms()[0].rate, 0.0);
        assert!((pmf.atoms()[0].prob - 1.0).abs() < 1e-12);
    }
}

#[test]
fn one_sample_has_at_most_one_atom_per_cell() {
    let (p, w) = eq16();
    for alpha in [0.5, 0.9] {
        let pmf =
            exact_rate_pmf(&VirtualSample { alpha }, &p, &w, 1, &SolverConfig::default()).unwrap();
        assert!(pmf.atoms().len() <= 6);
    }
}

fn small_instance() -> impl Strategy<Value = (pacdmc_core::Pmf, pacdmc_core::Channel, u64)> {
    (1usize..=3, 1usize..=3, 1u64..=6)
        .prop_flat_map(|(m, l, n)| (pmf(m, 0.1), channel(m, l, 0.1), Just(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multinomial_mass_sums_to_one((p, w, n) in small_instance()) {
        let job = ExactJob::new(&PlugIn, &p, &w, n, SolverConfig::default()).unwrap();
        let total: f64 = job.compositions().map(|c| job.probability(&c)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10, "{}", total);
    }

    #[test]
    fn exact_pmfs_are_distributions(
        (p, w, n) in small_instance(),
        alpha in 0.3..1.0f64,
    ) {
        let cfg = SolverConfig::default();
        for pmf in [
            exact_rate_pmf(&PlugIn, &p, &w, n, &cfg).unwrap(),
            exact_rate_pmf(&VirtualSample { alpha }, &p, &w, n, &cfg).unwrap(),
        ] {
            prop_assert!((pmf.total_mass() - 1.0).abs() <= 1e-9);
            let atoms = pmf.atoms();
            prop_assert!(atoms.iter().all(|a| a.prob >= 0.0));
            prop_assert!(atoms.windows(2).all(|a| a[0].rate < a[1].rate));
            let cdf = pmf.cdf();
            prop_assert!(cdf.windows(2).all(|c| c[0].1 <= c[1].1));
            prop_assert!((cdf.last().unwrap().1 - 1.0).abs() <= 1e-9);
        }
    }

    /// Rate zero has at least the probability that some used cell is never
    /// observed while its row is.
    #[test]
    fn plug_in_zero_mass_beats_the_missing_cell_bound((p, w, n) in small_instance()) {
        let pmf = exact_rate_pmf(&PlugIn, &p, &w, n, &SolverConfig::default()).unwrap();
        let mut bound = 0.0_f64;
        for x in 0..p.len() {
            for y in 0..w.outputs() {
                if p.get(x) * w.get(x, y) > 0.0 {
                    bound = bound.max(lemma2_bound(p.get(x), w.get(x, y), n));
                }
            }
        }
        prop_assert!(pmf.prob_zero() >= bound - 1e-12, "{} < {}", pmf.prob_zero(), bound);
    }

    /// Grouping moves no rate by more than the tolerance: every raw CDF value
    /// is bracketed by the grouped CDF one tolerance to either side.
    #[test]
    fn grouping_moves_rates_by_at_most_the_tolerance(
        raw in prop::collection::vec((0usize..40, 0.0..3e-9f64, 1e-3..1.0f64), 1..60),
    ) {
        let atoms: Vec<Atom> = raw
            .iter()
            .map(|&(slot, jitter, prob)| Atom {
                rate: slot as f64 * 2e-9 + jitter,
                prob,
                status: Status::Certified,
            })
            .collect();
        let grouped = RatePmf::from_atoms(atoms.clone(), GROUPING_TOL);
        prop_assert!(grouped.atoms().windows(2).all(|a| a[1].rate - a[0].rate > GROUPING_TOL));
        let raw_cdf = |r: f64| atoms.iter().filter(|a| a.rate <= r).map(|a| a.prob).sum::<f64>();
        for a in &atoms {
            let r = a.rate;
            prop_assert!(grouped.prob_at_most(r + GROUPING_TOL) >= raw_cdf(r) - 1e-12);
            prop_assert!(grouped.prob_at_most(r - GROUPING_TOL) <= raw_cdf(r) + 1e-12);
        }
        let total: f64 = atoms.iter().map(|a| a.prob).sum();
        prop_assert!((grouped.total_mass() - total).abs() <= 1e-12);
    }
}
