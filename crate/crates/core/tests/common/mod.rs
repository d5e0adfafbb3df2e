#![allow(dead_code)]

use pacdmc_core::{Channel, DecodingMetric, Pmf};
use proptest::prelude::*;

/// Normalizes nonnegative weights; entries below `zero_below` are dropped
/// to exact zeros first, but at least one entry survives.
pub fn normalize(mut v: Vec<f64>, zero_below: f64) -> Vec<f64> {
    let max_i = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    for (i, x) in v.iter_mut().enumerate() {
        if i != max_i && *x < zero_below {
            *x = 0.0;
        }
    }
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

pub fn pmf(size: usize, zero_below: f64) -> impl Strategy<Value = Pmf> {
    prop::collection::vec(1e-3..1.0f64, size)
        .prop_map(move |v| Pmf::new(normalize(v, zero_below)).unwrap())
}

pub fn channel(inputs: usize, outputs: usize, zero_below: f64) -> impl Strategy<Value = Channel> {
    prop::collection::vec(prop::collection::vec(1e-3..1.0f64, outputs), inputs).prop_map(
        move |rows| {
            Channel::new(rows.into_iter().map(|r| normalize(r, zero_below)).collect()).unwrap()
        },
    )
}

pub fn metric(inputs: usize, outputs: usize) -> impl Strategy<Value = DecodingMetric> {
    prop::collection::vec(0.05..5.0f64, inputs * outputs)
        .prop_map(move |v| DecodingMetric::from_flat(inputs, outputs, v).unwrap())
}

/// `(p, w, k)` with `|X|, |Y|` in `2..=4`; `p` and `w` may contain zeros.
pub fn instance() -> impl Strategy<Value = (Pmf, Channel, DecodingMetric)> {
    (2usize..=4, 2usize..=4).prop_flat_map(|(m, l)| (pmf(m, 0.1), channel(m, l, 0.1), metric(m, l)))
}

pub fn eq16() -> (Pmf, Channel) {
    let p = Pmf::uniform(2).unwrap();
    let w = Channel::new(vec![vec![0.86, 0.1, 0.04], vec![0.04, 0.1, 0.86]]).unwrap();
    (p, w)
}
