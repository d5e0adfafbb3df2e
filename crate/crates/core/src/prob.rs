//! Finite-alphabet probability objects, training sets and empirical
//! distributions.
//!
//! Symbols are dense indices `0..size`. Two-dimensional tables are stored
//! row-major with the input symbol `x` selecting the row and the output
//! symbol `y` the column.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Absolute tolerance used when validating that probabilities sum to one.
pub const PROB_TOL: f64 = 1e-9;

/// A non-empty finite alphabet `{0, 1, .., size - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self(size))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0
    }

    pub fn contains(self, symbol: usize) -> bool {
        symbol < self.0
    }
}

fn check_entries(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidEntry { index, value });
        }
    }
    Ok(())
}

fn check_normalized(values: &[f64]) -> Result<()> {
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        check_entries(&probs)?;
        check_normalized(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Alphabet::new(size)?;
        Ok(Self {
            probs: vec![1.0 / size as f64; size],
        })
    }

    pub fn point_mass(size: usize, symbol: usize) -> Result<Self> {
        Alphabet::new(size)?;
        if symbol >= size {
            return Err(Error::SymbolOutOfRange { symbol, size });
        }
        let mut probs = vec![0.0; size];
        probs[symbol] = 1.0;
        Ok(Self { probs })
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.probs.len())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false; a PMF has at least one symbol.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Symbols with positive probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }
}

/// Transition function `w(y|x)`: one PMF over the output alphabet per input.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        Alphabet::new(inputs)?;
        let outputs = rows[0].len();
        Alphabet::new(outputs)?;
        let mut data = Vec::with_capacity(inputs * outputs);
        for row in &rows {
            if row.len() != outputs {
                return Err(Error::LengthMismatch {
                    expected: outputs,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(inputs, outputs, data)
    }

    /// Builds a channel from a row-major table.
    pub fn from_flat(inputs: usize, outputs: usize, data: Vec<f64>) -> Result<Self> {
        Alphabet::new(inputs)?;
        Alphabet::new(outputs)?;
        if data.len() != inputs * outputs {
            return Err(Error::LengthMismatch {
                expected: inputs * outputs,
                got: data.len(),
            });
        }
        check_entries(&data)?;
        for (row, chunk) in data.chunks(outputs).enumerate() {
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::RowNotNormalized { row, sum });
            }
        }
        Ok(Self {
            inputs,
            outputs,
            data,
        })
    }

    /// Noiseless channel on an alphabet of `size` symbols.
    pub fn identity(size: usize) -> Result<Self> {
        Alphabet::new(size)?;
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            data[i * size + i] = 1.0;
        }
        Ok(Self {
            inputs: size,
            outputs: size,
            data,
        })
    }

    #[inline]
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.outputs + y]
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Output distribution `pw(y) = sum_x p(x) w(y|x)`.
    pub fn output_pmf(&self, p: &Pmf) -> Result<Pmf> {
        check_input(p, self)?;
        let mut out = vec![0.0; self.outputs];
        for x in 0..self.inputs {
            let px = p.get(x);
            if px == 0.0 {
                continue;
            }
            for (acc, &w) in out.iter_mut().zip(self.row(x)) {
                *acc += px * w;
            }
        }
        Ok(Pmf { probs: out })
    }
}

fn check_input(p: &Pmf, w: &Channel) -> Result<()> {
    if p.len() != w.inputs {
        return Err(Error::AlphabetMismatch(
            "input distribution and channel disagree on |X|",
        ));
    }
    Ok(())
}

/// Joint PMF on `X x Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    inputs: usize,
    outputs: usize,
    data: Vec<f64>,
}

impl JointPmf {
    pub fn from_flat(inputs: usize, outputs: usize, data: Vec<f64>) -> Result<Self> {
        Alphabet::new(inputs)?;
        Alphabet::new(outputs)?;
        if data.len() != inputs * outputs {
            return Err(Error::LengthMismatch {
                expected: inputs * outputs,
                got: data.len(),
            });
        }
        check_entries(&data)?;
        check_normalized(&data)?;
        Ok(Self {
            inputs,
            outputs,
            data,
        })
    }

    /// `(p x w)(x, y) = p(x) w(y|x)`.
    pub fn product(p: &Pmf, w: &Channel) -> Result<Self> {
        check_input(p, w)?;
        let mut data = Vec::with_capacity(w.data.len());
        for x in 0..w.inputs {
            let px = p.get(x);
            data.extend(w.row(x).iter().map(|&v| px * v));
        }
        Ok(Self {
            inputs: w.inputs,
            outputs: w.outputs,
            data,
        })
    }

    #[inline]
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.outputs + y]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Input and output marginals.
    pub fn marginals(&self) -> (Pmf, Pmf) {
        let mut px = vec![0.0; self.inputs];
        let mut py = vec![0.0; self.outputs];
        for x in 0..self.inputs {
            for y in 0..self.outputs {
                let v = self.get(x, y);
                px[x] += v;
                py[y] += v;
            }
        }
        (Pmf { probs: px }, Pmf { probs: py })
    }
}

/// `p x w` as a joint PMF.
pub fn joint_of(p: &Pmf, w: &Channel) -> Result<JointPmf> {
    JointPmf::product(p, w)
}

/// Input and output marginals of a joint PMF.
pub fn marginals(joint: &JointPmf) -> (Pmf, Pmf) {
    joint.marginals()
}

/// A training set of input-output pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSet {
    inputs: usize,
    outputs: usize,
    pairs: Vec<(usize, usize)>,
}

impl TrainingSet {
    pub fn new(inputs: usize, outputs: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        Alphabet::new(inputs)?;
        Alphabet::new(outputs)?;
        if pairs.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        for &(x, y) in &pairs {
            if x >= inputs {
                return Err(Error::SymbolOutOfRange {
                    symbol: x,
                    size: inputs,
                });
            }
            if y >= outputs {
                return Err(Error::SymbolOutOfRange {
                    symbol: y,
                    size: outputs,
                });
            }
        }
        Ok(Self {
            inputs,
            outputs,
            pairs,
        })
    }

    /// The canonical sequence realizing a count table: cells in row-major
    /// order, each repeated as often as it is counted.
    pub fn canonical(counts: &CountTable) -> Result<Self> {
        if counts.n == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let mut pairs = Vec::with_capacity(counts.n as usize);
        for x in 0..counts.inputs {
            for y in 0..counts.outputs {
                for _ in 0..counts.get(x, y) {
                    pairs.push((x, y));
                }
            }
        }
        Ok(Self {
            inputs: counts.inputs,
            outputs: counts.outputs,
            pairs,
        })
    }

    #[inline]
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn x_seq(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(x, _)| x)
    }

    pub fn y_seq(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(_, y)| y)
    }

    pub fn counts(&self) -> CountTable {
        let mut counts = vec![0u64; self.inputs * self.outputs];
        for &(x, y) in &self.pairs {
            counts[x * self.outputs + y] += 1;
        }
        CountTable {
            inputs: self.inputs,
            outputs: self.outputs,
            counts,
            n: self.pairs.len() as u64,
        }
    }
}

/// Occurrence counts `N(x, y)` of a training set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountTable {
    inputs: usize,
    outputs: usize,
    counts: Vec<u64>,
    n: u64,
}

impl CountTable {
    pub fn from_flat(inputs: usize, outputs: usize, counts: Vec<u64>) -> Result<Self> {
        Alphabet::new(inputs)?;
        Alphabet::new(outputs)?;
        if counts.len() != inputs * outputs {
            return Err(Error::LengthMismatch {
                expected: inputs * outputs,
                got: counts.len(),
            });
        }
        let n = counts.iter().sum();
        Ok(Self {
            inputs,
            outputs,
            counts,
            n,
        })
    }

    #[inline]
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.counts[x * self.outputs + y]
    }

    pub fn as_flat(&self) -> &[u64] {
        &self.counts
    }

    pub fn row_total(&self, x: usize) -> u64 {
        self.counts[x * self.outputs..(x + 1) * self.outputs]
            .iter()
            .sum()
    }

    pub fn x_counts(&self) -> Vec<u64> {
        (0..self.inputs).map(|x| self.row_total(x)).collect()
    }

    pub fn y_counts(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.outputs];
        for x in 0..self.inputs {
            for (y, acc) in out.iter_mut().enumerate() {
                *acc += self.get(x, y);
            }
        }
        out
    }
}

/// Nonnegative decoding metric `k(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingMetric {
    inputs: usize,
    outputs: usize,
    values: Vec<f64>,
}

impl DecodingMetric {
    pub fn from_flat(inputs: usize, outputs: usize, values: Vec<f64>) -> Result<Self> {
        Alphabet::new(inputs)?;
        Alphabet::new(outputs)?;
        if values.len() != inputs * outputs {
            return Err(Error::LengthMismatch {
                expected: inputs * outputs,
                got: values.len(),
            });
        }
        check_entries(&values)?;
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroMetric);
        }
        Ok(Self {
            inputs,
            outputs,
            values,
        })
    }

    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        Alphabet::new(inputs)?;
        let outputs = rows[0].len();
        let mut values = Vec::with_capacity(inputs * outputs);
        for row in &rows {
            if row.len() != outputs {
                return Err(Error::LengthMismatch {
                    expected: outputs,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(inputs, outputs, values)
    }

    /// The maximum-likelihood metric `k(x, y) = w(y|x)`.
    pub fn from_channel(w: &Channel) -> Self {
        Self {
            inputs: w.inputs,
            outputs: w.outputs,
            values: w.data.clone(),
        }
    }

    pub fn constant(inputs: usize, outputs: usize, value: f64) -> Result<Self> {
        Self::from_flat(inputs, outputs, vec![value; inputs * outputs])
    }

    /// `c * k` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::ParameterRange("metric scale must be positive"));
        }
        Self::from_flat(
            self.inputs,
            self.outputs,
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    #[inline]
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.outputs + y]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }
}

/// Empirical distributions of a training set.
///
/// Returns the count table, the empirical input PMF `p_s` and a channel
/// `w_s` with `N(x, y) = n p_s(x) w_s(y|x)`. Rows of `w_s` whose input was
/// never observed are set to the uniform PMF.
pub fn empirical(train: &TrainingSet) -> (CountTable, Pmf, Channel) {
    let counts = train.counts();
    let n = counts.n as f64;
    let outputs = counts.outputs;
    let mut p = Vec::with_capacity(counts.inputs);
    let mut w = Vec::with_capacity(counts.inputs * outputs);
    for x in 0..counts.inputs {
        let row = counts.row_total(x);
        p.push(row as f64 / n);
        if row == 0 {
            w.extend(core::iter::repeat_n(1.0 / outputs as f64, outputs));
        } else {
            w.extend((0..outputs).map(|y| counts.get(x, y) as f64 / row as f64));
        }
    }
    let p = Pmf { probs: p };
    let w = Channel {
        inputs: counts.inputs,
        outputs,
        data: w,
    };
    (counts, p, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq16() -> (Pmf, Channel) {
        let p = Pmf::uniform(2).unwrap();
        let w = Channel::new(vec![vec![0.86, 0.1, 0.04], vec![0.04, 0.1, 0.86]]).unwrap();
        (p, w)
    }

    #[test]
    fn empirical_counts_and_factorization() {
        let train = TrainingSet::new(2, 3, vec![(0, 0), (0, 0), (1, 2)]).unwrap();
        let (counts, p, w) = empirical(&train);
        assert_eq!(counts.as_flat(), &[2, 0, 0, 0, 0, 1]);
        assert_eq!(counts.n(), 3);
        assert!((p.get(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.get(1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(w.row(0), &[1.0, 0.0, 0.0]);
        assert_eq!(w.row(1), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn empirical_unseen_row_is_uniform() {
        let train = TrainingSet::new(2, 3, vec![(0, 1)]).unwrap();
        let (_, p, w) = empirical(&train);
        assert_eq!(p.probs(), &[1.0, 0.0]);
        for &v in w.row(1) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn marginals_of_eq16_joint() {
        let (p, w) = eq16();
        let joint = joint_of(&p, &w).unwrap();
        assert!((joint.get(0, 0) - 0.43).abs() < 1e-15);
        let (px, py) = marginals(&joint);
        for (a, b) in px.probs().iter().zip(p.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in py.probs().iter().zip([0.45, 0.10, 0.45]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_of_degenerate_joints() {
        let j = JointPmf::from_flat(2, 3, vec![1.0 / 6.0; 6]).unwrap();
        let (px, py) = j.marginals();
        assert!(px.probs().iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(py.probs().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));

        let j = JointPmf::from_flat(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let (px, py) = j.marginals();
        assert_eq!(px.probs(), &[1.0, 0.0]);
        assert_eq!(py.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn joint_of_point_mass_and_identical_rows() {
        let (_, w) = eq16();
        let p = Pmf::point_mass(2, 0).unwrap();
        let j = joint_of(&p, &w).unwrap();
        assert!((0..3).all(|y| j.get(1, y) == 0.0));

        let w = Channel::new(vec![vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]]).unwrap();
        let j = joint_of(&Pmf::uniform(2).unwrap(), &w).unwrap();
        let (px, py) = j.marginals();
        for x in 0..2 {
            for y in 0..3 {
                assert!((j.get(x, y) - px.get(x) * py.get(y)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn joint_of_rejects_mismatched_alphabets() {
        let (_, w) = eq16();
        let p = Pmf::uniform(3).unwrap();
        assert!(matches!(
            joint_of(&p, &w),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn validation_errors() {
        assert_eq!(Alphabet::new(0), Err(Error::EmptyAlphabet));
        assert!(matches!(
            Pmf::new(vec![0.5, 0.4]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            Pmf::new(vec![1.5, -0.5]),
            Err(Error::InvalidEntry { index: 1, .. })
        ));
        assert!(matches!(
            Channel::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]]),
            Err(Error::RowNotNormalized { row: 0, .. })
        ));
        assert!(matches!(
            TrainingSet::new(2, 2, vec![(0, 2)]),
            Err(Error::SymbolOutOfRange { symbol: 2, size: 2 })
        ));
        assert_eq!(
            TrainingSet::new(2, 2, vec![]),
            Err(Error::EmptyTrainingSet)
        );
        assert_eq!(
            DecodingMetric::constant(2, 2, 0.0),
            Err(Error::ZeroMetric)
        );
    }

    #[test]
    fn canonical_training_set_realizes_counts() {
        let counts = CountTable::from_flat(2, 2, vec![2, 0, 1, 3]).unwrap();
        let train = TrainingSet::canonical(&counts).unwrap();
        assert_eq!(
            train.pairs(),
            &[(0, 0), (0, 0), (1, 0), (1, 1), (1, 1), (1, 1)]
        );
        assert_eq!(train.counts(), counts);
    }
}
