//! QUBO instances, binary assignments and weighted scalarization.
//!
//! A [`QuboInstance`] always holds a full symmetric matrix and represents
//! `f(x) = xᵀQx = Σᵢ Σⱼ Q[i][j]·xᵢ·xⱼ`, so a pair coefficient `c·xᵢxⱼ`
//! (i ≠ j) is stored as `Q[i][j] = Q[j][i] = c/2`. Additive constants are never
//! stored; they do not move the argmin.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    q: Vec<f64>,
    label: String,
}

impl QuboInstance {
    /// Canonicalizes a row-major square matrix by averaging it with its transpose.
    pub fn from_dense(n: usize, raw: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if raw.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: raw.len() });
        }
        for (k, v) in raw.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { i: k / n, j: k % n });
            }
        }
        let mut q = raw;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (q[i * n + j] + q[j * n + i]) / 2.0;
                q[i * n + j] = avg;
                q[j * n + i] = avg;
            }
        }
        Ok(Self { n, q, label: label.into() })
    }

    pub fn zeros(n: usize, label: impl Into<String>) -> Result<Self> {
        Self::from_dense(n, vec![0.0; n * n], label)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Row-major coefficients.
    pub fn matrix(&self) -> &[f64] {
        &self.q
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.q[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.q.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Adds `coef·xᵢxⱼ` (or `coef·xᵢ` when i == j) to the objective.
    pub(crate) fn add_term(&mut self, i: usize, j: usize, coef: f64) {
        let n = self.n;
        if i == j {
            self.q[i * n + i] += coef;
        } else {
            self.q[i * n + j] += coef / 2.0;
            self.q[j * n + i] += coef / 2.0;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            q: self.q.iter().map(|v| v * alpha).collect(),
            label: self.label.clone(),
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.q.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().all(|&v| v == 0.0)
    }

    /// xᵀQx.
    pub fn evaluate(&self, x: &BinaryVector) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: x.len() });
        }
        Ok(self.evaluate_unchecked(x.bits()))
    }

    pub(crate) fn evaluate_unchecked(&self, bits: &[u8]) -> f64 {
        let ones: Vec<usize> = bits.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect();
        let mut total = 0.0;
        for &i in &ones {
            let row = self.row(i);
            for &j in &ones {
                total += row[j];
            }
        }
        total
    }
}

/// Free-function form of [`QuboInstance::from_dense`] for nested rows.
pub fn symmetrize(raw: &[Vec<f64>]) -> Result<QuboInstance> {
    let n = raw.len();
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { rows: n, row, len: r.len() });
        }
    }
    QuboInstance::from_dense(n, raw.concat(), "")
}

pub fn evaluate(instance: &QuboInstance, x: &BinaryVector) -> Result<f64> {
    instance.evaluate(x)
}

/// An assignment in {0,1}ⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector(Vec<u8>);

impl BinaryVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBits(format!("entry {b} is not 0 or 1")));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Bit `i` of `index` becomes entry `i`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Self((0..n).map(|i| ((index >> i) & 1) as u8).collect())
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| b as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| 1 - b).collect())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidBits(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl serde::Serialize for BinaryVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BinaryVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered objectives over a shared variable count.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiObjectiveSet {
    n: usize,
    objectives: Vec<QuboInstance>,
}

impl MultiObjectiveSet {
    pub fn new(objectives: Vec<QuboInstance>) -> Result<Self> {
        if objectives.len() < 2 {
            return Err(Error::TooFewObjectives(objectives.len()));
        }
        let n = objectives[0].n();
        for (index, o) in objectives.iter().enumerate() {
            if o.n() != n {
                return Err(Error::MixedSizes { index, expected: n, found: o.n() });
            }
        }
        Ok(Self { n, objectives })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.objectives.len()
    }

    pub fn objectives(&self) -> &[QuboInstance] {
        &self.objectives
    }

    pub fn into_objectives(self) -> Vec<QuboInstance> {
        self.objectives
    }

    /// F(x): every objective evaluated at `x`.
    pub fn evaluate(&self, x: &BinaryVector) -> Result<Vec<f64>> {
        self.objectives.iter().map(|o| o.evaluate(x)).collect()
    }

    /// Each objective multiplied by its own factor.
    pub fn rescaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.m() {
            return Err(Error::WeightCount { expected: self.m(), actual: factors.len() });
        }
        Ok(Self {
            n: self.n,
            objectives: self.objectives.iter().zip(factors).map(|(o, &a)| o.scaled(a)).collect(),
        })
    }
}

/// Σ wᵢ·Q⁽ⁱ⁾. The additive constant of the global-criterion form is dropped,
/// which leaves the argmin unchanged.
pub fn scalarize(set: &MultiObjectiveSet, weights: &[f64]) -> Result<QuboInstance> {
    if weights.len() != set.m() {
        return Err(Error::WeightCount { expected: set.m(), actual: weights.len() });
    }
    for (index, &w) in weights.iter().enumerate() {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::NonPositiveWeight { index, value: w });
        }
    }
    let n = set.n();
    let mut q = vec![0.0; n * n];
    for (o, &w) in set.objectives().iter().zip(weights) {
        for (acc, v) in q.iter_mut().zip(o.matrix()) {
            *acc += w * v;
        }
    }
    let label = set.objectives().iter().map(QuboInstance::label).collect::<Vec<_>>().join("+");
    QuboInstance::from_dense(n, q, label)
}

/// Equal weights (all 1).
pub fn scalarize_equal(set: &MultiObjectiveSet) -> Result<QuboInstance> {
    scalarize(set, &vec![1.0; set.m()])
}
