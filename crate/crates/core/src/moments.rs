//! Exact moments of `f(X) = XᵀQX` with X uniform on {0,1}ⁿ, and the
//! unit-variance rescaling built on them.
//!
//! The matrix-level functions accept any square row-major matrix, symmetric or
//! not; the [`QuboInstance`] wrappers pass the canonical symmetric form.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Exec;
use crate::qubo::{MultiObjectiveSet, QuboInstance};
use crate::scaling::{self, ScalingMethod, ScalingReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub std_dev: f64,
}

/// Accumulation strategy for the O(n³) variance loop.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Summation {
    #[default]
    Plain,
    /// Neumaier-compensated accumulation of the (i, j) terms.
    Compensated,
}

/// E[f(X)] = ½ Σᵢ Qᵢᵢ + ¼ Σᵢ Σ_{j≠i} Qᵢⱼ. O(n²).
pub fn mean_of_matrix(n: usize, q: &[f64]) -> f64 {
    assert_eq!(q.len(), n * n);
    let mut diag = 0.0;
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                diag += q[i * n + j];
            } else {
                off += q[i * n + j];
            }
        }
    }
    0.5 * diag + 0.25 * off
}

/// E[f(X)²] = Σ_{i,j,k,l} Qᵢⱼ Qₖₗ 2^{-|{i,j,k,l}|}, summed literally. O(n⁴).
pub fn second_moment_of_matrix(n: usize, q: &[f64], exec: Exec) -> f64 {
    assert_eq!(q.len(), n * n);
    const POW: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];
    let partial = exec.map(n, |i| {
        let mut acc = 0.0;
        for j in 0..n {
            let qij = q[i * n + j];
            let base = if i == j { 1 } else { 2 };
            let mut inner = 0.0;
            for k in 0..n {
                let k_new = usize::from(k != i && k != j);
                let row = &q[k * n..(k + 1) * n];
                for (l, &qkl) in row.iter().enumerate() {
                    let l_new = usize::from(l != i && l != j && l != k);
                    inner += qkl * POW[base + k_new + l_new];
                }
            }
            acc += qij * inner;
        }
        acc
    });
    partial.iter().sum()
}

/// Var(f(X)) by the O(n³) loop: for every ordered (i, j),
/// `Qᵢⱼ(Qᵢⱼ + Qⱼᵢ)/16` when i ≠ j, plus `Qᵢⱼ(Qₖᵢ + Qₖⱼ + Qᵢₖ + Qⱼₖ)/16` over all k.
pub fn variance_of_matrix(n: usize, q: &[f64], summation: Summation, exec: Exec) -> f64 {
    assert_eq!(q.len(), n * n);
    // column access through a transposed copy keeps the k loop on contiguous rows
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = q[i * n + j];
        }
    }
    let partial = exec.map(n, |i| {
        let qi = &q[i * n..(i + 1) * n];
        let ti = &t[i * n..(i + 1) * n];
        let mut acc = Accumulator::new(summation);
        for j in 0..n {
            let qij = qi[j];
            let qj = &q[j * n..(j + 1) * n];
            let tj = &t[j * n..(j + 1) * n];
            let mut s = 0.0;
            for k in 0..n {
                s += ti[k] + tj[k] + qi[k] + qj[k];
            }
            if i != j {
                s += qij + q[j * n + i];
            }
            acc.add(qij * s / 16.0);
        }
        acc.total()
    });
    let mut total = Accumulator::new(summation);
    for p in partial {
        total.add(p);
    }
    total.total()
}

struct Accumulator {
    sum: f64,
    comp: f64,
    compensated: bool,
}

impl Accumulator {
    fn new(s: Summation) -> Self {
        Self { sum: 0.0, comp: 0.0, compensated: s == Summation::Compensated }
    }

    #[inline]
    fn add(&mut self, x: f64) {
        if !self.compensated {
            self.sum += x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn mean_uniform(instance: &QuboInstance) -> f64 {
    mean_of_matrix(instance.n(), instance.matrix())
}

pub fn second_moment_uniform(instance: &QuboInstance) -> f64 {
    second_moment_of_matrix(instance.n(), instance.matrix(), Exec::default())
}

pub fn variance_fast(instance: &QuboInstance) -> f64 {
    variance_of_matrix(instance.n(), instance.matrix(), Summation::Plain, Exec::default())
}

pub fn variance_fast_with(instance: &QuboInstance, summation: Summation, exec: Exec) -> f64 {
    variance_of_matrix(instance.n(), instance.matrix(), summation, exec)
}

/// σ of f(X); the variance is clamped at zero against round-off.
pub fn std_dev(instance: &QuboInstance) -> f64 {
    variance_fast(instance).max(0.0).sqrt()
}

/// Mean and variance from the fast paths; the second moment is derived from them.
pub fn moment_summary(instance: &QuboInstance) -> MomentSummary {
    let mean = mean_uniform(instance);
    let variance = variance_fast(instance).max(0.0);
    MomentSummary { mean, second_moment: variance + mean * mean, variance, std_dev: variance.sqrt() }
}

/// Like [`moment_summary`] but with the second moment taken from the O(n⁴) sum.
/// Returns the summary and the relative disagreement between the two variance routes.
pub fn moment_summary_verified(instance: &QuboInstance) -> (MomentSummary, f64) {
    let mean = mean_uniform(instance);
    let variance = variance_fast(instance).max(0.0);
    let second_moment = second_moment_uniform(instance);
    let other = second_moment - mean * mean;
    let scale = second_moment.abs().max(variance.abs()).max(f64::MIN_POSITIVE);
    let rel = (variance - other).abs() / scale;
    (MomentSummary { mean, second_moment, variance, std_dev: variance.sqrt() }, rel)
}

/// Divides every objective by its standard deviation under uniform X.
/// The mean shift is a constant and is not materialized.
pub fn standardize(set: &MultiObjectiveSet) -> Result<(MultiObjectiveSet, Vec<ScalingReport>)> {
    scaling::apply(ScalingMethod::Standardize, set)
}
