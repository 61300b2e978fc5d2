#![allow(dead_code, clippy::needless_range_loop)]

//! Oracles shared by the integration tests. Everything here works from the raw
//! matrix entries and its own RNG so it never goes through the code under test.

use mqubo::{symmetrize, QuboInstance};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Dense n×n matrix with entries uniform in [lo, hi].
pub fn random_raw(r: &mut StdRng, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..n).map(|_| r.random_range(lo..=hi)).collect()).collect()
}

/// Symmetric matrix with entries uniform in [lo, hi].
pub fn random_symmetric_raw(r: &mut StdRng, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = r.random_range(lo..=hi);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

pub fn random_instance(r: &mut StdRng, n: usize) -> QuboInstance {
    symmetrize(&random_symmetric_raw(r, n, -5.0, 5.0)).unwrap()
}

/// Random instance with all off-diagonal entries ≤ 0.
pub fn random_submodular(r: &mut StdRng, n: usize) -> QuboInstance {
    let mut m = random_symmetric_raw(r, n, -5.0, 5.0);
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j {
                *v = -v.abs();
            }
        }
    }
    symmetrize(&m).unwrap()
}

/// xᵀAx summed term by term.
pub fn xtax(a: &[Vec<f64>], x: &[u8]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if x[i] == 1 && x[j] == 1 {
                s += v;
            }
        }
    }
    s
}

pub fn bits_of(index: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

/// Objective value of every assignment, indexed by the integer whose bit i is xᵢ.
pub fn all_values(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    (0..1u64 << n).map(|k| xtax(a, &bits_of(k, n))).collect()
}

pub fn min_max(a: &[Vec<f64>]) -> (f64, f64) {
    all_values(a).into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Population mean and variance over all 2ⁿ assignments.
pub fn enumerated_moments(a: &[Vec<f64>]) -> (f64, f64) {
    let vals = all_values(a);
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    (mean, var)
}

/// Variance via covariances of the monomials xᵢ and xᵢxⱼ (i<j):
/// Cov(m_S, m_T) = 2^-|S∪T| − 2^-(|S|+|T|).
pub fn monomial_variance(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut terms: Vec<(Vec<usize>, f64)> = Vec::new();
    for i in 0..n {
        terms.push((vec![i], a[i][i]));
        for j in (i + 1)..n {
            terms.push((vec![i, j], a[i][j] + a[j][i]));
        }
    }
    let mut var = 0.0;
    for (s, cs) in &terms {
        for (t, ct) in &terms {
            let mut u = s.clone();
            u.extend(t.iter().copied());
            u.sort_unstable();
            u.dedup();
            let cov = 0.5f64.powi(u.len() as i32) - 0.5f64.powi((s.len() + t.len()) as i32);
            var += cs * ct * cov;
        }
    }
    var
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
