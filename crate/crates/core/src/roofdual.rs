//! Roof-dual bounds and range normalization.
//!
//! The objective is rewritten as a posiform `a₀ + Σ a_uv·u·v` with nonnegative
//! coefficients over literals (xᵢ, x̄ᵢ and the constant-true literal x₀). Each
//! term `a·u·v` contributes arcs `u → v̄` and `v → ū` of capacity `a/2` to the
//! implication network, and the roof-dual bound is `a₀` plus the maximum
//! `x₀ → x̄₀` flow.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::maxflow::FlowNetwork;
use crate::qubo::{MultiObjectiveSet, QuboInstance};
use crate::scaling::{self, ScalingMethod, ScalingReport};

pub const FLOW_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeEstimate {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
}

struct Literals {
    n: usize,
}

impl Literals {
    fn pos(&self, i: usize) -> usize {
        i
    }
    fn neg(&self, i: usize) -> usize {
        self.n + i
    }
    fn truth(&self) -> usize {
        2 * self.n
    }
    fn falsity(&self) -> usize {
        2 * self.n + 1
    }
    fn complement(&self, lit: usize) -> usize {
        match lit {
            l if l < self.n => l + self.n,
            l if l < 2 * self.n => l - self.n,
            l if l == self.truth() => self.falsity(),
            _ => self.truth(),
        }
    }
}

/// Lower bound on `min_x f(x)`.
pub fn roof_dual_lower(instance: &QuboInstance) -> f64 {
    let n = instance.n();
    let lits = Literals { n };
    let mut network = FlowNetwork::new(2 * n + 2);
    let term = |net: &mut FlowNetwork, u: usize, v: usize, a: f64| {
        net.add_arc(u, lits.complement(v), a / 2.0);
        net.add_arc(v, lits.complement(u), a / 2.0);
    };

    let mut linear: Vec<f64> = (0..n).map(|i| instance.get(i, i)).collect();
    for (i, lin) in linear.iter_mut().enumerate() {
        for j in (i + 1)..n {
            let b = instance.get(i, j) + instance.get(j, i);
            if b > 0.0 {
                term(&mut network, lits.pos(i), lits.pos(j), b);
            } else if b < 0.0 {
                // b·xᵢxⱼ = b·xᵢ + |b|·xᵢx̄ⱼ
                *lin += b;
                term(&mut network, lits.pos(i), lits.neg(j), -b);
            }
        }
    }
    let mut constant = 0.0;
    for (i, &a) in linear.iter().enumerate() {
        if a > 0.0 {
            term(&mut network, lits.truth(), lits.pos(i), a);
        } else if a < 0.0 {
            // a·xᵢ = a + |a|·x̄ᵢ
            constant += a;
            term(&mut network, lits.truth(), lits.neg(i), -a);
        }
    }
    constant + network.max_flow(lits.truth(), lits.falsity(), FLOW_EPS)
}

/// `[roof_dual_lower(Q), −roof_dual_lower(−Q)]`; the upper end bounds the maximum.
pub fn roof_dual_range(instance: &QuboInstance) -> RangeEstimate {
    let lower = roof_dual_lower(instance);
    let upper = -roof_dual_lower(&instance.negated());
    // the two solves are independent; keep the invariant under round-off
    let upper = upper.max(lower);
    RangeEstimate { lower, upper, width: upper - lower }
}

/// Divides each objective by its estimated range width.
pub fn normalize_by_range(set: &MultiObjectiveSet) -> Result<(MultiObjectiveSet, Vec<ScalingReport>)> {
    scaling::apply(ScalingMethod::RoofDual, set)
}
