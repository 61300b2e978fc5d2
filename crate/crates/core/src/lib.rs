//! Multi-objective QUBO scaling toolkit.
//!
//! Objectives `fᵢ(x) = xᵀQ⁽ⁱ⁾x` over shared binary variables are brought onto a
//! common scale before equal-weight scalarization, either by dividing by their
//! exact standard deviation under uniformly random assignments ([`moments`]) or
//! by a roof-dual estimate of their range ([`roofdual`]). The [`pipeline`]
//! module compares the resulting solutions by Pareto filtering and averaged
//! hypervolume ([`pareto`]).
//!
//! With the default `parallel` feature the O(n³) variance loop, annealing runs,
//! reference-point sweeps and experiment cells run on rayon; without it the same
//! code runs sequentially and produces identical numbers.

pub mod cli;
pub mod error;
pub mod exec;
pub mod format;
pub mod graph;
pub mod maxflow;
pub mod moments;
pub mod pareto;
pub mod pipeline;
pub mod problems;
pub mod qubo;
pub mod rng;
pub mod roofdual;
pub mod scaling;
pub mod solve;

pub use error::{Error, Result};
pub use exec::Exec;
pub use moments::{mean_uniform, second_moment_uniform, standardize, variance_fast, MomentSummary};
pub use pareto::{
    averaged_hypervolume, build_protocol, dominates, hypervolume_exact, non_dominated_filter, FrontSet, HvProtocol,
    HypervolumeResult, ObjectiveVector, SolutionRecord,
};
pub use pipeline::{run_experiment, scaling_summary, ExperimentPlan, ExperimentReport};
pub use problems::{Family, GeneratorConfig};
pub use qubo::{evaluate, scalarize, symmetrize, BinaryVector, MultiObjectiveSet, QuboInstance};
pub use roofdual::{normalize_by_range, roof_dual_lower, roof_dual_range, RangeEstimate};
pub use scaling::{ScalingMethod, ScalingReport};
pub use solve::{anneal, brute_force, SolveConfig, SolveOutcome};
