//! QUBO minimization: exhaustive Gray-code search and restart simulated annealing.

use std::time::{Duration, Instant};

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::qubo::{BinaryVector, QuboInstance};
use crate::rng;

pub const BRUTE_FORCE_LIMIT: usize = 26;
/// Number of temperatures in a geometric schedule.
pub const TEMPERATURE_STEPS: usize = 200;

/// Local fields `hₖ = Σ_{j≠k} Qₖⱼ xⱼ` of a symmetric instance, giving the flip
/// delta `(1 − 2xₖ)(Qₖₖ + 2hₖ)` in O(1) and an O(n) update per flip.
struct FlipState<'a> {
    q: &'a QuboInstance,
    x: Vec<u8>,
    h: Vec<f64>,
    value: f64,
}

impl<'a> FlipState<'a> {
    fn new(q: &'a QuboInstance, x: Vec<u8>) -> Self {
        let n = q.n();
        let h = (0..n)
            .map(|k| {
                let row = q.row(k);
                (0..n).filter(|&j| j != k && x[j] == 1).map(|j| row[j]).sum()
            })
            .collect();
        let value = q.evaluate_unchecked(&x);
        Self { q, x, h, value }
    }

    #[inline]
    fn delta(&self, k: usize) -> f64 {
        let sign = if self.x[k] == 1 { -1.0 } else { 1.0 };
        sign * (self.q.get(k, k) + 2.0 * self.h[k])
    }

    fn flip(&mut self, k: usize, delta: f64) {
        let step = if self.x[k] == 1 { -1.0 } else { 1.0 };
        self.x[k] ^= 1;
        self.value += delta;
        let row = self.q.row(k);
        for (j, h) in self.h.iter_mut().enumerate() {
            if j != k {
                *h += step * row[j];
            }
        }
    }
}

/// Tolerance used to treat two objective values as tied.
fn tie_tolerance(q: &QuboInstance) -> f64 {
    1e-12 * q.matrix().iter().map(|v| v.abs()).sum::<f64>().max(1.0)
}

/// Exact minimizer; ties go to the lexicographically smallest vector.
pub fn brute_force(instance: &QuboInstance) -> Result<(BinaryVector, f64)> {
    let n = instance.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    let tol = tie_tolerance(instance);
    let mut state = FlipState::new(instance, vec![0; n]);
    let mut best = state.x.clone();
    let mut best_value = state.value;
    for step in 1u64..(1u64 << n) {
        let k = step.trailing_zeros() as usize;
        let d = state.delta(k);
        state.flip(k, d);
        if state.value < best_value - tol || (state.value <= best_value + tol && state.x < best) {
            best_value = best_value.min(state.value);
            best.clone_from(&state.x);
        }
    }
    let best = BinaryVector::new(best)?;
    let value = instance.evaluate(&best)?;
    Ok((best, value))
}

/// Every assignment within `rel_tol · Σ|Q|` of the minimum, in index order.
/// Each candidate is evaluated from scratch.
pub fn minimizers(instance: &QuboInstance, rel_tol: f64) -> Result<Vec<BinaryVector>> {
    let n = instance.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    let values: Vec<f64> =
        (0..1u64 << n).map(|idx| instance.evaluate_unchecked(BinaryVector::from_index(idx, n).bits())).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = rel_tol * instance.matrix().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= min + tol)
        .map(|(idx, _)| BinaryVector::from_index(idx as u64, n))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TempSchedule {
    pub t_start: f64,
    pub t_end: f64,
}

impl TempSchedule {
    /// Hot start at `max|Q|·n`, cold end at `1e-3 ·` median nonzero `|Q|`.
    pub fn for_instance(q: &QuboInstance) -> Option<Self> {
        let mut mags: Vec<f64> = q.matrix().iter().map(|v| v.abs()).filter(|&v| v > 0.0).collect();
        if mags.is_empty() {
            return None;
        }
        mags.sort_by(f64::total_cmp);
        let median = mags[mags.len() / 2];
        let t_start = q.max_abs() * q.n() as f64;
        let t_end = (1e-3 * median).min(t_start * 0.5);
        Some(Self { t_start, t_end })
    }

    /// Geometric factor between consecutive temperatures.
    pub fn factor(&self) -> f64 {
        (self.t_end / self.t_start).powf(1.0 / (TEMPERATURE_STEPS - 1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    /// Wall-clock budget per run; `None` runs the full schedule (deterministic).
    #[serde(default)]
    pub time_limit_ms: Option<u64>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sweeps")]
    pub sweeps_per_temp: usize,
    /// Defaults to [`TempSchedule::for_instance`].
    #[serde(default)]
    pub temp_schedule: Option<TempSchedule>,
}

fn default_runs() -> usize {
    20
}

fn default_sweeps() -> usize {
    10
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { time_limit_ms: None, runs: default_runs(), seed: 0, sweeps_per_temp: default_sweeps(), temp_schedule: None }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.time_limit_ms == Some(0) {
            return Err(Error::InvalidConfig("time_limit_ms must be positive".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if self.sweeps_per_temp == 0 {
            return Err(Error::InvalidConfig("sweeps_per_temp must be at least 1".into()));
        }
        if let Some(s) = self.temp_schedule {
            if !(s.t_start > s.t_end && s.t_end > 0.0 && s.t_start.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "temperature schedule needs t_start > t_end > 0 (got {} -> {})",
                    s.t_start, s.t_end
                )));
            }
        }
        Ok(())
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        rng::derive(self.seed, run as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub best_value: f64,
    pub bits: BinaryVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub best: BinaryVector,
    pub best_value: f64,
    /// One best assignment per run, in run order.
    pub runs: Vec<RunResult>,
    /// Flip proposals evaluated over all runs.
    pub evaluations: u64,
}

impl SolveOutcome {
    pub fn all_solutions(&self) -> Vec<BinaryVector> {
        self.runs.iter().map(|r| r.bits.clone()).collect()
    }

    pub fn to_json(&self, config: &SolveConfig) -> OutcomeFile {
        OutcomeFile { runs: self.runs.clone(), config: config.clone() }
    }
}

/// `{"runs": [{"seed", "best_value", "bits"}], "config": {...}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeFile {
    pub runs: Vec<RunResult>,
    pub config: SolveConfig,
}

struct RunStats {
    result: RunResult,
    evaluations: u64,
}

fn anneal_run(q: &QuboInstance, cfg: &SolveConfig, schedule: Option<TempSchedule>, seed: u64) -> RunStats {
    let n = q.n();
    let mut r = rng::from_seed(seed);
    let x: Vec<u8> = (0..n).map(|_| r.random::<bool>() as u8).collect();
    let mut state = FlipState::new(q, x);
    let mut best = state.x.clone();
    let mut best_value = state.value;
    let mut evaluations = 0u64;
    let deadline = cfg.time_limit_ms.map(|ms| Instant::now() + Duration::from_millis(ms));

    if let Some(schedule) = schedule {
        let factor = schedule.factor();
        let mut t = schedule.t_start;
        'schedule: for _ in 0..TEMPERATURE_STEPS {
            for _ in 0..cfg.sweeps_per_temp {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    break 'schedule;
                }
                for k in 0..n {
                    let d = state.delta(k);
                    evaluations += 1;
                    if d <= 0.0 || r.random::<f64>() < (-d / t).exp() {
                        state.flip(k, d);
                        if state.value < best_value {
                            best_value = state.value;
                            best.clone_from(&state.x);
                        }
                    }
                }
            }
            t *= factor;
        }
        // greedy descent from the best state seen
        state = FlipState::new(q, best.clone());
        loop {
            let mut improved = false;
            for k in 0..n {
                let d = state.delta(k);
                evaluations += 1;
                if d < 0.0 {
                    state.flip(k, d);
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if state.value < best_value {
            best.clone_from(&state.x);
        }
    }
    let bits = BinaryVector::new(best).expect("annealer only produces 0/1 entries");
    let best_value = q.evaluate_unchecked(bits.bits());
    RunStats { result: RunResult { seed, best_value, bits }, evaluations }
}

/// Restart simulated annealing with single-bit Metropolis flips and geometric cooling.
pub fn anneal(instance: &QuboInstance, cfg: &SolveConfig) -> Result<SolveOutcome> {
    anneal_with(instance, cfg, Exec::default())
}

pub fn anneal_with(instance: &QuboInstance, cfg: &SolveConfig, exec: Exec) -> Result<SolveOutcome> {
    cfg.validate()?;
    let schedule = cfg.temp_schedule.or_else(|| TempSchedule::for_instance(instance));
    let stats = exec.map(cfg.runs, |run| anneal_run(instance, cfg, schedule, cfg.run_seed(run)));
    let evaluations = stats.iter().map(|s| s.evaluations).sum();
    let runs: Vec<RunResult> = stats.into_iter().map(|s| s.result).collect();
    let best_run = runs
        .iter()
        .min_by(|a, b| a.best_value.total_cmp(&b.best_value))
        .expect("validated runs >= 1");
    Ok(SolveOutcome { best: best_run.bits.clone(), best_value: best_run.best_value, runs: runs.clone(), evaluations })
}

/// Runs brute force once and reports it as `runs` identical results.
pub fn brute_force_outcome(instance: &QuboInstance, cfg: &SolveConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let (best, best_value) = brute_force(instance)?;
    let runs = (0..cfg.runs)
        .map(|run| RunResult { seed: cfg.run_seed(run), best_value, bits: best.clone() })
        .collect();
    Ok(SolveOutcome { best, best_value, runs, evaluations: 1u64 << instance.n() })
}
