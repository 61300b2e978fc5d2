//! End-to-end comparison of scaling methods on generated multi-objective QUBOs.
//!
//! For every family combination and scaling method the objectives are rescaled,
//! summed with equal weights and solved `runs` times per repetition. Every run's
//! assignment is scored under the *unscaled* objectives, the scores are reduced
//! to a non-dominated front, and fronts are compared by hypervolume averaged
//! over random reference points drawn from one box shared by all methods of a
//! combination.
//!
//! Seeds: everything derives from the master seed through [`rng::derive_path`]
//! with a fixed leading tag (`0` generator, `2` solver, `3` reference points),
//! followed by the combination bitmask, the method id and the repetition.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::moments;
use crate::pareto::{self, FrontSet, HvProtocol, SolutionRecord};
use crate::problems::{self, Family, GeneratorConfig};
use crate::qubo::{self, MultiObjectiveSet, QuboInstance};
use crate::roofdual;
use crate::rng;
use crate::scaling::{ScalingMethod, ScalingReport};
use crate::solve::{self, SolveConfig, TempSchedule};

const TAG_GENERATOR: u64 = 0;
const TAG_SOLVER: u64 = 2;
const TAG_HV: u64 = 3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Anneal,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverPlan {
    #[serde(default)]
    pub kind: SolverKind,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_sweeps")]
    pub sweeps_per_temp: usize,
    #[serde(default)]
    pub time_limit_ms: Option<u64>,
    #[serde(default)]
    pub temp_schedule: Option<TempSchedule>,
}

fn default_runs() -> usize {
    20
}

fn default_sweeps() -> usize {
    10
}

fn default_reps() -> usize {
    20
}

fn default_ref_points() -> usize {
    10_000
}

fn default_methods() -> Vec<ScalingMethod> {
    ScalingMethod::ALL.to_vec()
}

impl Default for SolverPlan {
    fn default() -> Self {
        Self {
            kind: SolverKind::Anneal,
            runs: default_runs(),
            sweeps_per_temp: default_sweeps(),
            time_limit_ms: None,
            temp_schedule: None,
        }
    }
}

impl SolverPlan {
    fn config(&self, seed: u64) -> SolveConfig {
        SolveConfig {
            time_limit_ms: self.time_limit_ms,
            runs: self.runs,
            seed,
            sweeps_per_temp: self.sweeps_per_temp,
            temp_schedule: self.temp_schedule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HvPlan {
    #[serde(default = "default_ref_points")]
    pub ref_points: usize,
}

impl Default for HvPlan {
    fn default() -> Self {
        Self { ref_points: default_ref_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub generator: GeneratorConfig,
    /// Defaults to every subset of `generator.families` with at least two members.
    #[serde(default)]
    pub combinations: Option<Vec<Vec<Family>>>,
    #[serde(default = "default_methods")]
    pub methods: Vec<ScalingMethod>,
    #[serde(default)]
    pub solver: SolverPlan,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub hv: HvPlan,
    /// Master seed; the CLI flag takes precedence.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ExperimentPlan {
    pub fn new(generator: GeneratorConfig) -> Self {
        Self {
            generator,
            combinations: None,
            methods: default_methods(),
            solver: SolverPlan::default(),
            repetitions: default_reps(),
            hv: HvPlan::default(),
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("plan lists no scaling methods".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        if self.hv.ref_points == 0 {
            return Err(Error::InvalidConfig("hv.ref_points must be at least 1".into()));
        }
        self.solver.config(0).validate()?;
        if self.solver.kind == SolverKind::BruteForce && self.generator.n > solve::BRUTE_FORCE_LIMIT {
            return Err(Error::TooLarge { n: self.generator.n, limit: solve::BRUTE_FORCE_LIMIT });
        }
        for combo in self.resolved_combinations() {
            if combo.len() < 2 {
                return Err(Error::InvalidConfig(format!("combination {combo:?} has fewer than two families")));
            }
            if combo.len() > pareto::MAX_EXACT_DIM {
                return Err(Error::UnsupportedDimension(combo.len()));
            }
            for f in &combo {
                if !self.generator.families.contains(f) {
                    return Err(Error::InvalidConfig(format!("combination uses {f}, which is not generated")));
                }
            }
            let mut sorted = combo.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != combo.len() {
                return Err(Error::InvalidConfig(format!("combination {combo:?} repeats a family")));
            }
        }
        Ok(())
    }

    pub fn resolved_combinations(&self) -> Vec<Vec<Family>> {
        self.combinations.clone().unwrap_or_else(|| all_combinations(&self.generator.families))
    }
}

/// Subsets of size ≥ 2, by size, then lexicographically by position.
pub fn all_combinations(families: &[Family]) -> Vec<Vec<Family>> {
    let k = families.len();
    let mut out = Vec::new();
    for size in 2..=k {
        let mut masks: Vec<u32> = (0u32..(1 << k)).filter(|m| m.count_ones() as usize == size).collect();
        // lexicographic order over chosen positions
        masks.sort_by_key(|m| (0..k).filter(|i| m & (1 << i) != 0).collect::<Vec<_>>());
        for m in masks {
            out.push((0..k).filter(|i| m & (1 << i) != 0).map(|i| families[i]).collect());
        }
    }
    out
}

fn family_mask(combo: &[Family]) -> u64 {
    combo.iter().fold(0, |m, f| m | (1 << f.id()))
}

/// One row of the range / standard-deviation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub label: String,
    pub roof_dual_lower: f64,
    pub roof_dual_upper: f64,
    pub roof_dual_range: f64,
    pub mean: f64,
    pub std_dev: f64,
}

impl ScalingRow {
    pub fn for_instance(q: &QuboInstance) -> Self {
        let r = roofdual::roof_dual_range(q);
        let m = moments::moment_summary(q);
        Self {
            label: q.label().to_string(),
            roof_dual_lower: r.lower,
            roof_dual_upper: r.upper,
            roof_dual_range: r.width,
            mean: m.mean,
            std_dev: m.std_dev,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.roof_dual_range / self.std_dev
    }
}

/// Roof-dual width and σ for every objective.
pub fn scaling_summary(set: &MultiObjectiveSet) -> Vec<ScalingRow> {
    scaling_rows(set.objectives())
}

pub fn scaling_rows(objectives: &[QuboInstance]) -> Vec<ScalingRow> {
    Exec::default().map(objectives.len(), |i| ScalingRow::for_instance(&objectives[i]))
}

pub fn format_scaling_table(rows: &[ScalingRow]) -> String {
    let mut s = format!("{:<10} {:>15} {:>15}\n", "QUBO", "Roof Dual Range", "Std. Deviation");
    for r in rows {
        let _ = writeln!(s, "{:<10} {:>15} {:>15}", display_label(&r.label), sig6(r.roof_dual_range), sig6(r.std_dev));
    }
    s
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut s = String::from("qubo,roof_dual_lower,roof_dual_upper,roof_dual_range,std_dev\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.label,
            sig6(r.roof_dual_lower),
            sig6(r.roof_dual_upper),
            sig6(r.roof_dual_range),
            sig6(r.std_dev)
        );
    }
    s
}

fn display_label(label: &str) -> &str {
    label.parse::<Family>().map(Family::display_name).unwrap_or(label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub method: ScalingMethod,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Mean over repetitions of the averaged hypervolume.
    pub hv_mean: Option<f64>,
    /// Spread of the per-repetition averages.
    pub hv_std_reps: Option<f64>,
    /// Mean over repetitions of the spread across reference points.
    pub hv_std_ref_points: Option<f64>,
    pub rep_means: Vec<f64>,
    pub front_sizes: Vec<usize>,
    pub scaling: Vec<ScalingReport>,
    pub solver_seeds: Vec<u64>,
    #[serde(skip)]
    pub fronts: Vec<FrontSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    pub families: Vec<Family>,
    pub protocol: Option<HvProtocol>,
    pub cells: Vec<CellReport>,
}

impl CombinationReport {
    pub fn cell(&self, method: ScalingMethod) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.method == method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub master_seed: u64,
    pub generator_seed: u64,
    pub plan: ExperimentPlan,
    pub scaling: Vec<ScalingRow>,
    pub combinations: Vec<CombinationReport>,
}

impl ExperimentReport {
    pub fn ok_cells(&self) -> usize {
        self.combinations.iter().flat_map(|c| &c.cells).filter(|c| c.status == CellStatus::Ok).count()
    }

    pub fn total_cells(&self) -> usize {
        self.combinations.iter().map(|c| c.cells.len()).sum()
    }
}

struct Job {
    combo: usize,
    method: usize,
    rep: usize,
}

type SolvedRep = std::result::Result<(FrontSet, u64), String>;

/// Runs the whole comparison. `master_seed` overrides `plan.seed`.
pub fn run_experiment(plan: &ExperimentPlan, master_seed: u64) -> Result<ExperimentReport> {
    plan.validate()?;
    let generator_seed = plan.generator.seed.unwrap_or_else(|| rng::derive(master_seed, TAG_GENERATOR));
    let (_, instances) = problems::generate_all(&plan.generator, generator_seed)?;
    run_experiment_on(plan, master_seed, generator_seed, &instances)
}

/// Same as [`run_experiment`] on given instances, one per entry of
/// `plan.generator.families` and in that order.
pub fn run_experiment_on(
    plan: &ExperimentPlan,
    master_seed: u64,
    generator_seed: u64,
    instances: &[QuboInstance],
) -> Result<ExperimentReport> {
    plan.validate()?;
    let families = &plan.generator.families;
    if instances.len() != families.len() {
        return Err(Error::DimensionMismatch { expected: families.len(), actual: instances.len() });
    }
    let family_index = |f: Family| families.iter().position(|&g| g == f).expect("validated");

    let scaling_table = scaling_rows(instances);
    let combos = plan.resolved_combinations();
    let sets: Vec<MultiObjectiveSet> = combos
        .iter()
        .map(|c| MultiObjectiveSet::new(c.iter().map(|&f| instances[family_index(f)].clone()).collect()))
        .collect::<Result<_>>()?;
    // per combination, per method: scaling reports or the first failure
    let cell_scaling: Vec<Vec<std::result::Result<Vec<ScalingReport>, String>>> = combos
        .iter()
        .map(|c| {
            plan.methods
                .iter()
                .map(|&m| {
                    c.iter()
                        .enumerate()
                        .map(|(idx, &f)| cached_report(m, idx, &scaling_table[family_index(f)]))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| e.to_string())
                })
                .collect()
        })
        .collect();

    let jobs: Vec<Job> = (0..combos.len())
        .flat_map(|combo| {
            (0..plan.methods.len())
                .flat_map(move |method| (0..plan.repetitions).map(move |rep| Job { combo, method, rep }))
        })
        .collect();

    let exec = Exec::default();
    let solved: Vec<SolvedRep> = exec.map(jobs.len(), |k| {
        let job = &jobs[k];
        let reports = cell_scaling[job.combo][job.method].as_ref().map_err(Clone::clone)?;
        let set = &sets[job.combo];
        let factors: Vec<f64> = reports.iter().map(|r| r.scale).collect();
        let scalarized = set
            .rescaled(&factors)
            .and_then(|s| qubo::scalarize_equal(&s))
            .map_err(|e| e.to_string())?;
        let seed = rng::derive_path(
            master_seed,
            &[TAG_SOLVER, family_mask(&combos[job.combo]), plan.methods[job.method].id(), job.rep as u64],
        );
        let cfg = plan.solver.config(seed);
        let outcome = match plan.solver.kind {
            SolverKind::Anneal => solve::anneal(&scalarized, &cfg),
            SolverKind::BruteForce => solve::brute_force_outcome(&scalarized, &cfg),
        }
        .map_err(|e| e.to_string())?;
        let records = outcome
            .runs
            .into_iter()
            .map(|r| SolutionRecord::evaluate(set, r.bits))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        Ok((pareto::non_dominated_filter(records), seed))
    });

    let reps = plan.repetitions;
    let mut combinations = Vec::with_capacity(combos.len());
    for (ci, combo) in combos.iter().enumerate() {
        let mut cells = Vec::with_capacity(plan.methods.len());
        for (mi, &method) in plan.methods.iter().enumerate() {
            let base = (ci * plan.methods.len() + mi) * reps;
            let results = &solved[base..base + reps];
            let scaling = cell_scaling[ci][mi].clone().unwrap_or_default();
            match results.iter().find_map(|r| r.as_ref().err()) {
                Some(err) => cells.push(failed_cell(method, err.clone(), scaling)),
                None => {
                    let (fronts, seeds): (Vec<FrontSet>, Vec<u64>) =
                        results.iter().map(|r| r.clone().expect("checked")).unzip();
                    cells.push(CellReport {
                        method,
                        status: CellStatus::Ok,
                        error: None,
                        hv_mean: None,
                        hv_std_reps: None,
                        hv_std_ref_points: None,
                        rep_means: Vec::new(),
                        front_sizes: fronts.iter().map(FrontSet::len).collect(),
                        scaling,
                        solver_seeds: seeds,
                        fronts,
                    });
                }
            }
        }
        let all_fronts: Vec<FrontSet> = cells.iter().flat_map(|c| c.fronts.iter().cloned()).collect();
        let protocol = if all_fronts.is_empty() {
            None
        } else {
            let seed = rng::derive_path(master_seed, &[TAG_HV, family_mask(combo)]);
            Some(pareto::build_protocol(&all_fronts, plan.hv.ref_points, seed)?)
        };
        if let Some(proto) = &protocol {
            for cell in cells.iter_mut().filter(|c| c.status == CellStatus::Ok) {
                let hv = cell
                    .fronts
                    .iter()
                    .map(|f| pareto::averaged_hypervolume_with(f, proto, exec))
                    .collect::<Result<Vec<_>>>();
                match hv {
                    Ok(hv) => {
                        let means: Vec<f64> = hv.iter().map(|h| h.mean).collect();
                        let (mean, std) = pareto::mean_std(&means);
                        let (ref_std, _) = pareto::mean_std(&hv.iter().map(|h| h.std).collect::<Vec<_>>());
                        cell.hv_mean = Some(mean);
                        cell.hv_std_reps = Some(std);
                        cell.hv_std_ref_points = Some(ref_std);
                        cell.rep_means = means;
                    }
                    Err(e) => {
                        cell.status = CellStatus::Failed;
                        cell.error = Some(e.to_string());
                    }
                }
            }
        }
        combinations.push(CombinationReport { families: combo.clone(), protocol, cells });
    }

    Ok(ExperimentReport {
        master_seed,
        generator_seed,
        plan: plan.clone(),
        scaling: scaling_table,
        combinations,
    })
}

/// Scaling report from precomputed table values; matches `scaling::report_for`.
fn cached_report(method: ScalingMethod, index: usize, row: &ScalingRow) -> Result<ScalingReport> {
    match method {
        ScalingMethod::Original => Ok(ScalingReport::identity(index)),
        ScalingMethod::RoofDual => {
            if !(row.roof_dual_range > 0.0 && row.roof_dual_range.is_finite()) {
                return Err(Error::ZeroWidth { index });
            }
            Ok(ScalingReport {
                index,
                method,
                scale: 1.0 / row.roof_dual_range,
                sigma: None,
                mean: None,
                lower: Some(row.roof_dual_lower),
                upper: Some(row.roof_dual_upper),
            })
        }
        ScalingMethod::Standardize => {
            if !(row.std_dev > 0.0 && row.std_dev.is_finite()) {
                return Err(Error::ZeroVariance { index });
            }
            Ok(ScalingReport {
                index,
                method,
                scale: 1.0 / row.std_dev,
                sigma: Some(row.std_dev),
                mean: Some(row.mean),
                lower: None,
                upper: None,
            })
        }
    }
}

fn failed_cell(method: ScalingMethod, error: String, scaling: Vec<ScalingReport>) -> CellReport {
    CellReport {
        method,
        status: CellStatus::Failed,
        error: Some(error),
        hv_mean: None,
        hv_std_reps: None,
        hv_std_ref_points: None,
        rep_means: Vec::new(),
        front_sizes: Vec::new(),
        scaling,
        solver_seeds: Vec::new(),
        fronts: Vec::new(),
    }
}

/// Six significant digits in scientific notation.
pub fn sig6(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else {
        x.to_string()
    }
}

fn round_sig6(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.5e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn round_floats(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => {
            if let Some(num) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig6(x))) {
                *n = num;
            }
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(round_floats),
        serde_json::Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Table-I layout: one row per combination, family flags then mean/std per method.
pub fn report_csv(report: &ExperimentReport) -> String {
    let families = &report.plan.generator.families;
    let mut s = families.iter().map(|f| f.code().to_string()).collect::<Vec<_>>().join(",");
    for m in &report.plan.methods {
        let _ = write!(s, ",{m}_mean,{m}_std");
    }
    s.push('\n');
    for combo in &report.combinations {
        let flags: Vec<&str> =
            families.iter().map(|f| if combo.families.contains(f) { "1" } else { "0" }).collect();
        s.push_str(&flags.join(","));
        for &m in &report.plan.methods {
            match combo.cell(m) {
                Some(CellReport { status: CellStatus::Ok, hv_mean: Some(mean), hv_std_reps: Some(std), .. }) => {
                    let _ = write!(s, ",{},{}", sig6(*mean), sig6(*std));
                }
                _ => s.push_str(",FAILED,FAILED"),
            }
        }
        s.push('\n');
    }
    s
}

/// Full report as pretty JSON with floats at six significant digits.
pub fn report_json(report: &ExperimentReport) -> Result<String> {
    let mut v = serde_json::to_value(report)?;
    round_floats(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn format_report_table(report: &ExperimentReport) -> String {
    let mut s = format!("{:<28}", "combination");
    for m in &report.plan.methods {
        let _ = write!(s, " {:>13} {:>13}", format!("{m} mean"), "std");
    }
    s.push('\n');
    for combo in &report.combinations {
        let name = combo.families.iter().map(|f| f.display_name()).collect::<Vec<_>>().join(" ");
        let _ = write!(s, "{name:<28}");
        for &m in &report.plan.methods {
            match combo.cell(m) {
                Some(CellReport { status: CellStatus::Ok, hv_mean: Some(mean), hv_std_reps: Some(std), .. }) => {
                    let _ = write!(s, " {:>13} {:>13}", sig6(*mean), sig6(*std));
                }
                _ => {
                    let _ = write!(s, " {:>13} {:>13}", "FAILED", "-");
                }
            }
        }
        s.push('\n');
    }
    s
}

/// Writes `report.csv`, `report.json` and `scaling.csv` into `dir`.
pub fn write_outputs(report: &ExperimentReport, dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.csv"), report_csv(report))?;
    std::fs::write(dir.join("report.json"), report_json(report)?)?;
    std::fs::write(dir.join("scaling.csv"), scaling_csv(&report.scaling))?;
    Ok(())
}
