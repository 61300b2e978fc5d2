//! `mqubo` command-line interface.
//!
//! Exit codes: 0 success, 1 usage or plan validation, 2 parse failure,
//! 3 invariant violation, 4 every experiment cell failed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::exec;
use crate::format;
use crate::moments;
use crate::pareto::{self, FrontSet, ObjectiveVector, SolutionRecord};
use crate::pipeline::{self, CellStatus, ExperimentPlan, ExperimentReport};
use crate::problems::{self, GeneratorConfig};
use crate::rng;
use crate::roofdual;
use crate::scaling::{self, ScalingMethod};
use crate::solve::{self, OutcomeFile, SolveConfig, TempSchedule};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_ALL_FAILED: i32 = 4;

/// Relative tolerance for `moments --verify`.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "mqubo", version, about = "Scaling, solving and hypervolume evaluation for multi-objective QUBOs")]
pub struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a Barabási–Albert graph and the QUBO families on it.
    Gen(GenArgs),
    /// Exact mean, second moment and variance under uniform assignments.
    Moments(MomentsArgs),
    /// Roof-dual lower/upper bounds of an instance.
    Bounds(BoundsArgs),
    /// Rescale every objective of a multi-objective file.
    Scale(ScaleArgs),
    /// Minimize an instance by simulated annealing or brute force.
    Solve(SolveArgs),
    /// Score solver outcomes under every objective and keep the non-dominated ones.
    Pareto(ParetoArgs),
    /// Hypervolume of fronts, exact or averaged over random reference points.
    Hv(HvArgs),
    /// Run the full scaling-method comparison.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator config JSON: {"n", "attach_m", "seed", "families"}.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Instance JSON file.
    pub instance: PathBuf,
    /// Cross-check the O(n³) variance against the O(n⁴) second-moment sum.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Instance JSON file.
    pub instance: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    /// Multi-objective JSON file.
    pub input: PathBuf,
    /// original | roof_dual | standardize
    #[arg(long, default_value = "standardize")]
    pub method: ScalingMethod,
    /// Where to write the rescaled multi-objective file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance JSON file.
    pub instance: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Per-run wall-clock limit; omit for a fixed, reproducible schedule.
    #[arg(long)]
    pub time_limit_ms: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub sweeps_per_temp: usize,
    #[arg(long, requires = "t_end")]
    pub t_start: Option<f64>,
    #[arg(long, requires = "t_start")]
    pub t_end: Option<f64>,
    /// Exact enumeration instead of annealing (n <= 26).
    #[arg(long)]
    pub brute_force: bool,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    /// Multi-objective JSON file defining F(x).
    pub objectives: PathBuf,
    /// Solver outcome JSON files.
    #[arg(required = true)]
    pub outcomes: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HvArgs {
    /// Front JSON files (as written by `pareto`).
    #[arg(required = true)]
    pub fronts: Vec<PathBuf>,
    /// Exact hypervolume at this reference point (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub reference: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10_000)]
    pub ref_points: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment plan JSON.
    pub plan: PathBuf,
    /// Output directory for report.csv, report.json and scaling.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Master seed (required unless the plan sets one).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub ref_points: Option<usize>,
    #[arg(long)]
    pub time_limit_ms: Option<u64>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVARIANT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Json(_) | Error::InvalidBits(_) => EXIT_PARSE,
            Error::Io(_) | Error::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_INVARIANT,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::usage(format!("{} is not a readable file", path.display())))
    }
}

fn prepare_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))
}

fn prepare_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => prepare_dir(p),
        _ => Ok(()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError { code: EXIT_PARSE, message: format!("{}: {e}", path.display()) })
}

fn with_path(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| {
        let mut c = CliError::from(e);
        c.message = format!("{}: {}", path.display(), c.message);
        c
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)? + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rng::entropy_seed();
        eprintln!("seed: {s}");
        s
    })
}

pub fn run(cli: Cli) -> CliResult<i32> {
    let jobs = cli.jobs;
    if jobs == Some(0) {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    exec::with_jobs(jobs, move || match cli.command {
        Command::Gen(a) => gen(a),
        Command::Moments(a) => moments_cmd(a),
        Command::Bounds(a) => bounds(a),
        Command::Scale(a) => scale(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Pareto(a) => pareto_cmd(a),
        Command::Hv(a) => hv(a),
        Command::Experiment(a) => experiment(a),
    })
}

fn gen(a: GenArgs) -> CliResult<i32> {
    require_file(&a.config)?;
    prepare_dir(&a.out)?;
    let cfg: GeneratorConfig = read_json(&a.config)?;
    cfg.validate()?;
    let seed = seed_or_entropy(a.seed.or(cfg.seed));
    let (graph, instances) = problems::generate_all(&cfg, seed)?;
    for q in &instances {
        format::write_instance(a.out.join(format!("{}.json", q.label())), q)?;
    }
    if instances.len() >= 2 {
        let set = crate::qubo::MultiObjectiveSet::new(instances.clone())?;
        format::write_multi(a.out.join("multi.json"), &set)?;
    }
    println!(
        "{}",
        serde_json::json!({
            "seed": seed,
            "n": cfg.n,
            "edges": graph.edges().len(),
            "families": cfg.families,
        })
    );
    Ok(0)
}

fn moments_cmd(a: MomentsArgs) -> CliResult<i32> {
    require_file(&a.instance)?;
    let q = format::read_instance(&a.instance).map_err(with_path(&a.instance))?;
    if a.verify {
        let (summary, rel) = moments::moment_summary_verified(&q);
        let mut v = serde_json::to_value(summary).map_err(Error::from)?;
        v["path_rel_diff"] = serde_json::json!(rel);
        println!("{}", serde_json::to_string(&v).map_err(Error::from)?);
        if rel > VERIFY_TOL {
            return Err(CliError::invariant(format!(
                "variance paths disagree: relative difference {rel:e} exceeds {VERIFY_TOL:e}"
            )));
        }
    } else {
        println!("{}", serde_json::to_string(&moments::moment_summary(&q)).map_err(Error::from)?);
    }
    Ok(0)
}

fn bounds(a: BoundsArgs) -> CliResult<i32> {
    require_file(&a.instance)?;
    let q = format::read_instance(&a.instance).map_err(with_path(&a.instance))?;
    emit(&roofdual::roof_dual_range(&q), None)?;
    Ok(0)
}

fn scale(a: ScaleArgs) -> CliResult<i32> {
    require_file(&a.input)?;
    prepare_parent(&a.out)?;
    let set = format::read_multi(&a.input).map_err(with_path(&a.input))?;
    let (scaled, reports) = scaling::apply(a.method, &set)?;
    format::write_multi(&a.out, &scaled)?;
    emit(&reports, None)?;
    Ok(0)
}

fn solve_cmd(a: SolveArgs) -> CliResult<i32> {
    require_file(&a.instance)?;
    if let Some(out) = &a.out {
        prepare_parent(out)?;
    }
    let q = format::read_instance(&a.instance).map_err(with_path(&a.instance))?;
    let cfg = SolveConfig {
        time_limit_ms: a.time_limit_ms,
        runs: a.runs,
        seed: seed_or_entropy(a.seed),
        sweeps_per_temp: a.sweeps_per_temp,
        temp_schedule: a.t_start.zip(a.t_end).map(|(t_start, t_end)| TempSchedule { t_start, t_end }),
    };
    cfg.validate()?;
    let outcome = if a.brute_force { solve::brute_force_outcome(&q, &cfg)? } else { solve::anneal(&q, &cfg)? };
    emit(&outcome.to_json(&cfg), a.out.as_deref())?;
    Ok(0)
}

fn pareto_cmd(a: ParetoArgs) -> CliResult<i32> {
    require_file(&a.objectives)?;
    for p in &a.outcomes {
        require_file(p)?;
    }
    if let Some(out) = &a.out {
        prepare_parent(out)?;
    }
    let set = format::read_multi(&a.objectives).map_err(with_path(&a.objectives))?;
    let mut records = Vec::new();
    for p in &a.outcomes {
        let outcome: OutcomeFile = read_json(p)?;
        for r in outcome.runs {
            records.push(SolutionRecord::evaluate(&set, r.bits).map_err(with_path(p))?);
        }
    }
    emit(&pareto::non_dominated_filter(records), a.out.as_deref())?;
    Ok(0)
}

fn hv(a: HvArgs) -> CliResult<i32> {
    for p in &a.fronts {
        require_file(p)?;
    }
    if let Some(out) = &a.out {
        prepare_parent(out)?;
    }
    let fronts = a.fronts.iter().map(|p| read_json::<FrontSet>(p)).collect::<CliResult<Vec<_>>>()?;
    if let Some(reference) = a.reference {
        let reference = ObjectiveVector(reference);
        let vols = fronts
            .iter()
            .map(|f| pareto::hypervolume_exact(f, &reference).map(|h| serde_json::json!({"volume": h.volume, "clipped": h.clipped})))
            .collect::<crate::Result<Vec<_>>>()?;
        emit(&vols, a.out.as_deref())?;
    } else {
        let seed = seed_or_entropy(a.seed);
        let proto = pareto::build_protocol(&fronts, a.ref_points, seed)?;
        let results = fronts
            .iter()
            .map(|f| pareto::averaged_hypervolume(f, &proto))
            .collect::<crate::Result<Vec<_>>>()?;
        emit(&results, a.out.as_deref())?;
    }
    Ok(0)
}

fn experiment(a: ExperimentArgs) -> CliResult<i32> {
    require_file(&a.plan)?;
    prepare_dir(&a.out)?;
    let mut plan: ExperimentPlan = read_json(&a.plan)?;
    let seed = a
        .seed
        .or(plan.seed)
        .ok_or_else(|| CliError::usage("experiment requires --seed (or a \"seed\" in the plan)"))?;
    plan.seed = Some(seed);
    if let Some(r) = a.runs {
        plan.solver.runs = r;
    }
    if let Some(r) = a.reps {
        plan.repetitions = r;
    }
    if let Some(r) = a.ref_points {
        plan.hv.ref_points = r;
    }
    if let Some(t) = a.time_limit_ms {
        plan.solver.time_limit_ms = Some(t);
    }
    plan.validate()?;
    let started = std::time::Instant::now();
    let report = pipeline::run_experiment(&plan, seed)?;
    // timing goes to stderr only so the output files stay byte-identical
    eprintln!("experiment finished in {:.1} s", started.elapsed().as_secs_f64());
    for combo in &report.combinations {
        let name = combo.families.iter().map(|f| f.code()).collect::<Vec<_>>().join("+");
        for cell in &combo.cells {
            match (&cell.status, cell.hv_mean) {
                (CellStatus::Ok, Some(m)) => eprintln!("cell {name} {}: ok hv_mean={}", cell.method, pipeline::sig6(m)),
                _ => eprintln!("cell {name} {}: FAILED {}", cell.method, cell.error.as_deref().unwrap_or("")),
            }
        }
    }
    pipeline::write_outputs(&report, &a.out)?;
    print!("{}", pipeline::format_report_table(&report));
    println!();
    print!("{}", pipeline::format_scaling_table(&report.scaling));
    let code = experiment_exit_code(&report);
    if code == EXIT_ALL_FAILED {
        eprintln!("every cell failed");
    }
    Ok(code)
}

/// 0 when at least one cell succeeded, otherwise [`EXIT_ALL_FAILED`].
pub fn experiment_exit_code(report: &ExperimentReport) -> i32 {
    if report.ok_cells() == 0 {
        EXIT_ALL_FAILED
    } else {
        0
    }
}
