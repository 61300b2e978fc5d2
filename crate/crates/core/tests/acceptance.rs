//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.
//!
//! Run alone with `cargo test --test acceptance`.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use mqubo::exec::Exec;
use mqubo::moments::{self, Summation};
use mqubo::pareto::ObjectiveVector;
use mqubo::pipeline::{self, ExperimentPlan};
use mqubo::problems::{self, Family, GeneratorConfig};
use mqubo::{hypervolume_exact, mean_uniform, roof_dual_range, standardize, variance_fast, FrontSet, MultiObjectiveSet, QuboInstance, ScalingMethod};
use rand::rngs::StdRng;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

// 1. Mean and variance against exhaustive enumeration.
fn moment_oracle() -> Outcome {
    const TOL: f64 = 1e-9;
    let mut r = rng(0xA1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(2..=12);
        let a = random_symmetric_raw(&mut r, n, -5.0, 5.0);
        let q = mqubo::symmetrize(&a).unwrap();
        let (mean, var) = enumerated_moments(&a);
        worst = worst.max(rel_err(mean_uniform(&q), mean)).max(rel_err(variance_fast(&q), var));
    }
    check(worst <= TOL, format!("200 instances, worst relative error {worst:.2e} (tol {TOL:e})"))
}

/// Minimum and median seconds per call over `samples` timed batches.
fn time_per_call(mut f: impl FnMut(), samples: usize) -> (f64, f64) {
    let start = Instant::now();
    f();
    let once = start.elapsed().max(Duration::from_nanos(100));
    // batches of at least ~20 ms so timer resolution does not matter
    let batch = ((0.02 / once.as_secs_f64()).ceil() as usize).max(1);
    let mut per_call: Vec<f64> = (0..samples)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..batch {
                f();
            }
            t.elapsed().as_secs_f64() / batch as f64
        })
        .collect();
    per_call.sort_by(f64::total_cmp);
    (per_call[0], per_call[samples / 2])
}

fn loglog_slope(ns: &[usize], ts: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

// 2. Fast variance equals the second-moment route; timing and scaling exponents.
fn path_equivalence_and_complexity() -> Outcome {
    let mut r = rng(0xA2);
    let mut worst: f64 = 0.0;
    for n in [2, 3, 5, 8, 13, 20, 30, 45, 60] {
        for _ in 0..3 {
            let q = random_instance(&mut r, n);
            let m = mean_uniform(&q);
            let other = moments::second_moment_uniform(&q) - m * m;
            worst = worst.max(rel_err(variance_fast(&q), other));
        }
    }

    let seq = |q: &QuboInstance| moments::variance_fast_with(q, Summation::Plain, Exec::Sequential);
    let big = random_instance(&mut r, 512);
    let t = Instant::now();
    std::hint::black_box(seq(&big));
    let t512 = t.elapsed().as_secs_f64();

    let fast_ns = [64, 128, 256, 512];
    let mut fast_min = Vec::new();
    let mut fast_med = Vec::new();
    for &n in &fast_ns {
        let q = random_instance(&mut r, n);
        let (lo, med) = time_per_call(|| {
            std::hint::black_box(seq(&q));
        }, 7);
        fast_min.push(lo);
        fast_med.push(med);
    }
    let slow_ns = [16, 32, 64];
    let mut slow_min = Vec::new();
    let mut slow_med = Vec::new();
    for &n in &slow_ns {
        let q = random_instance(&mut r, n);
        let (lo, med) = time_per_call(
            || {
                std::hint::black_box(moments::second_moment_of_matrix(n, q.matrix(), Exec::Sequential));
            },
            7,
        );
        slow_min.push(lo);
        slow_med.push(med);
    }
    let fast_slope = loglog_slope(&fast_ns, &fast_min);
    let slow_slope = loglog_slope(&slow_ns, &slow_min);
    let detail = format!(
        "worst path diff {worst:.2e}; n=512 single-threaded {t512:.3}s; slope O(n³) path {fast_slope:.2} \
         (median-based {:.2}), O(n⁴) path {slow_slope:.2} (median-based {:.2})",
        loglog_slope(&fast_ns, &fast_med),
        loglog_slope(&slow_ns, &slow_med)
    );
    check(
        worst <= 1e-9 && t512 < 5.0 && (fast_slope - 3.0).abs() <= 0.4 && (slow_slope - 4.0).abs() <= 0.5,
        detail,
    )
}

// 3. Standardized objectives have unit variance.
fn unit_variance() -> Outcome {
    let mut r = rng(0xA3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(2..=40);
        let m = r.random_range(2..=4);
        let set = MultiObjectiveSet::new((0..m).map(|_| random_instance(&mut r, n)).collect()).unwrap();
        let (scaled, _) = standardize(&set).unwrap();
        for o in scaled.objectives() {
            worst = worst.max((variance_fast(o) - 1.0).abs());
        }
    }
    check(worst <= 1e-9, format!("50 sets, worst |var - 1| = {worst:.2e}"))
}

// 4. Roof-dual range brackets the exact extremes; exact on submodular instances.
fn roof_dual_sandwich() -> Outcome {
    let mut r = rng(0xA4);
    let tol = |q: &QuboInstance| 1e-9 * q.matrix().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    let mut violations = 0;
    for _ in 0..200 {
        let n = r.random_range(1..=14);
        let q = random_instance(&mut r, n);
        let (lo, hi) = min_max(&q.rows());
        let range = roof_dual_range(&q);
        if range.lower > lo + tol(&q) || range.upper < hi - tol(&q) {
            violations += 1;
        }
    }
    let mut inexact = 0;
    let mut worst_gap: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(1..=12);
        let q = random_submodular(&mut r, n);
        let (lo, _) = min_max(&q.rows());
        let gap = (mqubo::roof_dual_lower(&q) - lo).abs();
        worst_gap = worst_gap.max(gap);
        if gap > tol(&q) {
            inexact += 1;
        }
    }
    check(
        violations == 0 && inexact == 0,
        format!("sandwich violations {violations}/200; submodular inexact {inexact}/200 (worst gap {worst_gap:.2e})"),
    )
}

fn monte_carlo_hv(r: &mut StdRng, points: &[Vec<f64>], reference: &[f64], samples: usize) -> (f64, f64) {
    let mut hits = 0usize;
    let mut s = [0.0; 4];
    for _ in 0..samples {
        for (k, v) in s.iter_mut().enumerate() {
            *v = r.random_range(0.0..reference[k]);
        }
        if points.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let box_vol: f64 = reference.iter().product();
    let p = hits as f64 / samples as f64;
    (p * box_vol, box_vol * (p * (1.0 - p) / samples as f64).sqrt())
}

// 5. Exact hypervolume on crafted fronts and against Monte-Carlo in four dimensions.
fn hypervolume_correctness() -> Outcome {
    let hv = |pts: Vec<Vec<f64>>, r: Vec<f64>| hypervolume_exact(&FrontSet::from_points(pts), &ObjectiveVector(r)).unwrap().volume;
    let crafted: Vec<(Vec<Vec<f64>>, Vec<f64>, f64)> = vec![
        (vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![3.0, 3.0], 3.0),
        (vec![vec![0.0, 0.0]], vec![2.0, 5.0], 10.0),
        (vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]], vec![4.0, 4.0], 6.0),
        (vec![vec![1.0, 1.0], vec![2.0, 2.0]], vec![3.0, 3.0], 4.0),
        (vec![vec![0.0, 2.0], vec![2.0, 0.0]], vec![3.0, 3.0], 5.0),
        (vec![vec![3.0, 1.0]], vec![3.0, 3.0], 0.0),
        (vec![vec![0.0, 0.0, 0.0]], vec![1.0, 2.0, 3.0], 6.0),
        (vec![vec![1.0, 2.0, 1.0], vec![2.0, 1.0, 1.0]], vec![3.0, 3.0, 3.0], 6.0),
        (vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]], vec![2.0, 2.0, 2.0], 4.0),
        (vec![vec![1.0, 1.0, 1.0], vec![0.0, 0.0, 2.0]], vec![2.0, 2.0, 3.0], 5.0),
    ];
    let mut crafted_bad = Vec::new();
    for (k, (pts, r, want)) in crafted.into_iter().enumerate() {
        let got = hv(pts, r);
        if (got - want).abs() > 1e-12 {
            crafted_bad.push(format!("#{k}: {got} != {want}"));
        }
    }

    let mut r = rng(0xA5);
    let mut outside = 0;
    let mut worst_z: f64 = 0.0;
    for _ in 0..20 {
        let k = r.random_range(1..=12);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| (0..4).map(|_| r.random_range(0.0..1.0)).collect()).collect();
        let reference = vec![1.0; 4];
        let exact = hv(pts.clone(), reference.clone());
        let (est, se) = monte_carlo_hv(&mut r, &pts, &reference, 1_000_000);
        let z = if se > 0.0 { (exact - est).abs() / se } else { 0.0 };
        worst_z = worst_z.max(z);
        if (exact - est).abs() > 3.0 * se {
            outside += 1;
        }
    }
    check(
        crafted_bad.is_empty() && outside == 0,
        format!(
            "crafted mismatches {:?}; Monte-Carlo: {outside}/20 fronts beyond 3 SE (largest |z| = {worst_z:.2})",
            crafted_bad
        ),
    )
}

fn argmin_set(a: &[Vec<f64>]) -> Vec<u64> {
    let vals = all_values(a);
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * a.iter().flatten().map(|v| v.abs()).sum::<f64>().max(1.0);
    (0..vals.len() as u64).filter(|&k| vals[k as usize] <= lo + tol).collect()
}

// 6. Standardized equal-weight argmin equals the 1/σ-weighted argmin.
fn argmin_invariance() -> Outcome {
    let mut r = rng(0xA6);
    let mut agree = 0;
    for _ in 0..50 {
        let n = r.random_range(2..=12);
        let set = MultiObjectiveSet::new(vec![random_instance(&mut r, n), random_instance(&mut r, n)]).unwrap();
        let (scaled, _) = standardize(&set).unwrap();
        let std_sum = mqubo::qubo::scalarize_equal(&scaled).unwrap();
        // 1/σ weights from enumeration, not from the code under test
        let w: Vec<f64> = set.objectives().iter().map(|o| 1.0 / enumerated_moments(&o.rows()).1.sqrt()).collect();
        let weighted: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| w[0] * set.objectives()[0].get(i, j) + w[1] * set.objectives()[1].get(i, j)).collect())
            .collect();
        if argmin_set(&std_sum.rows()) == argmin_set(&weighted) {
            agree += 1;
        }
    }
    check(agree == 50, format!("{agree}/50 trials with identical minimizer sets"))
}

// 7. At desk scale, standardization is at least as good as no scaling in most combinations.
fn table_one_direction() -> Outcome {
    let mut plan = ExperimentPlan::new(GeneratorConfig { n: 60, attach_m: 2, seed: None, families: Family::ALL.to_vec() });
    plan.solver.runs = 20;
    plan.repetitions = 5;
    let report = pipeline::run_experiment(&plan, 12345).unwrap();
    let mut wins = 0;
    let mut ok = 0;
    for combo in &report.combinations {
        let s = combo.cell(ScalingMethod::Standardize).and_then(|c| c.hv_mean);
        let o = combo.cell(ScalingMethod::Original).and_then(|c| c.hv_mean);
        if let (Some(s), Some(o)) = (s, o) {
            ok += 1;
            if s >= o {
                wins += 1;
            }
        }
    }
    check(
        wins >= 8 && ok == 11,
        format!("standardize >= original in {wins}/11 combinations ({ok} comparable), master seed 12345"),
    )
}

// 8. Roof-dual width over σ at n = 1000.
fn table_two_ratios() -> Outcome {
    let cfg = GeneratorConfig { n: 1000, attach_m: 2, seed: None, families: Family::ALL.to_vec() };
    let (_, instances) = problems::generate_all(&cfg, 2023).unwrap();
    let rows = pipeline::scaling_rows(&instances);
    let mut parts = Vec::new();
    let mut all_in = true;
    for row in &rows {
        let ratio = row.ratio();
        let inside = (5.0..=500.0).contains(&ratio);
        all_in &= inside;
        parts.push(format!(
            "{} width {:.4e} σ {:.4e} ratio {:.1}{}",
            row.label,
            row.roof_dual_range,
            row.std_dev,
            ratio,
            if inside { "" } else { " (outside [5, 500])" }
        ));
    }
    check(all_in, parts.join("; "))
}

// 9. Two CLI runs of the same plan and seed give byte-identical report.csv.
fn cli_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"generator":{"n":30,"attach_m":2},"solver":{"runs":10},"repetitions":3,"hv":{"ref_points":2000}}"#,
    )
    .unwrap();
    let mut csvs = Vec::new();
    for (k, jobs) in ["1", "4"].into_iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_mqubo"))
            .args(["--jobs", jobs, "experiment"])
            .arg(&plan)
            .args(["--seed", "77", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return Err(format!("experiment exited with {:?}", status.status.code()));
        }
        csvs.push(std::fs::read(out.join("report.csv")).unwrap());
    }
    let rows = String::from_utf8_lossy(&csvs[0]).lines().count() - 1;
    check(
        csvs[0] == csvs[1] && rows == 11,
        format!("{} bytes each, identical: {}, {rows} data rows", csvs[0].len(), csvs[0] == csvs[1]),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("moment oracle equivalence", moment_oracle),
        ("variance path equivalence and complexity", path_equivalence_and_complexity),
        ("unit-variance postcondition", unit_variance),
        ("roof-dual sandwich", roof_dual_sandwich),
        ("hypervolume correctness", hypervolume_correctness),
        ("argmin invariance of standardization", argmin_invariance),
        ("desk-scale comparison direction", table_one_direction),
        ("range-to-deviation ratios at n = 1000", table_two_ratios),
        ("CLI determinism", cli_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name} [{secs:.1}s]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name} [{secs:.1}s]: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
