//! The four QUBO families built on a Barabási–Albert graph.
//!
//! Max-cut families use `f(x) = Σ_{i<j} 2wᵢⱼ·xᵢxⱼ − Σᵢ xᵢ·Σ_{j≠i} wᵢⱼ`, which is
//! minus the cut weight. Random weights come from one RNG substream per pair,
//! indexed row-major over `i < j` for complete-graph families and by position
//! in the sorted edge list for MC01.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{barabasi_albert, Graph};
use crate::qubo::{MultiObjectiveSet, QuboInstance};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Max-cut on G, Beta(0.2, 0.8) weights.
    #[serde(rename = "MC01")]
    Mc01,
    /// Max-cut on the complete graph, Bernoulli(0.5) weights, G-edges 1.
    #[serde(rename = "MCB")]
    Mcb,
    /// Max-cut on the complete graph, U{1..5} weights, G-edges 5.
    #[serde(rename = "MCZ")]
    Mcz,
    /// Subset sum over node degrees with target a quarter of the total.
    #[serde(rename = "SUBSUM")]
    SubSum,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Mc01, Family::Mcb, Family::Mcz, Family::SubSum];

    pub fn code(self) -> &'static str {
        match self {
            Family::Mc01 => "MC01",
            Family::Mcb => "MCB",
            Family::Mcz => "MCZ",
            Family::SubSum => "SUBSUM",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Family::Mc01 => "MC[0,1]",
            Family::Mcb => "MC{0,1}",
            Family::Mcz => "MC[1,5]",
            Family::SubSum => "SubSum",
        }
    }

    pub fn id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.code().eq_ignore_ascii_case(s) || f.display_name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown problem family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    #[serde(default = "default_attach_m")]
    pub attach_m: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_families")]
    pub families: Vec<Family>,
}

fn default_attach_m() -> usize {
    2
}

fn default_families() -> Vec<Family> {
    Family::ALL.to_vec()
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.attach_m < 1 || self.attach_m >= self.n {
            return Err(Error::InvalidConfig(format!(
                "generator needs 1 <= attach_m < n (attach_m = {}, n = {})",
                self.attach_m, self.n
            )));
        }
        if self.families.is_empty() {
            return Err(Error::InvalidConfig("no problem families selected".into()));
        }
        Ok(())
    }
}

/// Graph seed and per-family weight seeds, all derived from one seed.
pub fn graph_seed(seed: u64) -> u64 {
    rng::derive(seed, 0)
}

pub fn family_seed(seed: u64, family: Family) -> u64 {
    rng::derive_path(seed, &[1, family.id()])
}

/// Max-cut QUBO from weighted pairs.
pub fn maxcut_qubo(n: usize, weights: &[(usize, usize, f64)], label: &str) -> Result<QuboInstance> {
    let mut q = QuboInstance::zeros(n, label)?;
    for &(i, j, w) in weights {
        if w == 0.0 {
            continue;
        }
        q.add_term(i, j, 2.0 * w);
        q.add_term(i, i, -w);
        q.add_term(j, j, -w);
    }
    Ok(q)
}

/// Beta(0.2, 0.8) weights on the edges of `g`.
pub fn mc01_weights(g: &Graph, seed: u64) -> Vec<(usize, usize, f64)> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let mut r = rng::stream(seed, k as u64);
            (i, j, rng::beta_johnk(&mut r, 0.2, 0.8))
        })
        .collect()
}

fn complete_weights(g: &Graph, seed: u64, on_edge: f64, draw: impl Fn(&mut rng::Rng) -> f64) -> Vec<(usize, usize, f64)> {
    let n = g.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    let mut k = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let w = if g.has_edge(i, j) { on_edge } else { draw(&mut rng::stream(seed, k)) };
            out.push((i, j, w));
            k += 1;
        }
    }
    out
}

pub fn mcb_weights(g: &Graph, seed: u64) -> Vec<(usize, usize, f64)> {
    complete_weights(g, seed, 1.0, |r| if r.random::<bool>() { 1.0 } else { 0.0 })
}

pub fn mcz_weights(g: &Graph, seed: u64) -> Vec<(usize, usize, f64)> {
    complete_weights(g, seed, 5.0, |r| r.random_range(1..=5) as f64)
}

pub fn gen_mc01(g: &Graph, seed: u64) -> Result<QuboInstance> {
    maxcut_qubo(g.n(), &mc01_weights(g, seed), Family::Mc01.code())
}

pub fn gen_mcb(g: &Graph, seed: u64) -> Result<QuboInstance> {
    maxcut_qubo(g.n(), &mcb_weights(g, seed), Family::Mcb.code())
}

pub fn gen_mcz(g: &Graph, seed: u64) -> Result<QuboInstance> {
    maxcut_qubo(g.n(), &mcz_weights(g, seed), Family::Mcz.code())
}

/// Target sum τ used by [`gen_subsum`].
pub fn subsum_target(g: &Graph) -> f64 {
    g.degrees().iter().sum::<usize>() as f64 / 4.0
}

/// `f(x) = (Σ wᵢxᵢ)² − 2τ Σ wᵢxᵢ` with wᵢ the degree of node i.
pub fn gen_subsum(g: &Graph) -> Result<QuboInstance> {
    let w: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let tau = subsum_target(g);
    let n = g.n();
    let mut raw = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            raw[i * n + j] = w[i] * w[j];
        }
        raw[i * n + i] -= 2.0 * tau * w[i];
    }
    QuboInstance::from_dense(n, raw, Family::SubSum.code())
}

pub fn generate(family: Family, g: &Graph, seed: u64) -> Result<QuboInstance> {
    let s = family_seed(seed, family);
    match family {
        Family::Mc01 => gen_mc01(g, s),
        Family::Mcb => gen_mcb(g, s),
        Family::Mcz => gen_mcz(g, s),
        Family::SubSum => gen_subsum(g),
    }
}

/// Builds the graph and every configured family from `seed`.
pub fn generate_all(cfg: &GeneratorConfig, seed: u64) -> Result<(Graph, Vec<QuboInstance>)> {
    cfg.validate()?;
    let g = barabasi_albert(cfg.n, cfg.attach_m, graph_seed(seed))?;
    let instances = cfg.families.iter().map(|&f| generate(f, &g, seed)).collect::<Result<Vec<_>>>()?;
    Ok((g, instances))
}

pub fn generate_set(cfg: &GeneratorConfig, seed: u64) -> Result<MultiObjectiveSet> {
    MultiObjectiveSet::new(generate_all(cfg, seed)?.1)
}
