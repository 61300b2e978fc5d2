use std::collections::BTreeSet;

use rand::seq::IndexedRandom;

use crate::error::{Error, Result};
use crate::rng;

/// Simple undirected graph; edges stored as `(i, j)` with `i < j`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange { i: a, j: b, n });
            }
            if a == b {
                return Err(Error::InvalidConfig(format!("self-loop on node {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self { n, edges: set.into_iter().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Preferential attachment by the repeated-nodes urn.
///
/// Nodes `0..attach_m` start isolated; node `attach_m` links to all of them.
/// Every later node links to `attach_m` distinct targets drawn uniformly from
/// the urn, in which each node appears once per incident edge.
pub fn barabasi_albert(n: usize, attach_m: usize, seed: u64) -> Result<Graph> {
    if attach_m < 1 || attach_m >= n {
        return Err(Error::InvalidConfig(format!("barabasi_albert needs 1 <= attach_m < n (attach_m = {attach_m}, n = {n})")));
    }
    let mut rng = rng::from_seed(seed);
    let mut edges = Vec::with_capacity((n - attach_m) * attach_m);
    let mut urn: Vec<usize> = Vec::with_capacity(2 * (n - attach_m) * attach_m);
    let mut targets: Vec<usize> = (0..attach_m).collect();
    for source in attach_m..n {
        for &t in &targets {
            edges.push((t, source));
        }
        urn.extend_from_slice(&targets);
        urn.extend(std::iter::repeat_n(source, attach_m));
        let mut chosen = BTreeSet::new();
        while chosen.len() < attach_m {
            chosen.insert(*urn.choose(&mut rng).expect("urn is nonempty after the first step"));
        }
        targets = chosen.into_iter().collect();
    }
    Graph::new(n, edges)
}
