//! Dinic's max-flow over real capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: f64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    // arcs[2k] is forward, arcs[2k + 1] its residual twin
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) {
        debug_assert!(cap >= 0.0);
        if cap <= 0.0 || from == to {
            return;
        }
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0.0 });
    }

    /// Maximum `source → sink` flow. Residual capacities at or below
    /// `eps · max capacity` count as saturated.
    pub fn max_flow(&mut self, source: usize, sink: usize, eps: f64) -> f64 {
        let max_cap = self.arcs.iter().fold(0.0_f64, |m, a| m.max(a.cap));
        if max_cap == 0.0 || source == sink {
            return 0.0;
        }
        let tol = eps * max_cap;
        let n = self.nodes();
        let mut level = vec![usize::MAX; n];
        let mut next = vec![0usize; n];
        let mut total = 0.0;
        while self.bfs(source, sink, tol, &mut level) {
            next.iter_mut().for_each(|x| *x = 0);
            loop {
                let pushed = self.dfs(source, sink, f64::INFINITY, tol, &level, &mut next);
                if pushed <= tol {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    fn bfs(&self, source: usize, sink: usize, tol: f64, level: &mut [usize]) -> bool {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let a = &self.arcs[e];
                if a.cap > tol && level[a.to] == usize::MAX {
                    level[a.to] = level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        level[sink] != usize::MAX
    }

    // iterative blocking-flow search along level-increasing arcs
    fn dfs(&mut self, source: usize, sink: usize, limit: f64, tol: f64, level: &[usize], next: &mut [usize]) -> f64 {
        let mut path: Vec<usize> = Vec::new();
        let mut u = source;
        loop {
            if u == sink {
                let mut bottleneck = limit;
                for &e in &path {
                    bottleneck = bottleneck.min(self.arcs[e].cap);
                }
                for &e in &path {
                    self.arcs[e].cap -= bottleneck;
                    self.arcs[e ^ 1].cap += bottleneck;
                }
                return bottleneck;
            }
            let mut advanced = false;
            while next[u] < self.adj[u].len() {
                let e = self.adj[u][next[u]];
                let a = &self.arcs[e];
                if a.cap > tol && level[a.to] == level[u] + 1 {
                    path.push(e);
                    u = a.to;
                    advanced = true;
                    break;
                }
                next[u] += 1;
            }
            if !advanced {
                if u == source {
                    return 0.0;
                }
                // dead end: retreat and skip the arc that led here
                let e = path.pop().expect("non-source node has an incoming path arc");
                u = self.arcs[e ^ 1].to;
                next[u] += 1;
            }
        }
    }
}
