//! Vertex-disjoint paths via unit-capacity min-cost flow on the node-split
//! graph. Every vertex `v` becomes `v_in -> v_out` with capacity 1; the
//! source and sink keep no internal arc, so only intermediates are limited.

use std::collections::VecDeque;

use num_rational::BigRational;
use serde::Serialize;

use super::{Network, DEALER};

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: i32,
    cost: i64,
}

struct FlowGraph {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(vertices: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); vertices],
        }
    }

    fn add(&mut self, from: usize, to: usize, cost: i64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap: 1, cost });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
        });
    }

    /// One augmentation along a cheapest residual path (SPFA). Returns its
    /// cost, or `None` when the sink is unreachable.
    fn augment(&mut self, s: usize, t: usize) -> Option<i64> {
        let nv = self.adj.len();
        let mut dist = vec![i64::MAX; nv];
        let mut via = vec![usize::MAX; nv];
        let mut queued = vec![false; nv];
        let mut queue = VecDeque::from([s]);
        dist[s] = 0;
        queued[s] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &a in &self.adj[u] {
                let arc = self.arcs[a];
                if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] {
                    dist[arc.to] = dist[u] + arc.cost;
                    via[arc.to] = a;
                    if !queued[arc.to] {
                        queued[arc.to] = true;
                        queue.push_back(arc.to);
                    }
                }
            }
        }
        if dist[t] == i64::MAX {
            return None;
        }
        let mut v = t;
        while v != s {
            let a = via[v];
            self.arcs[a].cap -= 1;
            self.arcs[a ^ 1].cap += 1;
            v = self.arcs[a ^ 1].to;
        }
        Some(dist[t])
    }
}

fn v_in(v: usize) -> usize {
    2 * v
}

fn v_out(v: usize) -> usize {
    2 * v + 1
}

fn build(net: &Network, source: usize, target: usize, avoid: &[usize]) -> FlowGraph {
    let mut g = FlowGraph::new(2 * (net.n() + 1));
    let blocked = |v: usize| v != source && v != target && avoid.contains(&v);
    for v in 0..=net.n() {
        if v != source && v != target && !blocked(v) {
            g.add(v_in(v), v_out(v), 0);
        }
    }
    for u in 0..=net.n() {
        if blocked(u) || u == target {
            continue;
        }
        for &v in net.out(u) {
            if blocked(v) || v == source {
                continue;
            }
            g.add(v_out(u), v_in(v), 1);
        }
    }
    g
}

/// Minimum total hop length of `w` disjoint paths, for `w = 1, 2, ...` up to
/// the maximum. `avoid` lists vertices that may not be used as intermediates.
pub fn disjoint_path_costs(
    net: &Network,
    source: usize,
    target: usize,
    avoid: &[usize],
) -> Vec<usize> {
    let mut g = build(net, source, target, avoid);
    let mut totals = Vec::new();
    let mut acc = 0i64;
    while let Some(c) = g.augment(v_out(source), v_in(target)) {
        acc += c;
        totals.push(acc as usize);
    }
    totals
}

/// `w` vertex-disjoint paths between two nodes minimising total length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjointPathSet {
    pub source: usize,
    pub target: usize,
    /// Each path lists every vertex from `source` to `target` inclusive.
    pub paths: Vec<Vec<usize>>,
    pub total_length: usize,
}

impl DisjointPathSet {
    pub fn w(&self) -> usize {
        self.paths.len()
    }

    /// Average hop count.
    pub fn avg_length(&self) -> BigRational {
        BigRational::new(self.total_length.into(), self.paths.len().into())
    }

    /// Intermediate vertices of path `j`.
    pub fn intermediates(&self, j: usize) -> &[usize] {
        let p = &self.paths[j];
        &p[1..p.len() - 1]
    }
}

/// Min-total-length set of `w` disjoint paths from `source` to `target`, or
/// `None` when fewer than `w` exist.
pub fn shortest_disjoint_paths_between(
    net: &Network,
    source: usize,
    target: usize,
    w: usize,
    avoid: &[usize],
) -> Option<DisjointPathSet> {
    assert!(w >= 1, "w must be positive");
    let mut g = build(net, source, target, avoid);
    let mut total = 0i64;
    for _ in 0..w {
        total += g.augment(v_out(source), v_in(target))?;
    }
    let mut paths = Vec::with_capacity(w);
    // Saturated forward arcs (even index, cap 0) carry flow.
    let mut used = vec![false; g.arcs.len()];
    for _ in 0..w {
        let mut path = vec![source];
        let mut at = v_out(source);
        while at != v_in(target) {
            let a = *g.adj[at]
                .iter()
                .find(|&&a| a % 2 == 0 && g.arcs[a].cap == 0 && !used[a])
                .expect("flow decomposition");
            used[a] = true;
            at = g.arcs[a].to;
            if at.is_multiple_of(2) {
                path.push(at / 2);
            }
        }
        paths.push(path);
    }
    paths.sort();
    Some(DisjointPathSet {
        source,
        target,
        paths,
        total_length: total as usize,
    })
}

/// Min-total-length `w` disjoint paths from the dealer to `target`.
pub fn shortest_disjoint_paths(net: &Network, target: usize, w: usize) -> Option<DisjointPathSet> {
    shortest_disjoint_paths_between(net, DEALER, target, w, &[])
}

/// Maximum number of disjoint dealer paths to a node. `direct` flags a
/// dealer edge, which already counts as one of the paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MaxPaths {
    pub count: usize,
    pub direct: bool,
}

pub fn max_disjoint_paths(net: &Network, target: usize) -> MaxPaths {
    MaxPaths {
        count: disjoint_path_costs(net, DEALER, target, &[]).len(),
        direct: net.is_dealer_neighbor(target),
    }
}
