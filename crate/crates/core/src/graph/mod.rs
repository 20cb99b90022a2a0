//! Network topology: the dealer plus participants `1..=n`, connectivity
//! conditions and vertex-disjoint path machinery.

mod format;
mod paths;

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use format::{parse_graph, write_graph};
pub use paths::{
    disjoint_path_costs, max_disjoint_paths, shortest_disjoint_paths,
    shortest_disjoint_paths_between, DisjointPathSet, MaxPaths,
};

/// Index of the dealer. Participants are `1..=n`.
pub const DEALER: usize = 0;

/// A directed or undirected network over the dealer and `n` participants.
///
/// Undirected edges are stored as a pair of arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    directed: bool,
    out_adj: Vec<BTreeSet<usize>>,
    in_adj: Vec<BTreeSet<usize>>,
}

impl Network {
    pub fn new(n: usize, directed: bool) -> Self {
        Self {
            n,
            directed,
            out_adj: vec![BTreeSet::new(); n + 1],
            in_adj: vec![BTreeSet::new(); n + 1],
        }
    }

    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        let mut net = Self::new(n, directed);
        for &(u, v) in edges {
            net.add_edge(u, v)?;
        }
        Ok(net)
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<()> {
        if from > self.n || to > self.n {
            return Err(Error::InvalidEdge {
                from,
                to,
                reason: "endpoint out of range",
            });
        }
        if from == to {
            return Err(Error::InvalidEdge {
                from,
                to,
                reason: "self-loop",
            });
        }
        if self.out_adj[from].contains(&to) || (!self.directed && self.out_adj[to].contains(&from))
        {
            return Err(Error::InvalidEdge {
                from,
                to,
                reason: "duplicate edge",
            });
        }
        self.insert_arc(from, to);
        if !self.directed {
            self.insert_arc(to, from);
        }
        Ok(())
    }

    fn insert_arc(&mut self, from: usize, to: usize) {
        self.out_adj[from].insert(to);
        self.in_adj[to].insert(from);
    }

    /// Number of participants.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn participants(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node > self.n {
            Err(Error::UnknownNode(node))
        } else {
            Ok(())
        }
    }

    /// Out-neighbourhood `N(node)`.
    pub fn neighbors(&self, node: usize) -> Result<&BTreeSet<usize>> {
        self.check_node(node)?;
        Ok(&self.out_adj[node])
    }

    pub fn in_neighbors(&self, node: usize) -> Result<&BTreeSet<usize>> {
        self.check_node(node)?;
        Ok(&self.in_adj[node])
    }

    pub(crate) fn out(&self, node: usize) -> &BTreeSet<usize> {
        &self.out_adj[node]
    }

    pub(crate) fn inn(&self, node: usize) -> &BTreeSet<usize> {
        &self.in_adj[node]
    }

    pub fn dealer_neighbors(&self) -> &BTreeSet<usize> {
        &self.out_adj[DEALER]
    }

    pub fn is_dealer_neighbor(&self, node: usize) -> bool {
        self.out_adj[DEALER].contains(&node)
    }

    /// Number of incoming edges (the degree, for undirected graphs).
    pub fn in_degree(&self, node: usize) -> usize {
        self.in_adj[node].len()
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.out_adj.get(from).is_some_and(|s| s.contains(&to))
    }

    /// Edge list: every arc for directed graphs, each pair once (`u < v`)
    /// for undirected ones.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, adj) in self.out_adj.iter().enumerate() {
            for &v in adj {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Hex SHA-256 over the canonical text form.
    pub fn digest(&self) -> String {
        let text = write_graph(self, 0);
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Hop distance from the dealer, `None` when unreachable.
    pub fn bfs_distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n + 1];
        dist[DEALER] = Some(0);
        let mut queue = VecDeque::from([DEALER]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.out_adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Largest out-degree over all nodes including the dealer.
    pub fn max_out_degree(&self) -> usize {
        self.out_adj.iter().map(|s| s.len()).max().unwrap_or(0)
    }
}

/// True iff every participant is a dealer neighbour or has at least `m`
/// vertex-disjoint paths from the dealer.
pub fn check_connected_dealer(net: &Network, m: usize) -> bool {
    net.participants()
        .all(|i| net.is_dealer_neighbor(i) || max_disjoint_paths(net, i).count >= m)
}

/// Result of flooding the network with threshold `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Propagation {
    pub complete: bool,
    /// Order in which participants were reached.
    pub order: Vec<usize>,
    /// Participants never reached.
    pub stalled: BTreeSet<usize>,
}

/// Simulates the flood: dealer neighbours are reached first, then any node
/// with at least `m` reached in-neighbours. FIFO order, ascending ids.
pub fn check_propagating_dealer(net: &Network, m: usize) -> Propagation {
    let mut reached = vec![false; net.n() + 1];
    let mut count = vec![0usize; net.n() + 1];
    let mut order = Vec::with_capacity(net.n());
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &v in net.dealer_neighbors() {
        reached[v] = true;
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in net.out(u) {
            if v == DEALER || reached[v] {
                continue;
            }
            count[v] += 1;
            if count[v] >= m {
                reached[v] = true;
                queue.push_back(v);
            }
        }
    }
    let stalled: BTreeSet<usize> = net.participants().filter(|&v| !reached[v]).collect();
    Propagation {
        complete: stalled.is_empty(),
        order,
        stalled,
    }
}

/// Checks that `order` witnesses the `m`-propagating-dealer condition.
pub fn is_propagating_order(net: &Network, m: usize, order: &[usize]) -> bool {
    if order.len() != net.n() {
        return false;
    }
    let mut seen = vec![false; net.n() + 1];
    for &v in order {
        if v == DEALER || v > net.n() || seen[v] {
            return false;
        }
        let earlier = net.inn(v).iter().filter(|&&u| u != DEALER && seen[u]).count();
        if !net.is_dealer_neighbor(v) && earlier < m {
            return false;
        }
        seen[v] = true;
    }
    true
}
