//! Parametric topology families and hard-coded reference networks.
//!
//! Every generator returns the network together with the node ordering used
//! during construction, which witnesses its propagating-dealer property.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Network, DEALER};

#[derive(Debug, Clone)]
pub struct Generated {
    pub network: Network,
    /// Construction order of the participants.
    pub order: Vec<usize>,
}

impl Generated {
    fn sequential(network: Network) -> Self {
        let order = network.participants().collect();
        Self { network, order }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

/// Dealer wired to every participant.
pub fn gen_star(n: usize) -> Network {
    let edges: Vec<_> = (1..=n).map(|i| (DEALER, i)).collect();
    Network::from_edges(n, false, &edges).expect("star edges are valid")
}

/// Consecutive layers fully connected to each other; the dealer feeds the
/// first layer. Directed graphs point away from the dealer.
pub fn gen_layered(layers: &[usize], m: usize, directed: bool) -> Result<Generated> {
    if layers.is_empty() {
        return Err(invalid("at least one layer required"));
    }
    if let Some(&small) = layers.iter().find(|&&s| s < m) {
        return Err(invalid(format!("layer of size {small} is smaller than m = {m}")));
    }
    let n = layers.iter().sum();
    let mut net = Network::new(n, directed);
    let mut prev: Vec<usize> = vec![DEALER];
    let mut next_id = 1;
    for &size in layers {
        let layer: Vec<usize> = (next_id..next_id + size).collect();
        next_id += size;
        for &u in &prev {
            for &v in &layer {
                net.add_edge(u, v)?;
            }
        }
        prev = layer;
    }
    Ok(Generated::sequential(net))
}

/// Complete backbone on `b` nodes with the dealer linked to the first
/// `dealer_links` of them.
pub fn complete_backbone(b: usize, dealer_links: usize) -> Result<Network> {
    if dealer_links > b {
        return Err(invalid("more dealer links than backbone nodes"));
    }
    let mut net = Network::new(b, false);
    for v in 1..=dealer_links {
        net.add_edge(DEALER, v)?;
    }
    for u in 1..=b {
        for v in u + 1..=b {
            net.add_edge(u, v)?;
        }
    }
    Ok(net)
}

/// Extends an undirected backbone with `outer` nodes, each wired to `m`
/// backbone nodes chosen round-robin.
pub fn gen_backbone(backbone: &Network, outer: usize, m: usize) -> Result<Generated> {
    let b = backbone.n();
    if m == 0 || m > b {
        return Err(invalid(format!("cannot wire {m} links into a backbone of {b}")));
    }
    if backbone.is_directed() {
        return Err(invalid("backbone must be undirected"));
    }
    let mut net = Network::new(b + outer, false);
    for (u, v) in backbone.edges() {
        net.add_edge(u, v)?;
    }
    for j in 0..outer {
        for i in 0..m {
            net.add_edge(b + 1 + j, (j * m + i) % b + 1)?;
        }
    }
    let mut order = crate::graph::check_propagating_dealer(backbone, m).order;
    order.extend(b + 1..=b + outer);
    Ok(Generated {
        network: net,
        order,
    })
}

/// Nodes on a line. `positions[0]` is the dealer; participants are numbered
/// by ascending distance from it and joined when within `radius`.
pub fn gen_geometric_1d(positions: &[f64], radius: f64) -> Result<Generated> {
    if positions.is_empty() {
        return Err(invalid("dealer position required"));
    }
    let origin = positions[0];
    let mut rest: Vec<f64> = positions[1..].to_vec();
    rest.sort_by(|a, b| (a - origin).abs().total_cmp(&(b - origin).abs()));
    let mut all = vec![origin];
    all.extend(rest);
    let n = all.len() - 1;
    let mut net = Network::new(n, false);
    for u in 0..=n {
        for v in u + 1..=n {
            if (all[u] - all[v]).abs() <= radius {
                net.add_edge(u, v)?;
            }
        }
    }
    Ok(Generated::sequential(net))
}

fn predecessor_graph(
    n: usize,
    d: usize,
    window: Option<usize>,
    seed: u64,
    directed: bool,
) -> Result<Generated> {
    if d == 0 || d > n {
        return Err(invalid(format!("need 1 <= d <= n, got d = {d}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::new(n, directed);
    for i in 1..=d {
        net.add_edge(DEALER, i)?;
    }
    for i in d + 1..=n {
        let lo = match window {
            Some(w) => i.saturating_sub(w).max(1),
            None => 1,
        };
        let span = i - lo;
        let mut picks: Vec<usize> = sample(&mut rng, span, d).into_iter().map(|x| lo + x).collect();
        picks.sort_unstable();
        for j in picks {
            net.add_edge(j, i)?;
        }
    }
    Ok(Generated::sequential(net))
}

/// Dealer feeds `1..=d`; every later node draws `d` in-edges from a random
/// subset of its predecessors.
pub fn gen_random_propagating(n: usize, d: usize, seed: u64, directed: bool) -> Result<Generated> {
    predecessor_graph(n, d, None, seed, directed)
}

/// Like [`gen_random_propagating`] but predecessors come from the trailing
/// window `max(i - (d + a), 1) ..= i - 1`, which forces long dealer paths.
/// Always directed.
pub fn gen_window(n: usize, d: usize, a: usize, seed: u64) -> Result<Generated> {
    predecessor_graph(n, d, Some(d + a), seed, true)
}

/// Undirected graph where the dealer feeds `1..=b` and each other node is
/// wired to exactly `d` of those, so every non-neighbour has degree `d`.
pub fn gen_regular_nonneighbor(n: usize, b: usize, d: usize, seed: u64) -> Result<Generated> {
    if d == 0 || d > b || b > n {
        return Err(invalid(format!("need 1 <= d <= b <= n, got d={d} b={b} n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::new(n, false);
    for i in 1..=b {
        net.add_edge(DEALER, i)?;
    }
    for i in b + 1..=n {
        let mut picks: Vec<usize> = sample(&mut rng, b, d).into_iter().map(|x| x + 1).collect();
        picks.sort_unstable();
        for j in picks {
            net.add_edge(j, i)?;
        }
    }
    Ok(Generated::sequential(net))
}

/// Small reference networks with known costs.
pub mod fixtures {
    use super::*;

    pub const NAMES: [&str; 2] = ["toy", "fig9"];

    /// Six participants, two of them linked to the dealer.
    pub fn toy() -> Network {
        let edges = [
            (0, 1),
            (0, 2),
            (1, 3),
            (2, 3),
            (2, 4),
            (3, 4),
            (3, 5),
            (4, 5),
            (4, 6),
            (5, 6),
        ];
        Network::from_edges(6, false, &edges).expect("toy fixture")
    }

    /// Ten participants; the 2-threshold flood stalls at nodes 8, 9, 10.
    pub fn fig9() -> Network {
        let edges = [
            (0, 1),
            (0, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 5),
            (3, 6),
            (4, 5),
            (4, 6),
            (5, 7),
            (5, 8),
            (6, 7),
            (7, 9),
            (7, 10),
            (8, 9),
            (8, 10),
        ];
        Network::from_edges(10, false, &edges).expect("fig9 fixture")
    }

    pub fn by_name(name: &str) -> Option<Network> {
        match name {
            "toy" => Some(toy()),
            "fig9" => Some(fig9()),
            _ => None,
        }
    }
}
