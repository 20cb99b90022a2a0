//! Closed-form communication and randomness bounds, in exact rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::encoding::SharingParams;
use crate::error::{Error, Result};
use crate::graph::{disjoint_path_costs, max_disjoint_paths, Network, DEALER};
use crate::units::Units;

fn frac(num: usize, den: usize) -> Units {
    Units::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Least download of any scheme at `node`: 1 for dealer neighbours,
/// `deg / (deg - k + 1)` when the in-degree reaches `k`, infinite otherwise.
pub fn node_download_lower(net: &Network, params: &SharingParams, node: usize) -> Units {
    if net.is_dealer_neighbor(node) {
        return Units::int(1);
    }
    let deg = net.in_degree(node);
    if deg >= params.k {
        frac(deg, deg - params.k + 1)
    } else {
        Units::Infinite
    }
}

/// The per-node bounds summed over all participants, together with the
/// weaker bound `n`.
pub fn graph_communication_lower(net: &Network, params: &SharingParams) -> (Units, Units) {
    let sum = net
        .participants()
        .map(|i| node_download_lower(net, params, i))
        .sum();
    (sum, Units::int(net.n() as i64))
}

/// `(n - k + 1) d / (d - k + 1)`: the bound for directed graphs whose dealer
/// has `d` out-edges and whose other nodes have `d` in-edges.
pub fn directed_regular_lower(params: &SharingParams) -> Units {
    let (n, k, d) = (params.n, params.k, params.d);
    frac((n + 1 - k) * d, d - k + 1)
}

/// Baseline cost of one non-neighbour: `min_w total_w / (w - k + 1)`.
pub fn sota_node_cost(net: &Network, k: usize, node: usize) -> Units {
    if net.is_dealer_neighbor(node) {
        return Units::int(1);
    }
    let costs = disjoint_path_costs(net, DEALER, node, &[]);
    (k..=costs.len())
        .map(|w| frac(costs[w - 1], w - k + 1))
        .fold(Units::Infinite, Units::min)
}

/// Exact baseline communication on `net`.
pub fn sota_closed_form(net: &Network, params: &SharingParams) -> Units {
    net.participants()
        .map(|i| sota_node_cost(net, params.k, i))
        .sum()
}

/// `n (n + 1) / (4 d)`, the baseline floor on window-family graphs.
pub fn sota_quadratic_lower(n: usize, d: usize) -> Units {
    frac(n * (n + 1), 4 * d)
}

/// `n (log n / log b - 2) / b^2`, floored at zero. Logarithms make this the
/// one bound evaluated in floating point.
pub fn sota_superlinear_lower(n: usize, b_max: usize) -> Result<f64> {
    if b_max < 2 || n == 0 {
        return Err(Error::InvalidParams(format!(
            "superlinear bound needs b >= 2 and n >= 1, got b={b_max} n={n}"
        )));
    }
    let (n, b) = (n as f64, b_max as f64);
    Ok((n * (n.ln() / b.ln() - 2.0) / (b * b)).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomnessBounds {
    /// `k - 1` for any scheme.
    pub any_lower: Units,
    /// Draws made while building `M`.
    pub sneak_draws: usize,
    /// Draws divided by the secret size.
    pub sneak_draw_units: Units,
    /// `(k - 1)(2d - k) / (2 (d - k + 1))`.
    pub sneak_closed_form: Units,
    /// Set when the two values above disagree.
    pub sneak_closed_form_mismatch: bool,
    /// `k - 1 + sum (k - 1) / (w_max(i) - k + 1)` over non-neighbours.
    pub sota_lower: Units,
    /// `(n - |N(D)|)(k - 1) / (|N(D)| - k + 1)`.
    pub sota_degree_lower: Units,
}

pub fn randomness_bounds(net: &Network, params: &SharingParams) -> RandomnessBounds {
    let (k, d) = (params.k, params.d);
    let draws = params.randomness_count();
    let draw_units = frac(draws, params.secret_len());
    let closed = frac((k - 1) * (2 * d - k), 2 * (d - k + 1));
    let mut sota = Units::int(k as i64 - 1);
    for i in net.participants() {
        if net.is_dealer_neighbor(i) {
            continue;
        }
        let w = max_disjoint_paths(net, i).count;
        sota = sota + if w >= k { frac(k - 1, w - k + 1) } else { Units::Infinite };
    }
    let nd = net.dealer_neighbors().len();
    let outside = net.n() - nd;
    let degree = if outside == 0 {
        Units::zero()
    } else if nd + 1 > k {
        frac(outside * (k - 1), nd + 1 - k)
    } else {
        Units::Infinite
    };
    RandomnessBounds {
        any_lower: Units::int(k as i64 - 1),
        sneak_draws: draws,
        sneak_closed_form_mismatch: draw_units != closed,
        sneak_draw_units: draw_units,
        sneak_closed_form: closed,
        sota_lower: sota,
        sota_degree_lower: degree,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub per_node_lower: BTreeMap<usize, Units>,
    pub graph_lower_sum: Units,
    pub graph_lower_n: Units,
    pub directed_regular_lower: Units,
    /// `n d / (d - k + 1)`, what the distributed protocol spends.
    pub sneak_closed_form: Units,
    pub sota_closed_form: Units,
    pub sota_quadratic_lower: Units,
    /// Largest out-degree in the graph.
    pub b_max: usize,
    pub sota_superlinear_lower: Option<f64>,
    pub randomness: RandomnessBounds,
}

pub fn bounds_report(net: &Network, params: &SharingParams) -> BoundsReport {
    let (sum, n_bound) = graph_communication_lower(net, params);
    let b_max = net.max_out_degree();
    BoundsReport {
        per_node_lower: net
            .participants()
            .map(|i| (i, node_download_lower(net, params, i)))
            .collect(),
        graph_lower_sum: sum,
        graph_lower_n: n_bound,
        directed_regular_lower: directed_regular_lower(params),
        sneak_closed_form: frac(net.n() * params.d, params.d - params.k + 1),
        sota_closed_form: sota_closed_form(net, params),
        sota_quadratic_lower: sota_quadratic_lower(net.n(), params.d),
        b_max,
        sota_superlinear_lower: sota_superlinear_lower(net.n(), b_max).ok(),
        randomness: randomness_bounds(net, params),
    }
}
