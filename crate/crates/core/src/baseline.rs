//! The path-based baseline: the dealer computes every share itself and ships
//! each one to its owner over `w` vertex-disjoint paths, split so that any
//! `k - 1` paths learn nothing.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::encoding::{Share, SecretVector, SharingParams};
use crate::error::{Error, Result};
use crate::field::{eval_poly, solve_vandermonde, FieldElement, FieldSpec};
use crate::graph::{disjoint_path_costs, shortest_disjoint_paths, DisjointPathSet, Network, DEALER};
use crate::random::RandomSource;
use crate::report::{
    count_units, units_of, zero_units, MessageKind, Recorder, Run, RunReport,
};
use crate::units::Units;

#[derive(Debug, Clone, Serialize)]
pub struct SecureRelayPlan {
    pub target: usize,
    pub chosen_w: usize,
    pub paths: DisjointPathSet,
    /// Size of each path's chunk relative to the payload.
    pub chunk_size_units: Units,
    /// `w / (w - k + 1)` times the average path length.
    pub cost_units: Units,
}

/// Picks `w` in `k..=w_max` minimising `total_length(w) / (w - k + 1)`.
pub fn plan_secure_relay(
    net: &Network,
    params: &SharingParams,
    target: usize,
) -> Result<SecureRelayPlan> {
    let k = params.k;
    if net.is_dealer_neighbor(target) {
        return Err(Error::DirectNeighbour(target));
    }
    let costs = disjoint_path_costs(net, DEALER, target, &[]);
    let mut best: Option<(BigRational, usize)> = None;
    for w in k..=costs.len() {
        let c = BigRational::new(BigInt::from(costs[w - 1]), BigInt::from(w - k + 1));
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, w));
        }
    }
    let Some((cost, w)) = best else {
        return Err(Error::Infeasible {
            node: target,
            available: costs.len(),
            required: k,
        });
    };
    Ok(SecureRelayPlan {
        target,
        chosen_w: w,
        paths: shortest_disjoint_paths(net, target, w).expect("flow found w paths"),
        chunk_size_units: Units::ratio(1, (w - k + 1) as i64),
        cost_units: Units::Finite(cost),
    })
}

/// Ramp-splits `payload` over the paths, forwards each chunk hop by hop and
/// decodes at the far end. Blocks of `b = w - k + 1` elements become the low
/// coefficients of a polynomial whose `k - 1` high coefficients are random;
/// path `j` carries its evaluations at `j + 1`. Returns the decoded payload,
/// the number of draws and the tick at which the last chunk arrived.
pub(crate) fn secure_transmit(
    rec: &mut Recorder,
    payload: &[FieldElement],
    paths: &DisjointPathSet,
    k: usize,
    spec: FieldSpec,
    rng: &mut impl RandomSource,
    tick: u64,
) -> (Vec<FieldElement>, usize, u64) {
    let w = paths.w();
    let b = w + 1 - k;
    let len = payload.len();
    let blocks = len.div_ceil(b);
    let mut polys = Vec::with_capacity(blocks);
    let mut draws = 0;
    for blk in 0..blocks {
        let mut coeffs: Vec<FieldElement> = (0..b)
            .map(|i| payload.get(blk * b + i).copied().unwrap_or_else(|| spec.zero()))
            .collect();
        for _ in 1..k {
            coeffs.push(rng.draw(spec));
            draws += 1;
        }
        polys.push(coeffs);
    }
    let mut last = tick;
    let mut received: Vec<Vec<FieldElement>> = Vec::with_capacity(w);
    for (j, path) in paths.paths.iter().enumerate() {
        let x = spec.elem(j as u64 + 1);
        let chunk: Vec<FieldElement> = polys.iter().map(|p| eval_poly(p, x)).collect();
        for (h, hop) in path.windows(2).enumerate() {
            let t = tick + h as u64;
            rec.send(
                t,
                hop[0],
                hop[1],
                chunk.clone(),
                MessageKind::FallbackChunk,
                (len as u64, b as u64),
            );
            last = last.max(t);
        }
        received.push(chunk);
    }
    let ids: Vec<u64> = (1..=w as u64).collect();
    let mut out = Vec::with_capacity(blocks * b);
    for blk in 0..blocks {
        let vals: Vec<FieldElement> = received.iter().map(|c| c[blk]).collect();
        let coeffs = solve_vandermonde(&ids, &vals, spec).expect("distinct evaluation points");
        out.extend_from_slice(&coeffs[..b]);
    }
    out.truncate(len);
    (out, draws, last)
}

/// Shamir shares of every secret element: `t_i[e] = s_e + r_e1 i + ...`.
fn shamir_shares(
    secret: &SecretVector,
    n: usize,
    k: usize,
    spec: FieldSpec,
    rng: &mut impl RandomSource,
) -> (Vec<Share>, usize) {
    let polys: Vec<Vec<FieldElement>> = secret
        .entries
        .iter()
        .map(|&s| {
            let mut c = vec![s];
            c.extend((1..k).map(|_| rng.draw(spec)));
            c
        })
        .collect();
    let shares = (1..=n as u64)
        .map(|i| Share {
            node_id: i,
            values: polys.iter().map(|p| eval_poly(p, spec.elem(i))).collect(),
        })
        .collect();
    (shares, secret.entries.len() * (k - 1))
}

/// Recovers a baseline secret from `k` Shamir shares.
pub fn recover_sota_secret(shares: &[Share], spec: FieldSpec) -> Result<SecretVector> {
    let ids: Vec<u64> = shares.iter().map(|s| s.node_id).collect();
    let len = shares.first().map_or(0, |s| s.values.len());
    let mut out = Vec::with_capacity(len);
    for e in 0..len {
        let vals: Vec<FieldElement> = shares.iter().map(|s| s.values[e]).collect();
        out.push(solve_vandermonde(&ids, &vals, spec)?[0]);
    }
    Ok(SecretVector::new(out))
}

/// Runs the baseline. Dealer neighbours receive their share directly; every
/// other node receives it over its planned disjoint paths.
pub fn run_sota(
    net: &Network,
    params: &SharingParams,
    secret: &SecretVector,
    rng: &mut impl RandomSource,
) -> Result<Run> {
    params.validate()?;
    if net.n() != params.n {
        return Err(Error::InvalidParams(format!(
            "network has {} participants, parameters say {}",
            net.n(),
            params.n
        )));
    }
    let spec = params.spec;
    let len = secret.entries.len();
    if len == 0 {
        return Err(Error::InvalidParams("empty secret".into()));
    }
    let mut plans = BTreeMap::new();
    for i in net.participants() {
        if !net.is_dealer_neighbor(i) {
            plans.insert(i, plan_secure_relay(net, params, i)?);
        }
    }
    let (truth, mut draws) = shamir_shares(secret, params.n, params.k, spec, rng);
    let mut rec = Recorder::new(params.n);
    let mut shares = BTreeMap::new();
    for &i in net.dealer_neighbors() {
        let values = truth[i - 1].values.clone();
        rec.send(0, DEALER, i, values.clone(), MessageKind::DealerData, (len as u64, 1));
        shares.insert(i, Share { node_id: i as u64, values });
    }
    for (&i, plan) in &plans {
        let (values, used, _) =
            secure_transmit(&mut rec, &truth[i - 1].values, &plan.paths, params.k, spec, rng, 0);
        draws += used;
        shares.insert(i, Share { node_id: i as u64, values });
    }
    let delivered: BTreeSet<usize> = shares
        .iter()
        .filter(|(&i, s)| s.values == truth[i - 1].values)
        .map(|(&i, _)| i)
        .collect();
    let stalled = net.participants().filter(|i| !delivered.contains(i)).collect();
    let report = RunReport {
        algorithm: "sota".into(),
        params: *params,
        seed: None,
        graph_digest: net.digest(),
        secret_len: len,
        total_field_elements: rec.field_elements,
        total_units: units_of(&rec.ideal, len),
        integral_units: count_units(rec.field_elements, len),
        per_node_download: net
            .participants()
            .map(|i| (i, units_of(&rec.download[i], len)))
            .collect(),
        randomness_draws: draws,
        randomness_units: count_units(draws as u64, len),
        delivered,
        stalled,
        mismatched: BTreeSet::new(),
        adversaries: BTreeSet::new(),
        control_messages: 0,
        fallback_log: Vec::new(),
        fallback_cost_units: zero_units(),
    };
    Ok(Run {
        report,
        transcript: rec.transcript,
        node_data: BTreeMap::new(),
        shares,
    })
}
