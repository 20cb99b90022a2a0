//! Deterministic simulation of the distributed dissemination protocol.
//!
//! The dealer hands `psi_i^T M` to its neighbours at tick 0. A node that
//! holds its node data acts one tick later, offering `psi_i^T M psi_j` to
//! every out-neighbour it did not receive from. Offers are handled in FIFO
//! order and a receiver accepts until it holds `d` values (`d + 2t` with
//! adversaries), then decodes and acts on the following tick.
//!
//! When the flood stalls, an optional fallback pushes data to a bottleneck
//! node over vertex-disjoint paths and lets the flood resume.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baseline::{plan_secure_relay, secure_transmit};
use crate::encoding::{
    build_two_threshold_matrix, extract_share, node_data, recover_node_data,
    recover_node_data_with_errors, relay_value, MasterMatrix, NodeData, SecretVector, Share,
    SharingParams,
};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::graph::{
    disjoint_path_costs, shortest_disjoint_paths, shortest_disjoint_paths_between, Network, DEALER,
};
use crate::random::RandomSource;
use crate::units::Units;
use num_rational::BigRational;
use crate::report::{
    count_units, units_of, FallbackAction, MessageKind, Recorder, Run, RunReport, Tally,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    #[default]
    None,
    /// Dealer ships each stalled node's share over disjoint paths.
    Naive,
    /// Dealer ships a bottleneck's missing relay values, then the flood resumes.
    DealerToBottleneck,
    /// A delivered node near the bottleneck ships its relay value locally.
    LocalRelay,
}

impl Fallback {
    fn name(self) -> &'static str {
        match self {
            Fallback::None => "none",
            Fallback::Naive => "naive",
            Fallback::DealerToBottleneck => "dealer_to_bottleneck",
            Fallback::LocalRelay => "local_relay",
        }
    }
}

/// How adversaries distort the values they relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    /// Add a fixed nonzero offset.
    Offset(u64),
    Zero,
    /// Replace by a uniform value from a stream separate from the dealer's.
    Random,
}

#[derive(Debug, Clone)]
pub struct SneakOptions {
    /// Order in which the dealer contacts its neighbours; ascending if unset.
    pub dealer_order: Option<Vec<usize>>,
    pub fallback: Fallback,
    pub adversaries: BTreeSet<usize>,
    pub corruption: Corruption,
    pub corruption_seed: u64,
}

impl Default for SneakOptions {
    fn default() -> Self {
        Self {
            dealer_order: None,
            fallback: Fallback::None,
            adversaries: BTreeSet::new(),
            corruption: Corruption::Offset(1),
            corruption_seed: 0,
        }
    }
}

struct Sim<'a, R: RandomSource> {
    net: &'a Network,
    params: &'a SharingParams,
    opts: &'a SneakOptions,
    m: MasterMatrix,
    rng: R,
    draws: usize,
    rec: Recorder,
    data: Vec<Option<NodeData>>,
    accepted: Vec<Vec<(u64, FieldElement)>>,
    failed: Vec<bool>,
    /// Shares handed over without node data (naive fallback).
    direct_shares: BTreeMap<usize, Share>,
    relay_in: Vec<u64>,
    /// Neighbours that relayed over a direct edge.
    relayed_from: Vec<Vec<usize>>,
    queue: VecDeque<(u64, usize)>,
    now: u64,
    corrupt_rng: ChaCha8Rng,
    log: Vec<FallbackAction>,
    fallback_traffic: Tally,
}

impl<R: RandomSource> Sim<'_, R> {
    fn quota(&self) -> usize {
        self.params.quota()
    }

    fn corrupt(&mut self, v: FieldElement) -> FieldElement {
        let spec = self.params.spec;
        match self.opts.corruption {
            Corruption::Offset(o) => {
                let o = if o % spec.modulus() == 0 { 1 } else { o };
                v + spec.elem(o)
            }
            Corruption::Zero => spec.zero(),
            Corruption::Random => spec.elem(self.corrupt_rng.gen_range(0..spec.modulus())),
        }
    }

    fn wants(&self, v: usize) -> bool {
        v != DEALER
            && self.data[v].is_none()
            && !self.failed[v]
            && !self.direct_shares.contains_key(&v)
            && self.accepted[v].len() < self.quota()
    }

    fn accept(&mut self, tick: u64, v: usize, from: u64, value: FieldElement) {
        self.accepted[v].push((from, value));
        if self.accepted[v].len() == self.quota() {
            let res = if self.params.t_adv == 0 {
                recover_node_data(v as u64, &self.accepted[v], self.params)
            } else {
                recover_node_data_with_errors(v as u64, &self.accepted[v], self.params)
            };
            match res {
                Ok(nd) => {
                    self.data[v] = Some(nd);
                    self.queue.push_back((tick + 1, v));
                }
                Err(_) => self.failed[v] = true,
            }
        }
    }

    fn flood(&mut self) {
        while let Some((tick, u)) = self.queue.pop_front() {
            self.now = self.now.max(tick);
            let du = self.data[u].clone().expect("acting node holds data");
            for &v in self.net.out(u) {
                if v == DEALER || self.relayed_from[u].contains(&v) {
                    continue;
                }
                // Offer and reply.
                self.rec.control += 2;
                if !self.wants(v) {
                    continue;
                }
                let mut value = relay_value(&du, v as u64);
                if self.opts.adversaries.contains(&u) {
                    value = self.corrupt(value);
                }
                self.rec.send(tick, u, v, vec![value], MessageKind::Relay, (1, 1));
                self.relay_in[v] += 1;
                self.relayed_from[v].push(u);
                self.accept(tick, v, u as u64, value);
            }
        }
    }

    fn stalled(&self) -> Vec<usize> {
        self.net
            .participants()
            .filter(|&v| self.data[v].is_none() && !self.direct_shares.contains_key(&v))
            .collect()
    }

    fn record(
        &mut self,
        target: usize,
        supplier: Option<usize>,
        source: usize,
        paths: Vec<Vec<usize>>,
        before: (u64, Tally, usize),
    ) {
        let (fe, ideal_before, draws_before) = before;
        let inc = self.rec.ideal.to_rational() - ideal_before.to_rational();
        let units = Units::Finite(inc / BigRational::from_integer(self.params.secret_len().into()));
        self.log.push(FallbackAction {
            strategy: self.opts.fallback.name().into(),
            target,
            supplier,
            source,
            paths,
            field_elements: self.rec.field_elements - fe,
            units,
            randomness_draws: self.draws - draws_before,
            unservable: false,
        });
    }

    fn unservable(&mut self, target: usize) {
        self.log.push(FallbackAction {
            strategy: self.opts.fallback.name().into(),
            target,
            supplier: None,
            source: DEALER,
            paths: Vec::new(),
            field_elements: 0,
            units: Units::zero(),
            randomness_draws: 0,
            unservable: true,
        });
    }

    fn snapshot(&self) -> (u64, Tally, usize) {
        (self.rec.field_elements, self.rec.ideal.clone(), self.draws)
    }

    fn send_secure(
        &mut self,
        payload: &[FieldElement],
        paths: &crate::graph::DisjointPathSet,
    ) -> Vec<FieldElement> {
        let mut scratch = Recorder::new(self.net.n());
        let (out, used, last) = secure_transmit(
            &mut scratch,
            payload,
            paths,
            self.params.k,
            self.params.spec,
            &mut self.rng,
            self.now + 1,
        );
        self.fallback_traffic.merge(&scratch.ideal);
        self.rec.field_elements += scratch.field_elements;
        self.rec.ideal.merge(&scratch.ideal);
        for (v, t) in scratch.download.iter().enumerate() {
            self.rec.download[v].merge(t);
        }
        self.rec.transcript.extend(scratch.transcript);
        self.draws += used;
        self.now = last;
        out
    }

    fn naive(&mut self) {
        for v in self.stalled() {
            let Ok(plan) = plan_secure_relay(self.net, self.params, v) else {
                self.unservable(v);
                continue;
            };
            let before = self.snapshot();
            let truth = extract_share(
                &node_data(&self.m, v as u64, self.params.spec).expect("valid id"),
                self.params,
            );
            let values = self.send_secure(&truth.values, &plan.paths);
            self.direct_shares.insert(
                v,
                Share {
                    node_id: v as u64,
                    values,
                },
            );
            self.record(v, None, DEALER, plan.paths.paths, before);
        }
    }

    fn delivered_in(&self, v: usize) -> usize {
        self.net
            .inn(v)
            .iter()
            .filter(|&&u| u != DEALER && self.data[u].is_some())
            .count()
    }

    /// Cheapest delivered node that can reach `b` over `k` dealer-free paths.
    fn local_candidate(&self, b: usize, used: &BTreeSet<u64>) -> Option<usize> {
        let k = self.params.k;
        let mut best: Option<(usize, usize)> = None;
        for j in self.net.participants() {
            if j == b || self.data[j].is_none() || used.contains(&(j as u64)) {
                continue;
            }
            let costs = disjoint_path_costs(self.net, j, b, &[DEALER]);
            if let Some(&c) = costs.get(k - 1) {
                if best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, j));
                }
            }
        }
        best.map(|(_, j)| j)
    }

    /// Identity whose relay value the dealer supplies: a silent in-neighbour
    /// first, then the smallest free id.
    fn virtual_supplier(&self, b: usize, used: &BTreeSet<u64>) -> Option<u64> {
        let q = self.params.spec.modulus();
        self.net
            .inn(b)
            .iter()
            .map(|&u| u as u64)
            .filter(|&u| u != DEALER as u64)
            .chain(1..q)
            .find(|&x| x != b as u64 && !used.contains(&x))
    }

    /// Fills `b`'s quota. Returns false if it cannot be served.
    fn serve(&mut self, b: usize) -> bool {
        let mut used: BTreeSet<u64> = self.accepted[b].iter().map(|x| x.0).collect();
        while self.accepted[b].len() < self.quota() {
            let local = match self.opts.fallback {
                Fallback::LocalRelay => self.local_candidate(b, &used),
                _ => None,
            };
            let before = self.snapshot();
            let (supplier, source, value, paths) = if let Some(j) = local {
                let paths = shortest_disjoint_paths_between(self.net, j, b, self.params.k, &[DEALER])
                    .expect("candidate has k paths");
                let v = relay_value(self.data[j].as_ref().unwrap(), b as u64);
                (j as u64, j, v, paths)
            } else {
                let Some(paths) = shortest_disjoint_paths(self.net, b, self.params.k) else {
                    return false;
                };
                let Some(x) = self.virtual_supplier(b, &used) else {
                    return false;
                };
                let nd = node_data(&self.m, x, self.params.spec).expect("x < q");
                (x, DEALER, relay_value(&nd, b as u64), paths)
            };
            let got = self.send_secure(&[value], &paths)[0];
            used.insert(supplier);
            self.record(b, Some(supplier as usize), source, paths.paths, before);
            let tick = self.now;
            self.accept(tick, b, supplier, got);
        }
        true
    }

    fn resume(&mut self) -> BTreeSet<usize> {
        let mut bottlenecks = BTreeSet::new();
        let mut skip = BTreeSet::new();
        loop {
            let Some(b) = self
                .stalled()
                .into_iter()
                .filter(|v| !skip.contains(v) && !self.failed[*v])
                .max_by_key(|&v| (self.delivered_in(v), std::cmp::Reverse(v)))
            else {
                break;
            };
            if self.serve(b) {
                bottlenecks.insert(b);
                self.flood();
            } else {
                self.unservable(b);
                skip.insert(b);
            }
        }
        bottlenecks
    }
}

/// Runs the protocol with the given options.
pub fn run_sneak(
    net: &Network,
    params: &SharingParams,
    secret: &SecretVector,
    rng: impl RandomSource,
    opts: &SneakOptions,
) -> Result<Run> {
    params.validate()?;
    if net.n() != params.n {
        return Err(Error::InvalidParams(format!(
            "network has {} participants, parameters say {}",
            net.n(),
            params.n
        )));
    }
    if opts.adversaries.len() > params.t_adv {
        return Err(Error::InvalidParams(format!(
            "{} adversaries exceed the budget t = {}",
            opts.adversaries.len(),
            params.t_adv
        )));
    }
    if let Some(&bad) = opts.adversaries.iter().find(|&&a| a == DEALER || a > net.n()) {
        return Err(Error::UnknownNode(bad));
    }
    let order: Vec<usize> = match &opts.dealer_order {
        Some(o) => {
            let set: BTreeSet<usize> = o.iter().copied().collect();
            if set.len() != o.len() || &set != net.dealer_neighbors() {
                return Err(Error::InvalidParams(
                    "dealer order must permute the dealer's neighbours".into(),
                ));
            }
            o.clone()
        }
        None => net.dealer_neighbors().iter().copied().collect(),
    };
    let mut rng = rng;
    let m = build_two_threshold_matrix(secret, params, &mut rng)?;
    let n = net.n();
    let mut sim = Sim {
        net,
        params,
        opts,
        draws: m.randomness_count,
        m,
        rng,
        rec: Recorder::new(n),
        data: vec![None; n + 1],
        accepted: vec![Vec::new(); n + 1],
        failed: vec![false; n + 1],
        direct_shares: BTreeMap::new(),
        relay_in: vec![0; n + 1],
        relayed_from: vec![Vec::new(); n + 1],
        queue: VecDeque::new(),
        now: 0,
        corrupt_rng: ChaCha8Rng::seed_from_u64(opts.corruption_seed),
        log: Vec::new(),
        fallback_traffic: Tally::default(),
    };
    for &i in &order {
        let nd = node_data(&sim.m, i as u64, params.spec)?;
        sim.rec.send(
            0,
            DEALER,
            i,
            nd.vector.clone(),
            MessageKind::DealerData,
            (params.d as u64, 1),
        );
        sim.data[i] = Some(nd);
        sim.queue.push_back((1, i));
    }
    sim.flood();
    let first_stall: BTreeSet<usize> = sim.stalled().into_iter().collect();
    let bottlenecks = match opts.fallback {
        Fallback::None => BTreeSet::new(),
        Fallback::Naive => {
            sim.naive();
            BTreeSet::new()
        }
        Fallback::DealerToBottleneck | Fallback::LocalRelay => sim.resume(),
    };
    finish(sim, secret, first_stall, bottlenecks)
}

fn finish<R: RandomSource>(
    sim: Sim<'_, R>,
    secret: &SecretVector,
    first_stall: BTreeSet<usize>,
    bottlenecks: BTreeSet<usize>,
) -> Result<Run> {
    let params = sim.params;
    let len = params.secret_len();
    let mut node_data_map = BTreeMap::new();
    let mut shares = sim.direct_shares.clone();
    for v in sim.net.participants() {
        if let Some(nd) = &sim.data[v] {
            shares.insert(v, extract_share(nd, params));
            node_data_map.insert(v, nd.clone());
        }
    }
    let mut delivered = BTreeSet::new();
    let mut mismatched = BTreeSet::new();
    for (&v, sh) in &shares {
        let truth = extract_share(&node_data(&sim.m, v as u64, params.spec)?, params);
        if truth == *sh {
            delivered.insert(v);
        } else {
            mismatched.insert(v);
        }
    }
    debug_assert_eq!(secret.entries.len(), len);
    let stalled = sim
        .net
        .participants()
        .filter(|v| !delivered.contains(v))
        .collect();
    let mut fallback_cost = sim.fallback_traffic.clone();
    if matches!(
        sim.opts.fallback,
        Fallback::DealerToBottleneck | Fallback::LocalRelay
    ) {
        for &v in &first_stall {
            if !bottlenecks.contains(&v) && sim.data[v].is_some() {
                fallback_cost.add(sim.relay_in[v], 1);
            }
        }
    }
    let report = RunReport {
        algorithm: "sneak".into(),
        params: *params,
        seed: None,
        graph_digest: sim.net.digest(),
        secret_len: len,
        total_field_elements: sim.rec.field_elements,
        total_units: units_of(&sim.rec.ideal, len),
        integral_units: count_units(sim.rec.field_elements, len),
        per_node_download: sim
            .net
            .participants()
            .map(|v| (v, units_of(&sim.rec.download[v], len)))
            .collect(),
        randomness_draws: sim.draws,
        randomness_units: count_units(sim.draws as u64, len),
        delivered,
        stalled,
        mismatched,
        adversaries: sim.opts.adversaries.clone(),
        control_messages: sim.rec.control,
        fallback_log: sim.log,
        fallback_cost_units: units_of(&fallback_cost, len),
    };
    Ok(Run {
        report,
        transcript: sim.rec.transcript,
        node_data: node_data_map,
        shares,
    })
}

/// Runs with `adversaries` corrupting every relay they send.
pub fn run_sneak_adversarial(
    net: &Network,
    params: &SharingParams,
    secret: &SecretVector,
    rng: impl RandomSource,
    adversaries: &BTreeSet<usize>,
    corruption: Corruption,
) -> Result<Run> {
    let opts = SneakOptions {
        adversaries: adversaries.clone(),
        corruption,
        ..SneakOptions::default()
    };
    run_sneak(net, params, secret, rng, &opts)
}

/// Runs with a bottleneck fallback strategy.
pub fn run_with_fallback(
    net: &Network,
    params: &SharingParams,
    secret: &SecretVector,
    rng: impl RandomSource,
    strategy: Fallback,
) -> Result<Run> {
    let opts = SneakOptions {
        fallback: strategy,
        ..SneakOptions::default()
    };
    run_sneak(net, params, secret, rng, &opts)
}

/// Node data for a newcomer, computed from the relay values of exactly `d`
/// consenting participants. `existing` lists ids already in use.
pub fn add_participant(
    consenting: &[NodeData],
    new_id: u64,
    existing: &BTreeSet<u64>,
    params: &SharingParams,
) -> Result<NodeData> {
    if consenting.len() != params.d {
        return Err(Error::ArityMismatch {
            expected: params.d,
            got: consenting.len(),
        });
    }
    let q = params.spec.modulus();
    if new_id == 0 || new_id >= q {
        return Err(Error::NodeIdOutOfField { id: new_id, q });
    }
    if existing.contains(&new_id) || consenting.iter().any(|c| c.node_id == new_id) {
        return Err(Error::DuplicateId(new_id));
    }
    let received: Vec<(u64, FieldElement)> = consenting
        .iter()
        .map(|c| (c.node_id, relay_value(c, new_id)))
        .collect();
    recover_node_data(new_id, &received, params)
}
