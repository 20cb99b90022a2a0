//! Exhaustive secrecy and recovery checks over small fields.
//!
//! Every (secret, randomness) pair is run through the deterministic
//! protocol. For each colluding set, the multiset of views produced by each
//! secret is tallied; the set learns nothing iff every secret yields the
//! same multiset. Counting is exact.

use std::collections::HashMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::baseline::{recover_sota_secret, run_sota};
use crate::encoding::{recover_secret, SecretVector, Share, SharingParams};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::Network;
use crate::protocol::{run_sneak, Fallback, SneakOptions};
use crate::random::Scripted;
use crate::report::{MessageKind, Run};

/// Which protocol the oracle drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Sneak(Fallback),
    Sota,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Largest number of protocol runs allowed.
    pub max_enum: u128,
    pub exec: Exec,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_enum: 5_000_000,
            exec: Exec::Parallel,
        }
    }
}

/// What a colluding set sees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViewSelector {
    pub nodes: Vec<usize>,
    /// Restrict to these message kinds; all kinds when `None`.
    pub kinds: Option<Vec<MessageKind>>,
    /// Include node data and shares the members computed.
    pub include_computed: bool,
}

impl ViewSelector {
    pub fn full(nodes: Vec<usize>) -> Self {
        Self {
            nodes,
            kinds: None,
            include_computed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetVerdict {
    pub subset: Vec<usize>,
    pub view_histogram_digest: String,
    pub verdict: Outcome,
}

/// A view whose frequency depends on the secret.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub subset: Vec<usize>,
    pub secret_a: Vec<u64>,
    pub secret_b: Vec<u64>,
    pub view: Vec<u64>,
    pub count_a: u64,
    pub count_b: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub verdict: Outcome,
    pub runs: u128,
    pub draws_per_run: usize,
    pub subsets: Vec<SubsetVerdict>,
    pub counterexample: Option<Counterexample>,
}

impl UniformityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Outcome::Pass
    }
}

fn secret_len(params: &SharingParams, target: Target) -> usize {
    match target {
        Target::Sneak(_) => params.secret_len(),
        Target::Sota => params.d - params.k + 1,
    }
}

fn run_once(
    net: &Network,
    params: &SharingParams,
    target: Target,
    secret: &SecretVector,
    rand: Vec<u64>,
) -> Result<(Run, usize)> {
    let mut src = Scripted::new(rand);
    let run = match target {
        Target::Sneak(fallback) => {
            let opts = SneakOptions {
                fallback,
                ..SneakOptions::default()
            };
            run_sneak(net, params, secret, &mut src, &opts)?
        }
        Target::Sota => run_sota(net, params, secret, &mut src)?,
    };
    Ok((run, src.consumed()))
}

/// Number of draws one run consumes; the schedule never depends on values.
pub fn draws_per_run(net: &Network, params: &SharingParams, target: Target) -> Result<usize> {
    let zero = SecretVector::new(vec![params.spec.zero(); secret_len(params, target)]);
    Ok(run_once(net, params, target, &zero, Vec::new())?.1)
}

fn digits(mut index: u128, q: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = (index % q as u128) as u64;
        index /= q as u128;
    }
    out
}

fn bump(odo: &mut [u64], q: u64) -> bool {
    for d in odo.iter_mut() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// Views are packed base `q` into a `u128` when they fit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum ViewKey {
    Packed(u128),
    Raw(Box<[u8]>),
}

impl ViewKey {
    fn new(values: &[u64], q: u64) -> Self {
        let bits = 64 - (q - 1).leading_zeros();
        if values.len() as u32 * bits <= 127 {
            let mut acc = 0u128;
            for &v in values {
                acc = acc * q as u128 + v as u128;
            }
            ViewKey::Packed(acc)
        } else {
            ViewKey::Raw(values.iter().map(|&v| v as u8).collect())
        }
    }

    fn bytes(&self) -> Vec<u8> {
        match self {
            ViewKey::Packed(x) => x.to_le_bytes().to_vec(),
            ViewKey::Raw(b) => b.to_vec(),
        }
    }
}

/// Message indices and computed-data owners picked out by a selector.
struct Plan {
    messages: Vec<usize>,
    members: Vec<usize>,
}

fn plan_for(run: &Run, sel: &ViewSelector) -> Plan {
    let messages = run
        .transcript
        .iter()
        .enumerate()
        .filter(|(_, m)| sel.nodes.contains(&m.src) || sel.nodes.contains(&m.dst))
        .filter(|(_, m)| sel.kinds.as_ref().is_none_or(|k| k.contains(&m.kind)))
        .map(|(i, _)| i)
        .collect();
    let mut members = if sel.include_computed {
        sel.nodes.clone()
    } else {
        Vec::new()
    };
    members.sort_unstable();
    Plan { messages, members }
}

fn extract(run: &Run, plan: &Plan, out: &mut Vec<u64>) {
    out.clear();
    for &i in &plan.messages {
        out.extend(run.transcript[i].payload.iter().map(|e| e.value()));
    }
    for v in &plan.members {
        if let Some(nd) = run.node_data.get(v) {
            out.extend(nd.vector.iter().map(|e| e.value()));
        }
        if let Some(sh) = run.shares.get(v) {
            out.extend(sh.values.iter().map(|e| e.value()));
        }
    }
}

type Histogram = HashMap<ViewKey, u64>;

struct Enumeration<'a> {
    net: &'a Network,
    params: &'a SharingParams,
    target: Target,
    q: u64,
    len: usize,
    draws: usize,
    plans: Vec<Plan>,
}

impl Enumeration<'_> {
    fn histograms(&self, secret_index: u128) -> Result<Vec<Histogram>> {
        let spec = self.params.spec;
        let secret = SecretVector::new(
            digits(secret_index, self.q, self.len)
                .into_iter()
                .map(|v| spec.elem(v))
                .collect(),
        );
        let mut hist: Vec<Histogram> = vec![HashMap::new(); self.plans.len()];
        let mut odo = vec![0u64; self.draws];
        let mut buf = Vec::new();
        loop {
            let (run, _) = run_once(self.net, self.params, self.target, &secret, odo.clone())?;
            for (h, plan) in hist.iter_mut().zip(&self.plans) {
                extract(&run, plan, &mut buf);
                *h.entry(ViewKey::new(&buf, self.q)).or_default() += 1;
            }
            if !bump(&mut odo, self.q) {
                break;
            }
        }
        Ok(hist)
    }
}

fn digest(h: &Histogram) -> String {
    let mut entries: Vec<(&ViewKey, &u64)> = h.iter().collect();
    entries.sort();
    let mut hasher = Sha256::new();
    for (k, c) in entries {
        let b = k.bytes();
        hasher.update((b.len() as u32).to_le_bytes());
        hasher.update(&b);
        hasher.update(c.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

fn check_q(params: &SharingParams) -> Result<u64> {
    let q = params.spec.modulus();
    if q > 255 {
        return Err(Error::InvalidParams(format!("oracle needs q <= 255, got {q}")));
    }
    Ok(q)
}

fn budget_guard(q: u64, exponent: usize, budget: u128) -> Result<u128> {
    let mut runs: u128 = 1;
    for _ in 0..exponent {
        runs = runs.saturating_mul(q as u128);
    }
    if runs > budget {
        return Err(Error::EnumerationBudget {
            required: runs,
            budget,
        });
    }
    Ok(runs)
}

/// Checks, for each selector, that the distribution of its view is the same
/// under every secret.
pub fn check_uniformity(
    net: &Network,
    params: &SharingParams,
    target: Target,
    selectors: &[ViewSelector],
    cfg: &OracleConfig,
) -> Result<UniformityReport> {
    let q = check_q(params)?;
    let len = secret_len(params, target);
    let draws = draws_per_run(net, params, target)?;
    let runs = budget_guard(q, len + draws, cfg.max_enum)?;
    let zero = SecretVector::new(vec![params.spec.zero(); len]);
    let probe = run_once(net, params, target, &zero, vec![0; draws])?.0;
    let en = Enumeration {
        net,
        params,
        target,
        q,
        len,
        draws,
        plans: selectors.iter().map(|s| plan_for(&probe, s)).collect(),
    };
    let secrets = budget_guard(q, len, u128::MAX)?;
    let per_secret: Vec<Result<Vec<String>>> = cfg.exec.map((0..secrets).collect(), |s| {
        Ok(en.histograms(s)?.iter().map(digest).collect())
    });
    let per_secret: Vec<Vec<String>> = per_secret.into_iter().collect::<Result<_>>()?;
    let mut subsets = Vec::with_capacity(selectors.len());
    let mut counterexample = None;
    for (i, sel) in selectors.iter().enumerate() {
        let first = &per_secret[0][i];
        let odd = per_secret.iter().position(|d| &d[i] != first);
        if let (Some(b), None) = (odd, &counterexample) {
            counterexample = Some(explain(&en, i, sel, b as u128)?);
        }
        subsets.push(SubsetVerdict {
            subset: sel.nodes.clone(),
            view_histogram_digest: first.clone(),
            verdict: if odd.is_some() {
                Outcome::Fail
            } else {
                Outcome::Pass
            },
        });
    }
    Ok(UniformityReport {
        verdict: if counterexample.is_some() {
            Outcome::Fail
        } else {
            Outcome::Pass
        },
        runs,
        draws_per_run: draws,
        subsets,
        counterexample,
    })
}

fn unpack(key: &ViewKey, q: u64, len: usize) -> Vec<u64> {
    match key {
        ViewKey::Packed(x) => {
            let mut x = *x;
            let mut out = vec![0; len];
            for slot in out.iter_mut().rev() {
                *slot = (x % q as u128) as u64;
                x /= q as u128;
            }
            out
        }
        ViewKey::Raw(b) => b.iter().map(|&v| v as u64).collect(),
    }
}

fn explain(en: &Enumeration<'_>, i: usize, sel: &ViewSelector, b: u128) -> Result<Counterexample> {
    let ha = en.histograms(0)?.swap_remove(i);
    let hb = en.histograms(b)?.swap_remove(i);
    let mut keys: Vec<&ViewKey> = ha.keys().chain(hb.keys()).collect();
    keys.sort();
    let key = keys
        .into_iter()
        .find(|k| ha.get(*k) != hb.get(*k))
        .expect("digests differ");
    let zero = SecretVector::new(vec![en.params.spec.zero(); en.len]);
    let probe = run_once(en.net, en.params, en.target, &zero, vec![0; en.draws])?.0;
    let mut buf = Vec::new();
    extract(&probe, &en.plans[i], &mut buf);
    Ok(Counterexample {
        subset: sel.nodes.clone(),
        secret_a: digits(0, en.q, en.len),
        secret_b: digits(b, en.q, en.len),
        view: unpack(key, en.q, buf.len()),
        count_a: ha.get(key).copied().unwrap_or(0),
        count_b: hb.get(key).copied().unwrap_or(0),
    })
}

/// All subsets of `items` with between 1 and `max` elements, in
/// lexicographic order.
pub fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], start: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for i in start..items.len() {
            cur.push(items[i]);
            out.push(cur.clone());
            if cur.len() < max {
                go(items, i + 1, max, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, 0, max, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Every set of at most `budget` participants has a secret-independent view.
pub fn verify_collusion_resistance(
    net: &Network,
    params: &SharingParams,
    budget: usize,
    target: Target,
    cfg: &OracleConfig,
) -> Result<UniformityReport> {
    let nodes: Vec<usize> = net.participants().collect();
    let selectors: Vec<ViewSelector> = subsets_up_to(&nodes, budget)
        .into_iter()
        .map(ViewSelector::full)
        .collect();
    check_uniformity(net, params, target, &selectors, cfg)
}

/// Collusion resistance of the baseline's relay paths.
pub fn verify_baseline_path_secrecy(
    net: &Network,
    params: &SharingParams,
    budget: usize,
    cfg: &OracleConfig,
) -> Result<UniformityReport> {
    verify_collusion_resistance(net, params, budget, Target::Sota, cfg)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecoveryReport {
    pub verdict: Outcome,
    pub instances: u128,
    pub subsets_checked: u64,
    pub exhaustive: bool,
    /// Secret and subset of the first failure.
    pub failure: Option<(Vec<u64>, Vec<usize>)>,
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    subsets_up_to(items, k)
        .into_iter()
        .filter(|s| s.len() == k)
        .collect()
}

fn check_instance(
    net: &Network,
    params: &SharingParams,
    target: Target,
    secret: &SecretVector,
    rand: Vec<u64>,
) -> Result<(u64, Option<Vec<usize>>)> {
    let (run, _) = run_once(net, params, target, secret, rand)?;
    let delivered: Vec<usize> = run.report.delivered.iter().copied().collect();
    let mut checked = 0;
    for subset in k_subsets(&delivered, params.k) {
        let shares: Vec<Share> = subset.iter().map(|v| run.shares[v].clone()).collect();
        let got = match target {
            Target::Sneak(_) => recover_secret(&shares, params)?,
            Target::Sota => recover_sota_secret(&shares, params.spec)?,
        };
        checked += 1;
        if &got != secret {
            return Ok((checked, Some(subset)));
        }
    }
    Ok((checked, None))
}

/// Every `k` delivered shares recover the secret. Exhaustive when the
/// instance space fits `cfg.max_enum`, otherwise `samples` seeded draws.
pub fn verify_recovery(
    net: &Network,
    params: &SharingParams,
    target: Target,
    cfg: &OracleConfig,
    samples: u64,
    seed: u64,
) -> Result<RecoveryReport> {
    use rand::{Rng, SeedableRng};
    let q = params.spec.modulus();
    let len = secret_len(params, target);
    let draws = draws_per_run(net, params, target)?;
    let exhaustive = q <= 255 && budget_guard(q, len + draws, cfg.max_enum).is_ok();
    let instances: Vec<(Vec<u64>, Vec<u64>)> = if exhaustive {
        let total = budget_guard(q, len + draws, cfg.max_enum)?;
        (0..total)
            .map(|i| {
                let all = digits(i, q, len + draws);
                (all[..len].to_vec(), all[len..].to_vec())
            })
            .collect()
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let s = (0..len).map(|_| rng.gen_range(0..q)).collect();
                let r = (0..draws).map(|_| rng.gen_range(0..q)).collect();
                (s, r)
            })
            .collect()
    };
    let count = instances.len() as u128;
    let results: Vec<Result<(u64, Option<Vec<usize>>, Vec<u64>)>> =
        cfg.exec.map(instances, |(s, r)| {
            let secret = SecretVector::from_values(&s, params.spec);
            let (c, fail) = check_instance(net, params, target, &secret, r)?;
            Ok((c, fail, s))
        });
    let mut checked = 0;
    let mut failure = None;
    for r in results {
        let (c, fail, s) = r?;
        checked += c;
        if let (Some(sub), None) = (fail, &failure) {
            failure = Some((s, sub));
        }
    }
    Ok(RecoveryReport {
        verdict: if failure.is_none() {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        instances: count,
        subsets_checked: checked,
        exhaustive,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::generators::fixtures;

    fn small_net() -> Network {
        Network::from_edges(4, false, &[(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    fn cfg() -> OracleConfig {
        OracleConfig {
            max_enum: 2_000_000,
            exec: Exec::Sequential,
        }
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(
            subsets_up_to(&[1, 2, 3], 2),
            vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(k_subsets(&[1, 2, 3, 4], 3).len(), 4);
    }

    #[test]
    fn view_key_round_trip() {
        let v = vec![4, 0, 3, 1, 2];
        assert_eq!(unpack(&ViewKey::new(&v, 5), 5, 5), v);
        let long: Vec<u64> = (0..60).map(|i| i % 7).collect();
        assert_eq!(unpack(&ViewKey::new(&long, 7), 7, 60), long);
    }

    #[test]
    fn small_instance_passes_at_budget_one() {
        let p = SharingParams::new(4, 2, 2, FieldSpec::new(5).unwrap()).unwrap();
        let r = verify_collusion_resistance(&small_net(), &p, 1, Target::Sneak(Fallback::None), &cfg())
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.runs, 125);
        assert_eq!(r.subsets.len(), 4);
    }

    #[test]
    fn budget_k_fails_with_counterexample() {
        let p = SharingParams::new(4, 2, 2, FieldSpec::new(5).unwrap()).unwrap();
        let r = verify_collusion_resistance(&small_net(), &p, 2, Target::Sneak(Fallback::None), &cfg())
            .unwrap();
        assert!(!r.passed());
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.subset.len(), 2);
        assert_ne!(cx.count_a, cx.count_b);
    }

    #[test]
    fn enumeration_budget_guard() {
        let p = SharingParams::new(4, 2, 2, FieldSpec::new(5).unwrap()).unwrap();
        let tight = OracleConfig {
            max_enum: 100,
            exec: Exec::Sequential,
        };
        let e = verify_collusion_resistance(&small_net(), &p, 1, Target::Sneak(Fallback::None), &tight);
        assert!(matches!(e, Err(Error::EnumerationBudget { required: 125, .. })));
    }

    #[test]
    fn toy_recovery_all_pairs() {
        let p = SharingParams::new(6, 2, 2, FieldSpec::new(7).unwrap()).unwrap();
        let r = verify_recovery(&fixtures::toy(), &p, Target::Sneak(Fallback::None), &cfg(), 0, 0)
            .unwrap();
        assert_eq!(r.verdict, Outcome::Pass);
        assert!(r.exhaustive);
        assert_eq!(r.instances, 343);
        assert_eq!(r.subsets_checked, 343 * 15);
    }

    #[test]
    fn baseline_paths_leak_nothing_to_single_nodes() {
        let p = SharingParams::new(4, 2, 2, FieldSpec::new(5).unwrap()).unwrap();
        let r = verify_baseline_path_secrecy(&small_net(), &p, 1, &cfg()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let p = SharingParams::new(4, 2, 2, FieldSpec::new(5).unwrap()).unwrap();
        let t = Target::Sneak(Fallback::None);
        let a = verify_collusion_resistance(&small_net(), &p, 2, t, &cfg()).unwrap();
        let par = OracleConfig {
            exec: Exec::Parallel,
            ..cfg()
        };
        let b = verify_collusion_resistance(&small_net(), &p, 2, t, &par).unwrap();
        assert_eq!(a.subsets, b.subsets);
    }
}
