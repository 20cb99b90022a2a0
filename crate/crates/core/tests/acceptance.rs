//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sneak_core::baseline::run_sota;
use sneak_core::bounds::{
    graph_communication_lower, node_download_lower, randomness_bounds, sota_closed_form,
    sota_quadratic_lower,
};
use sneak_core::encoding::{
    build_master_matrix, extract_share, node_data, recover_secret, SecretVector, SharingParams,
};
use sneak_core::exec::Exec;
use sneak_core::field::FieldSpec;
use sneak_core::generators::{
    fixtures, gen_layered, gen_random_propagating, gen_regular_nonneighbor, gen_star, gen_window,
};
use sneak_core::graph::{check_propagating_dealer, Network};
use sneak_core::oracle::{verify_collusion_resistance, verify_recovery, OracleConfig, Target};
use sneak_core::protocol::{
    add_participant, run_sneak, run_sneak_adversarial, run_with_fallback, Corruption, Fallback,
    SneakOptions,
};
use sneak_core::random::RngSource;
use sneak_core::report::transcript_csv;
use sneak_core::units::Units;

type Outcome = Result<String, String>;

fn params(n: usize, k: usize, d: usize) -> SharingParams {
    let q = FieldSpec::smallest_above(n as u64).unwrap();
    SharingParams::new(n, k, d, q).unwrap()
}

fn rng(seed: u64) -> RngSource<ChaCha8Rng> {
    RngSource(ChaCha8Rng::seed_from_u64(seed))
}

fn secret_for(p: &SharingParams, seed: u64) -> SecretVector {
    SecretVector::random(p, &mut rng(seed ^ 0x5eed))
}

fn sota_secret(p: &SharingParams, seed: u64) -> SecretVector {
    let mut r = rng(seed ^ 0x50a);
    SecretVector::new((0..p.d - p.k + 1).map(|_| {
        use sneak_core::random::RandomSource;
        r.draw(p.spec)
    }).collect())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, format!("took {spent:?}, limit {limit:?}"))
}

fn c1_toy() -> Outcome {
    let start = Instant::now();
    let net = fixtures::toy();
    let p = SharingParams::new(6, 2, 2, FieldSpec::new(7).unwrap()).unwrap();
    let s = secret_for(&p, 1);
    let sneak = run_sneak(&net, &p, &s, rng(1), &SneakOptions::default()).map_err(|e| e.to_string())?;
    let sota = run_sota(&net, &p, &s, &mut rng(1)).map_err(|e| e.to_string())?;
    let r = &sneak.report;
    ensure(r.total_field_elements == 12, format!("sneak elements {}", r.total_field_elements))?;
    ensure(r.total_units == Units::int(12), format!("sneak units {}", r.total_units))?;
    ensure(r.randomness_draws == 2, format!("sneak draws {}", r.randomness_draws))?;
    ensure(sota.report.total_units == Units::int(24), format!("sota units {}", sota.report.total_units))?;
    ensure(sota.report.randomness_draws == 5, format!("sota draws {}", sota.report.randomness_draws))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("sneak 12 units / 2 draws, sota 24 units / 5 draws in {:?}", start.elapsed()))
}

fn c2_closed_form() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for i in 0..50u64 {
        let n = 16 + (i as usize * 37) % 113;
        let k = 1 + (i as usize % 4);
        let d = k + (i as usize / 4) % (7 - k);
        let directed = i % 3 == 0;
        let g = gen_random_propagating(n, d, 1000 + i, directed).map_err(|e| e.to_string())?;
        let p = params(n, k, d);
        let s = secret_for(&p, i);
        let sneak = run_sneak(&g.network, &p, &s, rng(i), &SneakOptions::default())
            .map_err(|e| e.to_string())?;
        let expect = Units::ratio((n * d) as i64, (d - k + 1) as i64);
        ensure(
            sneak.report.total_units == expect,
            format!("instance {i} n={n} k={k} d={d}: sneak {} != {expect}", sneak.report.total_units),
        )?;
        let sota = run_sota(&g.network, &p, &sota_secret(&p, i), &mut rng(i)).map_err(|e| e.to_string())?;
        let closed = sota_closed_form(&g.network, &p);
        ensure(
            sota.report.total_units == closed,
            format!("instance {i}: sota {} != closed form {closed}", sota.report.total_units),
        )?;
        checked += 1;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{checked} graphs, n<=128 k<=4 d<=6, in {:?}", start.elapsed()))
}

fn corpus() -> Vec<(String, Network, usize, usize)> {
    let mut out = vec![
        ("toy".to_string(), fixtures::toy(), 2, 2),
        ("star".to_string(), gen_star(9), 3, 3),
    ];
    out.push(("layered".into(), gen_layered(&[3, 4, 4], 3, false).unwrap().network, 2, 3));
    for seed in 0..4 {
        out.push((format!("random{seed}"), gen_random_propagating(30, 3, seed, seed % 2 == 0).unwrap().network, 2, 3));
        out.push((format!("window{seed}"), gen_window(40, 2, 2, seed).unwrap().network, 2, 2));
        out.push((format!("regular{seed}"), gen_regular_nonneighbor(25, 5, 3, seed).unwrap().network, 2, 3));
    }
    out
}

fn c3_sandwich() -> Outcome {
    let mut graphs = 0;
    let mut exact_nodes = 0;
    for (name, net, k, d) in corpus() {
        let p = params(net.n(), k, d);
        let s = secret_for(&p, 3);
        let run = run_sneak(&net, &p, &s, rng(3), &SneakOptions::default()).map_err(|e| e.to_string())?;
        ensure(run.report.all_delivered(), format!("{name}: stalled {:?}", run.report.stalled))?;
        let (lower, _) = graph_communication_lower(&net, &p);
        ensure(
            lower <= run.report.total_units,
            format!("{name}: lower {lower} > measured {}", run.report.total_units),
        )?;
        graphs += 1;
    }
    let fig9 = fixtures::fig9();
    let p = params(10, 2, 2);
    let run = run_with_fallback(&fig9, &p, &secret_for(&p, 3), rng(3), Fallback::LocalRelay)
        .map_err(|e| e.to_string())?;
    let (lower, _) = graph_communication_lower(&fig9, &p);
    ensure(lower <= run.report.total_units, format!("fig9: lower {lower} > {}", run.report.total_units))?;
    graphs += 1;
    for seed in 0..4 {
        let (n, b, d, k) = (25, 5, 3, 2);
        let net = gen_regular_nonneighbor(n, b, d, seed).unwrap().network;
        let p = params(n, k, d);
        let run = run_sneak(&net, &p, &secret_for(&p, seed), rng(seed), &SneakOptions::default())
            .map_err(|e| e.to_string())?;
        for v in b + 1..=n {
            let measured = &run.report.per_node_download[&v];
            let lower = node_download_lower(&net, &p, v);
            // Independent value: d relay elements over a secret of d-k+1.
            ensure(lower == Units::ratio(d as i64, (d - k + 1) as i64), format!("node {v}: bound {lower}"))?;
            ensure(measured == &lower, format!("seed {seed} node {v}: {measured} != {lower}"))?;
            exact_nodes += 1;
        }
    }
    Ok(format!("{graphs} graphs bounded below; {exact_nodes} non-neighbours tight"))
}

fn c4_separation() -> Outcome {
    let start = Instant::now();
    let mut last_ratio = 0.0;
    let mut parts = Vec::new();
    for n in [16usize, 32, 64, 128] {
        let g = gen_window(n, 2, 2, n as u64).map_err(|e| e.to_string())?;
        let p = params(n, 2, 2);
        let sneak = run_sneak(&g.network, &p, &secret_for(&p, 4), rng(4), &SneakOptions::default())
            .map_err(|e| e.to_string())?;
        let sota = run_sota(&g.network, &p, &sota_secret(&p, 4), &mut rng(4)).map_err(|e| e.to_string())?;
        let closed = sota_closed_form(&g.network, &p);
        ensure(closed == sota.report.total_units, format!("n={n}: sota run differs from closed form"))?;
        let quad = Units::ratio((n * (n + 1)) as i64, 8);
        ensure(sota_quadratic_lower(n, 2) == quad, "quadratic bound formula")?;
        ensure(closed >= quad, format!("n={n}: sota {closed} < {quad}"))?;
        ensure(sneak.report.total_units == Units::int(2 * n as i64), format!("n={n}: sneak {}", sneak.report.total_units))?;
        let ratio = closed.to_f64() / sneak.report.total_units.to_f64();
        ensure(ratio > last_ratio, format!("n={n}: ratio {ratio:.3} not above {last_ratio:.3}"))?;
        last_ratio = ratio;
        parts.push(format!("n={n} ratio={ratio:.2}"));
    }
    within(start, Duration::from_secs(60))?;
    Ok(parts.join(", "))
}

fn small_topologies() -> Vec<(&'static str, Network, bool)> {
    let e = |n, edges: &[(usize, usize)]| Network::from_edges(n, false, edges).unwrap();
    vec![
        ("diamond4", e(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (3, 4)]), true),
        ("dense4", e(4, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4), (1, 2)]), true),
        ("mesh5", e(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4), (1, 5), (2, 5), (4, 5)]), true),
        ("chain4", e(4, &[(0, 1), (0, 2), (1, 3), (3, 4)]), false),
    ]
}

fn c5_oracle() -> Outcome {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let mut instances = 0;
    let mut fails_seen = 0;
    for (name, net, _) in small_topologies() {
        for q in [5u64, 7] {
            if q as usize <= net.n() {
                continue;
            }
            for (k, d) in [(2, 2), (2, 3), (3, 3)] {
                let p = SharingParams::new(net.n(), k, d, FieldSpec::new(q).unwrap()).unwrap();
                let t = Target::Sneak(Fallback::None);
                let tag = format!("{name} q={q} k={k} d={d}");
                let sec = verify_collusion_resistance(&net, &p, k - 1, t, &cfg).map_err(|e| format!("{tag}: {e}"))?;
                ensure(sec.passed(), format!("{tag}: secrecy FAIL {:?}", sec.counterexample))?;
                let rec = verify_recovery(&net, &p, t, &cfg, 0, 0).map_err(|e| format!("{tag}: {e}"))?;
                ensure(rec.exhaustive, format!("{tag}: recovery not exhaustive"))?;
                ensure(rec.failure.is_none(), format!("{tag}: recovery FAIL {:?}", rec.failure))?;
                // k colluders can only reconstruct when k of them got shares.
                let probe = run_sneak(&net, &p, &secret_for(&p, 0), rng(0), &SneakOptions::default())
                    .map_err(|e| e.to_string())?;
                if probe.report.delivered.len() >= k {
                    let over = verify_collusion_resistance(&net, &p, k, t, &cfg).map_err(|e| format!("{tag}: {e}"))?;
                    ensure(!over.passed(), format!("{tag}: budget k did not FAIL"))?;
                    fails_seen += 1;
                }
                instances += 1;
            }
        }
    }
    ensure(
        small_topologies().iter().any(|(_, n, prop)| !prop && !check_propagating_dealer(n, 2).complete),
        "corpus lacks a non-propagating topology",
    )?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("{instances} instances PASS, {fails_seen} budget-k FAILs, in {:?}", start.elapsed()))
}

fn c6_adversaries() -> Outcome {
    let (d, t, k) = (2usize, 1usize, 2usize);
    for seed in 0..20u64 {
        let n = 12 + seed as usize;
        let g = gen_random_propagating(n, d + 2 * t, 600 + seed, seed % 2 == 1).map_err(|e| e.to_string())?;
        let p = params(n, k, d).with_adversaries(t).map_err(|e| e.to_string())?;
        let bad: BTreeSet<usize> = [1 + (seed as usize * 7) % n].into();
        let s = secret_for(&p, seed);
        let run = run_sneak_adversarial(&g.network, &p, &s, rng(seed), &bad, Corruption::Random)
            .map_err(|e| e.to_string())?;
        ensure(run.report.honest_delivered(), format!("seed {seed}: stalled {:?}", run.report.stalled))?;
        // Ground truth straight from the dealer's matrix.
        let m = build_master_matrix(&s, &p, &mut rng(seed)).map_err(|e| e.to_string())?;
        for v in g.network.participants().filter(|v| !bad.contains(v)) {
            let truth = extract_share(&node_data(&m, v as u64, p.spec).unwrap(), &p);
            ensure(run.shares.get(&v) == Some(&truth), format!("seed {seed}: node {v} share wrong"))?;
        }
    }
    Ok("20 graphs, every honest share matches the dealer's".into())
}

fn c7_addition() -> Outcome {
    for seed in 0..20u64 {
        let n = 6 + seed as usize % 10;
        let (k, d) = (1 + seed as usize % 3, 3);
        let q = FieldSpec::smallest_above(n as u64 + 1).unwrap();
        let p = SharingParams::new(n, k, d, q).map_err(|e| e.to_string())?;
        let g = gen_random_propagating(n, d, 700 + seed, false).map_err(|e| e.to_string())?;
        let s = secret_for(&p, seed);
        let run = run_sneak(&g.network, &p, &s, rng(seed), &SneakOptions::default()).map_err(|e| e.to_string())?;
        let m = build_master_matrix(&s, &p, &mut rng(seed)).map_err(|e| e.to_string())?;
        let helpers: Vec<_> = run.node_data.values().skip(seed as usize % 3).take(d).cloned().collect();
        let existing: BTreeSet<u64> = (1..=n as u64).collect();
        let new_id = n as u64 + 1;
        let grown = add_participant(&helpers, new_id, &existing, &p).map_err(|e| e.to_string())?;
        let issued = node_data(&m, new_id, p.spec).map_err(|e| e.to_string())?;
        ensure(grown == issued, format!("seed {seed}: newcomer data differs"))?;
        let mut shares = vec![extract_share(&grown, &p)];
        shares.extend(run.shares.values().take(k - 1).cloned());
        let back = recover_secret(&shares, &p).map_err(|e| e.to_string())?;
        ensure(back == s, format!("seed {seed}: recovery with newcomer failed"))?;
    }
    Ok("20 grown instances match dealer-issued node data".into())
}

fn c8_fallback() -> Outcome {
    let net = fixtures::fig9();
    let p = SharingParams::new(10, 2, 2, FieldSpec::new(11).unwrap()).unwrap();
    let s = secret_for(&p, 8);
    let plain = run_sneak(&net, &p, &s, rng(8), &SneakOptions::default()).map_err(|e| e.to_string())?;
    let want: BTreeSet<usize> = [8, 9, 10].into();
    ensure(plain.report.stalled == want, format!("stalled {:?}", plain.report.stalled))?;
    let targets = [
        (Fallback::Naive, Units::int(30)),
        (Fallback::DealerToBottleneck, Units::int(14)),
        (Fallback::LocalRelay, Units::int(8)),
    ];
    let cfg = OracleConfig::default();
    let mut parts = Vec::new();
    for (strategy, cost) in targets {
        let run = run_with_fallback(&net, &p, &s, rng(8), strategy).map_err(|e| e.to_string())?;
        ensure(run.report.all_delivered(), format!("{strategy:?}: stalled {:?}", run.report.stalled))?;
        ensure(
            run.report.fallback_cost_units == cost,
            format!("{strategy:?}: cost {} != {cost}", run.report.fallback_cost_units),
        )?;
        let sec = verify_collusion_resistance(&net, &p, 1, Target::Sneak(strategy), &cfg)
            .map_err(|e| format!("{strategy:?}: {e}"))?;
        ensure(sec.passed(), format!("{strategy:?}: secrecy FAIL {:?}", sec.counterexample))?;
        parts.push(format!("{strategy:?}={} ({} runs)", run.report.fallback_cost_units, sec.runs));
    }
    Ok(format!("stalls {{8,9,10}}; {}", parts.join(", ")))
}

fn c9_randomness() -> Outcome {
    let (k, d) = (2, 3);
    let mut draws = BTreeSet::new();
    let mut last = Units::int(-1);
    let mut parts = Vec::new();
    for n in [16usize, 32, 64, 128, 256] {
        let g = gen_random_propagating(n, d, 900 + n as u64, false).map_err(|e| e.to_string())?;
        let p = params(n, k, d);
        let run = run_sneak(&g.network, &p, &secret_for(&p, 9), rng(9), &SneakOptions::default())
            .map_err(|e| e.to_string())?;
        draws.insert(run.report.randomness_draws);
        ensure(g.network.dealer_neighbors().len() == d, "dealer degree not bounded")?;
        let lower = randomness_bounds(&g.network, &p).sota_lower;
        ensure(lower > last, format!("n={n}: sota randomness bound {lower} not above {last}"))?;
        parts.push(format!("n={n} sota>={:.1}", lower.to_f64()));
        last = lower;
    }
    ensure(draws.len() == 1, format!("sneak draws vary: {draws:?}"))?;
    Ok(format!("sneak draws {:?}; {}", draws, parts.join(", ")))
}

fn c10_determinism() -> Outcome {
    let once = || -> Result<(String, String), String> {
        let g = gen_random_propagating(40, 3, 77, false).map_err(|e| e.to_string())?;
        let p = params(40, 2, 3);
        let mut run = run_sneak(&g.network, &p, &secret_for(&p, 77), rng(77), &SneakOptions::default())
            .map_err(|e| e.to_string())?;
        run.report.seed = Some(77);
        Ok((serde_json::to_string_pretty(&run.report).unwrap(), transcript_csv(&run.transcript)))
    };
    let a = once()?;
    let b = once()?;
    ensure(a == b, "repeated run differs")?;
    let par = Exec::Parallel;
    ensure(par.map(vec![1, 2, 3], |x| x * 2) == vec![2, 4, 6], "exec order")?;
    Ok(format!("JSON {} bytes and CSV {} bytes identical", a.0.len(), a.1.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("toy reproduction", c1_toy),
        ("closed-form communication", c2_closed_form),
        ("lower-bound sandwich", c3_sandwich),
        ("quadratic vs linear separation", c4_separation),
        ("security oracle", c5_oracle),
        ("active adversaries", c6_adversaries),
        ("participant addition", c7_addition),
        ("fallback strategies", c8_fallback),
        ("randomness scaling", c9_randomness),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
