use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sneak_core::baseline::run_sota;
use sneak_core::bounds::{bounds_report, graph_communication_lower, sota_superlinear_lower, BoundsReport};
use sneak_core::encoding::{SecretVector, SharingParams};
use sneak_core::exec::Exec;
use sneak_core::field::FieldSpec;
use sneak_core::generators::{
    fixtures, gen_geometric_1d, gen_layered, gen_random_propagating, gen_regular_nonneighbor,
    gen_star, gen_window,
};
use sneak_core::graph::{parse_graph, Network};
use sneak_core::oracle::{
    verify_collusion_resistance, verify_recovery, OracleConfig, Outcome, RecoveryReport, Target,
    UniformityReport,
};
use sneak_core::protocol::{run_sneak, Corruption, Fallback, SneakOptions};
use sneak_core::random::RngSource;
use sneak_core::report::{Message, RunReport};

use crate::args::{
    Algo, BoundsArgs, CorruptionArg, FallbackArg, Family, GraphArgs, ParamArgs, RunArgs,
    ScalingArgs, VerifyArgs,
};
use crate::{CliError, EXIT_ORACLE_FAIL, EXIT_UNDELIVERED};

type Result<T> = std::result::Result<T, CliError>;

/// Everything needed to build one member of a family.
struct FamilySpec<'a> {
    family: Family,
    n: Option<usize>,
    m: usize,
    a: usize,
    b: Option<usize>,
    layers: &'a [usize],
    positions: &'a [f64],
    radius: Option<f64>,
    directed: bool,
    seed: u64,
}

fn need<T>(v: Option<T>, flag: &str, family: Family) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("family {family:?} needs --{flag}")))
}

fn generate(s: &FamilySpec<'_>) -> Result<Network> {
    let f = s.family;
    let net = match f {
        Family::Toy => fixtures::toy(),
        Family::Fig9 => fixtures::fig9(),
        Family::Star => gen_star(need(s.n, "n", f)?),
        Family::Layered => {
            let layers = if s.layers.is_empty() {
                let n = need(s.n, "n or --layers", f)?;
                let width = s.m.max(1);
                let mut out = vec![width; n / width];
                if n % width != 0 {
                    out.push(n % width);
                }
                out
            } else {
                s.layers.to_vec()
            };
            gen_layered(&layers, s.m, s.directed)?.network
        }
        Family::Window => gen_window(need(s.n, "n", f)?, s.m, s.a, s.seed)?.network,
        Family::Random => gen_random_propagating(need(s.n, "n", f)?, s.m, s.seed, s.directed)?.network,
        Family::Geometric => {
            if s.positions.is_empty() {
                let n = need(s.n, "n or --positions", f)?;
                let pos: Vec<f64> = (0..=n).map(|i| i as f64).collect();
                gen_geometric_1d(&pos, s.radius.unwrap_or(s.m as f64))?.network
            } else {
                gen_geometric_1d(s.positions, need(s.radius, "radius", f)?)?.network
            }
        }
        Family::Regular => {
            let b = s.b.unwrap_or(s.m + 2);
            gen_regular_nonneighbor(need(s.n, "n", f)?, b, s.m, s.seed)?.network
        }
    };
    Ok(net)
}

struct Source {
    net: Network,
    k_hint: usize,
    label: String,
}

fn load_graph(g: &GraphArgs, p: &ParamArgs) -> Result<Source> {
    if let Some(path) = &g.graph {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let (net, k_hint) = parse_graph(&text)?;
        return Ok(Source {
            net,
            k_hint,
            label: path.display().to_string(),
        });
    }
    let family = g
        .gen
        .ok_or_else(|| CliError::Usage("one of --graph or --gen is required".into()))?;
    let spec = FamilySpec {
        family,
        n: g.n,
        m: g.m.unwrap_or(p.d + 2 * p.t),
        a: g.a,
        b: g.b,
        layers: &g.layers,
        positions: &g.positions,
        radius: g.radius,
        directed: g.directed,
        seed: g.graph_seed.unwrap_or(p.seed),
    };
    Ok(Source {
        net: generate(&spec)?,
        k_hint: 0,
        label: format!("gen:{family:?}").to_lowercase(),
    })
}

fn build_params(p: &ParamArgs, n: usize, k_hint: usize) -> Result<SharingParams> {
    let k = match (p.k, k_hint) {
        (Some(k), _) => k,
        (None, h) if h > 0 => h,
        _ => return Err(CliError::Usage("--k is required".into())),
    };
    let spec = match p.q {
        Some(q) => FieldSpec::new(q)?,
        None => FieldSpec::smallest_above(n as u64)?,
    };
    let mut params = SharingParams::new(n, k, p.d, spec)?;
    if let Some(ell) = p.ell {
        params = params.with_ell(ell)?;
    }
    params = params.with_adversaries(p.t)?;
    if p.degree_cap {
        params = params.with_degree_cap(true)?;
    }
    Ok(params)
}

fn protocol_rng(seed: u64) -> RngSource<ChaCha8Rng> {
    RngSource(ChaCha8Rng::seed_from_u64(seed))
}

/// Secrets come from their own stream so they never shift the protocol's draws.
fn secret_rng(seed: u64) -> RngSource<ChaCha8Rng> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(1);
    RngSource(r)
}

fn fallback_of(f: FallbackArg) -> Fallback {
    match f {
        FallbackArg::None => Fallback::None,
        FallbackArg::Naive => Fallback::Naive,
        FallbackArg::Dealer => Fallback::DealerToBottleneck,
        FallbackArg::Local => Fallback::LocalRelay,
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct RunDoc<'a> {
    command: &'static str,
    seed: u64,
    graph: &'a str,
    graph_digest: String,
    params: &'a SharingParams,
    secret: Vec<u64>,
    sneak: Option<RunReport>,
    sota: Option<RunReport>,
}

#[derive(Serialize)]
struct TraceRow<'a> {
    algorithm: &'a str,
    tick: u64,
    src: String,
    dst: String,
    payload_len: usize,
    kind: &'static str,
}

fn token(v: usize) -> String {
    if v == sneak_core::graph::DEALER {
        "D".into()
    } else {
        v.to_string()
    }
}

fn write_trace(path: &Path, runs: &[(&str, &[Message])]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (algo, msgs) in runs {
        for m in *msgs {
            w.serialize(TraceRow {
                algorithm: algo,
                tick: m.tick,
                src: token(m.src),
                dst: token(m.dst),
                payload_len: m.payload.len(),
                kind: m.kind.as_str(),
            })?;
        }
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn run(a: RunArgs) -> Result<u8> {
    let src = load_graph(&a.graph, &a.params)?;
    let params = build_params(&a.params, src.net.n(), src.k_hint)?;
    let seed = a.params.seed;
    let mut srng = secret_rng(seed);
    let secret = if a.secret.is_empty() {
        SecretVector::random(&params, &mut srng)
    } else if a.secret.len() != params.secret_len() {
        return Err(CliError::Usage(format!(
            "--secret needs {} entries, got {}",
            params.secret_len(),
            a.secret.len()
        )));
    } else {
        SecretVector::from_values(&a.secret, params.spec)
    };
    let baseline_len = params.d - params.k + 1;
    let baseline_secret = if baseline_len == params.secret_len() {
        secret.clone()
    } else {
        let mut draws = Vec::with_capacity(baseline_len);
        for _ in 0..baseline_len {
            draws.push(sneak_core::random::RandomSource::draw(&mut srng, params.spec));
        }
        SecretVector::new(draws)
    };

    let mut traces: Vec<(&str, Vec<Message>)> = Vec::new();
    let mut status = 0;
    let sneak = if matches!(a.algo, Algo::Sneak | Algo::Both) {
        let opts = SneakOptions {
            fallback: fallback_of(a.fallback),
            adversaries: a.adversaries.iter().copied().collect::<BTreeSet<_>>(),
            corruption: match a.corruption {
                CorruptionArg::Offset => Corruption::Offset(1),
                CorruptionArg::Zero => Corruption::Zero,
                CorruptionArg::Random => Corruption::Random,
            },
            corruption_seed: seed,
            ..SneakOptions::default()
        };
        let mut run = run_sneak(&src.net, &params, &secret, protocol_rng(seed), &opts)?;
        run.report.seed = Some(seed);
        if !run.report.honest_delivered() {
            status = EXIT_UNDELIVERED;
        }
        traces.push(("sneak", run.transcript));
        Some(run.report)
    } else {
        None
    };
    let sota = if matches!(a.algo, Algo::Sota | Algo::Both) {
        let mut run = run_sota(&src.net, &params, &baseline_secret, &mut protocol_rng(seed))?;
        run.report.seed = Some(seed);
        traces.push(("sota", run.transcript));
        Some(run.report)
    } else {
        None
    };

    if let Some(path) = &a.trace {
        let view: Vec<(&str, &[Message])> = traces.iter().map(|(n, t)| (*n, t.as_slice())).collect();
        write_trace(path, &view)?;
    }
    let doc = RunDoc {
        command: "run",
        seed,
        graph: &src.label,
        graph_digest: src.net.digest(),
        params: &params,
        secret: secret.values(),
        sneak,
        sota,
    };
    emit(a.out.as_deref(), &to_json(&doc))?;
    Ok(status)
}

#[derive(Serialize)]
struct BoundsDoc<'a> {
    command: &'static str,
    seed: u64,
    graph: &'a str,
    graph_digest: String,
    params: &'a SharingParams,
    bounds: BoundsReport,
}

pub fn bounds(a: BoundsArgs) -> Result<u8> {
    let src = load_graph(&a.graph, &a.params)?;
    let params = build_params(&a.params, src.net.n(), src.k_hint)?;
    let doc = BoundsDoc {
        command: "bounds",
        seed: a.params.seed,
        graph: &src.label,
        graph_digest: src.net.digest(),
        params: &params,
        bounds: bounds_report(&src.net, &params),
    };
    emit(a.out.as_deref(), &to_json(&doc))?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyResult {
    algorithm: Target,
    secrecy: UniformityReport,
    recovery: RecoveryReport,
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    command: &'static str,
    seed: u64,
    graph: &'a str,
    graph_digest: String,
    params: &'a SharingParams,
    budget: usize,
    max_enum: u128,
    verdict: Outcome,
    results: Vec<VerifyResult>,
}

pub fn verify(a: VerifyArgs) -> Result<u8> {
    let src = load_graph(&a.graph, &a.params)?;
    let params = build_params(&a.params, src.net.n(), src.k_hint)?;
    let budget = a.budget.unwrap_or(params.ell);
    let cfg = OracleConfig {
        max_enum: a.max_enum,
        exec: if a.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let mut targets = Vec::new();
    if matches!(a.algo, Algo::Sneak | Algo::Both) {
        targets.push(Target::Sneak(fallback_of(a.fallback)));
    }
    if matches!(a.algo, Algo::Sota | Algo::Both) {
        targets.push(Target::Sota);
    }
    let mut results = Vec::new();
    for t in targets {
        let secrecy = verify_collusion_resistance(&src.net, &params, budget, t, &cfg)?;
        let recovery = verify_recovery(&src.net, &params, t, &cfg, a.samples, a.params.seed)?;
        results.push(VerifyResult {
            algorithm: t,
            secrecy,
            recovery,
        });
    }
    let pass = results
        .iter()
        .all(|r| r.secrecy.passed() && r.recovery.verdict == Outcome::Pass);
    let doc = VerifyDoc {
        command: "verify",
        seed: a.params.seed,
        graph: &src.label,
        graph_digest: src.net.digest(),
        params: &params,
        budget,
        max_enum: a.max_enum,
        verdict: if pass { Outcome::Pass } else { Outcome::Fail },
        results,
    };
    emit(a.out.as_deref(), &to_json(&doc))?;
    Ok(if pass { 0 } else { EXIT_ORACLE_FAIL })
}

#[derive(Serialize)]
struct ScalingRow {
    family: String,
    n: usize,
    rep: usize,
    seed: u64,
    graph_digest: String,
    k: usize,
    d: usize,
    sneak_units: f64,
    sota_units: f64,
    lower_bound: f64,
    superlinear_lower: Option<f64>,
    sneak_exact: String,
    sota_exact: String,
    lower_exact: String,
    sneak_draws: usize,
    sota_draws: usize,
}

fn scaling_row(a: &ScalingArgs, n: usize, rep: usize) -> Result<ScalingRow> {
    let seed = a.seed.wrapping_add(rep as u64);
    let spec = FamilySpec {
        family: a.family,
        n: Some(n),
        m: a.m.unwrap_or(a.d),
        a: a.a,
        b: a.b,
        layers: &[],
        positions: &[],
        radius: None,
        directed: a.directed,
        seed,
    };
    let net = generate(&spec)?;
    let params = SharingParams::new(net.n(), a.k, a.d, FieldSpec::smallest_above(net.n() as u64)?)?;
    let secret = SecretVector::random(&params, &mut secret_rng(seed));
    let sneak = run_sneak(&net, &params, &secret, protocol_rng(seed), &SneakOptions::default())?;
    if !sneak.report.all_delivered() {
        return Err(CliError::Usage(format!(
            "n={n} rep={rep}: flood stalled at {:?}",
            sneak.report.stalled
        )));
    }
    let sota = run_sota(&net, &params, &secret, &mut protocol_rng(seed))?;
    let (lower, _) = graph_communication_lower(&net, &params);
    Ok(ScalingRow {
        family: format!("{:?}", a.family).to_lowercase(),
        n: net.n(),
        rep,
        seed,
        graph_digest: net.digest(),
        k: a.k,
        d: a.d,
        sneak_units: sneak.report.total_units.to_f64(),
        sota_units: sota.report.total_units.to_f64(),
        lower_bound: lower.to_f64(),
        superlinear_lower: sota_superlinear_lower(net.n(), net.max_out_degree()).ok(),
        sneak_exact: sneak.report.total_units.to_string(),
        sota_exact: sota.report.total_units.to_string(),
        lower_exact: lower.to_string(),
        sneak_draws: sneak.report.randomness_draws,
        sota_draws: sota.report.randomness_draws,
    })
}

pub fn scaling(a: ScalingArgs) -> Result<u8> {
    if a.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let jobs: Vec<(usize, usize)> = a
        .sizes
        .iter()
        .flat_map(|&n| (0..a.reps).map(move |r| (n, r)))
        .collect();
    let exec = if a.sequential { Exec::Sequential } else { Exec::Parallel };
    let rows: Vec<Result<ScalingRow>> = exec.map(jobs, |(n, r)| scaling_row(&a, n, r));
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row?)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    emit(a.out.as_deref(), &String::from_utf8(bytes).expect("csv is utf-8"))?;
    Ok(0)
}
