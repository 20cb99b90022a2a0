use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn sneak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sneak"))
        .args(args)
        .env_remove("SNEAK_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn exact(v: &Value) -> &str {
    v["exact"].as_str().unwrap()
}

#[test]
fn toy_both_algorithms() {
    let out = sneak(&["run", "--gen", "toy", "--k", "2", "--d", "2", "--algo", "both"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(exact(&doc["sneak"]["total_units"]), "12");
    assert_eq!(exact(&doc["sota"]["total_units"]), "24");
    assert_eq!(doc["sneak"]["randomness_draws"], 2);
    assert_eq!(doc["sota"]["randomness_draws"], 5);
    assert_eq!(doc["seed"], 0);
    assert_eq!(doc["graph_digest"].as_str().unwrap().len(), 64);
    assert_eq!(doc["params"]["k"], 2);
}

#[test]
fn bounds_examples() {
    let toy = json(&sneak(&["bounds", "--gen", "toy", "--k", "2", "--d", "2"]));
    assert_eq!(exact(&toy["bounds"]["graph_lower_sum"]), "49/6");
    let star = json(&sneak(&["bounds", "--gen", "star", "--n", "9", "--k", "2", "--d", "2"]));
    assert_eq!(exact(&star["bounds"]["graph_lower_sum"]), "9");
}

#[test]
fn window_baseline_is_quadratic() {
    let out = sneak(&["run", "--gen", "window", "--n", "64", "--d", "2", "--a", "2", "--k", "2", "--algo", "sota"]);
    assert!(out.status.success());
    let total = json(&out)["sota"]["total_units"]["approx"].as_f64().unwrap();
    assert!(total >= 520.0, "{total}");
}

#[test]
fn graph_file_with_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig9.txt");
    let text = "10 2 undirected\nD 1\nD 2\n1 3\n1 4\n2 3\n2 4\n3 5\n3 6\n4 5\n4 6\n5 7\n5 8\n6 7\n7 9\n7 10\n8 9\n8 10\n";
    fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap();
    let stalled = sneak(&["run", "--graph", p, "--d", "2"]);
    assert_eq!(stalled.status.code(), Some(3));
    assert_eq!(json(&stalled)["sneak"]["stalled"], serde_json::json!([8, 9, 10]));
    let out = sneak(&["run", "--graph", p, "--k", "2", "--d", "2", "--fallback", "local"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["sneak"]["delivered"].as_array().unwrap().len(), 10);
    assert_eq!(exact(&doc["sneak"]["fallback_cost_units"]), "8");
    assert!(!doc["sneak"]["fallback_log"].as_array().unwrap().is_empty());
}

#[test]
fn invalid_params_exit_two_with_diagnostic() {
    let out = sneak(&["run", "--gen", "toy", "--k", "3", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "invalid_params");
    let missing = sneak(&["run", "--d", "2", "--k", "2"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn verify_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, "4 2 undirected\nD 1\nD 2\n1 3\n2 3\n1 4\n3 4\n").unwrap();
    let p = path.to_str().unwrap();
    let ok = sneak(&["verify", "--graph", p, "--d", "2", "--q", "5"]);
    assert!(ok.status.success());
    let doc = json(&ok);
    assert_eq!(doc["verdict"], "PASS");
    let subsets = doc["results"][0]["secrecy"]["subsets"].as_array().unwrap();
    assert_eq!(subsets.len(), 4);
    assert_eq!(subsets[0]["verdict"], "PASS");

    let leak = sneak(&["verify", "--graph", p, "--d", "2", "--q", "5", "--budget", "2"]);
    assert_eq!(leak.status.code(), Some(4));
    assert!(json(&leak)["results"][0]["secrecy"]["counterexample"].is_object());

    let ramp = sneak(&["verify", "--graph", p, "--k", "3", "--d", "3", "--ell", "1", "--q", "5"]);
    assert!(ramp.status.success());

    let big = sneak(&["verify", "--graph", p, "--d", "2", "--q", "5", "--max-enum", "10"]);
    assert_eq!(big.status.code(), Some(2));
}

#[test]
fn identical_flags_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let out = dir.path().join(format!("{tag}.json"));
        let trace = dir.path().join(format!("{tag}.csv"));
        let status = sneak(&[
            "run", "--gen", "random", "--n", "30", "--k", "2", "--d", "3", "--seed", "42", "--algo",
            "both", "--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap(),
        ])
        .status;
        assert!(status.success());
        (fs::read(out).unwrap(), fs::read(trace).unwrap())
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let header = String::from_utf8(a.1).unwrap();
    assert!(header.starts_with("algorithm,tick,src,dst,payload_len,kind\nsneak,0,D,"));

    let other = sneak(&["run", "--gen", "random", "--n", "30", "--k", "2", "--d", "3", "--seed", "43"]);
    assert_ne!(json(&other)["secret"], serde_json::from_slice::<Value>(&a.0).unwrap()["secret"]);
}

#[test]
fn seed_from_environment() {
    let flag = sneak(&["run", "--gen", "toy", "--k", "2", "--d", "2", "--seed", "9"]);
    let env = Command::new(env!("CARGO_BIN_EXE_sneak"))
        .args(["run", "--gen", "toy", "--k", "2", "--d", "2"])
        .env("SNEAK_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(json(&env)["seed"], 9);
}

fn scaling_rows(args: &[&str]) -> Vec<(f64, f64, f64)> {
    let out = sneak(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (n, s, b) = (col("n"), col("sneak_units"), col("sota_units"));
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            (r[n].parse().unwrap(), r[s].parse().unwrap(), r[b].parse().unwrap())
        })
        .collect()
}

#[test]
fn scaling_window_and_star() {
    let rows = scaling_rows(&["scaling", "--family", "window", "--sizes", "16,32,64,128", "--k", "2", "--d", "2"]);
    assert_eq!(rows.len(), 4);
    let mut last = 0.0;
    for (n, sneak_units, sota_units) in rows {
        assert_eq!(sneak_units / n, 2.0);
        assert!(sota_units / n > last);
        last = sota_units / n;
    }
    let star = scaling_rows(&["scaling", "--family", "star", "--sizes", "8,16", "--k", "2", "--d", "2", "--reps", "2"]);
    assert_eq!(star.len(), 4);
    for (n, sneak_units, sota_units) in star {
        // Dealer neighbours take full node data: d/(d-k+1) = 2 units each.
        assert_eq!(sneak_units, 2.0 * n);
        assert_eq!(sota_units, n);
    }
}

#[test]
fn scaling_parallel_matches_sequential() {
    let args = ["scaling", "--family", "random", "--sizes", "20,40", "--reps", "2", "--k", "2", "--d", "3"];
    let a = sneak(&args);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let b = sneak(&seq);
    assert_eq!(a.stdout, b.stdout);
}
