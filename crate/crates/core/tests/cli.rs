use std::path::PathBuf;

use serde_json::Value;

fn diagram(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", "diagrams", name].iter().collect();
    p.to_string_lossy().into_owned()
}

struct Output {
    code: i32,
    json: Value,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["atemporal"];
    full.extend_from_slice(args);
    let code = atemporal::cli::run(full, &mut out, &mut err);
    let text = String::from_utf8(out).unwrap();
    Output {
        code,
        json: serde_json::from_str(&text).unwrap_or(Value::Null),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn approx(v: &Value, x: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - x).abs() < tol
}

#[test]
fn parse_lists_spaces_objects_and_edges() {
    let o = run(&["parse", &diagram("chain.diag")]);
    assert_eq!(o.code, 0);
    for key in ["spaces", "objects", "edges"] {
        assert!(o.json[key].is_array(), "{key}");
    }
}

#[test]
fn parse_errors_carry_category_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("space a 2\nobj m a+ q- = 1 0 0 1\n", "unknown-space"),
        ("space a 2\nobj m a+ = 1 0 0\n", "data-length"),
        ("space a 2\nspace a 3\n", "duplicate-name"),
        ("space a two\n", "syntax"),
        ("space a 2\nobj m a+ a- = 1 0 0 1\nedge m.1 m.3\n", "arity-mismatch"),
    ];
    for (k, (text, category)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{k}.diag"));
        std::fs::write(&path, text).unwrap();
        let o = run(&["parse", path.to_str().unwrap()]);
        assert_eq!(o.code, 2, "{text}");
        let e = &o.json["error"];
        assert_eq!(e["kind"], "parse");
        assert_eq!(e["category"], *category, "{text}");
        assert!(e["line"].as_u64().unwrap() >= 1);
        assert!(o.stderr.starts_with("error: "));
    }
}

#[test]
fn missing_file_is_an_input_error() {
    let o = run(&["parse", "/nonexistent/x.diag"]);
    assert_eq!(o.code, 1);
    assert_eq!(o.json["error"]["kind"], "input");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["census"]).code, 2);
    assert_eq!(run(&["no-such-command"]).code, 2);
}

#[test]
fn contract_plans_agree() {
    let g = run(&["contract", &diagram("chain.diag")]);
    let d = run(&["contract", &diagram("chain.diag"), "--plan", "decl"]);
    assert_eq!(g.code, 0);
    assert_eq!(d.code, 0);
    assert!(g.json["cost"].as_u64().unwrap() <= d.json["cost"].as_u64().unwrap());
    let (x, y) = (g.json["result"]["data"].as_array().unwrap(), d.json["result"]["data"].as_array().unwrap());
    assert_eq!(x.len(), y.len());
    for (p, q) in x.iter().zip(y) {
        for i in 0..2 {
            assert!((p[i].as_f64().unwrap() - q[i].as_f64().unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn schmidt_and_invert() {
    let s = run(&["schmidt", &diagram("partial.diag"), "--obj", "psi"]);
    assert_eq!(s.code, 0);
    assert_eq!(s.json["rank"], 2);
    assert!(approx(&s.json["coefficients"][0], 0.8f64.sqrt(), 1e-12));
    let i = run(&["invert", &diagram("partial.diag"), "--obj", "psi"]);
    assert_eq!(i.code, 0);
    assert!(i.json["residual"].as_f64().unwrap() < 1e-12);
    let missing = run(&["schmidt", &diagram("partial.diag"), "--obj", "nope"]);
    assert_eq!(missing.code, 1);
}

#[test]
fn kraus_rank_by_index_or_label() {
    for f in ["2", "f"] {
        let o = run(&["kraus-rank", &diagram("amplitude_damping.diag"), "--obj", "V", "--f-legs", f]);
        assert_eq!(o.code, 0);
        assert_eq!(o.json["kraus_rank"], 2);
        assert_eq!(o.json["dynamical_rank"], 2);
    }
}

#[test]
fn cp_check_verdicts() {
    let t = run(&["cp-check", &diagram("transition.diag"), "--obj", "transpose"]);
    assert_eq!(t.code, 0);
    assert_eq!(t.json["completely_positive"], false);
    assert!(approx(&t.json["min_eigenvalue"], -1.0, 1e-10));
    let d = run(&["cp-check", &diagram("transition.diag"), "--obj", "damping"]);
    assert_eq!(d.json["completely_positive"], true);
}

#[test]
fn teleport_bell_resource() {
    let o = run(&["teleport", "--resource", &diagram("bell.diag"), "--input", &diagram("input_plus.diag")]);
    assert_eq!(o.code, 0);
    assert!(approx(&o.json["min_fidelity"], 1.0, 1e-10));
    for q in o.json["q"].as_array().unwrap() {
        assert!(approx(q, 0.25, 1e-10));
    }
    let bad = run(&["teleport", "--resource", &diagram("partial.diag"), "--input", &diagram("input_plus.diag")]);
    assert_eq!(bad.code, 1);
    assert_eq!(bad.json["error"]["kind"], "domain");
}

#[test]
fn unambiguous_variants_reach_the_bound() {
    for variant in ["alice", "bob", "split"] {
        let o = run(&[
            "unambiguous",
            "--resource",
            &diagram("partial.diag"),
            "--variant",
            variant,
            "--input",
            &diagram("input_plus.diag"),
        ]);
        assert_eq!(o.code, 0, "{variant}");
        assert_eq!(o.json["variant"], variant);
        assert!(approx(&o.json["p_s"], 0.4, 1e-10));
        assert!(approx(&o.json["bound"], 0.4, 1e-10));
    }
}

#[test]
fn census_is_deterministic_and_verbose_goes_to_stderr() {
    let args = ["census", "--samples", "300", "--seed", "7", "--structured"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.json, b.json);
    assert!(a.stderr.is_empty());
    assert!(a.json["counts"].get("3").is_none());
    let total: u64 = a.json["counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 300 + 123);

    let mut full = vec!["--verbose"];
    full.extend_from_slice(&args);
    let v = run(&full);
    assert!(v.stderr.contains("gap violations 0"));
    assert_eq!(v.json, a.json);
}

#[test]
fn binary_runs() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_atemporal"))
        .args(["cp-check", &diagram("transition.diag"), "--obj", "damping"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["completely_positive"], true);
}
