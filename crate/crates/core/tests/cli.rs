use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use regcalc::cli::main_with_args;
use regcalc::exactnum::{ExtRat, Rational};
use regcalc::spaces::SpaceDescriptor;
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    root().join("tests/fixtures").join(name).display().to_string()
}

fn golden(name: &str) -> PathBuf {
    root().join("tests/golden").join(name)
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regcalc")).args(args).output().unwrap()
}

/// Runs in-process; returns (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with_args(std::iter::once("regcalc").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn validator(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schema").join(name)).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{doc:#}");
}

#[test]
fn case_commands_match_golden_text() {
    for (args, file) in [
        (vec!["case", "poisson", "--d", "2", "--p", "2"], "case_poisson.txt"),
        (vec!["case", "ppoisson", "--d", "2", "--p", "3/2", "--sbar", "8/5"], "case_ppoisson.txt"),
        (
            vec!["case", "stokes", "--d", "3", "--eps", "1", "--sigma", "1/2", "--sbar2", "3/2", "--component", "velocity"],
            "case_stokes.txt",
        ),
    ] {
        let out = bin(&args);
        assert!(out.status.success());
        let expected = std::fs::read_to_string(golden(file)).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), expected, "{args:?}");
    }
}

#[test]
fn embed_verdict_text() {
    let (code, out, _) = run(&["embed", "B^{2}_{2,2}", "B^{1}_{4,4}", "--d", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("Embeds [rule iv]"));
    let (_, out, _) = run(&["embed", "F^{1}_{2,3}", "B^{1}_{2,2}", "--d", "2"]);
    assert_eq!(out.trim(), "NotEmbeds [rule i]");
    let (_, out, _) = run(&["embed", "B^{1}_{2,2}", "B^{1}_{2,1}", "--d", "2"]);
    assert_eq!(out.trim(), "Unknown");
    let (code, _, err) = run(&["embed", "B^{1}_{2,", "B^{1}_{2,1}", "--d", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("position"), "{err}");
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["embed", "B^{1}_{2,2}", "B^{1}_{2,1}", "--d", "2"]).status.code(), Some(0));
    assert_eq!(bin(&["case", "poisson", "--d", "1", "--p", "2"]).status.code(), Some(2));
    assert_eq!(bin(&["case", "poisson", "--d", "2", "--p", "x"]).status.code(), Some(2));
    assert_eq!(bin(&["case", "ppoisson", "--d", "2", "--p", "3/2", "--sbar", "1"]).status.code(), Some(2));
    let out = bin(&["profile", &fixture("inconsistent_profile.json")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("z ≤ s̄_p ≤ ᾱ_p"));
    let out = bin(&["profile", &fixture("malformed_profile.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("position 2"));
    assert_eq!(bin(&["profile", "/nonexistent/profile.json"]).status.code(), Some(2));
    let out = bin(&["bound", "alpha", "--d", "2", "--p", "2", "--sbar", "3/2", "--pz", "4", "--z", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bound_subcommands() {
    let (_, out, _) = run(&["bound", "alpha", "--d", "2", "--p", "2", "--sbar", "3/2", "--pz", "4", "--z", "5/4"]);
    assert_eq!(out.trim(), "ᾱ_p ≤ 3");
    let (_, out, _) = run(&["bound", "alpha", "--d", "2", "--p", "2", "--sbar", "3/2", "--pz", "4", "--z", "1"]);
    assert_eq!(out.trim(), "no bound: z ≤ μ = 1");
    let (_, out, _) = run(&[
        "bound", "alpha", "--d", "2", "--p", "2", "--sbar", "3/2", "--pz", "4", "--z", "5/4", "--decimal",
    ]);
    assert_eq!(out.trim(), "ᾱ_p ≤ 3 (≈ 3)");
    let (_, out, _) = run(&["bound", "s-lower", "--d", "2", "--alpha", "3", "--p", "2", "--pz", "4", "--z", "5/4"]);
    assert_eq!(out.trim(), "s̄_p ≥ 3/2");
    let (_, out, _) = run(&[
        "bound", "s-transfer", "--sbar", "3/2", "--p", "2", "--z", "5/2", "--pz", "2/3", "--phat", "4",
    ]);
    assert_eq!(out.trim(), "s̄_p̂ ≤ 5/4");
    let (_, out, _) = run(&["case", "ppoisson", "--d", "2", "--p", "3/2", "--sbar", "3/2", "--decimal"]);
    assert_eq!(out.trim(), "case 1: ᾱ_p ≤ 3/2  (≈ 1.5)");
}

#[test]
fn interpolate_command() {
    let (code, out, _) = run(&["interpolate", "B^{0}_{2,2}", "B^{2}_{4,4}", "--theta", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "B^{1}_{8/3,8/3}");
    let (code, _, _) = run(&["interpolate", "B^{0}_{2,2}", "F^{2}_{4,4}", "--theta", "1/2"]);
    assert_eq!(code, 2);
}

#[test]
fn profile_report_for_the_poisson_fixture() {
    let (code, out, _) = run(&["profile", &fixture("poisson_profile.json")]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&out).unwrap();
    let results = report["results"].as_array().unwrap();
    assert_eq!(results[0]["limit_s"], "3/2");
    assert_eq!(results[1]["limit_alpha"], "3");
    assert_eq!(results[2]["alpha_upper"]["value"], "3");
    assert_eq!(results[3]["s_lower"], "3/2");
    assert_eq!(out, std::fs::read_to_string(golden("poisson_profile.json")).unwrap());

    let (_, out, _) = run(&["profile", &fixture("empty_profile.json")]);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["results"][0]["limit_s"], "-inf");
}

#[test]
fn profile_writes_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let svg = dir.path().join("profile.svg");
    let (code, out, _) = run(&[
        "profile",
        &fixture("poisson_profile.json"),
        "--out",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(
        std::fs::read_to_string(&json).unwrap(),
        std::fs::read_to_string(golden("poisson_profile.json")).unwrap()
    );
    assert_eq!(
        std::fs::read_to_string(&svg).unwrap(),
        std::fs::read_to_string(golden("poisson_profile.svg")).unwrap()
    );
}

#[test]
fn reports_are_schema_valid() {
    let profile = validator("profile-report.schema.json");
    for name in ["poisson_profile.json", "empty_profile.json"] {
        let (code, out, _) = run(&["profile", &fixture(name)]);
        assert_eq!(code, 0);
        assert_valid(&profile, &serde_json::from_str(&out).unwrap());
    }
    let case = validator("case-report.schema.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["case", "poisson", "--d", "2", "--p", "2"],
        vec!["case", "poisson", "--d", "5", "--p", "4/3"],
        vec!["case", "ppoisson", "--d", "2", "--p", "3/2", "--sbar", "8/5"],
        vec!["case", "ppoisson", "--d", "3", "--p", "3/2", "--sbar", "5/3"],
        vec!["case", "stokes", "--d", "3", "--eps", "1", "--sigma", "1/2", "--sbar2", "3/2"],
        vec!["case", "stokes", "--d", "3", "--eps", "1", "--sigma", "1/2", "--sbar2", "3"],
        vec!["case", "stokes", "--d", "2", "--eps", "1/2", "--sigma", "1", "--sbar2", "3/5", "--component", "pressure"],
        vec!["case", "stokes", "--d", "3", "--eps", "1", "--sigma", "1/2", "--chain-p", "4", "--chain-s", "1/2"],
    ];
    for mut args in runs {
        args.push("--json");
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert_valid(&case, &serde_json::from_str(&out).unwrap());
    }
    // The schema rejects a report with a malformed rational.
    let (_, out, _) = run(&["case", "poisson", "--d", "2", "--p", "2", "--json"]);
    let mut doc: Value = serde_json::from_str(&out).unwrap();
    doc["report"]["s_bar"] = Value::from("1.5");
    assert!(!case.is_valid(&doc));
}

fn svg_of(args: &[&str], dir: &Path, name: &str) -> String {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    full.push("--svg");
    let p = path.to_str().unwrap().to_string();
    full.push(&p);
    let (code, _, err) = run(&full);
    assert_eq!(code, 0, "{err}");
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn svg_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let poisson = ["case", "poisson", "--d", "2", "--p", "2"];
    let a = svg_of(&poisson, dir.path(), "a.svg");
    let b = svg_of(&poisson, dir.path(), "b.svg");
    assert_eq!(a, b);
    assert_eq!(a, std::fs::read_to_string(golden("case_poisson.svg")).unwrap());
    assert!(a.contains("1/ρ ↦ 1+1/ρ") && a.contains("1/ρ ↦ d(1/ρ − 1/p)"));

    let diagram = ["diagram", &fixture("diagram.json")];
    let diagram: Vec<&str> = diagram.iter().map(|s| s.as_ref()).collect();
    let c = svg_of(&diagram, dir.path(), "c.svg");
    assert_eq!(c, svg_of(&diagram, dir.path(), "d.svg"));
    assert_eq!(c, std::fs::read_to_string(golden("diagram.svg")).unwrap());

    for args in [
        vec!["case", "ppoisson", "--d", "2", "--p", "3/2", "--sbar", "8/5"],
        vec!["case", "stokes", "--d", "3", "--eps", "1", "--sigma", "1/2", "--sbar2", "3/2"],
    ] {
        assert_eq!(svg_of(&args, dir.path(), "e.svg"), svg_of(&args, dir.path(), "f.svg"));
    }
}

#[test]
fn diagram_viewport_must_contain_the_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(
        &spec,
        r#"{"dimension": 2, "points": [{"x": "5", "y": "1"}],
            "viewport": {"xMin": "0", "xMax": "4", "yMin": "0", "yMax": "5"}}"#,
    )
    .unwrap();
    let (code, _, err) = run(&["diagram", spec.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("viewport"), "{err}");
}

proptest! {
    #[test]
    fn printed_rationals_reparse(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = ExtRat::from(Rational::new(n.into(), d.into()));
        prop_assert_eq!(q.to_string().parse::<ExtRat>().unwrap(), q);
    }

    #[test]
    fn printed_descriptors_reparse(
        kind in 0..2u8, sn in -50i64..50, sd in 1i64..12,
        pn in 0i64..20, pd in 1i64..20, qn in 0i64..20, qd in 1i64..20, boundary in any::<bool>(),
    ) {
        let (s, inv_p, inv_q) = (
            Rational::new(sn.into(), sd.into()),
            Rational::new(pn.into(), pd.into()),
            Rational::new(qn.into(), qd.into()),
        );
        let built = if kind == 0 {
            SpaceDescriptor::besov(s, inv_p, inv_q)
        } else {
            SpaceDescriptor::triebel(s, inv_p, inv_q)
        };
        if let Ok(mut sp) = built {
            if boundary {
                sp = sp.on_boundary();
            }
            prop_assert_eq!(sp.to_string().parse::<SpaceDescriptor>().unwrap(), sp);
        }
    }
}
