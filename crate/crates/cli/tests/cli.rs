use std::path::PathBuf;
use std::process::Command as Process;

use serde_json::Value;

fn repo(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel).display().to_string()
}

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dcov").chain(args.iter().copied());
    let code = dcov_cli::run_cli(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str], stdin: &str) -> Value {
    let (code, out, err) = run(args, stdin);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn strip_time(mut v: Value) -> String {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    serde_json::to_string(&v).unwrap()
}

fn validate(kind: &str, report: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{kind}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = v.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{kind}: {errors:?}\n{report}");
}

const FLAGS: &str = r#"{"beta":1.0,"x_beta":true,"y_beta":true,"xy_product":false,"x_2beta":false,"y_2beta":false,
"hx_l1":true,"hx_l2":true,"hy_l1":true,"hy_l2":true}"#;

#[test]
fn duplicated_columns_agree_across_methods() {
    let sample = repo("data/sample.csv");
    let c = run_json(&["dcov", "-i", &sample, "-x", "0:2", "-y", "x1,x2", "--method", "centered"], "");
    let d = run_json(&["dcov", "-i", &sample, "-x", "0:2", "-y", "x1,x2", "--method", "d1"], "");
    let (c, d) = (c["value"].as_f64().unwrap(), d["value"].as_f64().unwrap());
    assert!(c > 0.0 && (c - d).abs() <= 1e-9, "{c} {d}");
}

#[test]
fn constant_one_over_pi() {
    let v = run_json(&["constants", "--ell", "1", "--beta", "1"], "");
    assert!((v["value"].as_f64().unwrap() - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
    assert_eq!(format!("{:.10}", v["value"].as_f64().unwrap()), "0.3183098862");
}

#[test]
fn charfn_at_beta_two_is_a_domain_error() {
    let (code, _, err) = run(&["dcov", "-i", &repo("data/sample.csv"), "--method", "charfn", "--beta", "2"], "");
    assert_eq!(code, 3);
    assert!(err.contains("diverges"), "{err}");
    let (code, _, _) = run(&["dcov", "-i", &repo("data/sample.csv"), "--method", "beta2", "--beta", "1"], "");
    assert_eq!(code, 3);
}

#[test]
fn every_report_matches_its_schema() {
    let sample = repo("data/sample.csv");
    let joint = repo("data/joint_three_atom.csv");
    for method in ["d1", "centered", "hm", "exact"] {
        validate("dcov", &run_json(&["dcov", "-i", &sample, "-x", "0:3", "-y", "3:5", "--method", method], ""));
    }
    validate("dcov", &run_json(&["dcov", "-i", &sample, "-x", "0:3", "-y", "3:5", "--method", "beta2", "--beta", "2"], ""));
    validate("dcov", &run_json(&["dcov", "--joint", "-i", &joint, "--method", "charfn"], ""));
    validate(
        "dcov",
        &run_json(&["dcov", "--joint", "-i", &joint, "--method", "charrv", "--seed", "4", "--draws", "20", "--quad-tmax", "100"], ""),
    );
    validate("dcov", &run_json(&["dcov", "--joint", "-i", &joint, "--method", "exact", "--definition", "d2"], ""));
    validate("test", &run_json(&["test", "-i", &sample, "-x", "0", "-y", "3", "--seed", "1", "-B", "49"], ""));
    validate(
        "converge",
        &run_json(&["converge", "-i", &joint, "--sizes", "10,100", "--seeds", "1,2", "--format", "json"], ""),
    );
    validate("diag", &run_json(&["diag", "-i", &sample, "--cols", "x1,x2"], ""));
    validate("classify", &run_json(&["classify"], FLAGS));
    validate("moment_flags", &serde_json::from_str(FLAGS).unwrap());
    validate("constants", &run_json(&["constants", "--ell", "3", "--beta", "0.5"], ""));
    validate("demo", &run_json(&["demo"], ""));
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let sample = repo("data/sample.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["dcov", "-i", &sample, "-x", "0:3", "-y", "3:5", "--method", "centered"],
        vec!["dcov", "-i", &sample, "-x", "0", "-y", "3", "--method", "charrv", "--seed", "9", "--draws", "8", "--quad-tmax", "100", "--quad-points", "8"],
        vec!["test", "-i", &sample, "-x", "0:3", "-y", "3:5", "--seed", "5", "-B", "99"],
    ];
    for args in cases {
        let one: Vec<&str> = ["--threads", "1"].into_iter().chain(args.iter().copied()).collect();
        let many: Vec<&str> = ["--threads", "8"].into_iter().chain(args.iter().copied()).collect();
        let a = strip_time(run_json(&one, ""));
        assert_eq!(a, strip_time(run_json(&many, "")), "{args:?}");
        assert_eq!(a, strip_time(run_json(&one, "")));
    }
}

#[test]
fn stdin_input_and_csv_trace() {
    let data = "x,y,prob\n0,0,0.5\n1,1,0.5\n";
    let (code, out, err) = run(&["converge", "--sizes", "100,1000", "--seeds", "1,2,3"], data);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,median_estimate,median_abs_error,max_abs_error,population"));
    assert_eq!(lines.count(), 2);
    let v = run_json(&["dcov", "--joint", "--method", "exact"], data);
    assert_eq!(v["value"].as_f64(), Some(0.25));
}

#[test]
fn input_errors_name_the_location() {
    let (code, _, err) = run(&["dcov"], "a,b\n1,2\n3,x\n4,5\n");
    assert_eq!(code, 1);
    assert!(err.contains("row 2, column 1"), "{err}");
    let (code, _, err) = run(&["dcov", "-x", "a", "-y", "missing"], "a,b\n1,2\n");
    assert_eq!(code, 1);
    assert!(err.contains("missing"), "{err}");
    let (code, _, _) = run(&["dcov", "-i", "/nonexistent/file.csv"], "");
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["dcov", "--method", "bogus"], "").0, 2);
    assert_eq!(run(&["test", "-i", &repo("data/sample.csv")], "").0, 2);
    assert_eq!(run(&["converge", "-i", &repo("data/joint_bernoulli.csv")], "").0, 2);
    assert_eq!(run(&["dcov", "--beta", "-1"], "a,b\n1,2\n").0, 2);
    assert_eq!(run(&["dcov", "--format", "csv"], "a,b\n1,2\n").0, 2);
    assert_eq!(run(&["--help"], "").0, 0);
}

#[test]
fn inconsistent_flags_are_domain_errors() {
    let bad = FLAGS.replace(r#""hx_l1":true"#, r#""hx_l1":false"#);
    assert_eq!(run(&["classify"], &bad).0, 3);
    let v = run_json(&["classify"], FLAGS);
    assert_eq!(v["report"]["d1"], "undefined");
    assert_eq!(v["report"]["d2"], "finite");
}

#[test]
fn binary_honours_thread_env_and_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_dcov");
    let out = Process::new(exe)
        .args(["dcov", "-i", &repo("data/sample.csv"), "-x", "0", "-y", "3"])
        .env("DCOV_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Process::new(exe).args(["dcov", "--method", "charfn", "--beta", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Process::new(exe).args(["demo", "--format", "csv"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}
