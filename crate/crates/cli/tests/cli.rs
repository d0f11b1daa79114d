use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use courant_core::instances::{canonical_symplectic, hopf_chart, random_instance, random_iso, Defect};
use courant_core::Scalar;
use courant_kit::doc::{data_json, iso_json, structure_doc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_courant-kit"));
    c.env_remove("COURANT_KIT_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_doc(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    p
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["sections"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name:?} in {report:#}"))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn every_corpus_entry_passes() {
    for name in courant_kit::corpus::NAMES {
        let out = run(&["corpus", name]);
        assert_eq!(out.status.code(), Some(0), "{name}\n{}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn unknown_corpus_entry_is_an_input_error() {
    let out = run(&["corpus", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lemma-7param"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(3), 2, Defect::None).unwrap();
    let input = write_doc(dir.path(), "s.json", &structure_doc(&inst.data, &inst.components));
    let a = run(&["integrability", "--input", input.to_str().unwrap(), "--seed", "9", "--json", "-"]);
    let b = run(&["integrability", "--input", input.to_str().unwrap(), "--seed", "9", "--json", "-"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c1 = run(&["corpus", "dorfman-axioms", "--seed", "4", "--json", "-"]);
    let c2 = run(&["corpus", "dorfman-axioms", "--seed", "4", "--json", "-"]);
    assert_eq!(c1.stdout, c2.stdout);
}

#[test]
fn report_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let v = json!({ "form": [[1, 0], [0, -1]] });
    let input = write_doc(dir.path(), "f.json", &v);
    let bytes = std::fs::read(&input).unwrap();
    let (code, r) = json_report(&["signature", "--input", input.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["provenance"]["input_sha256"], courant_kit::sha256_hex(&bytes));
    assert_eq!(r["provenance"]["seed"], 5);
    assert_eq!(r["provenance"]["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["sections"][0]["values"]["signature"], json!([1, 1, 0]));
    assert!(r["sections"][0].get("elapsed_ms").is_none());
    let (_, t) = json_report(&["signature", "--input", input.to_str().unwrap(), "--timings"]);
    assert!(t["sections"][0]["elapsed_ms"].is_u64());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["corpus", "lemma-7param"]).env("COURANT_KIT_OUT", dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_slice(&std::fs::read(dir.path().join("corpus-lemma-7param.json")).unwrap()).unwrap();
    assert_eq!(written["status"], "pass");

    let input = write_doc(dir.path(), "f.json", &json!({ "metric": [[0, 1], [1, 0]] }));
    let out = bin().args(["signature", "--input", input.to_str().unwrap()]).env("COURANT_KIT_OUT", dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("signature.json").exists());
}

#[test]
fn json_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested/report.json");
    let out = run(&["corpus", "double-sl2", "--json", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("status: PASS"));
    let r: Value = serde_json::from_slice(&std::fs::read(target).unwrap()).unwrap();
    assert_eq!(r["command"], "corpus double-sl2");
}

#[test]
fn schema_violations_carry_json_pointers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (json!({ "chart": 2, "bogus": 1 }), ""),
        (json!({ "algebra": { "differentials": ["0", 12] } }), "/algebra"),
        (json!({ "metric": [[1, "x"], [0, 1]] }), "/metric/0/1"),
        (json!({ "gacs": { "J": [] } }), "/gacs"),
    ];
    for (k, (v, pointer)) in cases.iter().enumerate() {
        let input = write_doc(dir.path(), &format!("bad{k}.json"), v);
        let out = run(&["check-lie", "--input", input.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{v}");
        let err = stderr(&out);
        assert!(err.contains("schema violation at"), "{err}");
        assert!(err.contains(&format!("\"{}", pointer)), "{err}");
    }
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // not JSON
    let p = dir.path().join("x.json");
    std::fs::write(&p, "{").unwrap();
    assert_eq!(run(&["check-lie", "--input", p.to_str().unwrap()]).status.code(), Some(2));
    // missing file and missing --input
    assert_eq!(run(&["check-lie", "--input", "/nonexistent/in.json"]).status.code(), Some(2));
    assert_eq!(run(&["check-lie"]).status.code(), Some(2));
    // bad options
    let ok = write_doc(dir.path(), "ok.json", &json!({ "form": [[1]] }));
    assert_eq!(run(&["signature", "--input", ok.to_str().unwrap(), "--suite", "7"]).status.code(), Some(2));
    // wrong matrix shape, reported at the row
    let v = json!({ "algebra": { "differentials": ["0", "0", "12"] }, "metric": [[1, 0, 0], [0, 1]] });
    let input = write_doc(dir.path(), "shape.json", &v);
    let out = run(&["check-lie", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("\"/metric\""), "{}", stderr(&out));
    // unparsable polynomial
    let (d, c) = hopf_chart().unwrap();
    let mut v = structure_doc(&d, &c);
    v["gacs"]["B"][0][2] = json!("x1 * * x3");
    let input = write_doc(dir.path(), "poly.json", &v);
    let out = run(&["check-gacs", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/gacs/B/0/2"), "{}", stderr(&out));
    // point of the wrong length
    let out = run(&["check-gacs", "--input", input.to_str().unwrap(), "--point", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn math_failures_exit_1_and_name_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    // Jacobi fails for [e1,e2]=e3, [e2,e3]=e1 with [e1,e3]=e1
    let v = json!({ "algebra": { "dim": 3, "constants": [[1, 2, 3, 1], [2, 3, 1, 1], [1, 3, 1, 1]] } });
    let input = write_doc(dir.path(), "nj.json", &v);
    let (code, r) = json_report(&["check-lie", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(check(&r, "Jacobi identity")["status"], "fail");

    // metric that is not ad-invariant: the fiber precondition is named
    let (d, c) = hopf_chart().unwrap();
    let mut v = structure_doc(&d, &c);
    v["algebra"] = json!({ "dim": 2, "constants": [[1, 2, 2, 1]] });
    let input = write_doc(dir.path(), "ni.json", &v);
    let (code, r) = json_report(&["check-gacs", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
    let pre = check(&r, "preconditions");
    assert_eq!(pre["status"], "fail");
    assert!(pre["detail"].as_str().unwrap().contains("invariant"), "{pre}");

    // normal form of a non-integrable structure names the failing condition
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(1), 4, Defect::NonClosedOmega).unwrap();
    let input = write_doc(dir.path(), "nc.json", &structure_doc(&inst.data, &inst.components));
    let (code, r) = json_report(&["normal-form", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(check(&r, "preconditions")["detail"].as_str().unwrap().contains("B^-1 closed"));
}

#[test]
fn integrability_suites_agree_on_broken_input() {
    let dir = tempfile::tempdir().unwrap();
    for (k, defect) in [Defect::NonParallelA, Defect::NonClosedOmega].into_iter().enumerate() {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(k as u64), 4, defect).unwrap();
        let input = write_doc(dir.path(), "b.json", &structure_doc(&inst.data, &inst.components));
        let (code, r) = json_report(&["integrability", "--input", input.to_str().unwrap(), "--suite", "all"]);
        assert_eq!(code, 1);
        assert_eq!(check(&r, "18-relation suite")["status"], "fail");
        assert_eq!(check(&r, "10-relation suite {1-9, 12}")["status"], "fail");
        assert_eq!(check(&r, "Dorfman-Nijenhuis frame oracle")["status"], "fail");
        assert_eq!(check(&r, "suite verdicts agree")["status"], "pass");
        assert_ne!(check(&r, "Dorfman-Nijenhuis frame oracle")["residual"], "zero");
        for suite in ["18", "10", "oracle"] {
            let (code, _) = json_report(&["integrability", "--input", input.to_str().unwrap(), "--suite", suite]);
            assert_eq!(code, 1, "{suite}");
        }
    }
}

#[test]
fn parallel_scan_gives_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(6), 4, Defect::NonParallelA).unwrap();
    let input = write_doc(dir.path(), "p.json", &structure_doc(&inst.data, &inst.components));
    let (_, a) = json_report(&["integrability", "--input", input.to_str().unwrap(), "--suite", "18"]);
    let (_, b) = json_report(&["integrability", "--input", input.to_str().unwrap(), "--suite", "18", "--parallel"]);
    assert_eq!(a["sections"], b["sections"]);
}

#[test]
fn nondeg_modes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(2), 4, Defect::None).unwrap();
    let input = write_doc(dir.path(), "n.json", &structure_doc(&inst.data, &inst.components));
    let path = input.to_str().unwrap();
    let (code, r) = json_report(&["nondeg", "--input", path, "--complete"]);
    assert_eq!(code, 0);
    assert_eq!(check(&r, "completion reproduces /gacs")["status"], "pass");
    assert!(r["sections"][0]["checks"].as_array().unwrap().iter().all(|c| c["name"] != "d(B^-1) = 0"));
    let (code, r) = json_report(&["nondeg", "--input", path, "--check"]);
    assert_eq!(code, 0);
    assert_eq!(check(&r, "nondegenerate verdict")["status"], "pass");

    let bad = random_instance(&mut ChaCha8Rng::seed_from_u64(2), 4, Defect::NonClosedOmega).unwrap();
    let input = write_doc(dir.path(), "nb.json", &structure_doc(&bad.data, &bad.components));
    let (code, r) = json_report(&["nondeg", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(check(&r, "d(B^-1) = 0")["status"], "fail");
}

#[test]
fn ldata_points_from_flag_and_document() {
    let dir = tempfile::tempdir().unwrap();
    let (d, c) = hopf_chart().unwrap();
    let input = write_doc(dir.path(), "h.json", &structure_doc(&d, &c));
    let path = input.to_str().unwrap();
    let out = run(&["ldata", "--input", path]);
    assert_eq!(out.status.code(), Some(2), "points are required");
    let (code, r) = json_report(&["ldata", "--input", path, "--point", "1,0,1,0", "--point", "0,1/2,0,0"]);
    assert_eq!(code, 0);
    let values = r["sections"][0]["values"].as_object().unwrap();
    assert!(values.contains_key("L-data at (1,0,1,0)"));
    assert!(values.contains_key("L-data at (0,1/2,0,0)"));

    let (d, c) = canonical_symplectic(2, &Scalar::zero()).unwrap();
    let input = write_doc(dir.path(), "c.json", &structure_doc(&d, &c));
    let (code, r) = json_report(&["ldata", "--input", input.to_str().unwrap(), "--point", "3,-1"]);
    assert_eq!(code, 0);
    assert_eq!(check(&r, "gauge sigma = nu B^-1 gives epsilon = (B_J + i B^-1)/2 at (3,-1)")["status"], "pass");
}

#[test]
fn transport_and_normal_form() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (d, c) = canonical_symplectic(4, &Scalar::var(0)).unwrap();
    let iso = random_iso(&mut rng, 4);
    let mut v = structure_doc(&d, &c);
    v["iso"] = iso_json(&iso, d.bundle.chart().names());
    let input = write_doc(dir.path(), "t.json", &v);
    let (code, r) = json_report(&["transport", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 0, "{r:#}");
    assert_eq!(check(&r, "bracket intertwined on frame pairs")["status"], "pass");
    assert_eq!(check(&r, "integrability verdict preserved")["status"], "pass");

    // the transported structure feeds back into normal-form
    let sec = &r["sections"][0]["values"];
    let mut t = sec["transformed data"].clone();
    t["gacs"] = sec["transformed gacs"].clone();
    let input = write_doc(dir.path(), "t2.json", &t);
    let (code, r) = json_report(&["normal-form", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 0, "{r:#}");
    assert_eq!(r["sections"][0]["values"]["reduction is trivial"], false);

    // a broken K is a precondition failure
    let mut v = Value::Object(data_json(&d));
    let mut k = vec![vec![json!(0); 4]; 4];
    k[0][0] = json!(2);
    k[1][1] = json!(1);
    k[2][2] = json!(1);
    k[3][3] = json!(1);
    v["iso"] = json!({ "K": k, "Phi": vec![vec![0; 4]; 4], "beta": vec![vec![0; 4]; 4] });
    let input = write_doc(dir.path(), "t3.json", &v);
    let (code, r) = json_report(&["transport", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(check(&r, "preconditions")["status"], "fail");
}

#[test]
fn check_courant_detects_broken_h() {
    let dir = tempfile::tempdir().unwrap();
    let (d, _) = canonical_symplectic(4, &Scalar::zero()).unwrap();
    let mut v = Value::Object(data_json(&d));
    v["H"] = json!([{ "idx": [2, 3, 4], "value": "x1" }]);
    let input = write_doc(dir.path(), "h.json", &v);
    let (code, r) = json_report(&["check-courant", "--input", input.to_str().unwrap(), "--trials", "5"]);
    assert_eq!(code, 1);
    assert_eq!(check(&r, "dH = <R ^ R>")["status"], "fail");
    assert_eq!(check(&r, "Jacobi identity (frame triples)")["status"], "fail");
    assert_eq!(check(&r, "Leibniz rule")["status"], "pass");
}

#[test]
fn shipped_inputs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("inputs");
    let cases = [
        ("ex2-lie.json", "check-lie", 1),
        ("no-cx.json", "invariant-forms", 0),
        ("hopf.json", "integrability", 0),
        ("hopf.json", "check-gacs", 0),
        ("canonical-twisted.json", "normal-form", 0),
        ("canonical-twisted.json", "transport", 0),
    ];
    for (file, cmd, code) in cases {
        let p = dir.join(file);
        let out = run(&[cmd, "--input", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(code), "{cmd} {file}\n{}{}", String::from_utf8_lossy(&out.stdout), stderr(&out));
    }
}
