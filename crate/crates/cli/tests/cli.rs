use std::path::Path;
use std::process::{Command, Output};

fn bitideal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bitideal")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn fixtures_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures"))
}

#[test]
fn a3_is_an_ideal_of_s3() {
    let out = bitideal(&["check-ideal", "--variety", "group", "--algebra", "s3.alg", "--subset", "0,1,2", "--method", "all"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["agreement"], true);
    assert_eq!(v["verdicts"].as_object().unwrap().len(), 12);
    let text = String::from_utf8_lossy(&out.stdout);
    let positions: Vec<usize> = ["\"algebra\"", "\"subset\"", "\"verdicts\"", "\"agreement\"", "\"failures\"", "\"elapsed_ms\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
    assert!(v["elapsed_ms"].is_null());
}

#[test]
fn rejected_subset_exits_one_with_failures() {
    let out = bitideal(&["check-ideal", "--variety", "group", "--algebra", "S3", "--subset", "0,3"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["agreement"], true);
    let failures = v["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 12);
    assert_eq!(failures[0]["condition"], "cond-i");
    assert!(failures.iter().all(|f| f["clause"].is_string()));
}

#[test]
fn ring_variant_iv_has_eight_terms() {
    let out = bitideal(&["gen-terms", "--variety", "ring", "--set", "iv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let terms: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(terms.len(), 8);
    assert!(text.starts_with("# termset signature=ring variant=iv semiabelian=false count=8\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("# clause=")).count(), 8);
    assert!(text.contains("# clause=(2.20) tau=mul i=1 j=2\nadd(mul(x1,add(y1,x2)),neg(mul(x1,x2)))\n"));
}

#[test]
fn s3_has_three_ideals() {
    let out = bitideal(&["list-ideals", "--variety", "group", "--algebra", "s3.alg"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["count"], 3);
    assert_eq!(v["ideals"], serde_json::json!([[0], [0, 1, 2], [0, 1, 2, 3, 4, 5]]));
}

#[test]
fn algebra_and_sig_files_are_read_from_disk() {
    let dir = fixtures_dir();
    let sig = dir.join("group/group.sig");
    let alg = dir.join("group/D4.alg");
    let out = bitideal(&["list-ideals", "--sig", sig.to_str().unwrap(), "--algebra", alg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["count"], 6);
}

#[test]
fn input_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["check-ideal", "--variety", "group", "--algebra", "S3", "--subset", "0,6"],
        &["check-ideal", "--variety", "group", "--algebra", "S3", "--subset", "0,x"],
        &["check-ideal", "--variety", "nosuch", "--algebra", "S3", "--subset", "0"],
        &["check-ideal", "--variety", "group", "--algebra", "missing.alg", "--subset", "0"],
        &["gen-terms", "--sig", "/nonexistent.sig"],
        &["gen-terms", "--variety", "group", "--set", "v"],
        &["check-ideal", "--variety", "group", "--algebra", "S3", "--subset", "0", "--method", "cond-viii"],
        &["selftest", "--filter", "nosuchsuite"],
        &["gen-terms"],
    ];
    for args in cases {
        let out = bitideal(args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn empty_subset_is_rejected_by_every_method() {
    let out = bitideal(&["check-ideal", "--variety", "group", "--algebra", "S3", "--subset", ""]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["agreement"], true);
    assert!(v["verdicts"].as_object().unwrap().values().all(|b| b == false));
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = bitideal(&["check-ideal", "--variety", "group", "--algebra", "D4", "--subset", "0", "--budget", "10"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn prop21_requires_an_ideal() {
    let ok = bitideal(&["prop21", "--variety", "group", "--algebra", "S3", "--subset", "0,1,2", "--pair", "3,4"]);
    assert_eq!(code(&ok), 0);
    let v = json(&ok);
    assert_eq!(v["pairs"][0]["related"], true);
    assert_eq!(v["congruence_is_sim"], true);
    let not_ideal = bitideal(&["prop21", "--variety", "group", "--algebra", "S3", "--subset", "0,3"]);
    assert_eq!(code(&not_ideal), 1);
}

#[test]
fn closure_of_zero_is_trivial() {
    let out = bitideal(&["ideal-closure", "--variety", "group", "--algebra", "D4", "--subset", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["closure"], serde_json::json!([0]));
    let empty = bitideal(&["ideal-closure", "--variety", "group", "--algebra", "D4"]);
    assert_eq!(json(&empty)["closure"], serde_json::json!([0]));
}

#[test]
fn congruences_list_kernels() {
    let out = bitideal(&["congruences", "--variety", "ring", "--algebra", "Z6"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["count"], 4);
    let first = &v["congruences"][0];
    assert_eq!(first["kernel"], serde_json::json!([0]));
    assert_eq!(first["blocks"].as_array().unwrap().len(), 6);
}

#[test]
fn witness_reports() {
    let out = bitideal(&["verify-witness", "--variety", "div_inv_groupoid"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["reports"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let sig = std::fs::read_to_string(fixtures_dir().join("group/group.sig")).unwrap();
    let broken = sig.replace("alpha1: mul(x1,inv(x2))", "alpha1: x1");
    let path = dir.path().join("broken.sig");
    std::fs::write(&path, broken).unwrap();
    let alg = fixtures_dir().join("group/S3.alg");
    let out = bitideal(&["verify-witness", "--sig", path.to_str().unwrap(), "--algebra", alg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let failures = &json(&out)["reports"][0]["failures"];
    assert!(!failures[0]["assignment"].as_array().unwrap().is_empty());
}

#[test]
fn extension_and_dedupe() {
    let out = bitideal(&["gen-terms", "--variety", "omega_group_demo", "--mode", "b", "--base", "group"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("extension=b count=8"));
    assert!(text.contains("tau=omega i=1 j=2"));

    let out = bitideal(&["gen-terms", "--variety", "omega_group_demo", "--mode", "a"]);
    assert_eq!(code(&out), 2);

    let out = bitideal(&["gen-terms", "--variety", "ring", "--dedupe", "Z4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# merged on Z4:"));
}

#[test]
fn selftest_filter_runs_one_suite() {
    let out = bitideal(&["selftest", "--filter", "lemma23"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["name"], "image-of-zero");
    assert!(suites[0]["cases"].as_u64().unwrap() > 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("image-of-zero"));
}

fn copy_tree(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

#[test]
fn corrupted_fixture_fails_the_load_suite() {
    let dir = tempfile::tempdir().unwrap();
    copy_tree(fixtures_dir(), dir.path());
    let s3 = dir.path().join("group/S3.alg");
    let text = std::fs::read_to_string(&s3).unwrap();
    std::fs::write(&s3, text.replace("1 2 0 4 5 3", "1 2 0 4 5 9")).unwrap();

    let out = bitideal(&["selftest", "--filter", "load", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["ok"], false);
    let load = &v["suites"][0];
    assert_eq!(load["name"], "load");
    assert!(load["failures"][0].as_str().unwrap().contains("S3"));
}
