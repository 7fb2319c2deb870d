use std::path::PathBuf;

use mtoric::cli::run;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn mtoric(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mtoric").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn verify_white_m6_succeeds() {
    let r = mtoric(&["verify-white", "--table1", "M_6"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("WHITE_GB_OK"));
    assert!(r.err.is_empty());
}

#[test]
fn validate_reports_witness_triple() {
    let r = mtoric(&["validate", "--matroid", &fixture("bad_exchange.txt")]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("B={1,2} B'={3,4} alpha=1"), "{}", r.out);

    let r = mtoric(&[
        "validate",
        "--json",
        "--matroid",
        &fixture("bad_exchange.txt"),
    ]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["witness"]["b1"], serde_json::json!([1, 2]));
    assert_eq!(v["witness"]["b2"], serde_json::json!([3, 4]));
    assert_eq!(v["witness"]["alpha"], 1);
}

#[test]
fn input_errors_exit_2() {
    for file in ["out_of_range.txt", "unequal.txt", "missing.txt"] {
        let r = mtoric(&["validate", "--matroid", &fixture(file)]);
        assert_eq!(r.code, 2, "{file}: {}", r.out);
        assert!(r.out.is_empty());
        assert!(r.err.starts_with("error:"), "{}", r.err);
    }
    let r = mtoric(&["validate", "--matroid", &fixture("out_of_range.txt")]);
    assert!(r.err.contains("line 3"), "{}", r.err);
}

#[test]
fn usage_errors_exit_2_with_usage_text() {
    for args in [
        vec!["frobnicate"],
        vec!["gb", "--table1", "M_6", "--no-such-flag"],
        vec![],
        vec!["gb", "--budget", "x"],
    ] {
        let r = mtoric(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.err.contains("Usage"), "{args:?}: {}", r.err);
        assert!(r.out.is_empty());
    }
    // no input selected, unknown table entry, conflicting inputs
    assert_eq!(mtoric(&["gb"]).code, 2);
    assert_eq!(mtoric(&["gb", "--table1", "M_99"]).code, 2);
    assert_eq!(
        mtoric(&["gb", "--table1", "M_6", "--matroid", &fixture("u24.txt")]).code,
        2
    );
    assert_eq!(mtoric(&["scan", "--jobs", "0"]).code, 2);
}

#[test]
fn help_exits_0() {
    let r = mtoric(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("reproduce-paper"));
}

#[test]
fn exit_code_contract_over_fixtures() {
    let cases: Vec<(Vec<String>, i32)> = vec![
        (
            vec!["validate".into(), "--matroid".into(), fixture("u24.txt")],
            0,
        ),
        (vec!["validate".into(), "--table1".into(), "F_7".into()], 0),
        (vec!["gb".into(), "--matroid".into(), fixture("u23.txt")], 0),
        (
            vec![
                "verify-white".into(),
                "--matroid".into(),
                fixture("u24.txt"),
            ],
            0,
        ),
        (
            vec!["verify-white".into(), "--table1".into(), "M_14".into()],
            1,
        ),
        (
            vec![
                "fibers".into(),
                "--table1".into(),
                "M_14".into(),
                "--degree".into(),
                "2".into(),
            ],
            0,
        ),
        (
            vec!["sortable".into(), "--matroid".into(), fixture("u24.txt")],
            0,
        ),
        (
            vec![
                "sortable".into(),
                "--matroid".into(),
                fixture("not_sortable.txt"),
            ],
            1,
        ),
        (
            vec![
                "sortable".into(),
                "--matroid".into(),
                fixture("not_sortable.txt"),
                "--all-orderings".into(),
            ],
            0,
        ),
        (vec!["sortable".into(), "--table1".into(), "M_16".into()], 0),
        (
            vec!["eliminate-chain".into(), "--table1".into(), "M_9".into()],
            0,
        ),
        (
            vec![
                "eliminate-chain".into(),
                "--table1".into(),
                "M_9".into(),
                "--remove".into(),
                "123".into(),
            ],
            2,
        ),
        (
            vec!["eliminate-chain".into(), "--table1".into(), "M_1".into()],
            2,
        ),
        (vec!["scan".into()], 0),
        (
            vec![
                "verify-white".into(),
                "--matroid".into(),
                fixture("u24.txt"),
                "--order".into(),
                fixture("u24_reversed.order"),
            ],
            0,
        ),
        (
            vec![
                "verify-white".into(),
                "--table1".into(),
                "M_6".into(),
                "--order".into(),
                fixture("u24_natural.order"),
            ],
            2,
        ),
    ];
    for (args, expected) in cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = mtoric(&argv);
        assert_eq!(r.code, expected, "{args:?}\nout: {}\nerr: {}", r.out, r.err);
        for json in [false, true] {
            if json {
                let mut with_json = argv.clone();
                with_json.push("--json");
                let rj = mtoric(&with_json);
                assert_eq!(rj.code, expected, "{with_json:?}");
                if expected != 2 {
                    serde_json::from_str::<serde_json::Value>(&rj.out)
                        .unwrap_or_else(|e| panic!("{with_json:?}: {e}\n{}", rj.out));
                }
            }
        }
    }
}

#[test]
fn json_matches_golden_files() {
    let cases: [(&[&str], &str); 5] = [
        (&["gb", "--json", "--matroid", "u24.txt"], "gb_u24.json"),
        (
            &[
                "verify-white",
                "--json",
                "--matroid",
                "u24.txt",
                "--order",
                "u24_reversed.order",
            ],
            "verify_white_u24_reversed.json",
        ),
        (
            &["verify-white", "--json", "--table1", "M_14"],
            "verify_white_m14.json",
        ),
        (
            &["fibers", "--json", "--matroid", "u24.txt"],
            "fibers_u24.json",
        ),
        (
            &[
                "search-order",
                "--json",
                "--table1",
                "M_14",
                "--budget",
                "3",
                "--seed",
                "7",
            ],
            "search_order_m14.json",
        ),
    ];
    for (args, file) in cases {
        let args: Vec<String> = args
            .iter()
            .map(|a| {
                if a.ends_with(".txt") || a.ends_with(".order") {
                    fixture(a)
                } else {
                    a.to_string()
                }
            })
            .collect();
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = mtoric(&argv);
        let second = mtoric(&argv);
        assert_eq!(first.out, second.out, "{file}: output not stable");
        assert_eq!(first.out, golden(file), "{file}");
    }
}

#[test]
fn report_field_order_is_fixed() {
    let r = mtoric(&["verify-white", "--json", "--table1", "M_6"]);
    let keys = [
        "matroid",
        "order",
        "gb_size",
        "degree_histogram",
        "verdict",
        "non_exchange_quadrics",
        "elapsed_ms",
    ];
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| r.out.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{}", r.out);
    assert!(r.out.contains("\"elapsed_ms\": 0"));
}

#[test]
fn degree_cap_truncates() {
    let r = mtoric(&[
        "gb",
        "--json",
        "--degree-cap",
        "1",
        "--matroid",
        &fixture("u24.txt"),
    ]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["truncated"], true);
    let r = mtoric(&[
        "gb",
        "--json",
        "--degree-cap",
        "2",
        "--matroid",
        &fixture("u24.txt"),
    ]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["gb_size"], 2);
}

#[test]
fn scan_reads_catalog_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.txt");
    // U_{1,1} + U_{2,3} is a direct sum, U_{2,4} is 3-connected
    std::fs::write(
        &path,
        "3 2\n1,2 1,3 2,3\n---\n4 3\n1,2,4 1,3,4 2,3,4\n---\n4 2\n12 13 14 23 24 34\n",
    )
    .unwrap();
    let r = mtoric(&["scan", "--json", "--catalog", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["total"], 3);
    assert_eq!(v["three_connected"], 2);
    assert_eq!(v["other"], 1);

    std::fs::write(&path, "4 2\n12 34\n---\n7 3\n1,2,9\n").unwrap();
    let r = mtoric(&["scan", "--catalog", path.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line 2"), "{}", r.err);
}

#[test]
fn reproduce_paper_summary() {
    let r = mtoric(&["reproduce-paper", "--json", "--jobs", "4"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["processed"], 18);
    assert_eq!(v["white_ok"], 17);
    assert_eq!(v["open"], 1);
    assert_eq!(v["skipped"], 0);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 18);
    let m14 = entries.iter().find(|e| e["id"] == "M_14").unwrap();
    assert_eq!(m14["status"], "OPEN");
    assert_eq!(m14["dual"]["id"], "M_14*");
    assert_eq!(m14["dual"]["status"], "OPEN");
    let again = mtoric(&["reproduce-paper", "--json", "--jobs", "2"]);
    assert_eq!(r.out, again.out, "summary depends on scheduling");
}
