use std::process::Command;

use serde_json::Value;

fn groups_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../groups")
}

fn rhgt(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rhgt"))
        .args(args)
        .current_dir(groups_dir())
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn area_reports_certificate_that_verifies() {
    let word = "@H(a^-2) b^-1 @H(a^2) b";
    let (code, out) = rhgt(&[
        "area",
        "--group",
        "zz.json",
        "--word",
        word,
        "--max-area",
        "3",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["area"], 2);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("cert.json");
    std::fs::write(&file, &out).unwrap();
    let (code, out) = rhgt(&[
        "area",
        "--group",
        "zz.json",
        "--word",
        word,
        "--verify",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["valid"], true);
    let (code, out) = rhgt(&[
        "area",
        "--group",
        "zz.json",
        "--word",
        "@H(a^-3) b^-1 @H(a^3) b",
        "--verify",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["valid"], false);
}

#[test]
fn area_beyond_caps_exits_2() {
    let (code, out) = rhgt(&[
        "area",
        "--group",
        "zz.json",
        "-w",
        "@H(a^-4) b^-1 @H(a^4) b",
        "--max-area",
        "2",
    ]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["area"], Value::Null);
}

#[test]
fn components_of_bs12_example() {
    let (code, out) = rhgt(&[
        "components",
        "--group",
        "bs12.json",
        "--word",
        "@H(a^2) t^-1 @H(a) t @H(a^3)",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["isolated"], serde_json::json!([false, true, false]));
}

#[test]
fn conjugate_witness_and_verify() {
    let (code, out) = rhgt(&[
        "conjugate",
        "--group",
        "f2relx.json",
        "--f",
        "x y",
        "--g",
        "y x",
        "--radius",
        "1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["t"], "x");
    let (code, out) = rhgt(&[
        "conjugate",
        "--group",
        "f2relx.json",
        "--f",
        "x y",
        "--g",
        "y x",
        "--verify",
        "x",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["valid"], true);
    let (code, _) = rhgt(&[
        "conjugate",
        "--group",
        "f2relx.json",
        "--f",
        "x y",
        "--g",
        "x y^2",
        "--radius",
        "3",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn parabolic_and_powerconj_verify() {
    let (code, out) = rhgt(&[
        "parabolic",
        "--group",
        "f2relx",
        "-w",
        "y x^5 y^-1",
        "--radius",
        "1",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(
        (v["t"].as_str(), v["image"].as_str()),
        (Some("y"), Some("x^5"))
    );
    let (_, out) = rhgt(&[
        "parabolic",
        "--group",
        "f2relx",
        "-w",
        "y x^5 y^-1",
        "--verify",
        "y",
    ]);
    assert_eq!(json(&out)["valid"], true);
    let (code, out) = rhgt(&["powerconj", "--group", "f2relx", "--f", "x y", "--g", "y x"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let ex = format!("{},{}", v["k"], v["l"]);
    let t = v["t"].as_str().unwrap().to_string();
    let (_, out) = rhgt(&[
        "powerconj",
        "--group",
        "f2relx",
        "--f",
        "x y",
        "--g",
        "y x",
        "--verify",
        &t,
        "--exponents",
        &ex,
    ]);
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(rhgt(&["area", "--group", "zz.json", "--bogus"]).0, 1);
    assert_eq!(rhgt(&["length", "--group", "missing.json", "-w", "b"]).0, 1);
    assert_eq!(rhgt(&["length", "--group", "zz.json", "-w", "q"]).0, 1);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "bcp",
        "--group",
        "f2relx",
        "--sample",
        "20",
        "--seed",
        "5",
        "--k",
        "2",
        "--threshold",
        "3",
    ];
    assert_eq!(rhgt(&args), rhgt(&args));
    let args = ["delta", "--group", "f2relx", "--radius", "2"];
    assert_eq!(rhgt(&args), rhgt(&args));
}

#[test]
fn dehn_scan_text_is_csv() {
    let (code, out) = rhgt(&["dehn-scan", "--group", "fp23", "--N", "4", "--out", "text"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("n,area,status\n0,0,exact\n"));
    assert_eq!(out.lines().count(), 6);
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["length", "--group", "zz", "-w", "a^3 b"],
        &["geodesic", "--group", "f2relx", "-w", "y x^3 y x"],
        &["reduce", "--group", "zz", "-w", "b b^-1 @H(a) @H(a^2)"],
        &["omega", "--group", "zz", "-w", "@H(a^3) b"],
        &["nu", "--group", "zz", "--radius", "2"],
        &[
            "qconvex", "--group", "f2relx", "--gen", "y", "--radius", "3",
        ],
        &["wp", "--group", "zz", "-w", "@H(a) b"],
        &["member", "--group", "zz", "-w", "a^4", "--sub", "H"],
        &["sympair", "--group", "f2relx", "--f", "x y", "--g", "y x"],
        &["translation", "--group", "f2relx", "-w", "x y", "--N", "4"],
        &["order", "--group", "fp23", "-w", "u"],
        &[
            "root",
            "--group",
            "f2relx",
            "-w",
            "x y x y x y",
            "--radius",
            "2",
            "--n-max",
            "4",
        ],
        &["atomic", "--group", "fp23", "--max-len", "4"],
        &[
            "bcp",
            "--group",
            "zz",
            "--p",
            "@H(a^10)",
            "--q",
            "b @H(a^10)",
            "--threshold",
            "5",
        ],
    ];
    for args in cases {
        let (code, out) = rhgt(args);
        assert_eq!(code, 0, "{args:?}: {out}");
        assert_eq!(json(&out)["schema_version"], "1", "{args:?}");
    }
}
