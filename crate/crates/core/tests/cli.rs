use std::process::Command;

fn rigscan(args: &[&str]) -> (i32, String, String) {
    rigscan_env(args, None)
}

fn rigscan_env(args: &[&str], rounding: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rigscan"));
    cmd.args(args).env_remove("RIGSCAN_ROUNDING");
    if let Some(r) = rounding {
        cmd.env("RIGSCAN_ROUNDING", r);
    }
    let out = cmd.output().expect("run rigscan");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).expect("valid json")
}

#[test]
fn errors_command() {
    let (code, out, _) = rigscan(&["errors", "--lo", "0.02", "--hi", "0.03", "--format", "json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["e_abs"], "1/200");
    assert_eq!(v["e_abs_at"], "1/40");
    assert_eq!(v["e_rel"], "1/5");
    assert_eq!(v["e_rel_at"], "3/125");
}

#[test]
fn smallest_threshold_row_is_zero() {
    let (code, out, _) = rigscan(&[
        "table", "--family", "multinomial", "--n", "500", "--d", "365", "--ell", "3", "--uniform", "--t", "4..4",
        "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    let row = &v["rows"][0];
    for key in ["lo_hex", "hi_hex", "e_abs", "e_rel", "approx"] {
        assert_eq!(row[key], "0", "{key}");
    }
    assert_eq!(v["config"]["rounding"], "strong");
    assert_eq!(v["config"]["precision"], "binary64");
}

#[test]
fn hypergeometric_scan_json() {
    let (code, out, _) = rigscan(&[
        "scan", "--family", "hypergeometric", "--n", "500", "--d", "365", "--ell", "3", "--m", "10x365", "--t", "8",
        "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["approx"], ".0097862");
    assert_eq!(v["rows"][0]["t"], 8);
}

#[test]
fn formats_agree() {
    let base = ["scan", "--family", "multinomial", "--n", "12", "--d", "6", "--ell", "2", "--uniform", "--t", "2..5"];
    let run = |fmt: &str| {
        let mut a = base.to_vec();
        a.extend(["--format", fmt, "--hex"]);
        let (code, out, _) = rigscan(&a);
        assert_eq!(code, 0);
        out
    };
    let v = json(&run("json"));
    let csv = run("csv");
    let table = run("table");
    let csv_rows: Vec<&str> = csv.lines().skip(2).collect();
    let table_rows: Vec<&str> = table.lines().skip(2).collect();
    for (i, row) in v["rows"].as_array().unwrap().iter().enumerate() {
        let s = |k: &str| row[k].as_str().unwrap().to_string();
        let expected_csv = format!(
            "{},{},{},{},{},{},{},{}",
            row["t"], s("lo_hex"), s("hi_hex"), s("lo_dec"), s("hi_dec"), s("e_abs"), s("e_rel"), s("approx")
        );
        assert_eq!(csv_rows[i], expected_csv);
        let fields: Vec<&str> = table_rows[i].split_whitespace().collect();
        assert_eq!(fields, [row["t"].to_string(), s("lo_hex"), s("hi_hex"), s("e_abs"), s("e_rel"), s("approx")]);
    }
    assert!(csv.is_ascii() && table.is_ascii());
}

#[test]
fn rounding_mode_is_echoed() {
    let args = ["scan", "--family", "multinomial", "--n", "6", "--d", "3", "--ell", "2", "--uniform", "--t", "3", "--format", "json"];
    let (code, out, _) = rigscan_env(&args, Some("fallback"));
    assert_eq!(code, 0);
    assert_eq!(json(&out)["config"]["rounding"], "fallback");
    let (code, _, err) = rigscan_env(&args, Some("sideways"));
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["scan", "--family", "multinomial", "--n", "5", "--ell", "1", "--t", "1", "--uniform"],
        vec!["scan", "--family", "multinomial", "--n", "5", "--d", "3", "--ell", "1", "--t", "9", "--uniform"],
        vec!["scan", "--family", "multinomial", "--n", "5", "--d", "3", "--ell", "4", "--t", "1", "--uniform"],
        vec!["scan", "--family", "multinomial", "--n", "5", "--ell", "1", "--t", "1", "--p", "1/2,1/3"],
        vec!["scan", "--family", "hypergeometric", "--n", "5", "--ell", "1", "--t", "1", "--m", "2,2"],
        vec!["scan", "--family", "multinomial", "--n", "5", "--d", "2", "--ell", "1", "--t", "3..1", "--uniform"],
        vec!["errors", "--lo", "0.5", "--hi", "0.25"],
        vec!["bogus"],
    ] {
        let (code, out, err) = rigscan(&args);
        assert_eq!(code, 2, "{args:?}: {out}{err}");
    }
}

#[test]
fn oracle_command_and_budget_refusal() {
    let (code, out, _) = rigscan(&["oracle", "--family", "hypergeometric", "--n", "4", "--m", "2x3", "--ell", "2", "--t", "3"]);
    assert_eq!((code, out.trim()), (0, "13/15"));
    let (code, _, err) = rigscan(&["oracle", "--family", "multinomial", "--n", "15", "--d", "25", "--ell", "3", "--t", "5", "--uniform"]);
    assert_eq!(code, 3);
    assert!(err.contains("25140840660"), "{err}");
    let (code, out, _) = rigscan(&[
        "oracle", "--family", "multinomial", "--n", "15", "--d", "25", "--ell", "3", "--t", "5", "--uniform", "--method", "dp",
    ]);
    assert_eq!((code, out.trim()), (0, "167589945457073283144/186264514923095703125"));
}

#[test]
fn rect_and_tail_commands() {
    let (code, out, _) = rigscan(&[
        "rect", "--family", "multinomial", "--n", "2", "--p", "1/2x2", "--sets", "1..1x2", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["rows"][0]["lo_hex"], "1.0000000000000*2^-1");
    assert_eq!(v["rows"][0]["hi_hex"], "1.0000000000000*2^-1");
    let (code, out, _) = rigscan(&[
        "tail", "--family", "multinomial", "--n", "2", "--d", "2", "--ell", "1", "--uniform", "--t", "0..3", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let approx: Vec<&str> = out.lines().skip(2).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(approx, ["1", "1", ".5000000", "0"]);
}

#[test]
fn params_file_matches_inline_list() {
    let dir = std::env::temp_dir().join(format!("rigscan-params-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.txt");
    std::fs::write(&path, "# cells\n1/6 1/3\n1/2\n").unwrap();
    let common = ["scan", "--family", "multinomial", "--n", "7", "--ell", "2", "--t", "4", "--format", "csv"];
    let mut a = common.to_vec();
    a.extend(["--params-file", path.to_str().unwrap()]);
    let mut b = common.to_vec();
    b.extend(["--p", "1/6,1/3,1/2"]);
    let (ca, oa, _) = rigscan(&a);
    let (cb, ob, _) = rigscan(&b);
    assert_eq!((ca, cb), (0, 0));
    assert_eq!(oa.lines().nth(2), ob.lines().nth(2));
    std::fs::remove_dir_all(dir).unwrap();
}
