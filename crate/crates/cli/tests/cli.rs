use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command as Proc;
use wavestab_cli::{cmd_profile, cmd_scan, cmd_stability, run, Command, RunConfig, RunOptions};

const NO_TS: RunOptions = RunOptions { timestamp: false };

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn schema() -> Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| split_csv(l)).collect();
    (header, rows)
}

fn split_csv(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                chars.next();
                out.last_mut().unwrap().push('"');
            }
            ('"', _) => quoted = !quoted,
            (',', false) => out.push(String::new()),
            _ => out.last_mut().unwrap().push(c),
        }
    }
    out
}

/// Minimal validator for the subset of JSON Schema used by the report schema:
/// `type`, `required`, `properties`, `items`, `enum`, `minItems`, `maxItems`
/// and local `$ref`.
fn validate(root: &Value, schema: &Value, v: &Value, path: &str, errs: &mut Vec<String>) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let target = r.trim_start_matches("#/").split('/').fold(root, |s, k| &s[k]);
        return validate(root, target, v, path, errs);
    }
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "number" => v.is_number(),
            "integer" => v.is_i64() || v.is_u64(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            errs.push(format!("{path}: expected {types:?}, got {v}"));
            return;
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(v) {
            errs.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                errs.push(format!("{path}: missing {key}"));
            }
        }
        if let Some(props) = schema.get("properties").and_then(Value::as_object) {
            for (k, s) in props {
                if let Some(child) = obj.get(k) {
                    validate(root, s, child, &format!("{path}/{k}"), errs);
                }
            }
        }
    }
    if let Some(arr) = v.as_array() {
        if let Some(n) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < n {
                errs.push(format!("{path}: fewer than {n} items"));
            }
        }
        if let Some(n) = schema.get("maxItems").and_then(Value::as_u64) {
            if (arr.len() as u64) > n {
                errs.push(format!("{path}: more than {n} items"));
            }
        }
        if let Some(items) = schema.get("items") {
            for (i, x) in arr.iter().enumerate() {
                validate(root, items, x, &format!("{path}/{i}"), errs);
            }
        }
    }
}

fn schema_errors(report: &Value) -> Vec<String> {
    let s = schema();
    let mut errs = Vec::new();
    validate(&s, &s, report, "", &mut errs);
    errs
}

#[test]
fn validator_rejects_broken_report() {
    let bad = serde_json::json!({ "tool": "wavestab", "version": 1 });
    let errs = schema_errors(&bad);
    assert!(errs.iter().any(|e| e.contains("/version")));
    assert!(errs.iter().any(|e| e.contains("missing wave")));
}

#[test]
fn profile_outputs_for_reference_wave() {
    let cfg = RunConfig::load(&configs().join("ref_focusing.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = cmd_profile(&cfg, dir.path(), &NO_TS).unwrap();
    assert_eq!(files.len(), 2);
    let (header, rows) = csv_rows(&dir.path().join("profile.csv"));
    assert_eq!(header, ["x", "rho", "v", "theta", "V1", "V2"]);
    assert_eq!(rows.len(), 2 * 256 - 1);
    let rho: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let lo = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((lo - 0.5).abs() < 1e-10 && (hi - 1.5).abs() < 1e-10, "{lo} {hi}");
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() == 0.0));
    let summary = read_json(&dir.path().join("summary.json"));
    let x = summary["profile"]["X_x"].as_f64().unwrap();
    assert!((x - 4.6857).abs() < 1e-3, "{x}");
    assert!(summary.get("timestamp_unix").is_none());
}

#[test]
fn stability_report_reference_wave() {
    let cfg = RunConfig::load(&configs().join("ref_focusing.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cmd_stability(&cfg, dir.path(), &NO_TS).unwrap();
    let report = read_json(&dir.path().join("report.json"));
    let errs = schema_errors(&report);
    assert!(errs.is_empty(), "{errs:#?}");
    assert_eq!(report["coperiodic"]["negative_signature"], 2);
    let (header, rows) = csv_rows(&dir.path().join("evans.csv"));
    assert_eq!(header, ["xi", "eta_sq", "re_lambda", "im_lambda", "re_D", "im_D"]);
    assert_eq!(rows.len(), 2 * 3);
    // D vanishes at the origin for xi = 0.
    let d0: f64 = rows[0][4].parse::<f64>().unwrap().hypot(rows[0][5].parse().unwrap());
    assert!(d0 < 1e-8, "{d0}");
}

#[test]
fn focusing_small_amplitude_is_sideband_unstable() {
    let text = r#"
[model]
kappa = [1.0]
W = [0.0, 0.0, -0.125]
alpha_max = 100.0
[wave]
params = { mu_x = -0.499, c_x = 0.0, omega_phi = -1.0, mu_phi = 0.0 }
[count]
xi = [0.05]
eta_sq = [0.0]
rect = [0.0001, 1.0, -1.0, 1.0]
"#;
    let cfg = RunConfig::from_str(text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cmd_stability(&cfg, dir.path(), &NO_TS).unwrap();
    let report = read_json(&dir.path().join("report.json"));
    assert!(schema_errors(&report).is_empty());
    assert_eq!(report["verdicts"]["sideband"], "UNSTABLE");
    assert!(report["counts"][0]["count"].as_i64().unwrap() >= 1);
}

#[test]
fn defocusing_harmonic_has_no_sideband_instability() {
    let cfg = RunConfig::load(&configs().join("ref_defocusing_harmonic.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cmd_stability(&cfg, dir.path(), &NO_TS).unwrap();
    let report = read_json(&dir.path().join("report.json"));
    assert!(schema_errors(&report).is_empty(), "{:#?}", schema_errors(&report));
    assert_eq!(report["verdicts"]["sideband"], "NO_INSTABILITY_DETECTED");
    assert_eq!(report["sideband"]["weakly_hyperbolic"], true);
    assert_eq!(report["counts"][0]["count"], 0);
    assert_eq!(report["verdicts"]["transverse"], "UNSTABLE");
    let asym = &report["asymptotics"];
    assert!((asym["delta_hyp"].as_f64().unwrap() - 0.25).abs() < 1e-10, "{asym}");
    assert!((asym["delta_BF"].as_f64().unwrap() - 0.625).abs() < 1e-10, "{asym}");
}

#[test]
fn wave_scan_completes_without_errors() {
    let cfg = RunConfig::load(&configs().join("ref_focusing.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cmd_scan(&cfg, dir.path(), &NO_TS).unwrap();
    let (header, rows) = csv_rows(&dir.path().join("scan.csv"));
    assert_eq!(header.len(), 17);
    assert_eq!(header.last().unwrap(), "error");
    assert_eq!(rows.len(), 20);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        assert!(r[16].is_empty(), "row {i}: {}", r[16]);
        assert_eq!(r[9], "2");
    }
}

#[test]
fn solitary_epsilon_scan_signature_follows_vk_sign() {
    let cfg = RunConfig::load(&configs().join("ref_defocusing_solitary.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cmd_scan(&cfg, dir.path(), &NO_TS).unwrap();
    let (header, rows) = csv_rows(&dir.path().join("scan.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows.len(), 9);
    let last = &rows[8];
    assert!(last[col("error")].is_empty(), "{}", last[col("error")]);
    let vk: f64 = last[col("vk_index")].parse().unwrap();
    let sig = &last[col("negative_signature")];
    assert_eq!(sig, if vk > 0.0 { "2" } else { "3" });
    assert_eq!(last[col("transverse")], "UNSTABLE");
}

#[test]
fn regime_scan_columns() {
    let cfg = RunConfig::load(&configs().join("ref_defocusing_regime.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    cmd_scan(&cfg, dir.path(), &NO_TS).unwrap();
    let (header, rows) = csv_rows(&dir.path().join("scan.csv"));
    assert_eq!(header, ["cx", "rho0", "k_phi", "delta_hyp", "delta_BF", "a0", "X0", "vk_index", "verdicts", "error"]);
    assert_eq!(rows.len(), 9);
    assert!(rows[0][8].starts_with("constant="), "{}", rows[0][8]);
}

#[test]
fn malformed_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[model]\nkappa = \"one\"\n").unwrap();
    assert_eq!(run(Command::Profile, &cfg, dir.path(), &NO_TS), 2);
    let err = read_json(&dir.path().join("error.json"));
    assert_eq!(err["error"]["exit_code"], 2);

    let out = Proc::new(env!("CARGO_BIN_EXE_wavestab"))
        .args(["profile", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(stderr["error"]["exit_code"], 2);
}

#[test]
fn missing_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(Command::Stability, &dir.path().join("absent.toml"), dir.path(), &NO_TS), 2);
}

#[test]
fn degenerate_well_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("deg.toml");
    std::fs::write(
        &cfg,
        "[model]\nkappa = [1.0]\nW = [0.0, 0.0, -0.125]\nalpha_max = 100.0\n[wave]\nparams = { mu_x = -0.5, c_x = 0.0, omega_phi = -1.0, mu_phi = 0.0 }\n",
    )
    .unwrap();
    assert_eq!(run(Command::Profile, &cfg, dir.path(), &NO_TS), 3);
    let err = read_json(&dir.path().join("error.json"));
    assert_eq!(err["error"]["kind"], "DegenerateWell");
    assert_eq!(err["error"]["exit_code"], 3);
}

#[test]
fn empty_grid_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(
        &cfg,
        "[model]\nkappa = [1.0]\nW = [0.0, 0.0, -0.125]\nalpha_max = 100.0\n[wave]\nparams = { mu_x = -0.375, c_x = 0.0, omega_phi = -1.0, mu_phi = 0.0 }\n[scan]\naxis = \"mu_x\"\nvalues = []\n",
    )
    .unwrap();
    assert_eq!(run(Command::Scan, &cfg, dir.path(), &NO_TS), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let cfg = configs().join("ref_defocusing_regime.toml");
    let outputs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|t| {
            let dir = tempfile::tempdir().unwrap();
            let st = Proc::new(env!("CARGO_BIN_EXE_wavestab"))
                .args(["scan", "--no-timestamp", "--threads", t, "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(dir.path())
                .status()
                .unwrap();
            assert!(st.success());
            std::fs::read(dir.path().join("scan.csv")).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}
