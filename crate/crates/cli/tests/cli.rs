//! End-to-end CLI tests: exit-code contract, cache integrity, JSON schema
//! conformance, thread/env overrides.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pvzeta")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pvzeta-cli-{tag}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn exit_code_contract() {
    // success
    let out = run(&["check", "eigenchar", "--space", "tate", "--trials", "50", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    // usage error: unknown space
    let out = run(&["check", "eigenchar", "--space", "nope", "--trials", "5"]);
    assert_eq!(code(&out), 2);
    // usage error: missing census file
    let out = run(&["zeta", "--census", "/nonexistent/census.json"]);
    assert_eq!(code(&out), 2);
    // usage error: clap-level parse failure
    let out = run(&["census", "--space", "tate"]);
    assert_eq!(code(&out), 2);
    // usage error: non-prime p
    let dir = tmpdir("nonprime");
    let out = run(&[
        "census", "--space", "tate", "--p", "6", "--mmax", "2", "--out",
        dir.join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn census_cache_round_trip_and_tamper_detection() {
    let dir = tmpdir("cache");
    let path = dir.join("census.json");
    let out = run(&[
        "census", "--space", "matrix2", "--p", "3", "--mmax", "5", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // reconstruction from the file succeeds
    let out = run(&["zeta", "--census", path.to_str().unwrap(), "--num-deg", "0", "--den-deg", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(run(&[
        "zeta", "--census", path.to_str().unwrap(), "--num-deg", "0", "--den-deg", "2",
    ]).stdout)
    .unwrap();
    assert!(text.contains("holdout verified: true"));
    // tamper with one digit of an entry: checksum mismatch, exit 2
    let raw = std::fs::read_to_string(&path).unwrap();
    let tampered = raw.replacen("\"num\": \"16\"", "\"num\": \"17\"", 1);
    assert_ne!(raw, tampered, "expected the matrix2 p=3 census to contain num 16");
    std::fs::write(&path, tampered).unwrap();
    let out = run(&["zeta", "--census", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));
    // unsupported schema version
    let bumped = raw.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
    std::fs::write(&path, bumped).unwrap();
    let out = run(&["zeta", "--census", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn spec_examples_through_cli() {
    // orbit classify over F7
    let out = run(&[
        "orbit", "classify", "--space", "cube-split", "--field", "fp:7", "--point",
        "0,1,0,0,1,0,0,1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "DEGEN_FORM");
    // invariant eval with rational input
    let out = run(&[
        "invariant", "eval", "--space", "matrix2", "--point", "1/2,0,0,4",
    ]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "f(x) = 2");
    // verify-lfe exits zero
    let out = run(&["orbit", "verify-lfe", "--trials", "50"]);
    assert_eq!(code(&out), 0);
    // zeta-real matches 1/pi at s = 2
    let out = run(&["zeta-real", "--space", "tate", "--s", "2.0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 1.0 / std::f64::consts::PI).abs() < 1e-9);
    // convergence guard refuses s below the range
    let out = run(&["zeta-real", "--space", "matrix2", "--s", "0.5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn threads_env_override() {
    let dir = tmpdir("env");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    let out = Command::new(bin())
        .args(["census", "--space", "matrix2", "--p", "2", "--mmax", "3", "--threads", "2",
            "--out", a.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    // PVZETA_THREADS wins over the flag; results stay identical
    let out = Command::new(bin())
        .env("PVZETA_THREADS", "7")
        .args(["census", "--space", "matrix2", "--p", "2", "--mmax", "3", "--threads", "2",
            "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // malformed env value is a usage error
    let out = Command::new(bin())
        .env("PVZETA_THREADS", "many")
        .args(["catalog", "list"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_defaults_and_rejection() {
    let dir = tmpdir("config");
    let good = dir.join("good.conf");
    std::fs::write(&good, "[global]\nthreads = 2\n[gamma]\ntolerance = 1e-8\n").unwrap();
    let out = run(&[
        "gamma", "--space", "tate", "--p", "3", "--config", good.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "[global]\nthread_count = 2\n").unwrap();
    let out = run(&["catalog", "list", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn fourier_check_command() {
    let out = run(&["fourier", "check", "--trials", "30", "--seed", "9", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["pass"].as_bool().unwrap());
    assert!(v["max_involution_error"].as_f64().unwrap() < 1e-12);
}

// ---------------------------------------------------------------------------
// JSON schema validation (a small structural validator over the shipped
// schema files: type / required / properties / items / enum)
// ---------------------------------------------------------------------------

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schema")
        .canonicalize()
        .unwrap()
}

fn validate(value: &serde_json::Value, schema: &serde_json::Value, path: &str) -> Vec<String> {
    let mut errors = Vec::new();
    if let Some(types) = schema.get("type") {
        let ok = match types.as_str().unwrap() {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.is_i64() || value.is_u64(),
            "number" => value.is_number(),
            "boolean" => value.is_boolean(),
            other => panic!("unsupported schema type {other}"),
        };
        if !ok {
            errors.push(format!("{path}: expected {types}"));
            return errors;
        }
    }
    if let Some(required) = schema.get("required").and_then(|r| r.as_array()) {
        for key in required {
            let key = key.as_str().unwrap();
            if value.get(key).is_none() {
                errors.push(format!("{path}: missing required `{key}`"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        if let Some(obj) = value.as_object() {
            for (key, sub) in obj {
                match props.get(key) {
                    Some(pschema) => {
                        errors.extend(validate(sub, pschema, &format!("{path}.{key}")))
                    }
                    None => {
                        if schema.get("additionalProperties")
                            == Some(&serde_json::Value::Bool(false))
                        {
                            errors.push(format!("{path}: unexpected key `{key}`"));
                        }
                    }
                }
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = value.as_array() {
            for (i, item) in arr.iter().enumerate() {
                errors.extend(validate(item, items, &format!("{path}[{i}]")));
            }
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(|e| e.as_array()) {
        if !allowed.contains(value) {
            errors.push(format!("{path}: value {value} not in enum"));
        }
    }
    errors
}

fn assert_schema(output: &[u8], schema_file: &str) {
    let value: serde_json::Value = serde_json::from_slice(output).unwrap();
    let schema_text = std::fs::read_to_string(schema_dir().join(schema_file)).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&schema_text).unwrap();
    let errors = validate(&value, &schema, "$");
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

#[test]
fn json_outputs_validate_against_schemas() {
    let dir = tmpdir("schema");
    assert_schema(&run(&["catalog", "list", "--json"]).stdout, "catalog.schema.json");
    assert_schema(
        &run(&["check", "eigenchar", "--space", "tate", "--trials", "20", "--json"]).stdout,
        "eigenchar.schema.json",
    );
    let census = dir.join("c.json");
    let out = run(&[
        "census", "--space", "tate", "--p", "3", "--mmax", "4", "--out",
        census.to_str().unwrap(), "--json",
    ]);
    assert_schema(&out.stdout, "census.schema.json");
    assert_schema(&std::fs::read(&census).unwrap(), "census.schema.json");
    assert_schema(
        &run(&["zeta", "--census", census.to_str().unwrap(), "--num-deg", "0", "--den-deg", "1", "--json"]).stdout,
        "zeta.schema.json",
    );
    assert_schema(
        &run(&["gamma", "--space", "tate", "--p", "3", "--json"]).stdout,
        "gamma.schema.json",
    );
    assert_schema(
        &run(&["zeta-real", "--space", "tate", "--s", "1.5", "--json"]).stdout,
        "zeta_real.schema.json",
    );
    assert_schema(
        &run(&["fourier", "check", "--trials", "10", "--json"]).stdout,
        "fourier_check.schema.json",
    );
    assert_schema(
        &run(&["orbit", "classify", "--field", "fp:5", "--point", "1,0,0,1,1,0,0,-1", "--json"]).stdout,
        "orbit_classify.schema.json",
    );
    assert_schema(
        &run(&["orbit", "verify-lfe", "--trials", "20", "--json"]).stdout,
        "lfe.schema.json",
    );
}
