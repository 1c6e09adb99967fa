use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigencomplete")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).map(|r| r.map(|e| e.unwrap().path()).collect()).unwrap_or_default();
    v.sort();
    v
}

fn with_ext<'a>(paths: &'a [PathBuf], ext: &str) -> Vec<&'a PathBuf> {
    paths.iter().filter(|p| p.extension().is_some_and(|e| e == ext)).collect()
}

const DOUBLE_WELL_EXPAND: &str = r#"
[potential]
variant = "double_well"
v0 = 4.27
v1 = 1.43

[task]
kind = "expand"
points = 41

[initial_state]
kind = "well_mode"
j = 2
tau = 0.25
sigma = 1.63

[output]
dir = "out"
"#;

fn config(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn identity_subcommand() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(tmp.path(), &["identity", "--sigma", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "identity_check: 1.000000 (|err| < 1e-6)");
    let o = bin(tmp.path(), &["identity", "--sigma", "-2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identity_task_writes_named_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(
        tmp.path(),
        "id.toml",
        "[potential]\nvariant = \"step\"\nv0 = 1.0\n\n[task]\nkind = \"identity\"\nsigma = 5.0\n\n[output]\ndir = \"res\"\nformats = [\"csv\", \"json\"]\n",
    );
    let o = bin(tmp.path(), &["run", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("identity_check: 1.000000 (|err| < 1e-6)"));
    let out = files(&tmp.path().join("res"));
    assert_eq!(out.len(), 2);
    for f in &out {
        let name = f.file_name().unwrap().to_str().unwrap();
        assert!(name.starts_with("identity_step_2"), "{name}");
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(with_ext(&out, "json")[0]).unwrap()).unwrap();
    let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["config", "numerics_report", "results"]);
    assert!((json["results"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let csv = fs::read_to_string(with_ext(&out, "csv")[0]).unwrap();
    assert!(csv.starts_with("# config: {"));
    assert!(csv.lines().any(|l| l == "sigma,value,abs_error"));
}

#[test]
fn invariant_violation_exits_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "bad.toml", &DOUBLE_WELL_EXPAND.replace("v0 = 4.27", "v0 = 1.0"));
    let o = bin(tmp.path(), &["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("v0 > v1"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn strict_parsing_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    for (text, key) in [
        (DOUBLE_WELL_EXPAND.replace("points = 41", "pointz = 41"), "pointz"),
        (DOUBLE_WELL_EXPAND.replace("[output]", "[output]\ncolour = \"red\""), "colour"),
        (DOUBLE_WELL_EXPAND.replace("v1 = 1.43", "v1 = 1.43\nv2 = 0.1"), "v2"),
        (format!("{DOUBLE_WELL_EXPAND}\n[numerics]\ncutoff_tolerance = 1e-3\n"), "cutoff_tolerance"),
    ] {
        let cfg = config(tmp.path(), "c.toml", &text);
        let o = bin(tmp.path(), &["run", &cfg]);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains(key), "{}", stderr(&o));
    }
    let missing = DOUBLE_WELL_EXPAND.split("[initial_state]").next().unwrap().to_string() + "[output]\ndir = \"out\"\n";
    let cfg = config(tmp.path(), "c.toml", &missing);
    let o = bin(tmp.path(), &["run", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("initial_state"));
    let wrong = config(
        tmp.path(),
        "t.toml",
        "[potential]\nvariant = \"step\"\nv0 = 1.0\n\n[task]\nkind = \"table1\"\n",
    );
    let o = bin(tmp.path(), &["run", &wrong]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kronig_penney"));
    assert!(!tmp.path().join("out").exists() && !tmp.path().join("output").exists());
}

#[test]
fn runs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for (run, threads) in [("a", "1"), ("b", "3")] {
        let dir = tmp.path().join(run);
        fs::create_dir(&dir).unwrap();
        let cfg = config(&dir, "dw.toml", DOUBLE_WELL_EXPAND);
        let o = bin(&dir, &["--threads", threads, "run", &cfg]);
        assert!(o.status.success(), "{}", stderr(&o));
        let out = files(&dir.join("out"));
        assert_eq!(out.len(), 3);
        bodies.push(out.iter().map(|f| fs::read_to_string(f).unwrap()).collect::<Vec<_>>());
    }
    assert_eq!(bodies[0], bodies[1]);
    let json: serde_json::Value = serde_json::from_str(&bodies[0][1]).unwrap();
    assert!(json["results"]["residual_sup"].as_f64().unwrap() < 1e-3);
    assert!(json["numerics_report"]["quadrature"]["cutoffs"].as_array().unwrap().len() >= 2);
}

#[test]
fn unconverged_expansion_exits_3_with_flagged_output() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("{DOUBLE_WELL_EXPAND}\n[numerics]\ninitial_cutoff = 2.0\nmax_doublings = 1\n");
    let cfg = config(tmp.path(), "dw.toml", &text);
    let o = bin(tmp.path(), &["run", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let out = files(&tmp.path().join("out"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(with_ext(&out, "json")[0]).unwrap()).unwrap();
    assert_eq!(json["results"]["converged"], false);
}

#[test]
fn global_overrides_reach_the_numerics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "dw.toml", DOUBLE_WELL_EXPAND);
    let o = bin(tmp.path(), &["--tol", "1e-3", "--edge-margin", "1e-5", "run", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = files(&tmp.path().join("out"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(with_ext(&out, "json")[0]).unwrap()).unwrap();
    assert_eq!(json["config"]["numerics"]["cutoff_tol"], 1e-3);
    assert_eq!(json["config"]["numerics"]["edge_margin"], 1e-5);
}

#[test]
fn bands_eigenstate_probability_and_oracle_tasks() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("bands", "[potential]\nvariant = \"dirac_comb\"\na = 1.3\ngamma = 1.0\n\n[task]\nkind = \"bands\"\nenergy_max = 10.0\n", "energy,kappa_plus,kappa_minus,band_index"),
        ("eigenstate", "[potential]\nvariant = \"cosine\"\nv0 = 1.0\n\n[task]\nkind = \"eigenstate\"\nenergy = -0.17\nbranch = \"plus\"\n", "x,"),
        ("eigenstate", "[potential]\nvariant = \"step\"\nv0 = 2.645\n\n[task]\nkind = \"eigenstate\"\nenergy = 4.0\nfamily = \"step_psi1\"\n", "x,"),
        ("probability", "[potential]\nvariant = \"open_box\"\nv0 = 2.645\n\n[task]\nkind = \"probability\"\n\n[initial_state]\nkind = \"well_mode\"\nj = 1\ntau = 0.2\nsigma = 0.6\n", "family,probability"),
        ("oracle", "[potential]\nvariant = \"double_well\"\nv0 = 4.27\nv1 = 1.43\n\n[task]\nkind = \"oracle\"\nhalf_width = 20.0\nn = 2000\n\n[initial_state]\nkind = \"well_mode\"\nj = 1\ntau = 0.25\nsigma = 1.63\n", "x,reconstruction,psi"),
    ];
    for (i, (task, text, header)) in cases.iter().enumerate() {
        let dir = format!("r{i}");
        let cfg = config(tmp.path(), "c.toml", &format!("{text}\n[output]\ndir = \"{dir}\"\n"));
        let o = bin(tmp.path(), &["run", &cfg]);
        assert!(o.status.success(), "{task}: {}", stderr(&o));
        let out = files(&tmp.path().join(&dir));
        assert_eq!(out.len(), if *task == "probability" { 2 } else { 3 }, "{task}");
        assert!(out.iter().all(|f| f.file_name().unwrap().to_str().unwrap().starts_with(task)));
        let csv = fs::read_to_string(with_ext(&out, "csv")[0]).unwrap();
        assert!(csv.lines().nth(2).unwrap().starts_with(header), "{task}: {csv:.200}");
        for svg in with_ext(&out, "svg") {
            assert!(fs::read_to_string(svg).unwrap().contains("<polyline"));
        }
        if *task == "oracle" {
            let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(with_ext(&out, "json")[0]).unwrap()).unwrap();
            assert_eq!(json["results"]["bound_energies"].as_array().unwrap().len(), 2);
        }
    }
    let gap = config(tmp.path(), "g.toml", "[potential]\nvariant = \"cosine\"\nv0 = 1.0\n\n[task]\nkind = \"eigenstate\"\nenergy = -0.7\n");
    assert_eq!(bin(tmp.path(), &["run", &gap]).status.code(), Some(2));
}

#[test]
fn reproduce_table_and_spectra() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(tmp.path(), &["reproduce", "table1", "--out", "t"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = files(&tmp.path().join("t"));
    let csv = fs::read_to_string(with_ext(&out, "csv")[0]).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "j,P_j,1-P_j");
    assert_eq!(rows.len(), 7);
    for (j, row) in rows[1..].iter().enumerate() {
        let f: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(f[0] as usize, j + 1);
        assert!((f[1] + f[2] - 1.0).abs() < 1e-12);
    }
    assert_eq!(with_ext(&out, "svg").len(), 1);

    let o = bin(tmp.path(), &["reproduce", "fig7a", "--out", "s"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("0 mismatches"));
    let out = files(&tmp.path().join("s"));
    assert_eq!(out.len(), 3);
    assert!(out.iter().any(|f| f.file_name().unwrap().to_str().unwrap().starts_with("fig7a_dirac_comb_")));

    let o = bin(tmp.path(), &["reproduce", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
}
