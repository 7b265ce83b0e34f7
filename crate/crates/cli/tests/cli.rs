use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn modcond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modcond"))
        .args(args)
        .env_remove("MODCOND_MEM_MB")
        .output()
        .expect("runs")
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for side in ["H", "U"] {
        let dir = root.join(side);
        let Ok(entries) = fs::read_dir(&dir) else {
            continue;
        };
        for e in entries {
            let e = e.unwrap();
            out.push((
                format!("{side}/{}", e.file_name().to_string_lossy()),
                fs::read(e.path()).unwrap(),
            ));
        }
    }
    out.sort();
    out
}

#[test]
fn enumerate_prints_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().to_str().unwrap();
    let o = modcond(&[
        "enumerate",
        "--scenario",
        "s4_s3",
        "--side",
        "H",
        "--db",
        db,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let out = text(&o);
    assert!(out.contains("side H suborbits 2"));
    assert!(out.contains("total 4 of 4"));
    assert!(dir.path().join("H/manifest.txt").exists());
}

#[test]
fn condense_s3_toy_writes_operators() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().to_str().unwrap();
    let o = modcond(&["enumerate", "--scenario", "s3_toy", "--db", db]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let o = modcond(&[
        "condense",
        "--scenario",
        "s3_toy",
        "--db",
        db,
        "--module",
        "chi2",
        "--elements",
        "1,2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let ops = dir.path().join("operators/chi2");
    // A2 is the length-2 suborbit in the bundled enumeration order
    let a2 = fs::read_to_string(ops.join("A2.txt")).unwrap();
    assert_eq!(a2, "blocks 1 1\nmatrix 7 1 1\n6\n");
    let a1 = fs::read_to_string(ops.join("A1.txt")).unwrap();
    assert_eq!(a1, "blocks 1 1\nmatrix 7 1 1\n1\n");
    assert!(text(&o).contains("total           1"));
}

#[test]
fn missing_database_names_enumerate() {
    let dir = tempfile::tempdir().unwrap();
    let o = modcond(&[
        "condense",
        "--scenario",
        "s3_toy",
        "--db",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("modcond enumerate"), "{}", text(&o));
}

#[test]
fn unknown_side_is_named() {
    let o = modcond(&[
        "enumerate",
        "--scenario",
        "s3_toy",
        "--side",
        "K",
        "--db",
        "unused",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("`K`"), "{}", text(&o));
}

#[test]
fn unknown_label_in_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let src = modcond::scenario::Scenario::load("s3_toy")
        .unwrap()
        .to_text();
    let bad = src
        .replacen("helper H", "helper Q", 1)
        .replacen("subgroup U", "subgroup W", 1);
    let path = dir.path().join("bad.scn");
    fs::write(&path, bad).unwrap();
    let o = modcond(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        text(&o).contains("`U`") || text(&o).contains("`Q`"),
        "{}",
        text(&o)
    );
}

#[test]
fn verify_bundled_passes() {
    for name in ["s3_toy", "s4_s3", "l3_2"] {
        let o = modcond(&["verify", "--scenario", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", text(&o));
        let out = text(&o);
        assert!(out.lines().any(|l| l == "PASS"));
        assert!(!out.contains("FAIL"));
    }
}

#[test]
fn verify_corrupted_module_fails() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = modcond::scenario::Scenario::load("l3_2").unwrap();
    // perturb one entry of a permutation matrix so the relations of U break
    let m = sc.modules.iter_mut().find(|m| m.name == "perm7").unwrap();
    let f = m.mats[0].field();
    let x = m.mats[0].get(0, 0);
    m.mats[0].set(0, 0, f.add(x, 1));
    let path = dir.path().join("corrupt.scn");
    fs::write(&path, sc.to_text()).unwrap();
    let o = modcond(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    assert!(text(&o).contains("FAIL"));
}

#[test]
fn char_dividing_h_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = modcond::scenario::Scenario::load("s4_s3").unwrap();
    let f3 = modcond::gfmat::Fp::new(3).unwrap();
    sc.coefficient_field = 3;
    for m in &mut sc.modules {
        m.mats = m
            .mats
            .iter()
            .map(|_| modcond::gfmat::FpMatrix::identity(f3, m.dim))
            .collect();
    }
    let path = dir.path().join("p3.scn");
    fs::write(&path, sc.to_text()).unwrap();
    let o = modcond(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(
        text(&o).contains("characteristic 3 divides"),
        "{}",
        text(&o)
    );
}

#[test]
fn memory_cap_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_modcond"))
        .args(["enumerate", "--scenario", "m11", "--side", "H", "--db"])
        .arg(dir.path())
        .env("MODCOND_MEM_MB", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
    assert!(dir.path().join("H/manifest.txt").exists());
}

#[test]
fn resume_matches_uninterrupted_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (da, db) = (a.path().to_str().unwrap(), b.path().to_str().unwrap());
    let o = modcond(&[
        "enumerate",
        "--scenario",
        "s5_pairs",
        "--side",
        "H",
        "--db",
        da,
        "--max-draws",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
    let o = modcond(&[
        "enumerate",
        "--scenario",
        "s5_pairs",
        "--side",
        "H",
        "--db",
        da,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("resuming after 1 draws"));
    let o = modcond(&[
        "enumerate",
        "--scenario",
        "s5_pairs",
        "--side",
        "H",
        "--db",
        db,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert_eq!(read_tree(a.path()), read_tree(b.path()));
}

#[test]
fn reports_are_stamped_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().to_str().unwrap();
    assert_eq!(
        modcond(&["enumerate", "--scenario", "s4_s3", "--db", db])
            .status
            .code(),
        Some(0)
    );
    let r1 = dir.path().join("r1.txt");
    let r2 = dir.path().join("r2.txt");
    for r in [&r1, &r2] {
        let o = modcond(&[
            "count",
            "--scenario",
            "s4_s3",
            "--db",
            db,
            "--report",
            r.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    }
    let a = fs::read_to_string(&r1).unwrap();
    assert_eq!(a, fs::read_to_string(&r2).unwrap());
    assert!(a.starts_with("# scenario s4_s3 digest "));
    assert!(a.contains("seed 2"));
    assert!(a.contains("# intersection numbers of A2"));
}
