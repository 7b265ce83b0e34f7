use std::path::PathBuf;

use modcond::scenario::{
    build_s3_toy, build_s3_toy_variant, build_s4_s3_variant, builders, bundled, Scenario,
    ScenarioError, Setup, UVariant,
};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

/// Set `MODCOND_WRITE_SCENARIOS=1` to regenerate the bundled files.
#[test]
fn bundled_files_match_builders() {
    let write = std::env::var_os("MODCOND_WRITE_SCENARIOS").is_some();
    for (name, build) in builders() {
        let text = build().to_text();
        if write {
            std::fs::write(scenario_dir().join(format!("{name}.scn")), &text).unwrap();
            continue;
        }
        assert_eq!(bundled(name).unwrap(), text, "{name}.scn is stale");
        let parsed = Scenario::parse(&text).unwrap();
        assert_eq!(parsed, build());
        assert_eq!(parsed.to_text(), text);
        Setup::new(parsed).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn group_orders() {
    let orders = [
        ("s3_toy", 2u32, 3u32),
        ("s4_s3", 6, 4),
        ("s5_pairs", 12, 10),
        ("l3_2", 24, 21),
        ("m11", 720, 660),
    ];
    for (name, h, u) in orders {
        let s = Setup::new(Scenario::load(name).unwrap()).unwrap();
        assert_eq!(s.h.order(), h.into(), "{name}");
        assert_eq!(s.u.order(), u.into(), "{name}");
    }
}

#[test]
fn variants_validate() {
    for v in [UVariant::Whole, UVariant::Trivial, UVariant::SameAsH] {
        for sc in [build_s3_toy_variant(v), build_s4_s3_variant(v)] {
            let text = sc.to_text();
            let s = Setup::new(Scenario::parse(&text).unwrap()).unwrap();
            match v {
                UVariant::Whole => assert_eq!(s.u.order(), s.u.perms.order()),
                UVariant::Trivial => assert_eq!(s.u.order(), 1u32.into()),
                UVariant::SameAsH => assert_eq!(s.u.order(), s.h.order()),
            }
        }
    }
}

#[test]
fn digest_changes_with_content() {
    let a = build_s3_toy();
    let mut b = a.clone();
    b.seed += 1;
    assert_eq!(a.digest().len(), 64);
    assert_ne!(a.digest(), b.digest());
    assert_eq!(a.digest(), Scenario::parse(&a.to_text()).unwrap().digest());
}

#[test]
fn comments_are_ignored() {
    let text = build_s3_toy().to_text();
    let commented = format!(
        "# toy example\n{}",
        text.replacen("name", "# inner\nname", 1)
    );
    assert_eq!(Scenario::parse(&commented).unwrap(), build_s3_toy());
}

#[test]
fn unknown_subgroup_label_is_named() {
    let text = build_s3_toy()
        .to_text()
        .replace("subgroup U ", "subgroup V ");
    let sc = Scenario::parse(&text);
    match sc {
        Err(ScenarioError::UnknownLabel(l)) => assert_eq!(l, "U"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn characteristic_dividing_h_is_rejected() {
    let mut sc = build_s3_toy();
    sc.coefficient_field = 2;
    for m in &mut sc.modules {
        m.mats = vec![modcond::gfmat::FpMatrix::identity(
            modcond::gfmat::Fp::new(2).unwrap(),
            1,
        )];
    }
    assert!(matches!(
        Setup::new(sc),
        Err(ScenarioError::CharDivides { p: 2, .. })
    ));
}

#[test]
fn inconsistent_permutations_are_rejected() {
    let mut sc = modcond::scenario::build_s4_s3();
    // two different matrices would share the permutation (1 2)
    sc.subgroups[0].perms[1] = sc.subgroups[0].perms[0].clone();
    assert!(matches!(Setup::new(sc), Err(ScenarioError::Invalid(_))));
}

#[test]
fn bad_inputs_report_a_line() {
    let text = build_s3_toy()
        .to_text()
        .replace("orbit-size 3", "orbit-size three");
    match Scenario::parse(&text) {
        Err(ScenarioError::Parse { line, .. }) => assert!(line > 1),
        other => panic!("unexpected {other:?}"),
    }
    let mut sc = build_s3_toy();
    sc.split_element = Some(0);
    assert!(Setup::new(sc).is_err());
    let mut sc = build_s3_toy();
    sc.seed_vector = modcond::scenario::SeedVectorRule::Explicit(vec![1, 0]);
    assert!(Setup::new(sc).is_err());
}

#[test]
fn bundled_suborbit_lengths() {
    use modcond::orbits::{enumerate_suborbits, verify_disjoint, EngineConfig};
    use modcond::scenario::Side;
    let expect: [(&str, &[u64], &[u64]); 5] = [
        ("s3_toy", &[1, 2], &[3]),
        ("s4_s3", &[1, 3], &[4]),
        ("s5_pairs", &[1, 3, 6], &[5, 5]),
        ("l3_2", &[1, 6], &[7]),
        ("m11", &[1, 10], &[11]),
    ];
    for (name, h, u) in expect {
        let s = Setup::new(Scenario::load(name).unwrap()).unwrap();
        for (side, want) in [(Side::H, h), (Side::U, u)] {
            let eng = s.engine(side, EngineConfig::default()).unwrap();
            let db = enumerate_suborbits(eng, side.label(), s.scenario.seed).unwrap();
            let mut lens = db.lengths();
            lens.sort();
            assert_eq!(lens, want, "{name} {side}");
            assert!(verify_disjoint(&db).ok());
        }
    }
}
