use std::sync::Arc;

use modcond::gfmat::{Fp, FpMatrix, FpVector};
use modcond::orbits::{
    direct_orbit, enumerate_suborbits, load_db, save_db, stream_rng, verify_disjoint, ActingGroup,
    EngineConfig, HelperConfig, OrbitEngine, OrbitError,
};
use modcond::permgrp::{GroupWord, Perm};
use modcond::rep::MatRep;

fn w(l: &[i32]) -> GroupWord {
    GroupWord::new(l.to_vec()).unwrap()
}

fn perm_matrix(f: Fp, p: &Perm) -> FpMatrix {
    let imgs: Vec<usize> = p.images().iter().map(|&x| x as usize).collect();
    FpMatrix::permutation(f, &imgs)
}

/// Natural permutation module of `Sym(n)` generated by `gens`.
struct PermSetup {
    f: Fp,
    n: usize,
    gens: Vec<Perm>,
    ambient: MatRep,
}

impl PermSetup {
    fn new(q: u64, n: usize, gens: Vec<Perm>) -> PermSetup {
        let f = Fp::new(q).unwrap();
        let mats = gens.iter().map(|g| perm_matrix(f, g)).collect();
        PermSetup {
            f,
            n,
            ambient: MatRep::new(f, n, mats).unwrap(),
            gens,
        }
    }

    fn group(&self, name: &str, words: &[GroupWord]) -> ActingGroup {
        let perms = words
            .iter()
            .map(|x| x.eval_perm(&self.gens, self.n))
            .collect();
        ActingGroup::new(name, &self.ambient, words.to_vec(), perms, self.n).unwrap()
    }

    fn engine(
        &self,
        v1: FpVector,
        orbit_size: u64,
        group: ActingGroup,
        helper: Option<(Vec<GroupWord>, FpMatrix)>,
        config: EngineConfig,
    ) -> Arc<OrbitEngine> {
        let helper = match helper {
            None => HelperConfig::trivial(&group).unwrap(),
            Some((k, q)) => HelperConfig::new(&group, k, q, 10_000, None).unwrap(),
        };
        OrbitEngine::new(
            self.ambient.clone(),
            v1,
            orbit_size,
            group,
            helper,
            config,
            "test-digest",
        )
        .unwrap()
    }
}

fn s4() -> PermSetup {
    PermSetup::new(
        5,
        4,
        vec![
            Perm::from_cycles(4, &[&[1, 2, 3, 4]]).unwrap(),
            Perm::from_cycles(4, &[&[1, 2]]).unwrap(),
        ],
    )
}

#[test]
fn s4_point_stabilizer_suborbits() {
    let s = s4();
    let h = s.group("H", &[w(&[2]), w(&[-1, 2, 1])]);
    assert_eq!(h.order(), 6u32.into());
    let v1 = FpVector::unit(s.f, 4, 3);
    for helper in [None, Some((vec![w(&[1])], FpMatrix::identity(s.f, 4)))] {
        let eng = s.engine(v1.clone(), 4, h.clone(), helper, EngineConfig::default());
        let db = enumerate_suborbits(eng, "H", 1).unwrap();
        let mut lens = db.lengths();
        lens.sort();
        assert_eq!(lens, vec![1, 3]);
        assert!(verify_disjoint(&db).ok());
    }
}

#[test]
fn s4_cyclic_subgroup_single_suborbit() {
    let s = s4();
    let u = s.group("U", &[w(&[1])]);
    let eng = s.engine(
        FpVector::unit(s.f, 4, 3),
        4,
        u,
        None,
        EngineConfig::default(),
    );
    let db = enumerate_suborbits(eng, "U", 7).unwrap();
    assert_eq!(db.lengths(), vec![4]);
    assert_eq!(db.suborbits()[0].stabilizer_order(), 1u32.into());
}

#[test]
fn helper_quotient_must_be_equivariant() {
    let s = s4();
    let h = s.group("H", &[w(&[2]), w(&[-1, 2, 1])]);
    // projection onto the first coordinate is not preserved by (1 2)
    let q = FpMatrix::from_i64(s.f, 4, 1, &[1, 0, 0, 0]).unwrap();
    assert!(matches!(
        HelperConfig::new(&h, vec![w(&[1])], q, 100, None),
        Err(OrbitError::Config(_))
    ));
    // coordinates 3 and 4 are fixed by (1 2)
    let q = FpMatrix::from_i64(s.f, 4, 2, &[0, 0, 0, 0, 1, 0, 0, 1]).unwrap();
    let hc = HelperConfig::new(&h, vec![w(&[1])], q, 100, None).unwrap();
    let c = hc.canon(&FpVector::from_i64(s.f, &[3, 1, 0, 0])).unwrap();
    assert_eq!(c.point, FpVector::from_i64(s.f, &[1, 3, 0, 0]));
    assert_eq!(c.stab_order, 1);
}

fn s5() -> PermSetup {
    PermSetup::new(
        7,
        5,
        vec![
            Perm::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap(),
            Perm::from_cycles(5, &[&[1, 2]]).unwrap(),
        ],
    )
}

#[test]
fn regular_orbit_saving_factor() {
    let s = s5();
    let full = s.group("S", &[w(&[1]), w(&[2])]);
    let k = vec![w(&[1]), w(&[-1, 2, 1, 2])];
    let v1 = FpVector::from_i64(s.f, &[0, 1, 2, 3, 4]);
    let eng = s.engine(
        v1,
        120,
        full,
        Some((k, FpMatrix::identity(s.f, 5))),
        EngineConfig::default(),
    );
    assert_eq!(eng.helper.order(), 60);
    let db = enumerate_suborbits(eng, "S", 3).unwrap();
    assert_eq!(db.lengths(), vec![120]);
    let st = db.stats();
    assert_eq!(st.suborbits[0].stored, 2);
    assert_eq!(st.suborbits[0].saving, 60.0);
}

#[test]
fn transitive_quotient_has_one_helper_orbit() {
    let s = s5();
    let full = s.group("S", &[w(&[1]), w(&[2])]);
    // the sum map F^5 -> F is invariant, so W = F with trivial action
    let q = FpMatrix::from_i64(s.f, 5, 1, &[1, 1, 1, 1, 1]).unwrap();
    let hc = HelperConfig::new(&full, vec![w(&[1]), w(&[2])], q, 1000, None).unwrap();
    hc.classify(&[FpVector::from_i64(s.f, &[3])]).unwrap();
    let orbits = hc.helper_orbits();
    assert_eq!(orbits.len(), 1);
    assert_eq!(orbits[0].size, 1);
    assert_eq!(orbits[0].stabilizer_order, 120);
    let c = hc
        .canon(&FpVector::from_i64(s.f, &[2, 0, 1, 0, 0]))
        .unwrap();
    assert_eq!(c.point, FpVector::from_i64(s.f, &[0, 0, 0, 1, 2]));
    assert_eq!(c.stab_order, 6);
}

fn pairs_engine(config: EngineConfig) -> Arc<OrbitEngine> {
    // S5 on unordered pairs via v1 = e1 + e2; H = S2 x S3 = Stab({1,2})
    let s = s5();
    let h = s.group(
        "H",
        &[w(&[2]), w(&[1, 1, 2, -1, -1]), w(&[1, 1, 1, 2, -1, -1, -1])],
    );
    let v1 = FpVector::from_i64(s.f, &[1, 1, 0, 0, 0]);
    let k = vec![w(&[2])];
    s.engine(v1, 10, h, Some((k, FpMatrix::identity(s.f, 5))), config)
}

#[test]
fn pairs_suborbits_membership_and_transporters() {
    let eng = pairs_engine(EngineConfig::default());
    assert_eq!(eng.group.order(), 12u32.into());
    let db = enumerate_suborbits(Arc::clone(&eng), "H", 11).unwrap();
    let mut lens = db.lengths();
    lens.sort();
    assert_eq!(lens, vec![1, 3, 6]);
    let orbit = direct_orbit(&eng.seed_vector, eng.ambient.generators(), 100).unwrap();
    assert_eq!(orbit.len(), 10);
    let mut rng = stream_rng(5, 9, 0);
    for v in orbit.points() {
        let (j, u) = db.transporter(v, &mut rng).unwrap();
        assert_eq!(
            eng.group.action.act(&db.suborbits()[j].rep, &u).unwrap(),
            *v
        );
        // the number of common nonzero coordinates with v1 identifies the suborbit
        let common = (0..2).filter(|&i| v.get(i) != 0).count();
        let expect = [3, 6, 1][common];
        assert_eq!(db.suborbits()[j].length, expect);
    }
    let off = FpVector::from_i64(eng.ambient.field(), &[2, 0, 0, 0, 0]);
    assert_eq!(db.membership_test(&off, &mut rng).unwrap(), None);
}

#[test]
fn persistence_round_trip_is_deterministic() {
    let eng = pairs_engine(EngineConfig::default());
    let db = enumerate_suborbits(Arc::clone(&eng), "H", 11).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    save_db(&db, a.path()).unwrap();
    let again = enumerate_suborbits(Arc::clone(&eng), "H", 11).unwrap();
    save_db(&again, b.path()).unwrap();
    for name in [
        "manifest.txt",
        "suborbit_1.bin",
        "suborbit_2.bin",
        "suborbit_3.bin",
    ] {
        let x = std::fs::read(a.path().join("H").join(name)).unwrap();
        let y = std::fs::read(b.path().join("H").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let loaded = load_db(Arc::clone(&eng), a.path(), "H").unwrap();
    assert_eq!(loaded.lengths(), db.lengths());
    for (x, y) in loaded.suborbits().iter().zip(db.suborbits()) {
        assert_eq!(x.store, y.store);
        assert_eq!(x.gamma, y.gamma);
    }
    assert!(verify_disjoint(&loaded).ok());
    assert!(matches!(
        load_db(eng, a.path(), "U"),
        Err(OrbitError::Persist(_))
    ));
}

#[test]
fn resume_matches_a_fresh_run() {
    let full = pairs_engine(EngineConfig::default());
    let fresh = enumerate_suborbits(Arc::clone(&full), "H", 4).unwrap();
    let short = pairs_engine(EngineConfig {
        max_draws: 1,
        ..EngineConfig::default()
    });
    let partial = enumerate_suborbits(short, "H", 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_db(&partial, dir.path()).unwrap();
    let mut resumed = load_db(Arc::clone(&full), dir.path(), "H").unwrap();
    assert_eq!(resumed.draws, partial.draws);
    resumed.discover().unwrap();
    assert!(resumed.is_complete());
    assert_eq!(resumed.draws, fresh.draws);
    assert_eq!(resumed.lengths(), fresh.lengths());
}

#[test]
fn memory_limit_is_a_resource_error() {
    let eng = pairs_engine(EngineConfig {
        mem_limit: Some(64),
        ..EngineConfig::default()
    });
    assert!(matches!(
        enumerate_suborbits(eng, "H", 1),
        Err(OrbitError::Resource(_))
    ));
}
