use modcond::condense::{
    build_condensed_space, condensed_action, dims_for_eigenvalues, eigenspace_table,
    idempotent_split, split_identities_hold, BlockOperator, CondenseError,
};
use modcond::endo::CountConfig;
use modcond::gfmat::{Fp, FpMatrix};
use modcond::orbits::{enumerate_suborbits, EngineConfig, OrbitDB};
use modcond::rep::MatRep;
use modcond::scenario::{Scenario, Setup, Side};

fn dbs(name: &str) -> (Setup, OrbitDB, OrbitDB) {
    let s = Setup::new(Scenario::load(name).unwrap()).unwrap();
    let h =
        enumerate_suborbits(s.engine(Side::H, EngineConfig::default()).unwrap(), "H", 1).unwrap();
    let u =
        enumerate_suborbits(s.engine(Side::U, EngineConfig::default()).unwrap(), "U", 1).unwrap();
    (s, h, u)
}

#[test]
fn s3_toy_condensed_a2() {
    let (s, h, u) = dbs("s3_toy");
    let cs = build_condensed_space(s.module("chi2").unwrap(), &u).unwrap();
    assert_eq!(cs.dim, 1);
    let i = if h.suborbits()[1].length == 2 { 1 } else { 0 };
    let op = condensed_action(&h, &u, i, &cs, CountConfig::default()).unwrap();
    assert_eq!(op.matrix.get(0, 0), 6);
}

#[test]
fn a1_is_the_identity_and_seed_free() {
    let (s, h, u) = dbs("l3_2");
    let cs = build_condensed_space(s.module("perm7").unwrap(), &u).unwrap();
    let a1 = condensed_action(&h, &u, 0, &cs, CountConfig::default()).unwrap();
    assert!(a1.matrix.is_identity());
    let a = condensed_action(&h, &u, 1, &cs, CountConfig::default()).unwrap();
    let b = condensed_action(
        &h,
        &u,
        1,
        &cs,
        CountConfig {
            seed: 9,
            workers: 4,
            ..CountConfig::default()
        },
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn operator_text_round_trips() {
    let (s, h, u) = dbs("m11");
    let cs = build_condensed_space(s.module("perm11").unwrap(), &u).unwrap();
    let op = condensed_action(&h, &u, 1, &cs, CountConfig::default()).unwrap();
    let text = op.to_text();
    assert!(text.starts_with(&format!("blocks {}", cs.block_dims().len())));
    let back = BlockOperator::parse(&op.label, &text).unwrap();
    assert_eq!(back, op);
    assert!(BlockOperator::parse("x", "blocks 2 1\nmatrix 7 1 1\n1\n").is_err());
    assert!(BlockOperator::parse("x", "blocks 1 2\nmatrix 7 1 1\n1\n").is_err());
}

#[test]
fn split_of_a_diagonal_matrix() {
    let f = Fp::new(7).unwrap();
    let a = FpMatrix::from_i64(f, 3, 3, &[3, 0, 0, 0, 3, 0, 0, 0, 5]).unwrap();
    let split = idempotent_split(&a).unwrap();
    assert!(split_identities_hold(&a, &split));
    assert_eq!(dims_for_eigenvalues(&split, &[3, 5, 1]), vec![2, 1, 0]);
    assert!(split.iter().all(|c| c.h == 1));
}

#[test]
fn split_with_a_jordan_block_and_a_nonlinear_factor() {
    // X^2 + 1 is irreducible mod 7
    let f = Fp::new(7).unwrap();
    let a =
        FpMatrix::from_i64(f, 4, 4, &[2, 1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0]).unwrap();
    let split = idempotent_split(&a).unwrap();
    assert!(split_identities_hold(&a, &split));
    assert_eq!(split.len(), 2);
    let lin = split.iter().find(|c| c.eigenvalue() == Some(2)).unwrap();
    assert_eq!((lin.h, lin.d), (2, 2));
    let quad = split.iter().find(|c| c.eigenvalue().is_none()).unwrap();
    assert_eq!((quad.factor.degree(), quad.d), (Some(2), 2));
    let op = BlockOperator {
        label: "T".into(),
        blocks: vec![4],
        matrix: a,
    };
    let table = eigenspace_table(&op, &split);
    assert!(table.contains("nonlinear factor"));
    assert!(table.lines().last().unwrap().trim_end().ends_with('4'));
}

#[test]
fn characteristic_dividing_a_stabilizer_is_reported() {
    // U_1 has order 3 in l3_2
    let (_, _, u) = dbs("l3_2");
    let f = Fp::new(3).unwrap();
    let gens = vec![FpMatrix::identity(f, 1); u.engine().group.ngens()];
    let v = MatRep::new(f, 1, gens).unwrap();
    let err = build_condensed_space(&v, &u).unwrap_err();
    assert!(
        matches!(err, CondenseError::CharDivides { p: 3, j: 1, .. }),
        "{err}"
    );
}
