use num_bigint::BigUint;

use modcond::endo::{
    default_split_element, intersection_csv, intersection_matrices, orbit_counting, rank_of_e,
    schur_basis, suborbit_points, CountConfig, DoubleCosetData, EndoError,
};
use modcond::orbits::{enumerate_suborbits, EngineConfig, OrbitDB};
use modcond::scenario::{Scenario, Setup, Side};

fn dbs(name: &str) -> (Setup, OrbitDB, OrbitDB) {
    let s = Setup::new(Scenario::load(name).unwrap()).unwrap();
    let seed = s.scenario.seed;
    let h = enumerate_suborbits(
        s.engine(Side::H, EngineConfig::default()).unwrap(),
        "H",
        seed,
    )
    .unwrap();
    let u = enumerate_suborbits(
        s.engine(Side::U, EngineConfig::default()).unwrap(),
        "U",
        seed,
    )
    .unwrap();
    (s, h, u)
}

fn big(x: u32) -> BigUint {
    BigUint::from(x)
}

#[test]
fn s3_over_s2_structure_constants() {
    let (_, h, _) = dbs("s3_toy");
    let two = h.lengths().iter().position(|&n| n == 2).unwrap();
    let t = orbit_counting(&h, &h, two, None, CountConfig::default()).unwrap();
    assert_eq!(t.c[two][two], 1);
    assert_eq!(t.c[0][two], 2);
    let p = intersection_matrices(&h, CountConfig::default()).unwrap();
    assert_eq!(p[two][two], vec![big(2), big(1)]);
    assert_eq!(p[0][0], vec![big(1), big(0)]);
}

#[test]
fn schur_basis_matches_suborbits() {
    let (_, h, _) = dbs("s5_pairs");
    let basis = schur_basis(&h);
    assert_eq!(basis.len(), 3);
    assert_eq!(rank_of_e(&h), 3);
    let lens: Vec<u64> = basis.iter().map(|b| b.length).collect();
    assert_eq!(lens, h.lengths());
    let i = default_split_element(&h);
    assert_eq!(h.lengths()[i], 3);
    for (i, n) in h.lengths().into_iter().enumerate() {
        assert_eq!(suborbit_points(&h, i, 100).unwrap().len() as u64, n);
    }
}

#[test]
fn counting_respects_the_point_bound() {
    let (_, h, u) = dbs("m11");
    let cfg = CountConfig {
        point_bound: 5,
        ..CountConfig::default()
    };
    let big_one = h.lengths().iter().position(|&n| n > 5).unwrap();
    let err = orbit_counting(&h, &u, big_one, None, cfg).unwrap_err();
    assert!(
        matches!(
            err,
            EndoError::TooLarge {
                n: 10,
                bound: 5,
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn intersection_numbers_have_the_right_mass() {
    for name in ["s4_s3", "s5_pairs", "l3_2", "m11"] {
        let (_, h, _) = dbs(name);
        let n = h.lengths();
        let p = intersection_matrices(&h, CountConfig::default()).unwrap();
        for (i, pi) in p.iter().enumerate() {
            let mut duals = 0;
            for (j, row) in pi.iter().enumerate() {
                let mass: BigUint = row
                    .iter()
                    .zip(&n)
                    .map(|(x, &nk)| x * BigUint::from(nk))
                    .sum();
                assert_eq!(mass, BigUint::from(n[i] * n[j]), "{name} i={i} j={j}");
                // p_j1(i) is n_j when O_j is the dual of O_i, else 0
                if row[0] == BigUint::from(n[j]) {
                    duals += 1;
                } else {
                    assert_eq!(row[0], big(0));
                }
            }
            assert_eq!(duals, 1, "{name} i={i}");
        }
    }
}

#[test]
fn intersection_matrices_form_the_regular_representation() {
    // L(i) L(i') = sum_m p_im(i') L(m)
    for name in ["s5_pairs", "l3_2"] {
        let (_, h, _) = dbs(name);
        let p = intersection_matrices(&h, CountConfig::default()).unwrap();
        let r = p.len();
        let mul = |a: &Vec<Vec<BigUint>>, b: &Vec<Vec<BigUint>>| -> Vec<Vec<BigUint>> {
            (0..r)
                .map(|x| {
                    (0..r)
                        .map(|z| (0..r).map(|y| &a[x][y] * &b[y][z]).sum())
                        .collect()
                })
                .collect()
        };
        for i in 0..r {
            for i2 in 0..r {
                let lhs = mul(&p[i], &p[i2]);
                let mut rhs = vec![vec![big(0); r]; r];
                for m in 0..r {
                    for x in 0..r {
                        for z in 0..r {
                            rhs[x][z] += &p[i2][i][m] * &p[m][x][z];
                        }
                    }
                }
                assert_eq!(lhs, rhs, "{name} i={i} i'={i2}");
            }
        }
    }
}

#[test]
fn double_cosets_partition_each_stabilizer() {
    let (_, _, u) = dbs("s5_pairs");
    let dc = DoubleCosetData::new(&u, 1000).unwrap();
    let s = u.suborbits().len();
    for j in 0..s {
        for k in 0..s {
            // the classes split the n_k right cosets of U_k
            let total: u64 = (0..dc.count(j, k)).map(|l| dc.omega_size(j, k, l)).sum();
            let uk = u.suborbits()[k].length;
            assert_eq!(total, uk, "j={j} k={k}");
        }
    }
}

#[test]
fn counting_is_worker_and_seed_independent() {
    let (_, h, u) = dbs("m11");
    let dc = DoubleCosetData::new(&u, 1000).unwrap();
    let a = orbit_counting(&h, &u, 1, Some(&dc), CountConfig::default()).unwrap();
    let b = orbit_counting(
        &h,
        &u,
        1,
        Some(&dc),
        CountConfig {
            seed: 17,
            workers: 3,
            ..CountConfig::default()
        },
    )
    .unwrap();
    assert_eq!(a.c, b.c);
    assert_eq!(a.cl, b.cl);
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.to_csv().starts_with("2,1,1,"));
}

#[test]
fn csv_is_one_based() {
    let p = vec![vec![big(1), big(0)], vec![big(0), big(1)]];
    assert_eq!(
        intersection_csv(0, &p),
        "1,1,1,1\n1,1,2,0\n1,2,1,0\n1,2,2,1\n"
    );
}
