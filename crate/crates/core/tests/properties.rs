use proptest::prelude::*;

use modcond::condense::{idempotent_split, spectral_invariants, split_identities_hold};
use modcond::gfmat::{parse_matrix, write_matrix, Fp, FpMatrix};
use modcond::scenario::{bundled_names, Scenario};

fn matrix(p: u64, max_n: usize) -> impl Strategy<Value = FpMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(0..p as u32, n * n)
            .prop_map(move |data| FpMatrix::from_residues(Fp::new(p).unwrap(), n, n, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_identities_on_random_matrices(a in matrix(5, 6)) {
        let split = idempotent_split(&a).unwrap();
        prop_assert!(split_identities_hold(&a, &split));
    }

    #[test]
    fn split_identities_over_gf2(a in matrix(2, 7)) {
        let split = idempotent_split(&a).unwrap();
        prop_assert!(split_identities_hold(&a, &split));
    }

    #[test]
    fn spectral_invariants_are_similarity_invariant(a in matrix(7, 5), seed in 0u64..1000) {
        // conjugate by an invertible matrix built from the seed
        let n = a.rows();
        let f = a.field();
        let mut t = FpMatrix::identity(f, n);
        for i in 0..n {
            for j in i + 1..n {
                t.set(i, j, ((seed >> ((i + j) % 16)) % 7) as u32);
            }
        }
        let b = t.inverse().unwrap().mul(&a).mul(&t);
        prop_assert_eq!(spectral_invariants(&a).unwrap(), spectral_invariants(&b).unwrap());
    }

    #[test]
    fn matrix_text_round_trips(a in matrix(11, 6)) {
        prop_assert_eq!(parse_matrix(&write_matrix(&a)).unwrap(), a);
    }
}

#[test]
fn bundled_scenarios_round_trip() {
    for name in bundled_names() {
        let sc = Scenario::load(name).unwrap();
        let again = Scenario::parse(&sc.to_text()).unwrap();
        assert_eq!(again, sc, "{name}");
        assert_eq!(again.digest(), sc.digest());
    }
}
