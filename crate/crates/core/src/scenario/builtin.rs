//! Built-in scenarios. The `.scn` files under `scenarios/` are generated from
//! these builders and a test keeps the two in sync.

use std::collections::{HashSet, VecDeque};

use crate::gfmat::{Fp, FpMatrix, FpVector};
use crate::permgrp::{GroupWord, Perm, PermGroup};
use crate::rep::fixed_vectors;

use super::{HelperDef, ModuleDef, Scenario, SeedVectorRule, SubgroupDef};

const BUNDLED: &[(&str, &str)] = &[
    ("s3_toy", include_str!("../../scenarios/s3_toy.scn")),
    ("s4_s3", include_str!("../../scenarios/s4_s3.scn")),
    ("s5_pairs", include_str!("../../scenarios/s5_pairs.scn")),
    ("l3_2", include_str!("../../scenarios/l3_2.scn")),
    ("m11", include_str!("../../scenarios/m11.scn")),
];

/// Text of a bundled scenario.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Alternative choices of `U` used to cross-check the condensed algebra
/// against the plain orbital algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UVariant {
    /// `U = G`
    Whole,
    /// `U = 1`
    Trivial,
    /// `U = H`
    SameAsH,
}

fn w(l: &[i32]) -> GroupWord {
    GroupWord::new(l.to_vec()).expect("nonzero letters")
}

fn field(p: u64) -> Fp {
    Fp::new(p).expect("prime")
}

fn cyc(n: usize, cycles: &[&[usize]]) -> Perm {
    Perm::from_cycles(n, cycles).expect("valid cycles")
}

fn perm_matrix(f: Fp, p: &Perm) -> FpMatrix {
    let imgs: Vec<usize> = p.images().iter().map(|&x| x as usize).collect();
    FpMatrix::permutation(f, &imgs)
}

fn scalar(f: Fp, c: i64) -> FpMatrix {
    FpMatrix::from_i64(f, 1, 1, &[c]).expect("1x1")
}

fn subgroup(label: &str, gens: &[Perm], degree: usize, words: Vec<GroupWord>) -> SubgroupDef {
    let perms = words.iter().map(|x| x.eval_perm(gens, degree)).collect();
    SubgroupDef {
        label: label.into(),
        degree,
        words,
        perms,
    }
}

fn perm_module(name: &str, f: Fp, perms: &[Perm]) -> ModuleDef {
    ModuleDef {
        name: name.into(),
        dim: perms.first().map_or(0, |p| p.degree()),
        mats: perms.iter().map(|p| perm_matrix(f, p)).collect(),
    }
}

fn trivial_module(f: Fp, ngens: usize) -> ModuleDef {
    ModuleDef {
        name: "trivial".into(),
        dim: 1,
        mats: vec![scalar(f, 1); ngens],
    }
}

/// `F^n -> F^(n-1)` with `e_i -> e_i` and `e_n -> -(e_1 + ... + e_(n-1))`.
/// Its kernel is spanned by the all-ones vector.
fn sum_zero_quotient(f: Fp, n: usize) -> FpMatrix {
    let mut q = FpMatrix::zero(f, n, n - 1);
    for i in 0..n - 1 {
        q.set(i, i, 1);
        q.set(n - 1, i, f.neg(1));
    }
    q
}

/// A projection whose kernel is exactly `<x>`.
fn line_quotient(x: &FpVector) -> FpMatrix {
    let f = x.field();
    let row = FpMatrix::from_rows(f, x.len(), std::slice::from_ref(x)).expect("one row");
    let cols = row.nullspace();
    FpMatrix::from_rows(f, x.len(), &cols)
        .expect("rows")
        .transpose()
}

/// Breadth-first search through the group generated by `gens`, returning the
/// first element (and its word) accepted by `pred`.
fn search<F: FnMut(&Perm) -> bool>(gens: &[Perm], mut pred: F) -> Option<(Perm, GroupWord)> {
    let degree = gens[0].degree();
    let id = Perm::identity(degree);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([(id, GroupWord::empty())]);
    while let Some((p, pw)) = queue.pop_front() {
        if pred(&p) {
            return Some((p, pw));
        }
        for (gi, g) in gens.iter().enumerate() {
            let q = p.mul(g);
            if seen.insert(q.clone()) {
                queue.push_back((q, pw.concat(&GroupWord::generator(gi))));
            }
        }
    }
    None
}

fn order_of(degree: usize, gens: Vec<Perm>) -> u64 {
    let o = PermGroup::new(degree, gens).expect("same degree").order();
    u64::try_from(o).expect("small group")
}

fn scenario(name: &str, seed: u64, q: Fp, gens: &[FpMatrix]) -> Scenario {
    Scenario {
        name: name.into(),
        seed,
        action_field: q.p(),
        action_dim: gens[0].rows(),
        generators: gens.to_vec(),
        seed_vector: SeedVectorRule::Explicit(vec![]),
        orbit_size: 0,
        subgroups: vec![],
        helpers: vec![],
        coefficient_field: 0,
        modules: vec![],
        split_element: None,
    }
}

fn s3_perms() -> Vec<Perm> {
    vec![cyc(3, &[&[1, 2, 3]]), cyc(3, &[&[1, 2]])]
}

/// `S3` permuting coordinates of `F_7^3`, `H = <(1 2)>`, `U = <(1 2 3)>`.
pub fn build_s3_toy() -> Scenario {
    let q = field(7);
    let g = s3_perms();
    let mats: Vec<FpMatrix> = g.iter().map(|p| perm_matrix(q, p)).collect();
    let mut sc = scenario("s3_toy", 1, q, &mats);
    sc.seed_vector = SeedVectorRule::Explicit(vec![0, 0, 1]);
    sc.orbit_size = 3;
    sc.subgroups = vec![
        subgroup("H", &g, 3, vec![w(&[2])]),
        subgroup("U", &g, 3, vec![w(&[1])]),
    ];
    sc.coefficient_field = 7;
    sc.modules = [("chi2", 2), ("chi4", 4), ("trivial", 1)]
        .iter()
        .map(|&(n, c)| ModuleDef {
            name: n.into(),
            dim: 1,
            mats: vec![scalar(q, c)],
        })
        .collect();
    sc
}

fn s4_perms() -> Vec<Perm> {
    vec![cyc(4, &[&[1, 2, 3, 4]]), cyc(4, &[&[1, 2]])]
}

/// `S4` on `F_5^4`, `H = S3` fixing the last point, `U = C4`.
pub fn build_s4_s3() -> Scenario {
    let q = field(5);
    let g = s4_perms();
    let mats: Vec<FpMatrix> = g.iter().map(|p| perm_matrix(q, p)).collect();
    let mut sc = scenario("s4_s3", 2, q, &mats);
    sc.seed_vector = SeedVectorRule::Explicit(vec![0, 0, 0, 1]);
    sc.orbit_size = 4;
    sc.subgroups = vec![
        subgroup("H", &g, 4, vec![w(&[2]), w(&[-1, 2, 1])]),
        subgroup("U", &g, 4, vec![w(&[1])]),
    ];
    sc.helpers = vec![HelperDef {
        label: "H".into(),
        words: vec![w(&[1])],
        quotient: sum_zero_quotient(q, 4),
    }];
    sc.coefficient_field = 5;
    sc.modules = (1..=4)
        .map(|c| ModuleDef {
            name: format!("chi{c}"),
            dim: 1,
            mats: vec![scalar(q, c)],
        })
        .collect();
    sc
}

fn s5_perms() -> Vec<Perm> {
    vec![cyc(5, &[&[1, 2, 3, 4, 5]]), cyc(5, &[&[1, 2]])]
}

/// `S5` on unordered pairs, `H = S2 x S3`, `U = D10`.
pub fn build_s5_pairs() -> Scenario {
    let q = field(7);
    let g = s5_perms();
    let mats: Vec<FpMatrix> = g.iter().map(|p| perm_matrix(q, p)).collect();
    let mut sc = scenario("s5_pairs", 3, q, &mats);
    sc.seed_vector = SeedVectorRule::Explicit(vec![1, 1, 0, 0, 0]);
    sc.orbit_size = 10;
    let refl = cyc(5, &[&[2, 5], &[3, 4]]);
    let (_, rw) = search(&g, |p| *p == refl).expect("reflection in S5");
    let h = subgroup(
        "H",
        &g,
        5,
        vec![w(&[2]), w(&[1, 1, 2, -1, -1]), w(&[1, 1, 1, 2, -1, -1, -1])],
    );
    let u = subgroup("U", &g, 5, vec![w(&[1]), rw]);
    sc.helpers = vec![HelperDef {
        label: "H".into(),
        words: vec![w(&[1])],
        quotient: sum_zero_quotient(q, 5),
    }];
    sc.coefficient_field = 7;
    sc.modules = vec![
        trivial_module(q, 2),
        ModuleDef {
            name: "sign".into(),
            dim: 1,
            mats: vec![scalar(q, 1), scalar(q, -1)],
        },
        perm_module("perm5", q, &u.perms),
    ];
    sc.subgroups = vec![h, u];
    sc
}

/// `GL(3,2)` on `F_2^3`, `H` the stabilizer of a nonzero vector, `U = 7:3`.
pub fn build_l3_2() -> Scenario {
    let q = field(2);
    let c = FpMatrix::from_i64(q, 3, 3, &[0, 1, 0, 0, 0, 1, 1, 1, 0]).expect("3x3");
    let t = FpMatrix::from_i64(q, 3, 3, &[1, 0, 0, 1, 1, 0, 0, 0, 1]).expect("3x3");
    let mats = vec![c, t];
    // permutation side: the 7 nonzero vectors, point i-1 <-> binary digits of i
    let vec_of = |i: usize| {
        FpVector::from_i64(
            q,
            &[((i >> 2) & 1) as i64, ((i >> 1) & 1) as i64, (i & 1) as i64],
        )
    };
    let index_of =
        |v: &FpVector| (v.get(0) as usize) << 2 | (v.get(1) as usize) << 1 | v.get(2) as usize;
    let g: Vec<Perm> = mats
        .iter()
        .map(|m| {
            Perm::from_images(
                (1..=7)
                    .map(|i| (index_of(&vec_of(i).mul_mat(m)) - 1) as u32)
                    .collect(),
            )
            .expect("GL(3,2) permutes nonzero vectors")
        })
        .collect();
    assert_eq!(order_of(7, g.clone()), 168);
    let mut sc = scenario("l3_2", 4, q, &mats);
    let point = index_of(&FpVector::from_i64(q, &[1, 0, 0])) - 1;
    let hw = PermGroup::new(7, g.clone())
        .expect("degree 7")
        .stabilizer_words(point)
        .expect("point in range");
    let h = subgroup("H", &g, 7, hw);
    let (y, yw) = search(&g, |p| {
        p.order() == 3 && order_of(7, vec![g[0].clone(), p.clone()]) == 21
    })
    .expect("7:3 inside L3(2)");
    let u = subgroup("U", &g, 7, vec![w(&[1]), yw]);
    sc.seed_vector = SeedVectorRule::UniqueFixed("H".into());
    sc.orbit_size = 7;
    let (_, kw) = search(&h.perms, |p| p.order() == 3).expect("element of order 3 in H");
    let fixed_y = fixed_vectors(q, 3, &[y_matrix(&mats, &u.words[1])]);
    debug_assert_eq!(y.order(), 3);
    sc.helpers = vec![
        HelperDef {
            label: "H".into(),
            words: vec![kw],
            quotient: line_quotient(&FpVector::from_i64(q, &[1, 0, 0])),
        },
        HelperDef {
            label: "U".into(),
            words: vec![w(&[2])],
            quotient: line_quotient(&fixed_y[0]),
        },
    ];
    let p = field(5);
    sc.coefficient_field = 5;
    sc.modules = vec![trivial_module(p, 2), perm_module("perm7", p, &u.perms)];
    sc.subgroups = vec![h, u];
    sc
}

fn y_matrix(mats: &[FpMatrix], word: &GroupWord) -> FpMatrix {
    let f = mats[0].field();
    let inv: Vec<FpMatrix> = mats
        .iter()
        .map(|m| m.inverse().expect("invertible"))
        .collect();
    word.eval(mats, &inv, &FpMatrix::identity(f, mats[0].rows()))
}

fn m11_perms() -> Vec<Perm> {
    vec![
        cyc(11, &[&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]]),
        cyc(11, &[&[3, 7, 11, 8], &[4, 10, 5, 6]]),
    ]
}

/// `M11` on `F_7^11`, `H = M10`, `U = L2(11)`.
pub fn build_m11() -> Scenario {
    let q = field(7);
    let g = m11_perms();
    assert_eq!(order_of(11, g.clone()), 7920);
    let mats: Vec<FpMatrix> = g.iter().map(|p| perm_matrix(q, p)).collect();
    let mut sc = scenario("m11", 5, q, &mats);
    let mut e1 = vec![0; 11];
    e1[0] = 1;
    sc.seed_vector = SeedVectorRule::Explicit(e1);
    sc.orbit_size = 11;
    let hw = PermGroup::new(11, g.clone())
        .expect("degree 11")
        .stabilizer_words(0)
        .expect("point in range");
    let h = subgroup("H", &g, 11, hw);
    let (_, yw) = search(&g, |p| {
        !p.is_identity() && order_of(11, vec![g[0].clone(), p.clone()]) == 660
    })
    .expect("L2(11) inside M11");
    let u = subgroup("U", &g, 11, vec![w(&[1]), yw]);
    let (_, kh) = search(&h.perms, |p| p.order() == 5).expect("element of order 5 in H");
    let (_, ku) = search(&u.perms, |p| p.order() == 5).expect("element of order 5 in U");
    sc.helpers = vec![
        HelperDef {
            label: "H".into(),
            words: vec![kh],
            quotient: sum_zero_quotient(q, 11),
        },
        HelperDef {
            label: "U".into(),
            words: vec![ku],
            quotient: sum_zero_quotient(q, 11),
        },
    ];
    sc.coefficient_field = 7;
    sc.modules = vec![trivial_module(q, 2), perm_module("perm11", q, &u.perms)];
    sc.subgroups = vec![h, u];
    sc
}

fn apply_variant(mut sc: Scenario, v: UVariant, g: &[Perm]) -> Scenario {
    let degree = g[0].degree();
    let (suffix, u) = match v {
        UVariant::Whole => (
            "u_whole",
            subgroup(
                "U",
                g,
                degree,
                (1..=g.len() as i32).map(|i| w(&[i])).collect(),
            ),
        ),
        UVariant::Trivial => ("u_trivial", subgroup("U", g, degree, vec![])),
        UVariant::SameAsH => {
            let mut h = sc.subgroup("H").expect("H present").clone();
            h.label = "U".into();
            ("u_h", h)
        }
    };
    let p = field(sc.coefficient_field as u64);
    sc.name = format!("{}_{suffix}", sc.name);
    sc.modules = vec![trivial_module(p, u.words.len())];
    sc.helpers.retain(|h| h.label != "U");
    for s in &mut sc.subgroups {
        if s.label == "U" {
            *s = u.clone();
        }
    }
    sc.split_element = None;
    sc
}

pub fn build_s3_toy_variant(v: UVariant) -> Scenario {
    apply_variant(build_s3_toy(), v, &s3_perms())
}

pub fn build_s4_s3_variant(v: UVariant) -> Scenario {
    apply_variant(build_s4_s3(), v, &s4_perms())
}

/// Builders for every bundled file, in bundle order.
pub fn builders() -> Vec<(&'static str, fn() -> Scenario)> {
    vec![
        ("s3_toy", build_s3_toy as fn() -> Scenario),
        ("s4_s3", build_s4_s3),
        ("s5_pairs", build_s5_pairs),
        ("l3_2", build_l3_2),
        ("m11", build_m11),
    ]
}
