//! Published reference data for the Janko group `J4` acting on the cosets of
//! `H = 2^10:L5(2)`, enumerated by `H` and by `U = U3(11):2`.
//!
//! These numbers are far beyond desk scale (the orbit has about `8.5e9`
//! points). They are stored for documentation and internal consistency
//! checks only.

use num_bigint::BigUint;

/// `|J4|` as prime powers.
pub const J4_ORDER_FACTORS: &[(u32, u32)] = &[
    (2, 21),
    (3, 3),
    (5, 1),
    (7, 1),
    (11, 3),
    (23, 1),
    (29, 1),
    (31, 1),
    (37, 1),
    (43, 1),
];

/// `|H| = |2^10:L5(2)|`
pub const H_ORDER: u64 = 10_239_344_640;

/// `|U| = |U3(11):2|`
pub const U_ORDER: u64 = 141_831_360;

/// Order of the helper subgroup `K = C_U(z)`.
pub const HELPER_ORDER: u64 = 10_560;

/// Range of the observed saving factors.
pub const SAVING_FACTOR_RANGE: (u64, u64) = (8022, 10497);

/// The 27 `H`-suborbit lengths `n_i`.
///
/// The published table prints `n_10 = 333120`, which does not divide `|H|`
/// and leaves the sum 3,000,000 short of `[G:H]`; `3333120` fixes both and
/// keeps the list sorted.
pub const H_SUBORBIT_LENGTHS: [u64; 27] = [
    1, 31, 930, 17360, 26040, 27776, 416640, 416640, 624960, 3333120, 4999680, 6666240, 6666240,
    9999360, 13332480, 53329920, 66060288, 79994880, 79994880, 159989760, 159989760, 319979520,
    341311488, 1279918080, 1279918080, 2047868928, 2559836160,
];

/// `U`-suborbit lengths as `(multiplicity, length)`, 131 in total.
pub const U_SUBORBIT_LENGTHS: &[(u32, u64)] = &[
    (1, 393976),
    (1, 738705),
    (1, 984940),
    (2, 1181928),
    (1, 1477410),
    (1, 2216115),
    (3, 2954820),
    (1, 3939760),
    (1, 5909640),
    (9, 8864460),
    (4, 11819280),
    (1, 14183136),
    (12, 17728920),
    (3, 23638560),
    (2, 28366272),
    (22, 35457840),
    (2, 47277120),
    (28, 70915680),
    (36, 141831360),
];

/// Eigenvalues of `A_2` in the four irreducible representations of
/// `E` over `GF(11)`.
pub const SPLIT_EIGENVALUES: [u32; 4] = [9, 5, 10, 1];

/// Their multiplicities in the minimum polynomial of `A_2` on `E` itself.
pub const SPLIT_MULTIPLICITIES: [u32; 4] = [5, 3, 5, 4];

/// One row of the split of the condensed `A_2` on `H(S_8^+)` or `H(S_8^-)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitRow {
    pub eigenvalue: u32,
    pub d: usize,
    pub h: u32,
}

/// `(total dimension, rows)` for `S_8^+`.
pub const SPLIT_PLUS: (usize, [SplitRow; 4]) = (
    523,
    [
        SplitRow {
            eigenvalue: 9,
            d: 76,
            h: 4,
        },
        SplitRow {
            eigenvalue: 5,
            d: 67,
            h: 3,
        },
        SplitRow {
            eigenvalue: 10,
            d: 80,
            h: 4,
        },
        SplitRow {
            eigenvalue: 1,
            d: 300,
            h: 4,
        },
    ],
);

/// `(total dimension, rows)` for `S_8^-`.
pub const SPLIT_MINUS: (usize, [SplitRow; 4]) = (
    439,
    [
        SplitRow {
            eigenvalue: 9,
            d: 72,
            h: 2,
        },
        SplitRow {
            eigenvalue: 5,
            d: 52,
            h: 2,
        },
        SplitRow {
            eigenvalue: 10,
            d: 55,
            h: 2,
        },
        SplitRow {
            eigenvalue: 1,
            d: 260,
            h: 4,
        },
    ],
);

/// Character table of `E` over `GF(11)`: `CHARACTER_TABLE[alpha][i]` is the
/// eigenvalue of `A_(i+1)` in the `alpha`-th representation.
pub const CHARACTER_TABLE: [[u32; 27]; 4] = [
    [
        1, 9, 6, 2, 3, 1, 4, 4, 6, 10, 4, 9, 9, 8, 7, 6, 8, 9, 9, 7, 7, 3, 1, 1, 1, 6, 2,
    ],
    [
        1, 5, 5, 1, 8, 8, 5, 5, 10, 8, 1, 2, 2, 5, 3, 5, 5, 5, 5, 6, 3, 10, 1, 0, 1, 3, 8,
    ],
    [
        1, 10, 3, 4, 10, 4, 7, 7, 5, 7, 5, 3, 3, 6, 5, 1, 1, 7, 7, 10, 9, 0, 4, 3, 6, 10, 5,
    ],
    [
        1, 1, 3, 9, 0, 8, 0, 0, 5, 8, 2, 4, 4, 4, 5, 9, 0, 3, 3, 2, 10, 8, 10, 10, 1, 0, 0,
    ],
];

pub fn j4_order() -> BigUint {
    J4_ORDER_FACTORS
        .iter()
        .fold(BigUint::from(1u32), |acc, &(p, e)| {
            acc * BigUint::from(p).pow(e)
        })
}

/// `[G:H]`, the size of the orbit.
pub fn orbit_size() -> BigUint {
    j4_order() / BigUint::from(H_ORDER)
}

pub fn u_lengths_expanded() -> Vec<u64> {
    U_SUBORBIT_LENGTHS
        .iter()
        .flat_map(|&(m, n)| std::iter::repeat_n(n, m as usize))
        .collect()
}
