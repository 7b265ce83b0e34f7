//! The endomorphism ring of the permutation module on its Schur basis:
//! orbit counting numbers, intersection numbers and the coefficients that
//! embed `E` into the restricted algebra.
//!
//! Suborbit indices are 0-based in the API and 1-based in reports.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::gfmat::FpVector;
use crate::orbits::{direct_orbit, stream_rng, OrbitDB, OrbitError};
use crate::permgrp::{CosetTable, DoubleCoset, GroupWord, Perm, PermError};

/// Default bound on the size of a suborbit that is enumerated point by point.
pub const POINT_BOUND: usize = 1_000_000;

const TAG_TRANSLATE: u64 = 3;

#[derive(Debug, Error)]
pub enum EndoError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("suborbit {i} has {n} points, above the enumeration bound {bound}")]
    TooLarge { i: usize, n: u64, bound: usize },
    #[error("membership test inconclusive for a point of suborbit {i} translated by gamma_{j}")]
    Inconclusive { i: usize, j: usize },
    #[error("n_{j} * c_{j}{k}({i}) is not divisible by n_{k}")]
    Divisibility { i: usize, j: usize, k: usize },
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, EndoError>;

#[derive(Debug, Clone, Copy)]
pub struct CountConfig {
    pub seed: u64,
    pub workers: usize,
    pub point_bound: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            seed: 0,
            workers: 1,
            point_bound: POINT_BOUND,
        }
    }
}

/// `A_i`, mapping `v_1` to the sum over the `H`-suborbit `O_i`.
#[derive(Debug, Clone)]
pub struct SchurBasisElement {
    pub index: usize,
    pub length: u64,
    pub gamma: GroupWord,
    pub rep: FpVector,
}

pub fn schur_basis(db_h: &OrbitDB) -> Vec<SchurBasisElement> {
    db_h.suborbits()
        .iter()
        .enumerate()
        .map(|(i, s)| SchurBasisElement {
            index: i,
            length: s.length,
            gamma: s.gamma.clone(),
            rep: s.rep.clone(),
        })
        .collect()
}

/// `r = |H\G/H|`, the number of `H`-suborbits.
pub fn rank_of_e(db_h: &OrbitDB) -> usize {
    db_h.suborbits().len()
}

/// Index of the smallest suborbit other than `{v_1}`, the default element
/// used for splitting.
pub fn default_split_element(db_h: &OrbitDB) -> usize {
    db_h.suborbits()
        .iter()
        .enumerate()
        .skip(1)
        .min_by_key(|(i, s)| (s.length, *i))
        .map_or(0, |(i, _)| i)
}

/// All points of `O_i`, by direct closure under the generators of `H`.
pub fn suborbit_points(db_h: &OrbitDB, i: usize, bound: usize) -> Result<Vec<FpVector>> {
    let s = &db_h.suborbits()[i];
    if s.length > bound as u64 {
        return Err(EndoError::TooLarge {
            i: i + 1,
            n: s.length,
            bound,
        });
    }
    let gens = db_h.engine().group.action.generators();
    let orbit = direct_orbit(&s.rep, gens, bound.max(1))?;
    if orbit.len() as u64 != s.length {
        return Err(EndoError::Internal(format!(
            "suborbit {} closes with {} points, expected {}",
            i + 1,
            orbit.len(),
            s.length
        )));
    }
    Ok(orbit.points().to_vec())
}

/// Where `v gamma_j` lands: the `U`-suborbit `k` and `u` with `omega_k u = v gamma_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translate {
    pub k: usize,
    pub u: GroupWord,
    pub u_perm: Perm,
}

/// The translates `v gamma_j` of every point `v` of `O_i`, for every `j`.
#[derive(Debug, Clone)]
pub struct Translates {
    pub i: usize,
    pub points: Vec<FpVector>,
    /// `table[j][p]` for the `p`-th point of `O_i`.
    pub table: Vec<Vec<Translate>>,
}

pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| EndoError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Translates every point of `O_i` by every `gamma_j` and locates it among
/// the `U`-suborbits. Each point draws from its own random stream, so the
/// result does not depend on the number of workers.
pub fn translates(
    db_h: &OrbitDB,
    db_u: &OrbitDB,
    i: usize,
    cfg: CountConfig,
) -> Result<Translates> {
    let points = suborbit_points(db_h, i, cfg.point_bound)?;
    let ambient = &db_u.engine().ambient;
    let ugroup = &db_u.engine().group;
    let s = db_u.suborbits().len();
    let gammas: Vec<_> = db_u
        .suborbits()
        .iter()
        .map(|x| ambient.eval_word(&x.gamma))
        .collect::<std::result::Result<_, _>>()
        .map_err(OrbitError::from)?;
    let n = points.len();
    let table = with_workers(cfg.workers, || {
        (0..s)
            .map(|j| {
                (0..n)
                    .into_par_iter()
                    .map(|p| {
                        let w = points[p].mul_mat(&gammas[j]);
                        let mut rng =
                            stream_rng(cfg.seed ^ i as u64, TAG_TRANSLATE, (j * n + p) as u64);
                        match db_u.transporter(&w, &mut rng) {
                            Ok((k, u)) => Ok(Translate {
                                k,
                                u_perm: ugroup.perm_of(&u),
                                u,
                            }),
                            Err(OrbitError::NotFound) => {
                                Err(EndoError::Inconclusive { i: i + 1, j: j + 1 })
                            }
                            Err(e) => Err(e.into()),
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(Translates { i, points, table })
}

/// For every ordered pair `(j, k)` of `U`-suborbits, the classes
/// `U_k \ U / U_j`, each given by the right cosets of `U_k` it contains.
/// The class `l` corresponds to `Omega_jkl = omega_k u_jkl U_j`.
#[derive(Debug, Clone)]
pub struct DoubleCosetData {
    pub cosets: Vec<CosetTable>,
    /// `classes[j][k][l]`
    pub classes: Vec<Vec<Vec<DoubleCoset>>>,
    class_of: Vec<Vec<Vec<usize>>>,
}

impl DoubleCosetData {
    pub fn new(db_u: &OrbitDB, bound: u64) -> Result<DoubleCosetData> {
        let group = &db_u.engine().group;
        let gens = group.perms.generators();
        let subs = db_u.suborbits();
        let cosets = subs
            .iter()
            .map(|s| CosetTable::new(gens, &s.stabilizer, bound))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut classes = Vec::with_capacity(subs.len());
        let mut class_of = Vec::with_capacity(subs.len());
        for sj in subs {
            let uj = sj.stabilizer.generators();
            let mut row = Vec::with_capacity(subs.len());
            let mut row_of = Vec::with_capacity(subs.len());
            for ct in &cosets {
                let dcs = ct.double_cosets(uj);
                let mut of = vec![0; ct.len()];
                for (l, d) in dcs.iter().enumerate() {
                    for &c in &d.cosets {
                        of[c] = l;
                    }
                }
                row.push(dcs);
                row_of.push(of);
            }
            classes.push(row);
            class_of.push(row_of);
        }
        Ok(DoubleCosetData {
            cosets,
            classes,
            class_of,
        })
    }

    pub fn count(&self, j: usize, k: usize) -> usize {
        self.classes[j][k].len()
    }

    /// Class `l` with `u` in `U_k u_jkl U_j`.
    pub fn classify(&self, j: usize, k: usize, u: &Perm) -> Option<usize> {
        self.cosets[k].coset_of(u).map(|c| self.class_of[j][k][c])
    }

    /// `|Omega_jkl|`
    pub fn omega_size(&self, j: usize, k: usize, l: usize) -> u64 {
        self.classes[j][k][l].cosets.len() as u64
    }
}

/// `c_jk(i)` and, when double cosets are supplied, `c_jkl(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingTable {
    pub i: usize,
    pub n_i: u64,
    /// `c[j][k]`
    pub c: Vec<Vec<u64>>,
    /// `cl[j][k][l]`
    pub cl: Option<Vec<Vec<Vec<u64>>>>,
    /// `omega[j][k][l] = |Omega_jkl|`
    pub omega: Option<Vec<Vec<Vec<u64>>>>,
}

/// Counts the translates of `O_i` point by point.
pub fn counting_table(
    tr: &Translates,
    s: usize,
    dc: Option<&DoubleCosetData>,
) -> Result<CountingTable> {
    let mut c = vec![vec![0u64; s]; s];
    let mut cl = dc.map(|d| {
        (0..s)
            .map(|j| {
                (0..s)
                    .map(|k| vec![0u64; d.count(j, k)])
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });
    for (j, row) in tr.table.iter().enumerate() {
        for t in row {
            c[j][t.k] += 1;
            if let (Some(d), Some(cl)) = (dc, cl.as_mut()) {
                let l = d
                    .classify(j, t.k, &t.u_perm)
                    .ok_or_else(|| EndoError::Internal("transporter outside U".into()))?;
                cl[j][t.k][l] += 1;
            }
        }
    }
    let omega = dc.map(|d| {
        (0..s)
            .map(|j| {
                (0..s)
                    .map(|k| (0..d.count(j, k)).map(|l| d.omega_size(j, k, l)).collect())
                    .collect()
            })
            .collect()
    });
    Ok(CountingTable {
        i: tr.i,
        n_i: tr.points.len() as u64,
        c,
        cl,
        omega,
    })
}

/// Counting table for `A_i` against the `U`-suborbits.
pub fn orbit_counting(
    db_h: &OrbitDB,
    db_u: &OrbitDB,
    i: usize,
    dc: Option<&DoubleCosetData>,
    cfg: CountConfig,
) -> Result<CountingTable> {
    let tr = translates(db_h, db_u, i, cfg)?;
    counting_table(&tr, db_u.suborbits().len(), dc)
}

impl CountingTable {
    /// `sum_k c_jk(i) = n_i` for every `j`.
    pub fn row_sums_ok(&self) -> bool {
        self.c.iter().all(|r| r.iter().sum::<u64>() == self.n_i)
    }

    /// Every `c_jkl(i)` is `0` or `|Omega_jkl|`, and they add up to `c_jk(i)`.
    pub fn dichotomy_ok(&self) -> bool {
        let (Some(cl), Some(om)) = (&self.cl, &self.omega) else {
            return true;
        };
        cl.iter().zip(om).enumerate().all(|(j, (row, orow))| {
            row.iter().zip(orow).enumerate().all(|(k, (ls, os))| {
                ls.iter().zip(os).all(|(&x, &o)| x == 0 || x == o)
                    && ls.iter().sum::<u64>() == self.c[j][k]
            })
        })
    }

    /// `c_jkl(i) / |Omega_jkl|` as `(j, k, l, coefficient)`, in index order.
    /// A partial intersection yields `None`.
    pub fn embed_coefficients(&self) -> Option<Vec<(usize, usize, usize, u64)>> {
        let (cl, om) = (self.cl.as_ref()?, self.omega.as_ref()?);
        let mut out = Vec::new();
        for (j, row) in cl.iter().enumerate() {
            for (k, ls) in row.iter().enumerate() {
                for (l, &x) in ls.iter().enumerate() {
                    let o = om[j][k][l];
                    if x % o != 0 {
                        return None;
                    }
                    out.push((j, k, l, x / o));
                }
            }
        }
        Some(out)
    }

    /// Lines `i,j,k,value` followed by `i,j,k,l,value` (1-based).
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let i = self.i + 1;
        for (j, row) in self.c.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{},{v}", j + 1, k + 1);
            }
        }
        if let Some(cl) = &self.cl {
            for (j, row) in cl.iter().enumerate() {
                for (k, ls) in row.iter().enumerate() {
                    for (l, v) in ls.iter().enumerate() {
                        let _ = writeln!(s, "{i},{},{},{},{v}", j + 1, k + 1, l + 1);
                    }
                }
            }
        }
        s
    }
}

/// `P(i)` with `p_jk(i) = n_j c_jk(i) / n_k`, from a counting table taken
/// against the `H`-suborbits themselves.
pub fn intersection_matrix(table: &CountingTable, lengths: &[u64]) -> Result<Vec<Vec<BigUint>>> {
    let mut p = Vec::with_capacity(lengths.len());
    for (j, row) in table.c.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (k, &c) in row.iter().enumerate() {
            let num = BigUint::from(lengths[j]) * BigUint::from(c);
            let den = BigUint::from(lengths[k]);
            if !(&num % &den).is_zero() {
                return Err(EndoError::Divisibility {
                    i: table.i + 1,
                    j: j + 1,
                    k: k + 1,
                });
            }
            out.push(num / den);
        }
        p.push(out);
    }
    Ok(p)
}

/// All intersection matrices `P(1..r)` of `E`.
pub fn intersection_matrices(db_h: &OrbitDB, cfg: CountConfig) -> Result<Vec<Vec<Vec<BigUint>>>> {
    let lengths = db_h.lengths();
    (0..lengths.len())
        .map(|i| {
            let t = orbit_counting(db_h, db_h, i, None, cfg)?;
            intersection_matrix(&t, &lengths)
        })
        .collect()
}

/// `P(i)` as lines `i,j,k,value` (1-based).
pub fn intersection_csv(i: usize, p: &[Vec<BigUint>]) -> String {
    let mut s = String::new();
    for (j, row) in p.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{v}", i + 1, j + 1, k + 1);
        }
    }
    s
}
