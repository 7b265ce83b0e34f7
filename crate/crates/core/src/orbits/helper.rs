use std::collections::{HashMap, HashSet};
use std::sync::{Arc, RwLock};

use crate::gfmat::{EchelonBasis, FpMatrix, FpVector};
use crate::permgrp::{GroupWord, Perm};
use crate::rep::{ElementTable, MatRep};

use super::{ActingGroup, OrbitError, Result};

/// Helper subgroup `K <= S` together with a `K`-equivariant quotient
/// `pi: V -> W`.
#[derive(Debug)]
pub struct HelperConfig {
    k_words: Vec<GroupWord>,
    quotient: FpMatrix,
    elements: KElements,
    w_gens: Vec<FpMatrix>,
    gen_perms: Vec<Perm>,
    table: RwLock<WTable>,
    mem_limit: Option<u64>,
}

/// All elements of `K`: matrices on `V` and `W`, perms on the permutation
/// side of `S`, and words in the generators of `S`.
#[derive(Debug)]
struct KElements {
    v_mats: Vec<FpMatrix>,
    w_mats: Vec<FpMatrix>,
    perms: Vec<Perm>,
    words: Vec<GroupWord>,
    index: HashMap<Perm, usize>,
    inv: Vec<usize>,
}

#[derive(Debug, Default)]
struct WTable {
    /// `w -> (orbit, e)` with `dist(orbit) * e = w`.
    lookup: HashMap<Vec<u8>, (u32, u32)>,
    orbits: Vec<Arc<WOrbit>>,
    bytes: u64,
}

#[derive(Debug)]
struct WOrbit {
    dist: FpVector,
    stab: Vec<usize>,
    size: usize,
}

/// Canonical form of a point: the distinguished point of its `K`-orbit and
/// the index of an element `kappa` of `K` with `v * kappa = point`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canon {
    pub point: FpVector,
    pub kappa: usize,
    /// `|Stab_K(point)|`
    pub stab_order: usize,
}

/// Summary of one classified `K`-orbit on `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperOrbit {
    pub distinguished: FpVector,
    pub size: usize,
    pub stabilizer_order: usize,
}

impl HelperConfig {
    /// `k_words` are words in the generators of `group`; `quotient` is a
    /// `d x e` matrix of rank `e`.
    pub fn new(
        group: &ActingGroup,
        k_words: Vec<GroupWord>,
        quotient: FpMatrix,
        element_bound: usize,
        mem_limit: Option<u64>,
    ) -> Result<HelperConfig> {
        let rep = &group.action;
        let d = rep.dim();
        let field = rep.field();
        if quotient.rows() != d {
            return Err(OrbitError::Config(format!(
                "quotient has {} rows, expected {d}",
                quotient.rows()
            )));
        }
        if quotient.field() != field {
            return Err(OrbitError::Config("quotient over the wrong field".into()));
        }
        let e = quotient.cols();
        let right_inv = left_inverse(&quotient)
            .ok_or_else(|| OrbitError::Config(format!("quotient matrix does not have rank {e}")))?;
        for w in &k_words {
            w.check(group.ngens())?;
        }
        let k_rep = rep.restrict(&k_words)?;
        let k_perms: Vec<Perm> = k_words
            .iter()
            .map(|w| w.eval_perm(group.perms.generators(), group.perms.degree()))
            .collect();
        let mut w_gens = Vec::with_capacity(k_words.len());
        for (i, m) in k_rep.generators().iter().enumerate() {
            let mw = right_inv.mul(m).mul(&quotient);
            if quotient.mul(&mw) != m.mul(&quotient) {
                return Err(OrbitError::Config(format!(
                    "quotient is not equivariant for helper generator {}",
                    i + 1
                )));
            }
            w_gens.push(mw);
        }
        let table = ElementTable::enumerate(
            &k_perms,
            group.perms.degree(),
            k_rep.generators(),
            field,
            d,
            element_bound,
        )?;
        let w_rep = MatRep::new(field, e, w_gens.clone())?;
        let mut w_mats = Vec::with_capacity(table.len());
        for w in table.words() {
            w_mats.push(w_rep.eval_word(w)?);
        }
        let perms = table.perms().to_vec();
        let index: HashMap<Perm, usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let inv = perms.iter().map(|p| index[&p.inverse()]).collect();
        let words = table
            .words()
            .iter()
            .map(|w| w.substitute(&k_words))
            .collect();
        Ok(HelperConfig {
            k_words,
            quotient,
            elements: KElements {
                v_mats: table.mats().to_vec(),
                w_mats,
                perms,
                words,
                index,
                inv,
            },
            w_gens,
            gen_perms: k_perms,
            table: RwLock::new(WTable::default()),
            mem_limit,
        })
    }

    /// Trivial `K` and the identity quotient.
    pub fn trivial(group: &ActingGroup) -> Result<HelperConfig> {
        let rep = &group.action;
        HelperConfig::new(
            group,
            Vec::new(),
            FpMatrix::identity(rep.field(), rep.dim()),
            1,
            None,
        )
    }

    pub fn k_words(&self) -> &[GroupWord] {
        &self.k_words
    }

    pub fn quotient(&self) -> &FpMatrix {
        &self.quotient
    }

    pub fn order(&self) -> usize {
        self.elements.perms.len()
    }

    pub fn element_word(&self, e: usize) -> &GroupWord {
        &self.elements.words[e]
    }

    pub fn element_perm(&self, e: usize) -> &Perm {
        &self.elements.perms[e]
    }

    pub fn element_matrix(&self, e: usize) -> &FpMatrix {
        &self.elements.v_mats[e]
    }

    pub fn project(&self, v: &FpVector) -> FpVector {
        v.mul_mat(&self.quotient)
    }

    /// Classifies the `K`-orbits on `W` through the given points.
    pub fn classify(&self, seeds: &[FpVector]) -> Result<()> {
        for w in seeds {
            self.lookup_or_classify(w)?;
        }
        Ok(())
    }

    /// Classified orbits in order of discovery.
    pub fn helper_orbits(&self) -> Vec<HelperOrbit> {
        let t = self.table.read().expect("helper table lock");
        t.orbits
            .iter()
            .map(|o| HelperOrbit {
                distinguished: o.dist.clone(),
                size: o.size,
                stabilizer_order: o.stab.len(),
            })
            .collect()
    }

    pub fn table_bytes(&self) -> u64 {
        self.table.read().expect("helper table lock").bytes
    }

    fn lookup_or_classify(&self, w: &FpVector) -> Result<(Arc<WOrbit>, usize)> {
        let key = w.to_bytes();
        {
            let t = self.table.read().expect("helper table lock");
            if let Some(&(o, e)) = t.lookup.get(&key) {
                return Ok((t.orbits[o as usize].clone(), e as usize));
            }
        }
        let (orbit, members) = self.classify_orbit(w)?;
        let mut t = self.table.write().expect("helper table lock");
        if !t.lookup.contains_key(&key) {
            let id = t.orbits.len() as u32;
            let per = key.len() as u64 + 48;
            t.bytes += per * members.len() as u64;
            if let Some(limit) = self.mem_limit {
                if t.bytes > limit {
                    return Err(OrbitError::Resource(format!(
                        "helper orbit table exceeds {limit} bytes"
                    )));
                }
            }
            for (m, e) in members {
                t.lookup.insert(m, (id, e as u32));
            }
            t.orbits.push(Arc::new(orbit));
        }
        let &(o, e) = t.lookup.get(&key).expect("just inserted");
        Ok((t.orbits[o as usize].clone(), e as usize))
    }

    /// Orbit of `w` under `K` on `W`: the distinguished point is the
    /// byte-least member; every member gets an element mapping the
    /// distinguished point to it, from a breadth-first tree.
    fn classify_orbit(&self, w: &FpVector) -> Result<(WOrbit, Vec<(Vec<u8>, usize)>)> {
        let limit_pts = self
            .mem_limit
            .map(|l| (l / (w.to_bytes().len() as u64 + 48)).max(1) as usize);
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        seen.insert(w.to_bytes());
        let mut pts = vec![w.clone()];
        let mut head = 0;
        while head < pts.len() {
            let x = pts[head].clone();
            head += 1;
            for g in &self.w_gens {
                let y = x.mul_mat(g);
                if seen.insert(y.to_bytes()) {
                    pts.push(y);
                    if limit_pts.is_some_and(|l| pts.len() > l) {
                        return Err(OrbitError::Resource(
                            "helper orbit exceeds the memory bound".into(),
                        ));
                    }
                }
            }
        }
        let dist = pts
            .iter()
            .min_by(|a, b| a.to_bytes().cmp(&b.to_bytes()))
            .expect("nonempty")
            .clone();
        let mut members: Vec<(Vec<u8>, usize)> = vec![(dist.to_bytes(), 0)];
        let mut elem_of: HashMap<Vec<u8>, usize> = HashMap::from([(dist.to_bytes(), 0)]);
        let mut queue = vec![dist.clone()];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head].clone();
            head += 1;
            let ex = elem_of[&x.to_bytes()];
            for (gi, g) in self.w_gens.iter().enumerate() {
                let y = x.mul_mat(g);
                let yk = y.to_bytes();
                if elem_of.contains_key(&yk) {
                    continue;
                }
                let p = self.elements.perms[ex].mul(&self.gen_perms[gi]);
                let e = self.elements.index[&p];
                elem_of.insert(yk.clone(), e);
                members.push((yk, e));
                queue.push(y);
            }
        }
        let stab = (0..self.order())
            .filter(|&e| dist.mul_mat(&self.elements.w_mats[e]) == dist)
            .collect::<Vec<_>>();
        debug_assert_eq!(stab.len() * members.len(), self.order());
        Ok((
            WOrbit {
                dist,
                stab,
                size: members.len(),
            },
            members,
        ))
    }

    /// Canonical distinguished point of the `K`-orbit of `v` in `V`.
    pub fn canon(&self, v: &FpVector) -> Result<Canon> {
        let w = self.project(v);
        let (orbit, e) = self.lookup_or_classify(&w)?;
        let k1 = self.elements.inv[e];
        let v1 = v.mul_mat(&self.elements.v_mats[k1]);
        let mut best: Option<(Vec<u8>, FpVector, usize)> = None;
        for &s in &orbit.stab {
            let c = v1.mul_mat(&self.elements.v_mats[s]);
            let key = c.to_bytes();
            if best.as_ref().is_none_or(|(b, _, _)| key < *b) {
                best = Some((key, c, s));
            }
        }
        let (_, point, s) = best.expect("stabilizer contains the identity");
        let kappa_perm = self.elements.perms[k1].mul(&self.elements.perms[s]);
        let kappa = self.elements.index[&kappa_perm];
        let stab_order = orbit
            .stab
            .iter()
            .filter(|&&t| point.mul_mat(&self.elements.v_mats[t]) == point)
            .count();
        Ok(Canon {
            point,
            kappa,
            stab_order,
        })
    }
}

/// `R` with `R * pi = I`, if `pi` has full column rank.
fn left_inverse(pi: &FpMatrix) -> Option<FpMatrix> {
    let f = pi.field();
    let (d, e) = (pi.rows(), pi.cols());
    let mut basis = EchelonBasis::new(f, e);
    let mut rows = Vec::new();
    for i in 0..d {
        if basis.insert(&pi.row(i)) {
            rows.push(i);
            if rows.len() == e {
                break;
            }
        }
    }
    if rows.len() != e {
        return None;
    }
    let sub =
        FpMatrix::from_rows(f, e, &rows.iter().map(|&i| pi.row(i)).collect::<Vec<_>>()).ok()?;
    let sub_inv = sub.inverse().ok()?;
    let mut r = FpMatrix::zero(f, e, d);
    for a in 0..e {
        for (b, &i) in rows.iter().enumerate() {
            r.set(a, i, sub_inv.get(a, b));
        }
    }
    Some(r)
}
