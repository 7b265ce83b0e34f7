use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::gfmat::FpVector;
use crate::permgrp::{GroupWord, Perm, PermGroup};

use super::{stream_rng, Canon, OrbitEngine, OrbitError, Result};

const TAG_DRAW: u64 = 1;
const TAG_MEMBER: u64 = 2;

/// A stored `K`-orbit representative. `edge` is `h + 1` for the generator
/// `h` of `S` that led here from the stored point `parent`, and 0 at the
/// root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredPoint {
    pub point: FpVector,
    pub edge: i32,
    pub parent: u32,
    /// `omega * word = point`
    pub word: GroupWord,
    pub perm: Perm,
    pub k_orbit: u64,
}

#[derive(Debug, Clone)]
pub struct Suborbit {
    pub rep: FpVector,
    /// Word in the generators of `G` with `v1 * gamma = rep`.
    pub gamma: GroupWord,
    pub length: u64,
    pub stabilizer: PermGroup,
    pub stabilizer_words: Vec<GroupWord>,
    /// Points of the suborbit lying in stored `K`-orbits.
    pub covered: u64,
    pub store: Vec<StoredPoint>,
}

impl Suborbit {
    pub fn stabilizer_order(&self) -> BigUint {
        self.stabilizer.order()
    }
}

/// The suborbits found so far, with a global index of all stored points.
#[derive(Debug, Clone)]
pub struct OrbitDB {
    engine: Arc<OrbitEngine>,
    pub side: String,
    pub seed: u64,
    pub draws: u64,
    suborbits: Vec<Suborbit>,
    index: HashMap<Vec<u8>, (u32, u32)>,
    bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuborbitStats {
    pub index: usize,
    pub length: u64,
    pub stored: usize,
    pub covered: u64,
    pub saving: f64,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DbStats {
    pub suborbits: Vec<SuborbitStats>,
    pub total_length: u64,
    pub total_stored: usize,
    pub helper_bytes: u64,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointReport {
    /// Two suborbits sharing a stored canonical point.
    pub collision: Option<(usize, usize)>,
    /// Suborbits whose covered part does not prove their length.
    pub unproven: Vec<usize>,
    pub total_length: u64,
    pub orbit_size: u64,
}

impl DisjointReport {
    pub fn ok(&self) -> bool {
        self.collision.is_none() && self.unproven.is_empty() && self.total_length == self.orbit_size
    }
}

enum Outcome {
    Found(Suborbit),
    Duplicate,
}

fn point_bytes(p: &StoredPoint) -> u64 {
    (p.point.to_bytes().len() + 4 * p.word.len() + 4 * p.perm.degree() + 64) as u64
}

impl OrbitDB {
    pub fn new(engine: Arc<OrbitEngine>, side: &str, seed: u64) -> OrbitDB {
        OrbitDB {
            engine,
            side: side.to_string(),
            seed,
            draws: 0,
            suborbits: Vec::new(),
            index: HashMap::new(),
            bytes: 0,
        }
    }

    pub fn engine(&self) -> &Arc<OrbitEngine> {
        &self.engine
    }

    pub fn suborbits(&self) -> &[Suborbit] {
        &self.suborbits
    }

    pub fn lengths(&self) -> Vec<u64> {
        self.suborbits.iter().map(|s| s.length).collect()
    }

    pub fn total_length(&self) -> u64 {
        self.suborbits.iter().map(|s| s.length).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.total_length() == self.engine.orbit_size
    }

    pub(super) fn push_loaded(&mut self, s: Suborbit) -> Result<()> {
        if self.insert(s).is_err() {
            return Err(OrbitError::Persist("stored suborbits overlap".into()));
        }
        Ok(())
    }

    fn insert(&mut self, s: Suborbit) -> std::result::Result<(), Suborbit> {
        let j = self.suborbits.len() as u32;
        if s.store
            .iter()
            .any(|p| self.index.contains_key(&p.point.to_bytes()))
        {
            return Err(s);
        }
        for (o, p) in s.store.iter().enumerate() {
            self.index.insert(p.point.to_bytes(), (j, o as u32));
            self.bytes += point_bytes(p);
        }
        self.suborbits.push(s);
        Ok(())
    }

    /// Suborbit and stored ordinal of the `K`-orbit of `v`, without random
    /// retries.
    pub fn locate(&self, v: &FpVector) -> Result<Option<(usize, usize, Canon)>> {
        let c = self.engine.helper.canon(v)?;
        Ok(self
            .index
            .get(&c.point.to_bytes())
            .map(|&(j, o)| (j as usize, o as usize, c)))
    }

    /// Index of the suborbit containing `v`. A miss is retried on random
    /// `S`-translates of `v`, since only part of each suborbit is stored.
    pub fn membership_test<R: Rng + ?Sized>(
        &self,
        v: &FpVector,
        rng: &mut R,
    ) -> Result<Option<usize>> {
        Ok(self.find(v, rng)?.map(|(j, _)| j))
    }

    /// Suborbit index `j` and a word `u` in the generators of `S` with
    /// `omega_j * u = v`.
    pub fn transporter<R: Rng + ?Sized>(
        &self,
        v: &FpVector,
        rng: &mut R,
    ) -> Result<(usize, GroupWord)> {
        let (j, u) = self.find(v, rng)?.ok_or(OrbitError::NotFound)?;
        let act = &self.engine.group.action;
        if act.act(&self.suborbits[j].rep, &u)? != *v {
            return Err(OrbitError::Internal(
                "transporter does not map the representative to the vector".into(),
            ));
        }
        Ok((j, u))
    }

    fn find<R: Rng + ?Sized>(
        &self,
        v: &FpVector,
        rng: &mut R,
    ) -> Result<Option<(usize, GroupWord)>> {
        let eng = &self.engine;
        let word_for = |j: usize, o: usize, c: &Canon, s: &GroupWord| {
            self.suborbits[j].store[o]
                .word
                .concat(&eng.helper.element_word(c.kappa).inverse())
                .concat(&s.inverse())
        };
        if let Some((j, o, c)) = self.locate(v)? {
            return Ok(Some((j, word_for(j, o, &c, &GroupWord::empty()))));
        }
        let gens = eng.group.action.generators();
        let id = eng.group.action.identity();
        for _ in 0..eng.config.rounds {
            let (m, w) = eng.config.random.draw(gens, &id, rng);
            if let Some((j, o, c)) = self.locate(&v.mul_mat(&m))? {
                return Ok(Some((j, word_for(j, o, &c, &w))));
            }
        }
        Ok(None)
    }

    /// Runs the random discovery loop until the lengths add up to the orbit
    /// size or the draw budget is spent. Resumes from `self.draws`.
    pub fn discover(&mut self) -> Result<()> {
        let eng = Arc::clone(&self.engine);
        if self.suborbits.is_empty() {
            match self.enumerate_suborbit(&eng.seed_vector, GroupWord::empty())? {
                Outcome::Found(s) => self.add(s)?,
                Outcome::Duplicate => unreachable!("database is empty"),
            }
        }
        let gens = eng.ambient.generators();
        let id = eng.ambient.identity();
        while self.total_length() < eng.orbit_size && self.draws < eng.config.max_draws {
            let t = self.draws;
            self.draws += 1;
            let mut rng = stream_rng(self.seed, TAG_DRAW, t);
            let (g, gamma) = eng.config.random.draw(gens, &id, &mut rng);
            let v = eng.seed_vector.mul_mat(&g);
            let mut rng = stream_rng(self.seed, TAG_MEMBER, t);
            if self.membership_test(&v, &mut rng)?.is_some() {
                continue;
            }
            if let Outcome::Found(s) = self.enumerate_suborbit(&v, gamma)? {
                self.add(s)?;
            }
        }
        if self.total_length() > eng.orbit_size {
            return Err(OrbitError::Internal(format!(
                "suborbit lengths add up to {} > {}",
                self.total_length(),
                eng.orbit_size
            )));
        }
        Ok(())
    }

    fn add(&mut self, s: Suborbit) -> Result<()> {
        self.insert(s)
            .map_err(|_| OrbitError::Internal("suborbit overlaps a stored one".into()))?;
        self.check_memory(0)
    }

    fn check_memory(&self, extra: u64) -> Result<()> {
        if let Some(limit) = self.engine.config.mem_limit {
            let used = self.bytes + extra + self.engine.helper.table_bytes();
            if used > limit {
                return Err(OrbitError::Resource(format!(
                    "orbit database needs more than {} MB",
                    limit >> 20
                )));
            }
        }
        Ok(())
    }

    fn enumerate_suborbit(&self, omega: &FpVector, gamma: GroupWord) -> Result<Outcome> {
        let eng = &self.engine;
        let helper = &eng.helper;
        let group = &eng.group;
        let s_order = group.order();
        let s_mats = group.action.generators();
        let s_perms = group.perms.generators();
        let degree = group.perms.degree();
        let kord = helper.order() as u64;

        let c0 = helper.canon(omega)?;
        if self.index.contains_key(&c0.point.to_bytes()) {
            return Ok(Outcome::Duplicate);
        }
        let mut store = vec![StoredPoint {
            point: c0.point.clone(),
            edge: 0,
            parent: 0,
            word: helper.element_word(c0.kappa).clone(),
            perm: helper.element_perm(c0.kappa).clone(),
            k_orbit: kord / c0.stab_order as u64,
        }];
        let mut local: HashMap<Vec<u8>, u32> = HashMap::from([(c0.point.to_bytes(), 0)]);
        let mut covered = store[0].k_orbit;
        let mut bytes = point_bytes(&store[0]);
        let mut stab = PermGroup::trivial(degree);
        let mut stab_words: Vec<GroupWord> = Vec::new();
        let mut stab_order = BigUint::from(1u32);
        let exact = |covered: u64, st: &BigUint| BigUint::from(2 * covered) * st > s_order;

        let mut add_stab =
            |g: Perm, w: GroupWord, stab: &mut PermGroup, stab_order: &mut BigUint| -> Result<()> {
                if !stab.contains(&g)? {
                    *stab = stab.with_generator(g)?;
                    *stab_order = stab.order();
                    stab_words.push(w);
                }
                Ok(())
            };

        let mut ord = 0usize;
        'outer: while !exact(covered, &stab_order) && ord < store.len() {
            let x_pt = store[ord].point.clone();
            let x_word = store[ord].word.clone();
            let x_perm = store[ord].perm.clone();
            let x_perm_inv = x_perm.inverse();
            let x_ord = ord as u32;
            ord += 1;
            let mut seen: HashSet<Vec<u8>> = HashSet::new();
            for e in 0..helper.order() {
                let x = x_pt.mul_mat(helper.element_matrix(e));
                let xk = x.to_bytes();
                if e > 0 && x == x_pt {
                    let g = x_perm.mul(helper.element_perm(e)).mul(&x_perm_inv);
                    let w = x_word
                        .concat(helper.element_word(e))
                        .concat(&x_word.inverse());
                    add_stab(g, w, &mut stab, &mut stab_order)?;
                    if exact(covered, &stab_order) {
                        break 'outer;
                    }
                }
                if !seen.insert(xk) {
                    continue;
                }
                let t_word = x_word.concat(helper.element_word(e));
                let t_perm = x_perm.mul(helper.element_perm(e));
                for (h, (hm, hp)) in s_mats.iter().zip(s_perms).enumerate() {
                    let z = x.mul_mat(hm);
                    let c = helper.canon(&z)?;
                    let key = c.point.to_bytes();
                    let via_word = t_word
                        .concat(&GroupWord::generator(h))
                        .concat(helper.element_word(c.kappa));
                    let via_perm = t_perm.mul(hp).mul(helper.element_perm(c.kappa));
                    if let Some(&o) = local.get(&key) {
                        let target = &store[o as usize];
                        let g = via_perm.mul(&target.perm.inverse());
                        if !g.is_identity() {
                            let w = via_word.concat(&target.word.inverse());
                            add_stab(g, w, &mut stab, &mut stab_order)?;
                        }
                    } else if self.index.contains_key(&key) {
                        return Ok(Outcome::Duplicate);
                    } else {
                        let p = StoredPoint {
                            point: c.point,
                            edge: h as i32 + 1,
                            parent: x_ord,
                            word: via_word,
                            perm: via_perm,
                            k_orbit: kord / c.stab_order as u64,
                        };
                        covered += p.k_orbit;
                        bytes += point_bytes(&p);
                        self.check_memory(bytes)?;
                        local.insert(key, store.len() as u32);
                        store.push(p);
                    }
                    if exact(covered, &stab_order) {
                        break 'outer;
                    }
                }
            }
        }
        if !exact(covered, &stab_order) {
            return Err(OrbitError::Internal(format!(
                "suborbit search ended with {covered} points but stabilizer order {stab_order}"
            )));
        }
        let (length, rem) = (&s_order / &stab_order, &s_order % &stab_order);
        if !rem.is_zero() {
            return Err(OrbitError::Internal(
                "stabilizer order does not divide the group order".into(),
            ));
        }
        let length = length
            .to_u64()
            .ok_or_else(|| OrbitError::Resource("suborbit length exceeds 64 bits".into()))?;
        if ord == store.len() && covered != length {
            return Err(OrbitError::Internal(format!(
                "closed suborbit has {covered} points but index {length}"
            )));
        }
        Ok(Outcome::Found(Suborbit {
            rep: omega.clone(),
            gamma,
            length,
            stabilizer: stab,
            stabilizer_words: stab_words,
            covered,
            store,
        }))
    }

    pub fn stats(&self) -> DbStats {
        let suborbits = self
            .suborbits
            .iter()
            .enumerate()
            .map(|(i, s)| SuborbitStats {
                index: i + 1,
                length: s.length,
                stored: s.store.len(),
                covered: s.covered,
                saving: s.length as f64 / s.store.len() as f64,
                bytes: s.store.iter().map(point_bytes).sum(),
            })
            .collect::<Vec<_>>();
        DbStats {
            total_length: self.total_length(),
            total_stored: self.suborbits.iter().map(|s| s.store.len()).sum(),
            helper_bytes: self.engine.helper.table_bytes(),
            complete: self.is_complete(),
            suborbits,
        }
    }

    pub(super) fn all_points(&self) -> impl Iterator<Item = (usize, &StoredPoint)> {
        self.suborbits
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.store.iter().map(move |p| (j, p)))
    }
}

/// Builds a database for `engine` from scratch.
pub fn enumerate_suborbits(engine: Arc<OrbitEngine>, side: &str, seed: u64) -> Result<OrbitDB> {
    let mut db = OrbitDB::new(engine, side, seed);
    db.discover()?;
    Ok(db)
}

/// Checks that no canonical point is stored twice, that every length is
/// proven by its covered part and stabilizer, and that the lengths sum to
/// the orbit size.
pub fn verify_disjoint(db: &OrbitDB) -> DisjointReport {
    let mut owner: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut collision = None;
    for (j, p) in db.all_points() {
        if let Some(&i) = owner.get(&p.point.to_bytes()) {
            if i != j && collision.is_none() {
                collision = Some((i + 1, j + 1));
            }
        } else {
            owner.insert(p.point.to_bytes(), j);
        }
    }
    let s_order = db.engine.group.order();
    let unproven = db
        .suborbits
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let st = s.stabilizer_order();
            let covered: u64 = s.store.iter().map(|p| p.k_orbit).sum();
            covered != s.covered
                || BigUint::from(s.length) * &st != s_order
                || BigUint::from(2 * s.covered) * &st <= s_order
        })
        .map(|(j, _)| j + 1)
        .collect();
    DisjointReport {
        collision,
        unproven,
        total_length: db.total_length(),
        orbit_size: db.engine.orbit_size,
    }
}
