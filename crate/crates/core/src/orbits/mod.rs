//! Suborbit enumeration for a subgroup `S` acting on a large orbit of
//! vectors, with canonical forms under a small helper subgroup `K <= S`.
//!
//! Only `K`-orbit representatives are stored. A suborbit is enumerated by a
//! breadth-first search over stored representatives, collecting Schreier
//! generators for the point stabilizer on the way, and stops as soon as the
//! covered part exceeds half of `|S : Stab|`, which proves the length.

mod direct;
mod engine;
mod helper;
mod persist;

pub use direct::{direct_orbit, DirectOrbit};
pub use engine::{
    enumerate_suborbits, verify_disjoint, DbStats, DisjointReport, OrbitDB, StoredPoint, Suborbit,
    SuborbitStats,
};
pub use helper::{Canon, HelperConfig, HelperOrbit};
pub use persist::{load_db, save_db, DB_MAGIC};

use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::gfmat::{FpVector, GfError};
use crate::permgrp::{GroupWord, Perm, PermError, PermGroup, ProductReplacement};
use crate::rep::{MatRep, RepError};

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("vector not found in any stored suborbit")]
    NotFound,
    #[error("orbit database: {0}")]
    Persist(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, OrbitError>;

/// The enumerating subgroup, given by words in the ambient generators, its
/// matrices on the vector space and a faithful permutation image.
#[derive(Debug, Clone)]
pub struct ActingGroup {
    pub name: String,
    pub words: Vec<GroupWord>,
    pub action: MatRep,
    pub perms: PermGroup,
}

impl ActingGroup {
    pub fn new(
        name: &str,
        ambient: &MatRep,
        words: Vec<GroupWord>,
        perms: Vec<Perm>,
        degree: usize,
    ) -> Result<ActingGroup> {
        if words.len() != perms.len() {
            return Err(OrbitError::Config(format!(
                "subgroup {name}: {} words but {} permutations",
                words.len(),
                perms.len()
            )));
        }
        for w in &words {
            w.check(ambient.ngens())?;
        }
        Ok(ActingGroup {
            name: name.to_string(),
            action: ambient.restrict(&words)?,
            perms: PermGroup::new(degree, perms)?,
            words,
        })
    }

    pub fn ngens(&self) -> usize {
        self.words.len()
    }

    pub fn order(&self) -> BigUint {
        self.perms.order()
    }

    /// Permutation of a word in the generators of this group.
    pub fn perm_of(&self, w: &GroupWord) -> Perm {
        w.eval_perm(self.perms.generators(), self.perms.degree())
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Random translates tried by the membership test after a miss.
    pub rounds: usize,
    pub mem_limit: Option<u64>,
    /// Bound on random draws during discovery.
    pub max_draws: u64,
    pub random: ProductReplacement,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            rounds: 8,
            mem_limit: None,
            max_draws: 100_000,
            random: ProductReplacement::default(),
        }
    }
}

/// Everything the enumeration needs besides the stored data.
#[derive(Debug)]
pub struct OrbitEngine {
    /// Generators of `G` acting on the vector space.
    pub ambient: MatRep,
    pub seed_vector: FpVector,
    /// `|v1^G|`
    pub orbit_size: u64,
    pub group: ActingGroup,
    pub helper: HelperConfig,
    pub config: EngineConfig,
    /// Digest of the scenario the engine was built from.
    pub digest: String,
}

impl OrbitEngine {
    pub fn new(
        ambient: MatRep,
        seed_vector: FpVector,
        orbit_size: u64,
        group: ActingGroup,
        helper: HelperConfig,
        config: EngineConfig,
        digest: &str,
    ) -> Result<Arc<OrbitEngine>> {
        if seed_vector.len() != ambient.dim() || seed_vector.field() != ambient.field() {
            return Err(OrbitError::Config(
                "seed vector does not match the action".into(),
            ));
        }
        if orbit_size == 0 {
            return Err(OrbitError::Config("orbit size must be positive".into()));
        }
        Ok(Arc::new(OrbitEngine {
            ambient,
            seed_vector,
            orbit_size,
            group,
            helper,
            config,
            digest: digest.to_string(),
        }))
    }
}

/// Independent deterministic random stream for `(seed, tag, t)`.
pub fn stream_rng(seed: u64, tag: u64, t: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let s = mix(mix(mix(seed) ^ tag) ^ t);
    rand_chacha::ChaCha8Rng::seed_from_u64(s)
}
