//! Scenario files: the complete input of a condensation run.
//!
//! ```text
//! modcond-scenario 1
//! name <name>
//! seed <u64>
//! action-field <q>
//! action-dim <d>
//! generators <k>
//! <k matrices>
//! seed-vector explicit <residues> | seed-vector unique-fixed:<label>
//! orbit-size <n>
//! subgroup <label> <m> <degree>        (repeated; H and U are required)
//! <m pairs of word and perm blocks>
//! helper <label> <m>                   (optional, at most one per label)
//! <m words in the generators of the subgroup>
//! quotient
//! <matrix>
//! coefficient-field <p>
//! module <name> <dim>                  (repeated)
//! <one matrix per generator of U>
//! split-element <i>                    (optional)
//! end
//! ```
//!
//! Lines starting with `#` are ignored. The digest is the SHA-256 of the
//! canonical serialization.

mod builtin;

pub use builtin::{
    build_l3_2, build_m11, build_s3_toy, build_s3_toy_variant, build_s4_s3, build_s4_s3_variant,
    build_s5_pairs, builders, bundled, bundled_names, UVariant,
};

use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gfmat::{read_matrix_lines, write_matrix, Fp, FpMatrix, FpVector, GfError};
use crate::orbits::{ActingGroup, EngineConfig, HelperConfig, OrbitEngine, OrbitError};
use crate::permgrp::{read_perm_lines, read_word_lines, GroupWord, Perm, PermError};
use crate::rep::{unique_fixed_vector, ElementTable, MatRep, RepError, ELEMENT_BOUND};

pub const SCENARIO_HEADER: &str = "modcond-scenario 1";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown subgroup label `{0}`")]
    UnknownLabel(String),
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("unknown bundled scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("characteristic {p} divides |{label}| = {order}")]
    CharDivides {
        p: u32,
        label: String,
        order: BigUint,
    },
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    H,
    U,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::H => "H",
            Side::U => "U",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Side {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "H" => Ok(Side::H),
            "U" => Ok(Side::U),
            other => Err(ScenarioError::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedVectorRule {
    Explicit(Vec<u32>),
    UniqueFixed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDef {
    pub label: String,
    pub degree: usize,
    pub words: Vec<GroupWord>,
    pub perms: Vec<Perm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelperDef {
    pub label: String,
    pub words: Vec<GroupWord>,
    pub quotient: FpMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDef {
    pub name: String,
    pub dim: usize,
    pub mats: Vec<FpMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub action_field: u32,
    pub action_dim: usize,
    pub generators: Vec<FpMatrix>,
    pub seed_vector: SeedVectorRule,
    pub orbit_size: u64,
    pub subgroups: Vec<SubgroupDef>,
    pub helpers: Vec<HelperDef>,
    pub coefficient_field: u32,
    pub modules: Vec<ModuleDef>,
    pub split_element: Option<usize>,
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line: usize,
}

impl<'a> Iterator for Lines<'a> {
    type Item = &'a str;
    fn next(&mut self) -> Option<&'a str> {
        loop {
            let (i, l) = self.inner.next()?;
            self.line = i + 1;
            if !l.starts_with('#') {
                return Some(l.trim_end());
            }
        }
    }
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        Lines {
            inner: text.lines().enumerate().peekable(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> ScenarioError {
        ScenarioError::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn peek_key(&mut self) -> Option<&'a str> {
        while let Some(&(_, l)) = self.inner.peek() {
            if l.starts_with('#') {
                self.inner.next();
                continue;
            }
            return l.split_whitespace().next();
        }
        None
    }

    /// Reads `key rest...` and returns `rest`.
    fn key(&mut self, key: &str) -> Result<&'a str> {
        let l = self
            .next()
            .ok_or_else(|| self.err(format!("expected `{key}`, found end of file")))?;
        let mut parts = l.splitn(2, ' ');
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`, found `{l}`")));
        }
        Ok(parts.next().unwrap_or("").trim())
    }

    fn num<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad {what} `{s}`")))
    }

    fn matrix(&mut self) -> Result<FpMatrix> {
        read_matrix_lines(self).map_err(|e| self.err(e.to_string()))
    }

    fn word(&mut self) -> Result<GroupWord> {
        read_word_lines(self).map_err(|e| self.err(e.to_string()))
    }

    fn perm(&mut self) -> Result<Perm> {
        read_perm_lines(self).map_err(|e| self.err(e.to_string()))
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut ls = Lines::new(text);
        if ls.next() != Some(SCENARIO_HEADER) {
            return Err(ls.err(format!("expected `{SCENARIO_HEADER}`")));
        }
        let name = ls.key("name")?.to_string();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(ls.err("scenario name must be a single word"));
        }
        let seed = {
            let s = ls.key("seed")?;
            ls.num(s, "seed")?
        };
        let action_field = {
            let s = ls.key("action-field")?;
            ls.num(s, "action field")?
        };
        let action_dim = {
            let s = ls.key("action-dim")?;
            ls.num(s, "action dimension")?
        };
        let k: usize = {
            let s = ls.key("generators")?;
            ls.num(s, "generator count")?
        };
        let generators = (0..k).map(|_| ls.matrix()).collect::<Result<Vec<_>>>()?;
        let sv = ls.key("seed-vector")?;
        let seed_vector = if let Some(rest) = sv.strip_prefix("explicit") {
            SeedVectorRule::Explicit(
                rest.split_whitespace()
                    .map(|t| ls.num(t, "residue"))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else if let Some(label) = sv.strip_prefix("unique-fixed:") {
            SeedVectorRule::UniqueFixed(label.trim().to_string())
        } else {
            return Err(ls.err(format!("bad seed-vector rule `{sv}`")));
        };
        let orbit_size = {
            let s = ls.key("orbit-size")?;
            ls.num(s, "orbit size")?
        };
        let mut subgroups = Vec::new();
        while ls.peek_key() == Some("subgroup") {
            let rest = ls.key("subgroup")?;
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(ls.err("expected `subgroup <label> <count> <degree>`"));
            }
            let m: usize = ls.num(parts[1], "generator count")?;
            let degree: usize = ls.num(parts[2], "degree")?;
            let mut words = Vec::with_capacity(m);
            let mut perms = Vec::with_capacity(m);
            for _ in 0..m {
                words.push(ls.word()?);
                perms.push(ls.perm()?);
            }
            subgroups.push(SubgroupDef {
                label: parts[0].to_string(),
                degree,
                words,
                perms,
            });
        }
        let mut helpers = Vec::new();
        while ls.peek_key() == Some("helper") {
            let rest = ls.key("helper")?;
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(ls.err("expected `helper <label> <count>`"));
            }
            let m: usize = ls.num(parts[1], "helper generator count")?;
            let words = (0..m).map(|_| ls.word()).collect::<Result<Vec<_>>>()?;
            ls.key("quotient")?;
            let quotient = ls.matrix()?;
            helpers.push(HelperDef {
                label: parts[0].to_string(),
                words,
                quotient,
            });
        }
        let coefficient_field = {
            let s = ls.key("coefficient-field")?;
            ls.num(s, "coefficient field")?
        };
        let ngens_u = subgroups
            .iter()
            .find(|s| s.label == "U")
            .map(|s| s.words.len())
            .ok_or_else(|| ScenarioError::UnknownLabel("U".into()))?;
        let mut modules = Vec::new();
        while ls.peek_key() == Some("module") {
            let rest = ls.key("module")?;
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(ls.err("expected `module <name> <dim>`"));
            }
            let dim = ls.num(parts[1], "module dimension")?;
            let mats = (0..ngens_u)
                .map(|_| ls.matrix())
                .collect::<Result<Vec<_>>>()?;
            modules.push(ModuleDef {
                name: parts[0].to_string(),
                dim,
                mats,
            });
        }
        let split_element = if ls.peek_key() == Some("split-element") {
            let s = ls.key("split-element")?;
            Some(ls.num(s, "split element")?)
        } else {
            None
        };
        ls.key("end")?;
        if ls.any(|l| !l.trim().is_empty()) {
            return Err(ls.err("content after `end`"));
        }
        Ok(Scenario {
            name,
            seed,
            action_field,
            action_dim,
            generators,
            seed_vector,
            orbit_size,
            subgroups,
            helpers,
            coefficient_field,
            modules,
            split_element,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{SCENARIO_HEADER}");
        let _ = writeln!(s, "name {}", self.name);
        let _ = writeln!(s, "seed {}", self.seed);
        let _ = writeln!(s, "action-field {}", self.action_field);
        let _ = writeln!(s, "action-dim {}", self.action_dim);
        let _ = writeln!(s, "generators {}", self.generators.len());
        for m in &self.generators {
            s.push_str(&write_matrix(m));
        }
        match &self.seed_vector {
            SeedVectorRule::Explicit(v) => {
                let r: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "seed-vector explicit {}", r.join(" "));
            }
            SeedVectorRule::UniqueFixed(l) => {
                let _ = writeln!(s, "seed-vector unique-fixed:{l}");
            }
        }
        let _ = writeln!(s, "orbit-size {}", self.orbit_size);
        for g in &self.subgroups {
            let _ = writeln!(s, "subgroup {} {} {}", g.label, g.words.len(), g.degree);
            for (w, p) in g.words.iter().zip(&g.perms) {
                s.push_str(&w.to_text());
                s.push_str(&p.to_text());
            }
        }
        for h in &self.helpers {
            let _ = writeln!(s, "helper {} {}", h.label, h.words.len());
            for w in &h.words {
                s.push_str(&w.to_text());
            }
            let _ = writeln!(s, "quotient");
            s.push_str(&write_matrix(&h.quotient));
        }
        let _ = writeln!(s, "coefficient-field {}", self.coefficient_field);
        for m in &self.modules {
            let _ = writeln!(s, "module {} {}", m.name, m.dim);
            for x in &m.mats {
                s.push_str(&write_matrix(x));
            }
        }
        if let Some(i) = self.split_element {
            let _ = writeln!(s, "split-element {i}");
        }
        let _ = writeln!(s, "end");
        s
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let h = Sha256::digest(self.to_text().as_bytes());
        h.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn subgroup(&self, label: &str) -> Result<&SubgroupDef> {
        self.subgroups
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| ScenarioError::UnknownLabel(label.to_string()))
    }

    pub fn module(&self, name: &str) -> Result<&ModuleDef> {
        self.modules
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| ScenarioError::UnknownModule(name.to_string()))
    }

    /// Loads a bundled scenario by name, or a file by path.
    pub fn load(name_or_path: &str) -> Result<Scenario> {
        if let Some(text) = bundled(name_or_path) {
            return Scenario::parse(text);
        }
        let text = std::fs::read_to_string(name_or_path).map_err(|e| {
            if std::path::Path::new(name_or_path).extension().is_none()
                && !name_or_path.contains('/')
            {
                ScenarioError::UnknownScenario(name_or_path.to_string())
            } else {
                ScenarioError::Invalid(format!("cannot read {name_or_path}: {e}"))
            }
        })?;
        Scenario::parse(&text)
    }
}

/// A validated scenario with its derived objects.
#[derive(Debug, Clone)]
pub struct Setup {
    pub scenario: Scenario,
    pub digest: String,
    pub action: MatRep,
    pub seed_vector: FpVector,
    pub h: ActingGroup,
    pub u: ActingGroup,
    pub coefficient_field: Fp,
    pub modules: Vec<(String, MatRep)>,
}

fn subgroup_group(sc: &Scenario, action: &MatRep, label: &str) -> Result<(ActingGroup, BigUint)> {
    let def = sc.subgroup(label)?;
    for (i, p) in def.perms.iter().enumerate() {
        if p.degree() != def.degree {
            return Err(ScenarioError::Invalid(format!(
                "subgroup {label}: permutation {} has degree {}, expected {}",
                i + 1,
                p.degree(),
                def.degree
            )));
        }
    }
    for (i, w) in def.words.iter().enumerate() {
        w.check(action.ngens()).map_err(|e| {
            ScenarioError::Invalid(format!("subgroup {label}: word {}: {e}", i + 1))
        })?;
    }
    let g = ActingGroup::new(
        label,
        action,
        def.words.clone(),
        def.perms.clone(),
        def.degree,
    )?;
    // the permutation side must be a faithful image of the matrix side
    ElementTable::enumerate(
        &def.perms,
        def.degree,
        g.action.generators(),
        action.field(),
        action.dim(),
        ELEMENT_BOUND,
    )
    .map_err(|e| {
        ScenarioError::Invalid(format!(
            "subgroup {label}: permutations and matrices disagree: {e}"
        ))
    })?;
    let order = g.order();
    Ok((g, order))
}

impl Setup {
    pub fn new(scenario: Scenario) -> Result<Setup> {
        let sc = &scenario;
        let q = Fp::new(sc.action_field as u64)?;
        if sc.generators.is_empty() {
            return Err(ScenarioError::Invalid("no generators".into()));
        }
        for (i, m) in sc.generators.iter().enumerate() {
            if m.field() != q {
                return Err(ScenarioError::Invalid(format!(
                    "generator {} is over GF({}), expected GF({})",
                    i + 1,
                    m.field().p(),
                    q.p()
                )));
            }
        }
        let action = MatRep::new(q, sc.action_dim, sc.generators.clone())?;
        for label in sc.helpers.iter().map(|h| h.label.as_str()) {
            if label != "H" && label != "U" {
                return Err(ScenarioError::UnknownLabel(label.to_string()));
            }
        }
        let (h, h_order) = subgroup_group(sc, &action, "H")?;
        let (u, _) = subgroup_group(sc, &action, "U")?;
        let p = Fp::new(sc.coefficient_field as u64)?;
        if (&h_order % BigUint::from(p.p())).is_zero() {
            return Err(ScenarioError::CharDivides {
                p: p.p(),
                label: "H".into(),
                order: h_order,
            });
        }
        let seed_vector = match &sc.seed_vector {
            SeedVectorRule::Explicit(v) => {
                if v.len() != sc.action_dim {
                    return Err(ScenarioError::Invalid(format!(
                        "seed vector has length {}, expected {}",
                        v.len(),
                        sc.action_dim
                    )));
                }
                FpVector::from_residues(q, v.clone())?
            }
            SeedVectorRule::UniqueFixed(label) => {
                let g = match label.as_str() {
                    "H" => &h,
                    "U" => &u,
                    other => return Err(ScenarioError::UnknownLabel(other.to_string())),
                };
                unique_fixed_vector(&action, &g.words)?
            }
        };
        if seed_vector.is_zero() {
            return Err(ScenarioError::Invalid("seed vector is zero".into()));
        }
        if !h
            .action
            .generators()
            .iter()
            .all(|m| seed_vector.mul_mat(m) == seed_vector)
        {
            return Err(ScenarioError::Invalid(
                "seed vector is not fixed by H".into(),
            ));
        }
        if sc.orbit_size == 0 {
            return Err(ScenarioError::Invalid("orbit size must be positive".into()));
        }
        let mut modules = Vec::new();
        for m in &sc.modules {
            if m.mats.len() != u.ngens() {
                return Err(ScenarioError::Invalid(format!(
                    "module {} has {} matrices but U has {} generators",
                    m.name,
                    m.mats.len(),
                    u.ngens()
                )));
            }
            if m.mats.iter().any(|x| x.field() != p) {
                return Err(ScenarioError::Invalid(format!(
                    "module {} is not over GF({})",
                    m.name,
                    p.p()
                )));
            }
            let rep = MatRep::new(p, m.dim, m.mats.clone())
                .map_err(|e| ScenarioError::Invalid(format!("module {}: {e}", m.name)))?;
            modules.push((m.name.clone(), rep));
        }
        if modules.is_empty() {
            return Err(ScenarioError::Invalid("no coefficient modules".into()));
        }
        if sc.split_element == Some(0) {
            return Err(ScenarioError::Invalid("split element is 1-based".into()));
        }
        for hd in &sc.helpers {
            let g = if hd.label == "H" { &h } else { &u };
            for (i, w) in hd.words.iter().enumerate() {
                w.check(g.ngens()).map_err(|e| {
                    ScenarioError::Invalid(format!("helper {}: word {}: {e}", hd.label, i + 1))
                })?;
            }
            if hd.quotient.rows() != sc.action_dim || hd.quotient.field() != q {
                return Err(ScenarioError::Invalid(format!(
                    "helper {}: quotient must be a {}-row matrix over GF({})",
                    hd.label,
                    sc.action_dim,
                    q.p()
                )));
            }
        }
        Ok(Setup {
            digest: scenario.digest(),
            action,
            seed_vector,
            h,
            u,
            coefficient_field: p,
            modules,
            scenario,
        })
    }

    pub fn group(&self, side: Side) -> &ActingGroup {
        match side {
            Side::H => &self.h,
            Side::U => &self.u,
        }
    }

    pub fn module(&self, name: &str) -> Result<&MatRep> {
        self.modules
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r)
            .ok_or_else(|| ScenarioError::UnknownModule(name.to_string()))
    }

    /// Orbit engine for one side, with its helper subgroup if configured.
    pub fn engine(&self, side: Side, config: EngineConfig) -> Result<Arc<OrbitEngine>> {
        let group = self.group(side).clone();
        let helper = match self
            .scenario
            .helpers
            .iter()
            .find(|h| h.label == side.label())
        {
            Some(hd) => HelperConfig::new(
                &group,
                hd.words.clone(),
                hd.quotient.clone(),
                ELEMENT_BOUND,
                config.mem_limit,
            )?,
            None => HelperConfig::trivial(&group)?,
        };
        Ok(OrbitEngine::new(
            self.action.clone(),
            self.seed_vector.clone(),
            self.scenario.orbit_size,
            group,
            helper,
            config,
            &self.digest,
        )?)
    }
}
