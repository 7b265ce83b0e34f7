//! On-disk layout of an orbit database:
//!
//! ```text
//! <db>/<side>/manifest.txt
//! <db>/<side>/suborbit_<j>.bin
//! ```
//!
//! The manifest is line-oriented text. Each binary file starts with the
//! magic `ORBDB1`, the record count and the vector byte length (both `u32`
//! little endian), followed by one record per stored point: the canonical
//! vector bytes, the edge label (`i32`) and the parent ordinal (`u32`).
//! Words and permutations are not stored; they are recomputed on load by
//! replaying the edges.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigUint;

use crate::gfmat::{bytes_per_entry, FpVector};
use crate::permgrp::{read_word_lines, GroupWord, PermGroup};

use super::engine::{OrbitDB, StoredPoint, Suborbit};
use super::{OrbitEngine, OrbitError, Result};

pub const DB_MAGIC: &[u8; 6] = b"ORBDB1";
const MANIFEST_HEADER: &str = "modcond-orbitdb 1";

fn side_dir(root: &Path, side: &str) -> PathBuf {
    root.join(side)
}

fn residues(v: &FpVector) -> String {
    v.as_slice()
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes `db` below `root`, replacing any earlier files for the same side.
pub fn save_db(db: &OrbitDB, root: &Path) -> Result<()> {
    let dir = side_dir(root, &db.side);
    fs::create_dir_all(&dir)?;
    for entry in fs::read_dir(&dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("suborbit_") && name.ends_with(".bin") {
            fs::remove_file(&path)?;
        }
    }
    let eng = db.engine();
    let mut m = String::new();
    let _ = writeln!(m, "{MANIFEST_HEADER}");
    let _ = writeln!(m, "digest {}", eng.digest);
    let _ = writeln!(m, "side {}", db.side);
    let _ = writeln!(m, "seed {}", db.seed);
    let _ = writeln!(m, "draws {}", db.draws);
    let status = if db.is_complete() {
        "complete"
    } else {
        "partial"
    };
    let _ = writeln!(m, "status {status}");
    let _ = writeln!(m, "group-order {}", eng.group.order());
    let _ = writeln!(m, "orbit-size {}", eng.orbit_size);
    let _ = writeln!(m, "suborbits {}", db.suborbits().len());
    for (j, s) in db.suborbits().iter().enumerate() {
        let _ = writeln!(m, "suborbit {}", j + 1);
        let _ = writeln!(m, "rep {}", residues(&s.rep));
        let _ = writeln!(m, "gamma");
        let _ = write!(m, "{}", s.gamma.to_text());
        let _ = writeln!(m, "length {}", s.length);
        let _ = writeln!(m, "stabilizer-order {}", s.stabilizer_order());
        let _ = writeln!(m, "covered {}", s.covered);
        let _ = writeln!(m, "stored {}", s.store.len());
        let _ = writeln!(m, "stabilizer-gens {}", s.stabilizer_words.len());
        for w in &s.stabilizer_words {
            let _ = write!(m, "{}", w.to_text());
        }
        write_bin(&dir.join(format!("suborbit_{}.bin", j + 1)), s)?;
    }
    let _ = writeln!(m, "end");
    fs::write(dir.join("manifest.txt"), m)?;
    Ok(())
}

fn write_bin(path: &Path, s: &Suborbit) -> Result<()> {
    let vlen = s.store.first().map_or(0, |p| p.point.to_bytes().len());
    let mut out = Vec::with_capacity(10 + s.store.len() * (vlen + 8));
    out.extend_from_slice(DB_MAGIC);
    out.extend_from_slice(&(s.store.len() as u32).to_le_bytes());
    out.extend_from_slice(&(vlen as u32).to_le_bytes());
    for p in &s.store {
        p.point.write_bytes(&mut out);
        out.extend_from_slice(&p.edge.to_le_bytes());
        out.extend_from_slice(&p.parent.to_le_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

struct Manifest {
    digest: String,
    side: String,
    seed: u64,
    draws: u64,
    orbit_size: u64,
    group_order: BigUint,
    suborbits: Vec<ManifestSuborbit>,
}

struct ManifestSuborbit {
    rep: Vec<u32>,
    gamma: GroupWord,
    length: u64,
    stabilizer_order: BigUint,
    covered: u64,
    stored: usize,
    stab_words: Vec<GroupWord>,
}

fn bad(msg: impl Into<String>) -> OrbitError {
    OrbitError::Persist(msg.into())
}

fn field<'a, I: Iterator<Item = &'a str>>(lines: &mut I, key: &str) -> Result<&'a str> {
    let line = lines
        .next()
        .ok_or_else(|| bad(format!("manifest ends before '{key}'")))?;
    let rest = if line == key {
        ""
    } else {
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| bad(format!("expected '{key}', found '{line}'")))?
    };
    Ok(rest)
}

fn num<T: std::str::FromStr>(s: &str, key: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("bad value for {key}: '{s}'")))
}

fn parse_manifest(text: &str) -> Result<Manifest> {
    let mut lines = text.lines();
    if lines.next() != Some(MANIFEST_HEADER) {
        return Err(bad("not an orbit database manifest"));
    }
    let digest = field(&mut lines, "digest")?.to_string();
    let side = field(&mut lines, "side")?.to_string();
    let seed = num(field(&mut lines, "seed")?, "seed")?;
    let draws = num(field(&mut lines, "draws")?, "draws")?;
    let status = field(&mut lines, "status")?;
    if status != "complete" && status != "partial" {
        return Err(bad(format!("unknown status '{status}'")));
    }
    let group_order = num(field(&mut lines, "group-order")?, "group-order")?;
    let orbit_size = num(field(&mut lines, "orbit-size")?, "orbit-size")?;
    let count: usize = num(field(&mut lines, "suborbits")?, "suborbits")?;
    let mut suborbits = Vec::with_capacity(count);
    for j in 0..count {
        let idx: usize = num(field(&mut lines, "suborbit")?, "suborbit")?;
        if idx != j + 1 {
            return Err(bad(format!("suborbit {idx} out of order")));
        }
        let rep = field(&mut lines, "rep")?
            .split_whitespace()
            .map(|x| num(x, "rep"))
            .collect::<Result<Vec<u32>>>()?;
        field(&mut lines, "gamma")?;
        let gamma = read_word_lines(&mut lines).map_err(|e| bad(e.to_string()))?;
        let length = num(field(&mut lines, "length")?, "length")?;
        let stabilizer_order = num(field(&mut lines, "stabilizer-order")?, "stabilizer-order")?;
        let covered = num(field(&mut lines, "covered")?, "covered")?;
        let stored = num(field(&mut lines, "stored")?, "stored")?;
        let ngens: usize = num(field(&mut lines, "stabilizer-gens")?, "stabilizer-gens")?;
        let stab_words = (0..ngens)
            .map(|_| read_word_lines(&mut lines).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        suborbits.push(ManifestSuborbit {
            rep,
            gamma,
            length,
            stabilizer_order,
            covered,
            stored,
            stab_words,
        });
    }
    field(&mut lines, "end")?;
    Ok(Manifest {
        digest,
        side,
        seed,
        draws,
        orbit_size,
        group_order,
        suborbits,
    })
}

/// Reads the database for `side` below `root` and rebuilds words,
/// permutations and stabilizers against `engine`.
pub fn load_db(engine: Arc<OrbitEngine>, root: &Path, side: &str) -> Result<OrbitDB> {
    let dir = side_dir(root, side);
    let manifest_path = dir.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path).map_err(|e| {
        bad(format!(
            "cannot read {}: {e}; run `modcond enumerate` first",
            manifest_path.display()
        ))
    })?;
    let m = parse_manifest(&text)?;
    if m.digest != engine.digest {
        return Err(bad(format!(
            "database digest {} does not match the scenario digest {}",
            m.digest, engine.digest
        )));
    }
    if m.side != side {
        return Err(bad(format!("database is for side {}, not {side}", m.side)));
    }
    if m.orbit_size != engine.orbit_size || m.group_order != engine.group.order() {
        return Err(bad("database sizes do not match the scenario"));
    }
    let field = engine.ambient.field();
    let dim = engine.ambient.dim();
    let mut db = OrbitDB::new(Arc::clone(&engine), side, m.seed);
    db.draws = m.draws;
    for (j, ms) in m.suborbits.into_iter().enumerate() {
        let rep = FpVector::from_residues(field, ms.rep)?;
        if rep.len() != dim {
            return Err(bad(format!(
                "suborbit {}: representative has wrong length",
                j + 1
            )));
        }
        let raw = read_bin(&dir.join(format!("suborbit_{}.bin", j + 1)), field, dim)?;
        if raw.len() != ms.stored {
            return Err(bad(format!(
                "suborbit {}: {} records, manifest says {}",
                j + 1,
                raw.len(),
                ms.stored
            )));
        }
        let store = rebuild_store(&engine, &rep, raw)
            .map_err(|e| bad(format!("suborbit {}: {e}", j + 1)))?;
        let covered: u64 = store.iter().map(|p| p.k_orbit).sum();
        if covered != ms.covered {
            return Err(bad(format!("suborbit {}: covered count mismatch", j + 1)));
        }
        let perms = ms
            .stab_words
            .iter()
            .map(|w| {
                w.check(engine.group.ngens())?;
                Ok(engine.group.perm_of(w))
            })
            .collect::<Result<Vec<_>>>()?;
        let stabilizer = PermGroup::new(engine.group.perms.degree(), perms)?;
        if stabilizer.order() != ms.stabilizer_order
            || BigUint::from(ms.length) * &ms.stabilizer_order != m.group_order
        {
            return Err(bad(format!("suborbit {}: stabilizer mismatch", j + 1)));
        }
        ms.gamma.check(engine.ambient.ngens())?;
        if engine.ambient.act(&engine.seed_vector, &ms.gamma)? != rep {
            return Err(bad(format!(
                "suborbit {}: gamma does not reach the representative",
                j + 1
            )));
        }
        db.push_loaded(Suborbit {
            rep,
            gamma: ms.gamma,
            length: ms.length,
            stabilizer,
            stabilizer_words: ms.stab_words,
            covered,
            store,
        })?;
    }
    Ok(db)
}

fn read_bin(path: &Path, field: crate::gfmat::Fp, dim: usize) -> Result<Vec<(FpVector, i32, u32)>> {
    let bytes = fs::read(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    if bytes.len() < 14 || &bytes[..6] != DB_MAGIC {
        return Err(bad(format!("{} is not a suborbit file", path.display())));
    }
    let u32_at =
        |i: usize| u32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
    let count = u32_at(6) as usize;
    let vlen = u32_at(10) as usize;
    if count > 0 && vlen != dim * bytes_per_entry(field) {
        return Err(bad(format!("{}: vector length mismatch", path.display())));
    }
    let rec = vlen + 8;
    if bytes.len() != 14 + count * rec {
        return Err(bad(format!("{}: truncated", path.display())));
    }
    (0..count)
        .map(|r| {
            let at = 14 + r * rec;
            let v = FpVector::from_bytes(field, dim, &bytes[at..at + vlen])?;
            let edge = u32_at(at + vlen) as i32;
            let parent = u32_at(at + vlen + 4);
            Ok((v, edge, parent))
        })
        .collect()
}

/// Replays the breadth-first edges. The element of `K` used on each edge is
/// the first one, in table order, whose image reaches the stored point,
/// which is the one the enumeration used.
fn rebuild_store(
    engine: &OrbitEngine,
    rep: &FpVector,
    raw: Vec<(FpVector, i32, u32)>,
) -> std::result::Result<Vec<StoredPoint>, String> {
    let helper = &engine.helper;
    let group = &engine.group;
    let kord = helper.order() as u64;
    let mut store: Vec<StoredPoint> = Vec::with_capacity(raw.len());
    for (r, (point, edge, parent)) in raw.into_iter().enumerate() {
        let c = if r == 0 {
            if edge != 0 {
                return Err("first record is not a root".into());
            }
            let c = helper.canon(rep).map_err(|e| e.to_string())?;
            if c.point != point {
                return Err("root does not match the representative".into());
            }
            StoredPoint {
                point,
                edge,
                parent,
                word: helper.element_word(c.kappa).clone(),
                perm: helper.element_perm(c.kappa).clone(),
                k_orbit: kord / c.stab_order as u64,
            }
        } else {
            let p = parent as usize;
            if edge < 1 || edge as usize > group.ngens() || p >= r {
                return Err(format!("record {r} has a bad edge"));
            }
            let h = (edge - 1) as usize;
            let hm = &group.action.generators()[h];
            let hp = &group.perms.generators()[h];
            let par = &store[p];
            let mut seen = HashSet::new();
            let mut found = None;
            for e in 0..helper.order() {
                let x = par.point.mul_mat(helper.element_matrix(e));
                if !seen.insert(x.to_bytes()) {
                    continue;
                }
                let c = helper.canon(&x.mul_mat(hm)).map_err(|e| e.to_string())?;
                if c.point == point {
                    found = Some((e, c));
                    break;
                }
            }
            let (e, c) = found.ok_or_else(|| format!("record {r} is not reachable"))?;
            StoredPoint {
                word: par
                    .word
                    .concat(helper.element_word(e))
                    .concat(&GroupWord::generator(h))
                    .concat(helper.element_word(c.kappa)),
                perm: par
                    .perm
                    .mul(helper.element_perm(e))
                    .mul(hp)
                    .mul(helper.element_perm(c.kappa)),
                point,
                edge,
                parent,
                k_orbit: kord / c.stab_order as u64,
            }
        };
        store.push(c);
    }
    Ok(store)
}
