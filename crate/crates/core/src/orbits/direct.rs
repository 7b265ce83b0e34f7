use std::collections::HashMap;

use crate::gfmat::{FpMatrix, FpVector};
use crate::permgrp::{GroupWord, Perm};

use super::{OrbitError, Result};

/// A fully materialized orbit of a vector under a list of matrices.
#[derive(Debug, Clone)]
pub struct DirectOrbit {
    points: Vec<FpVector>,
    index: HashMap<Vec<u8>, usize>,
    /// `(parent, generator)` of the breadth-first tree.
    parent: Vec<Option<(usize, usize)>>,
    ngens: usize,
}

/// Breadth-first orbit of `v` under `gens`, failing beyond `bound` points.
pub fn direct_orbit(v: &FpVector, gens: &[FpMatrix], bound: usize) -> Result<DirectOrbit> {
    let mut o = DirectOrbit {
        points: vec![v.clone()],
        index: HashMap::from([(v.to_bytes(), 0)]),
        parent: vec![None],
        ngens: gens.len(),
    };
    let mut head = 0;
    while head < o.points.len() {
        let x = o.points[head].clone();
        for (gi, g) in gens.iter().enumerate() {
            let y = x.mul_mat(g);
            let key = y.to_bytes();
            if o.index.contains_key(&key) {
                continue;
            }
            if o.points.len() >= bound {
                return Err(OrbitError::Resource(format!(
                    "orbit has more than {bound} points"
                )));
            }
            o.index.insert(key, o.points.len());
            o.points.push(y);
            o.parent.push(Some((head, gi)));
        }
        head += 1;
    }
    Ok(o)
}

impl DirectOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[FpVector] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &FpVector {
        &self.points[i]
    }

    pub fn index_of(&self, v: &FpVector) -> Option<usize> {
        self.index.get(&v.to_bytes()).copied()
    }

    /// Word `w` with `root * w = point(i)`.
    pub fn word_to(&self, mut i: usize) -> GroupWord {
        let mut letters = Vec::new();
        while let Some((p, g)) = self.parent[i] {
            letters.push(g as i32 + 1);
            i = p;
        }
        letters.reverse();
        GroupWord::new(letters).expect("nonzero letters")
    }

    /// Permutation induced by `m` on the orbit, if `m` preserves it.
    pub fn perm_of(&self, m: &FpMatrix) -> Option<Perm> {
        let images = self
            .points
            .iter()
            .map(|x| self.index_of(&x.mul_mat(m)).map(|j| j as u32))
            .collect::<Option<Vec<_>>>()?;
        Perm::from_images(images).ok()
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }
}
