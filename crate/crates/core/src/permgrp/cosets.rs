use std::collections::HashMap;

use num_bigint::BigUint;

use super::{GroupWord, Perm, PermError, PermGroup, Result};

/// Right cosets `A g` of a subgroup `A` inside the group generated by
/// `ambient`, materialized by breadth-first search so that every coset
/// representative carries a short word in the ambient generators.
#[derive(Debug, Clone)]
pub struct CosetTable {
    subgroup: PermGroup,
    reps: Vec<Perm>,
    words: Vec<GroupWord>,
    index: HashMap<Perm, usize>,
}

/// One class `A g B`, as the set of right cosets of `A` it contains.
#[derive(Debug, Clone)]
pub struct DoubleCoset {
    pub rep: Perm,
    pub word: GroupWord,
    pub cosets: Vec<usize>,
    pub size: BigUint,
}

impl CosetTable {
    pub fn new(ambient: &[Perm], subgroup: &PermGroup, bound: u64) -> Result<CosetTable> {
        let n = subgroup.degree();
        if let Some(g) = ambient.iter().find(|g| g.degree() != n) {
            return Err(PermError::DegreeMismatch(g.degree(), n));
        }
        let first = subgroup.canonical_coset_rep(&Perm::identity(n));
        let mut index = HashMap::new();
        index.insert(first.clone(), 0);
        let mut reps = vec![first];
        let mut words = vec![GroupWord::empty()];
        let mut head = 0;
        while head < reps.len() {
            let c = reps[head].clone();
            let w = words[head].clone();
            head += 1;
            for (gi, g) in ambient.iter().enumerate() {
                let d = subgroup.canonical_coset_rep(&c.mul(g));
                if !index.contains_key(&d) {
                    if reps.len() as u64 >= bound {
                        return Err(PermError::IndexBound {
                            index: reps.len() as u64 + 1,
                            bound,
                        });
                    }
                    index.insert(d.clone(), reps.len());
                    reps.push(d);
                    words.push(w.concat(&GroupWord::generator(gi)));
                }
            }
        }
        Ok(CosetTable {
            subgroup: subgroup.clone(),
            reps,
            words,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn subgroup(&self) -> &PermGroup {
        &self.subgroup
    }

    pub fn rep(&self, i: usize) -> &Perm {
        &self.reps[i]
    }

    /// Word in the ambient generators for a representative of coset `i`
    /// (not necessarily the canonical one).
    pub fn word(&self, i: usize) -> &GroupWord {
        &self.words[i]
    }

    /// Index of the coset `A g`.
    pub fn coset_of(&self, g: &Perm) -> Option<usize> {
        self.index
            .get(&self.subgroup.canonical_coset_rep(g))
            .copied()
    }

    /// Coset `A rep_i g`.
    pub fn act(&self, i: usize, g: &Perm) -> usize {
        self.coset_of(&self.reps[i].mul(g))
            .expect("group element outside the ambient group")
    }

    /// Orbits of `B = <b_gens>` on the cosets, i.e. the classes `A \ G / B`,
    /// ordered by their smallest coset index.
    pub fn double_cosets(&self, b_gens: &[Perm]) -> Vec<DoubleCoset> {
        let a_order = self.subgroup.order();
        let mut class = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if class[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            class[start] = id;
            let mut cosets = vec![start];
            let mut head = 0;
            while head < cosets.len() {
                let c = cosets[head];
                head += 1;
                for b in b_gens {
                    let d = self.act(c, b);
                    if class[d] == usize::MAX {
                        class[d] = id;
                        cosets.push(d);
                    }
                }
            }
            out.push(DoubleCoset {
                rep: self.reps[start].clone(),
                word: self.words[start].clone(),
                size: &a_order * BigUint::from(cosets.len()),
                cosets,
            });
        }
        out
    }
}

/// Representatives and sizes of `A \ G / B`.
pub fn double_coset_reps(
    g: &PermGroup,
    a: &PermGroup,
    b: &PermGroup,
    bound: u64,
) -> Result<Vec<(Perm, BigUint)>> {
    let table = CosetTable::new(g.generators(), a, bound)?;
    Ok(table
        .double_cosets(b.generators())
        .into_iter()
        .map(|d| (d.rep, d.size))
        .collect())
}

impl PermGroup {
    pub fn double_coset_reps(
        &self,
        a: &PermGroup,
        b: &PermGroup,
        bound: u64,
    ) -> Result<Vec<(Perm, BigUint)>> {
        double_coset_reps(self, a, b, bound)
    }
}
