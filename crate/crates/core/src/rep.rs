//! Matrix representations over GF(p), fixed spaces, trace operators and
//! fixed-point idempotents.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::gfmat::{read_matrix_lines, write_matrix, Fp, FpMatrix, FpVector, GfError};
use crate::permgrp::{GroupWord, Perm, PermError, PermGroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("generator {0} is not invertible")]
    NotInvertible(usize),
    #[error("vector is not fixed by the subgroup")]
    NotFixed,
    #[error("characteristic {p} divides the group order {order}")]
    CharDivides { p: u32, order: BigUint },
    #[error("group of size > {bound} exceeds the enumeration bound")]
    Bound { bound: usize },
    #[error("fixed space has dimension {0}, expected 1")]
    FixedDim(usize),
    #[error("matrices are not a representation of the permutation group: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, RepError>;

/// Default bound on explicit element enumeration.
pub const ELEMENT_BOUND: usize = 100_000;

/// One invertible matrix per abstract generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatRep {
    field: Fp,
    dim: usize,
    gens: Vec<FpMatrix>,
    invs: Vec<FpMatrix>,
}

impl MatRep {
    pub fn new(field: Fp, dim: usize, gens: Vec<FpMatrix>) -> Result<MatRep> {
        let mut invs = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(RepError::Dimension(format!(
                    "generator {} is {}x{}, expected {dim}x{dim}",
                    i + 1,
                    g.rows(),
                    g.cols()
                )));
            }
            if g.field() != field {
                return Err(GfError::ModulusMismatch(g.field().p(), field.p()).into());
            }
            invs.push(g.inverse().map_err(|_| RepError::NotInvertible(i + 1))?);
        }
        Ok(MatRep {
            field,
            dim,
            gens,
            invs,
        })
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[FpMatrix] {
        &self.gens
    }

    pub fn inverses(&self) -> &[FpMatrix] {
        &self.invs
    }

    pub fn identity(&self) -> FpMatrix {
        FpMatrix::identity(self.field, self.dim)
    }

    fn letter(&self, l: i32) -> &FpMatrix {
        let i = l.unsigned_abs() as usize - 1;
        if l > 0 {
            &self.gens[i]
        } else {
            &self.invs[i]
        }
    }

    /// `v * w`, letters applied left to right.
    pub fn act(&self, v: &FpVector, w: &GroupWord) -> Result<FpVector> {
        if v.len() != self.dim {
            return Err(RepError::Dimension(format!(
                "vector of length {} for a {}-dimensional representation",
                v.len(),
                self.dim
            )));
        }
        w.check(self.ngens())?;
        let mut x = v.clone();
        for &l in w.letters() {
            x = x.mul_mat(self.letter(l));
        }
        Ok(x)
    }

    pub fn eval_word(&self, w: &GroupWord) -> Result<FpMatrix> {
        w.check(self.ngens())?;
        let mut m = self.identity();
        for &l in w.letters() {
            m = m.mul(self.letter(l));
        }
        Ok(m)
    }

    /// Representation of the subgroup generated by `words`.
    pub fn restrict(&self, words: &[GroupWord]) -> Result<MatRep> {
        let gens = words
            .iter()
            .map(|w| self.eval_word(w))
            .collect::<Result<Vec<_>>>()?;
        MatRep::new(self.field, self.dim, gens)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("rep {} {} {}\n", self.field.p(), self.dim, self.ngens());
        for g in &self.gens {
            s.push_str(&write_matrix(g));
        }
        s
    }

    pub fn parse(text: &str) -> Result<MatRep> {
        let mut lines = text.lines();
        let rep = read_rep_lines(&mut lines)?;
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(RepError::Parse("trailing content after rep".into()));
        }
        Ok(rep)
    }
}

/// Reads `rep <p> <d> <k>` followed by `k` matrices.
pub fn read_rep_lines<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<MatRep> {
    let header = lines
        .next()
        .ok_or_else(|| RepError::Parse("missing rep header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let nums: Vec<u64> = parts
        .iter()
        .skip(1)
        .map(|t| t.parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| RepError::Parse(format!("bad rep header `{header}`")))?;
    if parts.first() != Some(&"rep") || nums.len() != 3 {
        return Err(RepError::Parse(format!("bad rep header `{header}`")));
    }
    let field = Fp::new(nums[0])?;
    let dim = nums[1] as usize;
    let mut gens = Vec::with_capacity(nums[2] as usize);
    for _ in 0..nums[2] {
        let m = read_matrix_lines(lines)?;
        if m.field() != field {
            return Err(GfError::ModulusMismatch(m.field().p(), field.p()).into());
        }
        gens.push(m);
    }
    MatRep::new(field, dim, gens)
}

/// Echelonized basis of the vectors fixed by a subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSpace {
    pub label: String,
    pub dim_ambient: usize,
    pub basis: Vec<FpVector>,
}

impl FixedSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Common fixed vectors of a list of matrices (left kernel of the stacked
/// `M - I`).
pub fn fixed_vectors(field: Fp, dim: usize, mats: &[FpMatrix]) -> Vec<FpVector> {
    if mats.is_empty() {
        return (0..dim).map(|i| FpVector::unit(field, dim, i)).collect();
    }
    let id = FpMatrix::identity(field, dim);
    let mut stacked = mats[0].sub(&id);
    for m in &mats[1..] {
        stacked = stacked.hconcat(&m.sub(&id));
    }
    stacked.left_nullspace()
}

pub fn fixed_space(rep: &MatRep, subgroup: &[GroupWord], label: &str) -> Result<FixedSpace> {
    let mats = subgroup
        .iter()
        .map(|w| rep.eval_word(w))
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedSpace {
        label: label.to_string(),
        dim_ambient: rep.dim(),
        basis: fixed_vectors(rep.field(), rep.dim(), &mats),
    })
}

pub fn unique_fixed_vector(rep: &MatRep, subgroup: &[GroupWord]) -> Result<FpVector> {
    let fs = fixed_space(rep, subgroup, "")?;
    if fs.dim() != 1 {
        return Err(RepError::FixedDim(fs.dim()));
    }
    Ok(fs.basis[0].normalized())
}

/// Every element of a subgroup, given on a faithful permutation side, with
/// its matrix and a word in the subgroup generators.
#[derive(Debug, Clone)]
pub struct ElementTable {
    field: Fp,
    dim: usize,
    perms: Vec<Perm>,
    mats: Vec<FpMatrix>,
    words: Vec<GroupWord>,
    index: HashMap<Perm, usize>,
}

impl ElementTable {
    /// Breadth-first closure. Fails if two words give the same permutation
    /// but different matrices, which means the matrices do not define a
    /// representation of the permutation group.
    pub fn enumerate(
        perm_gens: &[Perm],
        degree: usize,
        mats: &[FpMatrix],
        field: Fp,
        dim: usize,
        bound: usize,
    ) -> Result<ElementTable> {
        if perm_gens.len() != mats.len() {
            return Err(RepError::Dimension(format!(
                "{} permutations but {} matrices",
                perm_gens.len(),
                mats.len()
            )));
        }
        let id = Perm::identity(degree);
        let mut t = ElementTable {
            field,
            dim,
            perms: vec![id.clone()],
            mats: vec![FpMatrix::identity(field, dim)],
            words: vec![GroupWord::empty()],
            index: HashMap::from([(id, 0)]),
        };
        let mut head = 0;
        while head < t.perms.len() {
            let (p, m, w) = (
                t.perms[head].clone(),
                t.mats[head].clone(),
                t.words[head].clone(),
            );
            head += 1;
            for (gi, (g, gm)) in perm_gens.iter().zip(mats).enumerate() {
                let q = p.mul(g);
                let qm = m.mul(gm);
                match t.index.get(&q) {
                    Some(&k) => {
                        if t.mats[k] != qm {
                            return Err(RepError::Inconsistent(format!(
                                "element {} has two different matrices",
                                q.cycle_string()
                            )));
                        }
                    }
                    None => {
                        if t.perms.len() >= bound {
                            return Err(RepError::Bound { bound });
                        }
                        t.index.insert(q.clone(), t.perms.len());
                        t.perms.push(q);
                        t.mats.push(qm);
                        t.words.push(w.concat(&GroupWord::generator(gi)));
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn mats(&self) -> &[FpMatrix] {
        &self.mats
    }

    pub fn words(&self) -> &[GroupWord] {
        &self.words
    }

    pub fn matrix_of(&self, p: &Perm) -> Option<&FpMatrix> {
        self.index.get(p).map(|&i| &self.mats[i])
    }

    /// Sum of all element matrices.
    pub fn sum(&self) -> FpMatrix {
        let mut s = FpMatrix::zero(self.field, self.dim, self.dim);
        for m in &self.mats {
            s.add_assign(m);
        }
        s
    }

    /// Matrix of the fixed-point idempotent `|S|^-1 sum_s s`.
    pub fn idempotent(&self) -> Result<FpMatrix> {
        let f = self.field;
        let n = f.from_u64(self.len() as u64);
        let inv = f.inv(n).ok_or_else(|| RepError::CharDivides {
            p: f.p(),
            order: BigUint::from(self.len()),
        })?;
        Ok(self.sum().scale(inv))
    }
}

/// `v e_S = |S|^-1 sum_{s in S} v s`.
pub fn idempotent_smash(v: &FpVector, s: &ElementTable) -> Result<FpVector> {
    let f = s.field();
    let n = f.from_u64(s.len() as u64);
    let inv = f.inv(n).ok_or_else(|| RepError::CharDivides {
        p: f.p(),
        order: BigUint::from(s.len()),
    })?;
    let mut acc = FpVector::zero(f, v.len());
    for m in s.mats() {
        acc.add_assign(&v.mul_mat(m));
    }
    Ok(acc.scale(inv))
}

/// `Tr_L^M(v) = sum_{g in L\M} v g` over a right transversal read off the
/// element table of `M` in table order.
pub fn trace_operator(v: &FpVector, l: &PermGroup, m: &ElementTable) -> Result<FpVector> {
    trace_operator_ordered(v, l, m, &(0..m.len()).collect::<Vec<_>>())
}

/// As [`trace_operator`], choosing transversal elements in the given order.
pub fn trace_operator_ordered(
    v: &FpVector,
    l: &PermGroup,
    m: &ElementTable,
    order: &[usize],
) -> Result<FpVector> {
    let mut in_l = Vec::new();
    for (p, mat) in m.perms().iter().zip(m.mats()) {
        if l.contains(p)? {
            if v.mul_mat(mat) != *v {
                return Err(RepError::NotFixed);
            }
            in_l.push(p.clone());
        }
    }
    let mut covered = vec![false; m.len()];
    let mut acc = FpVector::zero(m.field(), v.len());
    for &i in order {
        if covered[i] {
            continue;
        }
        let g = &m.perms()[i];
        for x in &in_l {
            let k = m.index[&x.mul(g)];
            covered[k] = true;
        }
        acc.add_assign(&v.mul_mat(&m.mats()[i]));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Fp {
        Fp::new(7).unwrap()
    }

    fn cyc(n: usize, cs: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cs).unwrap()
    }

    fn perm_matrix(p: &Perm) -> FpMatrix {
        let imgs: Vec<usize> = (0..p.degree()).map(|i| p.image(i)).collect();
        FpMatrix::permutation(f7(), &imgs)
    }

    fn s3() -> (Vec<Perm>, MatRep) {
        let gens = vec![cyc(3, &[&[1, 2, 3]]), cyc(3, &[&[1, 2]])];
        let rep = MatRep::new(f7(), 3, gens.iter().map(perm_matrix).collect()).unwrap();
        (gens, rep)
    }

    #[test]
    fn act_examples() {
        let (_, rep) = s3();
        let e3 = FpVector::unit(f7(), 3, 2);
        assert_eq!(rep.act(&e3, &GroupWord::empty()).unwrap(), e3);
        let w = GroupWord::new(vec![1, 2, -1]).unwrap();
        let back = rep.act(&rep.act(&e3, &w).unwrap(), &w.inverse()).unwrap();
        assert_eq!(back, e3);
        let e1 = FpVector::unit(f7(), 3, 0);
        assert_eq!(rep.act(&e3, &GroupWord::generator(0)).unwrap(), e1);
        assert!(rep.act(&FpVector::zero(f7(), 2), &w).is_err());
    }

    #[test]
    fn fixed_spaces() {
        let (_, rep) = s3();
        assert_eq!(fixed_space(&rep, &[], "1").unwrap().dim(), 3);
        let fs = fixed_space(&rep, &[GroupWord::generator(1)], "S2").unwrap();
        assert_eq!(fs.dim(), 2);
        for b in &fs.basis {
            assert_eq!(b.get(0), b.get(1));
        }
        let all = [GroupWord::generator(0), GroupWord::generator(1)];
        let v = unique_fixed_vector(&rep, &all).unwrap();
        assert_eq!(v, FpVector::from_i64(f7(), &[1, 1, 1]));
        assert_eq!(
            unique_fixed_vector(&rep, &[GroupWord::generator(1)]),
            Err(RepError::FixedDim(2))
        );
    }

    #[test]
    fn trace_examples() {
        let (gens, rep) = s3();
        let m = ElementTable::enumerate(&gens, 3, rep.generators(), f7(), 3, 100).unwrap();
        let l = PermGroup::new(3, vec![gens[1].clone()]).unwrap();
        let e3 = FpVector::unit(f7(), 3, 2);
        let t = trace_operator(&e3, &l, &m).unwrap();
        assert_eq!(t, FpVector::from_i64(f7(), &[1, 1, 1]));
        let rev: Vec<usize> = (0..m.len()).rev().collect();
        assert_eq!(trace_operator_ordered(&e3, &l, &m, &rev).unwrap(), t);
        // L = M: single coset
        let full = PermGroup::new(3, gens.clone()).unwrap();
        assert_eq!(trace_operator(&t, &full, &m).unwrap(), t);
        // trivial L, fixed v: index times v
        let triv = PermGroup::trivial(3);
        assert_eq!(trace_operator(&t, &triv, &m).unwrap(), t.scale(6));
        let e1 = FpVector::unit(f7(), 3, 0);
        assert_eq!(trace_operator(&e1, &l, &m), Err(RepError::NotFixed));
    }

    #[test]
    fn smash_examples() {
        let (gens, rep) = s3();
        let s =
            ElementTable::enumerate(&gens[1..], 3, &rep.generators()[1..], f7(), 3, 100).unwrap();
        let e1 = FpVector::unit(f7(), 3, 0);
        let r = idempotent_smash(&e1, &s).unwrap();
        assert_eq!(r, FpVector::from_i64(f7(), &[4, 4, 0]));
        assert_eq!(idempotent_smash(&r, &s).unwrap(), r);
        let d = FpVector::from_i64(f7(), &[1, -1, 0]);
        assert!(idempotent_smash(&d, &s).unwrap().is_zero());
        let f2 = Fp::new(2).unwrap();
        let s2 = ElementTable::enumerate(
            &gens[1..],
            3,
            &[FpMatrix::permutation(f2, &[1, 0, 2])],
            f2,
            3,
            100,
        )
        .unwrap();
        assert!(matches!(
            idempotent_smash(&FpVector::unit(f2, 3, 0), &s2),
            Err(RepError::CharDivides { .. })
        ));
    }

    #[test]
    fn inconsistent_table_detected() {
        let (gens, _) = s3();
        let bad = vec![FpMatrix::scalar(f7(), 1, 2), FpMatrix::scalar(f7(), 1, 3)];
        assert!(matches!(
            ElementTable::enumerate(&gens, 3, &bad, f7(), 1, 100),
            Err(RepError::Inconsistent(_))
        ));
    }

    #[test]
    fn rep_text_roundtrip() {
        let (_, rep) = s3();
        let t = rep.to_text();
        assert!(t.starts_with("rep 7 3 2\nmatrix 7 3 3\n"));
        assert_eq!(MatRep::parse(&t).unwrap(), rep);
    }
}
