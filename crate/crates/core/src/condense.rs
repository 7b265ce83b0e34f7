//! The condensed module `H(V) = (+)_j Fix_V(U_j)` and the action of the
//! Schur bases on it.
//!
//! Operators are stored in column convention: block `[j, k]` has shape
//! `dim Fix(U_j) x dim Fix(U_k)`, and its column `b` holds the coordinates
//! (in the basis of `Fix(U_j)`) of the image of the `b`-th basis vector of
//! `Fix(U_k)`. With this convention `M(xy) = M(x) M(y)`.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::endo::{self, CountConfig, CountingTable, DoubleCosetData, EndoError, Translates};
use crate::gfmat::{
    gcd_bezout, min_poly, parse_matrix, write_matrix, EchelonBasis, Fp, FpMatrix, FpPoly, FpVector,
    GfError,
};
use crate::orbits::OrbitDB;
use crate::permgrp::{GroupWord, Perm, PermError, PermGroup};
use crate::rep::{fixed_vectors, idempotent_smash, trace_operator, ElementTable, MatRep, RepError};

#[derive(Debug, Error)]
pub enum CondenseError {
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("characteristic {p} divides |U_{j}| = {order}")]
    CharDivides { p: u32, j: usize, order: usize },
    #[error("module has {got} generators, U has {want}")]
    Generators { got: usize, want: usize },
    #[error("bad operator file: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CondenseError>;

/// Default bound on the size of an enumerated stabilizer `U_j`.
pub const STABILIZER_BOUND: usize = 100_000;

/// Fixed spaces of `V` under the stabilizers `U_j`, with frozen echelon
/// bases and the element tables needed for the fixed-point idempotents.
#[derive(Debug, Clone)]
pub struct CondensedSpace {
    pub module: MatRep,
    pub bases: Vec<EchelonBasis>,
    pub offsets: Vec<usize>,
    pub dim: usize,
    pub stabilizers: Vec<ElementTable>,
}

pub fn build_condensed_space(v: &MatRep, db_u: &OrbitDB) -> Result<CondensedSpace> {
    let group = &db_u.engine().group;
    if v.ngens() != group.ngens() {
        return Err(CondenseError::Generators {
            got: v.ngens(),
            want: group.ngens(),
        });
    }
    let p = v.field();
    let mut bases = Vec::new();
    let mut offsets = Vec::new();
    let mut stabilizers = Vec::new();
    let mut dim = 0;
    for (j, s) in db_u.suborbits().iter().enumerate() {
        let perms: Vec<Perm> = s
            .stabilizer_words
            .iter()
            .map(|w| group.perm_of(w))
            .collect();
        let mats = s
            .stabilizer_words
            .iter()
            .map(|w| v.eval_word(w))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let order = s.stabilizer_order();
        if (&order % p.p()).to_u32() == Some(0) {
            return Err(CondenseError::CharDivides {
                p: p.p(),
                j: j + 1,
                order: order.to_usize().unwrap_or(usize::MAX),
            });
        }
        let table = ElementTable::enumerate(
            &perms,
            group.perms.degree(),
            &mats,
            p,
            v.dim(),
            STABILIZER_BOUND,
        )?;
        let fixed = fixed_vectors(p, v.dim(), &mats);
        let basis = EchelonBasis::from_vectors(p, v.dim(), &fixed);
        offsets.push(dim);
        dim += basis.rank();
        bases.push(basis);
        stabilizers.push(table);
    }
    Ok(CondensedSpace {
        module: v.clone(),
        bases,
        offsets,
        dim,
        stabilizers,
    })
}

impl CondensedSpace {
    pub fn block_dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.rank()).collect()
    }

    pub fn field(&self) -> Fp {
        self.module.field()
    }

    /// Block `[j, k]` whose column `b` is `coords_j(f(B_k[b]))`.
    fn block<F>(&self, j: usize, k: usize, f: F) -> Result<FpMatrix>
    where
        F: Fn(&FpVector) -> Result<FpVector>,
    {
        let (bj, bk) = (&self.bases[j], &self.bases[k]);
        let mut m = FpMatrix::zero(self.field(), bj.rank(), bk.rank());
        for (b, x) in bk.rows().iter().enumerate() {
            let y = f(x)?;
            let c = bj.coords(&y).ok_or_else(|| {
                CondenseError::Internal(format!(
                    "image of a U_{} fixed vector is not fixed by U_{}",
                    k + 1,
                    j + 1
                ))
            })?;
            for (a, &val) in c.iter().enumerate() {
                m.set(a, b, val);
            }
        }
        Ok(m)
    }
}

/// A `D x D` operator on the condensed module with its block structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockOperator {
    pub label: String,
    pub blocks: Vec<usize>,
    pub matrix: FpMatrix,
}

impl BlockOperator {
    pub fn zero(label: &str, cs: &CondensedSpace) -> BlockOperator {
        BlockOperator {
            label: label.into(),
            blocks: cs.block_dims(),
            matrix: FpMatrix::zero(cs.field(), cs.dim, cs.dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn offset(&self, j: usize) -> usize {
        self.blocks[..j].iter().sum()
    }

    pub fn block(&self, j: usize, k: usize) -> FpMatrix {
        self.matrix.block(
            self.offset(j),
            self.offset(k),
            self.blocks[j],
            self.blocks[k],
        )
    }

    pub fn set_block(&mut self, j: usize, k: usize, m: &FpMatrix) {
        let (r, c) = (self.offset(j), self.offset(k));
        self.matrix.set_block(r, c, m);
    }

    /// `blocks <s> <d_1> ... <d_s>` followed by the matrix.
    pub fn to_text(&self) -> String {
        let mut s = format!("blocks {}", self.blocks.len());
        for d in &self.blocks {
            let _ = write!(s, " {d}");
        }
        s.push('\n');
        s.push_str(&write_matrix(&self.matrix));
        s
    }

    pub fn parse(label: &str, text: &str) -> Result<BlockOperator> {
        let (head, rest) = text
            .split_once('\n')
            .ok_or_else(|| CondenseError::Parse("missing blocks header".into()))?;
        let mut it = head.split_whitespace();
        if it.next() != Some("blocks") {
            return Err(CondenseError::Parse("expected `blocks`".into()));
        }
        let nums = it
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CondenseError::Parse(e.to_string()))?;
        let (&s, blocks) = nums
            .split_first()
            .ok_or_else(|| CondenseError::Parse("missing block count".into()))?;
        if blocks.len() != s {
            return Err(CondenseError::Parse(format!(
                "{s} blocks announced, {} sizes given",
                blocks.len()
            )));
        }
        let matrix = parse_matrix(rest)?;
        let d: usize = blocks.iter().sum();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(CondenseError::Parse(format!(
                "matrix is {}x{}, blocks add up to {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(BlockOperator {
            label: label.into(),
            blocks: blocks.to_vec(),
            matrix,
        })
    }
}

/// The action of `A_i` on `H(V)` from precomputed translates.
pub fn condensed_action_from(tr: &Translates, cs: &CondensedSpace) -> Result<BlockOperator> {
    let s = cs.bases.len();
    let v = &cs.module;
    let mut op = BlockOperator::zero(&format!("A{}", tr.i + 1), cs);
    for (j, row) in tr.table.iter().enumerate() {
        let mut sums: Vec<Option<FpMatrix>> = vec![None; s];
        for t in row {
            let m = v.eval_word(&t.u)?;
            match &mut sums[t.k] {
                Some(acc) => acc.add_assign(&m),
                slot => *slot = Some(m),
            }
        }
        for (k, sum) in sums.into_iter().enumerate() {
            let Some(sum) = sum else { continue };
            if cs.bases[j].rank() == 0 || cs.bases[k].rank() == 0 {
                continue;
            }
            let b = cs.block(j, k, |x| Ok(x.mul_mat(&sum)))?;
            op.set_block(j, k, &b);
        }
    }
    Ok(op)
}

/// The action of `A_i` on `H(V)`: for every point `v` of `O_i` and every
/// `j`, locate `v gamma_j` in some `Omega_k` and add `e_{U_k} u e_{U_j}`
/// into block `[j, k]`.
pub fn condensed_action(
    db_h: &OrbitDB,
    db_u: &OrbitDB,
    i: usize,
    cs: &CondensedSpace,
    cfg: CountConfig,
) -> Result<BlockOperator> {
    let tr = endo::translates(db_h, db_u, i, cfg)?;
    condensed_action_from(&tr, cs)
}

/// How to evaluate a restricted Schur basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurForm {
    /// `x -> |Omega_jkl| x e_{U_k} u e_{U_j}`
    Idempotent,
    /// `x -> x u Tr_{U_k^u cap U_j}^{U_j}`
    Trace,
}

/// `A_jkl` on `H(V)`: its only nonzero block is `[j, k]`.
pub fn restricted_schur_action(
    j: usize,
    k: usize,
    l: usize,
    cs: &CondensedSpace,
    dc: &DoubleCosetData,
    db_u: &OrbitDB,
    form: SchurForm,
) -> Result<BlockOperator> {
    let group = &db_u.engine().group;
    let dcos = &dc.classes[j][k][l];
    let u_word: &GroupWord = &dcos.word;
    let u_perm = group.perm_of(u_word);
    let u_mat = cs.module.eval_word(u_word)?;
    let p = cs.field();
    let mut op = BlockOperator::zero(&format!("A{}{}{}", j + 1, k + 1, l + 1), cs);
    if cs.bases[j].rank() == 0 || cs.bases[k].rank() == 0 {
        return Ok(op);
    }
    let (tj, tk) = (&cs.stabilizers[j], &cs.stabilizers[k]);
    let b = match form {
        SchurForm::Idempotent => {
            let size = p.from_u64(dc.omega_size(j, k, l));
            cs.block(j, k, |x| {
                let y = idempotent_smash(x, tk)?.mul_mat(&u_mat);
                Ok(idempotent_smash(&y, tj)?.scale(size))
            })?
        }
        SchurForm::Trace => {
            // L = U_k^u cap U_j = { x in U_j : u x u^-1 in U_k }
            let uk = &db_u.suborbits()[k].stabilizer;
            let u_inv = u_perm.inverse();
            let mut l_group = PermGroup::trivial(group.perms.degree());
            for x in tj.perms() {
                if uk.contains(&u_perm.mul(x).mul(&u_inv))? && !l_group.contains(x)? {
                    l_group = l_group.with_generator(x.clone())?;
                }
            }
            cs.block(j, k, |x| {
                Ok(trace_operator(&x.mul_mat(&u_mat), &l_group, tj)?)
            })?
        }
    };
    op.set_block(j, k, &b);
    Ok(op)
}

/// `sum_{k,l} (c_jkl(i) / |Omega_jkl|) A_jkl`, which must equal the
/// condensed `A_i`.
pub fn embedded_action(
    table: &CountingTable,
    cs: &CondensedSpace,
    dc: &DoubleCosetData,
    db_u: &OrbitDB,
) -> Result<BlockOperator> {
    let coeffs = table
        .embed_coefficients()
        .ok_or_else(|| CondenseError::Internal("partial Omega_jkl intersection".into()))?;
    let mut op = BlockOperator::zero(&format!("A{}", table.i + 1), cs);
    for (j, k, l, c) in coeffs {
        if c == 0 {
            continue;
        }
        let a = restricted_schur_action(j, k, l, cs, dc, db_u, SchurForm::Idempotent)?;
        op.matrix
            .add_assign(&a.matrix.scale(cs.field().from_u64(c)));
    }
    Ok(op)
}

/// One component of the spectral splitting.
#[derive(Debug, Clone)]
pub struct SplitComponent {
    /// Monic irreducible factor of the minimum polynomial.
    pub factor: FpPoly,
    /// Its multiplicity in the minimum polynomial.
    pub h: u32,
    /// Rank of the projector, the dimension of the generalized eigenspace.
    pub d: usize,
    pub projector: FpMatrix,
}

impl SplitComponent {
    /// The eigenvalue, when the factor is linear.
    pub fn eigenvalue(&self) -> Option<u32> {
        (self.factor.degree() == Some(1)).then(|| {
            let f = self.factor.field();
            f.neg(self.factor.coeff(0))
        })
    }

    fn label(&self) -> String {
        match self.eigenvalue() {
            Some(l) => l.to_string(),
            None => format!("poly {:?}", self.factor.coeffs()),
        }
    }
}

/// Orthogonal projectors onto the generalized eigenspaces of `a`, one per
/// irreducible factor `f^h` of the minimum polynomial `mu`: with
/// `mu' = mu / f^h` and `s f^h + t mu' = 1`, the projector is `t(a) mu'(a)`.
pub fn idempotent_split(a: &FpMatrix) -> Result<Vec<SplitComponent>> {
    if !a.is_square() {
        return Err(GfError::NotSquare(a.rows(), a.cols()).into());
    }
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    let mu = min_poly(a)?;
    let factors = mu.factor();
    let mut out = Vec::with_capacity(factors.len());
    for pf in factors {
        let mu_a = pf.poly.pow(pf.multiplicity);
        let co = mu.div_exact(&mu_a);
        let (g, _, t) = gcd_bezout(&mu_a, &co)?;
        if !g.is_one() {
            return Err(CondenseError::Internal("cofactors are not coprime".into()));
        }
        let projector = t.mul(&co).rem(&mu).eval_at_matrix(a)?;
        out.push(SplitComponent {
            d: projector.rank(),
            factor: pf.poly,
            h: pf.multiplicity,
            projector,
        });
    }
    Ok(out)
}

/// Checks `e^2 = e`, `e e' = 0`, `sum e = I`, `a e = e a` and `sum d = dim`.
pub fn split_identities_hold(a: &FpMatrix, split: &[SplitComponent]) -> bool {
    let n = a.rows();
    let f = a.field();
    let mut total = FpMatrix::zero(f, n, n);
    for (x, cx) in split.iter().enumerate() {
        let e = &cx.projector;
        if e.mul(e) != *e || a.mul(e) != e.mul(a) {
            return false;
        }
        for cy in &split[x + 1..] {
            if !e.mul(&cy.projector).is_zero() || !cy.projector.mul(e).is_zero() {
                return false;
            }
        }
        total.add_assign(e);
    }
    total == FpMatrix::identity(f, n) && split.iter().map(|c| c.d).sum::<usize>() == n
}

/// Table in the layout `eigenvalue h d`, one row per factor, and a total.
pub fn eigenspace_table(op: &BlockOperator, split: &[SplitComponent]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# split of {} on a space of dimension {}",
        op.label,
        op.dim()
    );
    let _ = writeln!(s, "{:>12} {:>4} {:>6}", "eigenvalue", "h", "d");
    for c in split {
        let _ = writeln!(s, "{:>12} {:>4} {:>6}", c.label(), c.h, c.d);
        if c.factor.degree() != Some(1) {
            let _ = writeln!(
                s,
                "# warning: nonlinear factor, the projector need not be primitive"
            );
        }
    }
    let _ = writeln!(
        s,
        "{:>12} {:>4} {:>6}",
        "total",
        "",
        split.iter().map(|c| c.d).sum::<usize>()
    );
    s
}

/// `d` per requested eigenvalue, `0` where it does not occur.
pub fn dims_for_eigenvalues(split: &[SplitComponent], eigenvalues: &[u32]) -> Vec<usize> {
    eigenvalues
        .iter()
        .map(|&l| {
            split
                .iter()
                .find(|c| c.eigenvalue() == Some(l))
                .map_or(0, |c| c.d)
        })
        .collect()
}

/// Spectral fingerprint used to compare two representations of the same
/// operator: for every irreducible factor `f` of the characteristic
/// polynomial, `dim ker f(a)^m` for `m = 1, 2, ...` up to its multiplicity.
pub fn spectral_invariants(a: &FpMatrix) -> Result<Vec<(FpPoly, Vec<usize>)>> {
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    let chi = a.char_poly()?;
    let mut out = Vec::new();
    for pf in chi.factor() {
        let fa = pf.poly.eval_at_matrix(a)?;
        let mut pow = FpMatrix::identity(a.field(), a.rows());
        let mut dims = Vec::new();
        for _ in 0..pf.multiplicity {
            pow = pow.mul(&fa);
            dims.push(a.rows() - pow.rank());
        }
        out.push((pf.poly, dims));
    }
    Ok(out)
}
