//! Brute-force reference computations on small scenarios: explicit induced
//! modules, explicit `e_H`-condensation and Hom dimensions from Sylvester
//! systems. Nothing here uses the helper-subgroup machinery; the orbit of
//! `v_1` is closed directly.

use std::fmt::Write as _;

use thiserror::Error;

use crate::condense::{
    self, build_condensed_space, condensed_action_from, idempotent_split, spectral_invariants,
    CondenseError,
};
use crate::endo::{self, CountConfig, EndoError};
use crate::gfmat::{EchelonBasis, Fp, FpMatrix, FpVector, GfError};
use crate::orbits::{direct_orbit, DirectOrbit, OrbitDB, OrbitError};
use crate::permgrp::{CosetTable, GroupWord, Perm, PermError, PermGroup};
use crate::rep::{ElementTable, MatRep, RepError};
use crate::scenario::Setup;

/// Default bound on `[G:U] dim V` and on other explicit dimensions.
pub const EXPLICIT_BOUND: usize = 20_000;
/// Default bound on the number of points of `O` closed directly.
pub const ORBIT_BOUND: usize = 100_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Condense(#[from] CondenseError),
    #[error("explicit dimension {dim} exceeds the bound {bound}")]
    Bound { dim: usize, bound: usize },
    #[error("characteristic {p} divides |H| = {order}")]
    CharDivides { p: u32, order: usize },
    #[error("G does not act faithfully on the orbit of v_1")]
    NotFaithful,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// A module given by one matrix per group generator.
#[derive(Debug, Clone)]
pub struct ExplicitModule {
    pub field: Fp,
    pub dim: usize,
    pub gens: Vec<FpMatrix>,
    pub note: String,
}

/// `G` acting on the points of `O = v_1^G`, with `H` and `U` as permutation
/// groups of the same points.
#[derive(Debug, Clone)]
pub struct PointAction {
    pub orbit: DirectOrbit,
    pub g: Vec<Perm>,
    pub h: PermGroup,
    pub u: Vec<Perm>,
}

impl PointAction {
    pub fn new(setup: &Setup, bound: usize) -> Result<PointAction> {
        let gens = setup.action.generators();
        let orbit = direct_orbit(&setup.seed_vector, gens, bound)?;
        let g = gens
            .iter()
            .map(|m| orbit.perm_of(m).ok_or(OracleError::NotFaithful))
            .collect::<Result<Vec<_>>>()?;
        let n = orbit.len();
        let h = PermGroup::new(
            n,
            setup.h.words.iter().map(|w| w.eval_perm(&g, n)).collect(),
        )?;
        let u = setup.u.words.iter().map(|w| w.eval_perm(&g, n)).collect();
        Ok(PointAction { orbit, g, h, u })
    }

    pub fn len(&self) -> usize {
        self.orbit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbit.is_empty()
    }

    /// `g_p` with `v_1 g_p` the `p`-th point.
    pub fn element_to(&self, p: usize) -> Perm {
        self.orbit.word_to(p).eval_perm(&self.g, self.len())
    }

    /// The `H`-orbits on the points, each sorted, ordered by smallest point.
    pub fn h_orbits(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orb = vec![start];
            let mut head = 0;
            while head < orb.len() {
                let x = orb[head];
                head += 1;
                for g in self.h.generators() {
                    let y = g.image(x);
                    if !seen[y] {
                        seen[y] = true;
                        orb.push(y);
                    }
                }
            }
            orb.sort_unstable();
            out.push(orb);
        }
        out
    }

    /// The permutation module `F[O]`.
    pub fn permutation_module(&self, p: Fp) -> ExplicitModule {
        ExplicitModule {
            field: p,
            dim: self.len(),
            gens: self.g.iter().map(|g| perm_matrix(p, g)).collect(),
            note: "permutation module on the orbit of v_1".into(),
        }
    }

    /// `A_X` on `F[O]` for an `H`-invariant set `X`: the point `v_1 g`
    /// maps to `sum_{x in X} x g`.
    pub fn schur_matrix(&self, p: Fp, x: &[usize]) -> FpMatrix {
        let n = self.len();
        let mut m = FpMatrix::zero(p, n, n);
        for q in 0..n {
            let g = self.element_to(q);
            for &w in x {
                let c = g.image(w);
                m.set(q, c, p.add(m.get(q, c), 1));
            }
        }
        m
    }
}

pub fn perm_matrix(p: Fp, g: &Perm) -> FpMatrix {
    let imgs: Vec<usize> = g.images().iter().map(|&x| x as usize).collect();
    FpMatrix::permutation(p, &imgs)
}

/// `V^G` realized on `V (x) F[U\G]` with a right transversal `t_a`:
/// `(v (x) t_a) g = v rho(t_a g t_b^-1) (x) t_b` where `U t_a g = U t_b`.
#[derive(Debug, Clone)]
pub struct InducedModule {
    pub module: ExplicitModule,
    pub cosets: CosetTable,
    pub u_table: ElementTable,
    vdim: usize,
}

impl InducedModule {
    pub fn matrix_of(&self, g: &Perm) -> Result<FpMatrix> {
        let f = self.module.field;
        let d = self.vdim;
        let n = self.cosets.len();
        let mut m = FpMatrix::zero(f, n * d, n * d);
        for a in 0..n {
            let ta = self.cosets.rep(a);
            let tg = ta.mul(g);
            let b = self
                .cosets
                .coset_of(&tg)
                .ok_or_else(|| OracleError::Invalid("element outside G".into()))?;
            let x = tg.mul(&self.cosets.rep(b).inverse());
            let rho = self
                .u_table
                .matrix_of(&x)
                .ok_or_else(|| OracleError::Invalid("transversal quotient outside U".into()))?;
            m.set_block(a * d, b * d, rho);
        }
        Ok(m)
    }
}

/// Induces `V` (a representation of `U` on its generators) to `G`, all
/// groups acting on the points of `O`.
pub fn induce(v: &MatRep, pa: &PointAction, bound: usize) -> Result<InducedModule> {
    let n = pa.len();
    let u = PermGroup::new(n, pa.u.clone())?;
    let cosets = CosetTable::new(&pa.g, &u, bound as u64)?;
    let dim = cosets.len() * v.dim();
    if dim > bound {
        return Err(OracleError::Bound { dim, bound });
    }
    let u_table = ElementTable::enumerate(
        &pa.u,
        n,
        v.generators(),
        v.field(),
        v.dim(),
        crate::rep::ELEMENT_BOUND,
    )?;
    let mut ind = InducedModule {
        module: ExplicitModule {
            field: v.field(),
            dim,
            gens: Vec::new(),
            note: format!("induced from U with [G:U] = {}", cosets.len()),
        },
        cosets,
        u_table,
        vdim: v.dim(),
    };
    ind.module.gens =
        pa.g.iter()
            .map(|g| ind.matrix_of(g))
            .collect::<Result<Vec<_>>>()?;
    Ok(ind)
}

/// `M e_H` with a basis, and the condensed action of given elements.
#[derive(Debug, Clone)]
pub struct ExplicitCondensation {
    pub e_h: FpMatrix,
    pub basis: EchelonBasis,
}

impl ExplicitCondensation {
    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    /// Matrix of `x -> x a e_H` on `M e_H` (row convention).
    pub fn condensed(&self, a: &FpMatrix) -> Result<FpMatrix> {
        let f = self.e_h.field();
        let d = self.dim();
        let ae = a.mul(&self.e_h);
        let mut out = FpMatrix::zero(f, d, d);
        for (r, y) in self.basis.rows().iter().enumerate() {
            let c = self
                .basis
                .coords(&y.mul_mat(&ae))
                .ok_or_else(|| OracleError::Invalid("image leaves M e_H".into()))?;
            for (k, &x) in c.iter().enumerate() {
                out.set(r, k, x);
            }
        }
        Ok(out)
    }
}

/// `e_H = |H|^-1 sum_h M(h)` and a basis of its image.
pub fn condense_explicit<F>(
    h: &PermGroup,
    field: Fp,
    matrix_of: F,
    bound: usize,
) -> Result<ExplicitCondensation>
where
    F: Fn(&Perm) -> Result<FpMatrix>,
{
    let elements = h.elements(bound)?;
    let order = elements.len();
    let inv = field
        .inv(field.from_u64(order as u64))
        .ok_or(OracleError::CharDivides {
            p: field.p(),
            order,
        })?;
    let mut sum: Option<FpMatrix> = None;
    for x in &elements {
        let m = matrix_of(x)?;
        match &mut sum {
            Some(s) => s.add_assign(&m),
            None => sum = Some(m),
        }
    }
    let e_h = sum.expect("group has an identity").scale(inv);
    let rows = e_h.row_space_basis();
    let basis = EchelonBasis::from_vectors(field, e_h.rows(), &rows);
    Ok(ExplicitCondensation { e_h, basis })
}

/// `dim Hom(A, B)` over the group generated by the given pairs of
/// matrices: the solutions `X` of `rho_A(g) X = X rho_B(g)`.
pub fn hom_dim(a: &[FpMatrix], b: &[FpMatrix], bound: usize) -> Result<usize> {
    if a.len() != b.len() {
        return Err(OracleError::Invalid("generator counts differ".into()));
    }
    let (Some(a0), Some(b0)) = (a.first(), b.first()) else {
        return Err(OracleError::Invalid("no generators".into()));
    };
    let (da, db) = (a0.rows(), b0.rows());
    let f = a0.field();
    let unknowns = da * db;
    if unknowns > bound {
        return Err(OracleError::Bound {
            dim: unknowns,
            bound,
        });
    }
    if unknowns == 0 {
        return Ok(0);
    }
    let mut sys = FpMatrix::zero(f, a.len() * unknowns, unknowns);
    for (gi, (ra, rb)) in a.iter().zip(b).enumerate() {
        for r in 0..da {
            for c in 0..db {
                let eq = gi * unknowns + r * db + c;
                // (rho_A X)[r, c] = sum_t rho_A[r, t] X[t, c]
                for t in 0..da {
                    let x = t * db + c;
                    sys.set(eq, x, f.add(sys.get(eq, x), ra.get(r, t)));
                }
                // (X rho_B)[r, c] = sum_t X[r, t] rho_B[t, c]
                for t in 0..db {
                    let x = r * db + t;
                    sys.set(eq, x, f.sub(sys.get(eq, x), rb.get(t, c)));
                }
            }
        }
    }
    Ok(unknowns - sys.rank())
}

/// Restriction of the action of `gens` to the invariant subspace spanned
/// by `basis`, in the coordinates of `basis`.
pub fn restrict_to_subspace(basis: &EchelonBasis, gens: &[FpMatrix]) -> Result<Vec<FpMatrix>> {
    let d = basis.rank();
    let f = gens
        .first()
        .map(|g| g.field())
        .ok_or_else(|| OracleError::Invalid("no generators".into()))?;
    gens.iter()
        .map(|g| {
            let mut m = FpMatrix::zero(f, d, d);
            for (r, y) in basis.rows().iter().enumerate() {
                let c = basis
                    .coords(&y.mul_mat(g))
                    .ok_or_else(|| OracleError::Invalid("subspace is not invariant".into()))?;
                for (k, &x) in c.iter().enumerate() {
                    m.set(r, k, x);
                }
            }
            Ok(m)
        })
        .collect()
}

/// One `PASS`/`FAIL` line of a check report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            let tag = if l.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{tag} {}: {}", l.name, l.detail);
        }
        s
    }
}

/// Pipeline inputs for [`full_pipeline_check`].
pub struct PipelineInputs<'a> {
    pub setup: &'a Setup,
    pub db_h: &'a OrbitDB,
    pub db_u: &'a OrbitDB,
    pub module: &'a str,
    pub split_element: Option<usize>,
    pub count: CountConfig,
}

/// Compares the condensation pipeline with the explicit computations:
/// `D = dim V^G e_H`, spectra of every condensed `A_i` against
/// `n_i e_H g_i e_H`, `dim F[O] e_H = r`, and the `d_alpha` of the split
/// element against `dim Hom_U(P_alpha, V)`.
pub fn full_pipeline_check(inp: &PipelineInputs<'_>) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    let setup = inp.setup;
    let v = setup
        .module(inp.module)
        .map_err(|e| OracleError::Invalid(e.to_string()))?;
    let p = v.field();
    let pa = PointAction::new(setup, ORBIT_BOUND)?;
    let name = format!("{}/{}", setup.scenario.name, inp.module);

    // V must be a representation of U before anything else means something
    if let Err(e) = ElementTable::enumerate(
        &pa.u,
        pa.len(),
        v.generators(),
        p,
        v.dim(),
        crate::rep::ELEMENT_BOUND,
    ) {
        let detail = match e {
            RepError::Inconsistent(m) => format!(
                "module {} violates a relation of U ({m}); Sylvester system not set up",
                inp.module
            ),
            other => other.to_string(),
        };
        rep.push(format!("{name} module relations"), false, detail);
        return Ok(rep);
    }
    rep.push(
        format!("{name} module relations"),
        true,
        "V is a representation of U",
    );

    let r = endo::rank_of_e(inp.db_h);

    // dim F[O] e_H = r and Hom_G(F[O], F[O]) = r
    let perm_mod = pa.permutation_module(p);
    let perm_cond = condense_explicit(&pa.h, p, |x| Ok(perm_matrix(p, x)), EXPLICIT_BOUND)?;
    rep.push(
        format!("{name} dim F[O]e_H = r"),
        perm_cond.dim() == r,
        format!("{} vs {r}", perm_cond.dim()),
    );
    let end_dim = hom_dim(&perm_mod.gens, &perm_mod.gens, EXPLICIT_BOUND)?;
    rep.push(
        format!("{name} dim End_G(F[O]) = r"),
        end_dim == r,
        format!("{end_dim} vs {r}"),
    );

    // D = dim V^G e_H
    let cs = build_condensed_space(v, inp.db_u)?;
    let ind = induce(v, &pa, EXPLICIT_BOUND)?;
    let cond = condense_explicit(&pa.h, p, |x| ind.matrix_of(x), EXPLICIT_BOUND)?;
    rep.push(
        format!("{name} D = dim V^G e_H"),
        cs.dim == cond.dim(),
        format!("{} vs {}", cs.dim, cond.dim()),
    );

    // every A_i against n_i e_H g_i e_H
    let mut ops = Vec::with_capacity(r);
    for (i, s) in inp.db_h.suborbits().iter().enumerate() {
        let tr = endo::translates(inp.db_h, inp.db_u, i, inp.count)?;
        let op = condensed_action_from(&tr, &cs)?;
        let q = pa
            .orbit
            .index_of(&s.rep)
            .ok_or_else(|| OracleError::Invalid("suborbit representative outside O".into()))?;
        let gi = ind.matrix_of(&pa.element_to(q))?;
        let expl = cond.condensed(&gi)?.scale(p.from_u64(s.length));
        let a = spectral_invariants(&op.matrix)?;
        let b = spectral_invariants(&expl)?;
        rep.push(
            format!("{name} spectrum A{}", i + 1),
            a == b,
            if a == b {
                format!("{} factor(s) agree", a.len())
            } else {
                format!("pipeline {a:?} vs explicit {b:?}")
            },
        );
        ops.push(op);
    }

    // the split element: d_alpha against Hom_U(P_alpha, V)
    let s_idx = inp
        .split_element
        .map(|x| x - 1)
        .unwrap_or_else(|| endo::default_split_element(inp.db_h));
    if s_idx >= r {
        return Err(OracleError::Invalid(format!(
            "split element {} out of range 1..={r}",
            s_idx + 1
        )));
    }
    let pipeline_split = idempotent_split(&ops[s_idx].matrix)?;
    let h_orbits = pa.h_orbits();
    let q = pa
        .orbit
        .index_of(&inp.db_h.suborbits()[s_idx].rep)
        .ok_or_else(|| OracleError::Invalid("suborbit representative outside O".into()))?;
    let orb = h_orbits
        .iter()
        .find(|o| o.binary_search(&q).is_ok())
        .ok_or_else(|| OracleError::Invalid("point outside every H-orbit".into()))?;
    let a_s = pa.schur_matrix(p, orb);
    let explicit_split = idempotent_split(&a_s)?;
    let u_perm_mats: Vec<FpMatrix> = pa.u.iter().map(|g| perm_matrix(p, g)).collect();
    let mut ok = true;
    let mut detail = String::new();
    for c in &explicit_split {
        let rows = c.projector.row_space_basis();
        let basis = EchelonBasis::from_vectors(p, pa.len(), &rows);
        let hom = if u_perm_mats.is_empty() {
            // trivial U: Hom is all linear maps
            basis.rank() * v.dim()
        } else {
            let restricted = restrict_to_subspace(&basis, &u_perm_mats)?;
            hom_dim(&restricted, v.generators(), EXPLICIT_BOUND)?
        };
        let d = pipeline_split
            .iter()
            .find(|x| x.factor == c.factor)
            .map_or(0, |x| x.d);
        ok &= d == hom;
        let _ = write!(detail, "[{}: d={d} hom={hom}] ", fmt_factor(c));
    }
    for c in &pipeline_split {
        if !explicit_split.iter().any(|x| x.factor == c.factor) {
            ok = false;
            let _ = write!(detail, "[{}: only in pipeline] ", fmt_factor(c));
        }
    }
    rep.push(
        format!("{name} d_alpha of A{} vs Hom_U(P_alpha, V)", s_idx + 1),
        ok,
        detail.trim_end().to_string(),
    );
    Ok(rep)
}

fn fmt_factor(c: &condense::SplitComponent) -> String {
    match c.eigenvalue() {
        Some(l) => format!("X-{l}"),
        None => format!("{:?}", c.factor.coeffs()),
    }
}

/// Explicit `v_1 A_j A_i` read at `omega_k`, the coefficient of `A_k` in
/// the product, from explicit matrices of the Schur basis on `F[O]`.
pub fn explicit_product_coefficient(
    pa: &PointAction,
    p: Fp,
    x_j: &[usize],
    x_i: &[usize],
    omega_k: usize,
) -> u32 {
    let aj = pa.schur_matrix(p, x_j);
    let ai = pa.schur_matrix(p, x_i);
    let v1 = FpVector::unit(p, pa.len(), 0);
    v1.mul_mat(&aj).mul_mat(&ai).get(omega_k)
}

/// Points of `O` in the `H`-orbit of a vector, as sorted point indices.
pub fn h_orbit_of(pa: &PointAction, v: &FpVector) -> Option<Vec<usize>> {
    let q = pa.orbit.index_of(v)?;
    pa.h_orbits()
        .into_iter()
        .find(|o| o.binary_search(&q).is_ok())
}

/// Word in the generators of `G` taking `v_1` to the `p`-th point.
pub fn word_to_point(pa: &PointAction, p: usize) -> GroupWord {
    pa.orbit.word_to(p)
}
