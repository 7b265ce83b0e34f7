use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::EchelonBasis;
use super::{check_field, Fp, FpMatrix, FpVector, GfError, Result};

/// Univariate polynomial over GF(p), coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    field: Fp,
    coeffs: Vec<u32>,
}

/// One irreducible factor `poly^multiplicity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFactor {
    pub poly: FpPoly,
    pub multiplicity: u32,
}

impl FpPoly {
    pub fn zero(field: Fp) -> FpPoly {
        FpPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: Fp) -> FpPoly {
        FpPoly::constant(field, 1)
    }

    pub fn constant(field: Fp, c: u32) -> FpPoly {
        FpPoly::from_residues(field, vec![c % field.p()])
    }

    /// `X`
    pub fn x(field: Fp) -> FpPoly {
        FpPoly::from_residues(field, vec![0, 1])
    }

    /// `X - a`
    pub fn linear(field: Fp, a: u32) -> FpPoly {
        FpPoly::from_residues(field, vec![field.neg(a % field.p()), 1])
    }

    pub fn from_i64(field: Fp, coeffs: &[i64]) -> FpPoly {
        FpPoly::from_residues(field, coeffs.iter().map(|&c| field.reduce(c)).collect())
    }

    pub fn from_residues(field: Fp, mut coeffs: Vec<u32>) -> FpPoly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { field, coeffs }
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.leading()).expect("nonzero");
        self.scale(inv)
    }

    pub fn scale(&self, c: u32) -> FpPoly {
        let f = self.field;
        FpPoly::from_residues(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        check_field(self.field, other.field);
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        FpPoly::from_residues(
            f,
            (0..n)
                .map(|i| f.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        check_field(self.field, other.field);
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        FpPoly::from_residues(
            f,
            (0..n)
                .map(|i| f.sub(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        check_field(self.field, other.field);
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.field);
        }
        let f = self.field;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        FpPoly::from_residues(f, out)
    }

    pub fn pow(&self, e: u32) -> FpPoly {
        let mut r = FpPoly::one(self.field);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        check_field(self.field, d.field);
        assert!(!d.is_zero(), "polynomial division by zero");
        let f = self.field;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (FpPoly::zero(f), self.clone());
        }
        let inv_lead = f.inv(d.leading()).expect("nonzero");
        let mut rem = self.coeffs.clone();
        let mut q = vec![0u32; rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = f.mul(rem[k + dd], inv_lead);
            q[k] = c;
            if c != 0 {
                for (j, &b) in d.coeffs.iter().enumerate() {
                    rem[k + j] = f.sub(rem[k + j], f.mul(c, b));
                }
            }
        }
        rem.truncate(dd);
        (FpPoly::from_residues(f, q), FpPoly::from_residues(f, rem))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.div_rem(d).1
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &FpPoly) -> FpPoly {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn derivative(&self) -> FpPoly {
        let f = self.field;
        FpPoly::from_residues(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_u64(i as u64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_at_matrix(&self, m: &FpMatrix) -> Result<FpMatrix> {
        if !m.is_square() {
            return Err(GfError::NotSquare(m.rows(), m.cols()));
        }
        check_field(self.field, m.field());
        let n = m.rows();
        let mut acc = FpMatrix::zero(self.field, n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(m).add(&FpMatrix::scalar(self.field, n, c));
        }
        Ok(acc)
    }

    /// `v * f(M)` without forming `f(M)`.
    pub fn eval_at_vector(&self, v: &FpVector, m: &FpMatrix) -> FpVector {
        let mut acc = FpVector::zero(self.field, v.len());
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_mat(m);
            acc.axpy(c, v);
        }
        acc
    }

    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.field);
        }
        self.mul(other).div_exact(&self.gcd(other)).monic()
    }

    /// `self^e mod m`
    pub fn pow_mod(&self, mut e: u64, m: &FpPoly) -> FpPoly {
        let mut base = self.rem(m);
        let mut r = FpPoly::one(self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    /// Factorization into powers of distinct monic irreducibles, sorted by
    /// degree then coefficients. The zero polynomial and constants yield `[]`.
    pub fn factor(&self) -> Vec<PolyFactor> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut out: Vec<PolyFactor> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        for (sqf, mult) in squarefree(&self.monic()) {
            for (part, d) in distinct_degree(&sqf) {
                for irr in equal_degree(&part, d, &mut rng) {
                    out.push(PolyFactor {
                        poly: irr,
                        multiplicity: mult,
                    });
                }
            }
        }
        out.sort_by(|a, b| {
            a.poly
                .degree()
                .cmp(&b.poly.degree())
                .then_with(|| a.poly.coeffs.cmp(&b.poly.coeffs))
        });
        out
    }
}

/// Extended Euclid: returns `(d, a, b)` with `d` monic, `d = gcd(f, g)` and
/// `a f + b g = d`.
pub fn gcd_bezout(f: &FpPoly, g: &FpPoly) -> Result<(FpPoly, FpPoly, FpPoly)> {
    check_field(f.field, g.field);
    if f.is_zero() && g.is_zero() {
        return Err(GfError::BothZero);
    }
    let field = f.field;
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut s0, mut s1) = (FpPoly::one(field), FpPoly::zero(field));
    let (mut t0, mut t1) = (FpPoly::zero(field), FpPoly::one(field));
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    let inv = field.inv(r0.leading()).expect("nonzero");
    Ok((r0.scale(inv), s0.scale(inv), t0.scale(inv)))
}

impl FpPoly {
    pub fn gcd_bezout(&self, other: &FpPoly) -> Result<(FpPoly, FpPoly, FpPoly)> {
        gcd_bezout(self, other)
    }
}

/// Minimum polynomial of a square matrix by Krylov iteration: the lcm of
/// the annihilators of enough unit vectors to span the space.
pub fn min_poly(m: &FpMatrix) -> Result<FpPoly> {
    if !m.is_square() {
        return Err(GfError::NotSquare(m.rows(), m.cols()));
    }
    let f = m.field();
    let n = m.rows();
    let mut span = EchelonBasis::new(f, n);
    let mut mu = FpPoly::one(f);
    for i in 0..n {
        let e = FpVector::unit(f, n, i);
        if span.contains(&e) {
            continue;
        }
        let (ann, krylov) = vector_annihilator(&e, m);
        for k in &krylov {
            span.insert(k);
        }
        mu = mu.lcm(&ann);
        if span.rank() == n {
            break;
        }
    }
    debug_assert!(mu.eval_at_matrix(m)?.is_zero());
    Ok(mu)
}

/// Monic polynomial of least degree with `v * a(M) = 0`, plus the Krylov
/// vectors `v, vM, ..., vM^{d-1}`.
fn vector_annihilator(v: &FpVector, m: &FpMatrix) -> (FpPoly, Vec<FpVector>) {
    let f = m.field();
    let n = m.rows();
    // Track each reduced Krylov vector together with the combination of
    // powers of M that produced it (as a polynomial).
    let mut rows: Vec<(FpVector, FpPoly, usize)> = Vec::new();
    let mut krylov = Vec::new();
    let mut cur = v.clone();
    let mut power = FpPoly::one(f);
    loop {
        let mut r = cur.clone();
        let mut comb = power.clone();
        for (row, poly, pc) in &rows {
            let c = r.get(*pc);
            if c != 0 {
                r.axpy(f.neg(c), row);
                comb = comb.sub(&poly.scale(c));
            }
        }
        match r.as_slice().iter().position(|&x| x != 0) {
            None => return (comb.monic(), krylov),
            Some(pc) => {
                let inv = f.inv(r.get(pc)).expect("nonzero");
                rows.push((r.scale(inv), comb.scale(inv), pc));
                krylov.push(cur.clone());
                cur = cur.mul_mat(m);
                power = power.mul(&FpPoly::x(f));
                if krylov.len() > n {
                    unreachable!("Krylov sequence longer than dimension");
                }
            }
        }
    }
}

/// `det(X I - M)` by reduction to upper Hessenberg form and the standard
/// three-term-style recurrence.
pub(super) fn char_poly_hessenberg(m: &FpMatrix) -> FpPoly {
    let f = m.field();
    let n = m.rows();
    let mut h: Vec<Vec<u32>> = (0..n).map(|i| m.row_slice(i).to_vec()).collect();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = f.inv(h[j + 1][j]).expect("nonzero");
        for k in j + 2..n {
            let u = f.mul(h[k][j], inv);
            if u == 0 {
                continue;
            }
            for c in 0..n {
                let s = h[j + 1][c];
                h[k][c] = f.sub(h[k][c], f.mul(u, s));
            }
            for row in h.iter_mut() {
                let s = row[k];
                row[j + 1] = f.add(row[j + 1], f.mul(u, s));
            }
        }
    }
    // p[m] is the char poly of the leading m x m block.
    let mut p: Vec<FpPoly> = vec![FpPoly::one(f)];
    for mm in 1..=n {
        let a = mm - 1;
        let mut pm = FpPoly::linear(f, h[a][a]).mul(&p[mm - 1]);
        let mut t = 1u32;
        for i in 1..mm {
            t = f.mul(t, h[a - i + 1][a - i]);
            let c = f.mul(t, h[a - i][a]);
            if c != 0 {
                pm = pm.sub(&p[mm - i - 1].scale(c));
            }
        }
        p.push(pm);
    }
    p.pop().expect("nonempty")
}

/// Square-free decomposition of a monic polynomial: `(g_i, i)` with
/// `f = prod g_i^i`, each `g_i` square-free and pairwise coprime.
fn squarefree(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let field = f.field;
    let p = field.p() as usize;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if !z.is_one() {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if !c.is_one() {
        // c is a p-th power; in a prime field a^(1/p) = a
        let root = FpPoly::from_residues(field, c.coeffs.iter().step_by(p).copied().collect());
        for (g, m) in squarefree(&root.monic()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let field = f.field;
    let p = field.p() as u64;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(field);
    let mut h = x.rem(&rest);
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.pow_mod(p, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        let deg = rest.degree().expect("nonzero");
        out.push((rest, deg));
    }
    out
}

/// Cantor-Zassenhaus splitting of a product of distinct irreducibles of
/// degree `d`.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.degree().unwrap_or(0);
    if n == d {
        return vec![f.monic()];
    }
    let field = f.field;
    let p = field.p() as u64;
    loop {
        let a = FpPoly::from_residues(field, (0..n).map(|_| rng.gen_range(0..field.p())).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
            let mut t = a.rem(f);
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.pow_mod(p, f);
                norm = norm.mul(&t).rem(f);
            }
            norm.pow_mod((p - 1) / 2, f).sub(&FpPoly::one(field))
        };
        let g = b.gcd(f);
        let dg = g.degree().unwrap_or(0);
        if !b.is_zero() && dg > 0 && dg < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.div_exact(&g), d, rng));
            return out;
        }
    }
}
