use super::{check_field, Fp, FpVector, GfError, Result};

/// Dense row-major matrix over GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row echelon form together with rank and pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn zero(field: Fp, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> FpMatrix {
        let mut m = FpMatrix::zero(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p();
        }
        m
    }

    pub fn scalar(field: Fp, n: usize, c: u32) -> FpMatrix {
        FpMatrix::identity(field, n).scale(c)
    }

    pub fn from_i64(field: Fp, rows: usize, cols: usize, entries: &[i64]) -> Result<FpMatrix> {
        if entries.len() != rows * cols {
            return Err(GfError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(FpMatrix {
            field,
            rows,
            cols,
            data: entries.iter().map(|&x| field.reduce(x)).collect(),
        })
    }

    pub fn from_residues(field: Fp, rows: usize, cols: usize, data: Vec<u32>) -> Result<FpMatrix> {
        if data.len() != rows * cols {
            return Err(GfError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| x >= field.p()) {
            return Err(GfError::Parse(format!(
                "residue {bad} out of range mod {}",
                field.p()
            )));
        }
        Ok(FpMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Stacks row vectors; all must share one modulus and length.
    pub fn from_rows(field: Fp, cols: usize, rows: &[FpVector]) -> Result<FpMatrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.field() != field {
                return Err(GfError::ModulusMismatch(field.p(), r.field().p()));
            }
            if r.len() != cols {
                return Err(GfError::Dimension(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend_from_slice(r.as_slice());
        }
        Ok(FpMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Permutation matrix of `i -> images[i]` (0-based), acting on row vectors.
    pub fn permutation(field: Fp, images: &[usize]) -> FpMatrix {
        let n = images.len();
        let mut m = FpMatrix::zero(field, n, n);
        for (i, &j) in images.iter().enumerate() {
            m.data[i * n + j] = 1 % field.p();
        }
        m
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        self.data[i * self.cols + j] = x % self.field.p();
    }
    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> FpVector {
        FpVector::from_residues(self.field, self.row_slice(i).to_vec()).expect("reduced")
    }

    #[inline]
    pub fn row_slice(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<FpVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == FpMatrix::identity(self.field, self.rows)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &FpMatrix, op: impl Fn(Fp, u32, u32) -> u32) -> FpMatrix {
        check_field(self.field, other.field);
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        let f = self.field;
        FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| op(f, a, b))
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &FpMatrix) {
        *self = self.add(other);
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let f = self.field;
        FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        check_field(self.field, other.field);
        assert_eq!(
            self.cols, other.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let f = self.field;
        let p = f.p() as u64;
        let lazy = f.lazy_terms();
        let (n, m) = (self.cols, other.cols);
        let mut out = vec![0u32; self.rows * m];
        let mut acc = vec![0u64; m];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            let mut pending = 0;
            for k in 0..n {
                let a = self.data[i * n + k] as u64;
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * m..(k + 1) * m];
                for (s, &b) in acc.iter_mut().zip(brow) {
                    *s += a * b as u64;
                }
                pending += 1;
                if pending == lazy {
                    acc.iter_mut().for_each(|s| *s %= p);
                    pending = 0;
                }
            }
            for (o, s) in out[i * m..(i + 1) * m].iter_mut().zip(&acc) {
                *o = (s % p) as u32;
            }
        }
        FpMatrix {
            field: f,
            rows: self.rows,
            cols: m,
            data: out,
        }
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &FpVector) -> FpVector {
        check_field(self.field, v.field());
        assert_eq!(v.len(), self.rows, "vector/matrix dimension mismatch");
        let f = self.field;
        let p = f.p() as u64;
        let lazy = f.lazy_terms();
        let mut acc = vec![0u64; self.cols];
        let mut pending = 0;
        for (k, &a) in v.as_slice().iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as u64;
            for (s, &b) in acc.iter_mut().zip(self.row_slice(k)) {
                *s += a * b as u64;
            }
            pending += 1;
            if pending == lazy {
                acc.iter_mut().for_each(|s| *s %= p);
                pending = 0;
            }
        }
        FpVector::from_residues(f, acc.into_iter().map(|s| (s % p) as u32).collect())
            .expect("reduced")
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut r = FpMatrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        r
    }

    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let factor = m.get(i, c);
                    if factor != 0 {
                        m.row_axpy(i, f.neg(factor), r);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{v : M v^T = 0}`, echelonized.
    pub fn nullspace(&self) -> Vec<FpVector> {
        let f = self.field;
        let Rref { matrix, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = FpVector::zero(f, self.cols);
            v.set(free, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                v.set(pc, f.neg(matrix.get(r, free)));
            }
            basis.push(v);
        }
        // echelonize so the basis is canonical
        if basis.is_empty() {
            return basis;
        }
        FpMatrix::from_rows(f, self.cols, &basis)
            .expect("consistent")
            .row_space_basis()
    }

    /// Basis of `{v : v M = 0}`, echelonized.
    pub fn left_nullspace(&self) -> Vec<FpVector> {
        self.transpose().nullspace()
    }

    /// Nonzero rows of the reduced row echelon form.
    pub fn row_space_basis(&self) -> Vec<FpVector> {
        let r = self.rref();
        (0..r.rank).map(|i| r.matrix.row(i)).collect()
    }

    pub fn inverse(&self) -> Result<FpMatrix> {
        if !self.is_square() {
            return Err(GfError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let f = self.field;
        let mut aug = FpMatrix::zero(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.get(i, j);
            }
            aug.data[i * 2 * n + n + i] = 1 % f.p();
        }
        let r = aug.rref();
        if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
            return Err(GfError::Singular);
        }
        let mut inv = FpMatrix::zero(f, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.data[i * n + j] = r.matrix.get(i, n + j);
            }
        }
        Ok(inv)
    }

    pub fn trace(&self) -> u32 {
        let f = self.field;
        (0..self.rows.min(self.cols)).fold(0, |a, i| f.add(a, self.get(i, i)))
    }

    /// Characteristic polynomial `det(X I - M)` via Hessenberg reduction.
    pub fn char_poly(&self) -> Result<super::FpPoly> {
        if !self.is_square() {
            return Err(GfError::NotSquare(self.rows, self.cols));
        }
        Ok(super::poly::char_poly_hessenberg(self))
    }

    /// Basis of the generalized eigenspace `ker((M - lambda I)^m)` (row vectors).
    pub fn generalized_eigenspace(&self, lambda: u32, m: u32) -> Result<Vec<FpVector>> {
        if !self.is_square() {
            return Err(GfError::NotSquare(self.rows, self.cols));
        }
        let f = self.field;
        let shifted = self.sub(&FpMatrix::scalar(f, self.rows, lambda % f.p()));
        Ok(shifted.pow(m.max(1) as u64).left_nullspace())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        for j in 0..c {
            self.data.swap(a * c + j, b * c + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: u32) {
        let f = self.field;
        let cols = self.cols;
        for x in &mut self.data[r * cols..(r + 1) * cols] {
            *x = f.mul(*x, c);
        }
    }

    /// row[dst] += c * row[src]
    fn row_axpy(&mut self, dst: usize, c: u32, src: usize) {
        let f = self.field;
        let cols = self.cols;
        for j in 0..cols {
            let s = self.data[src * cols + j];
            if s != 0 {
                let d = &mut self.data[dst * cols + j];
                *d = f.add(*d, f.mul(c, s));
            }
        }
    }

    /// Horizontal block `[self | other]`.
    pub fn hconcat(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = FpMatrix::zero(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            out.data[i * out.cols..i * out.cols + self.cols].copy_from_slice(self.row_slice(i));
            out.data[i * out.cols + self.cols..(i + 1) * out.cols]
                .copy_from_slice(other.row_slice(i));
        }
        out
    }

    /// Vertical stack.
    pub fn vconcat(&self, other: &FpMatrix) -> FpMatrix {
        check_field(self.field, other.field);
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FpMatrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Copies `block` into position `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &FpMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = block.get(i, j);
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> FpMatrix {
        let mut b = FpMatrix::zero(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b.data[i * cols + j] = self.get(r0 + i, c0 + j);
            }
        }
        b
    }
}

/// An echelonized subspace supporting incremental insertion and coordinates.
///
/// Rows are kept fully reduced, so the coordinate of `v` along row `i` is
/// the entry of `v` at pivot column `i`.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: Fp,
    dim: usize,
    rows: Vec<FpVector>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(field: Fp, dim: usize) -> EchelonBasis {
        EchelonBasis {
            field,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors(field: Fp, dim: usize, vs: &[FpVector]) -> EchelonBasis {
        let mut b = EchelonBasis::new(field, dim);
        for v in vs {
            b.insert(v);
        }
        b.sort();
        b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[FpVector] {
        &self.rows
    }

    /// Reduces `v` against the basis; returns the residue.
    pub fn reduce(&self, v: &FpVector) -> FpVector {
        let f = self.field;
        let mut r = v.clone();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = r.get(pc);
            if c != 0 {
                r.axpy(f.neg(c), row);
            }
        }
        r
    }

    pub fn contains(&self, v: &FpVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &FpVector) -> bool {
        let f = self.field;
        let r = self.reduce(v);
        let Some(pc) = r.as_slice().iter().position(|&x| x != 0) else {
            return false;
        };
        let r = r.scale(f.inv(r.get(pc)).expect("nonzero"));
        for row in &mut self.rows {
            let c = row.get(pc);
            if c != 0 {
                row.axpy(f.neg(c), &r);
            }
        }
        self.rows.push(r);
        self.pivots.push(pc);
        true
    }

    /// Orders rows by pivot column (reduced row echelon form).
    pub fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        self.rows = idx.iter().map(|&i| self.rows[i].clone()).collect();
        self.pivots = idx.iter().map(|&i| self.pivots[i]).collect();
    }

    /// Coordinates of `v` in this basis, or `None` if `v` is outside the span.
    pub fn coords(&self, v: &FpVector) -> Option<Vec<u32>> {
        let c: Vec<u32> = self.pivots.iter().map(|&pc| v.get(pc)).collect();
        let f = self.field;
        let mut recon = FpVector::zero(f, self.dim);
        for (row, &ci) in self.rows.iter().zip(&c) {
            recon.axpy(ci, row);
        }
        (recon == *v).then_some(c)
    }

    pub fn to_matrix(&self) -> FpMatrix {
        FpMatrix::from_rows(self.field, self.dim, &self.rows).expect("consistent")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = FpMatrix::identity(f(7), 2);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 2);
        let z = FpMatrix::zero(f(5), 3, 3);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_dependent_rows() {
        // row2 - 2*row1 vanishes
        let m = FpMatrix::from_i64(f(7), 2, 2, &[1, 2, 2, 4]).unwrap();
        let r = m.rref();
        assert_eq!(
            r.matrix,
            FpMatrix::from_i64(f(7), 2, 2, &[1, 2, 0, 0]).unwrap()
        );
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn nullspace_examples() {
        assert!(FpMatrix::identity(f(5), 4).nullspace().is_empty());
        let z = FpMatrix::zero(f(5), 3, 3).nullspace();
        assert_eq!(z.len(), 3);
        let m = FpMatrix::from_i64(f(5), 1, 3, &[1, 1, 1]).unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        let ones = FpVector::from_i64(f(5), &[1, 1, 1]);
        for v in &ns {
            assert_eq!(v.dot(&ones), 0);
            assert!(!v.is_zero());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = FpMatrix::from_i64(f(11), 3, 3, &[2, 1, 0, 0, 3, 1, 1, 0, 5]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let sing = FpMatrix::from_i64(f(11), 2, 2, &[1, 2, 2, 4]).unwrap();
        assert_eq!(sing.inverse(), Err(GfError::Singular));
    }

    #[test]
    fn lazy_reduction_large_prime() {
        let p = 2147483647u64;
        let n = 40;
        let fp = f(p);
        let a = FpMatrix::from_i64(fp, n, n, &vec![p as i64 - 1; n * n]).unwrap();
        let b = a.mul(&a);
        // (-1)(-1) summed n times
        assert!(b.as_slice().iter().all(|&x| x as usize == n));
    }

    #[test]
    fn generalized_eigenspaces() {
        let fp = f(7);
        let d = FpMatrix::from_i64(fp, 3, 3, &[3, 0, 0, 0, 3, 0, 0, 0, 5]).unwrap();
        assert_eq!(d.generalized_eigenspace(3, 1).unwrap().len(), 2);
        assert!(d.generalized_eigenspace(1, 1).unwrap().is_empty());
        let j = FpMatrix::from_i64(f(11), 2, 2, &[4, 1, 0, 4]).unwrap();
        assert_eq!(j.generalized_eigenspace(4, 2).unwrap().len(), 2);
        assert_eq!(j.generalized_eigenspace(4, 1).unwrap().len(), 1);
    }

    #[test]
    fn echelon_coords() {
        let fp = f(5);
        let vs = [
            FpVector::from_i64(fp, &[1, 2, 0, 1]),
            FpVector::from_i64(fp, &[0, 1, 1, 3]),
        ];
        let b = EchelonBasis::from_vectors(fp, 4, &vs);
        assert_eq!(b.rank(), 2);
        let w = vs[0].scale(3).add(&vs[1].scale(4));
        let c = b.coords(&w).unwrap();
        let mut recon = FpVector::zero(fp, 4);
        for (row, &ci) in b.rows().iter().zip(&c) {
            recon.axpy(ci, row);
        }
        assert_eq!(recon, w);
        assert!(b.coords(&FpVector::unit(fp, 4, 3)).is_none());
    }

    #[test]
    fn from_rows_rejects_mixed_moduli() {
        let r = FpMatrix::from_rows(f(5), 2, &[FpVector::zero(f(7), 2)]);
        assert_eq!(r, Err(GfError::ModulusMismatch(5, 7)));
    }
}
