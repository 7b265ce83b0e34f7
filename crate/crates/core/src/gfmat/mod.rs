//! Exact dense linear algebra over prime fields GF(p).
//!
//! All objects carry their modulus. Vectors are rows and matrices act on the
//! right (`v * M`), which is the convention used by every other module.

mod matrix;
mod poly;
mod text;

pub use matrix::{EchelonBasis, FpMatrix, Rref};
pub use poly::{gcd_bezout, min_poly, FpPoly, PolyFactor};
pub use text::{parse_matrix, parse_poly, read_matrix_lines, write_matrix, write_poly};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^31")]
    ModulusTooLarge(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("both polynomials are zero")]
    BothZero,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GfError>;

/// A validated prime modulus. Cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u64) -> Result<Fp> {
        if p > (1u64 << 31) {
            return Err(GfError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        Ok(Fp { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        Some(self.pow(a, self.p as u64 - 2))
    }

    /// Reduce an arbitrary unsigned integer (e.g. a group order) into the field.
    pub fn from_u64(self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    /// Maximum number of products `(p-1)^2` that can be summed in a `u64`.
    pub(crate) fn lazy_terms(self) -> usize {
        let m = (self.p as u64 - 1).max(1);
        let sq = m * m;
        ((u64::MAX - m) / sq).clamp(1, 1 << 20) as usize
    }
}

/// Deterministic primality test for `n < 2^32`-ish moduli.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A single field element together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    pub value: u32,
    pub field: Fp,
}

impl FpScalar {
    pub fn new(field: Fp, value: i64) -> FpScalar {
        FpScalar {
            value: field.reduce(value),
            field,
        }
    }
}

/// A row vector over GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    field: Fp,
    data: Vec<u32>,
}

impl FpVector {
    pub fn zero(field: Fp, len: usize) -> FpVector {
        FpVector {
            field,
            data: vec![0; len],
        }
    }

    pub fn unit(field: Fp, len: usize, i: usize) -> FpVector {
        let mut v = FpVector::zero(field, len);
        v.data[i] = 1 % field.p();
        v
    }

    /// Builds a vector from signed integers, reducing each entry.
    pub fn from_i64(field: Fp, entries: &[i64]) -> FpVector {
        FpVector {
            field,
            data: entries.iter().map(|&x| field.reduce(x)).collect(),
        }
    }

    /// Builds a vector from residues that must already lie in `[0, p)`.
    pub fn from_residues(field: Fp, data: Vec<u32>) -> Result<FpVector> {
        if let Some(&bad) = data.iter().find(|&&x| x >= field.p()) {
            return Err(GfError::Parse(format!(
                "residue {bad} out of range for p = {}",
                field.p()
            )));
        }
        Ok(FpVector { field, data })
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, x: u32) {
        self.data[i] = x % self.field.p();
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &FpVector) -> FpVector {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn add_assign(&mut self, other: &FpVector) {
        check_field(self.field, other.field);
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        let f = self.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, b);
        }
    }

    pub fn sub(&self, other: &FpVector) -> FpVector {
        check_field(self.field, other.field);
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        let f = self.field;
        FpVector {
            field: f,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: u32) -> FpVector {
        let f = self.field;
        FpVector {
            field: f,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: u32, other: &FpVector) {
        if c == 0 {
            return;
        }
        let f = self.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(c, b));
        }
    }

    pub fn dot(&self, other: &FpVector) -> u32 {
        let f = self.field;
        self.data
            .iter()
            .zip(&other.data)
            .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// Right action `v * M`.
    pub fn mul_mat(&self, m: &FpMatrix) -> FpVector {
        m.left_mul_vec(self)
    }

    /// Canonical byte serialization: one byte per entry for `p < 256`,
    /// otherwise four little-endian bytes per entry.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len() * bytes_per_entry(self.field));
        self.write_bytes(&mut out);
        out
    }

    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        if self.field.p() < 256 {
            out.extend(self.data.iter().map(|&x| x as u8));
        } else {
            for &x in &self.data {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
    }

    pub fn from_bytes(field: Fp, len: usize, bytes: &[u8]) -> Result<FpVector> {
        let bpe = bytes_per_entry(field);
        if bytes.len() != len * bpe {
            return Err(GfError::Parse(format!(
                "expected {} bytes, found {}",
                len * bpe,
                bytes.len()
            )));
        }
        let data = if bpe == 1 {
            bytes.iter().map(|&b| b as u32).collect()
        } else {
            bytes
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect()
        };
        FpVector::from_residues(field, data)
    }

    /// Scales so that the first nonzero entry is 1.
    pub fn normalized(&self) -> FpVector {
        match self.data.iter().find(|&&x| x != 0) {
            None => self.clone(),
            Some(&lead) => self.scale(self.field.inv(lead).expect("nonzero")),
        }
    }
}

pub fn bytes_per_entry(field: Fp) -> usize {
    if field.p() < 256 {
        1
    } else {
        4
    }
}

#[inline]
pub(crate) fn check_field(a: Fp, b: Fp) {
    assert!(a == b, "modulus mismatch: {} vs {}", a.p(), b.p());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_recognised() {
        assert!(Fp::new(2).is_ok());
        assert!(Fp::new(11).is_ok());
        assert!(Fp::new(2147483647).is_ok());
        assert_eq!(Fp::new(1), Err(GfError::NotPrime(1)));
        assert_eq!(Fp::new(91), Err(GfError::NotPrime(91)));
        assert!(matches!(Fp::new(1 << 33), Err(GfError::ModulusTooLarge(_))));
    }

    #[test]
    fn inverses() {
        let f = Fp::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
        assert_eq!(f.inv(2), Some(4));
    }

    #[test]
    fn byte_roundtrip_large_modulus() {
        let f = Fp::new(65537).unwrap();
        let v = FpVector::from_i64(f, &[1, -1, 40000]);
        let b = v.to_bytes();
        assert_eq!(b.len(), 12);
        assert_eq!(FpVector::from_bytes(f, 3, &b).unwrap(), v);
    }

    #[test]
    #[should_panic(expected = "modulus mismatch")]
    fn mixing_moduli_panics() {
        let a = FpVector::zero(Fp::new(5).unwrap(), 2);
        let b = FpVector::zero(Fp::new(7).unwrap(), 2);
        let _ = a.add(&b);
    }
}
