use rand::Rng;

use super::{GroupWord, Perm};
use crate::gfmat::FpMatrix;

/// Minimal group interface shared by permutations, invertible matrices and
/// labeled pairs of them.
pub trait GroupElement: Clone {
    fn op(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
}

impl GroupElement for Perm {
    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
}

impl GroupElement for FpMatrix {
    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn inv(&self) -> Self {
        self.inverse()
            .expect("group element matrix must be invertible")
    }
}

impl GroupElement for GroupWord {
    fn op(&self, other: &Self) -> Self {
        self.concat(other)
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
}

impl<A: GroupElement, B: GroupElement> GroupElement for (A, B) {
    fn op(&self, other: &Self) -> Self {
        (self.0.op(&other.0), self.1.op(&other.1))
    }
    fn inv(&self) -> Self {
        (self.0.inv(), self.1.inv())
    }
}

/// Product replacement with an accumulator. Every draw runs a fresh short
/// chain seeded from the caller's stream, which keeps the recorded words
/// short and makes each draw independent of earlier ones.
#[derive(Debug, Clone, Copy)]
pub struct ProductReplacement {
    pub slots: usize,
    pub steps: usize,
}

impl Default for ProductReplacement {
    fn default() -> Self {
        ProductReplacement {
            slots: 10,
            steps: 30,
        }
    }
}

impl ProductReplacement {
    pub fn draw<T: GroupElement, R: Rng + ?Sized>(
        &self,
        gens: &[T],
        identity: &T,
        rng: &mut R,
    ) -> (T, GroupWord) {
        if gens.is_empty() {
            return (identity.clone(), GroupWord::empty());
        }
        let n = gens.len();
        let m = self.slots.max(n).max(2);
        let mut slots: Vec<(T, GroupWord)> = (0..m)
            .map(|i| (gens[i % n].clone(), GroupWord::generator(i % n)))
            .collect();
        let mut acc = (identity.clone(), GroupWord::empty());
        for _ in 0..self.steps {
            let i = rng.gen_range(0..m);
            let mut j = rng.gen_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            let other = if rng.gen::<bool>() {
                slots[j].clone()
            } else {
                slots[j].inv()
            };
            slots[i] = if rng.gen::<bool>() {
                slots[i].op(&other)
            } else {
                other.op(&slots[i])
            };
            acc = acc.op(&slots[i]);
        }
        acc
    }
}

/// One pseudo-random element with the word producing it.
pub fn random_element<T: GroupElement, R: Rng + ?Sized>(
    gens: &[T],
    identity: &T,
    rng: &mut R,
) -> (T, GroupWord) {
    ProductReplacement::default().draw(gens, identity, rng)
}
