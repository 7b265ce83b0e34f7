use std::collections::HashSet;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use super::{orbit_of_point, GroupWord, Perm, PermError, PointOrbit, Result};

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    /// `trans[d] = u` with `base^u = d`, plus its inverse.
    trans: Vec<Option<(Perm, Perm)>>,
}

impl Level {
    fn new(base: usize, gens: Vec<Perm>, n: usize) -> Level {
        let mut l = Level {
            base,
            gens,
            orbit: Vec::new(),
            trans: vec![None; n],
        };
        l.rebuild_orbit(n);
        l
    }

    fn rebuild_orbit(&mut self, n: usize) {
        self.trans = vec![None; n];
        let id = Perm::identity(n);
        self.trans[self.base] = Some((id.clone(), id));
        self.orbit = vec![self.base];
        let mut head = 0;
        while head < self.orbit.len() {
            let z = self.orbit[head];
            head += 1;
            for g in &self.gens {
                let y = g.image(z);
                if self.trans[y].is_none() {
                    let u = self.trans[z].as_ref().expect("in orbit").0.mul(g);
                    let ui = u.inverse();
                    self.trans[y] = Some((u, ui));
                    self.orbit.push(y);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Chain {
    levels: Vec<Level>,
}

impl Chain {
    fn build(n: usize, gens: &[Perm], prefix: &[usize]) -> Chain {
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<usize> = prefix.to_vec();
        for g in &gens {
            if base.iter().all(|&b| g.image(b) == b) {
                base.push(g.first_moved().expect("non-identity"));
            }
        }
        let mut levels: Vec<Level> = base
            .iter()
            .enumerate()
            .map(|(l, &b)| {
                let lg = gens
                    .iter()
                    .filter(|g| base[..l].iter().all(|&c| g.image(c) == c))
                    .cloned()
                    .collect();
                Level::new(b, lg, n)
            })
            .collect();

        let mut i = levels.len();
        'outer: while i > 0 {
            let lvl = i - 1;
            let orbit = levels[lvl].orbit.clone();
            let lgens = levels[lvl].gens.clone();
            for &d in &orbit {
                for s in &lgens {
                    let ud = &levels[lvl].trans[d].as_ref().expect("orbit").0;
                    let e = s.image(d);
                    let uei = &levels[lvl].trans[e].as_ref().expect("orbit").1;
                    let sch = ud.mul(s).mul(uei);
                    if sch.is_identity() {
                        continue;
                    }
                    let (h, j) = strip(&levels, &sch, lvl + 1);
                    if j == levels.len() && h.is_identity() {
                        continue;
                    }
                    if j == levels.len() {
                        let b = h.first_moved().expect("non-identity residue");
                        levels.push(Level::new(b, Vec::new(), n));
                    }
                    for level in levels.iter_mut().take(j + 1).skip(lvl + 1) {
                        level.gens.push(h.clone());
                        level.rebuild_orbit(n);
                    }
                    i = j + 1;
                    continue 'outer;
                }
            }
            i -= 1;
        }
        Chain { levels }
    }

    fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }
}

fn strip(levels: &[Level], g: &Perm, from: usize) -> (Perm, usize) {
    let mut h = g.clone();
    for (l, level) in levels.iter().enumerate().skip(from) {
        let b = h.image(level.base);
        match &level.trans[b] {
            None => return (h, l),
            Some((_, ui)) => h = h.mul(ui),
        }
    }
    (h, levels.len())
}

/// A permutation group given by generators; the stabilizer chain is built on
/// first use and cached.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<Chain>,
}

impl PartialEq for PermGroup {
    /// Same degree and same generator list (not group equality).
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.gens == other.gens
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch(g.degree(), degree));
        }
        Ok(PermGroup {
            degree,
            gens,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup {
            degree,
            gens: Vec::new(),
            chain: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    fn chain(&self) -> &Chain {
        self.chain
            .get_or_init(|| Chain::build(self.degree, &self.gens, &[]))
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn base(&self) -> Vec<usize> {
        self.chain().levels.iter().map(|l| l.base).collect()
    }

    pub fn contains(&self, g: &Perm) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(PermError::DegreeMismatch(g.degree(), self.degree));
        }
        let levels = &self.chain().levels;
        let (h, j) = strip(levels, g, 0);
        Ok(j == levels.len() && h.is_identity())
    }

    pub fn orbit(&self, x: usize) -> Result<PointOrbit> {
        orbit_of_point(&self.gens, self.degree, x)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0
            || orbit_of_point(&self.gens, self.degree, 0).map(|o| o.len()) == Ok(self.degree)
    }

    pub fn point_stabilizer(&self, x: usize) -> Result<PermGroup> {
        if x >= self.degree {
            return Err(PermError::PointOutOfRange(x + 1, self.degree));
        }
        let chain = Chain::build(self.degree, &self.gens, &[x]);
        let gens = chain
            .levels
            .get(1)
            .map(|l| l.gens.clone())
            .unwrap_or_default();
        let stab = PermGroup::new(self.degree, gens)?;
        Ok(stab)
    }

    /// Generators of `Stab(x)` as words in this group's generators: Schreier
    /// generators from the orbit tree, kept only while they enlarge the group.
    pub fn stabilizer_words(&self, x: usize) -> Result<Vec<GroupWord>> {
        let orbit = self.orbit(x)?;
        let target = self.order() / BigUint::from(orbit.len());
        let mut words = Vec::new();
        let mut stab = PermGroup::trivial(self.degree);
        if stab.order() == target {
            return Ok(words);
        }
        for &y in &orbit.points {
            let wy = orbit.word_to(y).expect("orbit point");
            for (gi, g) in self.gens.iter().enumerate() {
                let z = g.image(y);
                let wz = orbit.word_to(z).expect("orbit point");
                let w = wy.concat(&GroupWord::generator(gi)).concat(&wz.inverse());
                let p = w.eval_perm(&self.gens, self.degree);
                if !stab.contains(&p)? {
                    let mut gens = stab.gens.clone();
                    gens.push(p);
                    stab = PermGroup::new(self.degree, gens)?;
                    words.push(w);
                    if stab.order() == target {
                        return Ok(words);
                    }
                }
            }
        }
        Ok(words)
    }

    pub fn with_generator(&self, g: Perm) -> Result<PermGroup> {
        let mut gens = self.gens.clone();
        gens.push(g);
        PermGroup::new(self.degree, gens)
    }

    /// Generators `g^-1 s g`.
    pub fn conjugate(&self, g: &Perm) -> Result<PermGroup> {
        if g.degree() != self.degree {
            return Err(PermError::DegreeMismatch(g.degree(), self.degree));
        }
        PermGroup::new(
            self.degree,
            self.gens.iter().map(|s| s.conjugate(g)).collect(),
        )
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> (Perm, GroupWord) {
        super::random_element(&self.gens, &Perm::identity(self.degree), rng)
    }

    /// Canonical element of the right coset `self * g`: the one whose base
    /// images are lexicographically least.
    pub fn canonical_coset_rep(&self, g: &Perm) -> Perm {
        let mut c = g.clone();
        for level in &self.chain().levels {
            let best = level
                .orbit
                .iter()
                .copied()
                .min_by_key(|&d| c.image(d))
                .expect("nonempty orbit");
            let u = &level.trans[best].as_ref().expect("orbit").0;
            c = u.mul(&c);
        }
        c
    }

    /// All elements, by closure. Intended for small groups only.
    pub fn elements(&self, bound: usize) -> Result<Vec<Perm>> {
        let id = Perm::identity(self.degree);
        let mut seen: HashSet<Perm> = HashSet::new();
        seen.insert(id.clone());
        let mut out = vec![id];
        let mut head = 0;
        while head < out.len() {
            let x = out[head].clone();
            head += 1;
            for g in &self.gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    out.push(y);
                    if out.len() > bound {
                        return Err(PermError::IndexBound {
                            index: out.len() as u64,
                            bound: bound as u64,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyc(n: usize, cs: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cs).unwrap()
    }

    pub(crate) fn m11() -> PermGroup {
        PermGroup::new(
            11,
            vec![
                cyc(11, &[&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]]),
                cyc(11, &[&[3, 7, 11, 8], &[4, 10, 5, 6]]),
            ],
        )
        .unwrap()
    }

    fn s4() -> PermGroup {
        PermGroup::new(4, vec![cyc(4, &[&[1, 2, 3, 4]]), cyc(4, &[&[1, 2]])]).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(s4().order(), BigUint::from(24u32));
        assert_eq!(PermGroup::trivial(5).order(), BigUint::one());
        assert_eq!(m11().order(), BigUint::from(7920u32));
    }

    /// Independent check: order by recursion on orbit-stabilizer using
    /// explicit element closure of the stabilizer.
    #[test]
    fn m11_order_by_orbit_stabilizer() {
        let g = m11();
        let o = g.orbit(0).unwrap().len();
        let stab = g.point_stabilizer(0).unwrap();
        let elems = stab.elements(10_000).unwrap();
        assert_eq!(o * elems.len(), 7920);
        assert_eq!(elems.len(), 720);
    }

    #[test]
    fn stabilizers() {
        let st = s4().point_stabilizer(3).unwrap();
        assert_eq!(st.order(), BigUint::from(6u32));
        assert!(st.generators().iter().all(|g| g.image(3) == 3));
        assert_eq!(
            PermGroup::trivial(3).point_stabilizer(0).unwrap().order(),
            BigUint::one()
        );
        let words = m11().stabilizer_words(0).unwrap();
        let gens: Vec<Perm> = words
            .iter()
            .map(|w| w.eval_perm(m11().generators(), 11))
            .collect();
        assert!(gens.iter().all(|g| g.image(0) == 0));
        assert_eq!(
            PermGroup::new(11, gens).unwrap().order(),
            BigUint::from(720u32)
        );
    }

    #[test]
    fn membership() {
        let a4 = PermGroup::new(4, vec![cyc(4, &[&[1, 2, 3]]), cyc(4, &[&[2, 3, 4]])]).unwrap();
        assert_eq!(a4.order(), BigUint::from(12u32));
        assert!(!a4.contains(&cyc(4, &[&[1, 2]])).unwrap());
        assert!(a4.contains(&a4.generators()[0]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = m11();
        for _ in 0..20 {
            let (p, w) = g.random_element(&mut rng);
            assert_eq!(w.eval_perm(g.generators(), 11), p);
            assert!(g.contains(&p).unwrap());
        }
        assert!(matches!(
            a4.contains(&Perm::identity(3)),
            Err(PermError::DegreeMismatch(3, 4))
        ));
    }

    #[test]
    fn random_elements_cover_s4() {
        let g = s4();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut seen = HashSet::new();
        for _ in 0..1000 {
            seen.insert(g.random_element(&mut rng).0);
        }
        assert_eq!(seen.len(), 24);
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(g.random_element(&mut r1), g.random_element(&mut r2));
        let t = PermGroup::trivial(3);
        assert_eq!(
            t.random_element(&mut r1),
            (Perm::identity(3), GroupWord::empty())
        );
    }

    #[test]
    fn conjugates() {
        let g = s4();
        let x = cyc(4, &[&[1, 3, 2]]);
        let c = g.conjugate(&x).unwrap();
        assert_eq!(c.order(), g.order());
        let back = c.conjugate(&x.inverse()).unwrap();
        assert_eq!(back.generators(), g.generators());
        let same = g.conjugate(&Perm::identity(4)).unwrap();
        assert_eq!(same.generators(), g.generators());
    }

    #[test]
    fn coset_reps_are_canonical() {
        let g = s4();
        let a = g.point_stabilizer(3).unwrap();
        let elems = g.elements(100).unwrap();
        let mut reps = HashSet::new();
        for e in &elems {
            let r = a.canonical_coset_rep(e);
            // same coset
            assert!(a.contains(&e.mul(&r.inverse())).unwrap());
            reps.insert(r);
        }
        assert_eq!(reps.len(), 4);
    }
}
