//! Permutation groups given by generators.
//!
//! Points are `0..n` internally and `1..=n` in every text format. Perms act
//! on the right: `i^(gh) = (i^g)^h`, so `g.mul(&h)` applies `g` first.

mod chain;
mod cosets;
mod random;

pub use chain::PermGroup;
pub use cosets::{double_coset_reps, CosetTable, DoubleCoset};
pub use random::{random_element, GroupElement, ProductReplacement};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("not a permutation: {0}")]
    NotBijection(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("point {0} outside 1..={1}")]
    PointOutOfRange(usize, usize),
    #[error("word letter {0} outside +-1..={1}")]
    BadLetter(i32, usize),
    #[error("index {index} exceeds bound {bound}")]
    IndexBound { index: u64, bound: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, PermError>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            images: (0..n as u32).collect(),
        }
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(PermError::NotBijection(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    /// From 1-based images, as in the text format.
    pub fn from_one_based(images: &[usize]) -> Result<Perm> {
        let n = images.len();
        let mut v = Vec::with_capacity(n);
        for &x in images {
            if x == 0 || x > n {
                return Err(PermError::PointOutOfRange(x, n));
            }
            v.push(x as u32 - 1);
        }
        Perm::from_images(v)
    }

    /// From 1-based cycles, e.g. `&[&[1, 2, 3], &[4, 5]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Perm> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        for cyc in cycles {
            for (a, &x) in cyc.iter().enumerate() {
                let y = cyc[(a + 1) % cyc.len()];
                if x == 0 || x > n {
                    return Err(PermError::PointOutOfRange(x, n));
                }
                if y == 0 || y > n {
                    return Err(PermError::PointOutOfRange(y, n));
                }
                images[x - 1] = y as u32 - 1;
            }
        }
        Perm::from_images(images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &x)| i == x as usize)
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "perm degree mismatch");
        Perm {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// `g^-1 self g`
    pub fn conjugate(&self, g: &Perm) -> Perm {
        g.inverse().mul(self).mul(g)
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i != x as usize)
            .map(|(i, _)| i)
    }

    pub fn order(&self) -> u64 {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut ord = 1u64;
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut len = 0u64;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.image(j);
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    pub fn is_even(&self) -> bool {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for i in 0..n {
            let mut j = i;
            let mut len = 0;
            while !seen[j] {
                seen[j] = true;
                j = self.image(j);
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 0
    }

    pub fn cycle_string(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for i in 0..n {
            if seen[i] || self.image(i) == i {
                continue;
            }
            out.push('(');
            let mut j = i;
            let mut first = true;
            while !seen[j] {
                seen[j] = true;
                if !first {
                    out.push(',');
                }
                out.push_str(&(j + 1).to_string());
                first = false;
                j = self.image(j);
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    pub fn to_text(&self) -> String {
        let imgs: Vec<String> = self.images.iter().map(|x| (x + 1).to_string()).collect();
        format!("perm {}\n{}\n", self.degree(), imgs.join(" "))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// A word in abstract generators: letter `i > 0` is generator `i`, `-i` its
/// inverse (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    letters: Vec<i32>,
}

impl GroupWord {
    pub fn empty() -> GroupWord {
        GroupWord::default()
    }

    pub fn generator(i: usize) -> GroupWord {
        GroupWord {
            letters: vec![i as i32 + 1],
        }
    }

    pub fn new(letters: Vec<i32>) -> Result<GroupWord> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0) {
            return Err(PermError::BadLetter(bad, 0));
        }
        Ok(GroupWord { letters })
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index referenced (1-based), 0 for the empty word.
    pub fn max_generator(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn check(&self, ngens: usize) -> Result<()> {
        match self
            .letters
            .iter()
            .find(|l| l.unsigned_abs() as usize > ngens)
        {
            Some(&bad) => Err(PermError::BadLetter(bad, ngens)),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// Concatenation followed by free reduction at the seam.
    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&-l) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        GroupWord { letters }
    }

    pub fn free_reduce(&self) -> GroupWord {
        GroupWord::empty().concat(self)
    }

    /// Substitutes each generator by a word in another alphabet.
    pub fn substitute(&self, images: &[GroupWord]) -> GroupWord {
        let mut out = GroupWord::empty();
        for &l in &self.letters {
            let w = &images[l.unsigned_abs() as usize - 1];
            out = if l > 0 {
                out.concat(w)
            } else {
                out.concat(&w.inverse())
            };
        }
        out
    }

    /// Evaluates in any group, given generators and their inverses.
    pub fn eval<T: GroupElement>(&self, gens: &[T], inverses: &[T], identity: &T) -> T {
        let mut acc = identity.clone();
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            acc = if l > 0 {
                acc.op(&gens[i])
            } else {
                acc.op(&inverses[i])
            };
        }
        acc
    }

    pub fn eval_perm(&self, gens: &[Perm], degree: usize) -> Perm {
        let mut pts: Vec<u32> = (0..degree as u32).collect();
        // apply letters left to right to every point
        let invs: Vec<Perm> = gens.iter().map(|g| g.inverse()).collect();
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            let g = if l > 0 { &gens[i] } else { &invs[i] };
            for p in pts.iter_mut() {
                *p = g.images[*p as usize];
            }
        }
        Perm { images: pts }
    }

    pub fn to_text(&self) -> String {
        let ls: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        format!("word\n{}\n", ls.join(" "))
    }
}

pub fn parse_perm(text: &str) -> Result<Perm> {
    let mut lines = text.lines();
    read_perm_lines(&mut lines)
}

/// Reads `perm <n>` and one line of 1-based images.
pub fn read_perm_lines<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<Perm> {
    let header = lines
        .next()
        .ok_or_else(|| PermError::Parse("missing perm header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 2 || parts[0] != "perm" {
        return Err(PermError::Parse(format!("bad perm header `{header}`")));
    }
    let n: usize = parts[1]
        .parse()
        .map_err(|_| PermError::Parse(format!("bad degree `{}`", parts[1])))?;
    let body = lines.next().unwrap_or("");
    let imgs = body
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| PermError::Parse(format!("bad image `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if imgs.len() != n {
        return Err(PermError::Parse(format!(
            "perm of degree {n} has {} images",
            imgs.len()
        )));
    }
    Perm::from_one_based(&imgs)
}

pub fn parse_word(text: &str) -> Result<GroupWord> {
    let mut lines = text.lines();
    read_word_lines(&mut lines)
}

/// Reads `word` and one line of signed letters (possibly empty).
pub fn read_word_lines<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<GroupWord> {
    let header = lines
        .next()
        .ok_or_else(|| PermError::Parse("missing word header".into()))?;
    if header.trim() != "word" {
        return Err(PermError::Parse(format!("bad word header `{header}`")));
    }
    let body = lines.next().unwrap_or("");
    let letters = body
        .split_whitespace()
        .map(|t| {
            t.parse::<i32>()
                .map_err(|_| PermError::Parse(format!("bad letter `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupWord::new(letters)
}

/// Orbit of `x` with a Schreier tree: `parent[y] = Some((z, gen))` means
/// `y = z^gen`.
#[derive(Debug, Clone)]
pub struct PointOrbit {
    pub root: usize,
    pub points: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
}

impl PointOrbit {
    pub fn contains(&self, y: usize) -> bool {
        y == self.root || self.parent.get(y).is_some_and(|p| p.is_some())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Word `w` with `root^w = y`.
    pub fn word_to(&self, y: usize) -> Option<GroupWord> {
        if !self.contains(y) {
            return None;
        }
        let mut letters = Vec::new();
        let mut cur = y;
        while cur != self.root {
            let (z, g) = self.parent[cur].expect("tree edge");
            letters.push(g as i32 + 1);
            cur = z;
        }
        letters.reverse();
        Some(GroupWord { letters })
    }
}

pub fn orbit_of_point(gens: &[Perm], degree: usize, x: usize) -> Result<PointOrbit> {
    if x >= degree {
        return Err(PermError::PointOutOfRange(x + 1, degree));
    }
    let mut parent = vec![None; degree];
    let mut points = vec![x];
    let mut seen = vec![false; degree];
    seen[x] = true;
    let mut head = 0;
    while head < points.len() {
        let z = points[head];
        head += 1;
        for (gi, g) in gens.iter().enumerate() {
            let y = g.image(z);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((z, gi));
                points.push(y);
            }
        }
    }
    Ok(PointOrbit {
        root: x,
        points,
        parent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_action_composition() {
        let a = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[&[2, 3]]).unwrap();
        // 1 -a-> 2 -b-> 3
        assert_eq!(a.mul(&b).image(0), 2);
        assert_eq!(a.mul(&a.inverse()), Perm::identity(3));
    }

    #[test]
    fn orbit_examples() {
        let s3 = [
            Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap(),
            Perm::from_cycles(3, &[&[1, 2]]).unwrap(),
        ];
        let o = orbit_of_point(&s3, 3, 0).unwrap();
        assert_eq!(o.len(), 3);
        for &y in &o.points {
            let w = o.word_to(y).unwrap();
            assert_eq!(w.eval_perm(&s3, 3).image(0), y);
        }
        let o = orbit_of_point(&[], 3, 1).unwrap();
        assert_eq!(o.points, vec![1]);
        let g = [Perm::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap()];
        let mut pts = orbit_of_point(&g, 4, 0).unwrap().points;
        pts.sort();
        assert_eq!(pts, vec![0, 1]);
    }

    #[test]
    fn text_formats() {
        let p = Perm::from_cycles(4, &[&[1, 3]]).unwrap();
        assert_eq!(p.to_text(), "perm 4\n3 2 1 4\n");
        assert_eq!(parse_perm(&p.to_text()).unwrap(), p);
        assert!(parse_perm("perm 3\n1 1 2\n").is_err());
        let w = GroupWord::new(vec![1, -2, 2]).unwrap();
        assert_eq!(w.to_text(), "word\n1 -2 2\n");
        assert_eq!(parse_word(&w.to_text()).unwrap(), w);
        assert_eq!(parse_word("word\n\n").unwrap(), GroupWord::empty());
        assert!(parse_word("word\n0\n").is_err());
    }

    #[test]
    fn word_reduction_and_inverse() {
        let w = GroupWord::new(vec![1, 2, -2, 3]).unwrap().free_reduce();
        assert_eq!(w.letters(), &[1, 3]);
        assert!(w.concat(&w.inverse()).is_empty());
        assert!(w.check(2).is_err());
        assert!(w.check(3).is_ok());
    }
}
