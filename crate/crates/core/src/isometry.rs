//! A computable family of tree isometries: left translations and rooted
//! permutations, closed under composition and inversion.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tree::{Tree, Vertex};

/// An automorphism fixing the root, given by a permutation of the letters at
/// every vertex `w` with `|w| < depth`.
///
/// The image is built letter by letter: `g[w·a] = g[w]·σ_w(a)`. Each `σ_w` for
/// `w ≠ o` sends `last(w)` to `last(g[w])`, so parents go to parents. Below
/// `depth` the permutation is the transposition of `last(w)` and `last(g[w])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedPerm {
    depth: usize,
    perms: BTreeMap<Vertex, Vec<u32>>,
}

impl RootedPerm {
    pub fn identity() -> Self {
        Self {
            depth: 0,
            perms: BTreeMap::new(),
        }
    }

    /// Checks that every vertex of length `< depth` carries a permutation of
    /// `0..=q` satisfying the parent pin.
    pub fn new(tree: &Tree, depth: usize, perms: BTreeMap<Vertex, Vec<u32>>) -> Result<Self> {
        let q = tree.q();
        let candidate = Self { depth, perms };
        for m in 0..depth {
            for w in tree.words(m) {
                let sigma = candidate
                    .perms
                    .get(&w)
                    .ok_or_else(|| Error::InvalidPermutation(format!("missing permutation at {w:?}")))?;
                let mut seen = vec![false; q as usize + 1];
                if sigma.len() != q as usize + 1 {
                    return Err(Error::InvalidPermutation(format!("wrong arity at {w:?}")));
                }
                for &s in sigma {
                    if s > q || std::mem::replace(&mut seen[s as usize], true) {
                        return Err(Error::InvalidPermutation(format!("not a permutation at {w:?}")));
                    }
                }
                if let Some(last) = w.last() {
                    let image = candidate.apply(&w);
                    if Some(sigma[last as usize]) != image.last() {
                        return Err(Error::InvalidPermutation(format!("parent pin violated at {w:?}")));
                    }
                }
            }
        }
        Ok(candidate)
    }

    /// A uniformly random rooted permutation of the given depth.
    pub fn random<R: Rng>(tree: &Tree, depth: usize, rng: &mut R) -> Self {
        let q = tree.q();
        let mut partial = Self {
            depth: 0,
            perms: BTreeMap::new(),
        };
        for m in 0..depth {
            for w in tree.words(m) {
                let sigma = match w.last() {
                    None => {
                        let mut s: Vec<u32> = (0..=q).collect();
                        s.shuffle(rng);
                        s
                    }
                    Some(last) => {
                        let image_last = partial.apply(&w).last().expect("nonempty image");
                        let mut targets: Vec<u32> = (0..=q).filter(|&b| b != image_last).collect();
                        targets.shuffle(rng);
                        let mut s = vec![0; q as usize + 1];
                        s[last as usize] = image_last;
                        let sources = (0..=q).filter(|&a| a != last);
                        for (a, b) in sources.zip(targets) {
                            s[a as usize] = b;
                        }
                        s
                    }
                };
                partial.perms.insert(w, sigma);
            }
            partial.depth = m + 1;
        }
        partial
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn apply(&self, x: &Vertex) -> Vertex {
        let mut image = Vertex::root();
        let mut source = Vertex::root();
        for &a in x.letters() {
            let b = if source.len() < self.depth {
                self.perms[&source][a as usize]
            } else {
                // canonical extension: swap last(source) and last(image)
                match (source.last(), image.last()) {
                    (Some(s), Some(t)) if a == s => t,
                    (Some(s), Some(t)) if a == t => s,
                    _ => a,
                }
            };
            image.push(b);
            source.push(a);
        }
        image
    }

    pub fn inverse(&self) -> Self {
        let perms = self
            .perms
            .iter()
            .map(|(w, sigma)| {
                let mut inv = vec![0; sigma.len()];
                for (a, &b) in sigma.iter().enumerate() {
                    inv[b as usize] = a as u32;
                }
                (self.apply(w), inv)
            })
            .collect();
        Self {
            depth: self.depth,
            perms,
        }
    }
}

/// A generator of the isometry family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    /// Left multiplication `x ↦ w·x`.
    Translate(Vertex),
    RootedPerm(RootedPerm),
}

impl Atom {
    pub fn apply(&self, x: &Vertex) -> Vertex {
        match self {
            Atom::Translate(w) => w.mul(x),
            Atom::RootedPerm(p) => p.apply(x),
        }
    }

    pub fn inverse(&self) -> Atom {
        match self {
            Atom::Translate(w) => Atom::Translate(w.inverse()),
            Atom::RootedPerm(p) => Atom::RootedPerm(p.inverse()),
        }
    }

    fn displacement(&self) -> usize {
        match self {
            Atom::Translate(w) => w.len(),
            Atom::RootedPerm(_) => 0,
        }
    }
}

/// A composition of atoms, applied first to last.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Isometry {
    atoms: Vec<Atom>,
}

impl Isometry {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn translate(w: Vertex) -> Self {
        Self::from_atoms(vec![Atom::Translate(w)])
    }

    pub fn rooted(p: RootedPerm) -> Self {
        Self::from_atoms(vec![Atom::RootedPerm(p)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `g[x]`.
    pub fn apply(&self, x: &Vertex) -> Vertex {
        self.atoms.iter().fold(x.clone(), |y, atom| atom.apply(&y))
    }

    pub fn inverse(&self) -> Self {
        Self {
            atoms: self.atoms.iter().rev().map(Atom::inverse).collect(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Self {
        let mut atoms = other.atoms.clone();
        atoms.extend(self.atoms.iter().cloned());
        Self { atoms }
    }

    /// Sum of translation lengths. A boundary prefix of length
    /// `L + displacement_bound()` determines the length-`L` prefix of its image.
    pub fn displacement_bound(&self) -> usize {
        self.atoms.iter().map(Atom::displacement).sum()
    }

    /// Length-`out_len` prefix of `g·ω` for every `ω` in the cylinder of `prefix`.
    ///
    /// Requires `prefix.len() ≥ out_len + displacement_bound()`.
    pub fn act_prefix(&self, prefix: &Vertex, out_len: usize) -> Vertex {
        debug_assert!(prefix.len() >= out_len + self.displacement_bound());
        self.apply(prefix).prefix(out_len)
    }

    /// A random isometry following the documented recipe: one to three atoms,
    /// each a translation by a random reduced word of length at most
    /// `max_translate` (total translation length capped at `max_translate`) or a
    /// rooted permutation of depth 1 or 2.
    pub fn random<R: Rng>(tree: &Tree, max_translate: usize, rng: &mut R) -> Self {
        let count = rng.gen_range(1..=3);
        let mut budget = max_translate;
        let mut atoms = Vec::with_capacity(count);
        for _ in 0..count {
            if budget > 0 && rng.gen_bool(0.5) {
                let len = rng.gen_range(1..=budget);
                budget -= len;
                atoms.push(Atom::Translate(random_word(tree, len, rng)));
            } else {
                let depth = rng.gen_range(1..=2);
                atoms.push(Atom::RootedPerm(RootedPerm::random(tree, depth, rng)));
            }
        }
        Self { atoms }
    }
}

/// A uniformly random reduced word of the given length.
pub fn random_word<R: Rng>(tree: &Tree, len: usize, rng: &mut R) -> Vertex {
    let q = tree.q();
    let mut w = Vertex::root();
    for _ in 0..len {
        let a = loop {
            let a = rng.gen_range(0..=q);
            if Some(a) != w.last() {
                break a;
            }
        };
        w.push(a);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn translate_examples() {
        let g = Isometry::translate(Vertex::new(&[0]));
        assert_eq!(g.apply(&Vertex::root()), Vertex::new(&[0]));
        assert_eq!(g.apply(&Vertex::new(&[0])), Vertex::root());
        assert_eq!(g.apply(&Vertex::new(&[0, 1])), Vertex::new(&[1]));
    }

    #[test]
    fn random_isometries_preserve_distance_and_invert() {
        for q in [2, 3] {
            let tree = Tree::new(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7 + q as u64);
            let ball = tree.ball(&Vertex::root(), 6);
            for _ in 0..50 {
                let g = Isometry::random(&tree, 3, &mut rng);
                let inv = g.inverse();
                let images: Vec<Vertex> = ball.iter().map(|x| g.apply(x)).collect();
                for (x, gx) in ball.iter().zip(&images) {
                    assert_eq!(&inv.apply(gx), x);
                    assert_eq!(&g.apply(&inv.apply(x)), x);
                }
                for i in (0..ball.len()).step_by(37) {
                    for j in (0..ball.len()).step_by(53) {
                        assert_eq!(images[i].distance(&images[j]), ball[i].distance(&ball[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn rooted_perm_fixes_root_and_validates() {
        let tree = Tree::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = RootedPerm::random(&tree, 3, &mut rng);
        assert_eq!(p.apply(&Vertex::root()), Vertex::root());
        let rebuilt = RootedPerm::new(&tree, 3, p.perms.clone()).unwrap();
        assert_eq!(rebuilt, p);
        let mut broken = p.perms.clone();
        let key = Vertex::new(&[1]);
        broken.get_mut(&key).unwrap().swap(0, 1);
        broken.get_mut(&key).unwrap().swap(1, 2);
        assert!(RootedPerm::new(&tree, 3, broken).is_err());
    }

    #[test]
    fn boundary_prefix_action_is_consistent() {
        let tree = Tree::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let g = Isometry::random(&tree, 3, &mut rng);
            let d = g.displacement_bound();
            for p in tree.words(d + 2) {
                let image = g.act_prefix(&p, 2);
                for c in (0..=2).filter_map(|a| p.child(a)) {
                    for cc in (0..=2).filter_map(|a| c.child(a)) {
                        assert_eq!(g.act_prefix(&cc, 2), image);
                    }
                }
            }
        }
    }

    #[test]
    fn composition_order() {
        let tree = Tree::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Isometry::random(&tree, 2, &mut rng);
        let h = Isometry::random(&tree, 2, &mut rng);
        for x in tree.ball(&Vertex::root(), 3) {
            assert_eq!(g.compose(&h).apply(&x), g.apply(&h.apply(&x)));
        }
    }
}
