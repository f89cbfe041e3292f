//! The (q+1)-homogeneous tree as the Cayley graph of a free product of q+1
//! involutions.
//!
//! A vertex is a reduced word over the letters `0..=q` (no two consecutive
//! letters equal). The root `o` is the empty word, the neighbours of `w` are
//! `w·a` for every letter `a`, where appending the last letter of `w` steps back
//! to the parent. Boundary points are infinite reduced words; they are only ever
//! seen through finite prefixes, the boundary cylinders `Ω(u)`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{require_depth, Error, Result};

/// Exact rational numbers used for boundary measures.
pub type Rational = Ratio<i128>;

/// A vertex of the tree, encoded as a reduced word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "VertexRepr", into = "VertexRepr")]
pub struct Vertex {
    word: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct VertexRepr {
    word: Vec<u32>,
}

impl TryFrom<VertexRepr> for Vertex {
    type Error = Error;

    fn try_from(repr: VertexRepr) -> Result<Self> {
        Vertex::from_word(repr.word)
    }
}

impl From<Vertex> for VertexRepr {
    fn from(v: Vertex) -> Self {
        VertexRepr { word: v.word }
    }
}

#[allow(clippy::len_without_is_empty)]
impl Vertex {
    /// The root `o`.
    pub fn root() -> Self {
        Self { word: Vec::new() }
    }

    /// Builds a vertex from a word, rejecting words with equal consecutive letters.
    ///
    /// Letters are not bounded here; [`Tree::check_vertex`] checks them against `q`.
    pub fn from_word(word: Vec<u32>) -> Result<Self> {
        if word.windows(2).any(|p| p[0] == p[1]) {
            let q = word.iter().copied().max().unwrap_or(0);
            return Err(Error::InvalidWord { word, q });
        }
        Ok(Self { word })
    }

    /// Like [`Vertex::from_word`] but panics on a non-reduced word. Meant for literals.
    pub fn new(word: &[u32]) -> Self {
        Self::from_word(word.to_vec()).expect("reduced word")
    }

    pub fn letters(&self) -> &[u32] {
        &self.word
    }

    /// Distance to the root.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn last(&self) -> Option<u32> {
        self.word.last().copied()
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.word.is_empty() {
            None
        } else {
            Some(Self {
                word: self.word[..self.word.len() - 1].to_vec(),
            })
        }
    }

    /// The child `w·a`, or `None` when `a` equals the last letter.
    pub fn child(&self, a: u32) -> Option<Vertex> {
        if self.last() == Some(a) {
            return None;
        }
        let mut word = self.word.clone();
        word.push(a);
        Some(Self { word })
    }

    /// The length-`len` prefix. Panics if `len > self.len()`.
    pub fn prefix(&self, len: usize) -> Vertex {
        Self {
            word: self.word[..len].to_vec(),
        }
    }

    pub fn starts_with(&self, prefix: &Vertex) -> bool {
        self.word.starts_with(&prefix.word)
    }

    /// Length of the longest common prefix, i.e. the depth of the confluence
    /// of the geodesics from the root.
    pub fn common_prefix_len(&self, other: &Vertex) -> usize {
        self.word.iter().zip(&other.word).take_while(|(a, b)| a == b).count()
    }

    pub fn distance(&self, other: &Vertex) -> usize {
        self.len() + other.len() - 2 * self.common_prefix_len(other)
    }

    /// Group product `self · other` in the free product, i.e. left translation
    /// of `other` by `self`.
    pub fn mul(&self, other: &Vertex) -> Vertex {
        let mut left = self.word.clone();
        let mut skip = 0;
        while let (Some(&a), Some(&b)) = (left.last(), other.word.get(skip)) {
            if a != b {
                break;
            }
            left.pop();
            skip += 1;
        }
        left.extend_from_slice(&other.word[skip..]);
        Self { word: left }
    }

    /// Group inverse: letters are involutions, so the word is reversed.
    pub fn inverse(&self) -> Vertex {
        let mut word = self.word.clone();
        word.reverse();
        Self { word }
    }

    pub(crate) fn push(&mut self, a: u32) {
        debug_assert!(self.last() != Some(a));
        self.word.push(a);
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "o");
        }
        write!(f, "[")?;
        for (i, a) in self.word.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// The boundary cylinder `Ω(u)`: boundary points whose ray from the root passes
/// through `u`. Depth 0 is the whole boundary.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Cylinder {
    prefix: Vertex,
}

impl Cylinder {
    pub fn new(prefix: Vertex) -> Self {
        Self { prefix }
    }

    pub fn whole() -> Self {
        Self::default()
    }

    pub fn prefix(&self) -> &Vertex {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }
}

impl From<Vertex> for Cylinder {
    fn from(prefix: Vertex) -> Self {
        Self { prefix }
    }
}

/// `κ_ω(o, y)` for `ω` in the cylinder with the given prefix.
///
/// Equals `2|lcp(y, u)| - |y|`, valid as soon as `|u| ≥ |y|`; the caller checks depth.
pub(crate) fn kappa_from_root(y: &Vertex, prefix: &Vertex) -> i64 {
    2 * y.common_prefix_len(prefix) as i64 - y.len() as i64
}

/// The horocyclic index `κ_ω(v, x)`, constant for `ω ∈ Ω(u)` when
/// `depth(u) ≥ max(|v|, |x|)`.
pub fn horocyclic_index(v: &Vertex, x: &Vertex, u: &Cylinder) -> Result<i64> {
    require_depth(u.depth(), v.len().max(x.len()))?;
    Ok(kappa_from_root(x, u.prefix()) - kappa_from_root(v, u.prefix()))
}

/// Branching data of the tree: every vertex has `q + 1` neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tree {
    q: u32,
}

impl Tree {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBranching(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Period `2π / ln q` of the frequency torus.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.q as f64).ln()
    }

    /// Plancherel constant `q / (2(q+1))`.
    pub fn c_q(&self) -> f64 {
        self.q as f64 / (2.0 * (self.q as f64 + 1.0))
    }

    pub fn c_q_exact(&self) -> Rational {
        Rational::new(self.q as i128, 2 * (self.q as i128 + 1))
    }

    /// `q^(n/2)`, computed as an exact integer power times `√q` for odd `n`.
    pub fn half_power(&self, n: i64) -> f64 {
        let q = self.q as f64;
        let half = n.div_euclid(2);
        let base = if half >= 0 {
            q.powi(half as i32)
        } else {
            1.0 / q.powi((-half) as i32)
        };
        if n.rem_euclid(2) == 1 {
            base * q.sqrt()
        } else {
            base
        }
    }

    /// `q^n` as an exact rational.
    pub fn power_exact(&self, n: i64) -> Rational {
        let p = (self.q as i128).pow(n.unsigned_abs() as u32);
        if n >= 0 {
            Rational::from_integer(p)
        } else {
            Rational::new(1, p)
        }
    }

    pub fn check_vertex(&self, v: &Vertex) -> Result<()> {
        if v.letters().iter().any(|&a| a > self.q) {
            return Err(Error::InvalidWord {
                word: v.letters().to_vec(),
                q: self.q,
            });
        }
        Ok(())
    }

    pub fn vertex(&self, word: &[u32]) -> Result<Vertex> {
        let v = Vertex::from_word(word.to_vec()).map_err(|_| Error::InvalidWord {
            word: word.to_vec(),
            q: self.q,
        })?;
        self.check_vertex(&v)?;
        Ok(v)
    }

    /// The `q + 1` neighbours of `v`, parent first when it exists.
    pub fn neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.q as usize + 1);
        if let Some(p) = v.parent() {
            out.push(p);
        }
        out.extend((0..=self.q).filter_map(|a| v.child(a)));
        out
    }

    /// Number of reduced words of length `depth`: `(q+1) q^(depth-1)`, or 1 at depth 0.
    pub fn cylinder_count(&self, depth: usize) -> usize {
        if depth == 0 {
            1
        } else {
            (self.q as usize + 1) * (self.q as usize).pow(depth as u32 - 1)
        }
    }

    /// Position of a reduced word among all words of its length, in
    /// lexicographic order.
    pub fn cylinder_index(&self, prefix: &Vertex) -> usize {
        let q = self.q as usize;
        let mut idx = 0usize;
        let mut prev: Option<u32> = None;
        for &a in prefix.letters() {
            idx = match prev {
                None => a as usize,
                Some(p) => idx * q + if a < p { a as usize } else { a as usize - 1 },
            };
            prev = Some(a);
        }
        idx
    }

    /// Inverse of [`Tree::cylinder_index`].
    pub fn cylinder_at(&self, depth: usize, idx: usize) -> Vertex {
        let q = self.q as usize;
        let mut digits = vec![0usize; depth];
        let mut rest = idx;
        for i in (1..depth).rev() {
            digits[i] = rest % q;
            rest /= q;
        }
        if depth > 0 {
            digits[0] = rest;
        }
        let mut word = Vec::with_capacity(depth);
        for (i, &d) in digits.iter().enumerate() {
            let a = if i == 0 {
                d as u32
            } else {
                let p = word[i - 1];
                if (d as u32) < p {
                    d as u32
                } else {
                    d as u32 + 1
                }
            };
            word.push(a);
        }
        Vertex { word }
    }

    /// All reduced words of length `depth`, lexicographically.
    pub fn words(&self, depth: usize) -> Vec<Vertex> {
        let mut layer = vec![Vertex::root()];
        for _ in 0..depth {
            layer = layer
                .iter()
                .flat_map(|w| (0..=self.q).filter_map(move |a| w.child(a)))
                .collect();
        }
        layer
    }

    pub fn cylinders(&self, depth: usize) -> Vec<Cylinder> {
        self.words(depth).into_iter().map(Cylinder::new).collect()
    }

    /// Vertices at distance at most `radius` from `center`, sorted.
    ///
    /// Left translation by `center` is an isometry taking `o` to `center`, so the
    /// ball is the translate of the ball about the root.
    pub fn ball(&self, center: &Vertex, radius: usize) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = (0..=radius)
            .flat_map(|m| self.words(m))
            .map(|y| center.mul(&y))
            .collect();
        out.sort();
        out
    }

    pub fn sphere(&self, center: &Vertex, radius: usize) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.words(radius).iter().map(|y| center.mul(y)).collect();
        out.sort();
        out
    }

    /// `ν^o(Ω(u)) = q / ((q+1) q^|u|)`, and 1 for the whole boundary.
    pub fn cylinder_measure_o(&self, u: &Cylinder) -> Rational {
        if u.depth() == 0 {
            return Rational::one();
        }
        let q = self.q as i128;
        Rational::new(q, (q + 1) * q.pow(u.depth() as u32))
    }

    /// `ν^v(Ω(u))` for any base vertex and any cylinder.
    ///
    /// Uses `dν^v = q^{κ_ω(o,v)} dν^o`; for cylinders shallower than `|v|` the
    /// density is not constant and the measure is summed over descendants.
    pub fn cylinder_measure(&self, base: &Vertex, u: &Cylinder) -> Rational {
        if u.depth() >= base.len() {
            let k = kappa_from_root(base, u.prefix());
            return self.cylinder_measure_o(u) * self.power_exact(k);
        }
        (0..=self.q)
            .filter_map(|a| u.prefix().child(a))
            .map(|c| self.cylinder_measure(base, &Cylinder::new(c)))
            .fold(Rational::zero(), |acc, m| acc + m)
    }

    /// `ν^base` of every depth-`depth` cylinder, in cylinder order.
    pub fn measure_table(&self, base: &Vertex, depth: usize) -> Vec<Rational> {
        self.cylinders(depth)
            .iter()
            .map(|u| self.cylinder_measure(base, u))
            .collect()
    }

    pub fn measure_table_f64(&self, base: &Vertex, depth: usize) -> Vec<f64> {
        self.measure_table(base, depth)
            .into_iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }

    /// Poisson kernel `p_v(x, ω) = q^{κ_ω(v,x)}` on the cylinder `u`.
    pub fn poisson_kernel(&self, v: &Vertex, x: &Vertex, u: &Cylinder) -> Result<f64> {
        let k = horocyclic_index(v, x, u)?;
        Ok(self.power_f64(k))
    }

    pub(crate) fn power_f64(&self, n: i64) -> f64 {
        let r = self.power_exact(n);
        *r.numer() as f64 / *r.denom() as f64
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn bfs_distances(tree: &Tree, from: &Vertex, limit: usize) -> HashMap<Vertex, usize> {
        let mut dist = HashMap::new();
        dist.insert(from.clone(), 0usize);
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if d == limit {
                continue;
            }
            for w in tree.neighbors(&v) {
                if !dist.contains_key(&w) {
                    dist.insert(w.clone(), d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    #[test]
    fn distance_examples() {
        assert_eq!(Vertex::root().distance(&Vertex::new(&[0, 1])), 2);
        assert_eq!(Vertex::new(&[0, 1]).distance(&Vertex::new(&[0, 2])), 2);
    }

    #[test]
    fn distance_matches_bfs() {
        let tree = Tree::new(3).unwrap();
        let ball = tree.ball(&Vertex::root(), 5);
        for (i, v) in ball.iter().enumerate().step_by(97).take(50) {
            let dist = bfs_distances(&tree, v, 10);
            for u in ball.iter().skip(i % 13).step_by(41) {
                assert_eq!(v.distance(u), dist[u], "{v:?} {u:?}");
            }
        }
    }

    #[test]
    fn degree_is_q_plus_one() {
        let tree = Tree::new(2).unwrap();
        for v in tree.ball(&Vertex::root(), 3) {
            assert_eq!(tree.neighbors(&v).len(), 3);
        }
    }

    #[test]
    fn sphere_and_ball_sizes() {
        let tree = Tree::new(2).unwrap();
        assert_eq!(tree.sphere(&Vertex::root(), 1).len(), 3);
        assert_eq!(tree.sphere(&Vertex::root(), 3).len(), 12);
        assert_eq!(tree.ball(&Vertex::root(), 0).len(), 1);
        let tree = Tree::new(3).unwrap();
        for m in 1..5 {
            assert_eq!(tree.sphere(&Vertex::root(), m).len(), 4 * 3usize.pow(m as u32 - 1));
        }
        let c = Vertex::new(&[1, 2]);
        for x in tree.ball(&c, 3) {
            assert!(c.distance(&x) <= 3);
        }
        assert_eq!(tree.ball(&c, 3).len(), 1 + 4 + 12 + 36);
    }

    #[test]
    fn cylinder_index_round_trip() {
        for q in [2, 3, 11] {
            let tree = Tree::new(q).unwrap();
            for depth in 0..4 {
                let words = tree.words(depth);
                assert_eq!(words.len(), tree.cylinder_count(depth));
                for (i, w) in words.iter().enumerate() {
                    assert_eq!(tree.cylinder_index(w), i);
                    assert_eq!(&tree.cylinder_at(depth, i), w);
                }
                assert!(words.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }

    #[test]
    fn horocyclic_index_examples() {
        let o = Vertex::root();
        let x = Vertex::new(&[0]);
        assert_eq!(
            horocyclic_index(&o, &x, &Cylinder::new(Vertex::new(&[0, 1]))).unwrap(),
            1
        );
        assert_eq!(
            horocyclic_index(&o, &x, &Cylinder::new(Vertex::new(&[1, 2]))).unwrap(),
            -1
        );
        assert!(matches!(
            horocyclic_index(&o, &Vertex::new(&[0, 1, 0]), &Cylinder::new(Vertex::new(&[0, 1]))),
            Err(Error::InsufficientCylinderDepth { need: 3, have: 2 })
        ));
    }

    #[test]
    fn cylinder_measures() {
        let tree = Tree::new(2).unwrap();
        assert_eq!(
            tree.cylinder_measure_o(&Cylinder::new(Vertex::new(&[0]))),
            Rational::new(1, 3)
        );
        assert_eq!(
            tree.cylinder_measure_o(&Cylinder::new(Vertex::new(&[0, 1]))),
            Rational::new(1, 6)
        );
        assert_eq!(tree.cylinder_measure_o(&Cylinder::whole()), Rational::one());
        for q in [2, 3] {
            let tree = Tree::new(q).unwrap();
            for depth in 1..=5 {
                let total: Rational = tree.measure_table(&Vertex::root(), depth).into_iter().sum();
                assert_eq!(total, Rational::one());
            }
        }
        let tree = Tree::new(3).unwrap();
        let table = tree.measure_table(&Vertex::root(), 3);
        assert_eq!(table.len(), 36);
        assert!(table.iter().all(|m| *m == Rational::new(1, 36)));
    }

    #[test]
    fn based_measures_are_probabilities() {
        let tree = Tree::new(2).unwrap();
        for v in tree.ball(&Vertex::root(), 3) {
            for depth in 0..=4 {
                let total: Rational = tree.measure_table(&v, depth).into_iter().sum();
                assert_eq!(total, Rational::one(), "base {v:?} depth {depth}");
            }
        }
        // ν^x(Ω(x)) for |x| = 1 is q/(q+1): q of the q+1 directions from x
        let x = Vertex::new(&[0]);
        assert_eq!(
            tree.cylinder_measure(&x, &Cylinder::new(x.clone())),
            Rational::new(2, 3)
        );
    }

    #[test]
    fn poisson_kernel_examples() {
        let tree = Tree::new(2).unwrap();
        let o = Vertex::root();
        for u in tree.cylinders(2) {
            assert_eq!(tree.poisson_kernel(&o, &o, &u).unwrap(), 1.0);
        }
        let x = Vertex::new(&[0]);
        assert_eq!(
            tree.poisson_kernel(&o, &x, &Cylinder::new(Vertex::new(&[0, 1])))
                .unwrap(),
            2.0
        );
        let x = Vertex::new(&[0, 1]);
        let total: f64 = tree
            .cylinders(2)
            .iter()
            .map(|u| tree.poisson_kernel(&o, &x, u).unwrap() * rational_to_f64(&tree.cylinder_measure_o(u)))
            .sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn group_product() {
        let a = Vertex::new(&[0]);
        assert_eq!(a.mul(&Vertex::root()), a);
        assert_eq!(a.mul(&a), Vertex::root());
        assert_eq!(a.mul(&Vertex::new(&[0, 1])), Vertex::new(&[1]));
        let w = Vertex::new(&[2, 0, 1]);
        assert_eq!(w.mul(&w.inverse()), Vertex::root());
    }

    #[test]
    fn half_power_is_consistent() {
        let tree = Tree::new(3).unwrap();
        for n in -7..=7 {
            let expect = 3f64.powf(n as f64 / 2.0);
            assert!((tree.half_power(n) - expect).abs() <= 1e-14 * expect);
        }
        assert_eq!(tree.half_power(4), 9.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Tree::new(1).is_err());
        assert!(Vertex::from_word(vec![0, 0]).is_err());
        let tree = Tree::new(2).unwrap();
        assert!(tree.vertex(&[3]).is_err());
        assert!(tree.vertex(&[2, 1]).is_ok());
    }

    #[test]
    fn vertex_json_encoding() {
        let v = Vertex::new(&[0, 1, 0]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"word":[0,1,0]}"#);
        let back: Vertex = serde_json::from_str(r#"{"word":[10,12]}"#).unwrap();
        assert_eq!(back.letters(), &[10, 12]);
        assert!(serde_json::from_str::<Vertex>(r#"{"word":[1,1]}"#).is_err());
    }
}
