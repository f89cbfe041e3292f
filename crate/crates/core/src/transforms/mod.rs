//! Radon, Abel and Helgason-Fourier transforms of finitely supported vertex
//! functions, and the unitarized Radon transform `Q = ΛR` on the frequency side.
//!
//! Everything that is a trigonometric polynomial in `t` (Radon, Abel,
//! Helgason-Fourier, `Φ_v`) is kept as exact Laurent coefficients. The
//! multiplier `m(t)` is not polynomial, so `Λ`, `Q` and the inversions live on
//! the uniform grid of a [`Quadrature`](crate::quadrature::Quadrature).

mod freq;
mod unitary;

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{require_depth, Result};
use crate::horocycle::{AbelTable, HoroFunction};
use crate::isometry::Isometry;
use crate::scalar::Scalar;
use crate::tree::{kappa_from_root, Tree, Vertex};

pub use freq::{FreqFunction, Grid, Laurent};
pub use unitary::{
    hf_invert, lambda_op, phi_v, plancherel_norm_sq, q_invert, q_transform, q_transform_at_depth, Inversion,
};

/// A finitely supported function on the vertices.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VertexFunction<T> {
    entries: BTreeMap<Vertex, T>,
}

impl<T: Scalar> VertexFunction<T> {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// Later entries for the same vertex overwrite earlier ones.
    pub fn from_entries(entries: impl IntoIterator<Item = (Vertex, T)>) -> Self {
        Self {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn delta(x: Vertex, one: T) -> Self {
        Self::from_entries([(x, one)])
    }

    pub fn insert(&mut self, x: Vertex, value: T) {
        self.entries.insert(x, value);
    }

    pub fn get(&self, x: &Vertex) -> T {
        self.entries.get(x).cloned().unwrap_or_else(T::zero)
    }

    pub fn entries(&self) -> &BTreeMap<Vertex, T> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, &T)> {
        self.entries.iter()
    }

    /// Drops explicit zeros.
    pub fn pruned(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(x, v)| (x.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(Zero::is_zero)
    }

    /// Largest distance from the root over the nonzero entries; 0 when empty.
    pub fn support_radius(&self) -> usize {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(x, _)| x.len())
            .max()
            .unwrap_or(0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|v| v.to_complex().norm_sqr()).sum()
    }

    /// `π(g)f(x) = f(g⁻¹[x])`, i.e. the value at `x` moves to `g[x]`.
    pub fn pi_action(&self, g: &Isometry) -> Self {
        Self::from_entries(self.entries.iter().map(|(x, v)| (g.apply(x), v.clone())))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> VertexFunction<U> {
        VertexFunction {
            entries: self.entries.iter().map(|(x, v)| (x.clone(), f(v))).collect(),
        }
    }

    pub fn to_complex(&self) -> VertexFunction<Complex64> {
        self.map(Scalar::to_complex)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        let mut out = self.map(|v| a.clone() * v.clone());
        for (x, v) in &other.entries {
            let slot = out.entries.entry(x.clone()).or_insert_with(T::zero);
            *slot += b.clone() * v.clone();
        }
        out
    }

    /// `ℓ²` norm of `self - other` over the union of both supports.
    pub fn distance_l2(&self, other: &Self) -> f64 {
        let mut total = 0.0;
        for (x, v) in &self.entries {
            total += (v.clone() - other.get(x)).to_complex().norm_sqr();
        }
        for (x, v) in &other.entries {
            if !self.entries.contains_key(x) {
                total += v.to_complex().norm_sqr();
            }
        }
        total.sqrt()
    }
}

impl VertexFunction<i64> {
    pub fn norm_sq_exact(&self) -> i128 {
        self.entries.values().map(|&v| (v as i128) * (v as i128)).sum()
    }
}

/// `Rf(ξ) = Σ_{x∈ξ} f(x)`, tabulated in base `o` at depth `R = support_radius`
/// with window `[-R, R]`.
pub fn radon<T: Scalar>(tree: &Tree, f: &VertexFunction<T>) -> HoroFunction<T> {
    let depth = f.support_radius();
    radon_at_depth(tree, f, depth).expect("depth equals the support radius")
}

/// [`radon`] tabulated on deeper cylinders. Requires `depth ≥ support_radius`.
pub fn radon_at_depth<T: Scalar>(tree: &Tree, f: &VertexFunction<T>, depth: usize) -> Result<HoroFunction<T>> {
    let radius = f.support_radius();
    require_depth(depth, radius)?;
    let r = radius as i64;
    let mut out = HoroFunction::zeros(tree, Vertex::root(), depth, -r, r);
    for (c, u) in tree.words(depth).iter().enumerate() {
        for (x, value) in f.iter() {
            if value.is_zero() {
                continue;
            }
            out.add_at(c, kappa_from_root(x, u), value.clone());
        }
    }
    Ok(out)
}

/// `A_v f(ω, n) = q^{n/2} R f(h^v_{ω,n})`, at depth `max(R, |v|)`.
pub fn abel<T: Scalar>(tree: &Tree, f: &VertexFunction<T>, v: &Vertex) -> AbelTable {
    let depth = f.support_radius().max(v.len());
    radon_at_depth(tree, f, depth)
        .and_then(|rf| rf.rebase(tree, v))
        .expect("depth covers the support and the base")
        .abel_table(tree)
}

/// The Fourier series on `ℤ`, cylinder by cylinder: the Laurent coefficients
/// of `(I⊗F)A` are the entries of `A` itself.
pub fn fourier_z(table: &AbelTable) -> FreqFunction {
    let (n_min, n_max) = table.n_range();
    let coeffs = (0..table.cylinder_count())
        .flat_map(|c| table.row(c).to_vec())
        .collect();
    FreqFunction::from_laurent(table.base().clone(), table.depth(), n_min, n_max, coeffs)
}

/// `H_v f(ω, t) = Σ_x f(x) q^{(1/2+it) κ_ω(v,x)}` summed directly, at depth
/// `max(R, |v|)`.
pub fn helgason_fourier<T: Scalar>(tree: &Tree, f: &VertexFunction<T>, v: &Vertex) -> FreqFunction {
    let depth = f.support_radius().max(v.len());
    helgason_fourier_at_depth(tree, f, v, depth).expect("depth covers the support and the base")
}

/// [`helgason_fourier`] on deeper cylinders. Requires `depth ≥ max(R, |v|)`.
pub fn helgason_fourier_at_depth<T: Scalar>(
    tree: &Tree,
    f: &VertexFunction<T>,
    v: &Vertex,
    depth: usize,
) -> Result<FreqFunction> {
    let radius = f.support_radius();
    require_depth(depth, radius.max(v.len()))?;
    let reach = (radius + v.len()) as i64;
    let width = (2 * reach + 1) as usize;
    let words = tree.words(depth);
    let mut coeffs = vec![Complex64::zero(); words.len() * width];
    for (c, u) in words.iter().enumerate() {
        let kv = kappa_from_root(v, u);
        for (x, value) in f.iter() {
            let n = kappa_from_root(x, u) - kv;
            coeffs[c * width + (n + reach) as usize] += value.to_complex() * tree.half_power(n);
        }
    }
    Ok(FreqFunction::from_laurent(v.clone(), depth, -reach, reach, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_vertex_function;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radon_fixtures() {
        let tree = Tree::new(2).unwrap();
        let rf = radon(&tree, &VertexFunction::delta(Vertex::root(), 1i64));
        assert_eq!(rf.depth(), 0);
        assert_eq!(rf.n_range(), (0, 0));
        assert_eq!(rf.get(0, 0), 1);
        let rf = radon(&tree, &VertexFunction::delta(Vertex::new(&[0]), 1i64));
        assert_eq!(rf.n_range(), (-1, 1));
        let expect = [[0, 0, 1], [1, 0, 0], [1, 0, 0]];
        for (c, row) in expect.iter().enumerate() {
            assert_eq!(rf.row(c), row);
        }
    }

    #[test]
    fn radon_column_sums_equal_total_mass() {
        let tree = Tree::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let f = random_vertex_function(&tree, 4, &mut rng);
            let total: i64 = f.iter().map(|(_, v)| v).sum();
            let rf = radon(&tree, &f);
            for c in 0..rf.cylinder_count() {
                assert_eq!(rf.row(c).iter().sum::<i64>(), total);
            }
        }
    }

    #[test]
    fn abel_fixtures_and_l1_bound() {
        let tree = Tree::new(2).unwrap();
        let a = abel(&tree, &VertexFunction::delta(Vertex::root(), 1i64), &Vertex::root());
        assert_eq!(a.get(0, 0), Complex64::new(1.0, 0.0));
        let a = abel(&tree, &VertexFunction::delta(Vertex::new(&[0]), 1i64), &Vertex::root());
        assert!((a.get(0, 1) - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let f = random_vertex_function(&tree, 3, &mut rng);
            let bound: f64 = f
                .iter()
                .map(|(x, v)| v.abs() as f64 * tree.half_power(x.len() as i64))
                .sum();
            let a = abel(&tree, &f, &Vertex::new(&[1]));
            for c in 0..a.cylinder_count() {
                let l1: f64 = a.row(c).iter().map(|z| z.norm()).sum();
                assert!(l1 <= bound + 1e-12, "{l1} > {bound}");
            }
        }
    }

    #[test]
    fn helgason_fourier_fixtures() {
        let tree = Tree::new(3).unwrap();
        let o = Vertex::root();
        let h = helgason_fourier(&tree, &VertexFunction::delta(o.clone(), 1i64), &o);
        assert_eq!(h.laurent().unwrap().get(0, 0), Complex64::new(1.0, 0.0));
        let x = Vertex::new(&[2, 1]);
        let v = Vertex::new(&[0]);
        let h = helgason_fourier(&tree, &VertexFunction::delta(x.clone(), 1i64), &v);
        let laurent = h.laurent().unwrap();
        for (c, u) in tree.words(2).iter().enumerate() {
            let k = kappa_from_root(&x, u) - kappa_from_root(&v, u);
            let (lo, hi) = laurent.n_range();
            for n in lo..=hi {
                let expect = if n == k { tree.half_power(k) } else { 0.0 };
                assert_eq!(laurent.get(c, n), Complex64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn fourier_slice_on_small_functions() {
        let tree = Tree::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let f = random_vertex_function(&tree, 3, &mut rng);
            for v in [Vertex::root(), Vertex::new(&[2]), Vertex::new(&[0, 1])] {
                let direct = helgason_fourier(&tree, &f, &v);
                let sliced = fourier_z(&abel(&tree, &f, &v));
                assert!(direct.max_laurent_diff(&tree, &sliced).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn radon_intertwines_exactly() {
        let tree = Tree::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = random_vertex_function(&tree, 3, &mut rng);
        for _ in 0..10 {
            let g = Isometry::random(&tree, 2, &mut rng);
            let lhs = radon(&tree, &f.pi_action(&g));
            let rhs = radon(&tree, &f).pihat_action(&tree, &g);
            assert_eq!(lhs.max_abs_diff(&tree, &rhs).unwrap(), 0.0);
        }
    }

    #[test]
    fn dual_radon_of_radon_delta_is_one() {
        let tree = Tree::new(3).unwrap();
        for x in tree.ball(&Vertex::root(), 2) {
            let rf = radon(&tree, &VertexFunction::delta(x.clone(), 1i64));
            let value = rf.dual_radon(&tree, &x).unwrap();
            assert!((value - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn vertex_function_helpers() {
        let x = Vertex::new(&[0, 1]);
        let f = VertexFunction::from_entries([(x.clone(), 3i64), (Vertex::root(), 0)]);
        assert_eq!(f.support_radius(), 2);
        assert_eq!(f.pruned().entries().len(), 1);
        assert_eq!(f.norm_sq_exact(), 9);
        let g = f.combine(2, &VertexFunction::delta(Vertex::root(), 1), -1);
        assert_eq!(g.get(&x), 6);
        assert_eq!(g.get(&Vertex::root()), -1);
        assert_eq!(
            f.pi_action(&Isometry::translate(Vertex::new(&[0])))
                .get(&Vertex::new(&[1])),
            3
        );
        assert!((f.distance_l2(&g) - (9.0f64 + 1.0).sqrt()).abs() < 1e-15);
    }
}
