//! Functions on the boundary that depend only on a finite prefix of the ray.

use num_complex::Complex64;

use crate::error::{require_depth, Result};
use crate::isometry::Isometry;
use crate::scalar::Scalar;
use crate::tree::{kappa_from_root, Cylinder, Tree, Vertex};

/// A function on `Ω` that is constant on every depth-`depth` cylinder.
#[derive(Clone, Debug, PartialEq)]
pub struct CylindricalFunction<T> {
    depth: usize,
    values: Vec<T>,
}

impl<T: Scalar> CylindricalFunction<T> {
    pub fn from_values(tree: &Tree, depth: usize, values: Vec<T>) -> Self {
        assert_eq!(
            values.len(),
            tree.cylinder_count(depth),
            "table must cover every cylinder"
        );
        Self { depth, values }
    }

    pub fn from_fn(tree: &Tree, depth: usize, mut f: impl FnMut(&Vertex) -> T) -> Self {
        let values = tree.words(depth).iter().map(&mut f).collect();
        Self { depth, values }
    }

    pub fn constant(tree: &Tree, depth: usize, value: T) -> Self {
        Self::from_fn(tree, depth, |_| value.clone())
    }

    /// Indicator of `Ω(u)`, tabulated at depth `|u|`.
    pub fn indicator(tree: &Tree, u: &Cylinder, one: T) -> Self {
        Self::from_fn(
            tree,
            u.depth(),
            |w| {
                if w == u.prefix() {
                    one.clone()
                } else {
                    T::zero()
                }
            },
        )
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value on the cylinder of `prefix`; `prefix.len()` must be at least the depth.
    pub fn value_at(&self, tree: &Tree, prefix: &Vertex) -> T {
        self.values[tree.cylinder_index(&prefix.prefix(self.depth))].clone()
    }

    /// Re-tabulates at a deeper level; no-op when `depth ≤ self.depth()`.
    pub fn refine(&self, tree: &Tree, depth: usize) -> Self {
        if depth <= self.depth {
            return self.clone();
        }
        Self::from_fn(tree, depth, |w| self.value_at(tree, w))
    }

    /// `∫ F dν^base`.
    pub fn integrate(&self, tree: &Tree, base: &Vertex) -> Result<Complex64> {
        integrate_boundary(tree, self, base)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CylindricalFunction<U> {
        CylindricalFunction {
            depth: self.depth,
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// `∫ F dν^base = Σ_u ν^o(Ω(u)) q^{κ_u(o, base)} F(u)`.
pub fn integrate_boundary<T: Scalar>(tree: &Tree, f: &CylindricalFunction<T>, base: &Vertex) -> Result<Complex64> {
    require_depth(f.depth, base.len())?;
    let mut total = Complex64::new(0.0, 0.0);
    for (u, value) in tree.words(f.depth).iter().zip(&f.values) {
        let measure = tree.cylinder_measure_o(&Cylinder::new(u.clone())) * tree.power_exact(kappa_from_root(base, u));
        total += value.to_complex() * crate::tree::rational_to_f64(&measure);
    }
    Ok(total)
}

/// `(g·F)(ω) = F(g⁻¹·ω)`, tabulated at depth `depth(F) + displacement_bound(g)`.
pub fn act_boundary<T: Scalar>(tree: &Tree, g: &Isometry, f: &CylindricalFunction<T>) -> CylindricalFunction<T> {
    let inv = g.inverse();
    let depth = f.depth + inv.displacement_bound();
    CylindricalFunction::from_fn(tree, depth, |u| {
        let source = inv.act_prefix(u, f.depth);
        f.values[tree.cylinder_index(&source)].clone()
    })
}
