//! Functions on the horocycle space `Ξ` in base-vertex coordinates.
//!
//! For a fixed base `v` every horocycle is `h^v_{ω,n} = {x : κ_ω(v,x) = n}` for
//! a unique pair `(ω, n)`. A [`HoroFunction`] stores `F(h^v_{ω,n})` for `ω`
//! ranging over depth-`L` cylinders and `n` in a closed window, zero outside.
//! The chart depends on the base: changing it shifts `n` by `κ_ω(u, v)`.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{require_depth, Result};
use crate::isometry::Isometry;
use crate::scalar::Scalar;
use crate::tree::{kappa_from_root, Rational, Tree, Vertex};

/// A cylindrical function on `Ξ` in the chart of its base vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct HoroFunction<T> {
    base: Vertex,
    depth: usize,
    n_min: i64,
    n_max: i64,
    values: Vec<T>,
}

impl<T: Scalar> HoroFunction<T> {
    /// The zero function with the given layout. An empty window has `n_min > n_max`.
    pub fn zeros(tree: &Tree, base: Vertex, depth: usize, n_min: i64, n_max: i64) -> Self {
        let width = window_width(n_min, n_max);
        Self {
            base,
            depth,
            n_min,
            n_max,
            values: vec![T::zero(); tree.cylinder_count(depth) * width],
        }
    }

    pub fn from_fn(
        tree: &Tree,
        base: Vertex,
        depth: usize,
        n_min: i64,
        n_max: i64,
        mut f: impl FnMut(&Vertex, i64) -> T,
    ) -> Self {
        let mut out = Self::zeros(tree, base, depth, n_min, n_max);
        let width = out.width();
        for (c, u) in tree.words(depth).iter().enumerate() {
            for (j, n) in (n_min..=n_max).enumerate() {
                out.values[c * width + j] = f(u, n);
            }
        }
        out
    }

    pub fn base(&self) -> &Vertex {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_range(&self) -> (i64, i64) {
        (self.n_min, self.n_max)
    }

    pub fn width(&self) -> usize {
        window_width(self.n_min, self.n_max)
    }

    pub fn cylinder_count(&self) -> usize {
        self.values.len().checked_div(self.width()).unwrap_or(0)
    }

    /// Raw row-major table: cylinder-major, then `n` ascending.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at cylinder position `cyl` and index `n`; zero outside the window.
    pub fn get(&self, cyl: usize, n: i64) -> T {
        if n < self.n_min || n > self.n_max {
            return T::zero();
        }
        self.values[cyl * self.width() + (n - self.n_min) as usize].clone()
    }

    /// Sets a slot inside the window. Panics outside it.
    pub fn set(&mut self, cyl: usize, n: i64, value: T) {
        assert!(n >= self.n_min && n <= self.n_max, "index {n} outside the window");
        let width = self.width();
        self.values[cyl * width + (n - self.n_min) as usize] = value;
    }

    pub(crate) fn add_at(&mut self, cyl: usize, n: i64, value: T) {
        let width = self.width();
        self.values[cyl * width + (n - self.n_min) as usize] += value;
    }

    /// `F(h^base_{ω,n})` for `ω` in the cylinder of `prefix` (`|prefix| ≥ depth`).
    pub fn value_at(&self, tree: &Tree, prefix: &Vertex, n: i64) -> T {
        self.get(tree.cylinder_index(&prefix.prefix(self.depth)), n)
    }

    /// Column `n ↦ F(u, n)` of cylinder position `cyl` over the window.
    pub fn row(&self, cyl: usize) -> &[T] {
        let width = self.width();
        &self.values[cyl * width..(cyl + 1) * width]
    }

    /// Re-tabulates on deeper cylinders; integrals and norms are unchanged.
    pub fn refine(&self, tree: &Tree, depth: usize) -> Self {
        if depth <= self.depth {
            return self.clone();
        }
        Self::from_fn(tree, self.base.clone(), depth, self.n_min, self.n_max, |u, n| {
            self.value_at(tree, u, n)
        })
    }

    /// Re-tabulates on a wider window, zero padded.
    pub fn widen(&self, tree: &Tree, n_min: i64, n_max: i64) -> Self {
        let (lo, hi) = if self.width() == 0 {
            (n_min, n_max)
        } else {
            (n_min.min(self.n_min), n_max.max(self.n_max))
        };
        let mut out = Self::zeros(tree, self.base.clone(), self.depth, lo, hi);
        for c in 0..self.cylinder_count() {
            for n in self.n_min..=self.n_max {
                out.set(c, n, self.get(c, n));
            }
        }
        out
    }

    /// The same function on `Ξ` in the chart of `new_base`:
    /// `G(ω, m) = F(ω, m - κ_ω(new_base, base))`.
    pub fn rebase(&self, tree: &Tree, new_base: &Vertex) -> Result<Self> {
        require_depth(self.depth, self.base.len().max(new_base.len()))?;
        if new_base == &self.base {
            return Ok(self.clone());
        }
        let words = tree.words(self.depth);
        let shifts: Vec<i64> = words
            .iter()
            .map(|u| kappa_from_root(&self.base, u) - kappa_from_root(new_base, u))
            .collect();
        let (lo, hi) = match (shifts.iter().min(), shifts.iter().max()) {
            (Some(lo), Some(hi)) if self.width() > 0 => (self.n_min + lo, self.n_max + hi),
            _ => (self.n_min, self.n_max),
        };
        let mut out = Self::zeros(tree, new_base.clone(), self.depth, lo, hi);
        for (c, &k) in shifts.iter().enumerate() {
            for n in self.n_min..=self.n_max {
                out.set(c, n + k, self.get(c, n));
            }
        }
        Ok(out)
    }

    /// Brings both functions to a common base (that of `self`), depth and
    /// window so their tables can be compared slot by slot.
    pub fn align(&self, tree: &Tree, other: &Self) -> Result<(Self, Self)> {
        let depth = self.depth.max(other.depth).max(self.base.len()).max(other.base.len());
        let a = self.refine(tree, depth);
        let b = other.refine(tree, depth).rebase(tree, &self.base)?;
        let (lo, hi) = match (a.width(), b.width()) {
            (0, 0) => (0, -1),
            (0, _) => b.n_range(),
            (_, 0) => a.n_range(),
            _ => (a.n_min.min(b.n_min), a.n_max.max(b.n_max)),
        };
        Ok((a.widen(tree, lo, hi), b.widen(tree, lo, hi)))
    }

    /// Maximum slot-wise deviation from `other` after alignment.
    pub fn max_abs_diff(&self, tree: &Tree, other: &Self) -> Result<f64> {
        let (a, b) = self.align(tree, other)?;
        Ok(a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x.clone() - y.clone()).to_complex().norm())
            .fold(0.0, f64::max))
    }

    /// `∫_Ξ F dλ = Σ_u ν^v(u) Σ_n q^n F(u, n)` with `v` the base.
    pub fn integrate_xi(&self, tree: &Tree) -> Complex64 {
        let measures = tree.measure_table_f64(&self.base, self.depth);
        let mut total = Complex64::zero();
        for (c, m) in measures.iter().enumerate() {
            let mut row = Complex64::zero();
            for n in self.n_min..=self.n_max {
                row += self.get(c, n).to_complex() * tree.power_f64(n);
            }
            total += row * m;
        }
        total
    }

    /// `‖F‖²_{L²(Ξ)} = Σ_u ν^v(u) Σ_n q^n |F(u, n)|²`.
    pub fn norm_xi_sq(&self, tree: &Tree) -> f64 {
        let measures = tree.measure_table_f64(&self.base, self.depth);
        let mut total = 0.0;
        for (c, m) in measures.iter().enumerate() {
            let mut row = 0.0;
            for n in self.n_min..=self.n_max {
                row += self.get(c, n).to_complex().norm_sqr() * tree.power_f64(n);
            }
            total += row * m;
        }
        total
    }

    pub fn norm_xi(&self, tree: &Tree) -> f64 {
        self.norm_xi_sq(tree).sqrt()
    }

    /// The pull-back `Ψ*_v F(ω, n) = q^{n/2} F(h^v_{ω,n})`.
    pub fn abel_table(&self, tree: &Tree) -> AbelTable {
        let values = (0..self.cylinder_count())
            .flat_map(|c| (self.n_min..=self.n_max).map(move |n| (c, n)))
            .map(|(c, n)| self.get(c, n).to_complex() * tree.half_power(n))
            .collect();
        AbelTable {
            base: self.base.clone(),
            depth: self.depth,
            n_min: self.n_min,
            n_max: self.n_max,
            values,
        }
    }

    /// `π̂(g)F(ξ) = F(g⁻¹.ξ)`, returned in the chart of the same base.
    ///
    /// In the chart of `g[v]` the table is just the boundary action:
    /// `(π̂(g)F)(h^{g[v]}_{ω,n}) = F(h^v_{g⁻¹·ω, n})`; the result is then rebased to `v`.
    pub fn pihat_action(&self, tree: &Tree, g: &Isometry) -> Self {
        let inv = g.inverse();
        let moved_base = g.apply(&self.base);
        let depth = (self.depth + inv.displacement_bound())
            .max(moved_base.len())
            .max(self.base.len());
        let moved = Self::from_fn(tree, moved_base, depth, self.n_min, self.n_max, |u, n| {
            let source = inv.act_prefix(u, self.depth);
            self.get(tree.cylinder_index(&source), n)
        });
        moved.rebase(tree, &self.base).expect("depth covers both bases")
    }

    /// Dual Radon transform `R^#F(x) = ∫_Ω F(h^x_{ω,0}) dν^x(ω)`: the average
    /// over all horocycles through `x`.
    pub fn dual_radon(&self, tree: &Tree, x: &Vertex) -> Result<Complex64> {
        let chart = self.rebase(tree, x)?;
        let measures = tree.measure_table_f64(x, chart.depth);
        Ok(measures
            .iter()
            .enumerate()
            .map(|(c, m)| chart.get(c, 0).to_complex() * m)
            .sum())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> HoroFunction<U> {
        HoroFunction {
            base: self.base.clone(),
            depth: self.depth,
            n_min: self.n_min,
            n_max: self.n_max,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn to_complex(&self) -> HoroFunction<Complex64> {
        self.map(Scalar::to_complex)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

impl HoroFunction<i64> {
    /// `∫_Ξ F dλ` in exact rational arithmetic.
    pub fn integrate_xi_exact(&self, tree: &Tree) -> Rational {
        let measures = tree.measure_table(&self.base, self.depth);
        let mut total = Rational::zero();
        for (c, m) in measures.iter().enumerate() {
            for n in self.n_min..=self.n_max {
                let value = self.get(c, n);
                if value != 0 {
                    total += *m * tree.power_exact(n) * Rational::from_integer(value as i128);
                }
            }
        }
        total
    }
}

/// The table `Ψ*_v F(ω, n) = q^{n/2} F(h^v_{ω,n})`, an element of `ℓ²(ν^v ⊗ dn)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelTable {
    base: Vertex,
    depth: usize,
    n_min: i64,
    n_max: i64,
    values: Vec<Complex64>,
}

impl AbelTable {
    pub fn base(&self) -> &Vertex {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_range(&self) -> (i64, i64) {
        (self.n_min, self.n_max)
    }

    pub fn width(&self) -> usize {
        window_width(self.n_min, self.n_max)
    }

    pub fn cylinder_count(&self) -> usize {
        self.values.len().checked_div(self.width()).unwrap_or(0)
    }

    pub fn get(&self, cyl: usize, n: i64) -> Complex64 {
        if n < self.n_min || n > self.n_max {
            return Complex64::zero();
        }
        self.values[cyl * self.width() + (n - self.n_min) as usize]
    }

    pub fn row(&self, cyl: usize) -> &[Complex64] {
        let width = self.width();
        &self.values[cyl * width..(cyl + 1) * width]
    }

    /// Norm in `ℓ²(ν^v ⊗ dn)`.
    pub fn norm_sq(&self, tree: &Tree) -> f64 {
        let measures = tree.measure_table_f64(&self.base, self.depth);
        measures
            .iter()
            .enumerate()
            .map(|(c, m)| m * self.row(c).iter().map(Complex64::norm_sqr).sum::<f64>())
            .sum()
    }
}

fn window_width(n_min: i64, n_max: i64) -> usize {
    if n_max < n_min {
        0
    } else {
        (n_max - n_min + 1) as usize
    }
}
