//! The c-function, the Plancherel weight, and the uniform grid on the torus
//! `T = ℝ / (2π / ln q) ℤ`.
//!
//! Grid points are `t_k = k T / M`, so `q^{i n t_k} = e^{2π i n k / M}` and every
//! character on the grid is read from one table of roots of unity. The
//! normalized trapezoid rule (plain mean over the `M` samples) integrates
//! `q^{int}` exactly to `δ_{n,0}` for `|n| < M`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tree::Tree;

/// The c-function of the tree and the derived weight and multiplier.
#[derive(Clone, Copy, Debug)]
pub struct CFunction {
    q: f64,
    c_q: f64,
}

impl CFunction {
    pub fn new(tree: &Tree) -> Self {
        Self {
            q: tree.q() as f64,
            c_q: tree.c_q(),
        }
    }

    /// `c(z) = (q^{1-z} - q^{z-1}) / ((q^{1/2} + q^{-1/2}) (q^{1/2-z} - q^{z-1/2}))`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let ln_q = self.q.ln();
        let pow = |w: Complex64| (w * ln_q).exp();
        let one = Complex64::new(1.0, 0.0);
        let half = Complex64::new(0.5, 0.0);
        let num = pow(one - z) - pow(z - one);
        let den = pow(half - z) - pow(z - half);
        num / (den * (self.q.sqrt() + 1.0 / self.q.sqrt()))
    }

    /// `|c(1/2 + it)|^{-2}` by direct complex evaluation. Undefined at multiples
    /// of `T/2`, where `c` has poles; prefer [`CFunction::weight`].
    pub fn weight_direct(&self, t: f64) -> f64 {
        let c = self.eval(Complex64::new(0.5, t));
        1.0 / c.norm_sqr()
    }

    /// Closed form `w(t) = (q^{1/2}+q^{-1/2})² 4 sin²(t ln q) / (q + q^{-1} - 2 cos(2t ln q))`.
    pub fn weight(&self, t: f64) -> f64 {
        self.weight_from_angle(t * self.q.ln())
    }

    /// `w` as a function of `θ = t ln q`.
    fn weight_from_angle(&self, theta: f64) -> f64 {
        let s = theta.sin();
        self.weight_from_sin_cos(s, (2.0 * theta).cos())
    }

    fn weight_from_sin_cos(&self, sin_theta: f64, cos_two_theta: f64) -> f64 {
        let a = self.q.sqrt() + 1.0 / self.q.sqrt();
        a * a * 4.0 * sin_theta * sin_theta / (self.q + 1.0 / self.q - 2.0 * cos_two_theta)
    }

    /// The unitarizing multiplier `m(t) = √(c_q w(t)) = √c_q / |c(1/2+it)|`.
    pub fn multiplier(&self, t: f64) -> f64 {
        (self.c_q * self.weight(t)).sqrt()
    }

    pub fn c_q(&self) -> f64 {
        self.c_q
    }
}

/// Uniform `M`-point grid on the torus with the characters, the Plancherel
/// density `c_q w(t_k)` and the multiplier `m(t_k)` precomputed.
#[derive(Clone, Debug)]
pub struct Quadrature {
    tree: Tree,
    m: usize,
    roots: Vec<Complex64>,
    density: Vec<f64>,
    multiplier: Vec<f64>,
}

impl Quadrature {
    /// `m` must be a power of two, at least 4, so that `±T/4` are grid points.
    pub fn new(tree: &Tree, m: usize) -> Result<Self> {
        if m < 4 || !m.is_power_of_two() {
            return Err(Error::InvalidGrid(m));
        }
        let cf = CFunction::new(tree);
        // conjugate-symmetric by construction, so even functions stay exactly even
        let roots: Vec<Complex64> = (0..m)
            .map(|j| {
                if 2 * j <= m {
                    root_of_unity(j, m)
                } else {
                    root_of_unity(m - j, m).conj()
                }
            })
            .collect();
        // θ_k = t_k ln q = 2πk/M; sin θ_k and cos 2θ_k come from the root table,
        // which is exact at k = 0 and k = M/2.
        let density: Vec<f64> = (0..m)
            .map(|k| {
                let sin_theta = roots[k].im;
                let cos_two_theta = roots[(2 * k) % m].re;
                cf.c_q() * cf.weight_from_sin_cos(sin_theta, cos_two_theta)
            })
            .collect();
        let multiplier = density.iter().map(|d| d.sqrt()).collect();
        Ok(Self {
            tree: *tree,
            m,
            roots,
            density,
            multiplier,
        })
    }

    /// [`Quadrature::new`] behind an `Arc`, the form grid-sampled data keeps.
    pub fn shared(tree: &Tree, m: usize) -> Result<Arc<Self>> {
        Self::new(tree, m).map(Arc::new)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.tree.period() / self.m as f64
    }

    /// Index of `-t_k`.
    pub fn negate(&self, k: usize) -> usize {
        (self.m - k) % self.m
    }

    /// `q^{i n t_k}`.
    pub fn character(&self, n: i64, k: usize) -> Complex64 {
        let idx = (n.rem_euclid(self.m as i64) as usize * k) % self.m;
        self.roots[idx]
    }

    /// `q^{(1/2 + i t_k) n}`.
    pub fn half_character(&self, n: i64, k: usize) -> Complex64 {
        self.character(n, k) * self.tree.half_power(n)
    }

    /// `c_q w(t_k)`, the Plancherel density of `L²_{v,c}` against `dν^v dt`.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `m(t_k)`.
    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// Normalized trapezoid rule: the mean of the samples.
    pub fn mean(&self, samples: impl IntoIterator<Item = f64>) -> f64 {
        samples.into_iter().sum::<f64>() / self.m as f64
    }

    pub fn mean_complex(&self, samples: impl IntoIterator<Item = Complex64>) -> Complex64 {
        samples.into_iter().sum::<Complex64>() / self.m as f64
    }

    /// Evaluates `Σ_n c_n q^{i n t_k}` at every grid point.
    pub fn synthesize(&self, n_min: i64, coeffs: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|k| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * self.character(n_min + j as i64, k))
                    .sum()
            })
            .collect()
    }

    /// Whether `t_k ∈ [-T/4, T/4]` (edges included).
    pub fn in_central_band(&self, k: usize) -> bool {
        4 * k <= self.m || 4 * k >= 3 * self.m
    }

    /// Fourier coefficients `mean_k m(t_k) q^{-i n t_k}` of the multiplier for
    /// `|n| ≤ n_max`. Diagnostics only: the corners of `m` at `0` and `T/2` make
    /// the coefficients decay like `1/n²`, so a truncated kernel has an `O(1/N)`
    /// tail.
    pub fn multiplier_kernel(&self, n_max: i64) -> Vec<(i64, f64)> {
        (-n_max..=n_max)
            .map(|n| {
                let c = self.mean_complex((0..self.m).map(|k| self.multiplier[k] * self.character(-n, k)));
                (n, c.re)
            })
            .collect()
    }
}

fn root_of_unity(j: usize, m: usize) -> Complex64 {
    // exact values on the axes keep w(0) = w(T/2) = 0 on the grid
    if j == 0 {
        Complex64::new(1.0, 0.0)
    } else if 4 * j == m {
        Complex64::new(0.0, 1.0)
    } else if 2 * j == m {
        Complex64::new(-1.0, 0.0)
    } else if 4 * j == 3 * m {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_direct_evaluation() {
        for q in [2, 3, 5] {
            let tree = Tree::new(q).unwrap();
            let cf = CFunction::new(&tree);
            let period = tree.period();
            for i in 0..1000 {
                // skip the poles at multiples of T/2
                let t = period * (0.0007 + 0.9986 * ((i as f64 * 0.618_033_988_749_895) % 1.0));
                if (t / (period / 2.0) - (t / (period / 2.0)).round()).abs() < 1e-6 {
                    continue;
                }
                let direct = cf.weight_direct(t);
                let closed = cf.weight(t);
                assert!(
                    (direct - closed).abs() <= 1e-12 * closed.max(1.0),
                    "q={q} t={t}: {direct} {closed}"
                );
            }
        }
    }

    #[test]
    fn weight_shape() {
        let tree = Tree::new(2).unwrap();
        let cf = CFunction::new(&tree);
        let period = tree.period();
        assert_eq!(cf.weight(0.0), 0.0);
        assert!(cf.weight(period / 2.0) < 1e-28);
        for i in 1..200 {
            let t = period * i as f64 / 401.0;
            assert!(cf.weight(t) > 0.0);
            assert!((cf.weight(t) - cf.weight(-t)).abs() < 1e-13);
            assert!((cf.weight(t) - cf.weight(t + period)).abs() < 1e-12);
            assert!((cf.multiplier(t) - cf.multiplier(-t)).abs() < 1e-13);
        }
        // t = T/4: sin² = 1, cos = -1, so w = 4 and m = √(4 c_q)
        assert!((cf.weight(period / 4.0) - 4.0).abs() < 1e-13);
        assert!((cf.multiplier(period / 4.0) - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
        assert!((cf.multiplier(period / 4.0) - (cf.c_q() * cf.weight_direct(period / 4.0)).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn grid_weight_is_exactly_zero_at_poles() {
        let tree = Tree::new(3).unwrap();
        let quad = Quadrature::new(&tree, 64).unwrap();
        assert_eq!(quad.density()[0], 0.0);
        assert_eq!(quad.density()[32], 0.0);
        assert_eq!(quad.multiplier()[0], 0.0);
        for k in 0..64 {
            assert_eq!(quad.density()[k], quad.density()[quad.negate(k)]);
        }
    }

    #[test]
    fn plancherel_weight_has_unit_mass() {
        // c_q · mean(w) = 1; the closed-form average of w is 2(q+1)/q
        for q in [2, 3, 7] {
            let tree = Tree::new(q).unwrap();
            let quad = Quadrature::new(&tree, 4096).unwrap();
            let mass = quad.mean(quad.density().iter().copied());
            assert!((mass - 1.0).abs() < 1e-12, "q={q}: {mass}");
        }
    }

    #[test]
    fn trapezoid_is_exact_on_characters() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::new(&tree, 64).unwrap();
        for n in -63..=63 {
            let mean = quad.mean_complex((0..64).map(|k| quad.character(n, k)));
            let expect = if n == 0 { 1.0 } else { 0.0 };
            assert!((mean - Complex64::new(expect, 0.0)).norm() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let tree = Tree::new(2).unwrap();
        assert!(Quadrature::new(&tree, 12).is_err());
        assert!(Quadrature::new(&tree, 2).is_err());
    }

    #[test]
    fn multiplier_kernel_decays() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::new(&tree, 4096).unwrap();
        let kernel = quad.multiplier_kernel(64);
        let at = |n: i64| kernel.iter().find(|(m, _)| *m == n).unwrap().1;
        assert!((at(5) - at(-5)).abs() < 1e-14);
        assert!(at(64).abs() < at(4).abs());
        let mean_m = quad.mean(quad.multiplier().iter().copied());
        assert!((at(0) - mean_m).abs() < 1e-14);
    }
}
