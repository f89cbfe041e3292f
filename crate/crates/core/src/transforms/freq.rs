use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{require_depth, Error, Result};
use crate::isometry::Isometry;
use crate::quadrature::Quadrature;
use crate::tree::{kappa_from_root, Tree, Vertex};

/// Per-cylinder Laurent coefficients of `Σ_n c(u, n) q^{int}` over a window.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    n_min: i64,
    n_max: i64,
    coeffs: Vec<Complex64>,
}

impl Laurent {
    pub fn n_range(&self) -> (i64, i64) {
        (self.n_min, self.n_max)
    }

    pub fn width(&self) -> usize {
        if self.n_max < self.n_min {
            0
        } else {
            (self.n_max - self.n_min + 1) as usize
        }
    }

    pub fn get(&self, cyl: usize, n: i64) -> Complex64 {
        if n < self.n_min || n > self.n_max {
            return Complex64::zero();
        }
        self.coeffs[cyl * self.width() + (n - self.n_min) as usize]
    }

    pub fn row(&self, cyl: usize) -> &[Complex64] {
        let width = self.width();
        &self.coeffs[cyl * width..(cyl + 1) * width]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
}

/// Per-cylinder samples at the `M` points of a shared quadrature grid.
#[derive(Clone, Debug)]
pub struct Grid {
    quad: Arc<Quadrature>,
    samples: Vec<Complex64>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.quad.size() == other.quad.size() && self.samples == other.samples
    }
}

impl Grid {
    pub fn quadrature(&self) -> &Arc<Quadrature> {
        &self.quad
    }

    pub fn size(&self) -> usize {
        self.quad.size()
    }

    pub fn row(&self, cyl: usize) -> &[Complex64] {
        let m = self.quad.size();
        &self.samples[cyl * m..(cyl + 1) * m]
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
}

/// A function on `Ω × T` that is cylindrical in `ω`, stored in the chart of a
/// base vertex as Laurent coefficients, grid samples, or both.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqFunction {
    base: Vertex,
    depth: usize,
    laurent: Option<Laurent>,
    grid: Option<Grid>,
}

impl FreqFunction {
    pub fn from_laurent(base: Vertex, depth: usize, n_min: i64, n_max: i64, coeffs: Vec<Complex64>) -> Self {
        Self {
            base,
            depth,
            laurent: Some(Laurent { n_min, n_max, coeffs }),
            grid: None,
        }
    }

    pub fn laurent_from_fn(
        tree: &Tree,
        base: Vertex,
        depth: usize,
        n_min: i64,
        n_max: i64,
        mut f: impl FnMut(&Vertex, i64) -> Complex64,
    ) -> Self {
        let coeffs = tree
            .words(depth)
            .iter()
            .flat_map(|u| (n_min..=n_max).map(|n| f(u, n)).collect::<Vec<_>>())
            .collect();
        Self::from_laurent(base, depth, n_min, n_max, coeffs)
    }

    /// Panics unless `samples` holds one row of `quad.size()` values per cylinder.
    pub fn from_grid(tree: &Tree, quad: Arc<Quadrature>, base: Vertex, depth: usize, samples: Vec<Complex64>) -> Self {
        assert_eq!(
            samples.len(),
            tree.cylinder_count(depth) * quad.size(),
            "one grid row per cylinder"
        );
        Self {
            base,
            depth,
            laurent: None,
            grid: Some(Grid { quad, samples }),
        }
    }

    /// Grid samples `f(u, k)` at `t_k`.
    pub fn grid_from_fn(
        tree: &Tree,
        quad: Arc<Quadrature>,
        base: Vertex,
        depth: usize,
        mut f: impl FnMut(&Vertex, usize) -> Complex64,
    ) -> Self {
        let m = quad.size();
        let samples = tree
            .words(depth)
            .iter()
            .flat_map(|u| (0..m).map(|k| f(u, k)).collect::<Vec<_>>())
            .collect();
        Self::from_grid(tree, quad, base, depth, samples)
    }

    pub fn base(&self) -> &Vertex {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn laurent(&self) -> Option<&Laurent> {
        self.laurent.as_ref()
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    fn require_grid(&self) -> Result<&Grid> {
        self.grid.as_ref().ok_or(Error::MissingRepresentation("grid samples"))
    }

    /// Adds grid samples on `quad` synthesized from the Laurent coefficients.
    /// Existing samples on a grid of the same size are kept.
    pub fn sampled(&self, tree: &Tree, quad: &Arc<Quadrature>) -> Result<Self> {
        if let Some(grid) = &self.grid {
            if grid.size() == quad.size() {
                return Ok(self.clone());
            }
        }
        let laurent = self
            .laurent
            .as_ref()
            .ok_or(Error::MissingRepresentation("Laurent coefficients"))?;
        let samples = (0..tree.cylinder_count(self.depth))
            .flat_map(|c| quad.synthesize(laurent.n_min, laurent.row(c)))
            .collect();
        Ok(Self {
            grid: Some(Grid {
                quad: quad.clone(),
                samples,
            }),
            ..self.clone()
        })
    }

    /// Drops the Laurent part, keeping only grid samples.
    pub fn grid_only(mut self) -> Self {
        self.laurent = None;
        self
    }

    /// Multiplies every grid sample by `factor(k)`. The Laurent part is dropped,
    /// since the product is in general no longer a trigonometric polynomial.
    pub fn scale_grid(&self, factor: impl Fn(usize) -> Complex64) -> Result<Self> {
        let grid = self.require_grid()?;
        let m = grid.size();
        let samples = grid
            .samples
            .iter()
            .enumerate()
            .map(|(i, z)| z * factor(i % m))
            .collect();
        Ok(Self {
            base: self.base.clone(),
            depth: self.depth,
            laurent: None,
            grid: Some(Grid {
                quad: grid.quad.clone(),
                samples,
            }),
        })
    }

    /// Grid value at cylinder position `cyl` and grid index `k`.
    pub fn sample(&self, cyl: usize, k: usize) -> Result<Complex64> {
        let grid = self.require_grid()?;
        Ok(grid.samples[cyl * grid.size() + k])
    }

    /// Re-tabulates on deeper cylinders by replication.
    pub fn refine(&self, tree: &Tree, depth: usize) -> Self {
        if depth <= self.depth {
            return self.clone();
        }
        let parents: Vec<usize> = tree
            .words(depth)
            .iter()
            .map(|u| tree.cylinder_index(&u.prefix(self.depth)))
            .collect();
        let laurent = self.laurent.as_ref().map(|l| Laurent {
            n_min: l.n_min,
            n_max: l.n_max,
            coeffs: parents.iter().flat_map(|&p| l.row(p).to_vec()).collect(),
        });
        let grid = self.grid.as_ref().map(|g| Grid {
            quad: g.quad.clone(),
            samples: parents.iter().flat_map(|&p| g.row(p).to_vec()).collect(),
        });
        Self {
            base: self.base.clone(),
            depth,
            laurent,
            grid,
        }
    }

    /// The chart of `new_base`: `Φ_u F(ω,t) = q^{(1/2+it) κ_ω(u,v)} Φ_v F(ω,t)`.
    pub fn rebase(&self, tree: &Tree, new_base: &Vertex) -> Result<Self> {
        require_depth(self.depth, self.base.len().max(new_base.len()))?;
        if new_base == &self.base {
            return Ok(self.clone());
        }
        let shifts: Vec<i64> = tree
            .words(self.depth)
            .iter()
            .map(|u| kappa_from_root(&self.base, u) - kappa_from_root(new_base, u))
            .collect();
        let laurent = self.laurent.as_ref().map(|l| {
            let lo = l.n_min + shifts.iter().min().copied().unwrap_or(0);
            let hi = l.n_max + shifts.iter().max().copied().unwrap_or(0);
            let width = if hi < lo { 0 } else { (hi - lo + 1) as usize };
            let mut coeffs = vec![Complex64::zero(); shifts.len() * width];
            for (c, &k) in shifts.iter().enumerate() {
                let scale = tree.half_power(k);
                for (j, z) in l.row(c).iter().enumerate() {
                    let n = l.n_min + j as i64 + k;
                    coeffs[c * width + (n - lo) as usize] = z * scale;
                }
            }
            Laurent {
                n_min: lo,
                n_max: hi,
                coeffs,
            }
        });
        let grid = self.grid.as_ref().map(|g| {
            let m = g.size();
            let samples = shifts
                .iter()
                .enumerate()
                .flat_map(|(c, &k)| {
                    let row = g.row(c);
                    (0..m).map(move |j| row[j] * g.quad.half_character(k, j))
                })
                .collect();
            Grid {
                quad: g.quad.clone(),
                samples,
            }
        });
        Ok(Self {
            base: new_base.clone(),
            depth: self.depth,
            laurent,
            grid,
        })
    }

    /// Brings `other` to the base of `self` and both to a common depth.
    fn align(&self, tree: &Tree, other: &Self) -> Result<(Self, Self)> {
        let depth = self.depth.max(other.depth).max(self.base.len()).max(other.base.len());
        let a = self.refine(tree, depth);
        let b = other.refine(tree, depth).rebase(tree, &self.base)?;
        Ok((a, b))
    }

    /// Largest coefficient deviation from `other` after alignment.
    pub fn max_laurent_diff(&self, tree: &Tree, other: &Self) -> Result<f64> {
        let (a, b) = self.align(tree, other)?;
        let (la, lb) = match (&a.laurent, &b.laurent) {
            (Some(la), Some(lb)) => (la, lb),
            _ => return Err(Error::MissingRepresentation("Laurent coefficients")),
        };
        let lo = la.n_min.min(lb.n_min);
        let hi = la.n_max.max(lb.n_max);
        let mut worst = 0.0f64;
        for c in 0..tree.cylinder_count(a.depth) {
            for n in lo..=hi {
                worst = worst.max((la.get(c, n) - lb.get(c, n)).norm());
            }
        }
        Ok(worst)
    }

    /// Largest grid deviation from `other` after alignment. Both need samples
    /// on grids of the same size.
    pub fn max_grid_diff(&self, tree: &Tree, other: &Self) -> Result<f64> {
        let (a, b) = self.align(tree, other)?;
        let (ga, gb) = (a.require_grid()?, b.require_grid()?);
        if ga.size() != gb.size() {
            return Err(Error::GridMismatch {
                expected: ga.size(),
                found: gb.size(),
            });
        }
        Ok(ga
            .samples
            .iter()
            .zip(&gb.samples)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// `∫_Ω G(ω, t_k) dν^v(ω)` for every grid index, with `v` the base.
    pub fn boundary_integrals(&self, tree: &Tree) -> Result<Vec<Complex64>> {
        let grid = self.require_grid()?;
        let measures = tree.measure_table_f64(&self.base, self.depth);
        let mut out = vec![Complex64::zero(); grid.size()];
        for (c, m) in measures.iter().enumerate() {
            for (slot, z) in out.iter_mut().zip(grid.row(c)) {
                *slot += z * m;
            }
        }
        Ok(out)
    }

    /// Plain `L²(ν^v ⊗ dt)` norm from the Laurent coefficients (Parseval on `ℤ`).
    pub fn norm_sq_laurent(&self, tree: &Tree) -> Result<f64> {
        let laurent = self
            .laurent
            .as_ref()
            .ok_or(Error::MissingRepresentation("Laurent coefficients"))?;
        let measures = tree.measure_table_f64(&self.base, self.depth);
        Ok(measures
            .iter()
            .enumerate()
            .map(|(c, m)| m * laurent.row(c).iter().map(Complex64::norm_sqr).sum::<f64>())
            .sum())
    }

    /// Plain `L²(ν^v ⊗ dt)` norm by the trapezoid rule.
    pub fn norm_sq_grid(&self, tree: &Tree) -> Result<f64> {
        self.weighted_grid_norm_sq(tree, |_| 1.0)
    }

    /// Norm in `L²_{v,c}`: density `c_q w(t)` against `dν^v dt`.
    pub fn plancherel_norm_sq(&self, tree: &Tree) -> Result<f64> {
        let grid = self.require_grid()?;
        let density = grid.quad.density().to_vec();
        self.weighted_grid_norm_sq(tree, |k| density[k])
    }

    /// `Σ_u ν^v(u) mean_k weight(k) |G(u, t_k)|²`.
    pub fn weighted_grid_norm_sq(&self, tree: &Tree, weight: impl Fn(usize) -> f64) -> Result<f64> {
        let grid = self.require_grid()?;
        let measures = tree.measure_table_f64(&self.base, self.depth);
        let m = grid.size();
        Ok(measures
            .iter()
            .enumerate()
            .map(|(c, nu)| {
                let row = grid.row(c);
                nu * (0..m).map(|k| weight(k) * row[k].norm_sqr()).sum::<f64>() / m as f64
            })
            .sum())
    }

    /// `⟨self, other⟩` in `L²_{v,c}` after alignment.
    pub fn plancherel_inner(&self, tree: &Tree, other: &Self) -> Result<Complex64> {
        let (a, b) = self.align(tree, other)?;
        let (ga, gb) = (a.require_grid()?, b.require_grid()?);
        let measures = tree.measure_table_f64(&a.base, a.depth);
        let density = ga.quad.density();
        let m = ga.size();
        let mut total = Complex64::zero();
        for (c, nu) in measures.iter().enumerate() {
            let (ra, rb) = (ga.row(c), gb.row(c));
            let row: Complex64 = (0..m).map(|k| ra[k] * rb[k].conj() * density[k]).sum();
            total += row * (nu / m as f64);
        }
        Ok(total)
    }

    /// The frequency form of `π̂(g)`: `Φ_v(π̂(g)F)(ω,t) = Φ_{g⁻¹[v]}F(g⁻¹·ω, t)`.
    pub fn pihat_action(&self, tree: &Tree, g: &Isometry) -> Result<Self> {
        let inv = g.inverse();
        let source_base = inv.apply(&self.base);
        let depth = self.depth.max(source_base.len()).max(self.base.len());
        let chart = self.refine(tree, depth).rebase(tree, &source_base)?;
        let out_depth = depth + inv.displacement_bound();
        let sources: Vec<usize> = tree
            .words(out_depth)
            .iter()
            .map(|u| tree.cylinder_index(&inv.act_prefix(u, depth)))
            .collect();
        let laurent = chart.laurent.as_ref().map(|l| Laurent {
            n_min: l.n_min,
            n_max: l.n_max,
            coeffs: sources.iter().flat_map(|&s| l.row(s).to_vec()).collect(),
        });
        let grid = chart.grid.as_ref().map(|gr| Grid {
            quad: gr.quad.clone(),
            samples: sources.iter().flat_map(|&s| gr.row(s).to_vec()).collect(),
        });
        Ok(Self {
            base: self.base.clone(),
            depth: out_depth,
            laurent,
            grid,
        })
    }
}
