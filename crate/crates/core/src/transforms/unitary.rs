use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{require_depth, Error, Result};
use crate::horocycle::HoroFunction;
use crate::quadrature::Quadrature;
use crate::scalar::Scalar;
use crate::tree::{kappa_from_root, Tree, Vertex};

use super::{fourier_z, helgason_fourier_at_depth, FreqFunction, VertexFunction};

/// `Φ_v F = (I⊗F) Ψ*_v F`, as Laurent coefficients in the chart of `v`.
///
/// Requires `depth(F) ≥ max(|base(F)|, |v|)`.
pub fn phi_v<T: Scalar>(tree: &Tree, f: &HoroFunction<T>, v: &Vertex) -> Result<FreqFunction> {
    Ok(fourier_z(&f.rebase(tree, v)?.abel_table(tree)))
}

/// `Φ_v(ΛF) = m(t) Φ_v F` on the grid of `quad`.
pub fn lambda_op<T: Scalar>(
    tree: &Tree,
    quad: &Arc<Quadrature>,
    f: &HoroFunction<T>,
    v: &Vertex,
) -> Result<FreqFunction> {
    let multiplier = quad.multiplier();
    phi_v(tree, f, v)?
        .sampled(tree, quad)?
        .scale_grid(|k| Complex64::new(multiplier[k], 0.0))
}

/// `Qf = ΛRf` in frequency form `m(t) H_o f(ω, t)`, base `o`, depth `R`.
pub fn q_transform<T: Scalar>(tree: &Tree, quad: &Arc<Quadrature>, f: &VertexFunction<T>) -> FreqFunction {
    q_transform_at_depth(tree, quad, f, f.support_radius()).expect("depth equals the support radius")
}

/// [`q_transform`] tabulated on deeper cylinders.
pub fn q_transform_at_depth<T: Scalar>(
    tree: &Tree,
    quad: &Arc<Quadrature>,
    f: &VertexFunction<T>,
    depth: usize,
) -> Result<FreqFunction> {
    let multiplier = quad.multiplier();
    helgason_fourier_at_depth(tree, f, &Vertex::root(), depth)?
        .sampled(tree, quad)?
        .scale_grid(|k| Complex64::new(multiplier[k], 0.0))
}

/// `‖f‖²` computed on the frequency side as `‖H_o f‖²` in `L²_{o,c}`.
pub fn plancherel_norm_sq<T: Scalar>(tree: &Tree, quad: &Arc<Quadrature>, f: &VertexFunction<T>) -> f64 {
    helgason_fourier_at_depth(tree, f, &Vertex::root(), f.support_radius())
        .and_then(|h| h.sampled(tree, quad))
        .and_then(|h| h.plancherel_norm_sq(tree))
        .expect("depth equals the support radius")
}

/// A reconstructed vertex function and the change in its values when the
/// pairing is evaluated on the half-size subgrid (every other sample).
#[derive(Clone, Debug)]
pub struct Inversion {
    pub function: VertexFunction<Complex64>,
    pub quadrature_drift: f64,
}

/// Inverts `G = H_v f` by the unitary pairing
/// `f(x) = ⟨H_v f, H_v δ_x⟩ = Σ_u ν^v(u) mean_k G(u,t_k) q^{(1/2-it_k) κ_u(v,x)} c_q w(t_k)`.
pub fn hf_invert(tree: &Tree, g: &FreqFunction, targets: &[Vertex]) -> Result<Inversion> {
    let density = grid_quadrature(g)?.density().to_vec();
    pair_with_deltas(tree, g, targets, &density)
}

/// Inverts `Qf = m·H_o f`: `f(x) = Σ_u ν(u) mean_k Qf(u,t_k) m(t_k) conj(H δ_x)(u,t_k)`.
pub fn q_invert(tree: &Tree, qf: &FreqFunction, targets: &[Vertex]) -> Result<Inversion> {
    let multiplier = grid_quadrature(qf)?.multiplier().to_vec();
    pair_with_deltas(tree, qf, targets, &multiplier)
}

fn grid_quadrature(g: &FreqFunction) -> Result<&Arc<Quadrature>> {
    g.grid()
        .map(|grid| grid.quadrature())
        .ok_or(Error::MissingRepresentation("grid samples"))
}

fn pair_with_deltas(tree: &Tree, g: &FreqFunction, targets: &[Vertex], weight: &[f64]) -> Result<Inversion> {
    let grid = g.grid().ok_or(Error::MissingRepresentation("grid samples"))?;
    let quad = grid.quadrature();
    let m = quad.size();
    let base = g.base();
    let need = targets.iter().map(Vertex::len).max().unwrap_or(0).max(base.len());
    require_depth(g.depth(), need)?;
    let words = tree.words(g.depth());
    let measures = tree.measure_table_f64(base, g.depth());
    // weighted sample rows, shared by every target
    let rows: Vec<Vec<Complex64>> = (0..words.len())
        .map(|c| grid.row(c).iter().zip(weight).map(|(z, w)| z * w).collect())
        .collect();
    let mut function = VertexFunction::new();
    let mut drift = 0.0f64;
    for x in targets {
        let mut full = Complex64::new(0.0, 0.0);
        let mut half = Complex64::new(0.0, 0.0);
        for (c, u) in words.iter().enumerate() {
            let kappa = kappa_from_root(x, u) - kappa_from_root(base, u);
            let scale = tree.half_power(kappa);
            let row = &rows[c];
            let mut sum_full = Complex64::new(0.0, 0.0);
            let mut sum_half = Complex64::new(0.0, 0.0);
            for (k, z) in row.iter().enumerate() {
                let term = z * quad.character(-kappa, k);
                sum_full += term;
                if k % 2 == 0 {
                    sum_half += term;
                }
            }
            full += sum_full * (scale * measures[c] / m as f64);
            half += sum_half * (scale * measures[c] * 2.0 / m as f64);
        }
        drift = drift.max((full - half).norm());
        function.insert(x.clone(), full);
    }
    Ok(Inversion {
        function,
        quadrature_drift: drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_vertex_function;
    use crate::transforms::{helgason_fourier, radon};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn phi_of_radon_delta_o_is_one() {
        let tree = Tree::new(2).unwrap();
        let rf = radon(&tree, &VertexFunction::delta(Vertex::root(), 1i64));
        let phi = phi_v(&tree, &rf, &Vertex::root()).unwrap();
        assert_eq!(phi.laurent().unwrap().coeffs(), &[Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn phi_is_an_isometry_and_matches_helgason() {
        let tree = Tree::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = random_vertex_function(&tree, 3, &mut rng);
        let rf = radon(&tree, &f);
        for v in [Vertex::root(), Vertex::new(&[1]), Vertex::new(&[3, 0])] {
            let phi = phi_v(&tree, &rf, &v).unwrap();
            let norm = phi.norm_sq_laurent(&tree).unwrap();
            assert!((norm - rf.norm_xi_sq(&tree)).abs() <= 1e-10 * norm);
            assert!(phi.max_laurent_diff(&tree, &helgason_fourier(&tree, &f, &v)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn delta_o_has_unit_plancherel_norm() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::shared(&tree, 4096).unwrap();
        let delta = VertexFunction::delta(Vertex::root(), 1i64);
        assert!((plancherel_norm_sq(&tree, &quad, &delta) - 1.0).abs() < 1e-12);
        let qf = q_transform(&tree, &quad, &delta);
        for k in 0..4096 {
            assert!((qf.sample(0, k).unwrap().re - quad.multiplier()[k]).abs() < 1e-15);
        }
        let zero = VertexFunction::<i64>::new();
        assert_eq!(plancherel_norm_sq(&tree, &quad, &zero), 0.0);
    }

    #[test]
    fn two_unit_entries_have_norm_two() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::shared(&tree, 4096).unwrap();
        let f = VertexFunction::from_entries([(Vertex::new(&[0]), 1i64), (Vertex::new(&[1]), 1)]);
        assert!((plancherel_norm_sq(&tree, &quad, &f) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn inversion_of_constant_one_is_delta_o() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::shared(&tree, 4096).unwrap();
        let one = FreqFunction::grid_from_fn(&tree, quad, Vertex::root(), 2, |_, _| Complex64::new(1.0, 0.0));
        let targets = tree.ball(&Vertex::root(), 2);
        let rec = hf_invert(&tree, &one, &targets).unwrap();
        let delta = VertexFunction::delta(Vertex::root(), Complex64::new(1.0, 0.0));
        assert!(rec.function.distance_l2(&delta) < 1e-8);
        assert!(rec.quadrature_drift < 1e-9);
    }

    #[test]
    fn inversion_needs_depth() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::shared(&tree, 64).unwrap();
        let one = FreqFunction::grid_from_fn(&tree, quad, Vertex::root(), 1, |_, _| Complex64::new(1.0, 0.0));
        let targets = tree.ball(&Vertex::root(), 2);
        assert!(matches!(
            hf_invert(&tree, &one, &targets),
            Err(Error::InsufficientCylinderDepth { need: 2, have: 1 })
        ));
    }

    #[test]
    fn q_round_trip() {
        let tree = Tree::new(3).unwrap();
        let quad = Quadrature::shared(&tree, 4096).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_vertex_function(&tree, 2, &mut rng);
        let qf = q_transform(&tree, &quad, &f);
        let rec = q_invert(&tree, &qf, &tree.ball(&Vertex::root(), 2)).unwrap();
        let err = rec.function.distance_l2(&f.to_complex()) / f.norm_sq().sqrt();
        assert!(err < 1e-6, "{err}");
    }
}
