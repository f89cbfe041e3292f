//! The band-split witness that the quasi-regular representation on `ℓ²(X)` is
//! not irreducible.
//!
//! With `A = Ω × [-T/4, T/4]` (edges included), `h₁` and `h₂` are the inverse
//! Helgason-Fourier transforms of `χ_A H f` and `χ_{A^c} H f`. The isometry
//! action never mixes frequencies, so every matrix coefficient `⟨h₁, π(g)h₂⟩`
//! vanishes, while `‖h₁‖² + ‖h₂‖² = ‖f‖²`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::isometry::Isometry;
use crate::quadrature::Quadrature;
use crate::range::ConditionReport;
use crate::scalar::Scalar;
use crate::transforms::{helgason_fourier, FreqFunction, VertexFunction};
use crate::tree::{Tree, Vertex};

/// `H_o h₁` and `H_o h₂` on the grid.
pub fn band_split<T: Scalar>(
    tree: &Tree,
    quad: &Arc<Quadrature>,
    f: &VertexFunction<T>,
) -> Result<(FreqFunction, FreqFunction)> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let h = helgason_fourier(tree, f, &Vertex::root()).sampled(tree, quad)?;
    let band = |inside: bool| {
        let q = quad.clone();
        move |k: usize| Complex64::new(if q.in_central_band(k) == inside { 1.0 } else { 0.0 }, 0.0)
    };
    Ok((h.scale_grid(band(true))?, h.scale_grid(band(false))?))
}

/// Coefficients `⟨h₁, π(g)h₂⟩` for every `g`, the band energy split, and the
/// control `⟨h₁, h₁⟩ = ‖h₁‖²` as a diagnostic.
///
/// `coefficient_tol` applies to the coefficients, `energy_tol` to
/// `|‖h₁‖² + ‖h₂‖² - ‖f‖²|`.
pub fn reducibility_witness<T: Scalar>(
    tree: &Tree,
    quad: &Arc<Quadrature>,
    f: &VertexFunction<T>,
    isometries: &[Isometry],
    coefficient_tol: f64,
    energy_tol: f64,
) -> Result<ConditionReport> {
    let (h1, h2) = band_split(tree, quad, f)?;
    let mut report = ConditionReport::new(
        "reducibility_witness",
        tree,
        h1.depth(),
        Some(quad.size()),
        coefficient_tol,
    );
    let mut worst = 0.0f64;
    for g in isometries {
        let moved = h2.pihat_action(tree, g)?;
        worst = worst.max(h1.plancherel_inner(tree, &moved)?.norm());
    }
    report.push("coefficient", worst);
    let e1 = h1.plancherel_norm_sq(tree)?;
    let e2 = h2.plancherel_norm_sq(tree)?;
    report.push_with_tol("band_energy", (e1 + e2 - f.norm_sq()).abs(), energy_tol);
    report.diagnostic("energy_central", e1);
    report.diagnostic("energy_outer", e2);
    report.diagnostic("control", control_coefficient(tree, &h1, &Isometry::identity())?.norm());
    Ok(report)
}

/// `⟨h₁, π(g)h₁⟩`: the same-band coefficient, nonzero in general.
pub fn control_coefficient(tree: &Tree, h1: &FreqFunction, g: &Isometry) -> Result<Complex64> {
    h1.plancherel_inner(tree, &h1.pihat_action(tree, g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_isometries, random_nonzero_vertex_function};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_o_splits_its_energy() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::shared(&tree, 4096).unwrap();
        let f = VertexFunction::delta(Vertex::root(), 1i64);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gs = random_isometries(&tree, 2, 5, &mut rng);
        let report = reducibility_witness(&tree, &quad, &f, &gs, 1e-12, 1e-8).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.diagnostics["control"] > 0.1);
        let total = report.diagnostics["energy_central"] + report.diagnostics["energy_outer"];
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn random_functions_and_zero_input() {
        let tree = Tree::new(3).unwrap();
        let quad = Quadrature::shared(&tree, 1024).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_nonzero_vertex_function(&tree, 2, &mut rng);
        let gs = random_isometries(&tree, 2, 5, &mut rng);
        let report = reducibility_witness(&tree, &quad, &f, &gs, 1e-12, 1e-8).unwrap();
        assert!(report.pass, "{report:?}");
        let zero = VertexFunction::<i64>::new();
        assert!(matches!(
            reducibility_witness(&tree, &quad, &zero, &gs, 1e-12, 1e-8),
            Err(Error::ZeroInput)
        ));
    }

    #[test]
    fn control_is_nonzero_for_nontrivial_g() {
        let tree = Tree::new(2).unwrap();
        let quad = Quadrature::shared(&tree, 512).unwrap();
        let f = VertexFunction::delta(Vertex::root(), 1i64);
        let (h1, _) = band_split(&tree, &quad, &f).unwrap();
        let norm = control_coefficient(&tree, &h1, &Isometry::identity()).unwrap();
        assert!((norm.re - h1.plancherel_norm_sq(&tree).unwrap()).abs() < 1e-14);
        assert!(norm.re > 0.0);
    }
}
