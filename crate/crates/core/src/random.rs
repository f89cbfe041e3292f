//! Seeded generators for reproducible experiments.
//!
//! Everything is driven by `ChaCha8Rng`, so a seed fixes every table, function
//! and isometry across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::horocycle::HoroFunction;
use crate::isometry::Isometry;
use crate::transforms::VertexFunction;
use crate::tree::{Tree, Vertex};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent integer entries uniform in `[-5, 5]` on every vertex of `ball(o, radius)`.
/// Zero draws are kept as explicit entries.
pub fn random_vertex_function<R: Rng>(tree: &Tree, radius: usize, rng: &mut R) -> VertexFunction<i64> {
    VertexFunction::from_entries(
        tree.ball(&Vertex::root(), radius)
            .into_iter()
            .map(|x| (x, rng.gen_range(-5..=5))),
    )
}

/// Like [`random_vertex_function`] but redraws until the result is nonzero.
pub fn random_nonzero_vertex_function<R: Rng>(tree: &Tree, radius: usize, rng: &mut R) -> VertexFunction<i64> {
    loop {
        let f = random_vertex_function(tree, radius, rng);
        if !f.is_zero() {
            return f;
        }
    }
}

/// `count` isometries following the recipe of [`Isometry::random`].
pub fn random_isometries<R: Rng>(tree: &Tree, max_translate: usize, count: usize, rng: &mut R) -> Vec<Isometry> {
    (0..count).map(|_| Isometry::random(tree, max_translate, rng)).collect()
}

/// Integer horocycle table with entries in `[-5, 5]`.
pub fn random_integer_horofunction<R: Rng>(
    tree: &Tree,
    base: Vertex,
    depth: usize,
    n_max: i64,
    rng: &mut R,
) -> HoroFunction<i64> {
    HoroFunction::from_fn(tree, base, depth, -n_max, n_max, |_, _| rng.gen_range(-5..=5))
}

/// Complex horocycle table with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex_horofunction<R: Rng>(
    tree: &Tree,
    base: Vertex,
    depth: usize,
    n_max: i64,
    rng: &mut R,
) -> HoroFunction<Complex64> {
    HoroFunction::from_fn(tree, base, depth, -n_max, n_max, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}
