//! The self-test suite: every invariant of the library, run at one seeded
//! configuration and collected into reports.
//!
//! Checks run in a fixed order. Exact and Laurent-level checks come first;
//! `unitarity_q` is the first check that depends on the quadrature grid, so an
//! under-resolved grid is reported under that name.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{act_boundary, CylindricalFunction};
use crate::error::Result;
use crate::isometry::Isometry;
use crate::quadrature::Quadrature;
use crate::random::{random_isometries, random_nonzero_vertex_function, random_vertex_function, rng_from_seed};
use crate::range::{
    check_flat, check_flat_freq, check_flat_via_sharp, check_range_cc_exact, check_sharp, ConditionReport,
};
use crate::transforms::{
    abel, fourier_z, helgason_fourier, helgason_fourier_at_depth, lambda_op, phi_v, q_invert, q_transform, radon,
    VertexFunction,
};
use crate::tree::{horocyclic_index, rational_to_f64, Rational, Tree, Vertex};
use crate::witness::reducibility_witness;

/// Parameters of one self-test run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub q: u32,
    pub radius: usize,
    pub depth: usize,
    #[serde(rename = "M")]
    pub grid: usize,
    pub seed: u64,
    /// Replaces every nonzero default tolerance when set.
    pub tol: Option<f64>,
    /// Random functions per check.
    pub samples: usize,
    /// Random isometries per check.
    pub isometries: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            q: 2,
            radius: 3,
            depth: 3,
            grid: 4096,
            seed: 42,
            tol: None,
            samples: 10,
            isometries: 10,
        }
    }
}

impl SuiteConfig {
    fn tol(&self, default: f64) -> f64 {
        match self.tol {
            Some(t) if default > 0.0 => t,
            _ => default,
        }
    }
}

/// All reports of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<ConditionReport>,
    pub pass: bool,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Runs every check. Errors only on invalid configuration (`q < 2` or a bad grid).
pub fn run(config: &SuiteConfig) -> Result<SuiteReport> {
    let tree = Tree::new(config.q)?;
    let quad = Quadrature::shared(&tree, config.grid)?;
    let ctx = Context {
        tree,
        quad,
        config: config.clone(),
    };
    let checks: Vec<fn(&Context, &mut ChaCha8Rng) -> ConditionReport> = vec![
        geometry,
        measures,
        boundary_quasi_invariance,
        fourier_slice,
        radon_intertwining,
        range_conditions,
        unitarity_q,
        plancherel_weight,
        q_intertwining,
        lambda_base_independence,
        flat_and_sharp,
        inversion,
        witness,
    ];
    let mut reports = Vec::with_capacity(checks.len());
    for (i, check) in checks.iter().enumerate() {
        // one stream per check, so checks do not shift each other's draws
        let mut rng = rng_from_seed(config.seed.wrapping_add(i as u64 * 0x9e37_79b9));
        reports.push(check(&ctx, &mut rng).with_seed(config.seed));
    }
    let first_failure = reports.iter().find(|r| !r.pass).map(|r| r.condition.clone());
    Ok(SuiteReport {
        config: config.clone(),
        pass: first_failure.is_none(),
        first_failure,
        checks: reports,
    })
}

struct Context {
    tree: Tree,
    quad: Arc<Quadrature>,
    config: SuiteConfig,
}

impl Context {
    fn report(&self, name: &str, depth: usize, grid: bool, default_tol: f64) -> ConditionReport {
        let m = grid.then_some(self.quad.size());
        ConditionReport::new(name, &self.tree, depth, m, self.config.tol(default_tol))
    }

    /// Checks that fail on internal errors record the error as a NaN residual.
    fn record(&self, report: &mut ConditionReport, name: &str, value: Result<f64>) {
        match value {
            Ok(v) => report.push(name, v),
            Err(e) => {
                report.push(name, f64::NAN);
                report.diagnostic(format!("error: {e}"), f64::NAN);
            }
        }
    }

    fn small_radius(&self) -> usize {
        self.config.radius.min(3)
    }
}

fn geometry(ctx: &Context, _: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.small_radius();
    let mut report = ctx.report("geometry", radius, false, 0.0);
    let ball = tree.ball(&Vertex::root(), radius);
    // breadth-first search over neighbours, independent of the word formula
    let mut worst_distance = 0usize;
    for v in ball.iter().step_by(7) {
        let mut seen = std::collections::HashMap::from([(v.clone(), 0usize)]);
        let mut queue = std::collections::VecDeque::from([v.clone()]);
        while let Some(x) = queue.pop_front() {
            let d = seen[&x];
            if d == 2 * radius {
                continue;
            }
            for y in tree.neighbors(&x) {
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), d + 1);
                    queue.push_back(y);
                }
            }
        }
        for u in &ball {
            worst_distance = worst_distance.max(v.distance(u).abs_diff(seen[u]));
        }
    }
    report.push("distance_vs_bfs", worst_distance as f64);
    let mut additivity = 0i64;
    let mut bound = 0i64;
    for u in tree.cylinders(radius) {
        for v in ball.iter().step_by(3) {
            for x in ball.iter().step_by(5) {
                for y in ball.iter().step_by(11) {
                    let vx = horocyclic_index(v, x, &u).expect("depth covers the ball");
                    let vy = horocyclic_index(v, y, &u).expect("depth covers the ball");
                    let yx = horocyclic_index(y, x, &u).expect("depth covers the ball");
                    additivity = additivity.max((vx - vy - yx).abs());
                }
                let k = horocyclic_index(v, x, &u).expect("depth covers the ball");
                bound = bound.max(k.abs() - v.distance(x) as i64);
            }
        }
    }
    report.push("kappa_additivity", additivity as f64);
    report.push("kappa_bound", bound.max(0) as f64);
    report
}

fn measures(ctx: &Context, _: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let mut report = ctx.report("measures", 4, false, 0.0);
    for v in tree.ball(&Vertex::root(), 2) {
        for depth in 1..=4 {
            let total: Rational = tree.measure_table(&v, depth).into_iter().sum();
            report.push(
                format!("partition v={v:?} L={depth}"),
                rational_to_f64(&(total - 1).abs()),
            );
        }
    }
    report
}

fn boundary_quasi_invariance(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let mut report = ctx.report("boundary_quasi_invariance", 2, false, 1e-12);
    let o = Vertex::root();
    let f = CylindricalFunction::from_fn(tree, 2, |_| rng.gen_range(-5i64..=5));
    let mut worst = 0.0f64;
    for g in random_isometries(tree, 2, ctx.config.isometries, rng) {
        let lhs = act_boundary(tree, &g, &f)
            .integrate(tree, &o)
            .expect("depth at least zero");
        let target = g.inverse().apply(&o);
        let depth = f.depth().max(target.len());
        let refined = f.refine(tree, depth);
        let rhs: Complex64 = tree
            .cylinders(depth)
            .iter()
            .zip(refined.values())
            .map(|(u, &value)| {
                let kernel = tree.poisson_kernel(&o, &target, u).expect("depth covers target");
                Complex64::new(
                    value as f64 * kernel * rational_to_f64(&tree.cylinder_measure_o(u)),
                    0.0,
                )
            })
            .sum();
        worst = worst.max((lhs - rhs).norm());
    }
    report.push("quasi_invariance", worst);
    report
}

fn fourier_slice(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.config.radius;
    let mut report = ctx.report("fourier_slice", radius, false, 1e-12);
    let bases: Vec<Vertex> = tree.ball(&Vertex::root(), 1);
    let mut worst = 0.0f64;
    for _ in 0..ctx.config.samples {
        let f = random_vertex_function(tree, radius, rng);
        for v in &bases {
            let direct = helgason_fourier(tree, &f, v);
            let sliced = fourier_z(&abel(tree, &f, v));
            worst = worst.max(direct.max_laurent_diff(tree, &sliced).unwrap_or(f64::NAN));
        }
    }
    report.push("abel_vs_helgason", worst);
    report
}

fn radon_intertwining(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.small_radius();
    let mut report = ctx.report("radon_intertwining", radius, false, 0.0);
    let f = random_vertex_function(tree, radius, rng);
    let rf = radon(tree, &f);
    let mut worst = 0.0f64;
    for g in random_isometries(tree, 2, ctx.config.isometries, rng) {
        let lhs = radon(tree, &f.pi_action(&g));
        let rhs = rf.pihat_action(tree, &g);
        worst = worst.max(lhs.max_abs_diff(tree, &rhs).unwrap_or(f64::NAN));
    }
    report.push("exact_table_deviation", worst);
    report
}

fn range_conditions(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.config.radius;
    let mut report = ctx.report("range_cc", radius, false, 0.0);
    let vertices = tree.ball(&Vertex::root(), 2);
    for i in 0..ctx.config.samples {
        let f = random_vertex_function(tree, radius, rng);
        let single = check_range_cc_exact(tree, &radon(tree, &f), &vertices, 0.0);
        report.push(format!("sample {i}"), single.max_residual);
    }
    report
}

fn unitarity_q(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.config.radius;
    let mut report = ctx.report("unitarity_q", radius, true, 1e-8);
    let mut worst = 0.0f64;
    for _ in 0..ctx.config.samples {
        let f = random_vertex_function(tree, radius, rng);
        let exact = f.norm_sq_exact() as f64;
        let value = crate::transforms::q_transform_at_depth(tree, &ctx.quad, &f, ctx.config.depth.max(radius))
            .and_then(|qf| qf.norm_sq_grid(tree));
        match value {
            Ok(v) => worst = worst.max((v - exact).abs()),
            Err(_) => worst = f64::NAN,
        }
    }
    report.push("norm_deviation", worst);
    report
}

fn plancherel_weight(ctx: &Context, _: &mut ChaCha8Rng) -> ConditionReport {
    let mut report = ctx.report("plancherel_weight", 0, true, 1e-10);
    let mass = ctx.quad.mean(ctx.quad.density().iter().copied());
    report.push("unit_mass", (mass - 1.0).abs());
    let symmetric = (0..ctx.quad.size())
        .map(|k| (ctx.quad.multiplier()[k] - ctx.quad.multiplier()[ctx.quad.negate(k)]).abs())
        .fold(0.0, f64::max);
    report.push("multiplier_even", symmetric);
    report
}

fn q_intertwining(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.small_radius();
    let mut report = ctx.report("q_intertwining", radius, true, 1e-8);
    let f = random_vertex_function(tree, radius, rng);
    let qf = q_transform(tree, &ctx.quad, &f);
    let mut worst = 0.0f64;
    for g in random_isometries(tree, 2, ctx.config.isometries, rng) {
        let lhs = q_transform(tree, &ctx.quad, &f.pi_action(&g));
        let deviation = qf.pihat_action(tree, &g).and_then(|rhs| lhs.max_grid_diff(tree, &rhs));
        worst = worst.max(deviation.unwrap_or(f64::NAN));
    }
    report.push("grid_deviation", worst);
    report
}

fn lambda_base_independence(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let mut report = ctx.report("lambda_base_independence", 2, true, 1e-10);
    let f = crate::random::random_complex_horofunction(tree, Vertex::root(), 2, 2, rng);
    let pairs = tree.ball(&Vertex::root(), 2);
    let mut worst_lambda = 0.0f64;
    let mut worst_change = 0.0f64;
    for v in &pairs {
        let at_o = lambda_op(tree, &ctx.quad, &f, &Vertex::root());
        let at_v = lambda_op(tree, &ctx.quad, &f, v);
        let deviation = at_o.and_then(|a| at_v.and_then(|b| a.max_grid_diff(tree, &b)));
        worst_lambda = worst_lambda.max(deviation.unwrap_or(f64::NAN));
        for u in pairs.iter().step_by(3) {
            let direct = phi_v(tree, &f, u);
            let moved = phi_v(tree, &f, v).and_then(|p| p.rebase(tree, u));
            let deviation = direct.and_then(|a| moved.and_then(|b| a.max_laurent_diff(tree, &b)));
            worst_change = worst_change.max(deviation.unwrap_or(f64::NAN));
        }
    }
    report.push("lambda_two_bases", worst_lambda);
    report.push("base_change_law", worst_change);
    report
}

fn flat_and_sharp(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.small_radius();
    let mut report = ctx.report("flat_and_sharp", radius.max(2), true, 1e-10);
    let f = random_vertex_function(tree, radius, rng);
    let vertices = tree.ball(&Vertex::root(), 2);
    let rf = radon(tree, &f).refine(tree, 2);
    let flat = check_flat(tree, &ctx.quad, &rf, &vertices, 1.0);
    ctx.record(&mut report, "flat_radon", flat.map(|r| r.max_residual));
    let via_sharp = check_flat_via_sharp(tree, &ctx.quad, &rf, &Vertex::root(), 2, 1.0);
    ctx.record(&mut report, "flat_via_sharp_radon", via_sharp.map(|r| r.max_residual));
    let lambda_flat = lambda_op(tree, &ctx.quad, &rf, &Vertex::root()).and_then(|g| check_flat_freq(tree, &g, 1.0));
    ctx.record(&mut report, "flat_lambda_radon", lambda_flat.map(|r| r.max_residual));
    let sharp = helgason_fourier_at_depth(tree, &f, &Vertex::root(), radius.max(2))
        .and_then(|h| h.sampled(tree, &ctx.quad))
        .and_then(|h| check_sharp(tree, &h, &Vertex::root(), 2, 1.0));
    ctx.record(&mut report, "sharp_helgason", sharp.map(|r| r.max_residual));
    report
}

fn inversion(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.small_radius();
    let mut report = ctx.report("inversion", radius, true, 1e-6);
    let targets = tree.ball(&Vertex::root(), radius);
    let mut worst = 0.0f64;
    let mut drift = 0.0f64;
    for _ in 0..ctx.config.samples.min(5) {
        let f = random_nonzero_vertex_function(tree, radius, rng);
        let qf = crate::transforms::q_transform_at_depth(tree, &ctx.quad, &f, radius).expect("depth equals radius");
        match q_invert(tree, &qf, &targets) {
            Ok(rec) => {
                worst = worst.max(rec.function.distance_l2(&f.to_complex()) / f.norm_sq().sqrt());
                drift = drift.max(rec.quadrature_drift);
            }
            Err(_) => worst = f64::NAN,
        }
    }
    report.push("relative_error", worst);
    report.diagnostic("quadrature_drift", drift);
    report
}

fn witness(ctx: &Context, rng: &mut ChaCha8Rng) -> ConditionReport {
    let tree = &ctx.tree;
    let radius = ctx.small_radius().min(2);
    let f: VertexFunction<i64> = random_nonzero_vertex_function(tree, radius, rng);
    let gs: Vec<Isometry> = random_isometries(tree, 2, ctx.config.isometries, rng);
    let coefficient_tol = ctx.config.tol(1e-12);
    let energy_tol = ctx.config.tol(1e-8);
    match reducibility_witness(tree, &ctx.quad, &f, &gs, coefficient_tol, energy_tol) {
        Ok(report) => report,
        Err(e) => {
            let mut report = ctx.report("reducibility_witness", radius, true, coefficient_tol);
            ctx.record(&mut report, "coefficient", Err(e));
            report
        }
    }
}
