//! `horotree`: seeded experiments, verification suites and plot data.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! and input errors. Nothing is written when an input error occurs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use horotree::io::{
    grid_from_csv, grid_to_csv, horofunction_from_json, horofunction_to_json, integer_horofunction,
    integer_vertex_function, laurent_from_json, laurent_to_json, vertex_function_from_json, vertex_function_to_json,
    write_atomic,
};
use horotree::random::{random_isometries, random_nonzero_vertex_function, rng_from_seed};
use horotree::range::{check_flat, check_flat_via_sharp, check_range_cc, check_range_cc_exact};
use horotree::suite::{self, SuiteConfig};
use horotree::transforms::{helgason_fourier_at_depth, hf_invert, q_invert, q_transform_at_depth, radon_at_depth};
use horotree::witness::reducibility_witness;
use horotree::{CFunction, ConditionReport, Quadrature, Tree, Vertex, VertexFunction};
use num_complex::Complex64;

#[derive(Parser, Debug)]
#[command(
    name = "horotree",
    version,
    about = "Horocyclic Radon transform on homogeneous trees"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Opts {
    /// Branching number; each vertex has q + 1 neighbours. Defaults to 2, or to the value in the input file.
    #[arg(long, global = true)]
    q: Option<u32>,
    /// Support radius of generated functions.
    #[arg(long, global = true, default_value_t = 3)]
    radius: usize,
    /// Cylinder depth of emitted tables (at least the radius). Defaults to the radius.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Frequency grid size M, a power of two.
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Replaces the default tolerances.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Input file.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "HOROTREE_OUT_DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every invariant check and write selftest_report.json.
    Selftest,
    /// Radon, Helgason-Fourier and unitarized transforms of a vertex function.
    Transform,
    /// Reconstruct a vertex function from q_grid.csv or hf_laurent.json.
    Invert {
        /// Original function, to report the reconstruction error.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Run the range and symmetry checkers on a horocycle table.
    Verify,
    /// Plancherel weight and |H f| samples as CSV.
    Plotdata,
    /// Band-split witness that the quasi-regular representation is reducible.
    DemoReducibility,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] horotree::Error),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Files to write once every computation has succeeded.
struct Outputs(Vec<(String, String)>);

impl Outputs {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn add(&mut self, name: &str, contents: String) {
        self.0.push((name.to_string(), contents));
    }

    fn write(self, dir: &Path) -> CliResult<()> {
        fs::create_dir_all(dir).map_err(|source| CliError::Read {
            path: dir.to_path_buf(),
            source,
        })?;
        for (name, contents) in self.0 {
            write_atomic(&dir.join(name), &contents)?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    let opts = &cli.opts;
    if let Some(q) = opts.q {
        Tree::new(q)?;
    }
    if !opts.grid.is_power_of_two() || opts.grid < 4 {
        return Err(horotree::Error::InvalidGrid(opts.grid).into());
    }
    if opts.depth.is_some_and(|d| d < opts.radius) {
        return Err(CliError::Usage(format!(
            "--depth {} is below --radius {}",
            opts.depth.unwrap_or(0),
            opts.radius
        )));
    }
    match &cli.command {
        Command::Selftest => selftest(opts),
        Command::Transform => transform(opts),
        Command::Invert { reference } => invert(opts, reference.as_deref()),
        Command::Verify => verify(opts),
        Command::Plotdata => plotdata(opts),
        Command::DemoReducibility => demo_reducibility(opts),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn tree_for(opts: &Opts) -> CliResult<Tree> {
    Ok(Tree::new(opts.q.unwrap_or(2))?)
}

fn check_q(opts: &Opts, found: u32) -> CliResult<()> {
    match opts.q {
        Some(expected) if expected != found => Err(horotree::Error::BranchingMismatch { expected, found }.into()),
        _ => Ok(()),
    }
}

fn depth_for(opts: &Opts) -> usize {
    opts.depth.unwrap_or(opts.radius)
}

/// The vertex function from `--in`, or a seeded random one on `ball(o, R)`.
fn input_function(opts: &Opts) -> CliResult<(Tree, VertexFunction<Complex64>, bool)> {
    match &opts.input {
        Some(path) => {
            let (tree, f) = vertex_function_from_json(&read(path)?)?;
            check_q(opts, tree.q())?;
            let radius = f.pruned().support_radius();
            if radius > opts.radius {
                return Err(horotree::Error::RadiusOverflow {
                    radius,
                    limit: opts.radius,
                }
                .into());
            }
            Ok((tree, f.pruned(), false))
        }
        None => {
            let tree = tree_for(opts)?;
            let mut rng = rng_from_seed(opts.seed);
            let f = random_nonzero_vertex_function(&tree, opts.radius, &mut rng).to_complex();
            Ok((tree, f, true))
        }
    }
}

fn print_report(report: &ConditionReport) {
    let status = if report.pass { "PASS" } else { "FAIL" };
    println!(
        "{status} {} (max residual {:.3e}, tol {:.1e})",
        report.condition, report.max_residual, report.tol
    );
}

fn reports_json(reports: &[ConditionReport]) -> String {
    let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
    out.push('\n');
    out
}

fn selftest(opts: &Opts) -> CliResult<bool> {
    let config = SuiteConfig {
        q: opts.q.unwrap_or(2),
        radius: opts.radius,
        depth: depth_for(opts),
        grid: opts.grid,
        seed: opts.seed,
        tol: opts.tol,
        ..SuiteConfig::default()
    };
    let report = suite::run(&config)?;
    for check in &report.checks {
        print_report(check);
    }
    let mut outputs = Outputs::new();
    outputs.add("selftest_report.json", report.to_json() + "\n");
    outputs.write(&opts.out)?;
    if let Some(name) = &report.first_failure {
        eprintln!("first failing condition: {name}");
    }
    Ok(report.pass)
}

fn transform(opts: &Opts) -> CliResult<bool> {
    let (tree, f, generated) = input_function(opts)?;
    let depth = depth_for(opts);
    let quad = Quadrature::shared(&tree, opts.grid)?;
    let mut outputs = Outputs::new();
    if generated {
        let integer = integer_vertex_function(&f).expect("generated entries are integers");
        outputs.add("f.json", vertex_function_to_json(&tree, &integer));
    }
    let rf = radon_at_depth(&tree, &f, depth)?;
    match integer_horofunction(&tree, &rf) {
        Some(exact) => outputs.add("horofunction.json", horofunction_to_json(&tree, &exact)),
        None => outputs.add("horofunction.json", horofunction_to_json(&tree, &rf)),
    }
    let h = helgason_fourier_at_depth(&tree, &f, &Vertex::root(), depth)?;
    outputs.add("hf_laurent.json", laurent_to_json(&tree, &h)?);
    let qf = q_transform_at_depth(&tree, &quad, &f, depth)?;
    outputs.add("q_grid.csv", grid_to_csv(&tree, &qf)?);
    outputs.write(&opts.out)?;
    println!(
        "wrote horofunction.json, hf_laurent.json and q_grid.csv to {}",
        opts.out.display()
    );
    Ok(true)
}

fn invert(opts: &Opts, reference: Option<&Path>) -> CliResult<bool> {
    let path = opts
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("invert needs --in q_grid.csv or hf_laurent.json".into()))?;
    let text = read(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let (tree, inversion) = if is_csv {
        let qf = grid_from_csv(&text, opts.q)?;
        let tree = *qf.grid().expect("parsed from samples").quadrature().tree();
        let targets = tree.ball(&Vertex::root(), opts.radius.min(qf.depth()));
        (tree, q_invert(&tree, &qf, &targets)?)
    } else {
        let (tree, h) = laurent_from_json(&text)?;
        check_q(opts, tree.q())?;
        let quad = Quadrature::shared(&tree, opts.grid)?;
        let need = opts.radius.max(h.base().len());
        let h = h.refine(&tree, h.depth().max(need)).sampled(&tree, &quad)?;
        let targets = tree.ball(&Vertex::root(), opts.radius);
        (tree, hf_invert(&tree, &h, &targets)?)
    };
    let reconstructed = inversion.function.clone();
    let mut summary = serde_json::json!({
        "q": tree.q(),
        "radius": opts.radius,
        "quadrature_drift": inversion.quadrature_drift,
        "max_imag": reconstructed.iter().map(|(_, z)| z.im.abs()).fold(0.0, f64::max),
        "norm": reconstructed.norm_sq().sqrt(),
    });
    let mut pass = true;
    if let Some(reference) = reference {
        let (ref_tree, f) = vertex_function_from_json(&read(reference)?)?;
        if ref_tree.q() != tree.q() {
            return Err(horotree::Error::BranchingMismatch {
                expected: tree.q(),
                found: ref_tree.q(),
            }
            .into());
        }
        let relative = reconstructed.distance_l2(&f) / f.norm_sq().sqrt().max(f64::MIN_POSITIVE);
        let tol = opts.tol.unwrap_or(1e-6);
        pass = relative <= tol;
        summary["relative_error"] = relative.into();
        summary["tol"] = tol.into();
        summary["pass"] = pass.into();
        println!(
            "{} inversion (relative error {relative:.3e}, tol {tol:.1e})",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    let mut outputs = Outputs::new();
    outputs.add("reconstructed_f.json", vertex_function_to_json(&tree, &reconstructed));
    outputs.add(
        "invert_summary.json",
        serde_json::to_string_pretty(&summary).expect("json") + "\n",
    );
    outputs.write(&opts.out)?;
    Ok(pass)
}

fn verify(opts: &Opts) -> CliResult<bool> {
    let path = opts
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("verify needs --in horofunction.json".into()))?;
    let (tree, f) = horofunction_from_json(&read(path)?)?;
    check_q(opts, tree.q())?;
    let quad = Quadrature::shared(&tree, opts.grid)?;
    let tol = opts.tol.unwrap_or(1e-10);
    let vertices = tree.ball(&Vertex::root(), 2);
    let range = match integer_horofunction(&tree, &f) {
        Some(exact) => check_range_cc_exact(&tree, &exact, &vertices, tol),
        None => check_range_cc(&tree, &f, &vertices, tol),
    };
    let chart = f.refine(&tree, f.depth().max(2));
    let flat = check_flat(&tree, &quad, &chart, &vertices, tol)?;
    let mut sharp = check_flat_via_sharp(&tree, &quad, &chart, &Vertex::root(), 2, tol)?;
    sharp.condition = "sharp".into();
    let reports = [range, flat, sharp].map(|r| r.with_seed(opts.seed));
    let mut outputs = Outputs::new();
    for report in &reports {
        print_report(report);
        outputs.add(&format!("verify_{}.json", report.condition), report.to_json() + "\n");
    }
    outputs.write(&opts.out)?;
    Ok(reports.iter().all(|r| r.pass))
}

fn plotdata(opts: &Opts) -> CliResult<bool> {
    let (tree, f, _) = input_function(opts)?;
    let quad = Quadrature::shared(&tree, opts.grid)?;
    let c = CFunction::new(&tree);
    let mut weight = String::from("t,w,m\n");
    for k in 0..quad.size() {
        let t = quad.t(k);
        weight.push_str(&format!(
            "{t},{},{}\n",
            quad.density()[k] / c.c_q(),
            quad.multiplier()[k]
        ));
    }
    let depth = depth_for(opts);
    let h = helgason_fourier_at_depth(&tree, &f, &Vertex::root(), depth)?.sampled(&tree, &quad)?;
    let grid = h.grid().expect("sampled");
    let mut hf = String::from("cylinder_prefix,t,abs\n");
    for (cyl, u) in tree.words(depth).iter().enumerate() {
        let prefix = u.letters().iter().map(u32::to_string).collect::<Vec<_>>().join(":");
        for (k, z) in grid.row(cyl).iter().enumerate() {
            hf.push_str(&format!("{prefix},{},{}\n", quad.t(k), z.norm()));
        }
    }
    let mut outputs = Outputs::new();
    outputs.add("weight.csv", weight);
    outputs.add("hf_abs.csv", hf);
    outputs.write(&opts.out)?;
    println!("wrote weight.csv and hf_abs.csv to {}", opts.out.display());
    Ok(true)
}

fn demo_reducibility(opts: &Opts) -> CliResult<bool> {
    let (tree, f, _) = input_function(opts)?;
    let quad = Quadrature::shared(&tree, opts.grid)?;
    let mut rng = rng_from_seed(opts.seed.wrapping_add(1));
    let gs = random_isometries(&tree, 2, 20, &mut rng);
    let report = reducibility_witness(
        &tree,
        &quad,
        &f,
        &gs,
        opts.tol.unwrap_or(1e-12),
        opts.tol.unwrap_or(1e-8),
    )?
    .with_seed(opts.seed);
    print_report(&report);
    for (name, value) in &report.diagnostics {
        println!("  {name} = {value:.6e}");
    }
    let mut outputs = Outputs::new();
    outputs.add("reducibility_report.json", reports_json(std::slice::from_ref(&report)));
    outputs.write(&opts.out)?;
    Ok(report.pass)
}
