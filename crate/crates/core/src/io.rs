//! File formats: JSON for vertex functions, horocycle tables, Laurent
//! coefficients and reports; CSV for grid samples.
//!
//! Words are integer arrays in JSON and colon-joined integers in CSV (`0:1:0`,
//! empty for the root), so letters above 9 parse unambiguously. Output order
//! is deterministic: cylinders lexicographic, then `n` or `k` ascending.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::horocycle::HoroFunction;
use crate::quadrature::Quadrature;
use crate::scalar::Scalar;
use crate::transforms::{FreqFunction, VertexFunction};
use crate::tree::{Tree, Vertex};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexEntry {
    word: Vec<u32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexFile {
    q: u32,
    entries: Vec<VertexEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HoroEntry {
    prefix: Vec<u32>,
    n: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HoroFile {
    q: u32,
    base: Vec<u32>,
    depth: usize,
    n_min: i64,
    n_max: i64,
    values: Vec<HoroEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Coefficient {
    n: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaurentRow {
    prefix: Vec<u32>,
    coeffs: Vec<Coefficient>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LaurentFile {
    q: u32,
    base: Vec<u32>,
    depth: usize,
    cylinders: Vec<LaurentRow>,
}

fn parse_json<'a, D: Deserialize<'a>>(text: &'a str, what: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("plain data serializes");
    out.push('\n');
    out
}

fn checked_vertex(tree: &Tree, word: &[u32], field: &str) -> Result<Vertex> {
    tree.vertex(word)
        .map_err(|e| Error::Parse(format!("{field} {word:?}: {e}")))
}

/// `{"q":2,"entries":[{"word":[0,1],"re":3.0,"im":0.0},...]}`, zero entries omitted.
pub fn vertex_function_to_json<T: Scalar>(tree: &Tree, f: &VertexFunction<T>) -> String {
    let entries = f
        .iter()
        .map(|(x, v)| (x, v.to_complex()))
        .filter(|(_, z)| *z != Complex64::new(0.0, 0.0))
        .map(|(x, z)| VertexEntry {
            word: x.letters().to_vec(),
            re: z.re,
            im: z.im,
        })
        .collect();
    to_json(&VertexFile { q: tree.q(), entries })
}

/// Parses a vertex function; `im` may be omitted.
pub fn vertex_function_from_json(text: &str) -> Result<(Tree, VertexFunction<Complex64>)> {
    let file: VertexFile = parse_json(text, "vertex function")?;
    let tree = Tree::new(file.q)?;
    let mut f = VertexFunction::new();
    for (i, e) in file.entries.iter().enumerate() {
        let x = checked_vertex(&tree, &e.word, &format!("entries[{i}].word"))?;
        f.insert(x, Complex64::new(e.re, e.im));
    }
    Ok((tree, f))
}

/// The integer function when every entry is an integer with zero imaginary part.
pub fn integer_vertex_function(f: &VertexFunction<Complex64>) -> Option<VertexFunction<i64>> {
    let mut out = VertexFunction::new();
    for (x, z) in f.iter() {
        out.insert(x.clone(), as_integer(*z)?);
    }
    Some(out)
}

fn as_integer(z: Complex64) -> Option<i64> {
    let fits = z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() < 9.0e15;
    fits.then_some(z.re as i64)
}

/// The horocycle table format; only nonzero slots are written.
pub fn horofunction_to_json<T: Scalar>(tree: &Tree, f: &HoroFunction<T>) -> String {
    let (n_min, n_max) = f.n_range();
    let mut values = Vec::new();
    for (c, u) in tree.words(f.depth()).iter().enumerate() {
        for n in n_min..=n_max {
            let z = f.get(c, n).to_complex();
            if z != Complex64::new(0.0, 0.0) {
                values.push(HoroEntry {
                    prefix: u.letters().to_vec(),
                    n,
                    re: z.re,
                    im: z.im,
                });
            }
        }
    }
    to_json(&HoroFile {
        q: tree.q(),
        base: f.base().letters().to_vec(),
        depth: f.depth(),
        n_min,
        n_max,
        values,
    })
}

pub fn horofunction_from_json(text: &str) -> Result<(Tree, HoroFunction<Complex64>)> {
    let file: HoroFile = parse_json(text, "horocycle table")?;
    let tree = Tree::new(file.q)?;
    let base = checked_vertex(&tree, &file.base, "base")?;
    let mut f = HoroFunction::zeros(&tree, base, file.depth, file.n_min, file.n_max);
    for (i, e) in file.values.iter().enumerate() {
        let u = checked_vertex(&tree, &e.prefix, &format!("values[{i}].prefix"))?;
        if u.len() != file.depth {
            return Err(Error::Parse(format!(
                "values[{i}].prefix has length {}, expected depth {}",
                u.len(),
                file.depth
            )));
        }
        if e.n < file.n_min || e.n > file.n_max {
            return Err(Error::Parse(format!(
                "values[{i}].n = {} lies outside [{}, {}]",
                e.n, file.n_min, file.n_max
            )));
        }
        f.set(tree.cylinder_index(&u), e.n, Complex64::new(e.re, e.im));
    }
    Ok((tree, f))
}

/// The integer table when every slot is an integer with zero imaginary part.
pub fn integer_horofunction(tree: &Tree, f: &HoroFunction<Complex64>) -> Option<HoroFunction<i64>> {
    let (n_min, n_max) = f.n_range();
    let mut out = HoroFunction::zeros(tree, f.base().clone(), f.depth(), n_min, n_max);
    for c in 0..f.cylinder_count() {
        for n in n_min..=n_max {
            out.set(c, n, as_integer(f.get(c, n))?);
        }
    }
    Some(out)
}

/// Laurent coefficients, one record per cylinder; zero coefficients omitted.
pub fn laurent_to_json(tree: &Tree, g: &FreqFunction) -> Result<String> {
    let laurent = g
        .laurent()
        .ok_or(Error::MissingRepresentation("Laurent coefficients"))?;
    let (n_min, _) = laurent.n_range();
    let cylinders = tree
        .words(g.depth())
        .iter()
        .enumerate()
        .map(|(c, u)| LaurentRow {
            prefix: u.letters().to_vec(),
            coeffs: laurent
                .row(c)
                .iter()
                .enumerate()
                .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
                .map(|(j, z)| Coefficient {
                    n: n_min + j as i64,
                    re: z.re,
                    im: z.im,
                })
                .collect(),
        })
        .collect();
    Ok(to_json(&LaurentFile {
        q: tree.q(),
        base: g.base().letters().to_vec(),
        depth: g.depth(),
        cylinders,
    }))
}

pub fn laurent_from_json(text: &str) -> Result<(Tree, FreqFunction)> {
    let file: LaurentFile = parse_json(text, "Laurent coefficients")?;
    let tree = Tree::new(file.q)?;
    let base = checked_vertex(&tree, &file.base, "base")?;
    let mut rows = vec![Vec::new(); tree.cylinder_count(file.depth)];
    for (i, row) in file.cylinders.iter().enumerate() {
        let u = checked_vertex(&tree, &row.prefix, &format!("cylinders[{i}].prefix"))?;
        if u.len() != file.depth {
            return Err(Error::Parse(format!(
                "cylinders[{i}].prefix has length {}, expected depth {}",
                u.len(),
                file.depth
            )));
        }
        rows[tree.cylinder_index(&u)].extend(row.coeffs.iter().map(|c| (c.n, Complex64::new(c.re, c.im))));
    }
    let ns = rows.iter().flatten().map(|(n, _)| *n);
    let (n_min, n_max) = match (ns.clone().min(), ns.max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => (0, -1),
    };
    let g = FreqFunction::laurent_from_fn(&tree, base, file.depth, n_min, n_max, |u, n| {
        rows[tree.cylinder_index(u)]
            .iter()
            .filter(|(m, _)| *m == n)
            .map(|(_, z)| *z)
            .sum()
    });
    Ok((tree, g))
}

fn word_field(u: &Vertex) -> String {
    u.letters().iter().map(u32::to_string).collect::<Vec<_>>().join(":")
}

fn parse_word_field(field: &str) -> std::result::Result<Vec<u32>, String> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(':')
        .map(|s| s.parse::<u32>().map_err(|e| format!("bad letter {s:?}: {e}")))
        .collect()
}

/// Grid samples as CSV with columns `cylinder_prefix,k,t_k,re,im`.
pub fn grid_to_csv(tree: &Tree, g: &FreqFunction) -> Result<String> {
    let grid = g.grid().ok_or(Error::MissingRepresentation("grid samples"))?;
    let quad = grid.quadrature();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    writer
        .write_record(["cylinder_prefix", "k", "t_k", "re", "im"])
        .map_err(io_err)?;
    for (c, u) in tree.words(g.depth()).iter().enumerate() {
        for (k, z) in grid.row(c).iter().enumerate() {
            writer
                .write_record([
                    word_field(u),
                    k.to_string(),
                    quad.t(k).to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])
                .map_err(io_err)?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

#[derive(Deserialize)]
struct GridRow {
    cylinder_prefix: String,
    k: usize,
    t_k: f64,
    re: f64,
    im: f64,
}

/// Parses grid samples written by [`grid_to_csv`]. The file carries no base
/// vertex and no `q`: the base is the root, and `q` is recovered from the grid
/// spacing `t_1 = T / M = 2π / (M ln q)` and must equal `expected_q` if given.
pub fn grid_from_csv(text: &str, expected_q: Option<u32>) -> Result<FreqFunction> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.deserialize::<GridRow>().enumerate() {
        let row = record.map_err(|e| Error::Parse(format!("grid CSV record {}: {e}", i + 1)))?;
        let word = parse_word_field(&row.cylinder_prefix)
            .map_err(|e| Error::Parse(format!("grid CSV record {}: {e}", i + 1)))?;
        rows.push((word, row));
    }
    let first = rows
        .first()
        .ok_or_else(|| Error::Parse("grid CSV has no records".into()))?;
    let depth = first.0.len();
    let m = rows.iter().map(|(_, r)| r.k).max().unwrap_or(0) + 1;
    let spacing = rows
        .iter()
        .find(|(_, r)| r.k == 1)
        .map(|(_, r)| r.t_k)
        .ok_or_else(|| Error::Parse("grid CSV needs a sample at k = 1 to fix q".into()))?;
    let q_float = (2.0 * std::f64::consts::PI / (m as f64 * spacing)).exp();
    let found = q_float.round();
    if found.is_nan() || found < 2.0 || (q_float - found).abs() > 1e-6 * found {
        return Err(Error::Parse(format!(
            "grid spacing {spacing} does not match any integer q"
        )));
    }
    let found = found as u32;
    if let Some(expected) = expected_q.filter(|&q| q != found) {
        return Err(Error::BranchingMismatch { expected, found });
    }
    let tree = Tree::new(found)?;
    let quad: Arc<Quadrature> = Quadrature::shared(&tree, m)?;
    let count = tree.cylinder_count(depth);
    let mut samples = vec![None; count * m];
    for (i, (word, row)) in rows.iter().enumerate() {
        let u = checked_vertex(&tree, word, &format!("grid CSV record {} cylinder_prefix", i + 1))?;
        if u.len() != depth {
            return Err(Error::Parse(format!(
                "grid CSV record {}: prefix length {} differs from {depth}",
                i + 1,
                u.len()
            )));
        }
        samples[tree.cylinder_index(&u) * m + row.k] = Some(Complex64::new(row.re, row.im));
    }
    let samples = samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                let u = tree.cylinder_at(depth, i / m);
                Error::Parse(format!("grid CSV misses cylinder {:?} at k = {}", u, i % m))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FreqFunction::from_grid(&tree, quad, Vertex::root(), depth, samples))
}

/// Writes `contents` to a temporary sibling and renames it into place, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::other("output path has no file name")))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_vertex_function;
    use crate::transforms::{helgason_fourier, q_transform, radon};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn horofunction_round_trip_is_bit_exact() {
        let tree = Tree::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rf = radon(&tree, &random_vertex_function(&tree, 3, &mut rng));
        let text = horofunction_to_json(&tree, &rf);
        let (back_tree, back) = horofunction_from_json(&text).unwrap();
        assert_eq!(back_tree, tree);
        assert_eq!(integer_horofunction(&tree, &back).unwrap(), rf);
        assert_eq!(horofunction_to_json(&tree, &back), text);
    }

    #[test]
    fn horofunction_parse_diagnostics() {
        let err = horofunction_from_json("{\"q\":2,\n\"base\":[],\"depth\":1,").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let bad = r#"{"q":2,"base":[],"depth":1,"n_min":0,"n_max":0,"values":[{"prefix":[0,1],"n":0,"re":1}]}"#;
        assert!(horofunction_from_json(bad)
            .unwrap_err()
            .to_string()
            .contains("values[0].prefix"));
        let bad = r#"{"q":2,"base":[],"depth":1,"n_min":0,"n_max":0,"values":[{"prefix":[3],"n":0,"re":1}]}"#;
        assert!(horofunction_from_json(bad).is_err());
        let bad = r#"{"q":2,"base":[],"depth":1,"n_min":0,"n_max":0,"values":[{"prefix":[1],"n":4,"re":1}]}"#;
        assert!(horofunction_from_json(bad).unwrap_err().to_string().contains("outside"));
    }

    #[test]
    fn vertex_function_round_trip() {
        let tree = Tree::new(11).unwrap();
        let f = VertexFunction::from_entries([(Vertex::new(&[10, 11]), 4i64), (Vertex::root(), -2)]);
        let text = vertex_function_to_json(&tree, &f);
        let (t, back) = vertex_function_from_json(&text).unwrap();
        assert_eq!(t.q(), 11);
        assert_eq!(integer_vertex_function(&back).unwrap(), f);
        let (_, parsed) = vertex_function_from_json(r#"{"q":2,"entries":[{"word":[0],"re":1}]}"#).unwrap();
        assert_eq!(parsed.get(&Vertex::new(&[0])), Complex64::new(1.0, 0.0));
        assert!(vertex_function_from_json(r#"{"q":1,"entries":[]}"#).is_err());
    }

    #[test]
    fn laurent_round_trip() {
        let tree = Tree::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = helgason_fourier(&tree, &random_vertex_function(&tree, 2, &mut rng), &Vertex::new(&[1]));
        let text = laurent_to_json(&tree, &h).unwrap();
        let (_, back) = laurent_from_json(&text).unwrap();
        assert_eq!(back.max_laurent_diff(&tree, &h).unwrap(), 0.0);
        assert_eq!(laurent_to_json(&tree, &back).unwrap(), text);
    }

    #[test]
    fn grid_csv_round_trip_and_q_check() {
        let tree = Tree::new(3).unwrap();
        let quad = Quadrature::shared(&tree, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let qf = q_transform(&tree, &quad, &random_vertex_function(&tree, 2, &mut rng));
        let text = grid_to_csv(&tree, &qf).unwrap();
        assert!(text.starts_with("cylinder_prefix,k,t_k,re,im\n0:1,0,0,"));
        let back = grid_from_csv(&text, None).unwrap();
        assert_eq!(back.grid().unwrap().samples(), qf.grid().unwrap().samples());
        assert!(matches!(
            grid_from_csv(&text, Some(2)),
            Err(Error::BranchingMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("horotree-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }
}
