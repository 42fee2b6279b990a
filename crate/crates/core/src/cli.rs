//! Deterministic command-line front end.
//!
//! Every subcommand reads plain files (edge lists, JSON coefficient
//! descriptors, hex matching files), computes with the library, and prints
//! one report. JSON output is byte-deterministic: objects are emitted with
//! sorted string keys, degree keys are decimal strings, and degrees of
//! dimension zero are omitted. Wall-clock timing goes to stderr so it
//! never perturbs the report.
//!
//! Exit codes: 0 on success, 1 for unreadable or invalid input, 2 when a
//! mathematical invariant that should hold unconditionally fails (a bug
//! signal, raised as an internal error).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::algebra::{ground_field, regular_bimodule, Bimodule, Field, FiniteAlgebra};
use crate::chromatic::{
    build_chromatic, build_tilde_mu, check_les, check_line_isomorphism,
    check_polygon_decomposition, ChromaticVariant,
};
use crate::complex::{build_multipath_complex, CochainComplex, SignChoice};
use crate::digraph::{parse_edge_list, Digraph};
use crate::error::{Error, Result};
use crate::hochschild::{check_polygon_theorem, hh_dims};
use crate::homology::{betti, summarize};
use crate::morse::{
    critical_cells, greedy_matching, parse_matching, shortcut_homology, verify_matching,
    MatchingVerdict,
};
use crate::pathposet::PathPoset;
use crate::selftest::SUITES;
use crate::signs::{find_sign_isomorphism, lex_sign, sigma_e, verify_sign};

#[derive(Parser)]
#[command(
    name = "multipath",
    version,
    about = "Exact multipath cohomology of directed graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Field and coefficient selection shared by the computing subcommands.
#[derive(Args)]
pub struct CoefficientArgs {
    /// Scalar field: `q` for the rationals or `gf<p>` with `p` prime
    #[arg(long, default_value = "q")]
    pub field: String,
    /// JSON algebra descriptor (defaults to the ground field)
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    /// JSON bimodule descriptor (defaults to the algebra acting on itself)
    #[arg(long)]
    pub bimodule: Option<PathBuf>,
}

impl CoefficientArgs {
    pub fn load(&self) -> Result<(FiniteAlgebra, Bimodule)> {
        let field = Field::parse(&self.field)?;
        let a = match &self.algebra {
            Some(path) => load_algebra(path, field)?,
            None => ground_field(field).0,
        };
        let m = match &self.bimodule {
            Some(path) => load_bimodule(path, &a)?,
            None => regular_bimodule(&a),
        };
        Ok((a, m))
    }
}

#[derive(Args)]
pub struct OutputArgs {
    /// Report format: `json` (compact, deterministic) or `table`
    #[arg(long, default_value = "json")]
    pub format: String,
}

#[derive(Subcommand)]
pub enum Command {
    /// Multipath cohomology of a digraph
    Homology {
        /// Edge-list file (`vertices N` header, then `u v` lines)
        graph: PathBuf,
        #[command(flatten)]
        coefficients: CoefficientArgs,
        /// Vertex carrying the bimodule factor
        #[arg(long, default_value_t = 0)]
        base: usize,
        /// Sign assignment: `sigma` (component indices) or `lex`
        #[arg(long, default_value = "sigma")]
        sign: String,
        /// Also report dims, differential ranks and the Euler characteristic
        #[arg(long)]
        full: bool,
        /// Dump the complex (dims and differential entries) instead
        #[arg(long)]
        dump: bool,
        /// Print the Hasse diagram of the path poset as DOT and stop
        #[arg(long)]
        emit_hasse: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the square parity of the component-index sign on a path poset
    VerifySigns {
        graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve for the isomorphism between the two sign assignments
    SignIso {
        graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify an acyclic matching and apply the critical-cell shortcuts
    Morse {
        graph: PathBuf,
        /// Matching file (`lower upper` hex pairs); greedy when absent
        #[arg(long)]
        matching: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cohomology of a chromatic complex over all spanning sub-graphs
    Chromatic {
        graph: PathBuf,
        /// Cycle-closing edges act as `plain` (identity) or `hat` (zero)
        #[arg(long, default_value = "hat")]
        variant: String,
        #[command(flatten)]
        coefficients: CoefficientArgs,
        /// Also report dims, differential ranks and the Euler characteristic
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare multipath and chromatic complexes on the line and polygon
    CompareChromatic {
        /// Line length / polygon size parameter
        #[arg(short, long)]
        n: usize,
        #[command(flatten)]
        coefficients: CoefficientArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify the exact sequence tying the three complexes of a digraph
    CheckLes {
        graph: PathBuf,
        /// Scalar field: `q` for the rationals or `gf<p>` with `p` prime
        #[arg(long, default_value = "q")]
        field: String,
        /// JSON algebra descriptor (defaults to the ground field)
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hochschild homology dimensions from the bar complex
    Hochschild {
        #[command(flatten)]
        coefficients: CoefficientArgs,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare polygon cohomology against Hochschild homology
    PolygonCheck {
        /// Polygon size: the graph has n + 1 vertices
        #[arg(short, long)]
        n: usize,
        #[command(flatten)]
        coefficients: CoefficientArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the brute-force verification suites over all small digraphs
    Selftest,
}

/// Executes one parsed invocation and returns what to print on stdout.
pub fn run(cli: Cli) -> Result<String> {
    let started = std::time::Instant::now();
    let out = dispatch(cli.command)?;
    eprintln!("elapsed: {:.1?}", started.elapsed());
    Ok(out)
}

/// Maps an error to the process exit code: user errors are 1, breached
/// invariants are 2.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Validation(_) => 1,
        Error::Internal(_) => 2,
    }
}

fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Homology {
            graph,
            coefficients,
            base,
            sign,
            full,
            dump,
            emit_hasse,
            output,
        } => {
            let g = load_graph(&graph)?;
            if emit_hasse {
                return Ok(PathPoset::enumerate(&g).poset.hasse_dot());
            }
            let (a, m) = coefficients.load()?;
            let sign = SignChoice::parse(&sign)?;
            let complex = build_multipath_complex(&g, &a, &m, base, sign)?;
            let report = if dump {
                dump_complex(&complex)
            } else if full {
                full_report(&complex, &[])?
            } else {
                json!({ "betti": degree_map(&betti(&complex)?) })
            };
            render(&output.format, &report)
        }
        Command::VerifySigns { graph, output } => {
            let g = load_graph(&graph)?;
            let p = PathPoset::enumerate(&g);
            let eps = sigma_e(&p)?;
            let violations = verify_sign(&p.poset, &eps)?;
            if let Some(&sq) = violations.first() {
                return Err(Error::internal(format!(
                    "square {sq} of the path poset breaks the parity condition"
                )));
            }
            render(
                &output.format,
                &json!({ "ok": true, "squares": p.poset.squares.len() }),
            )
        }
        Command::SignIso { graph, output } => {
            let g = load_graph(&graph)?;
            let p = PathPoset::enumerate(&g);
            let sigma = sigma_e(&p)?;
            let lex = lex_sign(&p.poset);
            let report = match find_sign_isomorphism(&p.poset, &sigma, &lex)? {
                Some(eta) => json!({
                    "eta": eta.iter().map(|&b| u8::from(b)).collect::<Vec<_>>(),
                    "isomorphic": true,
                }),
                None => json!({ "isomorphic": false }),
            };
            render(&output.format, &report)
        }
        Command::Morse { graph, matching, output } => {
            let g = load_graph(&graph)?;
            let p = PathPoset::enumerate(&g);
            let matching = match matching {
                Some(path) => parse_matching(&read_text(&path)?, &p.poset)?,
                None => greedy_matching(&p.poset),
            };
            let report = match verify_matching(&p.poset, &matching)? {
                MatchingVerdict::SharedElement { element } => {
                    return Err(Error::validation(format!(
                        "element {element} is touched by two matched edges"
                    )));
                }
                MatchingVerdict::Cycle { elements } => {
                    let cycle: Vec<String> = elements
                        .iter()
                        .map(|&e| format!("{:#x}", p.poset.elements[e].bits()))
                        .collect();
                    json!({ "acyclic": false, "cycle": cycle, "pairs": matching.pairs.len() })
                }
                MatchingVerdict::Acyclic => {
                    let critical = critical_cells(&p.poset, &matching)?;
                    let mut report = Map::new();
                    report.insert("acyclic".into(), Value::Bool(true));
                    report.insert("critical".into(), degree_map(&critical));
                    report.insert("pairs".into(), Value::from(matching.pairs.len()));
                    match shortcut_homology(&p.poset, &matching)?.to_betti() {
                        Some(table) => {
                            report.insert("betti".into(), degree_map(&table));
                            report.insert("conclusive".into(), Value::Bool(true));
                        }
                        None => {
                            report.insert("conclusive".into(), Value::Bool(false));
                        }
                    }
                    Value::Object(report)
                }
            };
            render(&output.format, &report)
        }
        Command::Chromatic { graph, variant, coefficients, full, output } => {
            let g = load_graph(&graph)?;
            let variant = ChromaticVariant::parse(&variant)?;
            let (a, m) = coefficients.load()?;
            let complex = build_chromatic(&g, &a, &m, variant)?;
            let extra = [(
                "variant",
                Value::from(if variant == ChromaticVariant::Hat { "hat" } else { "plain" }),
            )];
            let report = if full {
                full_report(&complex, &extra)?
            } else {
                let mut map = Map::new();
                map.insert("betti".into(), degree_map(&betti(&complex)?));
                map.insert("variant".into(), extra[0].1.clone());
                Value::Object(map)
            };
            render(&output.format, &report)
        }
        Command::CompareChromatic { n, coefficients, output } => {
            let (a, m) = coefficients.load()?;
            let line = check_line_isomorphism(n, &a, &m)?;
            let polygon = check_polygon_decomposition(n, &a, &m)?;
            render(
                &output.format,
                &json!({ "line": line, "n": n, "polygon": polygon }),
            )
        }
        Command::CheckLes { graph, field, algebra, output } => {
            let g = load_graph(&graph)?;
            let field = Field::parse(&field)?;
            let a = match &algebra {
                Some(path) => load_algebra(path, field)?,
                None => ground_field(field).0,
            };
            let report = check_les(&g, &a)?;
            let tilde = build_tilde_mu(&g, &a)?;
            render(
                &output.format,
                &json!({
                    "composition_vanishes": report.composition_vanishes,
                    "dims_additive": report.dims_additive,
                    "euler_exact": report.euler_exact,
                    "holds": report.holds(),
                    "inclusion_is_chain_map": report.inclusion_is_chain_map,
                    "quotient_is_chain_map": report.quotient_is_chain_map,
                    "tilde_betti": degree_map(&betti(&tilde)?),
                    "tilde_betti_agree": report.tilde_betti_agree,
                    "tilde_signs_equivalent": report.tilde_signs_equivalent,
                }),
            )
        }
        Command::Hochschild { coefficients, max_degree, output } => {
            let (a, m) = coefficients.load()?;
            let dims = hh_dims(&a, &m, max_degree)?;
            let table: BTreeMap<usize, usize> =
                dims.iter().enumerate().map(|(d, &v)| (d, v)).collect();
            render(&output.format, &json!({ "hh": degree_map(&table) }))
        }
        Command::PolygonCheck { n, coefficients, output } => {
            let (a, m) = coefficients.load()?;
            let holds = check_polygon_theorem(n, &a, &m)?;
            let complex =
                build_multipath_complex(&Digraph::coherent_polygon(n), &a, &m, 0, SignChoice::SigmaE)?;
            let hh: BTreeMap<usize, usize> = hh_dims(&a, &m, n - 1)?
                .iter()
                .enumerate()
                .map(|(d, &v)| (d, v))
                .collect();
            render(
                &output.format,
                &json!({
                    "betti": degree_map(&betti(&complex)?),
                    "hh": degree_map(&hh),
                    "holds": holds,
                    "n": n,
                }),
            )
        }
        Command::Selftest => {
            let mut lines = String::new();
            for suite in SUITES {
                match (suite.run)() {
                    Ok(summary) => {
                        lines.push_str(&format!("PASS {}: {summary}\n", suite.name));
                    }
                    Err(err) => {
                        lines.push_str(&format!("FAIL {}: {err}\n", suite.name));
                        print!("{lines}");
                        return Err(err);
                    }
                }
            }
            Ok(lines)
        }
    }
}

/// Degree-keyed map with decimal string keys, omitting zero entries.
fn degree_map(table: &BTreeMap<usize, usize>) -> Value {
    let mut map = Map::new();
    for (&degree, &dim) in table {
        if dim > 0 {
            map.insert(degree.to_string(), Value::from(dim));
        }
    }
    Value::Object(map)
}

fn full_report(complex: &CochainComplex, extra: &[(&str, Value)]) -> Result<Value> {
    let summary = summarize(complex)?;
    let mut map = Map::new();
    map.insert("betti".into(), degree_map(&summary.betti));
    map.insert("chi".into(), Value::from(summary.euler_characteristic));
    map.insert("dims".into(), degree_map(&summary.dims));
    map.insert("ranks".into(), degree_map(&summary.diff_ranks));
    for (key, value) in extra {
        map.insert((*key).into(), value.clone());
    }
    Ok(Value::Object(map))
}

/// Debug dump: dimensions plus the entries of every differential as
/// `[row, col, value]` triplets with the scalar printed exactly.
fn dump_complex(complex: &CochainComplex) -> Value {
    let mut dims = BTreeMap::new();
    for (i, &dim) in complex.dims.iter().enumerate() {
        dims.insert(complex.bottom + i, dim);
    }
    let mut diffs = Map::new();
    for (i, diff) in complex.diffs.iter().enumerate() {
        let triplets: Vec<Value> = diff
            .entries
            .iter()
            .map(|(r, c, v)| json!([r, c, v.to_string()]))
            .collect();
        diffs.insert((complex.bottom + i).to_string(), Value::Array(triplets));
    }
    json!({ "dims": degree_map(&dims), "diffs": Value::Object(diffs) })
}

fn render(format: &str, value: &Value) -> Result<String> {
    match format {
        "json" => Ok(format!("{value}\n")),
        "table" => Ok(render_table(value)),
        other => Err(Error::validation(format!(
            "unknown format '{other}' (expected 'json' or 'table')"
        ))),
    }
}

fn render_table(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Object(map) => {
            for (key, inner) in map {
                match inner {
                    Value::Object(entries) => {
                        out.push_str(&format!("{key}:\n"));
                        if entries.is_empty() {
                            out.push_str("  (none)\n");
                        }
                        for (k, v) in entries {
                            out.push_str(&format!("  {k}  {v}\n"));
                        }
                    }
                    other => out.push_str(&format!("{key}: {other}\n")),
                }
            }
        }
        other => out.push_str(&format!("{other}\n")),
    }
    out
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Digraph> {
    parse_edge_list(&read_text(path)?)
}

/// Sparse JSON descriptor of a finite algebra: `mult` lists the nonzero
/// structure constants as `[i, j, k, num, den]` (the `e_k` coefficient of
/// `e_i · e_j`), and `unit` gives the unit's coefficients as `[num, den]`
/// pairs.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    dim: usize,
    mult: Vec<(usize, usize, usize, i64, i64)>,
    unit: Vec<(i64, i64)>,
}

/// Bimodule descriptor: `left` entries `[a, m, m', num, den]` give the
/// `e_{m'}` coefficient of `a_a · e_m`, `right` entries `[m, a, m', num,
/// den]` that of `e_m · a_a`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BimoduleFile {
    dim: usize,
    adim: usize,
    left: Vec<(usize, usize, usize, i64, i64)>,
    right: Vec<(usize, usize, usize, i64, i64)>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: format!("{}: {e}", path.display()),
    })
}

pub fn load_algebra(path: &Path, field: Field) -> Result<FiniteAlgebra> {
    let text = read_text(path)?;
    let file: AlgebraFile = parse_json(&text, path)?;
    let d = file.dim;
    if file.unit.len() != d {
        return Err(Error::validation(format!(
            "unit vector has {} entries for a dimension-{d} algebra",
            file.unit.len()
        )));
    }
    let mut mult = vec![field.zero(); d * d * d];
    for &(i, j, k, num, den) in &file.mult {
        if i >= d || j >= d || k >= d {
            return Err(Error::validation(format!(
                "structure constant ({i},{j},{k}) is out of range for dimension {d}"
            )));
        }
        mult[(i * d + j) * d + k] = field.ratio(num, den)?;
    }
    let unit = file
        .unit
        .iter()
        .map(|&(num, den)| field.ratio(num, den))
        .collect::<Result<Vec<_>>>()?;
    let a = FiniteAlgebra::new(field, d, mult, unit)?;
    if let Some(v) = a.verify().first() {
        return Err(Error::validation(format!(
            "algebra breaks the law '{}' at basis indices {:?}",
            v.law, v.indices
        )));
    }
    Ok(a)
}

pub fn load_bimodule(path: &Path, algebra: &FiniteAlgebra) -> Result<Bimodule> {
    let text = read_text(path)?;
    let file: BimoduleFile = parse_json(&text, path)?;
    if file.adim != algebra.dim {
        return Err(Error::validation(format!(
            "bimodule expects an algebra of dimension {}, got {}",
            file.adim, algebra.dim
        )));
    }
    let (d, ad) = (file.dim, file.adim);
    let mut left = vec![algebra.field.zero(); ad * d * d];
    for &(a, m, out, num, den) in &file.left {
        if a >= ad || m >= d || out >= d {
            return Err(Error::validation(format!(
                "left action entry ({a},{m},{out}) is out of range"
            )));
        }
        left[(a * d + m) * d + out] = algebra.field.ratio(num, den)?;
    }
    let mut right = vec![algebra.field.zero(); d * ad * d];
    for &(m, a, out, num, den) in &file.right {
        if m >= d || a >= ad || out >= d {
            return Err(Error::validation(format!(
                "right action entry ({m},{a},{out}) is out of range"
            )));
        }
        right[(m * ad + a) * d + out] = algebra.field.ratio(num, den)?;
    }
    let bimodule = Bimodule::new(algebra.field, d, ad, left, right)?;
    if let Some(v) = bimodule.verify(algebra).first() {
        return Err(Error::validation(format!(
            "bimodule breaks the law '{}' at basis indices {:?}",
            v.law, v.indices
        )));
    }
    Ok(bimodule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const DUAL_NUMBERS: &str = r#"{
        "dim": 2,
        "mult": [[0,0,0,1,1],[0,1,1,1,1],[1,0,1,1,1]],
        "unit": [[1,1],[0,1]]
    }"#;

    #[test]
    fn algebra_files_round_trip() {
        let f = write_temp(DUAL_NUMBERS);
        let a = load_algebra(f.path(), Field::Rationals).unwrap();
        assert_eq!(a.dim, 2);
        assert!(a.is_commutative());
        assert!(a.verify().is_empty());
    }

    #[test]
    fn broken_algebra_files_are_rejected() {
        // out-of-range index
        let f = write_temp(r#"{"dim":2,"mult":[[0,0,2,1,1]],"unit":[[1,1],[0,1]]}"#);
        assert!(load_algebra(f.path(), Field::Rationals).is_err());
        // wrong unit length
        let f = write_temp(r#"{"dim":2,"mult":[],"unit":[[1,1]]}"#);
        assert!(load_algebra(f.path(), Field::Rationals).is_err());
        // the claimed unit annihilates e_1 instead of fixing it
        let f = write_temp(r#"{"dim":2,"mult":[[0,0,0,1,1]],"unit":[[1,1],[0,1]]}"#);
        assert!(load_algebra(f.path(), Field::Rationals).is_err());
        // malformed JSON reports a parse error with a line number
        let f = write_temp("{\n  \"dim\": 2,\n");
        match load_algebra(f.path(), Field::Rationals) {
            Err(Error::Parse { line, .. }) => assert!(line >= 2),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn bimodule_files_are_validated_against_the_algebra() {
        let f = write_temp(DUAL_NUMBERS);
        let a = load_algebra(f.path(), Field::Rationals).unwrap();
        // the regular bimodule written out explicitly
        let m = write_temp(
            r#"{"dim":2,"adim":2,
                "left":[[0,0,0,1,1],[0,1,1,1,1],[1,0,1,1,1]],
                "right":[[0,0,0,1,1],[1,0,1,1,1],[0,1,1,1,1]]}"#,
        );
        let bimodule = load_bimodule(m.path(), &a).unwrap();
        assert!(bimodule.is_symmetric());
        // mismatched algebra dimension
        let m = write_temp(r#"{"dim":2,"adim":3,"left":[],"right":[]}"#);
        assert!(load_bimodule(m.path(), &a).is_err());
        // a unit that does not act as the identity
        let m = write_temp(r#"{"dim":1,"adim":2,"left":[],"right":[]}"#);
        assert!(load_bimodule(m.path(), &a).is_err());
    }

    #[test]
    fn degree_maps_omit_zero_entries() {
        let table = BTreeMap::from([(0, 2), (1, 0), (3, 5)]);
        assert_eq!(degree_map(&table).to_string(), r#"{"0":2,"3":5}"#);
    }

    #[test]
    fn dispatch_produces_the_documented_homology_report() {
        let graph = write_temp("vertices 3\n0 1\n2 1\n");
        let algebra = write_temp(DUAL_NUMBERS);
        let out = dispatch(Command::Homology {
            graph: graph.path().to_path_buf(),
            coefficients: CoefficientArgs {
                field: "q".into(),
                algebra: Some(algebra.path().to_path_buf()),
                bimodule: None,
            },
            base: 0,
            sign: "sigma".into(),
            full: false,
            dump: false,
            emit_hasse: false,
            output: OutputArgs { format: "json".into() },
        })
        .unwrap();
        assert_eq!(out, "{\"betti\":{\"0\":2,\"1\":2}}\n");
    }

    #[test]
    fn table_rendering_is_line_per_entry() {
        let value = json!({ "betti": { "2": 2 }, "ok": true });
        assert_eq!(render_table(&value), "betti:\n  2  2\nok: true\n");
        assert!(render("yaml", &value).is_err());
    }
}
