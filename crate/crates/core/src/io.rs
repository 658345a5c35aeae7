//! JSON documents for channels, algebras, codes and reports.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Emitted documents go through [`serde_json::Value`], whose maps are
//! ordered, so keys always come out sorted.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebras::{generate_algebra, structure_from_basis, AlgebraStructure, Block};
use crate::channels::{standard_channel, Channel};
use crate::correctability::{CorrectabilityReport, SubspaceCode};
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, C64};

/// Span tolerance used when an algebra is given by generators.
pub const GENERATOR_TOL: f64 = 1e-9;

type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausDoc {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<MatrixDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedDoc {
    name: String,
    #[serde(default)]
    params: Vec<f64>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockDoc {
    iso: MatrixDoc,
    #[serde(rename = "dA")]
    d_a: usize,
    #[serde(rename = "dB")]
    d_b: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlocksDoc {
    ambient_dim: usize,
    blocks: Vec<BlockDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorsDoc {
    generators: Vec<MatrixDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim_code: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim_phys: Option<usize>,
    isometry: MatrixDoc,
}

fn matrix_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn matrix_from_doc(doc: &MatrixDoc, what: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = doc
        .iter()
        .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    CMatrix::from_rows(&rows).map_err(|e| Error::InvalidInput(format!("{what}: {e}")))
}

/// Serializes a matrix as nested `[re, im]` rows.
pub fn matrix_to_value(m: &CMatrix) -> Value {
    serde_json::to_value(matrix_doc(m)).expect("matrix documents always serialize")
}

/// Parses a matrix written as nested `[re, im]` rows.
pub fn matrix_from_value(v: &Value) -> Result<CMatrix> {
    let doc: MatrixDoc = serde_json::from_value(v.clone())?;
    matrix_from_doc(&doc, "matrix")
}

/// Parses the text once as untyped JSON so syntax errors carry a line and
/// column, then returns the top-level object.
fn parse_object(text: &str, kind: &str) -> Result<serde_json::Map<String, Value>> {
    match serde_json::from_str::<Value>(text)? {
        Value::Object(map) => Ok(map),
        _ => Err(Error::InvalidInput(format!("{kind} document must be a JSON object"))),
    }
}

/// Reads a channel document in either the Kraus or the named form.
pub fn channel_from_str(text: &str) -> Result<Channel> {
    let map = parse_object(text, "channel")?;
    if map.contains_key("name") {
        let doc: NamedDoc = serde_json::from_str(text)?;
        return standard_channel(&doc.name, &doc.params, doc.dim);
    }
    let doc: KrausDoc = serde_json::from_str(text)?;
    let kraus = doc
        .kraus
        .iter()
        .enumerate()
        .map(|(i, k)| matrix_from_doc(k, &format!("kraus[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if kraus.is_empty() {
        return Err(Error::InvalidInput("channel needs at least one Kraus operator".into()));
    }
    for (i, k) in kraus.iter().enumerate() {
        if k.dims() != (doc.dim_out, doc.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "kraus[{i}] is {}x{}, expected dim_out x dim_in = {}x{}",
                k.rows(),
                k.cols(),
                doc.dim_out,
                doc.dim_in
            )));
        }
    }
    Channel::new(kraus)
}

pub fn channel_to_value(n: &Channel) -> Value {
    let doc = KrausDoc {
        dim_in: n.dim_in(),
        dim_out: n.dim_out(),
        kraus: n.kraus().iter().map(matrix_doc).collect(),
    };
    serde_json::to_value(doc).expect("channel documents always serialize")
}

/// Reads an algebra document given either by blocks or by generators.
pub fn algebra_from_str(text: &str) -> Result<AlgebraStructure> {
    let map = parse_object(text, "algebra")?;
    if map.contains_key("generators") {
        let doc: GeneratorsDoc = serde_json::from_str(text)?;
        let gens = doc
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| matrix_from_doc(g, &format!("generators[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(d) = gens.first().map(CMatrix::rows) {
            if let Some(i) = gens.iter().position(|g| g.dims() != (d, d)) {
                return Err(Error::DimensionMismatch(format!(
                    "generators[{i}] is {}x{}, expected {d}x{d}",
                    gens[i].rows(),
                    gens[i].cols()
                )));
            }
        }
        let basis = generate_algebra(&gens, GENERATOR_TOL)?;
        return structure_from_basis(&basis, GENERATOR_TOL);
    }
    let doc: BlocksDoc = serde_json::from_str(text)?;
    let blocks = doc
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| Block::new(matrix_from_doc(&b.iso, &format!("blocks[{i}].iso"))?, b.d_a, b.d_b))
        .collect::<Result<Vec<_>>>()?;
    AlgebraStructure::new(doc.ambient_dim, blocks)
}

pub fn algebra_to_value(alg: &AlgebraStructure) -> Value {
    let doc = BlocksDoc {
        ambient_dim: alg.ambient_dim(),
        blocks: alg
            .blocks()
            .iter()
            .map(|b| BlockDoc { iso: matrix_doc(b.iso()), d_a: b.d_a(), d_b: b.d_b() })
            .collect(),
    };
    serde_json::to_value(doc).expect("algebra documents always serialize")
}

/// Reads a code document `{"isometry": V}` with optional dimension checks.
pub fn code_from_str(text: &str) -> Result<SubspaceCode> {
    parse_object(text, "code")?;
    let doc: CodeDoc = serde_json::from_str(text)?;
    let v = matrix_from_doc(&doc.isometry, "isometry")?;
    if doc.dim_code.is_some_and(|k| k != v.cols()) || doc.dim_phys.is_some_and(|n| n != v.rows()) {
        return Err(Error::DimensionMismatch(format!(
            "isometry is {}x{}, declared dim_phys x dim_code = {}x{}",
            v.rows(),
            v.cols(),
            doc.dim_phys.map_or("?".into(), |n| n.to_string()),
            doc.dim_code.map_or("?".into(), |k| k.to_string()),
        )));
    }
    SubspaceCode::new(v)
}

pub fn code_to_value(code: &SubspaceCode) -> Value {
    let doc = CodeDoc {
        dim_code: Some(code.dim_code()),
        dim_phys: Some(code.dim_phys()),
        isometry: matrix_doc(code.isometry()),
    };
    serde_json::to_value(doc).expect("code documents always serialize")
}

pub fn report_to_value(report: &CorrectabilityReport) -> Value {
    serde_json::json!({
        "delta": report.delta,
        "optimal_error": report.optimal_error,
        "exact": report.exact,
        "kl_defect": report.kl_defect,
        "bounds_ok": report.bounds_ok,
        "lower_bound_ok": report.lower_bound_ok,
        "upper_bound_ok": report.upper_bound_ok,
        "recovery": channel_to_value(&report.recovery),
        "tolerances": {
            "exact": report.tolerances.exact,
            "bounds": report.tolerances.bounds,
            "sdp": report.tolerances.sdp,
        },
        "seed": report.seed,
    })
}

/// Compact JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Json(j) => Error::InvalidInput(format!("{}: {j}", path.display())),
        other => other,
    })
}

pub fn load_channel(path: &Path) -> Result<Channel> {
    with_path(path, channel_from_str(&read(path)?))
}

pub fn load_algebra(path: &Path) -> Result<AlgebraStructure> {
    with_path(path, algebra_from_str(&read(path)?))
}

pub fn load_code(path: &Path) -> Result<SubspaceCode> {
    with_path(path, code_from_str(&read(path)?))
}
