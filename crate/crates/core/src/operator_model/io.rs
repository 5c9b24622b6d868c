//! JSON encodings for operator tuples, cluster models and certificates.
//!
//! Floating-point numbers are written with 17 significant digits so every
//! value survives a round trip bit for bit.

use std::io;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use super::{Certificate, ClusterModel, Frame, HermitianTuple, Meta, Mode};
use crate::{Error, Result};

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleFile {
    dimension: usize,
    operators: Vec<OperatorEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorEntry {
    name: String,
    matrix: JsonMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    clusters: Vec<Vec<f64>>,
    support: usize,
    #[serde(default)]
    perturb: Vec<JsonMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    mode: Mode,
    scalars: Vec<f64>,
    residuals: Vec<f64>,
    frame: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[serde(default)]
    meta: Meta,
}

/// Writes every `f64` as `{:.16e}`.
struct PreciseFormatter;

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn from_json<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::MalformedFile(e.to_string()))
}

fn matrix_to_json(m: &DMatrix<Complex64>) -> JsonMatrix {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn matrix_from_json(rows: &JsonMatrix, expected: usize) -> Result<DMatrix<Complex64>> {
    if rows.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: rows.len() });
    }
    for r in rows {
        if r.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: r.len() });
        }
    }
    Ok(DMatrix::from_fn(expected, expected, |j, l| Complex64::new(rows[j][l][0], rows[j][l][1])))
}

pub fn parse_tuple(bytes: &[u8]) -> Result<HermitianTuple> {
    let file: TupleFile = from_json(bytes)?;
    if file.dimension == 0 {
        return Err(Error::MalformedFile("dimension must be at least 1".into()));
    }
    if file.operators.is_empty() {
        return Err(Error::MalformedFile("no operators".into()));
    }
    let mut names = Vec::with_capacity(file.operators.len());
    let mut mats = Vec::with_capacity(file.operators.len());
    for op in &file.operators {
        names.push(op.name.clone());
        mats.push(matrix_from_json(&op.matrix, file.dimension)?);
    }
    HermitianTuple::new(names, mats)
}

pub fn emit_tuple(t: &HermitianTuple) -> String {
    to_json(&TupleFile {
        dimension: t.dim(),
        operators: t
            .names()
            .iter()
            .zip(t.matrices())
            .map(|(name, m)| OperatorEntry { name: name.clone(), matrix: matrix_to_json(m) })
            .collect(),
    })
}

pub fn parse_model(bytes: &[u8]) -> Result<ClusterModel> {
    let file: ModelFile = from_json(bytes)?;
    let perturb = file.perturb.iter().map(|m| matrix_from_json(m, file.support)).collect::<Result<Vec<_>>>()?;
    ClusterModel::new(file.n, file.clusters, file.support, perturb)
}

pub fn emit_model(m: &ClusterModel) -> String {
    let perturb = if m.support() == 0 { Vec::new() } else { m.perturbations().iter().map(matrix_to_json).collect() };
    to_json(&ModelFile { n: m.n(), clusters: m.clusters().to_vec(), support: m.support(), perturb })
}

pub fn parse_certificate(bytes: &[u8]) -> Result<Certificate> {
    let file: CertificateFile = from_json(bytes)?;
    if file.scalars.len() != file.residuals.len() {
        return Err(Error::MalformedFile("scalars and residuals differ in length".into()));
    }
    let cols = file.frame.iter().map(|c| c.iter().map(|z| Complex64::new(z[0], z[1])).collect()).collect();
    let frame = match file.dimension {
        Some(d) => {
            let frame = Frame::finite(d, cols);
            if frame.support_len() > d {
                return Err(Error::DimensionMismatch { expected: d, found: frame.support_len() });
            }
            frame
        }
        None => Frame::lazy(cols),
    };
    Ok(Certificate { mode: file.mode, frame, scalars: file.scalars, residuals: file.residuals, meta: file.meta })
}

pub fn emit_certificate(c: &Certificate) -> String {
    to_json(&CertificateFile {
        mode: c.mode,
        scalars: c.scalars.clone(),
        residuals: c.residuals.clone(),
        frame: c.frame.columns().iter().map(|col| col.iter().map(|z| [z.re, z.im]).collect()).collect(),
        dimension: c.frame.dim(),
        meta: c.meta.clone(),
    })
}

/// Contents of an input file that may hold either a tuple or a model.
#[derive(Debug, Clone)]
pub enum OperatorFile {
    Tuple(HermitianTuple),
    Model(ClusterModel),
}

/// Dispatches on the top-level keys: `dimension` means a tuple, `clusters` a model.
pub fn parse_operator_file(bytes: &[u8]) -> Result<OperatorFile> {
    let value: serde_json::Value = from_json(bytes)?;
    let obj = value.as_object().ok_or_else(|| Error::MalformedFile("expected a JSON object".into()))?;
    if obj.contains_key("dimension") {
        parse_tuple(bytes).map(OperatorFile::Tuple)
    } else if obj.contains_key("clusters") {
        parse_model(bytes).map(OperatorFile::Model)
    } else {
        Err(Error::MalformedFile("neither an operator tuple nor a cluster model".into()))
    }
}
