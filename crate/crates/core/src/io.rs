//! JSON formats.
//!
//! A matrix object is `{"layout": [factor, ...], "matrix": [[[re, im], ...], ...]}`
//! with rows in row-major order. Floats are written with the shortest
//! representation that parses back to the same `f64`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::process::{ChoiMap, Instrument, MapKind, ProcessMatrix};
use crate::tensor::{Factor, HermOp, SiteRef, Space, SpaceLayout, SuperOp};
use crate::{CMatrix, Complex64, Error, Result};

/// Serialized form of a [`HermOp`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub layout: Vec<Factor>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&HermOp> for MatrixJson {
    fn from(op: &HermOp) -> Self {
        let m = op.entries();
        Self {
            layout: op.layout().factors().to_vec(),
            matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for HermOp {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let layout = SpaceLayout::new(json.layout)?;
        HermOp::new(layout, rows_to_matrix(&json.matrix)?)
    }
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl Serialize for HermOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermOp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        HermOp::try_from(MatrixJson::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SuperOpJson {
    domain: Space,
    codomain: Space,
    matrix: Vec<Vec<f64>>,
}

impl Serialize for SuperOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.matrix;
        SuperOpJson {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperOp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = SuperOpJson::deserialize(d)?;
        let cols = json.matrix.first().map_or(json.domain.dim(), Vec::len);
        if json.matrix.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged superoperator matrix"));
        }
        let matrix = nalgebra::DMatrix::from_fn(json.matrix.len(), cols, |i, j| json.matrix[i][j]);
        SuperOp::new(json.domain, json.codomain, matrix).map_err(D::Error::custom)
    }
}

/// One site of a process file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteDecl {
    pub site: String,
    pub d_in: usize,
    pub d_out: usize,
    #[serde(default = "one")]
    pub trial: usize,
}

fn one() -> usize {
    1
}

/// A process file: a matrix object plus its site declarations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProcessJson {
    #[serde(flatten)]
    pub op: MatrixJson,
    pub sites: Vec<SiteDecl>,
}

impl ProcessJson {
    pub fn new(w: &HermOp) -> Result<Self> {
        let layout = w.layout();
        let sites = layout
            .site_refs()
            .into_iter()
            .map(|s| {
                let (d_in, d_out) = layout.site_dims(&s)?;
                Ok(SiteDecl { site: s.site, d_in, d_out, trial: s.trial })
            })
            .collect::<Result<_>>()?;
        Ok(Self { op: MatrixJson::from(w), sites })
    }

    /// The operator and its declared sites, checked against the layout.
    pub fn into_parts(self) -> Result<(HermOp, Vec<SiteRef>)> {
        let op = HermOp::try_from(self.op)?;
        let mut refs = Vec::with_capacity(self.sites.len());
        for s in &self.sites {
            let r = SiteRef::new(s.site.clone(), s.trial);
            let dims = op.layout().site_dims(&r)?;
            if dims != (s.d_in, s.d_out) {
                return Err(Error::SiteMismatch(format!("site {r} declared {:?}, layout has {dims:?}", (s.d_in, s.d_out))));
            }
            refs.push(r);
        }
        Ok((op, refs))
    }
}

/// One element of an instrument file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub outcome: usize,
    #[serde(flatten)]
    pub op: MatrixJson,
}

pub fn instrument_to_json(ins: &Instrument) -> Vec<OutcomeJson> {
    ins.outcomes.iter().enumerate().map(|(k, m)| OutcomeJson { outcome: k, op: MatrixJson::from(&m.op) }).collect()
}

/// Reads instrument elements, ordered by their `outcome` field.
pub fn instrument_from_json(mut items: Vec<OutcomeJson>) -> Result<Instrument> {
    items.sort_by_key(|o| o.outcome);
    let outcomes = items
        .into_iter()
        .map(|o| ChoiMap::new(HermOp::try_from(o.op)?, MapKind::Cp))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(outcomes)
}

impl Serialize for Instrument {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        instrument_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Instrument {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        instrument_from_json(Vec::<OutcomeJson>::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// Reads a process file without enforcing validity.
pub fn read_process(path: impl AsRef<Path>) -> Result<(ProcessMatrix, Vec<SiteRef>)> {
    let json: ProcessJson = read_json(path)?;
    let (op, sites) = json.into_parts()?;
    Ok((ProcessMatrix::unchecked(op), sites))
}

pub fn write_process(path: impl AsRef<Path>, w: &HermOp) -> Result<()> {
    write_json(path, &ProcessJson::new(w)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<HermOp> {
    read_json(path)
}

pub fn write_matrix(path: impl AsRef<Path>, op: &HermOp) -> Result<()> {
    write_json(path, op)
}

/// Keyed elements of a trial sequence file.
pub type ElementMap = BTreeMap<usize, HermOp>;

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}
