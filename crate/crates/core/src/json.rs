//! JSON shapes shared by the library and the command line.
//!
//! Rationals always travel as `"p/q"` strings. Matrices are
//! `{"n": 3, "entries": [["1/3", "-1/1", ...], ...]}` (row-major) and
//! polytopes `{"n": 2, "vertices": [["0/1", "2/1"], ...]}`.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};
use crate::polytope::VPolytope;
use crate::rational::{parse, to_canonical, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub n: usize,
    pub vertices: Vec<Vec<String>>,
}

pub fn vector_strings(v: &QVector) -> Vec<String> {
    v.iter().map(to_canonical).collect()
}

pub fn parse_vector(xs: &[String]) -> Result<QVector> {
    xs.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>().map(QVector)
}

impl From<&QMatrix> for MatrixJson {
    fn from(m: &QMatrix) -> Self {
        MatrixJson {
            n: m.n(),
            entries: m.rows().iter().map(vector_strings).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for QMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<QMatrix> {
        if j.entries.len() != j.n {
            return Err(Error::DimensionMismatch {
                expected: j.n,
                got: j.entries.len(),
            });
        }
        let rows = j.entries.iter().map(|r| parse_vector(r)).collect::<Result<Vec<_>>>()?;
        QMatrix::from_rows(rows)
    }
}

impl From<&VPolytope> for PolytopeJson {
    fn from(p: &VPolytope) -> Self {
        PolytopeJson {
            n: p.n(),
            vertices: p.vertices().iter().map(vector_strings).collect(),
        }
    }
}

impl TryFrom<&PolytopeJson> for VPolytope {
    type Error = Error;

    fn try_from(j: &PolytopeJson) -> Result<VPolytope> {
        let vertices = j.vertices.iter().map(|v| parse_vector(v)).collect::<Result<Vec<_>>>()?;
        if let Some(v) = vertices.iter().find(|v| v.len() != j.n) {
            return Err(Error::DimensionMismatch {
                expected: j.n,
                got: v.len(),
            });
        }
        VPolytope::new(vertices)
    }
}

pub fn ser_rational<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_canonical(x))
}

pub fn ser_vector<S: Serializer>(v: &QVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    vector_strings(v).serialize(s)
}

pub fn ser_matrix<S: Serializer>(m: &QMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    MatrixJson::from(m).serialize(s)
}

pub fn ser_polytope<S: Serializer>(p: &VPolytope, s: S) -> std::result::Result<S::Ok, S::Error> {
    PolytopeJson::from(p).serialize(s)
}
