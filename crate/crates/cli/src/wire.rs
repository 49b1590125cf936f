//! JSON shapes for rationals, polyhedra, functions and maps.

use std::fmt;

use polycalc::arith::{format_rational, parse_rational};
use polycalc::functions::PolyhedralFunction;
use polycalc::setvalued::PolyMap;
use polycalc::{ExtendedRational, HPolyhedron, QMatrix, QVector, Rational};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type WireResult<T> = std::result::Result<T, String>;

/// A rational written as `"p/q"`. Reads bare integers and `"p"` as well.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct QVisitor;

impl Visitor<'_> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a rational string \"p/q\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
        Ok(Q(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
        Ok(Q(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
        Err(E::custom(format!(
            "floating-point number {v} is not an exact rational"
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        parse_rational(v).map(Q).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(QVisitor)
    }
}

pub fn vec_in(v: &[Q]) -> QVector {
    v.iter().map(|q| q.0.clone()).collect()
}

pub fn vec_out(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

pub fn ext_out(v: &ExtendedRational) -> String {
    match v {
        ExtendedRational::Finite(q) => format_rational(q),
        other => other.to_string(),
    }
}

pub fn matrix_in(rows: &[Vec<Q>], ncols: usize, what: &str) -> WireResult<QMatrix> {
    if let Some(r) = rows.iter().find(|r| r.len() != ncols) {
        return Err(format!(
            "{what}: row of length {} where {ncols} columns are expected",
            r.len()
        ));
    }
    QMatrix::from_rows(ncols, rows.iter().map(|r| vec_in(r)).collect())
        .map_err(|e| format!("{what}: {e}"))
}

pub fn matrix_out(m: &QMatrix) -> Vec<Vec<Q>> {
    m.rows_iter().map(vec_out).collect()
}

pub fn expect_len(v: &[Q], n: usize, what: &str) -> WireResult<QVector> {
    if v.len() != n {
        return Err(format!("{what}: length {} where {n} is expected", v.len()));
    }
    Ok(vec_in(v))
}

/// `{x : A x ≤ b, E x = e}`. `dim` is only needed when there are no rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Poly {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(rename = "A", default)]
    pub a: Vec<Vec<Q>>,
    #[serde(default)]
    pub b: Vec<Q>,
    #[serde(rename = "E", default)]
    pub e_rows: Vec<Vec<Q>>,
    #[serde(default)]
    pub e: Vec<Q>,
}

impl Poly {
    pub fn width(&self) -> Option<usize> {
        self.dim
            .or_else(|| self.a.first().or(self.e_rows.first()).map(Vec::len))
    }

    pub fn to_core(&self, what: &str) -> WireResult<HPolyhedron> {
        let n = self
            .width()
            .ok_or_else(|| format!("{what}: no rows, so \"dim\" is required"))?;
        let a = matrix_in(&self.a, n, what)?;
        let e = matrix_in(&self.e_rows, n, what)?;
        HPolyhedron::new(n, a, vec_in(&self.b), e, vec_in(&self.e))
            .map_err(|err| format!("{what}: {err}"))
    }

    pub fn from_core(p: &HPolyhedron) -> Self {
        Poly {
            dim: (p.num_ineq() == 0 && p.num_eq() == 0).then_some(p.dim()),
            a: matrix_out(p.ineq()),
            b: vec_out(p.ineq_rhs()),
            e_rows: matrix_out(p.eq()),
            e: vec_out(p.eq_rhs()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub c: Vec<Q>,
    pub d: Q,
}

/// `max_i ⟨c_i, x⟩ + d_i` on `domain`; a missing domain is the whole space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Function {
    pub pieces: Vec<Piece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Poly>,
}

impl Function {
    pub fn to_core(&self, what: &str) -> WireResult<PolyhedralFunction> {
        let n = self
            .pieces
            .first()
            .map(|p| p.c.len())
            .ok_or_else(|| format!("{what}: at least one piece is required"))?;
        let mut pieces = Vec::new();
        for p in &self.pieces {
            pieces.push((expect_len(&p.c, n, what)?, p.d.0.clone()));
        }
        let domain = match &self.domain {
            Some(d) => d.to_core(&format!("{what}.domain"))?,
            None => HPolyhedron::universe(n),
        };
        PolyhedralFunction::new(n, pieces, domain).map_err(|e| format!("{what}: {e}"))
    }

    pub fn from_core(f: &PolyhedralFunction) -> Self {
        let d = f.domain();
        Function {
            pieces: f
                .pieces()
                .iter()
                .map(|(c, d)| Piece {
                    c: vec_out(c),
                    d: Q(d.clone()),
                })
                .collect(),
            domain: (d.num_ineq() + d.num_eq() > 0).then(|| Poly::from_core(d)),
        }
    }
}

/// A set-valued map `R^nx ⇉ R^ny` given by its graph in `R^(nx+ny)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Map {
    pub nx: usize,
    pub ny: usize,
    pub graph: Poly,
}

impl Map {
    pub fn to_core(&self, what: &str) -> WireResult<PolyMap> {
        let mut graph = self.graph.clone();
        graph.dim.get_or_insert(self.nx + self.ny);
        let g = graph.to_core(&format!("{what}.graph"))?;
        PolyMap::new(self.nx, self.ny, g).map_err(|e| format!("{what}: {e}"))
    }

    pub fn from_core(m: &PolyMap) -> Self {
        Map {
            nx: m.nx(),
            ny: m.ny(),
            graph: Poly::from_core(m.graph()),
        }
    }
}
