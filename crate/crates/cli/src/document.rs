//! TOML interchange documents: root systems, root data, superalgebras and reports.
//!
//! Rationals are strings (`"3"`, `"-1/2"`); vectors and matrix rows are
//! comma-separated strings (`"1,-1,0"`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use superdatum::grs::{Grs, Parity};
use superdatum::lattice::{
    quotient_lattice, DualityPairing, Lattice, LatticeVector, RationalForm, ZMatrix,
};
use superdatum::linalg::{fmt_q, parse_q, Matrix, Q};
use superdatum::rootdatum::RootDatum;
use superdatum::superalgebra::SuperAlgebra;

use crate::report::Report;

pub const FORMAT_VERSION: i64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Grs(Grs),
    RootDatum(RootDatum),
    SuperAlgebra(SuperAlgebra),
    Report(Report),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Grs(_) => "grs",
            Document::RootDatum(_) => "rootdatum",
            Document::SuperAlgebra(_) => "superalgebra",
            Document::Report(_) => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DocError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    Schema {
        field: String,
        message: String,
    },
    Version {
        found: i64,
    },
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocError::Syntax {
                line,
                column,
                message,
            } => {
                write!(f, "syntax error at line {line}, column {column}: {message}")
            }
            DocError::Schema { field, message } => {
                write!(f, "schema error in `{field}`: {message}")
            }
            DocError::Version { found } => {
                write!(f, "unsupported format_version {found} (this build reads version {FORMAT_VERSION})")
            }
        }
    }
}

impl std::error::Error for DocError {}

fn schema(field: impl Into<String>, message: impl Into<String>) -> DocError {
    DocError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn syntax(text: &str, err: &toml::de::Error) -> DocError {
    let offset = err.span().map_or(0, |s| s.start).min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    DocError::Syntax {
        line,
        column,
        message: err.message().trim().to_string(),
    }
}

/// Maps a serde error inside `section` to a schema error naming the field.
fn section_error(section: &str, err: toml::de::Error) -> DocError {
    let msg = err.message().trim().to_string();
    let field = msg
        .split('`')
        .nth(1)
        .map_or_else(|| section.to_string(), |name| format!("{section}.{name}"));
    schema(field, msg)
}

// ---------------------------------------------------------------------------
// Rows

pub fn fmt_row(v: &[Q]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}

pub fn fmt_zrow(v: &[BigInt]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_row(s: &str, field: &str) -> Result<Vec<Q>, DocError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            parse_q(x.trim())
                .ok_or_else(|| schema(field, format!("{:?} is not a rational", x.trim())))
        })
        .collect()
}

pub fn parse_zrow(s: &str, field: &str) -> Result<Vec<BigInt>, DocError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|_| schema(field, format!("{:?} is not an integer", x.trim())))
        })
        .collect()
}

fn sized(v: Vec<Q>, n: usize, field: &str) -> Result<Vec<Q>, DocError> {
    if v.len() != n {
        return Err(schema(
            field,
            format!("expected {n} entries, found {}", v.len()),
        ));
    }
    Ok(v)
}

fn zsized(v: Vec<BigInt>, n: usize, field: &str) -> Result<Vec<BigInt>, DocError> {
    if v.len() != n {
        return Err(schema(
            field,
            format!("expected {n} entries, found {}", v.len()),
        ));
    }
    Ok(v)
}

fn parse_matrix(rows: &[String], n: usize, field: &str) -> Result<Matrix, DocError> {
    if rows.len() != n {
        return Err(schema(
            field,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let f = format!("{field}[{i}]");
            sized(parse_row(r, &f)?, n, &f)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows, n))
}

fn parse_zmatrix(
    rows: &[String],
    nrows: usize,
    ncols: usize,
    field: &str,
) -> Result<ZMatrix, DocError> {
    if rows.len() != nrows {
        return Err(schema(
            field,
            format!("expected {nrows} rows, found {}", rows.len()),
        ));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let f = format!("{field}[{i}]");
            zsized(parse_zrow(r, &f)?, ncols, &f)
        })
        .collect()
}

fn parse_form(rows: &[String], n: usize, field: &str) -> Result<RationalForm, DocError> {
    RationalForm::new(parse_matrix(rows, n, field)?).map_err(|e| schema(field, e.to_string()))
}

fn matrix_rows(m: &Matrix) -> Vec<String> {
    m.to_rows().iter().map(|r| fmt_row(r)).collect()
}

// ---------------------------------------------------------------------------
// Raw forms

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrs {
    dim: usize,
    form: Vec<String>,
    #[serde(default)]
    even: Vec<String>,
    #[serde(default)]
    odd: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    ambient_rank: usize,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    projection: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    section: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEven {
    root: String,
    coroot: String,
}

fn one() -> usize {
    1
}

fn is_one(m: &usize) -> bool {
    *m == 1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOdd {
    root: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    multiplicity: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatum {
    rank: usize,
    x: RawLattice,
    x_dual: RawLattice,
    pairing: Vec<String>,
    form: Vec<String>,
    #[serde(default)]
    even: Vec<RawEven>,
    #[serde(default)]
    odd: Vec<RawOdd>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    name: String,
    labels: Vec<String>,
    parity: Vec<String>,
    /// `"i,j,k,c"`: the bracket of basis elements `i ≤ j` has coefficient `c` on `k`.
    #[serde(default)]
    constants: Vec<String>,
    #[serde(default)]
    cartan: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cartan_coords: Option<Vec<String>>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: i64,
    kind: &'a str,
    #[serde(flatten)]
    body: BTreeMap<&'a str, T>,
}

// ---------------------------------------------------------------------------
// Conversions

fn grs_to_raw(g: &Grs) -> RawGrs {
    RawGrs {
        dim: g.dim(),
        form: matrix_rows(g.form().matrix()),
        even: g.even().map(|v| fmt_row(v)).collect(),
        odd: g.odd().map(|v| fmt_row(v)).collect(),
    }
}

fn grs_from_raw(r: RawGrs) -> Result<Grs, DocError> {
    let form = parse_form(&r.form, r.dim, "grs.form")?;
    let mut roots = Vec::new();
    for (name, rows, parity) in [
        ("even", &r.even, Parity::Even),
        ("odd", &r.odd, Parity::Odd),
    ] {
        for (i, row) in rows.iter().enumerate() {
            let field = format!("grs.{name}[{i}]");
            let v = sized(parse_row(row, &field)?, r.dim, &field)?;
            if v.iter().all(|x| *x == Q::from_integer(0.into())) {
                return Err(schema(field, "zero vector is not a root"));
            }
            roots.push((v, parity));
        }
    }
    Grs::new(form, roots).map_err(|e| schema("grs", e.to_string()))
}

fn lattice_to_raw(l: &Lattice) -> RawLattice {
    RawLattice {
        ambient_rank: l.ambient_rank(),
        relations: l.relations().iter().map(|r| fmt_zrow(r)).collect(),
        projection: Some(l.projection().iter().map(|r| fmt_zrow(r)).collect()),
        section: Some(l.section().iter().map(|r| fmt_zrow(r)).collect()),
    }
}

fn lattice_from_raw(r: RawLattice, field: &str) -> Result<Lattice, DocError> {
    let a = r.ambient_rank;
    let relations = r
        .relations
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let f = format!("{field}.relations[{i}]");
            zsized(parse_zrow(s, &f)?, a, &f)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let base = quotient_lattice(a, &relations)
        .map_err(|e| schema(format!("{field}.relations"), e.to_string()))?;
    match (r.projection, r.section) {
        (None, None) => Ok(base),
        (Some(p), Some(s)) => {
            let k = base.rank();
            let p = parse_zmatrix(&p, k, a, &format!("{field}.projection"))?;
            let s = parse_zmatrix(&s, k, a, &format!("{field}.section"))?;
            Lattice::from_parts(a, relations, p, s).map_err(|e| schema(field, e.to_string()))
        }
        (Some(_), None) => Err(schema(
            format!("{field}.section"),
            "required together with projection",
        )),
        (None, Some(_)) => Err(schema(
            format!("{field}.projection"),
            "required together with section",
        )),
    }
}

fn datum_to_raw(d: &RootDatum) -> RawDatum {
    RawDatum {
        rank: d.rank(),
        x: lattice_to_raw(d.x()),
        x_dual: lattice_to_raw(d.x_dual()),
        pairing: d.pairing().0.iter().map(|r| fmt_zrow(r)).collect(),
        form: matrix_rows(d.form().matrix()),
        even: d
            .even_roots()
            .into_iter()
            .map(|(a, c)| RawEven {
                root: fmt_zrow(&a.0),
                coroot: fmt_zrow(&c.0),
            })
            .collect(),
        odd: d
            .odd_roots()
            .into_iter()
            .map(|(g, m)| RawOdd {
                root: fmt_zrow(&g.0),
                multiplicity: m,
            })
            .collect(),
    }
}

fn datum_from_raw(r: RawDatum) -> Result<RootDatum, DocError> {
    let x = lattice_from_raw(r.x, "rootdatum.x")?;
    let x_dual = lattice_from_raw(r.x_dual, "rootdatum.x_dual")?;
    let k = r.rank;
    if x.rank() != k {
        return Err(schema(
            "rootdatum.x",
            format!("lattice has rank {}, header says {k}", x.rank()),
        ));
    }
    if x_dual.rank() != k {
        return Err(schema(
            "rootdatum.x_dual",
            format!("lattice has rank {}, header says {k}", x_dual.rank()),
        ));
    }
    let pairing = DualityPairing(parse_zmatrix(&r.pairing, k, k, "rootdatum.pairing")?);
    let form = parse_form(&r.form, k, "rootdatum.form")?;
    let even = r
        .even
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let fr = format!("rootdatum.even[{i}].root");
            let fc = format!("rootdatum.even[{i}].coroot");
            let a = zsized(parse_zrow(&e.root, &fr)?, x.ambient_rank(), &fr)?;
            let c = zsized(parse_zrow(&e.coroot, &fc)?, x_dual.ambient_rank(), &fc)?;
            Ok((LatticeVector(a), LatticeVector(c)))
        })
        .collect::<Result<Vec<_>, DocError>>()?;
    let odd = r
        .odd
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let f = format!("rootdatum.odd[{i}].root");
            let g = zsized(parse_zrow(&o.root, &f)?, x.ambient_rank(), &f)?;
            if o.multiplicity == 0 {
                return Err(schema(
                    format!("rootdatum.odd[{i}].multiplicity"),
                    "must be at least 1",
                ));
            }
            Ok((LatticeVector(g), o.multiplicity))
        })
        .collect::<Result<Vec<_>, DocError>>()?;
    RootDatum::new(x, x_dual, pairing, form, even, odd)
        .map_err(|e| schema("rootdatum", e.to_string()))
}

fn algebra_to_raw(a: &SuperAlgebra) -> RawAlgebra {
    RawAlgebra {
        name: a.name().to_string(),
        labels: a.labels().to_vec(),
        parity: a.parities().iter().map(ToString::to_string).collect(),
        constants: a
            .constants()
            .iter()
            .map(|(i, j, k, c)| format!("{i},{j},{k},{}", fmt_q(c)))
            .collect(),
        cartan: a.cartan().to_vec(),
        cartan_coords: a
            .cartan_coords()
            .map(|cc| cc.iter().map(|r| fmt_row(r)).collect()),
    }
}

fn algebra_from_raw(r: RawAlgebra) -> Result<SuperAlgebra, DocError> {
    let n = r.labels.len();
    if r.parity.len() != n {
        return Err(schema(
            "superalgebra.parity",
            format!("expected {n} entries, found {}", r.parity.len()),
        ));
    }
    let parity = r
        .parity
        .iter()
        .enumerate()
        .map(|(i, p)| match p.as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(schema(
                format!("superalgebra.parity[{i}]"),
                format!("{other:?} is not even|odd"),
            )),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut constants = Vec::with_capacity(r.constants.len());
    for (i, s) in r.constants.iter().enumerate() {
        let field = format!("superalgebra.constants[{i}]");
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, k, c] = parts[..] else {
            return Err(schema(field, "expected \"i,j,k,c\""));
        };
        let idx = |x: &str| {
            x.parse::<usize>()
                .ok()
                .filter(|&v| v < n)
                .ok_or_else(|| schema(&field, format!("{x:?} is not a basis index below {n}")))
        };
        let c = parse_q(c).ok_or_else(|| schema(&field, format!("{c:?} is not a rational")))?;
        constants.push((idx(a)?, idx(b)?, idx(k)?, c));
    }
    let coords = match &r.cartan_coords {
        None => None,
        Some(rows) => Some(
            rows.iter()
                .enumerate()
                .map(|(i, s)| parse_row(s, &format!("superalgebra.cartan_coords[{i}]")))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    SuperAlgebra::new(r.name, r.labels, parity, constants, r.cartan, coords)
        .map_err(|e| schema("superalgebra", e.to_string()))
}

// ---------------------------------------------------------------------------
// Entry points

fn section<T: DeserializeOwned>(value: toml::Value, name: &str) -> Result<T, DocError> {
    value.try_into::<T>().map_err(|e| section_error(name, e))
}

pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| syntax(text, &e))?;
    let version = match table.get("format_version") {
        None => return Err(schema("format_version", "missing")),
        Some(toml::Value::Integer(v)) => *v,
        Some(_) => return Err(schema("format_version", "must be an integer")),
    };
    if version != FORMAT_VERSION {
        return Err(DocError::Version { found: version });
    }
    let kind = match table.get("kind") {
        None => return Err(schema("kind", "missing")),
        Some(toml::Value::String(k)) => k.clone(),
        Some(_) => return Err(schema("kind", "must be a string")),
    };
    if !["grs", "rootdatum", "superalgebra", "report"].contains(&kind.as_str()) {
        return Err(schema(
            "kind",
            format!("{kind:?} is not grs|rootdatum|superalgebra|report"),
        ));
    }
    for key in table.keys() {
        if key != "format_version" && key != "kind" && *key != kind {
            return Err(schema(key.as_str(), "unknown field"));
        }
    }
    let body = table
        .get(&kind)
        .cloned()
        .ok_or_else(|| schema(kind.as_str(), "missing section"))?;
    Ok(match kind.as_str() {
        "grs" => Document::Grs(grs_from_raw(section(body, "grs")?)?),
        "rootdatum" => Document::RootDatum(datum_from_raw(section(body, "rootdatum")?)?),
        "superalgebra" => Document::SuperAlgebra(algebra_from_raw(section(body, "superalgebra")?)?),
        _ => Document::Report(section(body, "report")?),
    })
}

fn envelope<T: Serialize>(kind: &str, body: T) -> String {
    let env = Envelope {
        format_version: FORMAT_VERSION,
        kind,
        body: BTreeMap::from([(kind, body)]),
    };
    toml::to_string(&env).expect("documents serialize")
}

pub fn serialize(doc: &Document) -> String {
    match doc {
        Document::Grs(g) => envelope("grs", grs_to_raw(g)),
        Document::RootDatum(d) => envelope("rootdatum", datum_to_raw(d)),
        Document::SuperAlgebra(a) => envelope("superalgebra", algebra_to_raw(a)),
        Document::Report(r) => envelope("report", r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use superdatum::catalog::{build_grs, Family};
    use superdatum::superalgebra::gl;

    #[test]
    fn grs_round_trip() {
        let g = build_grs(&Family::A { m: 1, n: 1 }).unwrap();
        let text = serialize(&Document::Grs(g.clone()));
        let back = parse_document(&text).unwrap();
        assert_eq!(back, Document::Grs(g));
        let Document::Grs(g) = back else {
            unreachable!()
        };
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn algebra_round_trip() {
        let a = gl(2, 1).unwrap();
        let back = parse_document(&serialize(&Document::SuperAlgebra(a.clone()))).unwrap();
        assert_eq!(back, Document::SuperAlgebra(a));
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_document("format_version = 1\nkind = \"grs\n").unwrap_err();
        assert!(matches!(err, DocError::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn unknown_fields_are_named() {
        let text =
            "format_version = 1\nkind = \"grs\"\n[grs]\ndim = 1\nform = [\"1\"]\ncolour = 3\n";
        let err = parse_document(text).unwrap_err();
        assert!(
            matches!(&err, DocError::Schema { field, .. } if field == "grs.colour"),
            "{err}"
        );
        let text =
            "format_version = 1\nkind = \"grs\"\nextra = 1\n[grs]\ndim = 1\nform = [\"1\"]\n";
        assert!(
            matches!(parse_document(text).unwrap_err(), DocError::Schema { field, .. } if field == "extra")
        );
    }

    #[test]
    fn version_checked() {
        let text = "format_version = 7\nkind = \"grs\"\n[grs]\ndim = 1\nform = [\"1\"]\n";
        assert_eq!(
            parse_document(text).unwrap_err(),
            DocError::Version { found: 7 }
        );
    }
}
