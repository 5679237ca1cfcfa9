//! Group files.
//!
//! Two JSON layouts are accepted:
//!
//! * a bare list of matrices with floating entries, each entry `[re, im]` or a
//!   plain real number;
//! * `{"root_order": N, "generators": [...]}` with exact entries in `Q(ζ_N)`
//!   written as strings such as `"zeta^3"` or `"-1/2 + zeta"`.

use serde_json::{json, Value};

use super::{generate_group, Cyclotomic, FiniteUnitaryGroup, GroupScalar, Matrix};
use crate::complex::C64;
use crate::error::{Error, Result};

/// Default closure bound for groups read from files.
pub const DEFAULT_MAX_ORDER: usize = 1024;

/// Generators as read from a file.
#[derive(Clone, Debug)]
pub enum GroupInput {
    Exact(Vec<Matrix<Cyclotomic>>),
    Float(Vec<Matrix<C64>>),
}

/// A closed group in either representation.
#[derive(Clone, Debug)]
pub enum AnyGroup {
    Exact(FiniteUnitaryGroup<Cyclotomic>),
    Float(FiniteUnitaryGroup<C64>),
}

impl AnyGroup {
    pub fn order(&self) -> usize {
        match self {
            AnyGroup::Exact(g) => g.order(),
            AnyGroup::Float(g) => g.order(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyGroup::Exact(g) => g.dim(),
            AnyGroup::Float(g) => g.dim(),
        }
    }

    pub fn to_c64(&self) -> FiniteUnitaryGroup<C64> {
        match self {
            AnyGroup::Exact(g) => g.to_c64(),
            AnyGroup::Float(g) => g.clone(),
        }
    }

    pub fn canonical_keys(&self) -> Vec<String> {
        match self {
            AnyGroup::Exact(g) => g.canonical_keys(),
            AnyGroup::Float(g) => g.canonical_keys(),
        }
    }
}

impl GroupInput {
    pub fn generate(&self, max_order: usize) -> Result<AnyGroup> {
        Ok(match self {
            GroupInput::Exact(g) => AnyGroup::Exact(generate_group(g, max_order)?),
            GroupInput::Float(g) => AnyGroup::Float(generate_group(g, max_order)?),
        })
    }
}

fn matrix_rows(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse("matrix must be a list of rows".into()))
}

fn float_entry(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| Error::Parse("bad real part".into()))?;
            let im = a[1].as_f64().ok_or_else(|| Error::Parse("bad imaginary part".into()))?;
            Ok(C64::new(re, im))
        }
        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
    }
}

fn exact_entry(v: &Value, order: u32) -> Result<Cyclotomic> {
    match v {
        Value::String(s) => Cyclotomic::parse(s, order),
        Value::Number(n) => Cyclotomic::parse(&n.to_string(), order),
        other => Err(Error::Parse(format!("bad exact entry {other}"))),
    }
}

fn parse_matrix<F: GroupScalar>(v: &Value, entry: impl Fn(&Value) -> Result<F>) -> Result<Matrix<F>> {
    let rows = matrix_rows(v)?
        .iter()
        .map(|r| matrix_rows(r)?.iter().map(&entry).collect::<Result<Vec<F>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::new(rows)
}

pub fn parse_group_value(v: &Value) -> Result<GroupInput> {
    match v {
        Value::Array(mats) => Ok(GroupInput::Float(
            mats.iter().map(|m| parse_matrix(m, float_entry)).collect::<Result<_>>()?,
        )),
        Value::Object(obj) => {
            let order = obj
                .get("root_order")
                .and_then(Value::as_u64)
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Parse("`root_order` must be a positive integer".into()))? as u32;
            let gens = obj
                .get("generators")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("missing `generators`".into()))?;
            Ok(GroupInput::Exact(
                gens.iter().map(|m| parse_matrix(m, |e| exact_entry(e, order))).collect::<Result<_>>()?,
            ))
        }
        _ => Err(Error::Parse("group file must be a list or an object".into())),
    }
}

pub fn parse_group_str(s: &str) -> Result<GroupInput> {
    parse_group_value(&serde_json::from_str(s)?)
}

pub fn read_group_file(path: &std::path::Path) -> Result<GroupInput> {
    parse_group_str(&std::fs::read_to_string(path)?)
}

/// JSON form of a matrix: exact entries as strings, floating ones as `[re, im]`.
pub fn matrix_to_json<F: GroupScalar>(m: &Matrix<F>) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|x| match x.exact_key() {
                            Some(k) => json!(k),
                            None => {
                                let c = x.to_c64();
                                json!([c.re, c.im])
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_file() {
        let g = parse_group_str(r#"{"root_order": 4, "generators": [[["zeta", "0"], ["0", "zeta"]]]}"#)
            .unwrap()
            .generate(64)
            .unwrap();
        assert_eq!(g.order(), 4);
        assert!(matches!(g, AnyGroup::Exact(_)));
    }

    #[test]
    fn parses_float_file() {
        let g = parse_group_str("[[[[-1, 0], 0], [0, [1, 0]]]]").unwrap().generate(64).unwrap();
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_group_str(r#"{"generators": []}"#).is_err());
        assert!(parse_group_str(r#"[[[1, 0]]]"#).is_err());
        assert!(parse_group_str("3").is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = super::super::diagonal_roots(3, &[1, 2]);
        let v = json!({"root_order": 3, "generators": [matrix_to_json(&m)]});
        match parse_group_value(&v).unwrap() {
            GroupInput::Exact(g) => assert_eq!(g[0], m),
            GroupInput::Float(_) => panic!("expected exact input"),
        }
    }
}
