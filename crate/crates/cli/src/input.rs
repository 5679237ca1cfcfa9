use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use berg_core::C64;
use serde_json::Value;

/// A point given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<C64>);

/// Exponents given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct Exponents(pub Vec<u32>);

pub fn parse_point_arg(s: &str) -> Result<Point> {
    parse_point(s).map(Point)
}

pub fn parse_exponents(s: &str) -> Result<Exponents> {
    parse_u32_list(s).map(Exponents)
}

/// `a+bi` components separated by commas.
pub fn parse_point(s: &str) -> Result<Vec<C64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            C64::from_str(t).map_err(|_| anyhow!("bad complex number `{t}`"))
        })
        .collect()
}

pub fn parse_complex(s: &str) -> Result<C64> {
    C64::from_str(s.trim()).map_err(|_| anyhow!("bad complex number `{s}`"))
}

pub fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|t| t.trim().parse::<u32>().with_context(|| format!("bad exponent `{t}`"))).collect()
}

pub fn read_json(path: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing {}", path.display()))
}

/// `[re, im]` or a plain number.
pub fn json_complex(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().ok_or_else(|| anyhow!("bad number"))?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(C64::new(
            a[0].as_f64().ok_or_else(|| anyhow!("bad real part"))?,
            a[1].as_f64().ok_or_else(|| anyhow!("bad imaginary part"))?,
        )),
        Value::String(s) => parse_complex(s),
        other => bail!("bad complex value {other}"),
    }
}

pub fn json_point(v: &Value) -> Result<Vec<C64>> {
    v.as_array().ok_or_else(|| anyhow!("point must be a list"))?.iter().map(json_complex).collect()
}

/// `[[z, w], …]` with points as lists of complex values.
pub fn json_pairs(v: &Value) -> Result<Vec<(Vec<C64>, Vec<C64>)>> {
    v.as_array()
        .ok_or_else(|| anyhow!("pairs file must be a list"))?
        .iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([z, w]) => Ok((json_point(z)?, json_point(w)?)),
            _ => bail!("each pair must be [z, w]"),
        })
        .collect()
}

/// `[[z, K], …]` with real `K`.
pub fn json_samples(v: &Value) -> Result<Vec<(Vec<C64>, f64)>> {
    v.as_array()
        .ok_or_else(|| anyhow!("sample file must be a list"))?
        .iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([z, k]) => Ok((json_point(z)?, k.as_f64().ok_or_else(|| anyhow!("K must be real"))?)),
            _ => bail!("each sample must be [z, K]"),
        })
        .collect()
}

pub fn fmt_point(p: &[C64]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("0.1+0.2i, -0.3").unwrap(), vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.0)]);
        assert!(parse_point("x").is_err());
        assert_eq!(parse_u32_list("1,2").unwrap(), vec![1, 2]);
    }

    #[test]
    fn json_inputs_parse() {
        let v: Value = serde_json::from_str(r#"[[[[0.1, 0.2]], [0.3]]]"#).unwrap();
        let p = json_pairs(&v).unwrap();
        assert_eq!(p[0].0, vec![C64::new(0.1, 0.2)]);
        let s: Value = serde_json::from_str(r#"[[[0.5], 2.0]]"#).unwrap();
        assert_eq!(json_samples(&s).unwrap()[0].1, 2.0);
    }
}
