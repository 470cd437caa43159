//! Text formats: fans, bundles, sections, cones and cycles, and a JSON
//! writer that prints every float with 17 significant digits.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::bundles::{Section, SplitBundle, TDivisor};
use crate::decomposition::CycleClass;
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::lattice::IVec;
use crate::numeric::{CPoly, C64};

/// Which shorthand bundle notation applies to a fan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FanKind {
    Plane,
    ProductOfLines(usize),
    Hirzebruch(i64),
    Custom,
}

#[derive(Debug, Clone)]
pub struct NamedFan {
    pub fan: Arc<Fan>,
    pub kind: FanKind,
    pub name: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FanDoc {
    n: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

fn read_if_path(spec: &str) -> Result<String> {
    let p = Path::new(spec);
    if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| Error::Malformed(format!("{spec}: {e}")))
    } else {
        Ok(spec.to_string())
    }
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Malformed(format!("{what}: {e} (line {}, column {})", e.line(), e.column()))
}

pub fn fan_from_json(text: &str) -> Result<Fan> {
    let doc: FanDoc = serde_json::from_str(text).map_err(|e| json_error("fan document", e))?;
    let rays: Vec<IVec> = doc
        .rays
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    Fan::new(doc.n, rays, doc.max_cones)
}

/// `P2`, `P1xP1`, `P1xP1xP1`, `Hirzebruch(a)`, inline JSON or a path to a
/// JSON document.
pub fn parse_fan(spec: &str) -> Result<NamedFan> {
    let s = spec.trim();
    let named = |fan: Fan, kind| NamedFan {
        fan: Arc::new(fan),
        kind,
        name: s.to_string(),
    };
    match s {
        "P2" => return Ok(named(Fan::projective_plane(), FanKind::Plane)),
        "P1xP1" => return Ok(named(Fan::product_of_lines(2), FanKind::ProductOfLines(2))),
        "P1xP1xP1" => return Ok(named(Fan::product_of_lines(3), FanKind::ProductOfLines(3))),
        _ => {}
    }
    if let Some(inner) = s.strip_prefix("Hirzebruch(").and_then(|r| r.strip_suffix(')')) {
        let a: i64 = inner
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad Hirzebruch parameter {inner:?} at position 11")))?;
        if a < 0 {
            return Err(Error::Malformed("Hirzebruch parameter must be nonnegative".into()));
        }
        return Ok(named(Fan::hirzebruch(a), FanKind::Hirzebruch(a)));
    }
    let text = read_if_path(s)?;
    if !text.trim_start().starts_with('{') {
        return Err(Error::Malformed(format!(
            "unknown fan {s:?}; expected P2, P1xP1, P1xP1xP1, Hirzebruch(a), JSON or a file"
        )));
    }
    Ok(NamedFan {
        fan: Arc::new(fan_from_json(&text)?),
        kind: FanKind::Custom,
        name: "custom".into(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DivisorDoc {
    k: BTreeMap<String, i64>,
}

fn divisor_from_doc(fan: &Fan, doc: &DivisorDoc) -> Result<TDivisor> {
    let mut k = vec![0i64; fan.rays().len()];
    for (key, &v) in &doc.k {
        let i: usize = key
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("ray index {key:?} is not an integer")))?;
        if i >= k.len() {
            return Err(Error::Malformed(format!("ray index {i} out of range")));
        }
        k[i] = v;
    }
    Ok(TDivisor::from_i64(&k))
}

fn parse_ints(s: &str, offset: usize) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for part in s.split(',') {
        let t = part.trim();
        out.push(
            t.parse()
                .map_err(|_| Error::Malformed(format!("expected an integer at position {pos}, found {t:?}")))?,
        );
        pos += part.len() + 1;
    }
    Ok(out)
}

fn shorthand_divisor(nf: &NamedFan, tok: &str, offset: usize) -> Result<TDivisor> {
    let r = nf.fan.rays().len();
    let t = tok.trim();
    let t = t.strip_prefix('O').filter(|x| x.starts_with('(')).unwrap_or(t);
    if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        let k = parse_ints(inner, offset + 1)?;
        if k.len() != r {
            return Err(Error::Malformed(format!(
                "divisor at position {offset} has {} coefficients, the fan has {r} rays",
                k.len()
            )));
        }
        return Ok(TDivisor::from_i64(&k));
    }
    let inner = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
    match nf.kind {
        FanKind::Plane => {
            let d = match inner.strip_suffix('H') {
                Some("") => 1,
                Some(c) => parse_ints(c, offset)?[0],
                None => parse_ints(inner, offset)?[0],
            };
            Ok(TDivisor::from_i64(&[0, 0, d]))
        }
        FanKind::ProductOfLines(d) => {
            let a = parse_ints(inner, offset + 1)?;
            if a.len() != d {
                return Err(Error::Malformed(format!(
                    "expected {d} degrees at position {offset}, found {}",
                    a.len()
                )));
            }
            let mut k = vec![0i64; 2 * d];
            for (i, v) in a.into_iter().enumerate() {
                k[2 * i + 1] = v;
            }
            Ok(TDivisor::from_i64(&k))
        }
        FanKind::Hirzebruch(_) => {
            let a = parse_ints(inner, offset + 1)?;
            if a.len() != 2 {
                return Err(Error::Malformed(format!("expected (p,q) at position {offset}")));
            }
            Ok(TDivisor::from_i64(&[0, 0, a[0], a[1]]))
        }
        FanKind::Custom => Err(Error::Malformed(format!(
            "a custom fan needs explicit coefficients [k_0,...] at position {offset}"
        ))),
    }
}

/// Shorthand such as `H`, `2H+H`, `(2,0)`, `[0,0,1]`, a JSON divisor
/// `{"k": {"2": 1}}`, a JSON list of divisors, or a path to one of these.
pub fn parse_bundle(nf: &NamedFan, spec: &str) -> Result<SplitBundle> {
    let text = read_if_path(spec.trim())?;
    let t = text.trim();
    let as_json = t.starts_with('{') || (t.starts_with('[') && t[1..].trim_start().starts_with('{'));
    if as_json {
        let v: Value = serde_json::from_str(t).map_err(|e| json_error("bundle document", e))?;
        let docs: Vec<DivisorDoc> = if v.is_array() {
            serde_json::from_value(v).map_err(|e| Error::Malformed(format!("bundle document: {e}")))?
        } else {
            vec![serde_json::from_value(v).map_err(|e| Error::Malformed(format!("divisor document: {e}")))?]
        };
        let ds = docs
            .iter()
            .map(|d| divisor_from_doc(&nf.fan, d))
            .collect::<Result<Vec<_>>>()?;
        return SplitBundle::new(nf.fan.clone(), ds);
    }
    let mut ds = Vec::new();
    let mut offset = 0;
    for tok in t.split(['+', '⊕']) {
        if tok.trim().is_empty() {
            return Err(Error::Malformed(format!("empty summand at position {offset}")));
        }
        ds.push(shorthand_divisor(nf, tok, offset)?);
        offset += tok.len() + 1;
    }
    SplitBundle::new(nf.fan.clone(), ds)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffDoc {
    coeffs: Vec<(Vec<i64>, f64, f64)>,
}

/// `{"coeffs": [[m, re, im], ...]}` over lattice points `m`.
pub fn parse_section(spec: &str) -> Result<Section> {
    let text = read_if_path(spec.trim())?;
    let doc: CoeffDoc = serde_json::from_str(&text).map_err(|e| json_error("section document", e))?;
    Ok(Section::new(
        doc.coeffs
            .into_iter()
            .map(|(m, re, im)| (m.into_iter().map(BigInt::from).collect(), C64::new(re, im)))
            .collect(),
    ))
}

/// The same document with nonnegative exponents, read as a polynomial in
/// chart coordinates.
pub fn parse_chart_polynomial(spec: &str, nvars: usize) -> Result<CPoly> {
    let text = read_if_path(spec.trim())?;
    let doc: CoeffDoc = serde_json::from_str(&text).map_err(|e| json_error("polynomial document", e))?;
    let mut p = CPoly::zero(nvars);
    for (m, re, im) in doc.coeffs {
        if m.len() != nvars || m.iter().any(|&x| x < 0) {
            return Err(Error::Malformed(format!(
                "exponent {m:?} must have {nvars} nonnegative entries"
            )));
        }
        p.add_term(m.into_iter().map(|x| x as u32).collect(), C64::new(re, im));
    }
    Ok(p)
}

/// `0.1` is the cone on rays 0 and 1, `2` a ray, and `{0}` or `o` the zero
/// cone. The cone must belong to the fan.
pub fn parse_cone(fan: &Fan, s: &str) -> Result<Cone> {
    let t = s.trim();
    let cone = if t.is_empty() || t == "{0}" || t == "o" {
        Cone::zero()
    } else {
        let ids = t
            .split('.')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Malformed(format!("bad ray index {x:?} in cone {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Cone::new(ids)
    };
    if !fan.contains_cone(&cone) {
        return Err(Error::Malformed(format!("{cone} is not a cone of the fan")));
    }
    Ok(cone)
}

/// `τ:ν,τ:ν,...` with cones as in [`parse_cone`]; a missing `:ν` means 1.
/// The empty string is the zero class of dimension `dim_if_empty`.
pub fn parse_cycle(fan: &Fan, s: &str, dim_if_empty: usize) -> Result<CycleClass> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(CycleClass::zero(dim_if_empty));
    }
    let mut cls: Option<CycleClass> = None;
    for part in t.split(',') {
        let (c, nu) = match part.split_once(':') {
            Some((c, nu)) => (
                c,
                nu.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Malformed(format!("bad coefficient {nu:?} in cycle {t:?}")))?,
            ),
            None => (part, 1),
        };
        let cone = parse_cone(fan, c)?;
        let dim = fan.dim() - cone.dim();
        let cur = cls.take().unwrap_or_else(|| CycleClass::zero(dim));
        if cur.dim != dim {
            return Err(Error::Dimension(format!("cycle {t:?} mixes orbit dimensions")));
        }
        cls = Some(cur.with(cone, nu));
    }
    Ok(cls.unwrap_or_else(|| CycleClass::zero(dim_if_empty)))
}

/// Pretty JSON with every float printed as `{:.16e}`.
struct SigDigits(PrettyFormatter<'static>);

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Malformed(format!("serialization: {e}")))?;
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_fans_and_json() {
        assert_eq!(parse_fan("P2").unwrap().fan.rays().len(), 3);
        assert_eq!(parse_fan("Hirzebruch(2)").unwrap().kind, FanKind::Hirzebruch(2));
        let f = parse_fan(r#"{"n":2, "rays":[[1,0],[0,1],[-1,-1]], "max_cones":[[0,1],[1,2],[2,0]]}"#).unwrap();
        assert_eq!(f.kind, FanKind::Custom);
        let err = parse_fan(r#"{"n":2, "rays":[[1,0],[0,1],[-1,-1]], "max_cones":[[0,1],[1,2],[2,0]"#).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        assert!(parse_fan(r#"{"n":2, "rays":[[2,0],[0,1],[-1,-1]], "max_cones":[[0,1],[1,2],[2,0]]}"#).is_err());
    }

    #[test]
    fn bundle_shorthands() {
        let p2 = parse_fan("P2").unwrap();
        let e = parse_bundle(&p2, "H+2H").unwrap();
        assert_eq!(e.rank(), 2);
        assert_eq!(e.line_bundles()[1].divisor(), &TDivisor::from_i64(&[0, 0, 2]));
        let pp = parse_fan("P1xP1").unwrap();
        let e = parse_bundle(&pp, "(2,0)").unwrap();
        assert_eq!(e.line_bundles()[0].divisor(), &TDivisor::from_i64(&[0, 2, 0, 0]));
        let e = parse_bundle(&pp, r#"[{"k": {"1": 1}}, {"k": {"3": 1}}]"#).unwrap();
        assert_eq!(e.rank(), 2);
        let e = parse_bundle(&pp, "[0,1,0,1]").unwrap();
        assert_eq!(e.line_bundles()[0].divisor(), &TDivisor::from_i64(&[0, 1, 0, 1]));
        let err = parse_bundle(&pp, "(2,x)").unwrap_err();
        assert!(err.to_string().contains("position 3"), "{err}");
    }

    #[test]
    fn cones_and_cycles() {
        let pp = parse_fan("P1xP1").unwrap();
        assert_eq!(parse_cone(&pp.fan, "0.2").unwrap(), Cone::new(vec![0, 2]));
        assert!(parse_cone(&pp.fan, "0.1").is_err());
        let c = parse_cycle(&pp.fan, "0:2,2", 1).unwrap();
        assert_eq!(c.dim, 1);
        assert_eq!(c.coeffs.len(), 2);
        assert!(parse_cycle(&pp.fan, "0,0.2", 1).is_err());
        assert_eq!(parse_cycle(&pp.fan, "", 0).unwrap(), CycleClass::zero(0));
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&serde_json::json!({"x": 0.1, "n": 3})).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn sections_and_polynomials() {
        let s = parse_section(r#"{"coeffs": [[[0,0], 1.0, 0.0], [[1,0], 0.5, -1.0]]}"#).unwrap();
        assert_eq!(s.coeffs.len(), 2);
        let p = parse_chart_polynomial(r#"{"coeffs": [[[0,2], 1.0, 0.0], [[1,0], -1.0, 0.0]]}"#, 2).unwrap();
        assert_eq!(p.total_degree(), 2);
        assert!(parse_chart_polynomial(r#"{"coeffs": [[[-1,0], 1.0, 0.0]]}"#, 2).is_err());
    }
}
