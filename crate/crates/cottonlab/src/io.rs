//! JSON field and basis files.
//!
//! ```json
//! {"dim":3,"rank":2,"symmetry":"symmetric","coords":["x1","x2","x3"],
//!  "components":{"11":"x1^2","23":"-1/2*x3"}}
//! ```
//!
//! Index keys are canonical, 1-based for Euclidean shapes and 0-based for
//! Minkowski ones; absent components are zero.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exact::{parse_poly_in, Coords, Ring, MAX_VARS};
use crate::tensor::{Block, Metric, Symmetry, TensorField, TensorShape};

pub fn symmetry_string(s: &Symmetry) -> String {
    let list = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    match s {
        Symmetry::Symmetric => "symmetric".into(),
        Symmetry::None => "none".into(),
        Symmetry::PairAntisymmetric => "pair-antisymmetric".into(),
        Symmetry::YoungRows(r) => format!("young-row:{}", list(r)),
        Symmetry::YoungCols(c) => format!("young-col:{}", list(c)),
        Symmetry::Blocks(b) => format!(
            "blocks:{}",
            b.iter()
                .map(|x| match x {
                    Block::Sym(k) => format!("S{k}"),
                    Block::Anti(k) => format!("A{k}"),
                    Block::Free => "F1".into(),
                })
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}

fn schema(key: &str, msg: impl Into<String>) -> Error {
    Error::Schema { key: key.to_string(), msg: msg.into() }
}

pub fn parse_symmetry(s: &str) -> Result<Symmetry> {
    let nums = |v: &str| -> Result<Vec<u8>> {
        v.split(',')
            .map(|x| x.trim().parse::<u8>().map_err(|_| schema("symmetry", format!("bad length `{x}`"))))
            .collect()
    };
    Ok(match s {
        "symmetric" => Symmetry::Symmetric,
        "none" => Symmetry::None,
        "pair-antisymmetric" => Symmetry::PairAntisymmetric,
        _ => {
            if let Some(r) = s.strip_prefix("young-row:") {
                Symmetry::YoungRows(nums(r)?)
            } else if let Some(c) = s.strip_prefix("young-col:") {
                Symmetry::YoungCols(nums(c)?)
            } else if let Some(b) = s.strip_prefix("blocks:") {
                let blocks = b
                    .split(',')
                    .map(|x| {
                        let x = x.trim();
                        let (kind, n) = x.split_at(x.len().min(1));
                        let n: u8 = n.parse().map_err(|_| schema("symmetry", format!("bad block `{x}`")))?;
                        match (kind, n) {
                            ("S", n) => Ok(Block::Sym(n)),
                            ("A", n) => Ok(Block::Anti(n)),
                            ("F", 1) => Ok(Block::Free),
                            _ => Err(schema("symmetry", format!("bad block `{x}`"))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Symmetry::Blocks(blocks)
            } else {
                return Err(schema("symmetry", format!("unknown symmetry `{s}`")));
            }
        }
    })
}

fn index_key(shape: &TensorShape, idx: &[u8]) -> String {
    let base = if shape.metric() == Metric::Minkowski { b'0' } else { b'1' };
    idx.iter().map(|i| (base + i) as char).collect()
}

fn header(t: &TensorShape, coords: &Coords, ring: Ring) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("dim".into(), json!(t.dim()));
    m.insert("rank".into(), json!(t.rank()));
    m.insert("symmetry".into(), json!(symmetry_string(t.symmetry())));
    if t.metric() == Metric::Minkowski {
        m.insert("metric".into(), json!("minkowski"));
    }
    if ring == Ring::Sqrt3 {
        m.insert("ring".into(), json!("sqrt3"));
    }
    m.insert("coords".into(), json!(coords.to_vec()));
    m
}

fn components_json(t: &TensorField) -> Value {
    let mut c = Map::new();
    for (p, v) in t.components() {
        c.insert(index_key(t.shape(), t.shape().comp(*p)), json!(v.to_string()));
    }
    Value::Object(c)
}

pub fn field_to_json(t: &TensorField) -> Value {
    let mut m = header(t.shape(), t.coords(), t.ring());
    m.insert("components".into(), components_json(t));
    Value::Object(m)
}

/// Canonical text: pretty JSON with a trailing newline.
pub fn field_to_string(t: &TensorField) -> String {
    let mut s = serde_json::to_string_pretty(&field_to_json(t)).expect("serializable");
    s.push('\n');
    s
}

pub fn basis_to_json(shape: &TensorShape, coords: &Coords, basis: &[TensorField]) -> Value {
    let ring = basis.iter().fold(Ring::Rational, |r, b| r.join(b.ring()));
    let mut m = header(shape, coords, ring);
    m.insert("basis".into(), Value::Array(basis.iter().map(components_json).collect()));
    Value::Object(m)
}

pub fn basis_to_string(shape: &TensorShape, coords: &Coords, basis: &[TensorField]) -> String {
    let mut s = serde_json::to_string_pretty(&basis_to_json(shape, coords, basis)).expect("serializable");
    s.push('\n');
    s
}

struct Header {
    shape: TensorShape,
    coords: Coords,
    ring: Ring,
}

fn parse_header(obj: &Map<String, Value>, body: &str) -> Result<Header> {
    for k in obj.keys() {
        if !["dim", "rank", "symmetry", "metric", "ring", "coords", body].contains(&k.as_str()) {
            return Err(schema(k, "unexpected key"));
        }
    }
    let uint = |k: &str| -> Result<usize> {
        obj.get(k)
            .ok_or_else(|| schema(k, "missing"))?
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| schema(k, "expected a non-negative integer"))
    };
    let dim = uint("dim")?;
    let rank = uint("rank")?;
    let sym = parse_symmetry(
        obj.get("symmetry").ok_or_else(|| schema("symmetry", "missing"))?.as_str().ok_or_else(|| schema("symmetry", "expected a string"))?,
    )?;
    let metric = match obj.get("metric").map(|v| v.as_str()) {
        None => Metric::Euclidean,
        Some(Some("euclidean")) => Metric::Euclidean,
        Some(Some("minkowski")) => Metric::Minkowski,
        _ => return Err(schema("metric", "expected \"euclidean\" or \"minkowski\"")),
    };
    let ring = match obj.get("ring").map(|v| v.as_str()) {
        None | Some(Some("rational")) => Ring::Rational,
        Some(Some("sqrt3")) => Ring::Sqrt3,
        _ => return Err(schema("ring", "expected \"rational\" or \"sqrt3\"")),
    };
    if rank > 9 {
        return Err(schema("rank", "rank above 9 is not supported in files"));
    }
    let shape = TensorShape::new(dim, metric, sym, rank).map_err(|e| schema("symmetry", e.to_string()))?;
    if shape.ncomps() > 200_000 {
        return Err(schema("dim", "too many components"));
    }
    let coords: Vec<String> = obj
        .get("coords")
        .ok_or_else(|| schema("coords", "missing"))?
        .as_array()
        .ok_or_else(|| schema("coords", "expected an array"))?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| schema("coords", "expected strings")))
        .collect::<Result<_>>()?;
    if coords.len() > MAX_VARS {
        return Err(schema("coords", format!("at most {MAX_VARS} coordinates")));
    }
    for (i, c) in coords.iter().enumerate() {
        let ok = c.chars().next().is_some_and(|x| x.is_ascii_alphabetic() || x == '_')
            && c.chars().all(|x| x.is_ascii_alphanumeric() || x == '_')
            && c != "sqrt3";
        if !ok || coords[..i].contains(c) {
            return Err(schema("coords", format!("invalid or repeated coordinate `{c}`")));
        }
    }
    Ok(Header { shape, coords: coords.into(), ring })
}

fn parse_components(h: &Header, comps: &Value, key: &str) -> Result<TensorField> {
    let comps = comps.as_object().ok_or_else(|| schema(key, "expected an object"))?;
    let mut t = TensorField::zero(h.shape.clone(), h.coords.clone()).with_ring(h.ring);
    let base = if h.shape.metric() == Metric::Minkowski { b'0' } else { b'1' };
    for (k, v) in comps {
        let here = format!("{key}.{k}");
        if k.len() != h.shape.rank() {
            return Err(schema(&here, format!("index key must have {} digits", h.shape.rank())));
        }
        let mut idx = Vec::with_capacity(k.len());
        for b in k.bytes() {
            if b < base || b >= base + h.shape.dim() as u8 {
                return Err(schema(&here, "index digit out of range"));
            }
            idx.push(b - base);
        }
        let pos = h.shape.position(&idx).ok_or_else(|| Error::NonCanonicalKey(k.clone()))?;
        let src = v.as_str().ok_or_else(|| schema(&here, "expected a polynomial string"))?;
        let p = parse_poly_in(src, &h.coords, h.ring)?;
        t.set(pos, p);
    }
    Ok(t.with_ring(h.ring))
}

fn parse_object(src: &str) -> Result<Map<String, Value>> {
    let v: Value = serde_json::from_str(src)
        .map_err(|e| schema(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(schema("$", "expected an object")),
    }
}

pub fn parse_field(src: &str) -> Result<TensorField> {
    let obj = parse_object(src)?;
    let h = parse_header(&obj, "components")?;
    let comps = obj.get("components").ok_or_else(|| schema("components", "missing"))?;
    parse_components(&h, comps, "components")
}

/// Shape, coordinates and basis elements of a basis file.
pub fn parse_basis(src: &str) -> Result<(TensorShape, Coords, Vec<TensorField>)> {
    let obj = parse_object(src)?;
    let h = parse_header(&obj, "basis")?;
    let arr = obj
        .get("basis")
        .ok_or_else(|| schema("basis", "missing"))?
        .as_array()
        .ok_or_else(|| schema("basis", "expected an array"))?;
    let basis = arr
        .iter()
        .enumerate()
        .map(|(i, c)| parse_components(&h, c, &format!("basis[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok((h.shape, h.coords, basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANON: &str = r#"{
  "dim": 3,
  "rank": 2,
  "symmetry": "symmetric",
  "coords": [
    "x1",
    "x2",
    "x3"
  ],
  "components": {
    "11": "x1^2 - 3",
    "23": "-1/2*x2*x3"
  }
}
"#;

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let t = parse_field(CANON).unwrap();
        assert_eq!(field_to_string(&t), CANON);
        assert!(t.get_full(&[1, 1]).is_zero());
    }

    #[test]
    fn rejects_non_canonical_and_malformed() {
        let bad = CANON.replace("\"23\"", "\"32\"");
        assert!(matches!(parse_field(&bad), Err(Error::NonCanonicalKey(_))));
        assert!(parse_field(&CANON.replace("\"23\"", "\"24\"")).is_err());
        assert!(parse_field(&CANON.replace("x1^2", "x4")).is_err());
        assert!(matches!(parse_field("{"), Err(Error::Schema { .. })));
        assert!(parse_field(&CANON.replace("symmetric", "young-row:1,2")).is_err());
    }

    #[test]
    fn young_and_ring_metadata_round_trip() {
        let src = r#"{"dim":5,"rank":4,"symmetry":"young-col:2,2","ring":"sqrt3","coords":["x1","x2","x3","x4","x5"],"components":{"1212":"sqrt3*x5"}}"#;
        let t = parse_field(src).unwrap();
        assert_eq!(t.ring(), Ring::Sqrt3);
        let again = parse_field(&field_to_string(&t)).unwrap();
        assert_eq!(again, t);
        assert_eq!(field_to_string(&again), field_to_string(&t));
    }

    #[test]
    fn basis_round_trip() {
        let t = parse_field(CANON).unwrap();
        let s = basis_to_string(t.shape(), t.coords(), &[t.clone(), t.scale(&crate::exact::Scalar::int(2))]);
        let (shape, coords, b) = parse_basis(&s).unwrap();
        assert_eq!(&shape, t.shape());
        assert_eq!(coords[..], t.coords()[..]);
        assert_eq!(b.len(), 2);
        assert_eq!(basis_to_string(&shape, &coords, &b), s);
    }
}
