//! JSON instance files.
//!
//! ```json
//! {
//!   "n": 2,
//!   "varieties": [
//!     { "kind": "line", "point": [0, 0], "dir": [1, 0] },
//!     { "kind": "circle", "center": [0, 0], "radius": 1 },
//!     { "kind": "implicit", "k": 1, "polys": [{ "coeffs": [1, -1], "exponents": [[2, 0], [0, 1]] }] }
//!   ],
//!   "points": [[0.5, 0.25]]
//! }
//! ```

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use serde_json::{Map, Value};

use polypart::{Polynomial, VarietyKind, VarietySpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub varieties: Vec<VarietyDesc>,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

/// Varieties stay untyped here so each one can be decoded against its own
/// `kind` with the full field path in error messages.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n: usize,
    #[serde(default)]
    varieties: Vec<Map<String, Value>>,
    #[serde(default)]
    points: Vec<Vec<f64>>,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VarietyDesc {
    Line { point: Vec<f64>, dir: Vec<f64> },
    Circle { center: Vec<f64>, radius: f64, frame: Option<[Vec<f64>; 2]> },
    Kplane { point: Vec<f64>, frame: Vec<Vec<f64>> },
    Implicit { k: usize, polys: Vec<PolyDesc> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LineFields {
    point: Vec<f64>,
    dir: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CircleFields {
    center: Vec<f64>,
    radius: f64,
    #[serde(default)]
    frame: Option<[Vec<f64>; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KplaneFields {
    point: Vec<f64>,
    frame: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ImplicitFields {
    k: usize,
    polys: Vec<PolyDesc>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDesc {
    pub coeffs: Vec<f64>,
    pub exponents: Vec<Vec<u32>>,
}

fn decode<'de, T: Deserialize<'de>>(de: impl serde::Deserializer<'de>, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let full = match (prefix, path.as_str()) {
            ("", p) => p.to_owned(),
            (pre, ".") => pre.to_owned(),
            (pre, p) => format!("{pre}.{p}"),
        };
        anyhow!("field `{full}`: {}", e.into_inner())
    })
}

impl VarietyDesc {
    fn from_object(mut obj: Map<String, Value>, at: &str) -> Result<Self> {
        let kind = match obj.remove("kind") {
            Some(Value::String(k)) => k,
            Some(other) => bail!("field `{at}.kind`: expected a string, got {other}"),
            None => bail!("field `{at}`: missing field `kind`"),
        };
        let fields = Value::Object(obj);
        Ok(match kind.as_str() {
            "line" => {
                let f: LineFields = decode(fields, at)?;
                VarietyDesc::Line { point: f.point, dir: f.dir }
            }
            "circle" => {
                let f: CircleFields = decode(fields, at)?;
                VarietyDesc::Circle { center: f.center, radius: f.radius, frame: f.frame }
            }
            "kplane" => {
                let f: KplaneFields = decode(fields, at)?;
                VarietyDesc::Kplane { point: f.point, frame: f.frame }
            }
            "implicit" => {
                let f: ImplicitFields = decode(fields, at)?;
                VarietyDesc::Implicit { k: f.k, polys: f.polys }
            }
            other => bail!(
                "field `{at}.kind`: unknown variant `{other}`, expected one of `line`, `circle`, `kplane`, `implicit`"
            ),
        })
    }
}

impl Instance {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawInstance = decode(&mut serde_json::Deserializer::from_str(text), "")?;
        let varieties = raw
            .varieties
            .into_iter()
            .enumerate()
            .map(|(i, obj)| VarietyDesc::from_object(obj, &format!("varieties[{i}]")))
            .collect::<Result<_>>()?;
        let inst = Instance { n: raw.n, varieties, points: raw.points, labels: raw.labels };
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            bail!("field `n`: ambient dimension must be at least 1");
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != self.n {
                bail!("field `points[{i}]`: expected {} coordinates, got {}", self.n, p.len());
            }
        }
        self.build_varieties()?;
        Ok(())
    }

    /// Builds every variety, naming the offending entry on failure.
    pub fn build_varieties(&self) -> Result<Vec<VarietySpec>> {
        self.varieties
            .iter()
            .enumerate()
            .map(|(i, v)| v.build(self.n).with_context(|| format!("field `varieties[{i}]`")))
            .collect()
    }
}

impl VarietyDesc {
    pub fn build(&self, n: usize) -> Result<VarietySpec> {
        let kind = match self.clone() {
            VarietyDesc::Line { point, dir } => VarietyKind::Line { point, dir },
            VarietyDesc::Circle { center, radius, frame } => VarietyKind::Circle { center, radius, frame },
            VarietyDesc::Kplane { point, frame } => VarietyKind::KPlane { point, frame },
            VarietyDesc::Implicit { k, polys } => VarietyKind::Implicit {
                k,
                polys: polys
                    .iter()
                    .enumerate()
                    .map(|(j, p)| p.build(n).with_context(|| format!("polys[{j}]")))
                    .collect::<Result<_>>()?,
            },
        };
        Ok(VarietySpec::build(n, kind)?)
    }
}

impl PolyDesc {
    pub fn build(&self, n: usize) -> Result<Polynomial> {
        if self.coeffs.len() != self.exponents.len() {
            bail!("coeffs has {} entries but exponents has {}", self.coeffs.len(), self.exponents.len());
        }
        let terms: Vec<(f64, &[u32])> =
            self.coeffs.iter().copied().zip(self.exponents.iter().map(|e| e.as_slice())).collect();
        Ok(Polynomial::from_terms(n, &terms)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let inst = Instance::parse(
            r#"{"n": 3, "varieties": [
                {"kind": "line", "point": [0,0,0], "dir": [1,0,0]},
                {"kind": "circle", "center": [0,0,0], "radius": 1, "frame": [[1,0,0],[0,1,0]]},
                {"kind": "kplane", "point": [0,0,1], "frame": [[1,0,0],[0,1,0]]},
                {"kind": "implicit", "k": 2, "polys": [{"coeffs": [1, -1], "exponents": [[0,0,1],[0,0,0]]}]}
            ], "points": [[1,2,3]]}"#,
        )
        .unwrap();
        let v = inst.build_varieties().unwrap();
        assert_eq!(v.iter().map(|g| g.kind_name()).collect::<Vec<_>>(), ["line", "circle", "kplane", "implicit"]);
        assert_eq!(v[2].k(), 2);
    }

    #[test]
    fn errors_name_the_field() {
        let e = Instance::parse(r#"{"n": 2, "varieties": [{"kind": "line", "point": [0, "a"], "dir": [1, 0]}]}"#)
            .unwrap_err();
        assert!(format!("{e:#}").contains("varieties[0].point"), "{e:#}");
        let e = Instance::parse(r#"{"n": 2, "varieties": [{"kind": "line", "point": [0, 0]}]}"#).unwrap_err();
        assert!(format!("{e:#}").contains("dir"), "{e:#}");
        let e = Instance::parse(r#"{"n": 2, "varieties": [{"kind": "parabola"}]}"#).unwrap_err();
        let msg = format!("{e:#}");
        assert!(msg.contains("parabola") && msg.contains("kplane"), "{msg}");
        let e = Instance::parse(r#"{"n": 2, "points": [[1, 2, 3]]}"#).unwrap_err();
        assert!(format!("{e:#}").contains("points[0]"));
        let e = Instance::parse(r#"{"n": 2, "varieties": [{"kind": "line", "point": [0, 0], "dir": [0, 0]}]}"#)
            .unwrap_err();
        assert!(format!("{e:#}").contains("varieties[0]"));
    }
}
