//! JSON file formats: instances, hull points and map tables.

use std::fmt;

use dihull_core::hull::{certify, minimize};
use dihull_core::{AsymGauge, FunctionPair, HullPoint, PointCloud, QSpace, Rational, Scalar};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

/// An exact rational written as `"p/q"`, `"p"` or a JSON integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Num(pub Rational);

impl From<Rational> for Num {
    fn from(r: Rational) -> Self {
        Num(r)
    }
}

impl From<i64> for Num {
    fn from(v: i64) -> Self {
        Num(Rational::from(v))
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

struct NumVisitor;

impl Visitor<'_> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational \"p/q\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
        v.parse::<Rational>()
            .map(Num)
            .map_err(|e| E::custom(format!("invalid rational {v:?}: {e}")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
        Ok(Num(Rational::from(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
        i64::try_from(v)
            .map(|v| Num(Rational::from(v)))
            .map_err(|_| E::custom("integer out of range"))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

pub fn nums(v: &[Num]) -> Vec<Rational> {
    v.iter().map(|n| n.0).collect()
}

fn to_nums(v: &[Rational]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

/// A base space, either as an explicit matrix or as a point cloud under a
/// polyhedral gauge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawInstance")]
pub enum Instance {
    Matrix {
        q: Vec<Vec<Num>>,
    },
    PointCloud {
        dim: usize,
        functionals: Vec<Vec<Num>>,
        points: Vec<Vec<Num>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub(crate) enum Kind {
    Matrix,
    PointCloud,
}

/// Flat form of [`Instance`]; parsing through it keeps error positions,
/// which tagged enums lose.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawInstance {
    pub kind: Kind,
    pub q: Option<Vec<Vec<Num>>>,
    pub dim: Option<usize>,
    pub functionals: Option<Vec<Vec<Num>>>,
    pub points: Option<Vec<Vec<Num>>>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = String;

    fn try_from(r: RawInstance) -> Result<Self, String> {
        match (r.kind, r.q, r.dim, r.functionals, r.points) {
            (Kind::Matrix, Some(q), None, None, None) => Ok(Instance::Matrix { q }),
            (Kind::PointCloud, None, Some(dim), Some(functionals), Some(points)) => {
                Ok(Instance::PointCloud { dim, functionals, points })
            }
            (Kind::Matrix, ..) => Err("a matrix instance has exactly the field `q`".into()),
            (Kind::PointCloud, ..) => Err("a point_cloud instance has `dim`, `functionals` and `points`".into()),
        }
    }
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Loaded<S: Scalar = Rational> {
    pub space: QSpace<S>,
    pub cloud: Option<PointCloud<S>>,
}

impl Loaded<Rational> {
    pub fn cast<T: Scalar>(&self) -> Loaded<T> {
        Loaded { space: self.space.cast(), cloud: self.cloud.as_ref().map(PointCloud::cast) }
    }
}

impl Instance {
    pub fn load(&self) -> dihull_core::Result<Loaded> {
        match self {
            Instance::Matrix { q } => {
                let m = q.iter().map(|row| nums(row)).collect();
                Ok(Loaded { space: QSpace::new(m)?, cloud: None })
            }
            Instance::PointCloud { dim, functionals, points } => {
                let g = AsymGauge::new(*dim, functionals.iter().map(|f| nums(f)).collect())?;
                let pc = PointCloud::new(g, points.iter().map(|p| nums(p)).collect())?;
                Ok(Loaded { space: pc.space().clone(), cloud: Some(pc) })
            }
        }
    }

    /// The raw matrix of a matrix instance, before validation.
    pub fn raw_matrix(&self) -> Option<Vec<Vec<Rational>>> {
        match self {
            Instance::Matrix { q } => Some(q.iter().map(|row| nums(row)).collect()),
            Instance::PointCloud { .. } => None,
        }
    }

    pub fn from_space(s: &QSpace) -> Self {
        Instance::Matrix { q: s.matrix().iter().map(|row| to_nums(row)).collect() }
    }

    pub fn from_cloud(pc: &PointCloud) -> Self {
        Instance::PointCloud {
            dim: pc.dim(),
            functionals: pc.gauge().functionals().iter().map(|f| to_nums(f)).collect(),
            points: pc.points().iter().map(|p| to_nums(p)).collect(),
        }
    }
}

/// A hull point as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullPointJson {
    pub f1: Vec<Num>,
    pub f2: Vec<Num>,
    #[serde(default)]
    pub minimal: bool,
}

impl HullPointJson {
    pub fn from_point(p: &HullPoint) -> Self {
        HullPointJson { f1: to_nums(p.f1()), f2: to_nums(p.f2()), minimal: true }
    }

    pub fn pair(&self) -> FunctionPair {
        FunctionPair::new(nums(&self.f1), nums(&self.f2))
    }

    /// Certifies a pair flagged minimal, minimizes any other ample pair.
    pub fn resolve(&self, s: &QSpace) -> dihull_core::Result<HullPoint> {
        if self.minimal {
            certify(s, self.pair())
        } else {
            minimize(s, &self.pair())
        }
    }
}

/// A self-map table over a subset, by element index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapTable {
    pub map: Vec<usize>,
}

/// JSON for a computed hull point in either arithmetic mode.
pub fn point_value<S: Scalar>(p: &HullPoint<S>) -> Value {
    json!({
        "f1": p.f1().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "f2": p.f2().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "minimal": true,
    })
}

pub fn pair_value<S: Scalar>(p: &FunctionPair<S>) -> Value {
    json!({
        "f1": p.f1.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "f2": p.f2.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    })
}

pub fn scalar_value<S: Scalar>(x: S) -> Value {
    Value::String(x.to_string())
}

/// Renders a square table as CSV with a header row of column indices.
pub fn table_csv<S: fmt::Display>(table: &[Vec<S>]) -> String {
    let mut out = String::from("row");
    for j in 0..table.first().map_or(0, Vec::len) {
        out.push_str(&format!(",{j}"));
    }
    out.push('\n');
    for (i, row) in table.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}
