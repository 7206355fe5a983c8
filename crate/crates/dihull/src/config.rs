//! Experiment configuration and report types.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::format::{HullPointJson, Instance, Kind, Num, RawInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Validate,
    Embed,
    Minimize,
    Qe,
    OpsScalar,
    OpsOplus,
    OpsWlift,
    Segment,
    CheckTakahashi,
    CheckPair,
    SearchCounterexample,
    Chebyshev,
    Descent,
    Fixpoint,
    #[default]
    Suite,
}

/// Where the base instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "RawSource")]
pub enum InstanceSource {
    Path { path: String },
    Inline(Instance),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    path: Option<String>,
    kind: Option<Kind>,
    q: Option<Vec<Vec<Num>>>,
    dim: Option<usize>,
    functionals: Option<Vec<Vec<Num>>>,
    points: Option<Vec<Vec<Num>>>,
}

impl TryFrom<RawSource> for InstanceSource {
    type Error = String;

    fn try_from(r: RawSource) -> Result<Self, String> {
        match (r.path, r.kind) {
            (Some(path), None) if r.q.is_none() && r.dim.is_none() && r.functionals.is_none() && r.points.is_none() => {
                Ok(InstanceSource::Path { path })
            }
            (None, Some(kind)) => {
                let raw = RawInstance { kind, q: r.q, dim: r.dim, functionals: r.functionals, points: r.points };
                Instance::try_from(raw).map(InstanceSource::Inline)
            }
            _ => Err("an instance is either {\"path\": ...} or an inline instance with `kind`".into()),
        }
    }
}

/// A hull point given by the embedding of a base point or by a pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, try_from = "RawPoint")]
pub enum PointSpec {
    Embed { embed: usize },
    Pair(HullPointJson),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    embed: Option<usize>,
    f1: Option<Vec<Num>>,
    f2: Option<Vec<Num>>,
    #[serde(default)]
    minimal: bool,
}

impl TryFrom<RawPoint> for PointSpec {
    type Error = String;

    fn try_from(r: RawPoint) -> Result<Self, String> {
        match (r.embed, r.f1, r.f2) {
            (Some(embed), None, None) => Ok(PointSpec::Embed { embed }),
            (None, Some(f1), Some(f2)) => Ok(PointSpec::Pair(HullPointJson { f1, f2, minimal: r.minimal })),
            _ => Err("a point is either {\"embed\": i} or {\"f1\": [...], \"f2\": [...]}".into()),
        }
    }
}

/// A convexity table: the affine map of a point cloud, or explicit cells in
/// `(x, y, lambda)` order with `null` for undefined cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TableSpec {
    Affine,
    Cells(Vec<Option<usize>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub instance: Option<InstanceSource>,
    /// Hull points for tasks taking points; defaults to every embedded base point.
    pub points: Vec<PointSpec>,
    /// Closure universe for the Chebyshev task.
    pub universe: Vec<PointSpec>,
    /// Input pair for `minimize`.
    pub pair: Option<HullPointJson>,
    pub scalar: Option<Num>,
    /// Weight grid; tasks fall back to their own default when empty.
    pub lambdas: Vec<Num>,
    pub maps: Vec<Vec<usize>>,
    pub table: Option<TableSpec>,
    /// Random samples for sampling tasks; 0 means exhaustive.
    pub samples: usize,
    pub max_n: usize,
    pub bound: u32,
    pub seed: u64,
    pub mode: Mode,
    /// Float-mode tolerance for slack verdicts; must be absent in exact mode.
    pub tol: Option<f64>,
    pub output: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: Task::Suite,
            instance: None,
            points: Vec::new(),
            universe: Vec::new(),
            pair: None,
            scalar: None,
            lambdas: Vec::new(),
            maps: Vec::new(),
            table: None,
            samples: 0,
            max_n: 3,
            bound: 2,
            seed: 0,
            mode: Mode::Exact,
            tol: None,
            output: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub values: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    /// Largest `lhs - rhs` seen per inequality family, float mode only.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub max_slack: BTreeMap<String, String>,
    /// Only filled on request, so reports stay reproducible by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub const VERSION: &str = concat!("dihull ", env!("CARGO_PKG_VERSION"));
