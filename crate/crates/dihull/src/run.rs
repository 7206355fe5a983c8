//! Experiment runner: loads a config, dispatches to the core operations and
//! collects values and verdicts into a report.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use dihull_core::chebyshev::{
    cheb_descent, center_and_diameter, centers_invariant, check_nonexpansive, common_fixed, double_closure,
    double_closure_indices, fixed_points, normal_structure_check, radii, DescentOutcome, HullSubset,
    NormalStructure, SelfMapTable,
};
use dihull_core::convexity::{
    blocked_cell, check_takahashi, check_wconvex_pair, counterexample_search, enumerate_spaces, CheckMode,
    ConvexStructureTable, JensenSample, TakahashiVerdict, TakahashiWitness,
};
use dihull_core::hull::{hull_t0_check, is_ample, minimize_trace, q_hull_formulas, sweep_cap};
use dihull_core::linops::{
    affine_index, oplus, oplus_candidate, scalar_mul, scalar_mul_candidate, segment, w_lift, Lambda,
};
use dihull_core::space::violations;
use dihull_core::{embed, minimize, q_hull, HullPoint, PointCloud, QSpace, Rational, Scalar, FLOAT_TOL};
use rand::Rng;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentReport, InstanceSource, Mode, PointSpec, TableSpec, Task, Verdict, VERSION};
use crate::corpus;
use crate::format::{pair_value, point_value, scalar_value, Instance, Loaded, Num};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: parse error: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{context}: {source}")]
    Validation {
        context: String,
        #[source]
        source: dihull_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

fn invalid(context: &str) -> impl FnOnce(dihull_core::Error) -> HarnessError + '_ {
    move |source| HarnessError::Validation { context: context.to_string(), source }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

fn parse<T: serde::de::DeserializeOwned>(path: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| HarnessError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_config(path: &str, text: &str) -> Result<ExperimentConfig> {
    parse(path, text)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&path.display().to_string(), &read(path)?)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse(&path.display().to_string(), &read(path)?)
}

fn resolve_instance(src: &InstanceSource, base: &Path) -> Result<(String, Instance)> {
    match src {
        InstanceSource::Inline(i) => Ok(("inline instance".to_string(), i.clone())),
        InstanceSource::Path { path } => {
            let p: PathBuf = base.join(path);
            Ok((path.clone(), load_instance(&p)?))
        }
    }
}

/// Collects values, verdicts and float slacks.
#[derive(Default)]
struct Out {
    values: BTreeMap<String, Value>,
    verdicts: Vec<Verdict>,
    slack: BTreeMap<String, f64>,
}

impl Out {
    fn value(&mut self, key: &str, v: Value) {
        self.values.insert(key.to_string(), v);
    }

    fn verdict(&mut self, name: &str, pass: bool, detail: Option<String>) {
        self.verdicts.push(Verdict { name: name.to_string(), pass, detail });
    }
}

/// Inequality checker: exact in exact mode, tolerance `tol` in float mode.
struct Ineq {
    tol: f64,
}

impl Ineq {
    fn le<S: Scalar>(&self, out: &mut Out, family: &str, lhs: S, rhs: S) -> bool {
        if S::EXACT {
            return lhs <= rhs;
        }
        let d = (lhs - rhs).to_f64();
        let e = out.slack.entry(family.to_string()).or_insert(f64::NEG_INFINITY);
        *e = e.max(d);
        d <= self.tol * rhs.to_f64().abs().max(1.0)
    }

    fn eq<S: Scalar>(&self, out: &mut Out, family: &str, lhs: S, rhs: S) -> bool {
        if S::EXACT {
            return lhs == rhs;
        }
        self.le(out, family, lhs, rhs) && self.le(out, family, rhs, lhs)
    }
}

struct Cx<'a, S: Scalar> {
    cfg: &'a ExperimentConfig,
    /// The instance in exact arithmetic, used to seed random samples.
    exact: &'a QSpace,
    space: QSpace<S>,
    cloud: Option<PointCloud<S>>,
    points: Vec<HullPoint<S>>,
    universe: Vec<HullPoint<S>>,
    ineq: Ineq,
}

impl<S: Scalar> Cx<'_, S> {
    fn cloud(&self) -> Result<&PointCloud<S>> {
        self.cloud.as_ref().ok_or_else(|| HarnessError::Config("this task needs a point_cloud instance".into()))
    }

    fn point(&self, k: usize) -> Result<&HullPoint<S>> {
        self.points.get(k).ok_or_else(|| HarnessError::Config(format!("task needs at least {} point(s)", k + 1)))
    }

    fn lambdas(&self, default: &[(i128, i128)]) -> Result<Vec<Lambda<S>>> {
        let raw: Vec<Rational> = if self.cfg.lambdas.is_empty() {
            default.iter().map(|&(p, q)| Rational::new(p, q).expect("nonzero")).collect()
        } else {
            self.cfg.lambdas.iter().map(|n| n.0).collect()
        };
        raw.into_iter().map(|r| Lambda::new(S::from_rational(r)).map_err(invalid("lambdas"))).collect()
    }
}

fn strs<T: Display>(v: &[T]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn witness_value(w: &Option<TakahashiWitness>) -> Value {
    match w {
        None => Value::Null,
        Some(w) => json!({"z": w.z, "x": w.x, "y": w.y, "lambda": w.lambda, "w": w.w}),
    }
}

fn takahashi_value(v: &TakahashiVerdict) -> Value {
    json!({
        "pass": v.passes(),
        "cells_checked": v.cells_checked,
        "into": witness_value(&v.into),
        "out_of": witness_value(&v.out_of),
    })
}

fn distance_table<S: Scalar>(s: &QSpace<S>, pts: &[HullPoint<S>]) -> Result<Vec<Vec<S>>> {
    pts.iter()
        .map(|f| pts.iter().map(|g| q_hull(s, f, g).map_err(invalid("q_hull"))).collect())
        .collect()
}

/// Runs a config whose relative paths are resolved against `base`.
pub fn run_in(cfg: &ExperimentConfig, base: &Path) -> Result<ExperimentReport> {
    if cfg.mode == Mode::Exact && cfg.tol.is_some() {
        return Err(HarnessError::Config("exact mode does not take a tolerance".into()));
    }
    if let Some(t) = cfg.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(HarnessError::Config("tolerance must be a finite nonnegative number".into()));
        }
    }
    let mut out = Out::default();
    if cfg.task == Task::SearchCounterexample {
        task_search(cfg, &mut out)?;
    } else {
        let src = cfg.instance.as_ref().ok_or_else(|| HarnessError::Config("missing instance".into()))?;
        let (name, inst) = resolve_instance(src, base)?;
        if cfg.task == Task::Validate {
            task_validate(&name, &inst, &mut out)?;
        } else {
            let loaded = inst.load().map_err(invalid(&name))?;
            let points = resolve_points(&loaded, &cfg.points, true)?;
            let universe = resolve_points(&loaded, &cfg.universe, false)?;
            match cfg.mode {
                Mode::Exact => {
                    let cx = Cx {
                        cfg,
                        exact: &loaded.space,
                        space: loaded.space.clone(),
                        cloud: loaded.cloud.clone(),
                        points,
                        universe,
                        ineq: Ineq { tol: 0.0 },
                    };
                    dispatch(&cx, &mut out)?;
                }
                Mode::Float => {
                    let l: Loaded<f64> = loaded.cast();
                    let cast = |v: Vec<HullPoint>| -> Result<Vec<HullPoint<f64>>> {
                        v.iter().map(|p| minimize(&l.space, &p.pair().cast()).map_err(invalid("float cast"))).collect()
                    };
                    let cx = Cx {
                        cfg,
                        exact: &loaded.space,
                        points: cast(points)?,
                        universe: cast(universe)?,
                        space: l.space.clone(),
                        cloud: l.cloud.clone(),
                        ineq: Ineq { tol: cfg.tol.unwrap_or(FLOAT_TOL) },
                    };
                    dispatch(&cx, &mut out)?;
                }
            }
        }
    }
    let max_slack = if cfg.mode == Mode::Float {
        out.slack.iter().map(|(k, v)| (k.clone(), format!("{v:e}"))).collect()
    } else {
        BTreeMap::new()
    };
    Ok(ExperimentReport {
        version: VERSION.to_string(),
        config: cfg.clone(),
        values: out.values,
        verdicts: out.verdicts,
        max_slack,
        wall_time_ms: None,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_in(cfg, Path::new("."))
}

fn resolve_points(l: &Loaded, specs: &[PointSpec], default_all: bool) -> Result<Vec<HullPoint>> {
    if specs.is_empty() && default_all {
        return (0..l.space.len()).map(|i| embed(&l.space, i).map_err(invalid("embed"))).collect();
    }
    specs
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let ctx = format!("point {k}");
            match s {
                PointSpec::Embed { embed: i } => embed(&l.space, *i).map_err(invalid(&ctx)),
                PointSpec::Pair(p) => p.resolve(&l.space).map_err(invalid(&ctx)),
            }
        })
        .collect()
}

fn dispatch<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    match cx.cfg.task {
        Task::Embed => task_embed(cx, out),
        Task::Minimize => task_minimize(cx, out),
        Task::Qe => task_qe(cx, out),
        Task::OpsScalar | Task::OpsOplus | Task::OpsWlift => task_ops(cx, out),
        Task::Segment => task_segment(cx, out),
        Task::CheckTakahashi => task_takahashi(cx, out),
        Task::CheckPair => task_pair(cx, out),
        Task::Chebyshev => task_chebyshev(cx, out),
        Task::Descent => task_descent(cx, out),
        Task::Fixpoint => task_fixpoint(cx, out),
        Task::Suite => task_suite(cx, out),
        Task::Validate | Task::SearchCounterexample => unreachable!("handled before loading"),
    }
}

fn task_validate(name: &str, inst: &Instance, out: &mut Out) -> Result<()> {
    match inst.raw_matrix() {
        Some(m) => {
            let v = violations(&m).map_err(invalid(name))?;
            out.value("n", json!(m.len()));
            out.value("violations", strs(&v));
            out.verdict("valid", v.is_empty(), v.first().map(|x| x.to_string()));
        }
        None => {
            let l = inst.load().map_err(invalid(name))?;
            out.value("n", json!(l.space.len()));
            out.value("violations", json!([]));
            out.verdict("valid", true, None);
        }
    }
    Ok(())
}

fn embedding_checks<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<Vec<HullPoint<S>>> {
    let s = &cx.space;
    let n = s.len();
    let emb: Vec<HullPoint<S>> = (0..n).map(|i| embed(s, i).map_err(invalid("embed"))).collect::<Result<_>>()?;
    let mut first_bad = None;
    for i in 0..n {
        for j in 0..n {
            let d = q_hull(s, &emb[i], &emb[j]).map_err(invalid("q_hull"))?;
            if !cx.ineq.eq(out, "isometry", d, s.dist(j, i)) && first_bad.is_none() {
                first_bad = Some(format!("q_hull(f{i}, f{j}) = {d} but q({j}, {i}) = {}", s.dist(j, i)));
            }
        }
    }
    out.verdict("isometry", first_bad.is_none(), first_bad);
    Ok(emb)
}

fn task_embed<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let emb = embedding_checks(cx, out)?;
    out.value("embedding", Value::Array(emb.iter().map(point_value).collect()));
    out.verdict("minimal", true, None);
    Ok(())
}

fn task_minimize<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let p = cx.cfg.pair.as_ref().ok_or_else(|| HarnessError::Config("minimize needs a pair".into()))?;
    let input = p.pair().cast::<S>();
    let s = &cx.space;
    let (res, trace) = minimize_trace(s, &input).map_err(invalid("pair"))?;
    out.value("result", point_value(&res));
    out.value("sweeps", json!(res.sweeps()));
    out.value("trace", Value::Array(trace.iter().map(pair_value).collect()));
    out.verdict("dominated_by_input", res.pair().dominated_by(&input), None);
    let ample = trace.iter().map(|t| is_ample(s, t)).collect::<dihull_core::Result<Vec<_>>>().map_err(invalid("trace"))?;
    out.verdict("ample_every_sweep", ample.iter().all(|&a| a), None);
    out.verdict("within_sweep_cap", res.sweeps() <= sweep_cap(s.len()), None);
    let again = minimize(s, res.pair()).map_err(invalid("result"))?;
    out.verdict("idempotent", again.same_as(&res) && again.sweeps() == 1, None);
    Ok(())
}

/// Triangle, T0 and dual-formula checks over every ordered pair and triple.
fn hull_axioms<S: Scalar>(cx: &Cx<S>, pts: &[HullPoint<S>], out: &mut Out) -> Result<Vec<Vec<S>>> {
    let s = &cx.space;
    let mut dual_ok = true;
    let mut t0_ok = true;
    for f in pts {
        for g in pts {
            let (a, b) = q_hull_formulas(f, g);
            dual_ok &= cx.ineq.eq(out, "dual_formula", a, b);
            t0_ok &= hull_t0_check(s, f, g).map_err(invalid("t0"))?.holds();
        }
    }
    let d = distance_table(s, pts)?;
    let k = pts.len();
    let mut tri = None;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                if !cx.ineq.le(out, "triangle", d[a][c], d[a][b] + d[b][c]) && tri.is_none() {
                    tri = Some(format!("({a}, {b}, {c})"));
                }
            }
        }
    }
    out.verdict("dual_formula", dual_ok, None);
    out.verdict("t0", t0_ok, None);
    out.verdict("triangle", tri.is_none(), tri);
    Ok(d)
}

fn table_value<S: Scalar>(d: &[Vec<S>]) -> Value {
    Value::Array(d.iter().map(|row| strs(row)).collect())
}

fn task_qe<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let d = hull_axioms(cx, &cx.points, out)?;
    out.value("distances", table_value(&d));
    if cx.cfg.points.is_empty() {
        embedding_checks(cx, out)?;
    }
    Ok(())
}

fn probes<S: Scalar>(cx: &Cx<S>) -> Result<Vec<HullPoint<S>>> {
    let mut v: Vec<HullPoint<S>> =
        (0..cx.space.len()).map(|i| embed(&cx.space, i).map_err(invalid("embed"))).collect::<Result<_>>()?;
    v.extend(cx.points.iter().cloned());
    Ok(v)
}

/// Both lifted Takahashi inequalities for `h = W(f, g, l)` against `probes`.
fn lifted_convexity<S: Scalar>(
    cx: &Cx<S>,
    f: &HullPoint<S>,
    g: &HullPoint<S>,
    l: Lambda<S>,
    h: &HullPoint<S>,
    probes: &[HullPoint<S>],
    out: &mut Out,
) -> Result<Option<String>> {
    let s = &cx.space;
    let (a, b) = (l.value(), l.complement().value());
    let d = |x: &HullPoint<S>, y: &HullPoint<S>| q_hull(s, x, y).map_err(invalid("q_hull"));
    for (k, u) in probes.iter().enumerate() {
        if !cx.ineq.le(out, "lifted_into", d(u, h)?, a * d(u, f)? + b * d(u, g)?) {
            return Ok(Some(format!("q(u{k}, W) too large")));
        }
        if !cx.ineq.le(out, "lifted_out_of", d(h, u)?, a * d(f, u)? + b * d(g, u)?) {
            return Ok(Some(format!("q(W, u{k}) too large")));
        }
    }
    Ok(None)
}

fn task_ops<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let pc = cx.cloud()?;
    let f = cx.point(0)?;
    let result = match cx.cfg.task {
        Task::OpsScalar => {
            let t = cx.cfg.scalar.ok_or_else(|| HarnessError::Config("ops scalar needs a scalar".into()))?;
            let t = S::from_rational(t.0);
            out.value("scalar", scalar_value(t));
            out.value("candidate", pair_value(&scalar_mul_candidate(pc, t, f).map_err(invalid("candidate"))?));
            scalar_mul(pc, t, f)
        }
        Task::OpsOplus => {
            let g = cx.point(1)?;
            out.value("candidate", pair_value(&oplus_candidate(pc, f, g).map_err(invalid("candidate"))?));
            oplus(pc, f, g)
        }
        _ => {
            let g = cx.point(1)?;
            let l = *cx.lambdas(&[(1, 2)])?.first().expect("nonempty");
            out.value("lambda", scalar_value(l.value()));
            let h = w_lift(pc, f, g, l);
            if let Ok(h) = &h {
                let bad = lifted_convexity(cx, f, g, l, h, &probes(cx)?, out)?;
                out.verdict("lifted_convexity", bad.is_none(), bad);
            }
            h
        }
    };
    match result {
        Ok(h) => {
            out.value("result", point_value(&h));
            out.verdict("certified", true, None);
        }
        Err(e @ dihull_core::Error::AmplenessLost(_)) => {
            out.value("result", Value::Null);
            out.verdict("certified", false, Some(e.to_string()));
        }
        Err(e) => return Err(invalid("operation")(e)),
    }
    Ok(())
}

const SEGMENT_GRID: [(i128, i128); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];

fn task_segment<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let pc = cx.cloud()?;
    let (f, g) = (cx.point(0)?, cx.point(1)?);
    let ls = cx.lambdas(&SEGMENT_GRID)?;
    let seg = segment(pc, f, g, &ls).map_err(invalid("segment"))?;
    out.value("alpha", scalar_value(seg.alpha));
    out.value("beta", scalar_value(seg.beta));
    out.value("lambdas", strs(&ls.iter().map(|l| l.value()).collect::<Vec<_>>()));
    out.value(
        "table",
        Value::Array(seg.table.iter().map(|row| strs(&row.iter().map(|c| c.actual).collect::<Vec<_>>())).collect()),
    );
    out.value("points", Value::Array(seg.points.iter().map(point_value).collect()));
    let mut law = true;
    for row in &seg.table {
        for c in row {
            law &= cx.ineq.eq(out, "segment_law", c.actual, c.predicted);
        }
    }
    let mut ends = true;
    for e in &seg.endpoints {
        for c in [e.from_start, e.to_end, e.from_end, e.to_start] {
            ends &= cx.ineq.eq(out, "segment_endpoints", c.actual, c.predicted);
        }
    }
    let mism = seg.mismatches();
    out.verdict("segment_law", law, (!mism.is_empty()).then(|| format!("{mism:?}")));
    out.verdict("segment_endpoints", ends, None);
    Ok(())
}

fn build_table<S: Scalar>(cx: &Cx<S>) -> Result<ConvexStructureTable<S>> {
    let grid: Vec<S> = cx.lambdas(&[(0, 1), (1, 2), (1, 1)])?.iter().map(|l| l.value()).collect();
    match cx.cfg.table.as_ref().unwrap_or(&TableSpec::Affine) {
        TableSpec::Affine => ConvexStructureTable::affine(cx.cloud()?, grid).map_err(invalid("table")),
        TableSpec::Cells(c) => ConvexStructureTable::new(cx.space.clone(), grid, c.clone()).map_err(invalid("table")),
    }
}

fn task_takahashi<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let t = build_table(cx)?;
    let dir = check_takahashi(&t, CheckMode::Directed);
    let sym = check_takahashi(&t, CheckMode::Symmetrized);
    out.value("defined_cells", json!(t.defined_cells()));
    out.value("total", json!(t.is_total()));
    out.value("directed", takahashi_value(&dir));
    out.value("symmetrized", takahashi_value(&sym));
    out.verdict("directed", dir.passes(), None);
    out.verdict("symmetrized", sym.passes(), None);
    out.verdict("directed_implies_symmetrized", !dir.passes() || sym.passes(), None);
    Ok(())
}

fn jensen_samples<S: Scalar>(cx: &Cx<S>, n: usize) -> Result<Vec<JensenSample<S>>> {
    let ls = cx.lambdas(&[(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)])?;
    if cx.cfg.samples == 0 {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for &lambda in &ls {
                    v.push(JensenSample { i, j, lambda });
                }
            }
        }
        return Ok(v);
    }
    let mut rng = corpus::rng(cx.cfg.seed);
    (0..cx.cfg.samples)
        .map(|_| {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            let d = rng.random_range(1..=12i128);
            let l = Rational::new(rng.random_range(0..=d), d).expect("nonzero");
            Ok(JensenSample { i, j, lambda: Lambda::new(S::from_rational(l)).map_err(invalid("lambda"))? })
        })
        .collect()
}

fn task_pair<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let pc = cx.cloud()?;
    let samples = jensen_samples(cx, pc.len())?;
    let mut checked = 0;
    let mut failures = Vec::new();
    for (k, p) in cx.points.iter().enumerate() {
        let v = check_wconvex_pair(pc, p, &samples).map_err(invalid("pair"))?;
        checked += v.inequalities_checked;
        if let Some((s, c)) = v.failure {
            failures.push(json!({"point": k, "sample": s, "component": c}));
        }
    }
    out.value("inequalities_checked", json!(checked));
    out.value("failures", Value::Array(failures.clone()));
    out.verdict("wconvex", failures.is_empty(), None);
    Ok(())
}

fn subset<S: Scalar>(cx: &Cx<S>) -> Result<HullSubset<S>> {
    let a = HullSubset::new(cx.space.clone(), cx.points.clone()).map_err(invalid("subset"))?;
    if cx.universe.is_empty() {
        Ok(a)
    } else {
        a.with_universe(cx.universe.clone()).map_err(invalid("universe"))
    }
}

fn task_chebyshev<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let a = subset(cx)?;
    let mut rs = Vec::new();
    for f in a.elements() {
        let r = radii(&a, f).map_err(invalid("radii"))?;
        rs.push(json!({"forward": r.forward.to_string(), "backward": r.backward.to_string(), "radius": r.radius.to_string()}));
    }
    let c = center_and_diameter(&a).map_err(invalid("center"))?;
    out.value("radii", Value::Array(rs));
    out.value("radius", scalar_value(c.radius));
    out.value("centers", json!(c.centers));
    out.value("diameter", scalar_value(c.diameter));
    let ns = match normal_structure_check(&a).map_err(invalid("normal structure"))? {
        NormalStructure::Holds { .. } => "holds",
        NormalStructure::Fails { .. } => "fails",
        NormalStructure::NotApplicable => "not_applicable",
    };
    out.value("normal_structure", json!(ns));
    let bounded = cx.ineq.le(out, "radius_le_diameter", c.radius, c.diameter);
    out.verdict("radius_le_diameter", bounded, None);
    if a.universe().is_some() {
        let idx = double_closure_indices(&a).map_err(invalid("closure"))?;
        let cl = double_closure(&a).map_err(invalid("closure"))?;
        let again = double_closure_indices(&cl).map_err(invalid("closure"))?;
        out.value("double_closure", json!(idx));
        let extensive = a.elements().iter().all(|e| cl.elements().iter().any(|c| c.same_as(e)));
        out.verdict("closure_extensive", extensive, None);
        out.verdict("closure_idempotent", again == idx, None);
    }
    Ok(())
}

fn descent_checks<S: Scalar>(cx: &Cx<S>, a: &HullSubset<S>, out: &mut Out) -> Result<()> {
    let d = cheb_descent(a).map_err(invalid("descent"))?;
    let chain: Vec<Value> = d
        .steps
        .iter()
        .map(|s| json!({"members": s.members, "radius": s.radius.to_string(), "diameter": s.diameter.to_string()}))
        .collect();
    out.value("descent", Value::Array(chain));
    out.value("descent_length", json!(d.steps.len()));
    let outcome = match d.outcome {
        DescentOutcome::Collapsed => "collapsed",
        DescentOutcome::Stalled => "stalled",
    };
    out.value("descent_outcome", json!(outcome));
    let strict = d.steps.windows(2).all(|w| w[1].members.len() < w[0].members.len());
    let last = d.last();
    let terminal = match d.outcome {
        DescentOutcome::Collapsed => last.diameter.is_negligible(),
        DescentOutcome::Stalled => cx.ineq.eq(out, "stall_radius", last.radius, last.diameter),
    };
    out.verdict("descent_strict", strict, None);
    out.verdict("descent_terminal", terminal, None);
    Ok(())
}

fn task_descent<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    descent_checks(cx, &subset(cx)?, out)
}

fn task_fixpoint<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let a = subset(cx)?;
    let mut maps = Vec::new();
    let mut reports = Vec::new();
    let mut invariance_ok = true;
    let mut onto_ok = true;
    for (k, m) in cx.cfg.maps.iter().enumerate() {
        let t = SelfMapTable::new(a.clone(), m.clone()).map_err(invalid(&format!("map {k}")))?;
        let witness = check_nonexpansive(&t);
        let onto = (0..a.len()).all(|i| m.contains(&i));
        let inv = centers_invariant(&t).map_err(invalid("centers"))?;
        if witness.is_none() {
            invariance_ok &= inv;
            onto_ok &= !onto || inv;
        }
        reports.push(json!({
            "nonexpansive": witness.is_none(),
            "witness": witness.map(|(f, g)| json!([f, g])),
            "fixed_points": fixed_points(&t),
            "onto": onto,
            "centers_invariant": inv,
        }));
        maps.push(t);
    }
    out.value("maps", Value::Array(reports));
    let nonexp: Vec<SelfMapTable<S>> = maps.iter().filter(|t| check_nonexpansive(t).is_none()).cloned().collect();
    if !nonexp.is_empty() && nonexp.len() == maps.len() {
        match common_fixed(&maps) {
            Ok(c) => {
                out.value("common_fixed", json!(c.points));
                out.verdict("no_alarm", !c.alarm, c.alarm.then(|| "empty common fixed set after collapse".into()));
            }
            Err(e) => out.value("common_fixed", json!(e.to_string())),
        }
    }
    out.verdict(
        "center_invariance",
        invariance_ok,
        (!invariance_ok).then(|| "a nonexpansive map sends a center outside C(A)".into()),
    );
    out.verdict("center_invariance_onto", onto_ok, None);
    Ok(())
}

fn task_suite<S: Scalar>(cx: &Cx<S>, out: &mut Out) -> Result<()> {
    let emb = embedding_checks(cx, out)?;
    let mut pts = emb.clone();
    if cx.cfg.samples > 0 {
        let mut rng = corpus::rng(cx.cfg.seed);
        for _ in 0..cx.cfg.samples {
            let p = corpus::random_hull_point(&mut rng, cx.exact, 4, &[1, 2]);
            pts.push(minimize(&cx.space, &p.pair().cast()).map_err(invalid("sample"))?);
        }
    }
    let d = hull_axioms(cx, &pts, out)?;
    let n = emb.len();
    out.value("q_hull", table_value(&d[..n].iter().map(|r| r[..n].to_vec()).collect::<Vec<_>>()));
    let a = HullSubset::new(cx.space.clone(), emb.clone()).map_err(invalid("subset"))?;
    let c = center_and_diameter(&a).map_err(invalid("center"))?;
    out.value("radius", scalar_value(c.radius));
    out.value("centers", json!(c.centers));
    out.value("diameter", scalar_value(c.diameter));
    descent_checks(cx, &a, out)?;
    if let Some(pc) = &cx.cloud {
        let ls = cx.lambdas(&SEGMENT_GRID)?;
        let mut cases = 0;
        let mut intertwine = true;
        let mut lifted = None;
        for i in 0..n {
            for j in 0..n {
                for &l in &ls {
                    let Ok(k) = affine_index(pc, i, j, l) else { continue };
                    let h = w_lift(pc, &emb[i], &emb[j], l).map_err(invalid("w_lift"))?;
                    cases += 1;
                    intertwine &= h.same_as(&emb[k]);
                    let bad = lifted_convexity(cx, &emb[i], &emb[j], l, &h, &emb, out)?;
                    lifted = lifted.or(bad.map(|b| format!("(f{i}, f{j}, {}): {b}", l.value())));
                }
            }
        }
        out.value("intertwine_cases", json!(cases));
        out.verdict("intertwine", intertwine, None);
        out.verdict("lifted_convexity", lifted.is_none(), lifted);
        if n >= 2 {
            // off-grid weights can leave the discretized hull; that is a skip, not a failure
            match segment(pc, &emb[0], &emb[n - 1], &ls) {
                Ok(seg) => {
                    out.value("segment_alpha", scalar_value(seg.alpha));
                    out.value("segment_beta", scalar_value(seg.beta));
                    out.verdict("segment_law", seg.all_match(), None);
                }
                Err(dihull_core::Error::AmplenessLost(w)) => out.value("segment_skipped", json!(format!("{w:?}"))),
                Err(e) => return Err(invalid("segment")(e)),
            }
        }
    }
    Ok(())
}

fn task_search(cfg: &ExperimentConfig, out: &mut Out) -> Result<()> {
    let grid: Vec<Rational> = if cfg.lambdas.is_empty() {
        vec![Rational::new(1, 2).expect("nonzero")]
    } else {
        cfg.lambdas.iter().map(|n: &Num| n.0).collect()
    };
    out.value("grid", strs(&grid));
    match counterexample_search(cfg.max_n, &grid, cfg.bound) {
        Ok(c) => {
            let t = &c.table;
            out.value("instance", serde_json::to_value(Instance::from_space(t.space())).expect("serializable"));
            out.value("cells", json!(t.cells()));
            out.value("directed", takahashi_value(&c.directed));
            out.value("symmetrized", takahashi_value(&check_takahashi(t, CheckMode::Symmetrized)));
            out.verdict("counterexample_found", true, None);
        }
        Err(e @ dihull_core::Error::SearchExhausted { .. }) => {
            let mut spaces = 0usize;
            let mut blocked = 0usize;
            for n in 2..=cfg.max_n {
                enumerate_spaces(n, cfg.bound, |s| {
                    spaces += 1;
                    blocked += usize::from(blocked_cell(&s, &grid).is_some());
                    None::<()>
                });
            }
            out.value("instance", Value::Null);
            out.value("spaces_enumerated", json!(spaces));
            out.value("spaces_with_blocked_cell", json!(blocked));
            out.verdict("counterexample_found", false, Some(e.to_string()));
        }
        Err(e) => return Err(invalid("search")(e)),
    }
    Ok(())
}
