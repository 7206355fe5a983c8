//! Takahashi convexity structures on finite spaces, W-convex sets and pairs,
//! uniqueness probes, and the search for structures that are convex for the
//! symmetrized metric but not for the directed quasi-metric.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hull::{q_hull, HullPoint};
use crate::linops::{w_lift, ExtendedEval, Lambda};
use crate::scalar::{Rational, Scalar};
use crate::space::{violations, PointCloud, QSpace};

/// A convexity map `W(x_i, x_j, lambda_l)` tabulated on a finite weight grid.
///
/// Cells may be undefined (`None`), e.g. for the affine map on a cloud whose
/// combinations leave the base set; checks skip undefined cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexStructureTable<S: Scalar = Rational> {
    space: QSpace<S>,
    grid: Vec<S>,
    cells: Vec<Option<usize>>,
}

impl<S: Scalar> ConvexStructureTable<S> {
    pub fn new(space: QSpace<S>, grid: Vec<S>, cells: Vec<Option<usize>>) -> Result<Self> {
        let n = space.len();
        if grid.iter().any(|&l| l < S::zero() || l > S::one()) {
            return Err(Error::LambdaOutOfRange);
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) || cells.len() != n * n * grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(&Some(index)) = cells.iter().find(|c| matches!(c, Some(k) if *k >= n)) {
            return Err(Error::IndexOutOfRange { index, len: n });
        }
        Ok(ConvexStructureTable { space, grid, cells })
    }

    /// A fully defined table from a rule.
    pub fn from_fn(space: QSpace<S>, grid: Vec<S>, mut rule: impl FnMut(usize, usize, usize) -> usize) -> Result<Self> {
        let n = space.len();
        let mut cells = Vec::with_capacity(n * n * grid.len());
        for x in 0..n {
            for y in 0..n {
                for l in 0..grid.len() {
                    cells.push(Some(rule(x, y, l)));
                }
            }
        }
        Self::new(space, grid, cells)
    }

    /// The affine map `lambda x + (1 - lambda) y`, defined where the
    /// combination is a base point.
    pub fn affine(pc: &PointCloud<S>, grid: Vec<S>) -> Result<Self> {
        let n = pc.len();
        let mut cells = Vec::with_capacity(n * n * grid.len());
        for x in 0..n {
            for y in 0..n {
                for &l in &grid {
                    let m = S::one() - l;
                    let c: Vec<S> = pc.point(x).iter().zip(pc.point(y)).map(|(&a, &b)| l * a + m * b).collect();
                    cells.push(pc.index_of(&c));
                }
            }
        }
        Self::new(pc.space().clone(), grid, cells)
    }

    pub fn space(&self) -> &QSpace<S> {
        &self.space
    }

    pub fn grid(&self) -> &[S] {
        &self.grid
    }

    pub fn cells(&self) -> &[Option<usize>] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize, l: usize) -> Option<usize> {
        let n = self.space.len();
        self.cells[(x * n + y) * self.grid.len() + l]
    }

    pub fn is_total(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn defined_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Both inequalities against `q`.
    Directed,
    /// The single inequality against `max(q, q^t)`.
    Symmetrized,
}

/// A failing instance `(z, x, y, lambda)` with `w = W(x, y, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TakahashiWitness {
    pub z: usize,
    pub x: usize,
    pub y: usize,
    pub lambda: usize,
    pub w: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TakahashiVerdict {
    /// First failure of `q(z, w) <= l q(z, x) + (1 - l) q(z, y)`.
    pub into: Option<TakahashiWitness>,
    /// First failure of `q(w, z) <= l q(x, z) + (1 - l) q(y, z)`.
    pub out_of: Option<TakahashiWitness>,
    pub cells_checked: usize,
}

impl TakahashiVerdict {
    pub fn passes(&self) -> bool {
        self.into.is_none() && self.out_of.is_none()
    }
}

fn into_ok<S: Scalar>(q: &QSpace<S>, z: usize, x: usize, y: usize, l: S, w: usize) -> bool {
    q.dist(z, w).approx_le(l * q.dist(z, x) + (S::one() - l) * q.dist(z, y))
}

fn out_ok<S: Scalar>(q: &QSpace<S>, z: usize, x: usize, y: usize, l: S, w: usize) -> bool {
    q.dist(w, z).approx_le(l * q.dist(x, z) + (S::one() - l) * q.dist(y, z))
}

/// Whether `w` is an admissible value of `W(x, y, l)` for all `z`.
fn cell_ok<S: Scalar>(q: &QSpace<S>, x: usize, y: usize, l: S, w: usize, both: bool) -> bool {
    (0..q.len()).all(|z| into_ok(q, z, x, y, l, w) && (!both || out_ok(q, z, x, y, l, w)))
}

/// Checks the Takahashi inequalities over every defined cell.
pub fn check_takahashi<S: Scalar>(t: &ConvexStructureTable<S>, mode: CheckMode) -> TakahashiVerdict {
    let sym;
    let q = match mode {
        CheckMode::Directed => &t.space,
        CheckMode::Symmetrized => {
            sym = t.space.symmetrize();
            &sym
        }
    };
    let n = q.len();
    let mut verdict = TakahashiVerdict { into: None, out_of: None, cells_checked: 0 };
    for x in 0..n {
        for y in 0..n {
            for (li, &l) in t.grid.iter().enumerate() {
                let Some(w) = t.get(x, y, li) else { continue };
                verdict.cells_checked += 1;
                for z in 0..n {
                    let wit = TakahashiWitness { z, x, y, lambda: li, w };
                    if verdict.into.is_none() && !into_ok(q, z, x, y, l, w) {
                        verdict.into = Some(wit);
                    }
                    if mode == CheckMode::Directed && verdict.out_of.is_none() && !out_ok(q, z, x, y, l, w) {
                        verdict.out_of = Some(wit);
                    }
                }
            }
        }
    }
    verdict
}

/// First `(x, y, lambda, W(x, y, lambda))` with `x, y` in `c` and the image
/// outside `c`.
pub fn check_wconvex_set<S: Scalar>(t: &ConvexStructureTable<S>, c: &[usize]) -> Result<Option<(usize, usize, usize, usize)>> {
    for &i in c {
        t.space.check_index(i)?;
    }
    for &x in c {
        for &y in c {
            for l in 0..t.grid.len() {
                if let Some(w) = t.get(x, y, l) {
                    if !c.contains(&w) {
                        return Ok(Some((x, y, l, w)));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A Jensen sample `(i, j, lambda)` for the affine map on a cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenSample<S: Scalar = Rational> {
    pub i: usize,
    pub j: usize,
    pub lambda: Lambda<S>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConvexity {
    pub inequalities_checked: usize,
    /// First failing `(sample index, component)` with component 1 or 2.
    pub failure: Option<(usize, u8)>,
}

impl PairConvexity {
    pub fn passes(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `f_k(l x + (1 - l) y) <= l f_k(x) + (1 - l) f_k(y)` for both
/// components at each sample, evaluating off-base combinations through the
/// sup-representation.
pub fn check_wconvex_pair<S: Scalar>(
    pc: &PointCloud<S>,
    p: &HullPoint<S>,
    samples: &[JensenSample<S>],
) -> Result<PairConvexity> {
    if p.len() != pc.len() {
        return Err(Error::DimensionMismatch { expected: pc.len(), found: p.len() });
    }
    let ext = ExtendedEval::new(pc, p);
    let mut out = PairConvexity { inequalities_checked: 0, failure: None };
    for (k, s) in samples.iter().enumerate() {
        pc.space().check_index(s.i)?;
        pc.space().check_index(s.j)?;
        let l = s.lambda.value();
        let m = S::one() - l;
        let c: Vec<S> = pc.point(s.i).iter().zip(pc.point(s.j)).map(|(&a, &b)| l * a + m * b).collect();
        let lhs1 = ext.first(&c);
        let rhs1 = l * p.f1()[s.i] + m * p.f1()[s.j];
        let lhs2 = ext.second(&c);
        let rhs2 = l * p.f2()[s.i] + m * p.f2()[s.j];
        out.inequalities_checked += 2;
        if out.failure.is_none() {
            if !lhs1.approx_le(rhs1) {
                out.failure = Some((k, 1));
            } else if !lhs2.approx_le(rhs2) {
                out.failure = Some((k, 2));
            }
        }
    }
    Ok(out)
}

/// Which uniqueness inequality a probe `u` breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeFailure {
    /// `q(u, h) > l q(u, f) + (1 - l) q(u, g)`.
    Into(usize),
    /// `q(h, u) > l q(f, u) + (1 - l) q(g, u)`.
    OutOf(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniquenessVerdict {
    /// `h` satisfies both inequalities against every probe.
    pub satisfies: bool,
    /// `h` equals the lifted combination `W(f, g, lambda)`.
    pub equals_lift: bool,
    /// No probes were given, so satisfaction is vacuous.
    pub inconclusive: bool,
    pub failure: Option<ProbeFailure>,
}

impl UniquenessVerdict {
    /// `h` is a distinct point passing every probe: a refutation of
    /// uniqueness relative to the probe set.
    pub fn refutes_uniqueness(&self) -> bool {
        self.satisfies && !self.equals_lift && !self.inconclusive
    }
}

/// Tests a candidate `h` against the two uniqueness inequalities for
/// `(f, g, lambda)` on a finite probe set.
pub fn uniqueness_competitor<S: Scalar>(
    pc: &PointCloud<S>,
    f: &HullPoint<S>,
    g: &HullPoint<S>,
    lambda: Lambda<S>,
    h: &HullPoint<S>,
    probes: &[HullPoint<S>],
) -> Result<UniquenessVerdict> {
    let s = pc.space();
    let l = lambda.value();
    let m = S::one() - l;
    let mut failure = None;
    for (k, u) in probes.iter().enumerate() {
        if !q_hull(s, u, h)?.approx_le(l * q_hull(s, u, f)? + m * q_hull(s, u, g)?) {
            failure = Some(ProbeFailure::Into(k));
            break;
        }
        if !q_hull(s, h, u)?.approx_le(l * q_hull(s, f, u)? + m * q_hull(s, g, u)?) {
            failure = Some(ProbeFailure::OutOf(k));
            break;
        }
    }
    let lift = w_lift(pc, f, g, lambda)?;
    Ok(UniquenessVerdict {
        satisfies: failure.is_none(),
        equals_lift: lift.same_as(h),
        inconclusive: probes.is_empty(),
        failure,
    })
}

/// First cell `(x, y, lambda index)` of `grid` for which no point of `q` is
/// admissible under the symmetrized inequality, so that no total table on
/// `q` passes the symmetrized check.
///
/// On a finite space with two or more points this is never `None` once the
/// grid contains some `0 < lambda < 1`: for a closest pair `x != y` at
/// distance `d`, the value would have to lie within `(1 - lambda) d` of `x`
/// and `lambda d` of `y`.
pub fn blocked_cell<S: Scalar>(q: &QSpace<S>, grid: &[S]) -> Option<(usize, usize, usize)> {
    let sym = q.symmetrize();
    let n = q.len();
    for x in 0..n {
        for y in 0..n {
            for (li, &l) in grid.iter().enumerate() {
                if !(0..n).any(|w| cell_ok(&sym, x, y, l, w, false)) {
                    return Some((x, y, li));
                }
            }
        }
    }
    None
}

/// A structure convex for the symmetrized metric but not for `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub table: ConvexStructureTable<Rational>,
    /// The directed check's verdict, with at least one witness.
    pub directed: TakahashiVerdict,
}

/// Largest space size [`counterexample_search`] accepts.
pub const MAX_SEARCH_POINTS: usize = 5;

/// Lexicographically first total table, in cell order `(x, y, lambda)`, whose
/// cells are all symmetrized-admissible and at least one is not
/// directed-admissible.
///
/// The admissibility of a value in one cell does not depend on the other
/// cells, so the lexicographic minimum is assembled cell by cell.
fn first_separating_table(q: &QSpace<Rational>, grid: &[Rational]) -> Option<Vec<usize>> {
    let n = q.len();
    let sym = q.symmetrize();
    let mut base = Vec::with_capacity(n * n * grid.len());
    let mut last_bad: Option<(usize, usize)> = None;
    for x in 0..n {
        for y in 0..n {
            for &l in grid {
                let cell = base.len();
                let mut min_ok = None;
                let mut min_bad = None;
                for w in 0..n {
                    if !cell_ok(&sym, x, y, l, w, false) {
                        continue;
                    }
                    if min_ok.is_none() {
                        min_ok = Some(w);
                    }
                    if min_bad.is_none() && !cell_ok(q, x, y, l, w, true) {
                        min_bad = Some(w);
                    }
                }
                base.push(min_ok?);
                if let Some(b) = min_bad {
                    last_bad = Some((cell, b));
                }
            }
        }
    }
    let (cell, bad) = last_bad?;
    let already_failing = base.iter().enumerate().any(|(c, &w)| {
        let l = grid[c % grid.len()];
        let xy = c / grid.len();
        !cell_ok(q, xy / n, xy % n, l, w, true)
    });
    if !already_failing {
        base[cell] = bad;
    }
    Some(base)
}

/// Calls `visit` on every valid space with `n` points and integer entries in
/// `0..=bound`, in lexicographic order of the off-diagonal entries (row-major,
/// first entry most significant). Stops when `visit` returns `Some`.
pub fn enumerate_spaces<T>(
    n: usize,
    bound: u32,
    mut visit: impl FnMut(QSpace<Rational>) -> Option<T>,
) -> Option<T> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut digits = vec![0u32; slots.len()];
    loop {
        let mut m = vec![vec![Rational::ZERO; n]; n];
        for (&(i, j), &d) in slots.iter().zip(&digits) {
            m[i][j] = Rational::from(d as i64);
        }
        if violations(&m).map(|v| v.is_empty()).unwrap_or(false) {
            let space = QSpace::new(m).expect("validated above");
            if let Some(found) = visit(space) {
                return Some(found);
            }
        }
        // increment, last slot least significant
        let mut k = digits.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if digits[k] < bound {
                digits[k] += 1;
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Searches spaces with up to `max_n` points and integer entries in
/// `0..=bound` for a total table on `grid` that passes the symmetrized
/// Takahashi check but fails the directed one.
///
/// Order is lexicographic in `(n, matrix, table)`, so the result is
/// reproducible. The returned instance has been re-checked with
/// [`check_takahashi`] in both modes.
pub fn counterexample_search(max_n: usize, grid: &[Rational], bound: u32) -> Result<Counterexample> {
    if max_n > MAX_SEARCH_POINTS {
        return Err(Error::SearchTooLarge { max_n, limit: MAX_SEARCH_POINTS });
    }
    if grid.iter().any(|&l| l < Rational::ZERO || l > Rational::ONE) {
        return Err(Error::LambdaOutOfRange);
    }
    for n in 1..=max_n {
        let found = enumerate_spaces(n, bound, |q| {
            let cells = first_separating_table(&q, grid)?;
            let table = ConvexStructureTable::new(q, grid.to_vec(), cells.into_iter().map(Some).collect()).ok()?;
            let sym = check_takahashi(&table, CheckMode::Symmetrized);
            let directed = check_takahashi(&table, CheckMode::Directed);
            assert!(sym.passes() && !directed.passes(), "search produced an unverified instance");
            Some(Counterexample { table, directed })
        });
        if let Some(c) = found {
            return Ok(c);
        }
    }
    Err(Error::SearchExhausted { max_n, bound })
}
