//! Ample and minimal function pairs over a finite quasi-metric space.
//!
//! A pair `(f1, f2)` of nonnegative vectors is *ample* when
//! `q(i, j) <= f2[i] + f1[j]` for all `i, j`, and *minimal* when no smaller
//! ample pair exists. Minimal pairs are exactly the fixed points of the two
//! clamped sup-representation operators
//!
//! ```text
//! first(f2)[j]  = max(0, max_i q(i, j) - f2[i])
//! second(f1)[i] = max(0, max_j q(i, j) - f1[j])
//! ```
//!
//! and they form the points of the directed injective hull. The hull carries
//! the quasi-metric `q_hull(f, g) = max_j (g1[j] - f1[j])^+`, which agrees
//! with `max_j (f2[j] - g2[j])^+` on minimal pairs; [`q_hull`] computes both.

use alloc::vec::Vec;

use crate::error::{AmpleWitness, Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::space::QSpace;

/// A candidate hull element: two vectors indexed by the base points.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionPair<S = Rational> {
    pub f1: Vec<S>,
    pub f2: Vec<S>,
}

impl<S: Scalar> FunctionPair<S> {
    pub fn new(f1: Vec<S>, f2: Vec<S>) -> Self {
        FunctionPair { f1, f2 }
    }

    pub fn len(&self) -> usize {
        self.f1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f1.is_empty()
    }

    /// Componentwise `self <= other` on both vectors.
    pub fn dominated_by(&self, other: &FunctionPair<S>) -> bool {
        self.f1.iter().zip(&other.f1).all(|(&a, &b)| a.approx_le(b))
            && self.f2.iter().zip(&other.f2).all(|(&a, &b)| a.approx_le(b))
    }

    pub fn approx_eq(&self, other: &FunctionPair<S>) -> bool {
        self.len() == other.len()
            && self.f1.iter().zip(&other.f1).all(|(&a, &b)| a.approx_eq(b))
            && self.f2.iter().zip(&other.f2).all(|(&a, &b)| a.approx_eq(b))
    }

    fn check_dims(&self, n: usize) -> Result<()> {
        for v in [&self.f1, &self.f2] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        Ok(())
    }
}

impl FunctionPair<Rational> {
    pub fn cast<T: Scalar>(&self) -> FunctionPair<T> {
        FunctionPair {
            f1: self.f1.iter().map(|&v| T::from_rational(v)).collect(),
            f2: self.f2.iter().map(|&v| T::from_rational(v)).collect(),
        }
    }
}

/// A minimal pair, certified at construction.
///
/// Only [`minimize`], [`embed`] and [`certify`] produce values of this type,
/// so every `HullPoint` satisfies both clamped fixed-point equations.
#[derive(Debug, Clone)]
pub struct HullPoint<S = Rational> {
    pair: FunctionPair<S>,
    sweeps: usize,
}

/// Equality compares the pairs only.
impl<S: PartialEq> PartialEq for HullPoint<S> {
    fn eq(&self, other: &Self) -> bool {
        self.pair == other.pair
    }
}

impl<S: Scalar> HullPoint<S> {
    pub fn pair(&self) -> &FunctionPair<S> {
        &self.pair
    }

    pub fn f1(&self) -> &[S] {
        &self.pair.f1
    }

    pub fn f2(&self) -> &[S] {
        &self.pair.f2
    }

    pub fn len(&self) -> usize {
        self.pair.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pair.is_empty()
    }

    /// Number of minimization sweeps spent producing this point (0 when
    /// certified directly).
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn into_pair(self) -> FunctionPair<S> {
        self.pair
    }

    /// Componentwise equality within the scalar's tolerance.
    pub fn same_as(&self, other: &HullPoint<S>) -> bool {
        self.pair.approx_eq(&other.pair)
    }
}

/// First violated ampleness or nonnegativity condition, if any.
pub fn ample_witness<S: Scalar>(s: &QSpace<S>, p: &FunctionPair<S>) -> Result<Option<AmpleWitness>> {
    let n = s.len();
    p.check_dims(n)?;
    let zero = S::zero();
    if let Some(index) = p.f1.iter().position(|&v| !zero.approx_le(v)) {
        return Ok(Some(AmpleWitness::NegativeFirst { index }));
    }
    if let Some(index) = p.f2.iter().position(|&v| !zero.approx_le(v)) {
        return Ok(Some(AmpleWitness::NegativeSecond { index }));
    }
    for row in 0..n {
        for col in 0..n {
            if !s.dist(row, col).approx_le(p.f2[row] + p.f1[col]) {
                return Ok(Some(AmpleWitness::Pair { row, col }));
            }
        }
    }
    Ok(None)
}

pub fn is_ample<S: Scalar>(s: &QSpace<S>, p: &FunctionPair<S>) -> Result<bool> {
    Ok(ample_witness(s, p)?.is_none())
}

/// `first(f2)[j] = max(0, max_i q(i, j) - f2[i])`.
pub fn first_from_second<S: Scalar>(s: &QSpace<S>, f2: &[S]) -> Vec<S> {
    let n = s.len();
    (0..n)
        .map(|j| (0..n).fold(S::zero(), |acc, i| acc.max(s.dist(i, j) - f2[i])))
        .collect()
}

/// `second(f1)[i] = max(0, max_j q(i, j) - f1[j])`.
pub fn second_from_first<S: Scalar>(s: &QSpace<S>, f1: &[S]) -> Vec<S> {
    let n = s.len();
    (0..n)
        .map(|i| (0..n).fold(S::zero(), |acc, j| acc.max(s.dist(i, j) - f1[j])))
        .collect()
}

fn slices_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x.approx_eq(y))
}

/// Sweep cap for [`minimize`].
pub fn sweep_cap(n: usize) -> usize {
    2 * n + 2
}

/// Like [`minimize`], additionally returning the pair after every sweep.
pub fn minimize_trace<S: Scalar>(
    s: &QSpace<S>,
    p: &FunctionPair<S>,
) -> Result<(HullPoint<S>, Vec<FunctionPair<S>>)> {
    if let Some(w) = ample_witness(s, p)? {
        return Err(Error::NotAmple(w));
    }
    let cap = sweep_cap(s.len());
    let mut trace = Vec::new();
    let mut cur = p.clone();
    for sweep in 1..=cap {
        let f1 = first_from_second(s, &cur.f2);
        let f2 = second_from_first(s, &f1);
        let next = FunctionPair { f1, f2 };
        if let Some(w) = ample_witness(s, &next)? {
            return Err(Error::AmplenessLost(w));
        }
        debug_assert!(next.dominated_by(&cur));
        let fixed = slices_eq(&next.f1, &cur.f1) && slices_eq(&next.f2, &cur.f2);
        trace.push(next.clone());
        cur = next;
        if fixed {
            return Ok((HullPoint { pair: cur, sweeps: sweep }, trace));
        }
    }
    Err(Error::NonConvergence { sweeps: cap })
}

/// Reduces an ample pair to a minimal pair below it.
///
/// Alternates `f1 <- first(f2)`, `f2 <- second(f1)` until a sweep leaves the
/// pair unchanged. Each iterate stays ample and is dominated by its
/// predecessor; the result is dominated by `p`.
pub fn minimize<S: Scalar>(s: &QSpace<S>, p: &FunctionPair<S>) -> Result<HullPoint<S>> {
    minimize_trace(s, p).map(|(h, _)| h)
}

/// True iff `p` is ample and satisfies both clamped fixed-point equations.
pub fn is_minimal<S: Scalar>(s: &QSpace<S>, p: &FunctionPair<S>) -> Result<bool> {
    if !is_ample(s, p)? {
        return Ok(false);
    }
    Ok(slices_eq(&first_from_second(s, &p.f2), &p.f1) && slices_eq(&second_from_first(s, &p.f1), &p.f2))
}

/// Wraps an already-minimal pair as a [`HullPoint`].
pub fn certify<S: Scalar>(s: &QSpace<S>, p: FunctionPair<S>) -> Result<HullPoint<S>> {
    if is_minimal(s, &p)? {
        Ok(HullPoint { pair: p, sweeps: 0 })
    } else {
        Err(Error::NotMinimal)
    }
}

/// The canonical embedding `x_i -> (q(x_i, .), q(., x_i))`.
pub fn embed<S: Scalar>(s: &QSpace<S>, i: usize) -> Result<HullPoint<S>> {
    s.check_index(i)?;
    let n = s.len();
    let pair = FunctionPair {
        f1: (0..n).map(|j| s.dist(i, j)).collect(),
        f2: (0..n).map(|j| s.dist(j, i)).collect(),
    };
    certify(s, pair)
}

fn sup_pos_diff<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc.max(x - y))
}

fn check_point<S: Scalar>(s: &QSpace<S>, f: &HullPoint<S>) -> Result<()> {
    f.pair.check_dims(s.len())
}

/// Hull distance from `f` to `g`.
///
/// Computes `max_j (g1 - f1)^+` and cross-checks it against the dual form
/// `max_j (f2 - g2)^+`.
pub fn q_hull<S: Scalar>(s: &QSpace<S>, f: &HullPoint<S>, g: &HullPoint<S>) -> Result<S> {
    check_point(s, f)?;
    check_point(s, g)?;
    let primal = sup_pos_diff(g.f1(), f.f1());
    let dual = sup_pos_diff(f.f2(), g.f2());
    if primal.approx_eq(dual) {
        Ok(primal)
    } else {
        Err(Error::DualFormulaMismatch)
    }
}

/// Both formulas for the hull distance, without the consistency check.
pub fn q_hull_formulas<S: Scalar>(f: &HullPoint<S>, g: &HullPoint<S>) -> (S, S) {
    (sup_pos_diff(g.f1(), f.f1()), sup_pos_diff(f.f2(), g.f2()))
}

/// Conjugate hull distance `q_hull^t(f, g) = q_hull(g, f)`.
///
/// All four expressions (both orientations of both formulas) must agree.
pub fn q_hull_conjugate<S: Scalar>(s: &QSpace<S>, f: &HullPoint<S>, g: &HullPoint<S>) -> Result<S> {
    let v = q_hull(s, g, f)?;
    let alt1 = sup_pos_diff(f.f1(), g.f1());
    let alt2 = sup_pos_diff(g.f2(), f.f2());
    if v.approx_eq(alt1) && v.approx_eq(alt2) {
        Ok(v)
    } else {
        Err(Error::DualFormulaMismatch)
    }
}

/// Outcome of [`hull_t0_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T0Check<S> {
    pub forward: S,
    pub backward: S,
    /// Both directed distances vanish.
    pub indiscernible: bool,
    /// The points agree componentwise.
    pub equal: bool,
}

impl<S> T0Check<S> {
    /// Separation holds: indiscernible points are equal.
    pub fn holds(&self) -> bool {
        !self.indiscernible || self.equal
    }
}

pub fn hull_t0_check<S: Scalar>(s: &QSpace<S>, f: &HullPoint<S>, g: &HullPoint<S>) -> Result<T0Check<S>> {
    let forward = q_hull(s, f, g)?;
    let backward = q_hull(s, g, f)?;
    Ok(T0Check {
        forward,
        backward,
        indiscernible: forward.is_negligible() && backward.is_negligible(),
        equal: f.same_as(g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| r(x)).collect()
    }

    fn pair(a: &[i64], b: &[i64]) -> FunctionPair {
        FunctionPair::new(v(a), v(b))
    }

    fn triangle() -> QSpace {
        QSpace::new(vec![v(&[0, 0, 0]), v(&[1, 0, 0]), v(&[2, 1, 0])]).unwrap()
    }

    fn one_point() -> QSpace {
        QSpace::new(vec![v(&[0])]).unwrap()
    }

    #[test]
    fn ampleness_examples() {
        let s = triangle();
        // full scan of the nine inequalities
        let p = pair(&[2, 1, 1], &[1, 1, 2]);
        for i in 0..3 {
            for j in 0..3 {
                assert!(s.dist(i, j) <= p.f2[i] + p.f1[j]);
            }
        }
        assert!(is_ample(&s, &p).unwrap());
        assert_eq!(
            ample_witness(&s, &pair(&[0, 0, 0], &[0, 0, 0])).unwrap(),
            Some(AmpleWitness::Pair { row: 1, col: 0 })
        );
        assert!(is_ample(&s, embed(&s, 0).unwrap().pair()).unwrap());
        assert_eq!(
            ample_witness(&s, &pair(&[0, -1, 5], &[5, 5, 5])).unwrap(),
            Some(AmpleWitness::NegativeFirst { index: 1 })
        );
        assert_eq!(
            is_ample(&s, &pair(&[0, 0], &[0, 0])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn minimize_worked_example() {
        let s = triangle();
        let p = pair(&[2, 1, 1], &[1, 1, 2]);
        let (h, trace) = minimize_trace(&s, &p).unwrap();
        assert_eq!(h.pair(), &pair(&[0, 0, 0], &[0, 1, 2]));
        assert_eq!(h, embed(&s, 0).unwrap());
        assert_eq!(trace.len(), 2);
        assert!(h.pair().dominated_by(&p));
    }

    #[test]
    fn minimize_is_idempotent() {
        let s = triangle();
        let e = embed(&s, 1).unwrap();
        let h = minimize(&s, e.pair()).unwrap();
        assert_eq!(h.pair(), e.pair());
        assert_eq!(h.sweeps(), 1);
    }

    #[test]
    fn minimize_one_point() {
        let s = one_point();
        let h = minimize(&s, &pair(&[0], &[5])).unwrap();
        assert_eq!(h.pair(), &pair(&[0], &[0]));
    }

    #[test]
    fn minimize_rejects_non_ample() {
        let s = triangle();
        assert_eq!(
            minimize(&s, &pair(&[0, 0, 0], &[0, 0, 0])),
            Err(Error::NotAmple(AmpleWitness::Pair { row: 1, col: 0 }))
        );
    }

    #[test]
    fn minimality_examples() {
        let s = triangle();
        assert!(is_minimal(&s, &pair(&[0, 0, 0], &[0, 1, 2])).unwrap());
        assert!(!is_minimal(&s, &pair(&[2, 1, 1], &[1, 1, 2])).unwrap());
        assert!(is_minimal(&one_point(), &pair(&[0], &[0])).unwrap());
        assert_eq!(certify(&s, pair(&[2, 1, 1], &[1, 1, 2])), Err(Error::NotMinimal));
    }

    #[test]
    fn embedding_examples() {
        let s = triangle();
        assert_eq!(embed(&s, 0).unwrap().pair(), &pair(&[0, 0, 0], &[0, 1, 2]));
        assert_eq!(embed(&s, 1).unwrap().pair(), &pair(&[1, 0, 0], &[0, 0, 1]));
        assert_eq!(embed(&one_point(), 0).unwrap().pair(), &pair(&[0], &[0]));
        assert_eq!(embed(&s, 3), Err(Error::IndexOutOfRange { index: 3, len: 3 }));
    }

    #[test]
    fn hull_distance_examples() {
        let s = triangle();
        let f0 = embed(&s, 0).unwrap();
        let f2 = embed(&s, 2).unwrap();
        assert_eq!(q_hull_formulas(&f0, &f2), (r(2), r(2)));
        assert_eq!(q_hull(&s, &f0, &f2).unwrap(), r(2));
        assert_eq!(q_hull(&s, &f0, &f0).unwrap(), r(0));
        assert_eq!(q_hull(&s, &f2, &f0).unwrap(), r(0));
        assert_eq!(q_hull_conjugate(&s, &f0, &f2).unwrap(), r(0));
        assert_eq!(q_hull_conjugate(&s, &f2, &f2).unwrap(), r(0));
    }

    #[test]
    fn symmetric_case_collapses() {
        let s = QSpace::new(vec![v(&[0, 1]), v(&[1, 0])]).unwrap();
        let a = embed(&s, 0).unwrap();
        let b = embed(&s, 1).unwrap();
        assert_eq!(q_hull(&s, &a, &b).unwrap(), r(1));
        assert_eq!(q_hull_conjugate(&s, &a, &b).unwrap(), r(1));
    }

    #[test]
    fn t0_examples() {
        let s = triangle();
        let f1 = embed(&s, 1).unwrap();
        let c = hull_t0_check(&s, &f1, &f1).unwrap();
        assert!(c.indiscernible && c.equal && c.holds());
        let c = hull_t0_check(&s, &embed(&s, 0).unwrap(), &embed(&s, 2).unwrap()).unwrap();
        assert_eq!((c.forward, c.backward), (r(2), r(0)));
        assert!(!c.indiscernible && c.holds());
    }

    #[test]
    fn float_mode_agrees_on_worked_example() {
        let s: QSpace<f64> = triangle().cast();
        let p = pair(&[2, 1, 1], &[1, 1, 2]).cast::<f64>();
        let h = minimize(&s, &p).unwrap();
        assert_eq!(h.f2(), &[0.0, 1.0, 2.0]);
    }
}
