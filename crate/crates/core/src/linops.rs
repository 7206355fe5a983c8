//! Vector operations on the hull of an asymmetrically normed point cloud.
//!
//! Hull elements are stored as pairs over the finite base cloud. Operations
//! that need values off the base set evaluate the canonical sup-representation
//!
//! ```text
//! ext1(w) = max(0, max_i |p_i - w| - f2[i])
//! ext2(w) = max(0, max_j |w - p_j| - f1[j])
//! ```
//!
//! and the supremum in the sup-convolution ranges over the base points.
//! Every result is ample-checked and re-minimized before it is returned.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hull::{ample_witness, minimize, q_hull, FunctionPair, HullPoint};
use crate::scalar::{Rational, Scalar};
use crate::space::PointCloud;

/// Evaluates a hull element at arbitrary vectors through its
/// sup-representation over the base cloud.
#[derive(Debug, Clone, Copy)]
pub struct ExtendedEval<'a, S: Scalar = Rational> {
    cloud: &'a PointCloud<S>,
    pair: &'a FunctionPair<S>,
}

impl<'a, S: Scalar> ExtendedEval<'a, S> {
    pub fn new(cloud: &'a PointCloud<S>, point: &'a HullPoint<S>) -> Self {
        ExtendedEval { cloud, pair: point.pair() }
    }

    /// `max(0, max_i |p_i - w| - f2[i])`.
    pub fn first(&self, w: &[S]) -> S {
        let g = self.cloud.gauge();
        self.cloud
            .points()
            .iter()
            .zip(&self.pair.f2)
            .fold(S::zero(), |acc, (p, &f2)| acc.max(g.norm_diff(p, w) - f2))
    }

    /// `max(0, max_j |w - p_j| - f1[j])`.
    pub fn second(&self, w: &[S]) -> S {
        let g = self.cloud.gauge();
        self.cloud
            .points()
            .iter()
            .zip(&self.pair.f1)
            .fold(S::zero(), |acc, (p, &f1)| acc.max(g.norm_diff(w, p) - f1))
    }
}

/// A convex-combination weight in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Lambda<S = Rational>(S);

impl<S: Scalar> Lambda<S> {
    pub fn new(value: S) -> Result<Self> {
        if value < S::zero() || value > S::one() {
            Err(Error::LambdaOutOfRange)
        } else {
            Ok(Lambda(value))
        }
    }

    pub fn value(self) -> S {
        self.0
    }

    /// `1 - lambda`.
    pub fn complement(self) -> Self {
        Lambda(S::one() - self.0)
    }
}

fn check_point<S: Scalar>(pc: &PointCloud<S>, f: &HullPoint<S>) -> Result<()> {
    if f.len() != pc.len() || f.f2().len() != pc.len() {
        return Err(Error::DimensionMismatch { expected: pc.len(), found: f.len() });
    }
    Ok(())
}

fn scale<S: Scalar>(p: &[S], t: S) -> Vec<S> {
    p.iter().map(|&x| x * t).collect()
}

fn recertify<S: Scalar>(pc: &PointCloud<S>, candidate: FunctionPair<S>) -> Result<HullPoint<S>> {
    if let Some(w) = ample_witness(pc.space(), &candidate)? {
        return Err(Error::AmplenessLost(w));
    }
    minimize(pc.space(), &candidate)
}

/// Raw candidate for `t f` before minimization.
pub fn scalar_mul_candidate<S: Scalar>(pc: &PointCloud<S>, t: S, f: &HullPoint<S>) -> Result<FunctionPair<S>> {
    check_point(pc, f)?;
    let zero = S::zero();
    if t == zero {
        // the embedding of the origin, which need not be a base point
        let o = vec![zero; pc.dim()];
        let g = pc.gauge();
        let f1 = pc.points().iter().map(|p| g.norm_diff(&o, p)).collect();
        let f2 = pc.points().iter().map(|p| g.norm_diff(p, &o)).collect();
        return Ok(FunctionPair::new(f1, f2));
    }
    let ext = ExtendedEval::new(pc, f);
    let inv = S::one() / t;
    let mag = t.abs();
    let mut f1 = Vec::with_capacity(pc.len());
    let mut f2 = Vec::with_capacity(pc.len());
    for p in pc.points() {
        let w = scale(p, inv);
        let (a, b) = (ext.first(&w), ext.second(&w));
        if t > zero {
            f1.push(mag * a);
            f2.push(mag * b);
        } else {
            f1.push(mag * b);
            f2.push(mag * a);
        }
    }
    Ok(FunctionPair::new(f1, f2))
}

/// Scalar action `t f` on the hull.
///
/// For `t > 0` the components are `t * ext_k(x / t)`; `t < 0` swaps the
/// components and uses `|t|`; `t = 0` starts from the embedding of the origin. The candidate
/// is then minimized over the base cloud.
pub fn scalar_mul<S: Scalar>(pc: &PointCloud<S>, t: S, f: &HullPoint<S>) -> Result<HullPoint<S>> {
    let c = scalar_mul_candidate(pc, t, f)?;
    recertify(pc, c)
}

/// Raw candidate for `f (+) g` before minimization.
pub fn oplus_candidate<S: Scalar>(pc: &PointCloud<S>, f: &HullPoint<S>, g: &HullPoint<S>) -> Result<FunctionPair<S>> {
    check_point(pc, f)?;
    check_point(pc, g)?;
    let ext = ExtendedEval::new(pc, f);
    let n = pc.len();
    let mut h1 = vec![S::zero(); n];
    let mut h2 = vec![S::zero(); n];
    let mut diff = vec![S::zero(); pc.dim()];
    for (j, x) in pc.points().iter().enumerate() {
        for (z, pz) in pc.points().iter().enumerate() {
            for (d, (&a, &b)) in diff.iter_mut().zip(x.iter().zip(pz)) {
                *d = a - b;
            }
            h1[j] = h1[j].max(ext.first(&diff) - g.f2()[z]);
            h2[j] = h2[j].max(ext.second(&diff) - g.f1()[z]);
        }
    }
    Ok(FunctionPair::new(h1, h2))
}

/// Hull addition by sup-convolution over the base points:
///
/// ```text
/// h1(x) = max_z ext1_f(x - z) - g2(z)
/// h2(x) = max_z ext2_f(x - z) - g1(z)
/// ```
pub fn oplus<S: Scalar>(pc: &PointCloud<S>, f: &HullPoint<S>, g: &HullPoint<S>) -> Result<HullPoint<S>> {
    let c = oplus_candidate(pc, f, g)?;
    recertify(pc, c)
}

/// Lifted convexity map `lambda f (+) (1 - lambda) g`.
pub fn w_lift<S: Scalar>(
    pc: &PointCloud<S>,
    f: &HullPoint<S>,
    g: &HullPoint<S>,
    lambda: Lambda<S>,
) -> Result<HullPoint<S>> {
    let a = scalar_mul(pc, lambda.value(), f)?;
    let b = scalar_mul(pc, lambda.complement().value(), g)?;
    oplus(pc, &a, &b)
}

/// Index of the base point `lambda p_i + (1 - lambda) p_j`. The combination
/// is grid-aligned only when `lambda p_i` and `(1 - lambda) p_j` are base
/// points too, since the discretized operations pass through them.
pub fn affine_index<S: Scalar>(pc: &PointCloud<S>, i: usize, j: usize, lambda: Lambda<S>) -> Result<usize> {
    pc.space().check_index(i)?;
    pc.space().check_index(j)?;
    let l = lambda.value();
    let m = S::one() - l;
    let a: Vec<S> = pc.point(i).iter().map(|&x| l * x).collect();
    let b: Vec<S> = pc.point(j).iter().map(|&x| m * x).collect();
    if pc.index_of(&a).is_none() || pc.index_of(&b).is_none() {
        return Err(Error::OffGridCombination);
    }
    let c: Vec<S> = a.iter().zip(&b).map(|(&x, &y)| x + y).collect();
    pc.index_of(&c).ok_or(Error::OffGridCombination)
}

/// Compares the embedding of `lambda p_i + (1 - lambda) p_j` with the lifted
/// combination of the embeddings of `p_i` and `p_j`.
pub fn intertwine_check<S: Scalar>(pc: &PointCloud<S>, i: usize, j: usize, lambda: Lambda<S>) -> Result<bool> {
    let k = affine_index(pc, i, j, lambda)?;
    let s = pc.space();
    let lhs = crate::hull::embed(s, k)?;
    let rhs = w_lift(pc, &crate::hull::embed(s, i)?, &crate::hull::embed(s, j)?, lambda)?;
    Ok(lhs.same_as(&rhs))
}

/// One cell of a segment distance table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCell<S> {
    pub actual: S,
    pub predicted: S,
}

impl<S: Scalar> SegmentCell<S> {
    pub fn matches(&self) -> bool {
        self.actual.approx_eq(self.predicted)
    }
}

/// Endpoint distances for one parameter of a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointCheck<S> {
    /// `q_hull(f, h)` and its prediction `(1 - lambda) alpha`.
    pub from_start: SegmentCell<S>,
    /// `q_hull(h, g)` and its prediction `lambda alpha`.
    pub to_end: SegmentCell<S>,
    /// `q_hull(g, h)` and its prediction `(1 - lambda) beta`.
    pub from_end: SegmentCell<S>,
    /// `q_hull(h, f)` and its prediction `lambda beta`.
    pub to_start: SegmentCell<S>,
}

impl<S: Scalar> EndpointCheck<S> {
    pub fn matches(&self) -> bool {
        self.from_start.matches() && self.to_end.matches() && self.from_end.matches() && self.to_start.matches()
    }
}

/// Sampled segment `lambda -> W(f, g, lambda)` with its distance table.
#[derive(Debug, Clone)]
pub struct Segment<S: Scalar = Rational> {
    pub lambdas: Vec<Lambda<S>>,
    pub points: Vec<HullPoint<S>>,
    /// `q_hull(f, g)`.
    pub alpha: S,
    /// `q_hull(g, f)`.
    pub beta: S,
    /// `table[a][b]` compares `q_hull(h_a, h_b)` with the directed-interval
    /// prediction.
    pub table: Vec<Vec<SegmentCell<S>>>,
    pub endpoints: Vec<EndpointCheck<S>>,
}

impl<S: Scalar> Segment<S> {
    pub fn all_match(&self) -> bool {
        self.table.iter().flatten().all(SegmentCell::matches) && self.endpoints.iter().all(EndpointCheck::matches)
    }

    pub fn mismatches(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, row) in self.table.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if !c.matches() {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Predicted `q_hull(h_l, h_m)` on a segment: `(l - m) alpha` when `l >= m`,
/// `(m - l) beta` otherwise.
pub fn segment_prediction<S: Scalar>(l: S, m: S, alpha: S, beta: S) -> S {
    if l >= m {
        (l - m) * alpha
    } else {
        (m - l) * beta
    }
}

/// Samples the lifted segment from `f` to `g` at the sorted weights `lambdas`.
pub fn segment<S: Scalar>(
    pc: &PointCloud<S>,
    f: &HullPoint<S>,
    g: &HullPoint<S>,
    lambdas: &[Lambda<S>],
) -> Result<Segment<S>> {
    if lambdas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::GridMismatch);
    }
    let s = pc.space();
    let alpha = q_hull(s, f, g)?;
    let beta = q_hull(s, g, f)?;
    let points = lambdas
        .iter()
        .map(|&l| w_lift(pc, f, g, l))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Vec::with_capacity(points.len());
    for (a, ha) in points.iter().enumerate() {
        let mut row = Vec::with_capacity(points.len());
        for (b, hb) in points.iter().enumerate() {
            row.push(SegmentCell {
                actual: q_hull(s, ha, hb)?,
                predicted: segment_prediction(lambdas[a].value(), lambdas[b].value(), alpha, beta),
            });
        }
        table.push(row);
    }
    let mut endpoints = Vec::with_capacity(points.len());
    for (h, l) in points.iter().zip(lambdas) {
        let (lv, cv) = (l.value(), l.complement().value());
        endpoints.push(EndpointCheck {
            from_start: SegmentCell { actual: q_hull(s, f, h)?, predicted: cv * alpha },
            to_end: SegmentCell { actual: q_hull(s, h, g)?, predicted: lv * alpha },
            from_end: SegmentCell { actual: q_hull(s, g, h)?, predicted: lv * beta },
            to_start: SegmentCell { actual: q_hull(s, h, f)?, predicted: cv * beta },
        });
    }
    Ok(Segment { lambdas: lambdas.to_vec(), points, alpha, beta, table, endpoints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::embed;
    use crate::space::AsymGauge;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn lam(s: &str) -> Lambda {
        Lambda::new(q(s)).unwrap()
    }

    fn line(points: &[i64]) -> PointCloud {
        let g = AsymGauge::new(1, vec![vec![r(1)]]).unwrap();
        PointCloud::new(g, points.iter().map(|&p| vec![r(p)]).collect()).unwrap()
    }

    #[test]
    fn extension_agrees_on_base_points() {
        let pc = line(&[0, 1, 2]);
        let f = embed(pc.space(), 2).unwrap();
        let ext = ExtendedEval::new(&pc, &f);
        for (j, p) in pc.points().iter().enumerate() {
            assert_eq!(ext.first(p), f.f1()[j]);
            assert_eq!(ext.second(p), f.f2()[j]);
        }
        // off the base set an embedded element extends to the gauge distance
        assert_eq!(ext.first(&[q("1/2")]), q("3/2"));
        assert_eq!(ext.second(&[r(5)]), r(3));
    }

    #[test]
    fn lambda_range() {
        assert_eq!(Lambda::new(q("3/2")), Err(Error::LambdaOutOfRange));
        assert_eq!(Lambda::new(q("-1/2")), Err(Error::LambdaOutOfRange));
        assert_eq!(lam("1/4").complement(), lam("3/4"));
    }

    #[test]
    fn scalar_examples() {
        let pc = line(&[0, 1, 2]);
        let s = pc.space();
        let f2 = embed(s, 2).unwrap();
        assert_eq!(scalar_mul(&pc, q("1/2"), &f2).unwrap(), embed(s, 1).unwrap());
        for i in 0..3 {
            let f = embed(s, i).unwrap();
            assert_eq!(scalar_mul(&pc, r(1), &f).unwrap(), f);
        }
        // t = 0 is the embedded origin already
        let c = scalar_mul_candidate(&pc, r(0), &f2).unwrap();
        assert_eq!(c.f1, vec![r(0), r(0), r(0)]);
        assert_eq!(c.f2, vec![r(0), r(1), r(2)]);
        assert_eq!(scalar_mul(&pc, r(0), &f2).unwrap(), embed(s, 0).unwrap());
    }

    #[test]
    fn zero_scalar_on_asymmetric_plane() {
        let g = AsymGauge::new(2, vec![vec![r(1), r(0)], vec![r(0), r(1)], vec![r(-1), r(-1)]]).unwrap();
        let pts = (0..3).flat_map(|a| (0..3).map(move |b| vec![r(a), r(b)])).collect();
        let pc = PointCloud::new(g, pts).unwrap();
        let s = pc.space();
        for i in 0..pc.len() {
            assert_eq!(scalar_mul(&pc, r(0), &embed(s, i).unwrap()).unwrap(), embed(s, 0).unwrap());
        }
    }

    #[test]
    fn negative_scalar_reflects() {
        let pc = line(&[-2, -1, 0, 1, 2]);
        let s = pc.space();
        // -1 * f_x = f_{-x}
        for i in 0..5 {
            let got = scalar_mul(&pc, r(-1), &embed(s, i).unwrap()).unwrap();
            assert_eq!(got, embed(s, 4 - i).unwrap());
        }
    }

    #[test]
    fn oplus_examples() {
        let pc = line(&[0, 1, 2, 3]);
        let s = pc.space();
        let e = |i| embed(s, i).unwrap();
        assert_eq!(oplus(&pc, &e(1), &e(2)).unwrap(), e(3));
        for i in 0..4 {
            assert_eq!(oplus(&pc, &e(i), &e(0)).unwrap(), e(i));
        }
        let single = line(&[0]);
        let z = embed(single.space(), 0).unwrap();
        assert_eq!(oplus(&single, &z, &z).unwrap(), z);
    }

    #[test]
    fn w_lift_examples() {
        let pc = line(&[0, 1, 2]);
        let s = pc.space();
        let e = |i| embed(s, i).unwrap();
        assert_eq!(w_lift(&pc, &e(0), &e(2), lam("1/2")).unwrap(), e(1));
        for i in 0..3 {
            assert_eq!(w_lift(&pc, &e(i), &e(2), lam("1")).unwrap(), e(i));
            for l in ["0", "1/3", "1/2", "1"] {
                assert_eq!(w_lift(&pc, &e(i), &e(i), lam(l)).unwrap(), e(i));
            }
        }
    }

    #[test]
    fn intertwine_examples() {
        let pc = line(&[0, 1, 2]);
        assert!(intertwine_check(&pc, 0, 2, lam("1/2")).unwrap());
        assert!(intertwine_check(&pc, 0, 2, lam("0")).unwrap());
        assert!(intertwine_check(&pc, 0, 2, lam("1")).unwrap());
        assert_eq!(intertwine_check(&pc, 0, 1, lam("1/2")), Err(Error::OffGridCombination));

        let g = AsymGauge::new(2, vec![vec![r(1), r(0)], vec![r(0), r(1)]]).unwrap();
        let mut pts = Vec::new();
        for a in 0..=2 {
            for b in 0..=2 {
                pts.push(vec![r(a), r(b)]);
            }
        }
        let grid = PointCloud::new(g, pts).unwrap();
        let origin = grid.index_of(&[r(0), r(0)]).unwrap();
        let corner = grid.index_of(&[r(2), r(2)]).unwrap();
        assert!(intertwine_check(&grid, origin, corner, lam("1/2")).unwrap());
    }

    #[test]
    fn segment_on_line() {
        let pc = line(&[0, 1, 2]);
        let s = pc.space();
        let (f, g) = (embed(s, 0).unwrap(), embed(s, 2).unwrap());
        let seg = segment(&pc, &f, &g, &[lam("0"), lam("1/2"), lam("1")]).unwrap();
        assert_eq!((seg.alpha, seg.beta), (r(2), r(0)));
        // h_lambda sits at 2 - 2 lambda
        assert_eq!(seg.points[1], embed(s, 1).unwrap());
        assert_eq!(seg.table[2][1].actual, r(1));
        assert_eq!(seg.table[1][2].actual, r(0));
        assert_eq!(seg.table[1][1].actual, r(0));
        assert!(seg.all_match());
        assert_eq!(segment(&pc, &f, &g, &[lam("1"), lam("0")]).unwrap_err(), Error::GridMismatch);
    }
}
