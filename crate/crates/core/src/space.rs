//! Finite T0-quasi-metric spaces and polyhedral asymmetric norms.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A single failed axiom found by [`validate_qspace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NegativeEntry(usize, usize),
    NonzeroDiagonal(usize),
    /// `q[i][k] > q[i][j] + q[j][k]`.
    TriangleViolation(usize, usize, usize),
    /// `q[i][j] = q[j][i] = 0` with `i < j`.
    T0Violation(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NegativeEntry(i, j) => write!(f, "NegativeEntry({i},{j})"),
            Violation::NonzeroDiagonal(i) => write!(f, "NonzeroDiagonal({i})"),
            Violation::TriangleViolation(i, j, k) => write!(f, "TriangleViolation({i},{j},{k})"),
            Violation::T0Violation(i, j) => write!(f, "T0Violation({i},{j})"),
        }
    }
}

/// A validated finite T0-quasi-metric space, stored as its distance matrix.
///
/// `q[i][j]` is the directed distance from point `i` to point `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSpace<S = Rational> {
    q: Vec<Vec<S>>,
}

/// Lists every axiom the square matrix `m` violates.
///
/// Fails with [`Error::NotSquare`] if `m` is ragged.
#[allow(clippy::needless_range_loop)] // matrix code reads best by index
pub fn violations<S: Scalar>(m: &[Vec<S>]) -> Result<Vec<Violation>> {
    let n = m.len();
    for (row, r) in m.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { row, len: r.len(), expected: n });
        }
    }
    let zero = S::zero();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !zero.approx_le(m[i][j]) {
                out.push(Violation::NegativeEntry(i, j));
            }
        }
    }
    for (i, row) in m.iter().enumerate() {
        if !row[i].is_negligible() {
            out.push(Violation::NonzeroDiagonal(i));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !m[i][k].approx_le(m[i][j] + m[j][k]) {
                    out.push(Violation::TriangleViolation(i, j, k));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[i][j].is_negligible() && m[j][i].is_negligible() {
                out.push(Violation::T0Violation(i, j));
            }
        }
    }
    Ok(out)
}

/// Certifies `m` as a T0-quasi-metric or reports every violated axiom.
pub fn validate_qspace<S: Scalar>(m: Vec<Vec<S>>) -> Result<QSpace<S>> {
    let v = violations(&m)?;
    if v.is_empty() {
        Ok(QSpace { q: m })
    } else {
        Err(Error::InvalidSpace(v))
    }
}

impl<S: Scalar> QSpace<S> {
    pub fn new(m: Vec<Vec<S>>) -> Result<Self> {
        validate_qspace(m)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> S {
        self.q[i][j]
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.q
    }

    /// `q^t(x, y) = q(y, x)`.
    pub fn conjugate(&self) -> QSpace<S> {
        let n = self.len();
        let m = (0..n).map(|i| (0..n).map(|j| self.q[j][i]).collect()).collect();
        validate_qspace(m).expect("conjugate of a valid space is valid")
    }

    /// `q^s = max(q, q^t)`, a metric.
    pub fn symmetrize(&self) -> QSpace<S> {
        let n = self.len();
        let m = (0..n)
            .map(|i| (0..n).map(|j| self.q[i][j].max(self.q[j][i])).collect())
            .collect();
        validate_qspace(m).expect("symmetrization of a valid space is valid")
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.q[i][j].approx_eq(self.q[j][i])))
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        }
    }
}

impl QSpace<Rational> {
    /// Converts the exact matrix to another scalar type.
    pub fn cast<T: Scalar>(&self) -> QSpace<T> {
        QSpace { q: self.q.iter().map(|r| r.iter().map(|&v| T::from_rational(v)).collect()).collect() }
    }
}

pub fn conjugate<S: Scalar>(s: &QSpace<S>) -> QSpace<S> {
    s.conjugate()
}

pub fn symmetrize<S: Scalar>(s: &QSpace<S>) -> QSpace<S> {
    s.symmetrize()
}

/// Polyhedral asymmetric norm `|x| = max(0, max_j <a_j, x>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymGauge<S = Rational> {
    dim: usize,
    functionals: Vec<Vec<S>>,
}

fn dot<S: Scalar>(a: &[S], x: &[S]) -> S {
    a.iter().zip(x).fold(S::zero(), |acc, (&ai, &xi)| acc + ai * xi)
}

/// Rank of a row list by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn rank<S: Scalar>(rows: &[Vec<S>], dim: usize) -> usize {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..dim {
        let pivot = (rank..m.len())
            .filter(|&r| !m[r][col].is_negligible())
            .max_by(|&a, &b| crate::scalar::cmp(&m[a][col].abs(), &m[b][col].abs()));
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let pv = m[rank][col];
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_negligible() {
                let factor = m[r][col] / pv;
                for c in col..dim {
                    let sub = factor * m[rank][c];
                    m[r][c] = m[r][c] - sub;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

impl<S: Scalar> AsymGauge<S> {
    /// Builds a gauge from its functionals and checks T0 separation.
    ///
    /// `|x| = |-x| = 0` forces `<a_j, x> = 0` for every `j`, so separation
    /// holds exactly when the functionals span the dual space.
    pub fn new(dim: usize, functionals: Vec<Vec<S>>) -> Result<Self> {
        if dim == 0 || functionals.is_empty() {
            return Err(Error::EmptyGauge);
        }
        for a in &functionals {
            if a.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.len() });
            }
        }
        let r = rank(&functionals, dim);
        if r < dim {
            return Err(Error::GaugeNotT0 { rank: r, dim });
        }
        Ok(AsymGauge { dim, functionals })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn functionals(&self) -> &[Vec<S>] {
        &self.functionals
    }

    /// Evaluates the norm without a dimension check.
    #[inline]
    pub fn norm(&self, x: &[S]) -> S {
        self.functionals.iter().fold(S::zero(), |acc, a| acc.max(dot(a, x)))
    }

    /// `|x - y|` without allocating.
    #[inline]
    pub fn norm_diff(&self, x: &[S], y: &[S]) -> S {
        self.functionals.iter().fold(S::zero(), |acc, a| {
            let v = a
                .iter()
                .zip(x.iter().zip(y))
                .fold(S::zero(), |s, (&ai, (&xi, &yi))| s + ai * (xi - yi));
            acc.max(v)
        })
    }

    pub fn eval(&self, x: &[S]) -> Result<S> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.norm(x))
    }
}

impl AsymGauge<Rational> {
    pub fn cast<T: Scalar>(&self) -> AsymGauge<T> {
        AsymGauge {
            dim: self.dim,
            functionals: self
                .functionals
                .iter()
                .map(|a| a.iter().map(|&v| T::from_rational(v)).collect())
                .collect(),
        }
    }
}

pub fn gauge_eval<S: Scalar>(g: &AsymGauge<S>, x: &[S]) -> Result<S> {
    g.eval(x)
}

/// Distinct points of `S^d` under an asymmetric gauge, with their induced
/// quasi-metric `q(x, y) = |x - y|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<S = Rational> {
    gauge: AsymGauge<S>,
    points: Vec<Vec<S>>,
    space: QSpace<S>,
}

impl<S: Scalar> PointCloud<S> {
    pub fn new(gauge: AsymGauge<S>, points: Vec<Vec<S>>) -> Result<Self> {
        let space = induce(&gauge, &points)?;
        Ok(PointCloud { gauge, points, space })
    }

    pub fn gauge(&self) -> &AsymGauge<S> {
        &self.gauge
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[S] {
        &self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.gauge.dim()
    }

    pub fn space(&self) -> &QSpace<S> {
        &self.space
    }

    /// Index of the base point equal to `x`, if any.
    pub fn index_of(&self, x: &[S]) -> Option<usize> {
        self.points
            .iter()
            .position(|p| p.iter().zip(x).all(|(&a, &b)| a.approx_eq(b)))
    }

    /// Index of the origin, if it is a base point.
    pub fn origin(&self) -> Option<usize> {
        self.index_of(&vec![S::zero(); self.dim()])
    }
}

impl PointCloud<Rational> {
    pub fn cast<T: Scalar>(&self) -> PointCloud<T> {
        PointCloud {
            gauge: self.gauge.cast(),
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|&v| T::from_rational(v)).collect())
                .collect(),
            space: self.space.cast(),
        }
    }
}

fn induce<S: Scalar>(gauge: &AsymGauge<S>, points: &[Vec<S>]) -> Result<QSpace<S>> {
    for p in points {
        if p.len() != gauge.dim() {
            return Err(Error::DimensionMismatch { expected: gauge.dim(), found: p.len() });
        }
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].iter().zip(&points[j]).all(|(&a, &b)| a.approx_eq(b)) {
                return Err(Error::DuplicatePoint { first: i, second: j });
            }
        }
    }
    let m = points
        .iter()
        .map(|x| points.iter().map(|y| gauge.norm_diff(x, y)).collect())
        .collect();
    validate_qspace(m)
}

/// The quasi-metric induced on the cloud's points.
pub fn induce_qspace<S: Scalar>(pc: &PointCloud<S>) -> QSpace<S> {
    pc.space.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect()
    }

    fn line_gauge() -> AsymGauge {
        AsymGauge::new(1, vec![vec![r(1)]]).unwrap()
    }

    #[test]
    fn triangle_space_is_valid() {
        let s = validate_qspace(mat(&[&[0, 0, 0], &[1, 0, 0], &[2, 1, 0]])).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dist(2, 0), r(2));
    }

    #[test]
    fn indiscernible_points_violate_t0() {
        let err = validate_qspace(mat(&[&[0, 0], &[0, 0]])).unwrap_err();
        assert_eq!(err, Error::InvalidSpace(vec![Violation::T0Violation(0, 1)]));
    }

    #[test]
    fn triangle_violation_is_reported() {
        // q(0,2) = 7 > q(0,1) + q(1,2) = 5 + 1
        let m = mat(&[&[0, 5, 7], &[1, 0, 1], &[1, 1, 0]]);
        let mut oracle = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if m[i][k] > m[i][j] + m[j][k] {
                        oracle.push(Violation::TriangleViolation(i, j, k));
                    }
                }
            }
        }
        assert_eq!(oracle, vec![Violation::TriangleViolation(0, 1, 2)]);
        assert_eq!(validate_qspace(m).unwrap_err(), Error::InvalidSpace(oracle));
    }

    #[test]
    fn every_violation_is_listed() {
        let m = mat(&[&[1, -1], &[0, 0]]);
        assert_eq!(
            validate_qspace(m).unwrap_err(),
            Error::InvalidSpace(vec![
                Violation::NegativeEntry(0, 1),
                Violation::NonzeroDiagonal(0),
                Violation::TriangleViolation(0, 1, 0),
                Violation::TriangleViolation(1, 0, 1),
            ])
        );
    }

    #[test]
    fn ragged_matrix_rejected() {
        let m = vec![vec![r(0), r(1)], vec![r(0)]];
        assert_eq!(
            validate_qspace(m).unwrap_err(),
            Error::NotSquare { row: 1, len: 1, expected: 2 }
        );
    }

    #[test]
    fn gauge_eval_examples() {
        let g = line_gauge();
        assert_eq!(gauge_eval(&g, &[r(3)]).unwrap(), r(3));
        assert_eq!(gauge_eval(&g, &[r(-2)]).unwrap(), r(0));
        let abs = AsymGauge::new(1, vec![vec![r(1)], vec![r(-1)]]).unwrap();
        assert_eq!(gauge_eval(&abs, &[r(-2)]).unwrap(), r(2));
        assert_eq!(
            gauge_eval(&abs, &[r(1), r(2)]),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn gauge_separation() {
        assert_eq!(
            AsymGauge::new(2, vec![vec![r(1), r(1)], vec![r(-1), r(-1)]]),
            Err(Error::GaugeNotT0 { rank: 1, dim: 2 })
        );
        assert!(AsymGauge::new(2, vec![vec![r(1), r(0)], vec![r(0), r(1)], vec![r(-1), r(-1)]]).is_ok());
        assert_eq!(AsymGauge::<Rational>::new(1, vec![]), Err(Error::EmptyGauge));
    }

    #[test]
    fn induced_line_space() {
        let pc = PointCloud::new(line_gauge(), vec![vec![r(0)], vec![r(1)], vec![r(2)]]).unwrap();
        assert_eq!(induce_qspace(&pc).matrix(), &mat(&[&[0, 0, 0], &[1, 0, 0], &[2, 1, 0]])[..]);
        let abs = AsymGauge::new(1, vec![vec![r(1)], vec![r(-1)]]).unwrap();
        let pc = PointCloud::new(abs, vec![vec![r(0)], vec![r(1)]]).unwrap();
        assert_eq!(pc.space().matrix(), &mat(&[&[0, 1], &[1, 0]])[..]);
        assert_eq!(
            PointCloud::new(line_gauge(), vec![vec![r(0)], vec![r(0)]]),
            Err(Error::DuplicatePoint { first: 0, second: 1 })
        );
    }

    #[test]
    fn conjugate_and_symmetrize() {
        let s = QSpace::new(mat(&[&[0, 0], &[1, 0]])).unwrap();
        assert_eq!(s.conjugate().matrix(), &mat(&[&[0, 1], &[0, 0]])[..]);
        assert_eq!(s.symmetrize().matrix(), &mat(&[&[0, 1], &[1, 0]])[..]);
        let sym = s.symmetrize();
        assert_eq!(sym.symmetrize(), sym);
        assert!(sym.is_symmetric());
    }

    #[test]
    fn violation_display() {
        assert_eq!(Violation::TriangleViolation(0, 1, 2).to_string(), "TriangleViolation(0,1,2)");
    }
}
