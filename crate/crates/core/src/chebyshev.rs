//! Chebyshev radii and centers, normal structure, double closure and
//! fixed points of self-maps on finite subsets of the hull.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hull::{q_hull, HullPoint};
use crate::scalar::{Rational, Scalar};
use crate::space::QSpace;

/// A finite set of hull points over one base space, optionally inside a
/// larger universe used for closures.
#[derive(Debug, Clone)]
pub struct HullSubset<S: Scalar = Rational> {
    space: QSpace<S>,
    elements: Vec<HullPoint<S>>,
    universe: Option<Vec<HullPoint<S>>>,
    /// `dist[a][b] = q_hull(elements[a], elements[b])`.
    dist: Vec<Vec<S>>,
}

fn distance_table<S: Scalar>(space: &QSpace<S>, pts: &[HullPoint<S>]) -> Result<Vec<Vec<S>>> {
    pts.iter()
        .map(|f| pts.iter().map(|g| q_hull(space, f, g)).collect())
        .collect()
}

impl<S: Scalar> HullSubset<S> {
    pub fn new(space: QSpace<S>, elements: Vec<HullPoint<S>>) -> Result<Self> {
        let dist = distance_table(&space, &elements)?;
        Ok(HullSubset { space, elements, universe: None, dist })
    }

    /// Attaches a universe; every element must occur in it.
    pub fn with_universe(self, universe: Vec<HullPoint<S>>) -> Result<Self> {
        for u in &universe {
            if u.len() != self.space.len() {
                return Err(Error::DimensionMismatch { expected: self.space.len(), found: u.len() });
            }
        }
        for (index, e) in self.elements.iter().enumerate() {
            if !universe.iter().any(|u| u.same_as(e)) {
                return Err(Error::NotInUniverse { index });
            }
        }
        Ok(HullSubset { universe: Some(universe), ..self })
    }

    pub fn space(&self) -> &QSpace<S> {
        &self.space
    }

    pub fn elements(&self) -> &[HullPoint<S>] {
        &self.elements
    }

    pub fn universe(&self) -> Option<&[HullPoint<S>]> {
        self.universe.as_deref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Cached `q_hull(elements[a], elements[b])`.
    pub fn dist(&self, a: usize, b: usize) -> S {
        self.dist[a][b]
    }

    /// The subset made of the listed elements.
    pub fn select(&self, members: &[usize]) -> HullSubset<S> {
        HullSubset {
            space: self.space.clone(),
            elements: members.iter().map(|&m| self.elements[m].clone()).collect(),
            universe: self.universe.clone(),
            dist: members.iter().map(|&a| members.iter().map(|&b| self.dist[a][b]).collect()).collect(),
        }
    }
}

/// Directed radii of a set seen from one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radii<S> {
    /// `max_g q_hull(f, g)`.
    pub forward: S,
    /// `max_g q_hull(g, f)`.
    pub backward: S,
    /// The larger of the two.
    pub radius: S,
}

pub fn radii<S: Scalar>(a: &HullSubset<S>, f: &HullPoint<S>) -> Result<Radii<S>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut forward = S::zero();
    let mut backward = S::zero();
    for g in &a.elements {
        forward = forward.max(q_hull(&a.space, f, g)?);
        backward = backward.max(q_hull(&a.space, g, f)?);
    }
    Ok(Radii { forward, backward, radius: forward.max(backward) })
}

fn member_radius<S: Scalar>(a: &HullSubset<S>, members: &[usize], f: usize) -> S {
    members
        .iter()
        .fold(S::zero(), |acc, &g| acc.max(a.dist[f][g]).max(a.dist[g][f]))
}

fn member_diameter<S: Scalar>(a: &HullSubset<S>, members: &[usize]) -> S {
    members
        .iter()
        .flat_map(|&f| members.iter().map(move |&g| (f, g)))
        .fold(S::zero(), |acc, (f, g)| acc.max(a.dist[f][g]))
}

/// Chebyshev radius, center and diameter of a finite set.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev<S> {
    pub radius: S,
    /// Indices of the elements attaining the radius.
    pub centers: Vec<usize>,
    /// `max q_hull(f, g)` over ordered pairs.
    pub diameter: S,
}

fn chebyshev_of<S: Scalar>(a: &HullSubset<S>, members: &[usize]) -> Chebyshev<S> {
    let rs: Vec<S> = members.iter().map(|&f| member_radius(a, members, f)).collect();
    let radius = rs.iter().copied().reduce(|x, y| x.min(y)).unwrap_or_else(S::zero);
    let centers = members
        .iter()
        .zip(&rs)
        .filter(|(_, &r)| r.approx_eq(radius))
        .map(|(&m, _)| m)
        .collect();
    Chebyshev { radius, centers, diameter: member_diameter(a, members) }
}

pub fn center_and_diameter<S: Scalar>(a: &HullSubset<S>) -> Result<Chebyshev<S>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let all: Vec<usize> = (0..a.len()).collect();
    Ok(chebyshev_of(a, &all))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormalStructure<S> {
    /// `r(A) < diam(A)`.
    Holds { radius: S, diameter: S },
    /// `r(A) = diam(A) > 0`.
    Fails { radius: S, diameter: S },
    /// `diam(A) = 0`.
    NotApplicable,
}

pub fn normal_structure_check<S: Scalar>(a: &HullSubset<S>) -> Result<NormalStructure<S>> {
    let c = center_and_diameter(a)?;
    Ok(if c.diameter.is_negligible() {
        NormalStructure::NotApplicable
    } else if c.radius.approx_le(c.diameter) && !c.radius.approx_eq(c.diameter) {
        NormalStructure::Holds { radius: c.radius, diameter: c.diameter }
    } else {
        NormalStructure::Fails { radius: c.radius, diameter: c.diameter }
    })
}

/// Indices of universe points `u` with `q_hull(u, a) = 0` for some `a` in
/// the set and `q_hull(a', u) = 0` for some `a'` in the set.
///
/// On a finite universe these are the points in both the `q_hull` and the
/// conjugate closure of the set.
pub fn double_closure_indices<S: Scalar>(a: &HullSubset<S>) -> Result<Vec<usize>> {
    let universe = a.universe.as_ref().ok_or(Error::MissingUniverse)?;
    let mut out = Vec::new();
    for (k, u) in universe.iter().enumerate() {
        let mut near_into = false;
        let mut near_from = false;
        for e in &a.elements {
            near_into |= q_hull(&a.space, u, e)?.is_negligible();
            near_from |= q_hull(&a.space, e, u)?.is_negligible();
        }
        if near_into && near_from {
            out.push(k);
        }
    }
    Ok(out)
}

pub fn double_closure<S: Scalar>(a: &HullSubset<S>) -> Result<HullSubset<S>> {
    let idx = double_closure_indices(a)?;
    let universe = a.universe.clone().ok_or(Error::MissingUniverse)?;
    let elements = idx.iter().map(|&k| universe[k].clone()).collect();
    HullSubset::new(a.space.clone(), elements)?.with_universe(universe)
}

/// Whether `a` equals its double closure.
pub fn is_doubly_closed<S: Scalar>(a: &HullSubset<S>) -> Result<bool> {
    let closure = double_closure(a)?;
    Ok(closure.len() == a.len() && closure.elements.iter().all(|c| a.elements.iter().any(|e| e.same_as(c))))
}

/// Finite form of the nested-intersection property: a descending chain of
/// index sets has nonempty intersection iff its smallest member is nonempty.
pub fn finite_chain_intersects(chain: &[Vec<usize>]) -> bool {
    let nested = chain.windows(2).all(|w| w[1].iter().all(|x| w[0].contains(x)));
    nested && chain.last().is_some_and(|last| !last.is_empty())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentStep<S> {
    /// Indices into the original set.
    pub members: Vec<usize>,
    pub radius: S,
    pub diameter: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentOutcome {
    /// The chain reached a set of diameter zero.
    Collapsed,
    /// `C(A) = A` with positive diameter: normal structure fails there.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent<S> {
    pub steps: Vec<DescentStep<S>>,
    pub outcome: DescentOutcome,
}

impl<S> Descent<S> {
    pub fn last(&self) -> &DescentStep<S> {
        self.steps.last().expect("descent has at least one step")
    }
}

/// Iterates `A <- C(A)` until the diameter vanishes or the center is the
/// whole set.
pub fn cheb_descent<S: Scalar>(a: &HullSubset<S>) -> Result<Descent<S>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut members: Vec<usize> = (0..a.len()).collect();
    let mut steps = Vec::new();
    loop {
        let c = chebyshev_of(a, &members);
        steps.push(DescentStep { members: members.clone(), radius: c.radius, diameter: c.diameter });
        if c.diameter.is_negligible() {
            return Ok(Descent { steps, outcome: DescentOutcome::Collapsed });
        }
        if c.centers.len() == members.len() {
            return Ok(Descent { steps, outcome: DescentOutcome::Stalled });
        }
        assert!(c.centers.len() < members.len() && !c.centers.is_empty());
        members = c.centers;
    }
}

/// A self-map of a finite hull subset, given by element indices.
#[derive(Debug, Clone)]
pub struct SelfMapTable<S: Scalar = Rational> {
    domain: HullSubset<S>,
    map: Vec<usize>,
}

impl<S: Scalar> SelfMapTable<S> {
    pub fn new(domain: HullSubset<S>, map: Vec<usize>) -> Result<Self> {
        if map.len() != domain.len() {
            return Err(Error::DimensionMismatch { expected: domain.len(), found: map.len() });
        }
        if let Some(&index) = map.iter().find(|&&m| m >= domain.len()) {
            return Err(Error::IndexOutOfRange { index, len: domain.len() });
        }
        Ok(SelfMapTable { domain, map })
    }

    pub fn domain(&self) -> &HullSubset<S> {
        &self.domain
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }
}

/// First ordered pair `(f, g)` with `q_hull(T f, T g) > q_hull(f, g)`.
///
/// Checking all ordered pairs covers both directed inequalities.
pub fn check_nonexpansive<S: Scalar>(t: &SelfMapTable<S>) -> Option<(usize, usize)> {
    let d = &t.domain;
    for f in 0..d.len() {
        for g in 0..d.len() {
            if !d.dist(t.map[f], t.map[g]).approx_le(d.dist(f, g)) {
                return Some((f, g));
            }
        }
    }
    None
}

pub fn fixed_points<S: Scalar>(t: &SelfMapTable<S>) -> Vec<usize> {
    (0..t.map.len()).filter(|&i| t.map[i] == i).collect()
}

/// Whether `T` maps the Chebyshev center of its domain into itself.
///
/// Guaranteed when `T` is nonexpansive and onto its domain. A map with
/// `T(A)` strictly inside `A` can fail: a constant map onto a non-center
/// element is nonexpansive.
pub fn centers_invariant<S: Scalar>(t: &SelfMapTable<S>) -> Result<bool> {
    let c = center_and_diameter(&t.domain)?;
    Ok(c.centers.iter().all(|&f| c.centers.contains(&t.map[f])))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonFixed {
    pub points: Vec<usize>,
    /// The intersection is empty although the center descent of the domain
    /// reaches diameter zero.
    pub alarm: bool,
}

/// Common fixed points of a commuting family of nonexpansive maps on one
/// domain.
pub fn common_fixed<S: Scalar>(ts: &[SelfMapTable<S>]) -> Result<CommonFixed> {
    let Some(first) = ts.first() else {
        return Err(Error::EmptySet);
    };
    let n = first.domain.len();
    for t in ts {
        if t.map.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.map.len() });
        }
        if let Some((from, to)) = check_nonexpansive(t) {
            return Err(Error::NotNonexpansive { from, to });
        }
    }
    for (a, ta) in ts.iter().enumerate() {
        for (b, tb) in ts.iter().enumerate().skip(a + 1) {
            if let Some(at) = (0..n).find(|&x| ta.map[tb.map[x]] != tb.map[ta.map[x]]) {
                return Err(Error::CommutationFailure { first: a, second: b, at });
            }
        }
    }
    let points: Vec<usize> = (0..n).filter(|&x| ts.iter().all(|t| t.map[x] == x)).collect();
    let collapsed = n > 0 && cheb_descent(&first.domain)?.outcome == DescentOutcome::Collapsed;
    Ok(CommonFixed { alarm: points.is_empty() && collapsed, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::embed;
    use alloc::vec;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    /// u-gauge line {0, 1, 2}: q(a, b) = (a - b)^+.
    fn line_space() -> QSpace {
        let m = (0..3).map(|a: i64| (0..3).map(|b: i64| r((a - b).max(0))).collect()).collect();
        QSpace::new(m).unwrap()
    }

    fn subset(idx: &[usize]) -> HullSubset {
        let s = line_space();
        let el = idx.iter().map(|&i| embed(&s, i).unwrap()).collect();
        HullSubset::new(s, el).unwrap()
    }

    #[test]
    fn radii_examples() {
        let a = subset(&[0, 1, 2]);
        let e = |i| embed(a.space(), i).unwrap();
        assert_eq!(radii(&a, &e(0)).unwrap(), Radii { forward: r(2), backward: r(0), radius: r(2) });
        assert_eq!(radii(&a, &e(1)).unwrap(), Radii { forward: r(1), backward: r(1), radius: r(1) });
        let single = subset(&[2]);
        assert_eq!(radii(&single, &e(2)).unwrap().radius, r(0));
        assert_eq!(radii(&subset(&[]), &e(0)), Err(Error::EmptySet));
    }

    #[test]
    fn centers() {
        assert_eq!(
            center_and_diameter(&subset(&[0, 1, 2])).unwrap(),
            Chebyshev { radius: r(1), centers: vec![1], diameter: r(2) }
        );
        assert_eq!(
            center_and_diameter(&subset(&[1])).unwrap(),
            Chebyshev { radius: r(0), centers: vec![0], diameter: r(0) }
        );
        assert_eq!(
            center_and_diameter(&subset(&[0, 2])).unwrap(),
            Chebyshev { radius: r(2), centers: vec![0, 1], diameter: r(2) }
        );
    }

    #[test]
    fn normal_structure() {
        assert_eq!(
            normal_structure_check(&subset(&[0, 1, 2])).unwrap(),
            NormalStructure::Holds { radius: r(1), diameter: r(2) }
        );
        assert_eq!(normal_structure_check(&subset(&[1])).unwrap(), NormalStructure::NotApplicable);
        assert_eq!(
            normal_structure_check(&subset(&[0, 2])).unwrap(),
            NormalStructure::Fails { radius: r(2), diameter: r(2) }
        );
    }

    #[test]
    fn descent() {
        let d = cheb_descent(&subset(&[0, 1, 2])).unwrap();
        assert_eq!(d.outcome, DescentOutcome::Collapsed);
        assert_eq!(d.steps.iter().map(|s| s.members.clone()).collect::<Vec<_>>(), vec![vec![0, 1, 2], vec![1]]);
        assert_eq!(d.last().diameter, r(0));

        let d = cheb_descent(&subset(&[2])).unwrap();
        assert_eq!(d.steps.len(), 1);

        let d = cheb_descent(&subset(&[0, 2])).unwrap();
        assert_eq!(d.outcome, DescentOutcome::Stalled);
        assert_eq!((d.last().radius, d.last().diameter), (r(2), r(2)));
    }

    #[test]
    fn double_closure_cases() {
        let s = line_space();
        let all: Vec<_> = (0..3).map(|i| embed(&s, i).unwrap()).collect();
        let a = subset(&[0, 1, 2]).with_universe(all.clone()).unwrap();
        assert_eq!(double_closure_indices(&a).unwrap(), vec![0, 1, 2]);
        assert!(is_doubly_closed(&a).unwrap());

        // symmetric metric: every embedded subset is doubly closed
        let m = (0..3).map(|a: i64| (0..3).map(|b: i64| r((a - b).abs())).collect()).collect();
        let sym = QSpace::new(m).unwrap();
        let uni: Vec<_> = (0..3).map(|i| embed(&sym, i).unwrap()).collect();
        let b = HullSubset::new(sym, vec![uni[0].clone(), uni[2].clone()]).unwrap().with_universe(uni).unwrap();
        assert_eq!(double_closure_indices(&b).unwrap(), vec![0, 2]);

        assert_eq!(double_closure(&subset(&[0])).unwrap_err(), Error::MissingUniverse);
    }

    #[test]
    fn one_sided_zero_distance_is_excluded() {
        // u = f_1 has q(f_2, u) = 0 but q(u, f_2) = 1
        let s = line_space();
        let all: Vec<_> = (0..3).map(|i| embed(&s, i).unwrap()).collect();
        assert_eq!(q_hull(&s, &all[2], &all[1]).unwrap(), r(0));
        assert_eq!(q_hull(&s, &all[1], &all[2]).unwrap(), r(1));
        let a = subset(&[2]).with_universe(all).unwrap();
        assert_eq!(double_closure_indices(&a).unwrap(), vec![2]);
    }

    #[test]
    fn nonexpansive_maps() {
        let a = subset(&[0, 1, 2]);
        let id = SelfMapTable::new(a.clone(), vec![0, 1, 2]).unwrap();
        let constant = SelfMapTable::new(a.clone(), vec![1, 1, 1]).unwrap();
        let swap = SelfMapTable::new(a.clone(), vec![2, 1, 0]).unwrap();
        assert_eq!(check_nonexpansive(&id), None);
        assert_eq!(check_nonexpansive(&constant), None);
        // brute force over the nine ordered pairs
        let mut oracle = None;
        'outer: for f in 0..3 {
            for g in 0..3 {
                if a.dist(swap.apply(f), swap.apply(g)) > a.dist(f, g) {
                    oracle = Some((f, g));
                    break 'outer;
                }
            }
        }
        assert_eq!(check_nonexpansive(&swap), oracle);
        assert_eq!(oracle, Some((1, 0)));
        assert_eq!(SelfMapTable::new(a.clone(), vec![0, 1]).unwrap_err(), Error::DimensionMismatch { expected: 3, found: 2 });
        assert_eq!(SelfMapTable::new(a, vec![0, 1, 3]).unwrap_err(), Error::IndexOutOfRange { index: 3, len: 3 });
    }

    #[test]
    fn fixed_point_sets() {
        let a = subset(&[0, 1, 2]);
        let id = SelfMapTable::new(a.clone(), vec![0, 1, 2]).unwrap();
        let constant = SelfMapTable::new(a.clone(), vec![1, 1, 1]).unwrap();
        assert_eq!(fixed_points(&id), vec![0, 1, 2]);
        assert_eq!(fixed_points(&constant), vec![1]);
        let c = common_fixed(&[id.clone(), constant.clone()]).unwrap();
        assert_eq!(c, CommonFixed { points: vec![1], alarm: false });
        assert!(centers_invariant(&constant).unwrap());

        let swap = SelfMapTable::new(a.clone(), vec![2, 1, 0]).unwrap();
        assert_eq!(common_fixed(&[id, swap]).unwrap_err(), Error::NotNonexpansive { from: 1, to: 0 });
        let to0 = SelfMapTable::new(a, vec![0, 0, 0]).unwrap();
        assert_eq!(
            common_fixed(&[constant, to0]).unwrap_err(),
            Error::CommutationFailure { first: 0, second: 1, at: 0 }
        );
    }

    #[test]
    fn center_invariance_needs_surjectivity() {
        let a = subset(&[0, 1, 2]);
        // constant onto f_0: nonexpansive, but C(A) = {f_1} is sent outside
        let to0 = SelfMapTable::new(a.clone(), vec![0, 0, 0]).unwrap();
        assert_eq!(check_nonexpansive(&to0), None);
        assert_eq!(center_and_diameter(&a).unwrap().centers, vec![1]);
        assert!(!centers_invariant(&to0).unwrap());
        let id = SelfMapTable::new(a, vec![0, 1, 2]).unwrap();
        assert!(centers_invariant(&id).unwrap());
    }

    #[test]
    fn finite_chains() {
        assert!(finite_chain_intersects(&[vec![0, 1, 2], vec![1, 2], vec![1]]));
        assert!(!finite_chain_intersects(&[vec![0, 1], vec![]]));
        assert!(!finite_chain_intersects(&[vec![0], vec![1]]));
    }
}
