//! Deterministic test corpora: random quasi-metric spaces, random hull
//! points and grid clouds under a small library of gauges.

use dihull_core::hull::{first_from_second, minimize};
use dihull_core::{AsymGauge, FunctionPair, HullPoint, PointCloud, QSpace, Rational};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::Instance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn r(v: i64) -> Rational {
    Rational::from(v)
}

/// A random rational `k / d` with `0 <= k / d <= max` and `d` in `denoms`.
pub fn random_rational<R: Rng>(rng: &mut R, max: i64, denoms: &[i64]) -> Rational {
    let d = *denoms.choose(rng).expect("nonempty denominators");
    Rational::new(rng.random_range(0..=max * d) as i128, d as i128).expect("nonzero denominator")
}

/// Shortest-path closure of a nonnegative matrix with zero diagonal.
pub fn min_plus_closure(m: &mut [Vec<Rational>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k] + m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
}

/// A random valid space on `n` points: random entries in `[0, max]` with
/// denominators from `denoms`, closed under min-plus, T0 failures rejected.
pub fn random_qspace<R: Rng>(rng: &mut R, n: usize, max: i64, denoms: &[i64]) -> QSpace {
    loop {
        let mut m = vec![vec![Rational::ZERO; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != j {
                    *v = random_rational(rng, max, denoms);
                }
            }
        }
        min_plus_closure(&mut m);
        if let Ok(s) = QSpace::new(m) {
            return s;
        }
    }
}

/// A random ample pair: random `f2`, then `f1` from the sup-representation
/// plus random slack.
pub fn random_ample_pair<R: Rng>(rng: &mut R, s: &QSpace, max: i64, denoms: &[i64]) -> FunctionPair {
    let f2: Vec<Rational> = (0..s.len()).map(|_| random_rational(rng, max, denoms)).collect();
    let f1 = first_from_second(s, &f2)
        .into_iter()
        .map(|a| a + random_rational(rng, max, denoms))
        .collect();
    FunctionPair::new(f1, f2)
}

pub fn random_hull_point<R: Rng>(rng: &mut R, s: &QSpace, max: i64, denoms: &[i64]) -> HullPoint {
    minimize(s, &random_ample_pair(rng, s, max, denoms)).expect("random pairs are ample")
}

/// Gauges used for grid clouds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridGauge {
    /// `|x| = max(x, 0)` on the line.
    ULine,
    /// `|x|` on the line.
    Abs,
    /// `max(|x_1|, |x_2|)`.
    Max2,
    /// `max(x_1, x_2, -x_1 - x_2, 0)`.
    Asym2,
}

impl GridGauge {
    pub const ALL: [GridGauge; 4] = [GridGauge::ULine, GridGauge::Abs, GridGauge::Max2, GridGauge::Asym2];

    pub fn gauge(self) -> AsymGauge {
        let f = |rows: &[&[i64]]| rows.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect();
        match self {
            GridGauge::ULine => AsymGauge::new(1, f(&[&[1]])),
            GridGauge::Abs => AsymGauge::new(1, f(&[&[1], &[-1]])),
            GridGauge::Max2 => AsymGauge::new(2, f(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]])),
            GridGauge::Asym2 => AsymGauge::new(2, f(&[&[1, 0], &[0, 1], &[-1, -1]])),
        }
        .expect("library gauges are T0")
    }

    pub fn dim(self) -> usize {
        match self {
            GridGauge::ULine | GridGauge::Abs => 1,
            GridGauge::Max2 | GridGauge::Asym2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GridGauge::ULine => "u-line",
            GridGauge::Abs => "abs-line",
            GridGauge::Max2 => "max-2d",
            GridGauge::Asym2 => "asym-2d",
        }
    }
}

/// Integer grid `{lo..=hi}^d` under the given gauge, in lexicographic order.
pub fn grid_cloud(kind: GridGauge, lo: i64, hi: i64) -> PointCloud {
    let line: Vec<Vec<Rational>> = (lo..=hi).map(|v| vec![r(v)]).collect();
    let points = if kind.dim() == 1 {
        line
    } else {
        (lo..=hi).flat_map(|a| (lo..=hi).map(move |b| vec![r(a), r(b)])).collect()
    };
    PointCloud::new(kind.gauge(), points).expect("grid points are distinct")
}

/// The line cloud `{0, 1, 2}` under the u-gauge.
pub fn standard_line() -> PointCloud {
    grid_cloud(GridGauge::ULine, 0, 2)
}

/// Random matrix instances for each size plus grid clouds under every
/// library gauge.
pub fn generate_corpus(seed: u64, sizes: &[usize], per_size: usize) -> Vec<Instance> {
    let mut g = rng(seed);
    let mut out = Vec::new();
    for &n in sizes {
        for _ in 0..per_size {
            out.push(Instance::from_space(&random_qspace(&mut g, n, 6, &[1, 2])));
        }
    }
    for kind in GridGauge::ALL {
        let hi = if kind.dim() == 1 { 4 } else { 2 };
        out.push(Instance::from_cloud(&grid_cloud(kind, 0, hi)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dihull_core::space::violations;

    #[test]
    fn corpus_is_valid_and_deterministic() {
        let a = generate_corpus(7, &[3, 4, 5], 4);
        assert_eq!(a, generate_corpus(7, &[3, 4, 5], 4));
        assert_eq!(a.len(), 12 + 4);
        for inst in &a {
            inst.load().unwrap();
        }
    }

    #[test]
    fn closure_repairs_triangle() {
        let mut g = rng(1);
        for _ in 0..50 {
            let mut m: Vec<Vec<Rational>> =
                (0..5).map(|i| (0..5).map(|j| if i == j { r(0) } else { random_rational(&mut g, 9, &[1]) }).collect()).collect();
            min_plus_closure(&mut m);
            let v = violations(&m).unwrap();
            assert!(v.iter().all(|x| matches!(x, dihull_core::Violation::T0Violation(..))), "{v:?}");
        }
    }

    #[test]
    fn asymmetric_grid_is_t0() {
        let pc = grid_cloud(GridGauge::Asym2, 0, 2);
        assert_eq!(pc.len(), 9);
        assert!(!pc.space().is_symmetric());
    }
}
