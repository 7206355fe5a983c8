use alloc::vec::Vec;
use core::fmt;

use crate::space::Violation;

/// A point where ampleness `q(i, j) <= f2[i] + f1[j]` or nonnegativity fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmpleWitness {
    /// `q[row][col] > f2[row] + f1[col]`.
    Pair { row: usize, col: usize },
    /// `f1[index] < 0`.
    NegativeFirst { index: usize },
    /// `f2[index] < 0`.
    NegativeSecond { index: usize },
}

impl fmt::Display for AmpleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmpleWitness::Pair { row, col } => write!(f, "q({row},{col}) > f2({row}) + f1({col})"),
            AmpleWitness::NegativeFirst { index } => write!(f, "f1({index}) < 0"),
            AmpleWitness::NegativeSecond { index } => write!(f, "f2({index}) < 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix row `row` has `len` entries instead of `expected`.
    NotSquare { row: usize, len: usize, expected: usize },
    /// The matrix violates one or more quasi-metric axioms.
    InvalidSpace(Vec<Violation>),
    DimensionMismatch { expected: usize, found: usize },
    /// A gauge needs at least one functional and a positive dimension.
    EmptyGauge,
    /// The functionals do not span the space, so some `x != 0` has `|x| = |-x| = 0`.
    GaugeNotT0 { rank: usize, dim: usize },
    DuplicatePoint { first: usize, second: usize },
    IndexOutOfRange { index: usize, len: usize },
    NotAmple(AmpleWitness),
    NotMinimal,
    NonConvergence { sweeps: usize },
    /// Primal and dual hull distance formulas disagree.
    DualFormulaMismatch,
    /// A candidate produced by a hull operation is not ample on the base set.
    AmplenessLost(AmpleWitness),
    /// An affine combination of base points is not itself a base point.
    OffGridCombination,
    LambdaOutOfRange,
    GridMismatch,
    EmptySet,
    /// Closure computations require a universe containing the subset.
    MissingUniverse,
    NotInUniverse { index: usize },
    /// `q(T f, T g) > q(f, g)` for the listed domain indices.
    NotNonexpansive { from: usize, to: usize },
    /// `T_a(T_b(x)) != T_b(T_a(x))`.
    CommutationFailure { first: usize, second: usize, at: usize },
    SearchExhausted { max_n: usize, bound: u32 },
    /// The search guard caps the space size.
    SearchTooLarge { max_n: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { row, len, expected } => {
                write!(f, "row {row} has {len} entries, expected {expected}")
            }
            Error::InvalidSpace(v) => {
                write!(f, "not a T0-quasi-metric ({} violation(s)", v.len())?;
                if let Some(first) = v.first() {
                    write!(f, ", first: {first}")?;
                }
                f.write_str(")")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyGauge => f.write_str("gauge has no functionals or zero dimension"),
            Error::GaugeNotT0 { rank, dim } => {
                write!(f, "gauge functionals have rank {rank} < dimension {dim}")
            }
            Error::DuplicatePoint { first, second } => {
                write!(f, "points {first} and {second} coincide")
            }
            Error::IndexOutOfRange { index, len } => write!(f, "index {index} out of range 0..{len}"),
            Error::NotAmple(w) => write!(f, "pair is not ample: {w}"),
            Error::NotMinimal => f.write_str("pair is not minimal"),
            Error::NonConvergence { sweeps } => {
                write!(f, "minimization did not converge after {sweeps} sweeps")
            }
            Error::DualFormulaMismatch => f.write_str("primal and dual hull distances disagree"),
            Error::AmplenessLost(w) => write!(f, "operation produced a non-ample candidate: {w}"),
            Error::OffGridCombination => f.write_str("affine combination is not a base point"),
            Error::LambdaOutOfRange => f.write_str("lambda outside [0, 1]"),
            Error::GridMismatch => f.write_str("table does not match its lambda grid"),
            Error::EmptySet => f.write_str("empty set"),
            Error::MissingUniverse => f.write_str("subset has no universe"),
            Error::NotInUniverse { index } => write!(f, "element {index} is not in the universe"),
            Error::NotNonexpansive { from, to } => {
                write!(f, "map expands the distance from {from} to {to}")
            }
            Error::CommutationFailure { first, second, at } => {
                write!(f, "maps {first} and {second} do not commute at {at}")
            }
            Error::SearchExhausted { max_n, bound } => {
                write!(f, "no counterexample with n <= {max_n} and entries <= {bound}")
            }
            Error::SearchTooLarge { max_n, limit } => {
                write!(f, "search size {max_n} exceeds the limit {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
