//! Directed hulls of finite T0-quasi-metric spaces.
//!
//! Exact computations use [`Rational`]; `f64` is available as a float mode
//! with tolerance [`FLOAT_TOL`]. The crate is `no_std` and needs `alloc`.

#![no_std]

extern crate alloc;

pub mod chebyshev;
pub mod convexity;
pub mod error;
pub mod hull;
pub mod linops;
pub mod scalar;
pub mod space;

pub use error::{AmpleWitness, Error, Result};
pub use hull::{embed, minimize, q_hull, FunctionPair, HullPoint};
pub use scalar::{Rational, Scalar, FLOAT_TOL};
pub use space::{validate_qspace, AsymGauge, PointCloud, QSpace, Violation};
