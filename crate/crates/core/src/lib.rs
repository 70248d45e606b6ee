//! Multiplicative functions evaluated densely from prime-power rules,
//! pretentious distances, Dirichlet quotients and the degree-`d` algebra.
//!
//! Values are `Complex64`. Every reduction runs in a fixed order (see
//! [`summation`]), so results do not depend on the number of worker threads.

// `!(a < b)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod character;
pub mod constructions;
pub mod degree;
pub mod dirichlet;
pub mod error;
pub mod metrics;
pub mod sieve;
pub mod spec;
pub mod stats;
pub mod summation;
pub mod symmetric;
pub mod table;

pub use asymptotics::{growth_fit, CoefficientBound, GrowthFit, LTruncation, LookupMode, XiSeries};
pub use character::CharacterTable;
pub use constructions::ConstructionParams;
pub use degree::SymmetricCoeffs;
pub use dirichlet::{LocalSeries, QuotientSpec};
pub use error::{Error, Result};
pub use metrics::{DistanceKind, DistanceReport, Verdict};
pub use num_complex::Complex64;
pub use sieve::{build_sieve, SieveIndex};
pub use spec::{FunctionSpec, Kind, Rule};
pub use summation::SummationMode;
pub use table::{evaluate, partial_sums, PartialSumSeries, ValueTable};
