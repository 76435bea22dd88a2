//! Exact arithmetic for piecewise-linear circle maps: valencies, Markov
//! partitions, dynamical verdicts and the K-theory of the associated
//! crossed-product algebras.

pub mod circle;
pub mod error;
pub mod dynamics;
pub mod fixtures;
pub mod intlin;
pub mod ktheory;
pub mod lift;
pub mod oracle;
pub mod valency;

pub use circle::{components, rat, CircleInterval, CirclePoint, Rational};
pub use error::{Error, ErrorClass, LiftError, Result};
pub use num_bigint::BigInt;
pub use intlin::{FGAbelianGroup, IntMatrix};
pub use lift::{Limits, PLCircleMap, PLLift};
pub use valency::{compose_valency, Valency};
