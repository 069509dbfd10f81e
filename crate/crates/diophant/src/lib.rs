//! Certified Diophantine approximation under congruence constraints.
//!
//! Approximations `(a m + r) / (b n + s)` to a real `xi` are searched,
//! counted and bounded with exact integer arithmetic and interval enclosures,
//! so every reported inequality holds for the true value of `xi`.

pub mod acceptance;
pub mod arith_sums;
pub mod asymptotic;
pub mod cf;
pub mod congruence;
pub mod enclosure;
pub mod error;
pub mod json;
pub mod metric_lab;
pub mod orchard;
pub mod scan;
pub mod three_distance;
pub mod transcendental;
pub mod uniform;

pub use cf::{Real, RealSpec};
pub use congruence::Constraint;
pub use enclosure::Enclosure;
pub use error::{Error, Result};
