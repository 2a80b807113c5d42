//! Inverse images of the sum-of-proper-divisors function `s(n) = σ(n) - n`
//! on even numbers, and classification of connected components of the
//! aliquot graph.
//!
//! ```
//! use aliquot_core::inverse::s_inverse;
//! use aliquot_core::orbit::{classify, ComponentResult, Config};
//!
//! assert_eq!(s_inverse(28).unwrap().values(), vec![28]);
//! assert!(matches!(classify(28, &Config::default()).unwrap(), ComponentResult::Finite(_)));
//! ```

pub mod arith;
pub mod error;
pub mod inverse;
pub mod orbit;
pub mod report;
pub mod scan;

pub use error::{Error, Result};
