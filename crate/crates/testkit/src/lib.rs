//! Slow, independent reference implementations for checking provar results.
//!
//! Nothing here depends on `provar-core`; inputs are plain slices.

pub mod homology;
pub mod integrals;
