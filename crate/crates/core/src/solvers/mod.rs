//! Matching algorithms.

pub mod envyfree;
pub mod hr;
pub mod hrlq;
