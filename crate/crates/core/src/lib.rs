//! Stable, popular and envy-free matchings for hospital-residents instances,
//! with optional lower quotas.
//!
//! The crate is organised around [`Instance`] and [`Matching`]:
//!
//! * [`io`] reads and writes the text formats,
//! * [`generators`] builds seeded random instances,
//! * [`solvers`] holds the matching algorithms,
//! * [`metrics`] scores matchings,
//! * [`oracle`] brute-forces ground truth on small instances,
//! * [`harness`] runs experiment grids and the bundled fixtures.

pub mod bmatching;
pub mod error;
pub mod harness;
pub mod generators;
pub mod instance;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod solvers;

pub use error::{Error, Result};
pub use generators::{GeneratorParams, Model};
pub use instance::{Feasibility, Hospital, Instance, Matching, Resident, Vertex};
