//! Batch front-end: configuration parsing, distance scans, identity and
//! oracle suites, and the table post-processing tools (power-law fits and
//! oscillation detection).
//!
//! The boundary speaks SI (rad/s, meters, Kelvin; dipoles in atomic units);
//! everything behind it runs in Hartree atomic units with c = 1/α.  Output
//! tables are comma-separated with a `#`-prefixed header block carrying the
//! fully resolved configuration, and floats are printed in shortest
//! round-trip form so a re-read reproduces them bit for bit.

// Validation sites use `!(x > 0.0)` so NaN is rejected along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod run;
pub mod suites;
pub mod table;
pub mod units;
