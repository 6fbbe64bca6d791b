//! Numerical kernel for van der Waals / Casimir–Polder two-body potentials,
//! spontaneous and thermal decay rates, and resonant energy-transfer rates of
//! two two-level atoms, one of which may start out excited.
//!
//! The building blocks are the retarded dyadic photon propagator in a
//! homogeneous isotropic medium ([`green`]), the closed-time-path response
//! functions of a two-level dipole ([`atom`]), and a frequency-axis
//! integration engine that rotates contours onto the positive imaginary axis
//! while collecting residues ([`quadrature`]).  The [`rates`] module composes
//! these into observable shifts and widths, and [`oracle`] validates the
//! ground-state channel against brute-force perturbation theory and exact
//! diagonalization of a finite-mode field model.
//!
//! Everything works in natural units (ħ = 1, k_B = 1); the speed of light is
//! carried explicitly by [`green::Medium`].  All values are immutable and all
//! functions are pure, so evaluations may be dispatched concurrently.

// Validation sites use `!(x > 0.0)` so NaN is rejected along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod green;
pub mod oracle;
pub mod quadrature;
pub mod rates;

pub use num_complex::Complex64;
