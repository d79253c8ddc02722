//! Exact arithmetic for degree-2 paramodular Fourier data.
//!
//! The crate works with truncated Fourier expansions of weight-k forms on
//! the paramodular group of square-free level N, stored as finite maps from
//! half-integral index matrices to rational coefficients.  Everything is
//! exact: coefficients are arbitrary-precision rationals and the only
//! floating point in the crate is the optional cross-check mode of the
//! Hecke oracle.
//!
//! Module overview:
//!
//! * [`rational`], [`mat`] - rational scalars, 2x2 and 4x4 matrices,
//!   symplectic similitudes and their block decompositions.
//! * [`groups`] - membership tests for the paramodular group, its local
//!   analogues and the classical congruence subgroups, plus construction
//!   and verification of the U(p) coset representatives.
//! * [`fourier`] - index bookkeeping for Fourier coefficient tables: the
//!   slash action on single terms, Gamma^0(N) equivariance, the Fricke
//!   involution, Fourier-Jacobi slices and theta components.
//! * [`hecke`] - the U(p) operator in closed form, an independent coset
//!   oracle for it, and the T(p) + T(p^2) relation at primes away from
//!   the level, with eigenvalue recovery.
//! * [`character`] - Dirichlet characters as explicit value tables on
//!   prime-power components.
//! * [`bqf`], [`halfint`] - binary quadratic form utilities (content,
//!   fundamental discriminants, prime representation) and the descent to
//!   half-integral weight: the Jacobi-to-half-integral map, level and
//!   character gates, theta-shape detection and the square-free scan.
//! * [`io`] - plain-text serialization for tables, slices and q-series.
//! * [`gen`] - deterministic pseudo-random and synthetic fixtures.
//! * [`pipeline`] - the end-to-end nonvanishing search wired from the
//!   stages above, with a deterministic report.

pub mod arith;
pub mod bqf;
pub mod character;
pub mod fourier;
pub mod gen;
pub mod groups;
pub mod halfint;
pub mod hecke;
pub mod io;
pub mod mat;
pub mod pipeline;
pub mod rational;

pub use rational::{rat, ratio, Rational};
