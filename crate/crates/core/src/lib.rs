//! Quantum harmonic analysis on finite abelian groups.
//!
//! The crate turns phase-space harmonic analysis — projective
//! representations, wavelet transforms, twisted convolution, coorbit norms,
//! band-dominated operator algebras, limit-operator compactness diagnostics
//! and almost-invariant partitions of unity — into exact finite-dimensional
//! computations.
//!
//! Everything numeric is generic over the scalar type via [`scalar::Scalar`]
//! (`f32`/`f64`); concrete `f64` aliases are exported at the crate root.
//! The partition module works in exact integer/rational arithmetic.

pub mod checks;
pub mod coorbit;
pub mod error;
pub mod group;
pub mod heisenberg;
pub mod io;
pub mod limitops;
pub mod linalg;
pub mod opalg;
pub mod propa;
pub mod scalar;

pub use error::{Error, Result};

/// Complex number over `f64`.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix over `f64`.
pub type CMatrix64 = linalg::CMatrix<f64>;
/// Signal on a finite abelian group over `f64`.
pub type Signal64 = group::Signal<f64>;
/// L^p exponent over `f64`.
pub type LpExponent64 = group::LpExponent<f64>;
/// Function on phase space over `f64`.
pub type PhaseFunction64 = heisenberg::PhaseFunction<f64>;
/// Cocycle (Heisenberg multiplier data) over `f64`.
pub type Cocycle64 = heisenberg::Cocycle<f64>;
/// Coorbit window over `f64`.
pub type Window64 = coorbit::Window<f64>;
/// Kernel operator over `f64`.
pub type KernelOperator64 = opalg::KernelOperator<f64>;
/// Phase-space measure over `f64`.
pub type PhaseMeasure64 = opalg::PhaseMeasure<f64>;
/// Banded operator on a windowed integer lattice over `f64`.
pub type BandedZOperator64 = limitops::BandedZOperator<f64>;
