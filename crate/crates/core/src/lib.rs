//! Two-qubit mixed-state analysis.
//!
//! This crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation:
//!
//! - [`linalg`]: fixed-size complex matrices, a cyclic Jacobi Hermitian
//!   eigensolver, Kronecker products, partial trace and transpose, spin flip.
//! - [`density`]: validated density-matrix newtypes.
//! - [`families`]: MEMS, Ishizaka–Hiroshima, Bell-diagonal and pure states.
//! - [`measures`]: concurrence, entanglement of formation, participation
//!   ratio, Rényi/Tsallis entropies and their conditional forms, fully
//!   entangled fraction, PPT test, and the IH concurrence lower bound.
//! - [`sampler`]: Haar unitaries, flat-simplex spectra, ZHSL states and a
//!   splittable deterministic stream layout.
//! - [`experiments`]: chunked sweep kernels whose partial results merge
//!   associatively, so any worker count gives identical output.
//!
//! The basis order is `|00>, |01>, |10>, |11>` everywhere, with the first
//! label belonging to subsystem A.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod density;
pub mod experiments;
pub mod families;
pub mod linalg;
pub mod measures;
pub mod sampler;

pub use density::{DensityMatrix4, QubitDensity, Violations};
pub use error::{Error, Result};
pub use linalg::{Matrix, Matrix2, Matrix4, Subsystem, C64};
