//! Resonance-pole toolkit for one-dimensional tight-binding open quantum systems.
//!
//! A finite device hangs on an infinite uniform lead. Its discrete states
//! (bound, anti-bound, resonant and anti-resonant) are the poles of the S
//! matrix, found here by two independent routes:
//!
//! * [`siegert`]: outgoing-wave boundary condition, reduced to a real
//!   polynomial in the Bloch factor `z = e^{ik}` and solved for all roots;
//! * [`feshbach`]: projection onto the device, giving the energy-dependent
//!   effective Hamiltonian `H_eff(z)`, with poles located by Newton iteration
//!   on `det(E(z) - H_eff(z))`.
//!
//! [`scattering`] and [`wavefunction`] cover real-`k` transport and the
//! spatial form of each state; [`oracle`] holds brute-force validators.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod feshbach;
pub mod io;
mod linalg;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod scattering;
pub mod siegert;
pub mod sweep;
pub mod wavefunction;

pub use num_complex::Complex64;

pub use dispersion::{BlochFactor, WaveNumber};
pub use error::{Error, Result};
pub use model::{make_tdot, DeviceSpec, ModelParams};
pub use scattering::{GreenPair, ScatteringSolution};
pub use siegert::{PoleClass, SpectralPole};
