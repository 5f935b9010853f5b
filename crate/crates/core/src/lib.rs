//! Simulation and characterization toolkit for time-bin qubit links.
//!
//! * [`qmath`]: qubit states, Pauli algebra, χ-matrix processes.
//! * [`tomography`]: state and process reconstruction with Poisson Monte-Carlo
//!   uncertainties.
//! * [`photonics`]: pulse trains, fiber loss, detectors, interferometers,
//!   phase drift and its PID stabilization.
//! * [`cow`]: coherent-one-way QKD encoding, sifting, visibility and key rate.
//! * [`experiment`]: config-driven runner producing reports and plot data.
//!
//! The linear algebra and tomography layers are generic over [`Scalar`]
//! (`f32`/`f64`); the aliases below fix them to `f64`.

// `!(x >= 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cow;
mod error;
pub mod experiment;
pub mod photonics;
pub mod qmath;
mod scalar;
pub mod tomography;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type DensityMatrix = qmath::DensityMatrix<f64>;
pub type ProcessMatrix = qmath::ProcessMatrix<f64>;
pub type Ket = qmath::Ket<f64>;
pub type AffineMap = qmath::AffineMap<f64>;
pub type StateEstimate = tomography::StateEstimate<f64>;
pub type ProcessEstimate = tomography::ProcessEstimate<f64>;

pub type DensityMatrix32 = qmath::DensityMatrix<f32>;
pub type ProcessMatrix32 = qmath::ProcessMatrix<f32>;
