//! Unbalanced Faraday-Michelson interferometer with a one-slot delay.
//!
//! Early and late pulses each split into a short and a long path, so the
//! output has three time bins: early alone, early (delayed) overlapping
//! late, and late (delayed) alone. Only the middle one interferes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qmath::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FmiBasis {
    X,
    Y,
}

impl FmiBasis {
    pub fn offset(self) -> f64 {
        match self {
            FmiBasis::X => 0.0,
            FmiBasis::Y => std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Two weak coherent pulses with relative phase `phase` (late vs early).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulsePair {
    pub mu_early: f64,
    pub mu_late: f64,
    pub phase: f64,
}

/// Per-bin output intensity at one detector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TimingBins {
    pub early: f64,
    pub interference: f64,
    pub late: f64,
}

impl TimingBins {
    pub fn total(&self) -> f64 {
        self.early + self.interference + self.late
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FmiOutput {
    pub d1: TimingBins,
    pub d2: TimingBins,
}

impl FmiOutput {
    pub fn total(&self) -> f64 {
        self.d1.total() + self.d2.total()
    }
}

/// Mean photon numbers in every output bin. The sum equals `μ_e + μ_l`.
pub fn fmi_measure(pair: PulsePair, phi_i: f64, basis: FmiBasis) -> FmiOutput {
    let (e, l) = (pair.mu_early.max(0.0), pair.mu_late.max(0.0));
    let cross = 2.0 * (e * l).sqrt() * (pair.phase - phi_i - basis.offset()).cos();
    let side = |x: f64| x / 4.0;
    FmiOutput {
        d1: TimingBins {
            early: side(e),
            interference: (e + l + cross) / 4.0,
            late: side(l),
        },
        d2: TimingBins {
            early: side(e),
            interference: (e + l - cross) / 4.0,
            late: side(l),
        },
    }
}

/// Single-photon version: probabilities that a photon in state `rho` lands in
/// the interference bin of D1 and of D2.
pub fn fmi_qubit_central(rho: &DensityMatrix<f64>, phi_i: f64, basis: FmiBasis) -> (f64, f64) {
    let m = rho.matrix();
    let coh = m[(0, 1)] * Complex64::from_polar(1.0, phi_i + basis.offset());
    let cross = 2.0 * coh.re;
    ((1.0 + cross) / 4.0, (1.0 - cross) / 4.0)
}

/// Intensities at D1 and D2 when field amplitude `prev` (delayed) overlaps
/// `cur`. Used for continuous pulse streams.
pub fn delay_line_overlap(prev: Complex64, cur: Complex64, phi_i: f64) -> (f64, f64) {
    let d = prev * Complex64::from_polar(1.0, phi_i);
    ((d + cur).norm_sqr() / 4.0, (cur - d).norm_sqr() / 4.0)
}
