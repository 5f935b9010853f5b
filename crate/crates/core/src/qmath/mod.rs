//! Complex matrix kernel for single time-bin qubits: states, the Pauli basis,
//! χ-matrix processes, fidelities and binary entropy.
//!
//! Basis convention throughout: |0⟩ = early bin, |1⟩ = late bin, Pauli order
//! (I, X, Y, Z).

mod entropy;
pub mod matrix;
mod pauli;
mod process;
mod state;

use serde::{Deserialize, Serialize};

pub use entropy::binary_entropy;
pub use matrix::{eigh, eigh2, CMat, Eigh, Mat2, Mat4};
pub use pauli::{Pauli, PauliBasis};
pub use process::{
    apply_process, chi_from_unit_images, process_fidelity, AffineMap, ProcessMatrix, ProcessOutput,
};
pub use state::{bloch_to_matrix, bloch_vector, state_fidelity, DensityMatrix, Ket, SixState};

/// The three process fidelities reported for a link.
///
/// `f0`: channel output vs ideal, `f1`: prepared input vs ideal (back-to-back),
/// `f2`: output vs input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub uncertainties: [f64; 3],
}

impl FidelityReport {
    pub fn is_valid(&self) -> bool {
        [self.f0, self.f1, self.f2]
            .iter()
            .all(|f| (0.0..=1.0 + 1e-9).contains(f))
    }
}
