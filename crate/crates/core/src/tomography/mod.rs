//! State and process tomography for time-bin qubits.
//!
//! States are reconstructed by linear inversion of Z/X/Y counts followed by a
//! projection onto the physical set; the process matrix is solved from the
//! four outputs of |0⟩, |1⟩, |+⟩, |+i⟩ and forced onto the CPTP set.
//! Uncertainties come from a Poisson parametric bootstrap.

mod ellipsoid;
pub mod io;
mod montecarlo;
mod process;
mod state;

pub use ellipsoid::{bloch_ellipsoid, MeshPoint};
pub use montecarlo::{bootstrap_processes, monte_carlo_process_uncertainty, sample_std, substream};
pub use process::{
    reconstruct_process, reconstruct_process_from_counts, PhysicalityCorrections, ProcessEstimate,
    ProcessInputCounts,
};
pub use state::{
    project_physical_state, qst_linear, reconstruct_state, Basis, MeasurementRecord, StateEstimate,
    MIN_MC_SAMPLES,
};
