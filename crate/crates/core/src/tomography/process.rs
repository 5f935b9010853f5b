use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::montecarlo::monte_carlo_process_uncertainty;
use super::state::{state_from_records, MeasurementRecord};
use crate::error::{Error, Result};
use crate::qmath::{
    chi_from_unit_images, eigh, eigh2, matrix::solve, process_fidelity, AffineMap, DensityMatrix,
    Mat2, Mat4, PauliBasis, ProcessMatrix, SixState,
};
use crate::scalar::{c, Scalar};

/// Raw counts for the four process inputs |0⟩, |1⟩, |+⟩, |+i⟩, in that order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessInputCounts {
    pub records: [[MeasurementRecord; 3]; 4],
}

/// Size of each correction applied while forcing χ onto the CPTP set.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhysicalityCorrections<T: Scalar> {
    /// Largest elementwise anti-Hermitian residual removed.
    pub hermitian_residual: T,
    /// Total weight of negative χ eigenvalues clipped to zero.
    pub clipped_weight: T,
    /// Trace-preservation deviation before rescaling.
    pub tp_deviation: T,
}

#[derive(Clone, Copy, Debug)]
pub struct ProcessEstimate<T: Scalar> {
    pub chi: ProcessMatrix<T>,
    /// Process fidelity against the identity channel.
    pub f_proc: T,
    pub f_proc_std: T,
    pub affine_map: AffineMap<T>,
    pub corrections: PhysicalityCorrections<T>,
}

fn vec4<T: Scalar>(m: &Mat2<T>) -> [Complex<T>; 4] {
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// Linear inversion of `ρ_out = Σ χ_lk σ_l ρ_in σ_k` from four
/// input/output pairs followed by the CPTP projection.
pub(crate) fn reconstruct_process_unscored<T: Scalar>(
    pairs: &[(DensityMatrix<T>, DensityMatrix<T>)],
) -> Result<(ProcessMatrix<T>, PhysicalityCorrections<T>)> {
    if pairs.len() != 4 {
        return Err(Error::arg(format!("need 4 input/output pairs, got {}", pairs.len())));
    }
    // Express each matrix unit E_mn as a combination of the inputs.
    let cols: Vec<[Complex<T>; 4]> = pairs.iter().map(|(i, _)| vec4(i.matrix())).collect();
    let a: Vec<Vec<Complex<T>>> = (0..4).map(|r| (0..4).map(|j| cols[j][r]).collect()).collect();
    let mut images = [[Mat2::<T>::zeros(); 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            let mut e = vec![Complex::zero(); 4];
            e[m * 2 + n] = Complex::new(T::one(), T::zero());
            let coef = solve(a.clone(), e, c(1e-9))
                .ok_or_else(|| Error::arg("process inputs are not informationally complete"))?;
            let mut img = Mat2::zeros();
            for (w, (_, out)) in coef.iter().zip(pairs) {
                img = img + out.matrix().scale(*w);
            }
            images[m][n] = img;
        }
    }
    let raw = chi_from_unit_images(&images)?;
    make_physical(raw.chi())
}

/// Hermitize, clip negative eigenvalues (keeping the trace), then restore
/// trace preservation with the congruence `χ ↦ T χ T†` that implements
/// `ε(A^{-1/2} · A^{-1/2})`, where `A = Σ χ_lk σ_k σ_l`.
pub(crate) fn make_physical<T: Scalar>(
    chi: &Mat4<T>,
) -> Result<(ProcessMatrix<T>, PhysicalityCorrections<T>)> {
    let mut corr = PhysicalityCorrections {
        hermitian_residual: chi.hermiticity_residual(),
        ..Default::default()
    };
    let herm = chi.hermitian_part();
    let trace = herm.trace().re;

    let eig = eigh(&herm);
    let negative: T = eig.values.iter().filter(|v| **v < T::zero()).map(|v| -*v).sum();
    corr.clipped_weight = negative;
    let psd = if negative > T::zero() {
        let clipped = eig.values.map(|v| v.max(T::zero()));
        let total: T = clipped.iter().copied().sum();
        if total <= T::zero() {
            return Err(Error::arg("process matrix has no positive spectrum"));
        }
        eig.recompose(&clipped.map(|v| v * trace / total)).hermitian_part()
    } else {
        herm
    };

    let candidate = ProcessMatrix::new_unchecked(psd);
    corr.tp_deviation = candidate.tp_deviation();
    let a = candidate.trace_operator().hermitian_part();
    let ae = eigh2(&a);
    if ae.values[0] <= c(1e-12) {
        return Err(Error::arg("process annihilates a state; cannot restore trace preservation"));
    }
    let s_half = ae.recompose(&ae.values.map(|v| T::one() / v.sqrt()));
    let sigma = PauliBasis::<T>::new().sigma;
    // σ_l S = Σ_n T_nl σ_n with T_nl = ½ Tr(σ_n σ_l S)
    let mut t = Mat4::<T>::zeros();
    for l in 0..4 {
        let ls = sigma[l] * s_half;
        for n in 0..4 {
            t[(n, l)] = sigma[n].trace_product(&ls).scale(c(0.5));
        }
    }
    let fixed = (t * psd * t.adjoint()).hermitian_part();
    if corr.hermitian_residual > T::hermitian_tol()
        || corr.clipped_weight > T::psd_tol()
        || corr.tp_deviation > T::tp_tol()
    {
        log::debug!(
            "χ corrections: hermitian {} clipped {} tp {}",
            corr.hermitian_residual,
            corr.clipped_weight,
            corr.tp_deviation
        );
    }
    Ok((ProcessMatrix::new_unchecked(fixed), corr))
}

/// Process reconstruction from input/output state pairs, scored against
/// the identity channel. No uncertainty is attached (`f_proc_std = 0`).
pub fn reconstruct_process<T: Scalar>(
    pairs: &[(DensityMatrix<T>, DensityMatrix<T>)],
) -> Result<ProcessEstimate<T>> {
    let (chi, corrections) = reconstruct_process_unscored(pairs)?;
    let f_proc = process_fidelity(&chi, &ProcessMatrix::identity());
    Ok(ProcessEstimate {
        affine_map: chi.affine_map(),
        chi,
        f_proc,
        f_proc_std: T::zero(),
        corrections,
    })
}

/// Full pipeline from counts: per-input state tomography, process
/// reconstruction and its Poisson Monte-Carlo uncertainty.
pub fn reconstruct_process_from_counts<T: Scalar>(
    counts: &ProcessInputCounts,
    mc_samples: usize,
    seed: u64,
) -> Result<ProcessEstimate<T>> {
    let mut pairs = Vec::with_capacity(4);
    for (state, recs) in SixState::PROCESS_INPUTS.iter().zip(&counts.records) {
        pairs.push((state.density::<T>(), state_from_records::<T>(recs)?));
    }
    let mut est = reconstruct_process(&pairs)?;
    est.f_proc_std = monte_carlo_process_uncertainty(counts, mc_samples, seed)?;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{apply_process, Pauli};
    use crate::tomography::{Basis, MeasurementRecord};
    use proptest::prelude::*;

    fn exact_pairs(chi: &ProcessMatrix<f64>) -> Vec<(DensityMatrix<f64>, DensityMatrix<f64>)> {
        SixState::PROCESS_INPUTS
            .iter()
            .map(|s| {
                let rin = s.density::<f64>();
                let out = DensityMatrix::new(apply_process(chi, &rin).matrix).unwrap();
                (rin, out)
            })
            .collect()
    }

    #[test]
    fn identity_outputs_give_identity_chi() {
        let est = reconstruct_process(&exact_pairs(&ProcessMatrix::identity())).unwrap();
        assert!(est.chi.chi().max_abs_diff(ProcessMatrix::<f64>::identity().chi()) < 1e-12);
        assert!((est.f_proc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z_conjugation_gives_chi_33() {
        let pairs: Vec<_> = SixState::PROCESS_INPUTS
            .iter()
            .map(|s| {
                let rin = s.density::<f64>();
                let z = Pauli::Z.matrix::<f64>();
                let out = DensityMatrix::new(z * *rin.matrix() * z).unwrap();
                (rin, out)
            })
            .collect();
        let est = reconstruct_process(&pairs).unwrap();
        let mut want = Mat4::<f64>::zeros();
        want[(3, 3)] = Complex::new(1.0, 0.0);
        assert!(est.chi.chi().max_abs_diff(&want) < 1e-12);
        assert!(est.f_proc.abs() < 1e-12);
    }

    #[test]
    fn rejects_incomplete_inputs() {
        let zero = SixState::Zero.density::<f64>();
        let one = SixState::One.density::<f64>();
        let mixed = DensityMatrix::<f64>::maximally_mixed();
        let plus = SixState::Plus.density::<f64>();
        // I/2 lies in the span of |0⟩⟨0| and |1⟩⟨1|.
        let pairs = vec![(zero, zero), (one, one), (mixed, mixed), (plus, plus)];
        assert!(reconstruct_process(&pairs).is_err());
        assert!(reconstruct_process(&pairs[..3]).is_err());
    }

    #[test]
    fn physicality_repairs_noisy_chi() {
        // Perturb identity with an anti-Hermitian, non-PSD, non-TP error.
        let mut chi = *ProcessMatrix::<f64>::identity().chi();
        chi[(0, 1)] = Complex::new(0.02, 0.01);
        chi[(1, 1)] = Complex::new(-0.01, 0.0);
        chi[(3, 3)] = Complex::new(0.03, 0.0);
        let (fixed, corr) = make_physical(&chi).unwrap();
        assert!(corr.hermitian_residual > 0.0);
        assert!(corr.clipped_weight > 0.0);
        assert!(corr.tp_deviation > 1e-6);
        assert!(fixed.is_cptp(), "eig {:?} tp {}", fixed.eigenvalues(), fixed.tp_deviation());
    }

    #[test]
    fn counts_pipeline_identity() {
        let n = 1_000_000;
        let rec = |z: (u64, u64), x: (u64, u64), y: (u64, u64)| {
            [
                MeasurementRecord::new(Basis::Z, z.0, z.1),
                MeasurementRecord::new(Basis::X, x.0, x.1),
                MeasurementRecord::new(Basis::Y, y.0, y.1),
            ]
        };
        let h = n / 2;
        let counts = ProcessInputCounts {
            records: [
                rec((n, 0), (h, h), (h, h)),
                rec((0, n), (h, h), (h, h)),
                rec((h, h), (n, 0), (h, h)),
                rec((h, h), (h, h), (n, 0)),
            ],
        };
        let est = reconstruct_process_from_counts::<f64>(&counts, 200, 1).unwrap();
        assert!((est.f_proc - 1.0).abs() < 1e-12);
        assert!(est.f_proc_std > 0.0 && est.f_proc_std < 1e-3);
    }

    /// Random CPTP χ from four random Kraus-like columns, made trace
    /// preserving by the same congruence used in reconstruction.
    pub(crate) fn random_cptp(entries: &[f64]) -> ProcessMatrix<f64> {
        let mut g = Mat4::<f64>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let k = 2 * (i * 4 + j);
                g[(i, j)] = Complex::new(entries[k], entries[k + 1]);
            }
        }
        let chi = g * g.adjoint();
        make_physical(&chi).unwrap().0
    }

    proptest! {
        #[test]
        fn exact_round_trip(entries in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let truth = random_cptp(&entries);
            prop_assume!(truth.is_cptp());
            let est = reconstruct_process(&exact_pairs(&truth)).unwrap();
            prop_assert!(est.chi.chi().max_abs_diff(truth.chi()) < 1e-9);
            for s in SixState::ALL {
                let out = apply_process(&est.chi, &s.density());
                prop_assert!(out.into_state().is_ok());
            }
        }
    }
}
