//! Poisson parametric bootstrap shared by the state and process estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::process::{reconstruct_process_unscored, ProcessInputCounts};
use super::state::{by_basis, state_from_records, MeasurementRecord, MIN_MC_SAMPLES};
use crate::error::{Error, Result};
use crate::qmath::{process_fidelity, ProcessMatrix, SixState};
use crate::scalar::Scalar;

/// Independent generator for bootstrap resample `index` of a run seeded with
/// `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

pub(crate) fn resample_counts<R: Rng + ?Sized>(rec: &MeasurementRecord, rng: &mut R) -> MeasurementRecord {
    MeasurementRecord::new(
        rec.basis,
        poisson(rec.n_plus as f64, rng),
        poisson(rec.n_minus as f64, rng),
    )
}

/// Sample standard deviation (n − 1 normalization); zero for fewer than two
/// values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}

/// Process matrices reconstructed from `mc_samples` Poisson resamples of
/// `counts`, in resample order.
pub fn bootstrap_processes<T: Scalar>(
    counts: &ProcessInputCounts,
    mc_samples: usize,
    seed: u64,
) -> Result<Vec<ProcessMatrix<T>>> {
    if mc_samples < MIN_MC_SAMPLES {
        return Err(Error::arg(format!(
            "mc_samples = {mc_samples}, need at least {MIN_MC_SAMPLES}"
        )));
    }
    let recs: Vec<[MeasurementRecord; 3]> = counts
        .records
        .iter()
        .map(|r| by_basis(r))
        .collect::<Result<_>>()?;
    (0..mc_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let mut pairs = Vec::with_capacity(4);
            for (state, r) in SixState::PROCESS_INPUTS.iter().zip(&recs) {
                let drawn = r.map(|rec| resample_counts(&rec, &mut rng));
                let out = state_from_records::<T>(&drawn)?;
                pairs.push((state.density::<T>(), out));
            }
            Ok(reconstruct_process_unscored(&pairs)?.0)
        })
        .collect()
}

/// Spread of the process fidelity (vs identity) over Poisson-resampled
/// reconstructions of the four process inputs.
pub fn monte_carlo_process_uncertainty<T: Scalar>(
    counts: &ProcessInputCounts,
    mc_samples: usize,
    seed: u64,
) -> Result<T> {
    let identity = ProcessMatrix::<T>::identity();
    let fids: Vec<f64> = bootstrap_processes::<T>(counts, mc_samples, seed)?
        .iter()
        .map(|chi| process_fidelity(chi, &identity).to_f64_lossy())
        .collect();
    Ok(T::from_f64_lossy(sample_std(&fids)))
}
