use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::montecarlo::{resample_counts, sample_std, substream};
use crate::error::{Error, Result};
use crate::qmath::{
    bloch_to_matrix, eigh2, state_fidelity, DensityMatrix, Ket, Mat2,
};
use crate::scalar::Scalar;

/// Measurement basis; outcome `+` is the +1 eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// Position of the matching Bloch component (x = 0, y = 1, z = 2).
    pub fn bloch_index(self) -> usize {
        match self {
            Basis::X => 0,
            Basis::Y => 1,
            Basis::Z => 2,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
            Basis::Y => "Y",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" | "z" => Ok(Basis::Z),
            "X" | "x" => Ok(Basis::X),
            "Y" | "y" => Ok(Basis::Y),
            other => Err(Error::arg(format!("unknown basis `{other}`"))),
        }
    }
}

/// Counts of the two eigen-outcomes of one basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub basis: Basis,
    pub n_plus: u64,
    pub n_minus: u64,
}

impl MeasurementRecord {
    pub fn new(basis: Basis, n_plus: u64, n_minus: u64) -> Self {
        Self {
            basis,
            n_plus,
            n_minus,
        }
    }

    pub fn total(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    /// `(n₊ − n₋) / (n₊ + n₋)`.
    pub fn expectation(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::arg(format!("basis {} has zero total counts", self.basis)));
        }
        Ok((self.n_plus as f64 - self.n_minus as f64) / total as f64)
    }

    pub fn scaled(&self, factor: u64) -> Self {
        Self::new(self.basis, self.n_plus * factor, self.n_minus * factor)
    }
}

/// Finds the one record for each of Z, X, Y.
pub(crate) fn by_basis(records: &[MeasurementRecord]) -> Result<[MeasurementRecord; 3]> {
    let mut found: [Option<MeasurementRecord>; 3] = [None; 3];
    for rec in records {
        let slot = &mut found[rec.basis.bloch_index()];
        if slot.is_some() {
            return Err(Error::arg(format!("duplicate record for basis {}", rec.basis)));
        }
        *slot = Some(*rec);
    }
    let mut out = [MeasurementRecord::new(Basis::Z, 0, 0); 3];
    for (i, b) in [Basis::X, Basis::Y, Basis::Z].into_iter().enumerate() {
        out[i] = found[i].ok_or_else(|| Error::arg(format!("missing record for basis {b}")))?;
    }
    Ok(out)
}

/// Linear inversion `(I + Σ r_k σ_k) / 2`; exact trace one, possibly not PSD.
pub fn qst_linear<T: Scalar>(records: &[MeasurementRecord]) -> Result<Mat2<T>> {
    let recs = by_basis(records)?;
    let mut r = [T::zero(); 3];
    for (k, rec) in recs.iter().enumerate() {
        r[k] = T::from_f64_lossy(rec.expectation()?);
    }
    Ok(bloch_to_matrix(r))
}

/// Closest trace-one PSD matrix in Frobenius norm.
///
/// For a 2×2 trace-one input the simplex projection of the spectrum reduces
/// to clipping the negative eigenvalue and renormalizing. Physical inputs are
/// returned unchanged.
pub fn project_physical_state<T: Scalar>(raw: &Mat2<T>) -> DensityMatrix<T> {
    let herm = raw.hermitian_part();
    let eig = eigh2(&herm);
    if eig.values[0] >= T::zero() {
        let tr = herm.trace().re;
        return DensityMatrix::new_unchecked(herm.scale_re(T::one() / tr));
    }
    let clipped = eig.values.map(|v| v.max(T::zero()));
    let total: T = clipped.iter().copied().sum();
    let vals = clipped.map(|v| v / total);
    DensityMatrix::new_unchecked(eig.recompose(&vals).hermitian_part())
}

/// Reconstructed state with its fidelity to a reference.
#[derive(Clone, Copy, Debug)]
pub struct StateEstimate<T: Scalar> {
    pub rho: DensityMatrix<T>,
    pub fidelity_to_ideal: T,
    pub fidelity_std: T,
}

pub const MIN_MC_SAMPLES: usize = 100;

pub(crate) fn state_from_records<T: Scalar>(records: &[MeasurementRecord]) -> Result<DensityMatrix<T>> {
    Ok(project_physical_state(&qst_linear::<T>(records)?))
}

/// Linear inversion, physical projection and a Poisson bootstrap of the
/// fidelity.
///
/// Resample `i` redraws every count from `Poisson(observed)` using the
/// substream `(seed, i)`, so the result does not depend on thread scheduling.
pub fn reconstruct_state<T: Scalar>(
    records: &[MeasurementRecord],
    ideal: &Ket<T>,
    mc_samples: usize,
    seed: u64,
) -> Result<StateEstimate<T>> {
    if mc_samples < MIN_MC_SAMPLES {
        return Err(Error::arg(format!(
            "mc_samples = {mc_samples}, need at least {MIN_MC_SAMPLES}"
        )));
    }
    let recs = by_basis(records)?;
    let rho = state_from_records::<T>(&recs)?;
    let fidelity_to_ideal = state_fidelity(&rho, ideal)?;

    let samples: Vec<f64> = (0..mc_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let drawn = recs.map(|r| resample_counts(&r, &mut rng));
            // A resample can empty a basis at tiny counts; score it with the
            // point estimate's state rather than aborting the bootstrap.
            let rho_i = state_from_records::<T>(&drawn).unwrap_or(rho);
            state_fidelity(&rho_i, ideal).map(|f| f.to_f64_lossy())
        })
        .collect::<Result<_>>()?;

    Ok(StateEstimate {
        rho,
        fidelity_to_ideal,
        fidelity_std: T::from_f64_lossy(sample_std(&samples)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::SixState;
    use proptest::prelude::*;

    fn recs(z: (u64, u64), x: (u64, u64), y: (u64, u64)) -> Vec<MeasurementRecord> {
        vec![
            MeasurementRecord::new(Basis::Z, z.0, z.1),
            MeasurementRecord::new(Basis::X, x.0, x.1),
            MeasurementRecord::new(Basis::Y, y.0, y.1),
        ]
    }

    #[test]
    fn linear_inversion_examples() {
        let plus = qst_linear::<f64>(&recs((500, 500), (1000, 0), (500, 500))).unwrap();
        assert!(plus.max_abs_diff(SixState::Plus.density::<f64>().matrix()) < 1e-15);

        let zero = qst_linear::<f64>(&recs((1000, 0), (500, 500), (500, 500))).unwrap();
        assert!(zero.max_abs_diff(SixState::Zero.density::<f64>().matrix()) < 1e-15);

        let partial = qst_linear::<f64>(&recs((600, 400), (500, 500), (500, 500))).unwrap();
        let want = Mat2::from_real([[0.6, 0.0], [0.0, 0.4]]);
        assert!(partial.max_abs_diff(&want) < 1e-15);
        assert_eq!(partial.trace().re, 1.0);
    }

    #[test]
    fn linear_inversion_errors() {
        let missing = vec![
            MeasurementRecord::new(Basis::Z, 1, 0),
            MeasurementRecord::new(Basis::X, 1, 0),
        ];
        assert!(qst_linear::<f64>(&missing).is_err());
        assert!(qst_linear::<f64>(&recs((0, 0), (1, 1), (1, 1))).is_err());
        let dup = vec![
            MeasurementRecord::new(Basis::Z, 1, 0),
            MeasurementRecord::new(Basis::Z, 1, 0),
            MeasurementRecord::new(Basis::X, 1, 0),
        ];
        assert!(qst_linear::<f64>(&dup).is_err());
    }

    #[test]
    fn projection_examples() {
        // Spectrum (1.1, −0.1) along Z clips to |0⟩⟨0|.
        let raw = Mat2::<f64>::from_real([[1.1, 0.0], [0.0, -0.1]]);
        let p = project_physical_state(&raw);
        assert!(p.matrix().max_abs_diff(SixState::Zero.density::<f64>().matrix()) < 1e-15);

        let mixed = DensityMatrix::<f64>::maximally_mixed();
        assert_eq!(project_physical_state(mixed.matrix()), mixed);

        let phys = DensityMatrix::from_bloch([0.3, -0.2, 0.5]).unwrap();
        assert_eq!(project_physical_state(phys.matrix()), phys);
    }

    #[test]
    fn noiseless_zero_state() {
        let r = recs((100_000_000, 0), (50_000_000, 50_000_000), (50_000_000, 50_000_000));
        let est = reconstruct_state(&r, &SixState::Zero.ket::<f64>(), 200, 3).unwrap();
        assert_eq!(est.fidelity_to_ideal, 1.0);
        // Transverse Poisson noise only enters at second order for an
        // eigenstate, so the spread vanishes as 1/N.
        assert!(est.fidelity_std < 1e-7, "{}", est.fidelity_std);
    }

    #[test]
    fn too_few_samples_rejected() {
        let r = recs((10, 0), (5, 5), (5, 5));
        assert!(reconstruct_state(&r, &SixState::Zero.ket::<f64>(), 99, 0).is_err());
    }

    #[test]
    fn bootstrap_is_seed_deterministic() {
        let r = recs((480, 520), (900, 100), (530, 470));
        let ket = SixState::Plus.ket::<f64>();
        let a = reconstruct_state(&r, &ket, 300, 11).unwrap();
        let b = reconstruct_state(&r, &ket, 300, 11).unwrap();
        let c = reconstruct_state(&r, &ket, 300, 12).unwrap();
        assert_eq!(a.fidelity_std, b.fidelity_std);
        assert_ne!(a.fidelity_std, c.fidelity_std);
    }

    #[test]
    fn std_shrinks_tenfold_for_hundredfold_counts() {
        let base = recs((520, 480), (880, 120), (470, 530));
        let big: Vec<_> = base.iter().map(|r| r.scaled(100)).collect();
        let ket = SixState::Plus.ket::<f64>();
        let s1 = reconstruct_state(&base, &ket, 2000, 5).unwrap().fidelity_std;
        let s2 = reconstruct_state(&big, &ket, 2000, 5).unwrap().fidelity_std;
        let ratio = s1 / s2;
        assert!((8.5..11.5).contains(&ratio), "ratio {ratio}");
    }

    fn frob(a: &Mat2<f64>, b: &Mat2<f64>) -> f64 {
        (*a - *b).frobenius_norm()
    }

    proptest! {
        #[test]
        fn projection_is_closest_physical(rx in -1.5f64..1.5, ry in -1.5f64..1.5, rz in -1.5f64..1.5,
                                          ox in -1.0f64..1.0, oy in -1.0f64..1.0, oz in -1.0f64..1.0) {
            let raw = bloch_to_matrix([rx, ry, rz]);
            let p = project_physical_state(&raw);
            prop_assert!(DensityMatrix::new(*p.matrix()).is_ok());
            // Any physical reference is at least as far from raw as the projection.
            let len = (ox * ox + oy * oy + oz * oz).sqrt().max(1.0);
            let other = bloch_to_matrix([ox / len, oy / len, oz / len]);
            prop_assert!(frob(p.matrix(), &raw) <= frob(&other, &raw) + 1e-12);
            // Idempotent.
            let again = project_physical_state(p.matrix());
            prop_assert!(again.matrix().max_abs_diff(p.matrix()) < 1e-12);
        }
    }
}
