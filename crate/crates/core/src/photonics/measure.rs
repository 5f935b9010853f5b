use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::fmi::{fmi_qubit_central, FmiBasis};
use super::link::{channel_transmission, LinkBudget};
use crate::error::{Error, Result};
use crate::qmath::{apply_process, AffineMap, DensityMatrix, ProcessMatrix, SixState};
use crate::tomography::{Basis, MeasurementRecord};

/// Qubit channel between preparation and analysis.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    #[default]
    Identity,
    /// Uniform Bloch shrink giving process fidelity `process_fidelity`.
    Depolarizing { process_fidelity: f64 },
    /// Diagonal Bloch map fixed by the six state fidelities, in the order
    /// `0, 1, +, −, +i, −i`.
    StateFidelities { fidelities: [f64; 6] },
}

impl ChannelSpec {
    pub fn affine_map(&self) -> Result<AffineMap<f64>> {
        match *self {
            ChannelSpec::Identity => Ok(AffineMap::identity()),
            ChannelSpec::Depolarizing { process_fidelity } => {
                if !(0.25..=1.0).contains(&process_fidelity) {
                    return Err(Error::arg(format!(
                        "depolarizing process fidelity {process_fidelity} outside [0.25, 1]"
                    )));
                }
                // F = (1 + 3λ)/4
                let s = (4.0 * process_fidelity - 1.0) / 3.0;
                Ok(AffineMap::diagonal([s; 3], [0.0; 3]))
            }
            ChannelSpec::StateFidelities { fidelities: f } => {
                if f.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err(Error::arg("state fidelities must lie in [0, 1]"));
                }
                // Pairs (0,1) → z, (+,−) → x, (+i,−i) → y.
                let axis = |a: f64, b: f64| (a + b - 1.0, a - b);
                let (sz, cz) = axis(f[0], f[1]);
                let (sx, cx) = axis(f[2], f[3]);
                let (sy, cy) = axis(f[4], f[5]);
                Ok(AffineMap::diagonal([sx, sy, sz], [cx, cy, cz]))
            }
        }
    }

    /// χ of the channel; errors if it is not completely positive.
    pub fn process(&self) -> Result<ProcessMatrix<f64>> {
        let chi = ProcessMatrix::from_affine(&self.affine_map()?)?;
        if !chi.is_cptp() {
            return Err(Error::arg(format!("channel {self:?} is not completely positive")));
        }
        Ok(chi)
    }
}

/// Outcome probabilities `(p₊, p₋)` of a single photon in state `rho`,
/// before loss.
fn outcome_split(rho: &DensityMatrix<f64>, basis: Basis) -> (f64, f64) {
    match basis {
        Basis::Z => {
            let m = rho.matrix();
            (m[(0, 0)].re, m[(1, 1)].re)
        }
        // Only the interference bin is kept; the side bins carry the other half.
        Basis::X => fmi_qubit_central(rho, 0.0, FmiBasis::X),
        Basis::Y => fmi_qubit_central(rho, 0.0, FmiBasis::Y),
    }
}

/// Exclusive single-click probabilities for the two outcome detectors given
/// photon routing `a` (to `+`), `b` (to `−`) and dark probability `d` each.
/// Double clicks are discarded.
pub(crate) fn exclusive_clicks(a: f64, b: f64, d: f64) -> (f64, f64) {
    let lost = (1.0 - a - b).max(0.0);
    (
        a * (1.0 - d) + lost * d * (1.0 - d),
        b * (1.0 - d) + lost * d * (1.0 - d),
    )
}

/// Per-shot probabilities of an exclusive `+` and an exclusive `−` click.
fn click_split(prep: SixState, basis: Basis, link: &LinkBudget, channel: &ProcessMatrix<f64>) -> Result<(f64, f64)> {
    let out = apply_process(channel, &prep.density());
    let rho = out.into_state()?;
    let (p, m) = outcome_split(&rho, basis);
    let arrive = channel_transmission(link) * link.detector_efficiency;
    Ok(exclusive_clicks(
        (p * arrive).clamp(0.0, 1.0),
        (m * arrive).clamp(0.0, 1.0),
        link.dark_click_probability(),
    ))
}

/// Single-photon shots of `prep` sent through `channel` and `link`, analysed
/// in `basis`. A record with zero counts is returned as is; the
/// reconstruction layer rejects it.
pub fn measure_in_basis<R: Rng + ?Sized>(
    prep: SixState,
    basis: Basis,
    shots: u64,
    link: &LinkBudget,
    channel: &ProcessMatrix<f64>,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::arg("shots must be positive"));
    }
    let (cp, cm) = click_split(prep, basis, link, channel)?;
    let n_plus = binomial(shots, cp, rng);
    let rest = shots - n_plus;
    let cond = if cp < 1.0 { (cm / (1.0 - cp)).clamp(0.0, 1.0) } else { 0.0 };
    let n_minus = binomial(rest, cond, rng);
    Ok(MeasurementRecord::new(basis, n_plus, n_minus))
}

/// Counts rounded from the exact expectations instead of sampled.
pub fn expected_in_basis(
    prep: SixState,
    basis: Basis,
    shots: u64,
    link: &LinkBudget,
    channel: &ProcessMatrix<f64>,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::arg("shots must be positive"));
    }
    let (cp, cm) = click_split(prep, basis, link, channel)?;
    let n = shots as f64;
    Ok(MeasurementRecord::new(basis, (cp * n).round() as u64, (cm * n).round() as u64))
}

pub(crate) fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).map(|d| d.sample(rng)).unwrap_or(0)
}
