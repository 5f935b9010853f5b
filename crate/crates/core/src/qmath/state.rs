use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{eigh2, Mat2};
use super::pauli::PauliBasis;
use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Pure single-qubit state `α|early⟩ + β|late⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket<T: Scalar>(pub [Complex<T>; 2]);

impl<T: Scalar> Ket<T> {
    pub fn new(early: Complex<T>, late: Complex<T>) -> Self {
        Self([early, late])
    }

    pub fn norm(&self) -> T {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    /// Pure state pointing along the given Bloch direction.
    pub fn from_angles(theta: T, phi: T) -> Self {
        let half = theta * c(0.5);
        Self([
            Complex::new(half.cos(), T::zero()),
            Complex::from_polar(half.sin(), phi),
        ])
    }

    pub fn projector(&self) -> Mat2<T> {
        Mat2::outer(&self.0)
    }
}

/// The six time-bin states used for state tomography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SixState {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+i")]
    PlusI,
    #[serde(rename = "-i")]
    MinusI,
}

impl SixState {
    pub const ALL: [SixState; 6] = [
        SixState::Zero,
        SixState::One,
        SixState::Plus,
        SixState::Minus,
        SixState::PlusI,
        SixState::MinusI,
    ];

    /// Inputs used to reconstruct a process: |0⟩, |1⟩, |+⟩, |+i⟩.
    pub const PROCESS_INPUTS: [SixState; 4] =
        [SixState::Zero, SixState::One, SixState::Plus, SixState::PlusI];

    pub fn label(self) -> &'static str {
        match self {
            SixState::Zero => "0",
            SixState::One => "1",
            SixState::Plus => "+",
            SixState::Minus => "-",
            SixState::PlusI => "+i",
            SixState::MinusI => "-i",
        }
    }

    pub fn ket<T: Scalar>(self) -> Ket<T> {
        let o = Complex::<T>::zero();
        let l = Complex::<T>::one();
        let s = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        let si = Complex::new(T::zero(), T::FRAC_1_SQRT_2());
        match self {
            SixState::Zero => Ket([l, o]),
            SixState::One => Ket([o, l]),
            SixState::Plus => Ket([s, s]),
            SixState::Minus => Ket([s, -s]),
            SixState::PlusI => Ket([s, si]),
            SixState::MinusI => Ket([s, -si]),
        }
    }

    pub fn bloch<T: Scalar>(self) -> [T; 3] {
        let (o, l) = (T::zero(), T::one());
        match self {
            SixState::Zero => [o, o, l],
            SixState::One => [o, o, -l],
            SixState::Plus => [l, o, o],
            SixState::Minus => [-l, o, o],
            SixState::PlusI => [o, l, o],
            SixState::MinusI => [o, -l, o],
        }
    }

    pub fn density<T: Scalar>(self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(&self.ket())
    }
}

impl fmt::Display for SixState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SixState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SixState::ALL
            .into_iter()
            .find(|st| st.label() == s.trim())
            .ok_or_else(|| Error::arg(format!("unknown state label `{s}`")))
    }
}

/// Physical single-qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    m: Mat2<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates the matrix against the Hermitian, trace and PSD tolerances.
    pub fn new(m: Mat2<T>) -> Result<Self> {
        let herm = m.hermiticity_residual();
        if herm > T::hermitian_tol() {
            return Err(Error::arg(format!("matrix not Hermitian (residual {herm})")));
        }
        let tr = m.trace();
        if (tr.re - T::one()).abs() > T::trace_tol() || tr.im.abs() > T::trace_tol() {
            return Err(Error::arg(format!("trace {tr} is not 1")));
        }
        let lo = eigh2(&m).values[0];
        if lo < -T::psd_tol() {
            return Err(Error::arg(format!("negative eigenvalue {lo}")));
        }
        Ok(Self { m })
    }

    pub(crate) fn new_unchecked(m: Mat2<T>) -> Self {
        Self { m }
    }

    pub fn from_pure(ket: &Ket<T>) -> Self {
        let n = ket.norm();
        let v = [ket.0[0] / n, ket.0[1] / n];
        Self { m: Mat2::outer(&v) }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: Mat2::identity().scale_re(c(0.5)),
        }
    }

    /// `(I + r·σ) / 2`; fails when `|r| > 1`.
    pub fn from_bloch(r: [T; 3]) -> Result<Self> {
        let len = r.iter().map(|&x| x * x).sum::<T>().sqrt();
        if len > T::one() + T::psd_tol() {
            return Err(Error::arg(format!("Bloch vector length {len} exceeds 1")));
        }
        Ok(Self::new_unchecked(bloch_to_matrix(r)))
    }

    pub fn matrix(&self) -> &Mat2<T> {
        &self.m
    }

    pub fn eigenvalues(&self) -> [T; 2] {
        eigh2(&self.m).values
    }

    pub fn bloch_vector(&self) -> [T; 3] {
        bloch_vector(self)
    }

    pub fn purity(&self) -> T {
        self.m.trace_product(&self.m).re
    }

    /// Convex combination `a·self + (1 − a)·other`.
    pub fn mix(&self, other: &Self, a: T) -> Self {
        Self::new_unchecked(self.m.scale_re(a) + other.m.scale_re(T::one() - a))
    }
}

/// `(I + Σ r_k σ_k) / 2` without physicality checks.
pub fn bloch_to_matrix<T: Scalar>(r: [T; 3]) -> Mat2<T> {
    let b = PauliBasis::<T>::new();
    let mut m = b.sigma[0];
    for (k, &rk) in r.iter().enumerate() {
        m = m + b.sigma[k + 1].scale_re(rk);
    }
    m.scale_re(c(0.5))
}

/// `r_k = Tr(ρ σ_k)` for k = X, Y, Z.
pub fn bloch_vector<T: Scalar>(rho: &DensityMatrix<T>) -> [T; 3] {
    matrix_bloch_vector(&rho.m)
}

pub(crate) fn matrix_bloch_vector<T: Scalar>(m: &Mat2<T>) -> [T; 3] {
    let b = PauliBasis::<T>::new();
    let axes = b.bloch_axes();
    std::array::from_fn(|k| m.trace_product(&axes[k]).re)
}

/// Overlap `⟨ψ|ρ|ψ⟩` of a state with a normalized pure reference.
pub fn state_fidelity<T: Scalar>(rho: &DensityMatrix<T>, ideal: &Ket<T>) -> Result<T> {
    let n = ideal.norm();
    if (n - T::one()).abs() > T::trace_tol() {
        return Err(Error::arg(format!("reference state has norm {n}, expected 1")));
    }
    let psi = ideal.0;
    let mut acc = Complex::zero();
    for i in 0..2 {
        for j in 0..2 {
            acc = acc + psi[i].conj() * rho.m[(i, j)] * psi[j];
        }
    }
    Ok(acc.re)
}
