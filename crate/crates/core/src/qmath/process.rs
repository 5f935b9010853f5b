//! Single-qubit channels in the Pauli χ representation,
//! `ε(ρ) = Σ_{l,k} χ_lk σ_l ρ σ_k`.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{eigh, solve, Mat2, Mat4};
use super::pauli::PauliBasis;
use super::state::{matrix_bloch_vector, DensityMatrix};
use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Affine action of a channel on Bloch vectors, `r ↦ M r + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap<T: Scalar> {
    pub m: [[T; 3]; 3],
    pub c: [T; 3],
}

impl<T: Scalar> AffineMap<T> {
    pub fn identity() -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Self { m, c: [T::zero(); 3] }
    }

    /// Diagonal shrink plus translation.
    pub fn diagonal(shrink: [T; 3], shift: [T; 3]) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for i in 0..3 {
            m[i][i] = shrink[i];
        }
        Self { m, c: shift }
    }

    pub fn apply(&self, r: [T; 3]) -> [T; 3] {
        std::array::from_fn(|j| (0..3).map(|k| self.m[j][k] * r[k]).sum::<T>() + self.c[j])
    }
}

/// 4×4 process matrix over the (I, X, Y, Z) operator basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessMatrix<T: Scalar> {
    chi: Mat4<T>,
    basis: PauliBasis<T>,
}

/// Result of pushing a state through a process that may not be trace
/// preserving.
#[derive(Clone, Copy, Debug)]
pub struct ProcessOutput<T: Scalar> {
    pub matrix: Mat2<T>,
    /// `|Tr ε(ρ) − 1|`.
    pub trace_deviation: T,
}

impl<T: Scalar> ProcessOutput<T> {
    pub fn is_trace_preserving(&self) -> bool {
        self.trace_deviation <= T::tp_tol()
    }

    pub fn into_state(self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.matrix)
    }
}

impl<T: Scalar> ProcessMatrix<T> {
    /// Wraps a χ matrix, checking only Hermiticity. Use [`Self::is_cptp`] for
    /// the full physicality test.
    pub fn new(chi: Mat4<T>) -> Result<Self> {
        let herm = chi.hermiticity_residual();
        if herm > T::hermitian_tol() {
            return Err(Error::arg(format!("χ not Hermitian (residual {herm})")));
        }
        Ok(Self::new_unchecked(chi))
    }

    pub(crate) fn new_unchecked(chi: Mat4<T>) -> Self {
        Self {
            chi,
            basis: PauliBasis::new(),
        }
    }

    pub fn identity() -> Self {
        Self::pauli_channel([T::one(), T::zero(), T::zero(), T::zero()])
    }

    /// Diagonal χ: applies σ_k with probability `p[k]`.
    pub fn pauli_channel(p: [T; 4]) -> Self {
        let mut chi = Mat4::zeros();
        for k in 0..4 {
            chi[(k, k)] = Complex::new(p[k], T::zero());
        }
        Self::new_unchecked(chi)
    }

    /// `ρ ↦ λρ + (1 − λ) I/2`.
    pub fn depolarizing(shrink: T) -> Self {
        let q = (T::one() - shrink) * c(0.25);
        Self::pauli_channel([T::one() - q * c(3.0), q, q, q])
    }

    pub fn chi(&self) -> &Mat4<T> {
        &self.chi
    }

    pub fn basis(&self) -> &PauliBasis<T> {
        &self.basis
    }

    /// `Σ χ_lk σ_l X σ_k` for an arbitrary operator `X`.
    pub fn apply_operator(&self, x: &Mat2<T>) -> Mat2<T> {
        let s = &self.basis.sigma;
        let mut out = Mat2::zeros();
        for l in 0..4 {
            let left = s[l] * *x;
            for k in 0..4 {
                let w = self.chi[(l, k)];
                if w.is_zero() {
                    continue;
                }
                out = out + (left * s[k]).scale(w);
            }
        }
        out
    }

    /// `Σ χ_lk σ_k σ_l`, equal to the identity for trace-preserving χ.
    pub fn trace_operator(&self) -> Mat2<T> {
        let s = &self.basis.sigma;
        let mut out = Mat2::zeros();
        for l in 0..4 {
            for k in 0..4 {
                out = out + (s[k] * s[l]).scale(self.chi[(l, k)]);
            }
        }
        out
    }

    pub fn tp_deviation(&self) -> T {
        self.trace_operator().max_abs_diff(&Mat2::identity())
    }

    pub fn eigenvalues(&self) -> [T; 4] {
        eigh(&self.chi).values
    }

    pub fn is_cptp(&self) -> bool {
        self.chi.is_hermitian(T::hermitian_tol())
            && self.eigenvalues()[0] >= -T::psd_tol()
            && self.tp_deviation() <= T::tp_tol()
    }

    /// Bloch-space action: `M_jk = ½ Tr(σ_j ε(σ_k))`, `c_j = ½ Tr(σ_j ε(I))`.
    pub fn affine_map(&self) -> AffineMap<T> {
        let s = &self.basis.sigma;
        let half: T = c(0.5);
        let shift = matrix_bloch_vector(&self.apply_operator(&s[0])).map(|x| x * half);
        let mut m = [[T::zero(); 3]; 3];
        for k in 0..3 {
            let img = matrix_bloch_vector(&self.apply_operator(&s[k + 1]));
            for j in 0..3 {
                m[j][k] = img[j] * half;
            }
        }
        AffineMap { m, c: shift }
    }

    /// χ of the trace-preserving channel with the given Bloch action.
    pub fn from_affine(map: &AffineMap<T>) -> Result<Self> {
        let s = PauliBasis::<T>::new().sigma;
        let pauli_image = |v: [T; 3]| {
            let mut out = Mat2::zeros();
            for j in 0..3 {
                out = out + s[j + 1].scale_re(v[j]);
            }
            out
        };
        let img_id = s[0] + pauli_image(map.c);
        let img_axis: [Mat2<T>; 3] =
            std::array::from_fn(|k| pauli_image([map.m[0][k], map.m[1][k], map.m[2][k]]));
        // Matrix units in terms of (I, X, Y, Z):
        //   E00 = (I + Z)/2, E11 = (I − Z)/2, E01 = (X + iY)/2, E10 = (X − iY)/2
        let h: T = c(0.5);
        let i = Complex::<T>::i();
        let e00 = (img_id + img_axis[2]).scale_re(h);
        let e11 = (img_id - img_axis[2]).scale_re(h);
        let e01 = (img_axis[0] + img_axis[1].scale(i)).scale_re(h);
        let e10 = (img_axis[0] - img_axis[1].scale(i)).scale_re(h);
        chi_from_unit_images(&[[e00, e01], [e10, e11]])
    }
}

/// Solves `Σ χ_lk σ_l E_mn σ_k = images[m][n]` for χ, where `E_mn = |m⟩⟨n|`.
///
/// This is the 16×16 linear system that fixes the process matrix once the
/// channel's action on a full operator basis is known.
pub fn chi_from_unit_images<T: Scalar>(images: &[[Mat2<T>; 2]; 2]) -> Result<ProcessMatrix<T>> {
    let s = PauliBasis::<T>::new().sigma;
    let mut a = vec![vec![Complex::zero(); 16]; 16];
    let mut b = vec![Complex::zero(); 16];
    for m in 0..2 {
        for n in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let row = ((m * 2 + n) * 2 + i) * 2 + j;
                    b[row] = images[m][n][(i, j)];
                    for l in 0..4 {
                        for k in 0..4 {
                            // (σ_l |m⟩⟨n| σ_k)_ij = (σ_l)_im (σ_k)_nj
                            a[row][l * 4 + k] = s[l][(i, m)] * s[k][(n, j)];
                        }
                    }
                }
            }
        }
    }
    let x = solve(a, b, c(1e-12)).ok_or_else(|| Error::arg("singular process system"))?;
    let mut chi = Mat4::zeros();
    for l in 0..4 {
        for k in 0..4 {
            chi[(l, k)] = x[l * 4 + k];
        }
    }
    Ok(ProcessMatrix::new_unchecked(chi))
}

/// `ρ_out = Σ χ_lk σ_l ρ σ_k`, with the trace deviation reported.
pub fn apply_process<T: Scalar>(chi: &ProcessMatrix<T>, rho: &DensityMatrix<T>) -> ProcessOutput<T> {
    let matrix = chi.apply_operator(rho.matrix());
    let trace_deviation = (matrix.trace() - Complex::new(T::one(), T::zero())).norm();
    if trace_deviation > T::tp_tol() {
        log::warn!("process is not trace preserving: |Tr ρ_out − 1| = {trace_deviation}");
    }
    ProcessOutput {
        matrix,
        trace_deviation,
    }
}

/// `F = Re Tr(χ_ideal χ)`.
pub fn process_fidelity<T: Scalar>(chi: &ProcessMatrix<T>, chi_ideal: &ProcessMatrix<T>) -> T {
    chi_ideal.chi.trace_product(&chi.chi).re
}
