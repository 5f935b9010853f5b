use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the linear-algebra and tomography layers are generic over.
///
/// The tolerances scale with the precision of the type: the f64 values are the
/// ones the numerical contracts are stated in, f32 gets looser bounds that are
/// still far below any physical effect the toolkit resolves.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Elementwise Hermiticity tolerance.
    fn hermitian_tol() -> Self;
    /// Trace-one tolerance for density matrices.
    fn trace_tol() -> Self;
    /// Smallest eigenvalue still accepted as positive semidefinite.
    fn psd_tol() -> Self;
    /// Off-diagonal convergence threshold for the Jacobi eigensolver.
    fn eig_tol() -> Self;
    /// Trace-preservation tolerance for process matrices.
    fn tp_tol() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn hermitian_tol() -> Self {
        1e-12
    }
    fn trace_tol() -> Self {
        1e-9
    }
    fn psd_tol() -> Self {
        1e-9
    }
    fn eig_tol() -> Self {
        1e-12
    }
    fn tp_tol() -> Self {
        1e-6
    }
}

impl Scalar for f32 {
    fn hermitian_tol() -> Self {
        1e-5
    }
    fn trace_tol() -> Self {
        1e-5
    }
    fn psd_tol() -> Self {
        1e-5
    }
    fn eig_tol() -> Self {
        1e-6
    }
    fn tp_tol() -> Self {
        1e-4
    }
}

/// Shorthand for small literal constants in generic code.
#[inline]
pub(crate) fn c<T: Scalar>(v: f64) -> T {
    T::from_f64_lossy(v)
}
