use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::Mat2;
use crate::scalar::Scalar;

/// Index of a Pauli operator in the fixed (I, X, Y, Z) ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Scalar>(self) -> Mat2<T> {
        let o = Complex::<T>::zero();
        let l = Complex::<T>::one();
        let i = Complex::<T>::i();
        Mat2::from_rows(match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        })
    }
}

/// The four operators σ0 = I, σ1 = X, σ2 = Y, σ3 = Z in the {|early⟩, |late⟩}
/// basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliBasis<T: Scalar> {
    pub sigma: [Mat2<T>; 4],
}

impl<T: Scalar> PauliBasis<T> {
    pub fn new() -> Self {
        Self {
            sigma: Pauli::ALL.map(Pauli::matrix),
        }
    }

    /// The three traceless operators (X, Y, Z).
    pub fn bloch_axes(&self) -> [Mat2<T>; 3] {
        [self.sigma[1], self.sigma[2], self.sigma[3]]
    }
}

impl<T: Scalar> Default for PauliBasis<T> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonality_is_exact() {
        let b = PauliBasis::<f64>::new();
        for j in 0..4 {
            for k in 0..4 {
                let tr = b.sigma[j].trace_product(&b.sigma[k]);
                let want = if j == k { 2.0 } else { 0.0 };
                assert_eq!(tr, Complex::new(want, 0.0), "Tr(σ{j} σ{k})");
            }
        }
    }

    #[test]
    fn squares_to_identity() {
        let b = PauliBasis::<f32>::new();
        for s in &b.sigma[1..] {
            assert_eq!(*s * *s, Mat2::identity());
        }
    }

    #[test]
    fn xy_is_iz() {
        let b = PauliBasis::<f64>::new();
        let xy = b.sigma[1] * b.sigma[2];
        assert_eq!(xy, b.sigma[3].scale(Complex::i()));
    }
}
