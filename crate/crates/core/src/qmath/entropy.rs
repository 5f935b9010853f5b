use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Binary Shannon entropy in bits, with `h2(0) = h2(1) = 0`.
pub fn binary_entropy<T: Scalar>(x: T) -> Result<T> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::arg(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let term = |p: T| if p > T::zero() { -p * p.log2() } else { T::zero() };
    Ok(term(x) + term(T::one() - x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(binary_entropy(0.0f64).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0f64).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5f64).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.5f32).unwrap(), 1.0);
    }

    #[test]
    fn low_qber_value() {
        // −0.0025·log2(0.0025) − 0.9975·log2(0.9975) = 0.025211…
        let h = binary_entropy(0.0025f64).unwrap();
        assert!((h - 0.02521).abs() < 1e-5, "{h}");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(binary_entropy(-1e-3f64).is_err());
        assert!(binary_entropy(1.0001f64).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn symmetric(x in 0.0f64..=1.0) {
            let a = binary_entropy(x).unwrap();
            let b = binary_entropy(1.0 - x).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
