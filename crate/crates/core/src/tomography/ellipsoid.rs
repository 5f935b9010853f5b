use crate::error::{Error, Result};
use crate::qmath::ProcessMatrix;
use crate::scalar::{c, Scalar};

/// One vertex of the deformed Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshPoint<T: Scalar> {
    pub theta: T,
    pub phi: T,
    pub image: [T; 3],
}

/// Image of an `n_theta × n_phi` latitude/longitude grid on the unit sphere
/// under the channel's affine Bloch map.
///
/// `theta` spans `[0, π]` and `phi` spans `[0, 2π]`, both endpoints included
/// so the mesh closes when plotted.
pub fn bloch_ellipsoid<T: Scalar>(
    chi: &ProcessMatrix<T>,
    n_theta: usize,
    n_phi: usize,
) -> Result<Vec<MeshPoint<T>>> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::arg(format!(
            "mesh needs at least 2×2 points, got {n_theta}×{n_phi}"
        )));
    }
    let map = chi.affine_map();
    let dt = T::PI() / T::from_usize(n_theta - 1).unwrap();
    let dp = c::<T>(2.0) * T::PI() / T::from_usize(n_phi - 1).unwrap();
    let mut mesh = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = dt * T::from_usize(i).unwrap();
        for j in 0..n_phi {
            let phi = dp * T::from_usize(j).unwrap();
            let r = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            mesh.push(MeshPoint {
                theta,
                phi,
                image: map.apply(r),
            });
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{apply_process, bloch_vector, AffineMap, DensityMatrix, Ket};
    use proptest::prelude::*;

    fn radius(p: &MeshPoint<f64>) -> f64 {
        p.image.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn identity_gives_unit_sphere() {
        let mesh = bloch_ellipsoid(&ProcessMatrix::<f64>::identity(), 9, 17).unwrap();
        assert_eq!(mesh.len(), 9 * 17);
        assert!(mesh.iter().all(|p| (radius(p) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn depolarizing_collapses_to_origin() {
        let chi = ProcessMatrix::<f64>::pauli_channel([0.25; 4]);
        let mesh = bloch_ellipsoid(&chi, 5, 5).unwrap();
        assert!(mesh.iter().all(|p| radius(p) < 1e-15));
    }

    #[test]
    fn rejects_degenerate_grid() {
        assert!(bloch_ellipsoid(&ProcessMatrix::<f64>::identity(), 1, 5).is_err());
    }

    proptest! {
        #[test]
        fn mesh_matches_apply_process(sx in 0.8f64..1.0, sy in 0.8f64..1.0, sz in 0.8f64..1.0,
                                      cz in -0.05f64..0.05, rot in -0.1f64..0.1) {
            let mut map = AffineMap::diagonal([sx, sy, sz], [0.0, 0.0, cz]);
            map.m[0][1] = rot;
            map.m[1][0] = -rot;
            let chi = ProcessMatrix::from_affine(&map).unwrap();
            for p in bloch_ellipsoid(&chi, 7, 9).unwrap() {
                let rho = DensityMatrix::from_pure(&Ket::from_angles(p.theta, p.phi));
                let want = bloch_vector(&DensityMatrix::new_unchecked(apply_process(&chi, &rho).matrix));
                for k in 0..3 {
                    prop_assert!((p.image[k] - want[k]).abs() < 1e-9);
                }
            }
        }
    }
}
