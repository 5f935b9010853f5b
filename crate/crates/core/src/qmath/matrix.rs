//! Fixed-size dense complex matrices and the two decompositions the toolkit
//! needs: a Hermitian eigensolver and a pivoted linear solve.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{c, Scalar};

/// Dense `N × N` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<T: Scalar, const N: usize> {
    pub(crate) m: [[Complex<T>; N]; N],
}

pub type Mat2<T> = CMat<T, 2>;
pub type Mat4<T> = CMat<T, 4>;

impl<T: Scalar, const N: usize> CMat<T, N> {
    pub fn zeros() -> Self {
        Self {
            m: [[Complex::zero(); N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            out.m[i][i] = Complex::one();
        }
        out
    }

    pub fn from_rows(m: [[Complex<T>; N]; N]) -> Self {
        Self { m }
    }

    pub fn from_real(re: [[T; N]; N]) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.m[i][j] = Complex::new(re[i][j], T::zero());
            }
        }
        out
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn outer(v: &[Complex<T>; N]) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.m[i][j] = v[i] * v[j].conj();
            }
        }
        out
    }

    pub fn rows(&self) -> &[[Complex<T>; N]; N] {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..N).map(|i| self.m[i][i]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z = *z * s;
            }
        }
        out
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(c(0.5))
    }

    /// Largest elementwise modulus of `A − A†`.
    pub fn hermiticity_residual(&self) -> T {
        let mut worst = T::zero();
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_residual() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> T {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        let mut acc = Complex::zero();
        for i in 0..N {
            for k in 0..N {
                acc = acc + self.m[i][k] * other.m[k][i];
            }
        }
        acc
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CMat<U, N> {
        let mut out = CMat::<U, N>::zeros();
        for i in 0..N {
            for j in 0..N {
                let z = self.m[i][j];
                out.m[i][j] = Complex::new(f(z.re), f(z.im));
            }
        }
        out
    }
}

impl<T: Scalar, const N: usize> Index<(usize, usize)> for CMat<T, N> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.m[i][j]
    }
}

impl<T: Scalar, const N: usize> IndexMut<(usize, usize)> for CMat<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.m[i][j]
    }
}

impl<T: Scalar, const N: usize> Add for CMat<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.m[i][j] = self.m[i][j] + rhs.m[i][j];
            }
        }
        self
    }
}

impl<T: Scalar, const N: usize> Sub for CMat<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.m[i][j] = self.m[i][j] - rhs.m[i][j];
            }
        }
        self
    }
}

impl<T: Scalar, const N: usize> Mul for CMat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.m[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    out.m[i][j] = out.m[i][j] + a * rhs.m[k][j];
                }
            }
        }
        out
    }
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues ascend. Column `k` of `vectors` pairs with `values[k]` and is
/// phase-fixed so that its first component above `1e-12` in modulus is real
/// positive.
#[derive(Clone, Debug)]
pub struct Eigh<T: Scalar, const N: usize> {
    pub values: [T; N],
    pub vectors: CMat<T, N>,
}

impl<T: Scalar, const N: usize> Eigh<T, N> {
    pub fn vector(&self, k: usize) -> [Complex<T>; N] {
        let mut v = [Complex::zero(); N];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = self.vectors.m[i][k];
        }
        v
    }

    /// `V diag(values) V†` with caller-supplied eigenvalues.
    pub fn recompose(&self, values: &[T; N]) -> CMat<T, N> {
        let mut out = CMat::zeros();
        for (k, &lam) in values.iter().enumerate() {
            if lam == T::zero() {
                continue;
            }
            let v = self.vector(k);
            out = out + CMat::outer(&v).scale_re(lam);
        }
        out
    }
}

const MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Only the Hermitian part of `a` is used. Iterates until the off-diagonal
/// Frobenius mass drops below `T::eig_tol()` times the matrix norm.
pub fn eigh<T: Scalar, const N: usize>(a: &CMat<T, N>) -> Eigh<T, N> {
    let mut a = a.hermitian_part();
    let mut v = CMat::<T, N>::identity();
    let scale = a.frobenius_norm().max(T::min_positive_value());
    let tol = T::eig_tol() * scale;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.m[i][j].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.m[p][q];
                let r = apq.norm();
                if r <= T::min_positive_value() {
                    continue;
                }
                // Remove the phase of a_pq, then do a real symmetric rotation.
                let phase = apq / r;
                let app = a.m[p][p].re;
                let aqq = a.m[q][q].re;
                let theta = (aqq - app) / (c::<T>(2.0) * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // Unitary G acting on columns p, q:
                //   G_pp = cs, G_pq = sn·phase, G_qp = −sn·conj(phase), G_qq = cs
                let g_pp = Complex::new(cs, T::zero());
                let g_pq = phase * sn;
                let g_qp = -(phase.conj() * sn);
                let g_qq = Complex::new(cs, T::zero());
                // A ← A G
                for k in 0..N {
                    let akp = a.m[k][p];
                    let akq = a.m[k][q];
                    a.m[k][p] = akp * g_pp + akq * g_qp;
                    a.m[k][q] = akp * g_pq + akq * g_qq;
                }
                // A ← G† A
                for k in 0..N {
                    let apk = a.m[p][k];
                    let aqk = a.m[q][k];
                    a.m[p][k] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a.m[q][k] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a.m[p][q] = Complex::zero();
                a.m[q][p] = Complex::zero();
                // V ← V G
                for k in 0..N {
                    let vkp = v.m[k][p];
                    let vkq = v.m[k][q];
                    v.m[k][p] = vkp * g_pp + vkq * g_qp;
                    v.m[k][q] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| {
        a.m[i][i]
            .re
            .partial_cmp(&a.m[j][j].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = std::array::from_fn(|k| a.m[order[k]][order[k]].re);
    let mut vectors = CMat::zeros();
    for (k, &src) in order.iter().enumerate() {
        let mut col: [Complex<T>; N] = std::array::from_fn(|i| v.m[i][src]);
        fix_phase(&mut col);
        for i in 0..N {
            vectors.m[i][k] = col[i];
        }
    }
    Eigh { values, vectors }
}

/// Closed-form eigen-decomposition of a 2×2 Hermitian matrix.
///
/// Writes `h = m·I + g·(n·σ)` and takes the eigenvectors from the polar
/// angles of `n`, which keeps them orthonormal even when the spectrum is
/// nearly degenerate.
pub fn eigh2<T: Scalar>(a: &Mat2<T>) -> Eigh<T, 2> {
    let h = a.hermitian_part();
    let p = h.m[0][0].re;
    let q = h.m[1][1].re;
    let b = h.m[0][1];
    let mean = (p + q) * c(0.5);
    let dz = (p - q) * c(0.5);
    let diagonal = b.norm() == T::zero();
    if diagonal {
        let mut vectors = CMat::zeros();
        let (lo, hi) = if p <= q { (0, 1) } else { (1, 0) };
        vectors.m[lo][0] = Complex::one();
        vectors.m[hi][1] = Complex::one();
        return Eigh {
            values: [p.min(q), p.max(q)],
            vectors,
        };
    }
    let half_gap = dz.hypot(b.norm());
    let theta = b.norm().atan2(dz);
    let phi = (-b.im).atan2(b.re);
    let (s, co) = (theta * c(0.5)).sin_cos();
    let e = Complex::from_polar(T::one(), phi);
    let mut lo = [Complex::new(s, T::zero()), -(e * co)];
    let mut hi = [Complex::new(co, T::zero()), e * s];
    fix_phase(&mut lo);
    fix_phase(&mut hi);
    let mut vectors = CMat::zeros();
    for i in 0..2 {
        vectors.m[i][0] = lo[i];
        vectors.m[i][1] = hi[i];
    }
    Eigh {
        values: [mean - half_gap, mean + half_gap],
        vectors,
    }
}

fn fix_phase<T: Scalar, const N: usize>(col: &mut [Complex<T>; N]) {
    let thresh: T = c(1e-12);
    if let Some(lead) = col.iter().find(|z| z.norm() > thresh).copied() {
        let rot = lead.conj() / lead.norm();
        for z in col.iter_mut() {
            *z = *z * rot;
        }
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `rel_tol` times the largest entry
/// of `A`.
pub fn solve<T: Scalar>(
    mut a: Vec<Vec<Complex<T>>>,
    mut b: Vec<Complex<T>>,
    rel_tol: T,
) -> Option<Vec<Complex<T>>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let amax = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(T::zero(), T::max);
    if amax == T::zero() {
        return None;
    }
    for col in 0..n {
        let (piv, pmag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .fold((col, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag <= rel_tol * amax {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot = a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] / pivot;
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[r][k] = a[r][k] - f * v;
            }
            let bc = b[col];
            b[r] = b[r] - f * bc;
        }
    }
    let mut x = vec![Complex::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for k in (r + 1)..n {
            acc = acc - a[r][k] * x[k];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}
