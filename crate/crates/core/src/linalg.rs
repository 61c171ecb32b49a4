//! Small dense linear algebra on fixed-size arrays.
//!
//! Everything here is sized at compile time (2, 3, 4 or 8): qubit
//! operators, two-qubit density matrices and three-qubit operators. Complex
//! Hermitian spectra go through the real-symmetric embedding
//! `A + iB -> [[A, -B], [B, A]]`, which is a *-homomorphism, so matrix
//! functions of the embedding embed matrix functions of the original.

use crate::scalar::{c, cone, czero, Real, C};
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<T, const N: usize>(pub [[C<T>; N]; N]);

pub type CMat2<T> = CMat<T, 2>;
pub type CMat4<T> = CMat<T, 4>;
pub type CMat8<T> = CMat<T, 8>;

/// Real 3x3 matrix, row-major.
pub type Mat3<T> = [[T; 3]; 3];

impl<T: Real, const N: usize> CMat<T, N> {
    pub fn zeros() -> Self {
        CMat([[czero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = cone();
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = *z * s;
            }
        }
        m
    }

    pub fn trace(&self) -> C<T> {
        (0..N).fold(czero(), |acc, i| acc + self.0[i][i])
    }

    pub fn apply(&self, v: &[C<T>; N]) -> [C<T>; N] {
        let mut out = [czero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).fold(czero(), |acc, j| acc + self.0[i][j] * v[j]);
        }
        out
    }

    /// `|v><w|`
    pub fn outer(v: &[C<T>; N], w: &[C<T>; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = v[i] * w[j].conj();
            }
        }
        m
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// `max |M - M^dagger|`
    pub fn hermiticity_residual(&self) -> T {
        (*self - self.adjoint()).max_abs()
    }

    /// `max |M^dagger M - I|`
    pub fn unitarity_residual(&self) -> T {
        (self.adjoint() * *self - Self::identity()).max_abs()
    }
}

impl<T: Real, const N: usize> Mul for CMat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] = m.0[i][j] + a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<T: Real, const N: usize> Add for CMat<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = m.0[i][j] + rhs.0[i][j];
            }
        }
        m
    }
}

impl<T: Real, const N: usize> Sub for CMat<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = m.0[i][j] - rhs.0[i][j];
            }
        }
        m
    }
}

impl<T: Real> CMat2<T> {
    pub fn from_diag(a: T, b: T) -> Self {
        CMat([[c(a, T::zero()), czero()], [czero(), c(b, T::zero())]])
    }
}

/// Pauli matrix `sigma_k`, k = 1, 2, 3 (X, Y, Z); k = 0 is the identity.
pub fn pauli<T: Real>(k: usize) -> CMat2<T> {
    let (o, z, i) = (T::one(), T::zero(), T::one());
    match k {
        0 => CMat2::identity(),
        1 => CMat([[c(z, z), c(o, z)], [c(o, z), c(z, z)]]),
        2 => CMat([[c(z, z), c(z, -i)], [c(z, i), c(z, z)]]),
        3 => CMat([[c(o, z), c(z, z)], [c(z, z), c(-o, z)]]),
        _ => panic!("pauli index {k} out of range"),
    }
}

/// `n . sigma` for a real 3-vector.
pub fn bloch_operator<T: Real>(n: [T; 3]) -> CMat2<T> {
    (1..=3).fold(CMat2::zeros(), |acc, k| {
        acc + pauli::<T>(k).scale(c(n[k - 1], T::zero()))
    })
}

pub fn kron2<T: Real>(a: &CMat2<T>, b: &CMat2<T>) -> CMat4<T> {
    let mut m = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = a.0[i / 2][j / 2] * b.0[i % 2][j % 2];
        }
    }
    m
}

pub fn kron3<T: Real>(a: &CMat2<T>, b: &CMat2<T>, cc: &CMat2<T>) -> CMat8<T> {
    let mut m = CMat8::zeros();
    for i in 0..8 {
        for j in 0..8 {
            m.0[i][j] = a.0[i >> 2][j >> 2] * b.0[(i >> 1) & 1][(j >> 1) & 1] * cc.0[i & 1][j & 1];
        }
    }
    m
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// the *columns* of the second array.
pub fn sym_eigen<T: Real, const N: usize>(a: &[[T; N]; N]) -> ([T; N], [[T; N]; N]) {
    let mut a = *a;
    let mut v = [[T::zero(); N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let two = T::lit(2.0);
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, x| acc + *x * *x)
        .sqrt();
    let threshold = T::epsilon() * T::epsilon() * scale * scale;

    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..N {
            for j in (i + 1)..N {
                off = off + a[i][j] * a[i][j];
            }
        }
        if off <= threshold || off == T::zero() {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = cs * vkp - sn * vkq;
                    row[q] = sn * vkp + cs * vkq;
                }
            }
        }
    }

    let mut idx: [usize; N] = std::array::from_fn(|i| i);
    idx.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = std::array::from_fn(|k| a[idx[k]][idx[k]]);
    let mut vecs = [[T::zero(); N]; N];
    for (k, &src) in idx.iter().enumerate() {
        for r in 0..N {
            vecs[r][k] = v[r][src];
        }
    }
    (vals, vecs)
}

pub fn sym_eigenvalues<T: Real, const N: usize>(a: &[[T; N]; N]) -> [T; N] {
    sym_eigen(a).0
}

fn embed4<T: Real>(h: &CMat4<T>) -> [[T; 8]; 8] {
    let mut e = [[T::zero(); 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let z = h.0[i][j];
            e[i][j] = z.re;
            e[i + 4][j + 4] = z.re;
            e[i][j + 4] = -z.im;
            e[i + 4][j] = z.im;
        }
    }
    e
}

/// Eigenvalues of a 4x4 Hermitian matrix, descending.
pub fn hermitian_eigenvalues4<T: Real>(h: &CMat4<T>) -> [T; 4] {
    let vals = sym_eigenvalues(&embed4(h));
    // the embedded spectrum is the original one with each value doubled
    std::array::from_fn(|k| (vals[2 * k] + vals[2 * k + 1]) / T::lit(2.0))
}

/// Principal square root of a 4x4 positive semidefinite Hermitian matrix
/// (eigenvalues below zero are clamped).
pub fn hermitian_sqrt4<T: Real>(h: &CMat4<T>) -> CMat4<T> {
    hermitian_sqrt4_with_floor(h, T::zero())
}

/// As [`hermitian_sqrt4`], treating eigenvalues at or below `floor` as zero.
pub fn hermitian_sqrt4_with_floor<T: Real>(h: &CMat4<T>, floor: T) -> CMat4<T> {
    let (vals, vecs) = sym_eigen(&embed4(h));
    let mut r = [[T::zero(); 8]; 8];
    for k in 0..8 {
        let s = if vals[k] > floor { vals[k].sqrt() } else { T::zero() };
        for i in 0..8 {
            for j in 0..8 {
                r[i][j] = r[i][j] + s * vecs[i][k] * vecs[j][k];
            }
        }
    }
    let mut m = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = c(r[i][j], r[i + 4][j]);
        }
    }
    m
}

/// Singular values of a real square matrix by one-sided Jacobi, descending.
/// Zero singular values come out at the `eps * ||a||` level.
pub fn singular_values<T: Real, const N: usize>(a: &[[T; N]; N]) -> [T; N] {
    let mut a = *a;
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..N {
            for q in (p + 1)..N {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for row in a.iter() {
                    alpha = alpha + row[p] * row[p];
                    beta = beta + row[q] * row[q];
                    gamma = gamma + row[p] * row[q];
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = cs * x - sn * y;
                    row[q] = sn * x + cs * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: [T; N] = std::array::from_fn(|j| a.iter().fold(T::zero(), |acc, row| acc + row[j] * row[j]).sqrt());
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Singular values of a complex 4x4 matrix, descending.
pub fn complex_singular_values4<T: Real>(m: &CMat4<T>) -> [T; 4] {
    let sv = singular_values(&embed4(m));
    std::array::from_fn(|k| (sv[2 * k] + sv[2 * k + 1]) / T::lit(2.0))
}

pub fn mat3_transpose<T: Real>(a: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn mat3_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]))
    })
}

pub fn mat3_vec<T: Real>(a: &Mat3<T>, v: &[T; 3]) -> [T; 3] {
    std::array::from_fn(|i| (0..3).fold(T::zero(), |acc, k| acc + a[i][k] * v[k]))
}

pub fn norm3<T: Real>(v: &[T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let x = pauli::<f64>(1);
        let y = pauli::<f64>(2);
        let z = pauli::<f64>(3);
        // XY = iZ
        let xy = x * y;
        let iz = z.scale(c(0.0, 1.0));
        assert!((xy - iz).max_abs() < 1e-15);
        for k in 1..=3 {
            let p = pauli::<f64>(k);
            assert!((p * p - CMat2::identity()).max_abs() < 1e-15);
            assert!(p.hermiticity_residual() < 1e-15);
        }
    }

    #[test]
    fn kron_index_convention() {
        // Z on the first slot flips the sign of indices with the high bit set.
        let z = pauli::<f64>(3);
        let i = CMat2::identity();
        let m = kron3(&z, &i, &i);
        for k in 0..8 {
            let expect = if k & 4 != 0 { -1.0 } else { 1.0 };
            assert_eq!(m.0[k][k].re, expect);
        }
    }

    #[test]
    fn jacobi_known_spectrum() {
        let a: [[f64; 3]; 3] = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]];
        let (vals, vecs) = sym_eigen(&a);
        assert!((vals[0] - 3.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((vals[2] + 1.0).abs() < 1e-14);
        // A v = lambda v
        for k in 0..3 {
            let v = [vecs[0][k], vecs[1][k], vecs[2][k]];
            let av = mat3_vec(&a, &v);
            for i in 0..3 {
                assert!((av[i] - vals[k] * v[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn hermitian_sqrt_squares_back() {
        let v = [c(0.5, 0.1), c(-0.2, 0.4), c(0.3, 0.0), c(0.1, -0.6)];
        let w = [c(0.1, 0.0), c(0.7, 0.2), c(-0.3, 0.3), c(0.2, 0.1)];
        let h = CMat4::outer(&v, &v) + CMat4::outer(&w, &w);
        let r = hermitian_sqrt4(&h);
        assert!((r * r - h).max_abs() < 1e-12);
        let ev = hermitian_eigenvalues4(&h);
        let tr: f64 = ev.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-12);
        assert!(ev[2].abs() < 1e-12 && ev[3].abs() < 1e-12);
    }
}
