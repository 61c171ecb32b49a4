//! Two-qubit reductions, Hilbert-Schmidt correlation data and the optimal
//! CHSH value `2 sqrt(t1^2 + t2^2)` over the two largest eigenvalues of
//! `T^T T`.

use crate::error::{Error, Result};
use crate::linalg::{
    bloch_operator, hermitian_eigenvalues4, kron2, mat3_mul, mat3_transpose, pauli, sym_eigenvalues,
    CMat2, CMat4, Mat3,
};
use crate::qsym::{bits, d33_domain, Party, PureState3};
use crate::scalar::{creal, Real};
use rayon::prelude::*;
use serde::Serialize;

fn density_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(256.0))
}

/// Two-qubit density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitDensity<T> {
    rho: CMat4<T>,
}

impl<T: Real> TwoQubitDensity<T> {
    pub fn new(rho: CMat4<T>) -> Result<Self> {
        let tol = density_tol::<T>();
        let h = rho.hermiticity_residual();
        if !(h <= tol) {
            return Err(Error::Domain(format!("density matrix not Hermitian ({h:e})")));
        }
        let tr = rho.trace();
        if !((tr.re - T::one()).abs() <= tol && tr.im.abs() <= tol) {
            return Err(Error::Domain(format!("density matrix trace {tr}")));
        }
        let ev = hermitian_eigenvalues4(&rho);
        let floor = -T::lit(1e-10).max(T::epsilon().sqrt());
        if !(ev[3] >= floor) {
            return Err(Error::Domain(format!("density matrix eigenvalue {}", ev[3])));
        }
        Ok(TwoQubitDensity { rho })
    }

    /// `|v><v| / <v|v>`
    pub fn from_pure(v: [crate::Complex<T>; 4]) -> Result<Self> {
        let n = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if !(n > T::zero()) {
            return Err(Error::Domain("zero two-qubit vector".into()));
        }
        let mut m = CMat4::outer(&v, &v);
        m = m.scale(creal(T::one() / n));
        Ok(TwoQubitDensity { rho: m })
    }

    pub(crate) fn from_unchecked(rho: CMat4<T>) -> Self {
        TwoQubitDensity { rho }
    }

    pub fn matrix(&self) -> &CMat4<T> {
        &self.rho
    }

    /// `Tr[rho (A (x) B)]`
    pub fn expectation(&self, a: &CMat2<T>, b: &CMat2<T>) -> T {
        (self.rho * kron2(a, b)).trace().re
    }

    pub fn eigenvalues(&self) -> [T; 4] {
        hermitian_eigenvalues4(&self.rho)
    }
}

/// Partial trace of `|psi><psi|` over one party; the two remaining parties
/// keep their original order.
pub fn reduce_to_pair<T: Real>(state: &PureState3<T>, traced: Party) -> TwoQubitDensity<T> {
    let t = traced.slot();
    let keep: Vec<usize> = (0..3).filter(|&k| k != t).collect();
    let mut rho = CMat4::zeros();
    for i in 0..8 {
        let bi = bits(i);
        for j in 0..8 {
            let bj = bits(j);
            if bi[t] != bj[t] {
                continue;
            }
            let r = 2 * bi[keep[0]] + bi[keep[1]];
            let s = 2 * bj[keep[0]] + bj[keep[1]];
            rho.0[r][s] = rho.0[r][s] + state.amp(i) * state.amp(j).conj();
        }
    }
    TwoQubitDensity::from_unchecked(rho)
}

/// Bloch vectors and correlation matrix of a two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationDecomposition<T> {
    /// `Tr[rho (sigma_i (x) I)]`
    pub s: [T; 3],
    /// `Tr[rho (I (x) sigma_i)]`; equals `s` for symmetric reductions.
    #[serde(skip)]
    pub s_second: [T; 3],
    #[serde(rename = "T")]
    pub t: Mat3<T>,
    /// Set when the two marginals differ by more than 1e-10.
    #[serde(skip)]
    pub asymmetric_marginals: bool,
}

impl<T: Real> CorrelationDecomposition<T> {
    /// Rebuilds `rho` from its Hilbert-Schmidt coefficients.
    pub fn reconstruct(&self) -> CMat4<T> {
        let id = CMat2::<T>::identity();
        let mut m = kron2(&id, &id);
        for i in 0..3 {
            let si = pauli::<T>(i + 1);
            m = m + kron2(&si, &id).scale(creal(self.s[i]));
            m = m + kron2(&id, &si).scale(creal(self.s_second[i]));
            for j in 0..3 {
                m = m + kron2(&si, &pauli::<T>(j + 1)).scale(creal(self.t[i][j]));
            }
        }
        m.scale(creal(T::lit(0.25)))
    }

    pub fn trace_t(&self) -> T {
        self.t[0][0] + self.t[1][1] + self.t[2][2]
    }
}

pub fn hilbert_schmidt_decompose<T: Real>(rho: &TwoQubitDensity<T>) -> CorrelationDecomposition<T> {
    let id = CMat2::<T>::identity();
    let s = std::array::from_fn(|i| rho.expectation(&pauli(i + 1), &id));
    let s_second: [T; 3] = std::array::from_fn(|i| rho.expectation(&id, &pauli(i + 1)));
    let t = std::array::from_fn(|i| std::array::from_fn(|j| rho.expectation(&pauli(i + 1), &pauli(j + 1))));
    let gap = (0..3).fold(T::zero(), |acc, i: usize| acc.max((s[i] - s_second[i]).abs()));
    CorrelationDecomposition {
        s,
        s_second,
        t,
        asymmetric_marginals: gap > T::lit(1e-10),
    }
}

/// `2 sqrt(t1^2 + t2^2)` with `t1^2 >= t2^2` the two largest eigenvalues of
/// `T^T T`.
pub fn chsh_optimum<T: Real>(t: &Mat3<T>) -> T {
    let ev = sym_eigenvalues(&mat3_mul(&mat3_transpose(t), t));
    T::lit(2.0) * (ev[0].max(T::zero()) + ev[1].max(T::zero())).sqrt()
}

fn d32_domain<T: Real>(beta: T) -> Result<()> {
    if beta > T::zero() && beta <= T::PI() {
        Ok(())
    } else {
        Err(Error::Domain(format!("beta = {beta} outside (0, pi]")))
    }
}

/// Closed-form correlation matrix of the reduced pair of `canonical_d32(beta)`.
pub fn d32_t_matrix<T: Real>(beta: T) -> Result<Mat3<T>> {
    d32_domain(beta)?;
    let (cb, sb) = (beta.cos(), beta.sin());
    let d = T::lit(3.0) * (T::lit(2.0) + cb);
    let z = T::zero();
    Ok([
        [(T::one() - cb) / d, z, T::lit(3.0) * sb / d],
        [z, (T::one() - cb) / d, z],
        [T::lit(3.0) * sb / d, z, (T::lit(4.0) + T::lit(5.0) * cb) / d],
    ])
}

/// Closed-form eigenvalues `(t1, t2, t3)` of the reduced-pair correlation
/// matrix of `canonical_d32(beta)`, in the order `|t1| >= |t2| >= |t3|`.
pub fn d32_t_eigenvalues<T: Real>(beta: T) -> Result<(T, T, T)> {
    d32_domain(beta)?;
    let cb = beta.cos();
    let r = T::lit(5.0) + T::lit(4.0) * cb;
    let d6 = T::lit(6.0) * (T::lit(2.0) + cb);
    let t1 = (r + T::lit(3.0) * r.sqrt()) / d6;
    let t2 = (T::one() - cb) / (T::lit(3.0) * (T::lit(2.0) + cb));
    let t3 = (r - T::lit(3.0) * r.sqrt()) / d6;
    Ok((t1, t2, t3))
}

/// Two largest correlation eigenvalues of `canonical_d33(y, pi, pi/2)`.
pub fn d33_t12_half_pi_alpha_pi<T: Real>(y: T) -> Result<(T, T)> {
    d33_domain(y, T::PI(), T::FRAC_PI_2())?;
    let s2 = T::SQRT_2();
    let y2 = y * y;
    let t1 = (T::one() - s2 * y + y2 + (T::one() + y2 * y2).sqrt()) / (T::lit(2.0) - s2 * y + T::lit(2.0) * y2);
    let t2 = y / (s2 * (T::one() + y2) - y);
    Ok((t1, t2))
}

/// Two largest correlation eigenvalues of `canonical_d33(y, 0, pi/3)`.
pub fn d33_t12_third_pi_alpha_zero<T: Real>(y: T) -> Result<(T, T)> {
    d33_domain(y, T::zero(), T::FRAC_PI_3())?;
    let s3 = T::lit(3.0).sqrt();
    let y2 = y * y;
    let base = T::one() + s3 * y + y2;
    let root = (T::one() + s3 * y + T::lit(2.0) * y2 + s3 * y2 * y + y2 * y2).sqrt();
    let d = T::lit(4.0) + T::lit(3.0) * s3 * y + T::lit(4.0) * y2;
    let two = T::lit(2.0);
    Ok((two * (base + root) / d, two * (base - root) / d))
}

/// Resolution of the brute-force CHSH search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectGrid {
    pub theta_steps: usize,
    pub phi_steps: usize,
    pub refine_rounds: usize,
    pub shrink: f64,
}

impl Default for DirectGrid {
    fn default() -> Self {
        DirectGrid { theta_steps: 24, phi_steps: 48, refine_rounds: 3, shrink: 0.1 }
    }
}

pub(crate) fn unit_vector<T: Real>(theta: T, phi: T) -> [T; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Maximizes `|<A1 B1> + <A1 B2> + <A2 B1> - <A2 B2>|` over unit Bloch
/// directions by explicit search.
///
/// Bob's two directions are searched on a `(theta, phi)` grid and then
/// refined coordinate-wise; for fixed Bob settings Alice's best directions
/// follow from `max_a a.w = |w|` with `w_i = <sigma_i (x) b.sigma>`, so
/// every correlator is an explicit trace against `rho`. The returned value
/// is attained by concrete settings and therefore never exceeds the true
/// optimum.
pub fn chsh_optimize_direct<T: Real>(rho: &TwoQubitDensity<T>, grid: DirectGrid) -> T {
    let corr = |b: [T; 3]| -> [T; 3] {
        let bop = bloch_operator(b);
        std::array::from_fn(|i| rho.expectation(&pauli(i + 1), &bop))
    };
    let value = |w1: &[T; 3], w2: &[T; 3]| -> T {
        let plus = [w1[0] + w2[0], w1[1] + w2[1], w1[2] + w2[2]];
        let minus = [w1[0] - w2[0], w1[1] - w2[1], w1[2] - w2[2]];
        crate::linalg::norm3(&plus) + crate::linalg::norm3(&minus)
    };

    let nt = grid.theta_steps.max(2);
    let np = grid.phi_steps.max(1);
    let dtheta = T::PI() / T::from_usize(nt - 1).unwrap();
    let dphi = T::TAU() / T::from_usize(np).unwrap();
    let points: Vec<(T, T)> = (0..nt)
        .flat_map(|i| (0..np).map(move |j| (i, j)))
        .map(|(i, j)| (dtheta * T::from_usize(i).unwrap(), dphi * T::from_usize(j).unwrap()))
        .collect();
    let ws: Vec<[T; 3]> = points.iter().map(|&(t, p)| corr(unit_vector(t, p))).collect();

    // (value, i, j) with ties resolved toward the smallest index pair
    let best = (0..ws.len())
        .into_par_iter()
        .map(|i| {
            let mut b = (T::neg_infinity(), i, 0usize);
            for j in 0..ws.len() {
                let v = value(&ws[i], &ws[j]);
                if v > b.0 {
                    b = (v, i, j);
                }
            }
            b
        })
        .reduce(
            || (T::neg_infinity(), usize::MAX, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );

    let mut x = [points[best.1].0, points[best.1].1, points[best.2].0, points[best.2].1];
    let eval = |x: &[T; 4]| value(&corr(unit_vector(x[0], x[1])), &corr(unit_vector(x[2], x[3])));
    let mut fx = best.0;
    let shrink = T::lit(grid.shrink);
    let mut steps = [dtheta, dphi, dtheta, dphi];
    for _round in 0..=grid.refine_rounds {
        for _ in 0..200 {
            let mut improved = false;
            for k in 0..4 {
                for sign in [T::one(), -T::one()] {
                    let mut y = x;
                    y[k] = y[k] + sign * steps[k];
                    let fy = eval(&y);
                    if fy > fx {
                        x = y;
                        fx = fy;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        for s in steps.iter_mut() {
            *s = *s * shrink;
        }
    }
    fx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsym::{canonical_d32, canonical_d33};
    use crate::scalar::c;

    fn approx_mat(a: &CMat4<f64>, b: &CMat4<f64>, tol: f64) {
        assert!((*a - *b).max_abs() < tol, "{a:?} vs {b:?}");
    }

    fn proj(v: [crate::Complex<f64>; 4]) -> CMat4<f64> {
        *TwoQubitDensity::from_pure(v).unwrap().matrix()
    }

    #[test]
    fn product_state_reduction() {
        let r = reduce_to_pair(&PureState3::<f64>::basis(0), Party::C);
        let mut e = CMat4::zeros();
        e.0[0][0] = c(1.0, 0.0);
        approx_mat(r.matrix(), &e, 1e-15);
        let d = hilbert_schmidt_decompose(&r);
        assert_eq!(d.s, [0.0, 0.0, 1.0]);
        assert_eq!(d.t, [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn ghz_reduction() {
        let r = reduce_to_pair(&PureState3::<f64>::ghz(), Party::C);
        let mut e = CMat4::zeros();
        e.0[0][0] = c(0.5, 0.0);
        e.0[3][3] = c(0.5, 0.0);
        approx_mat(r.matrix(), &e, 1e-15);
        let d = hilbert_schmidt_decompose(&r);
        assert!(d.s.iter().all(|x| x.abs() < 1e-15));
        assert!((d.t[2][2] - 1.0).abs() < 1e-15 && d.t[0][0].abs() < 1e-15);
        assert!((chsh_optimum(&d.t) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn w_reduction_and_eq_t_matrix() {
        let w = PureState3::<f64>::w();
        let r = reduce_to_pair(&w, Party::C);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let zero = proj([c(1.0, 0.0), z, z, z]);
        let psi_plus = proj([z, c(h, 0.0), c(h, 0.0), z]);
        let expect = zero.scale(c(1.0 / 3.0, 0.0)) + psi_plus.scale(c(2.0 / 3.0, 0.0));
        approx_mat(r.matrix(), &expect, 1e-15);
        let d = hilbert_schmidt_decompose(&r);
        assert!((d.s[2] - 1.0 / 3.0).abs() < 1e-15);
        let cf = d32_t_matrix(std::f64::consts::PI).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((d.t[i][j] - cf[i][j]).abs() < 1e-14);
            }
        }
        let v = chsh_optimum(&d.t);
        assert!((v - 4.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reductions_agree_for_symmetric_states() {
        let s = canonical_d33(0.6_f64, 2.0, 1.1).unwrap();
        let a = reduce_to_pair(&s, Party::A);
        let b = reduce_to_pair(&s, Party::B);
        let cc = reduce_to_pair(&s, Party::C);
        approx_mat(a.matrix(), cc.matrix(), 1e-12);
        approx_mat(b.matrix(), cc.matrix(), 1e-12);
        let d = hilbert_schmidt_decompose(&cc);
        assert!(!d.asymmetric_marginals);
        assert!((d.trace_t() - 1.0).abs() < 1e-10);
        approx_mat(&d.reconstruct(), cc.matrix(), 1e-12);
    }

    #[test]
    fn asymmetric_marginals_flagged() {
        // |0>|+>
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let r = TwoQubitDensity::from_pure([c(h, 0.0), c(h, 0.0), z, z]).unwrap();
        let d = hilbert_schmidt_decompose(&r);
        assert!(d.asymmetric_marginals);
        approx_mat(&d.reconstruct(), r.matrix(), 1e-14);
    }

    #[test]
    fn chsh_optimum_examples() {
        let phi_plus = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!((chsh_optimum(&phi_plus) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let z: [[f64; 3]; 3] = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        assert!((chsh_optimum(&z) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalue_examples() {
        let (t1, t2, t3) = d32_t_eigenvalues(std::f64::consts::PI).unwrap();
        assert!((t1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((t2 - 2.0 / 3.0).abs() < 1e-15);
        assert!((t3 + 1.0 / 3.0).abs() < 1e-15);
        let (t1, t2, t3) = d32_t_eigenvalues(1e-9_f64).unwrap();
        assert!((t1 - 1.0).abs() < 1e-9 && t2.abs() < 1e-9 && t3.abs() < 1e-9);
        let (t1, t2, t3) = d32_t_eigenvalues(std::f64::consts::FRAC_PI_2).unwrap();
        let r5 = 5f64.sqrt();
        assert!((t1 - (5.0 + 3.0 * r5) / 12.0).abs() < 1e-15);
        assert!((t2 - 1.0 / 6.0).abs() < 1e-15);
        assert!((t3 - (5.0 - 3.0 * r5) / 12.0).abs() < 1e-15);
        assert!(d32_t_eigenvalues(0.0_f64).is_err());
        assert!(d32_t_eigenvalues(4.0_f64).is_err());
    }

    #[test]
    fn closed_form_eigenvalues_match_numerics() {
        for k in 1..=50 {
            let beta = std::f64::consts::PI * k as f64 / 50.0;
            let d = hilbert_schmidt_decompose(&reduce_to_pair(&canonical_d32(beta).unwrap(), Party::C));
            let ev = sym_eigenvalues(&d.t);
            let (t1, t2, t3) = d32_t_eigenvalues(beta).unwrap();
            let mut cf = [t1, t2, t3];
            cf.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for i in 0..3 {
                assert!((ev[i] - cf[i]).abs() < 1e-10);
            }
            assert!(t1.abs() >= t2.abs() - 1e-15 && t2.abs() >= t3.abs() - 1e-15);
        }
    }

    #[test]
    fn direct_search_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let bell = TwoQubitDensity::from_pure([c(h, 0.0), z, z, c(h, 0.0)]).unwrap();
        let v = chsh_optimize_direct(&bell, DirectGrid::default());
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-3);
        assert!(v <= 2.0 * 2f64.sqrt() + 1e-9);
        let prod = TwoQubitDensity::from_pure([c(1.0, 0.0), z, z, z]).unwrap();
        let v = chsh_optimize_direct(&prod, DirectGrid::default());
        assert!((v - 2.0).abs() < 1e-3);
    }

    #[test]
    fn density_validation() {
        let mut m = CMat4::<f64>::identity();
        assert!(TwoQubitDensity::new(m).is_err());
        m = m.scale(c(0.25, 0.0));
        assert!(TwoQubitDensity::new(m).is_ok());
        m.0[0][1] = c(0.1, 0.0);
        assert!(TwoQubitDensity::new(m).is_err());
    }
}
