//! Local-unitary invariants: three-tangle and pairwise concurrence.

use crate::correlations::{reduce_to_pair, TwoQubitDensity};
use crate::error::{Error, Result};
use crate::linalg::{complex_singular_values4, hermitian_sqrt4_with_floor, kron2, pauli};
use crate::qsym::{d33_domain, d33_norm_denominator, Party, PureState3};
use crate::scalar::Real;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantSet<T> {
    pub tau: T,
    pub concurrence: T,
}

fn clamp01<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

impl<T: Real> InvariantSet<T> {
    /// Hyperdeterminant tangle and the Wootters concurrence of the
    /// Alice-Bob reduction.
    pub fn of_state(state: &PureState3<T>) -> Self {
        InvariantSet {
            tau: clamp01(three_tangle(state)),
            concurrence: clamp01(wootters_concurrence(&reduce_to_pair(state, Party::C))),
        }
    }
}

/// `2y sin^3(beta/2) / (1 + y^2 + 2y cos^3(beta/2) cos(alpha))`
///
/// This ratio is the square root of the three-tangle; see
/// [`tangle_closed_d33`].
pub fn tangle_amplitude_closed_d33<T: Real>(y: T, alpha: T, beta: T) -> Result<T> {
    d33_domain(y, alpha, beta)?;
    let s = (beta / T::lit(2.0)).sin();
    Ok(T::lit(2.0) * y * s * s * s / d33_norm_denominator(y, alpha, beta))
}

/// Three-tangle of `canonical_d33(y, alpha, beta)`.
pub fn tangle_closed_d33<T: Real>(y: T, alpha: T, beta: T) -> Result<T> {
    let r = tangle_amplitude_closed_d33(y, alpha, beta)?;
    Ok(r * r)
}

/// Pairwise concurrence of `canonical_d33(y, alpha, beta)`.
pub fn concurrence_closed_d33<T: Real>(y: T, alpha: T, beta: T) -> Result<T> {
    d33_domain(y, alpha, beta)?;
    Ok(y * beta.sin() * (beta / T::lit(2.0)).sin() / d33_norm_denominator(y, alpha, beta))
}

/// Pairwise concurrence of `canonical_d32(beta)`.
pub fn concurrence_closed_d32<T: Real>(beta: T) -> Result<T> {
    if !(beta > T::zero() && beta <= T::PI()) {
        return Err(Error::Domain(format!("beta = {beta} outside (0, pi]")));
    }
    let c2 = (beta / T::lit(2.0)).cos().powi(2);
    Ok((T::lit(2.0) - T::lit(2.0) * c2) / (T::lit(3.0) + T::lit(6.0) * c2))
}

/// Eigenvalues of `rho` at or below this are treated as exact zeros.
const RANK_EPS: f64 = 1e-14;

/// `max(0, l1 - l2 - l3 - l4)` with `l_i` the decreasing eigenvalues of
/// `sqrt(sqrt(rho) rho~ sqrt(rho))`.
///
/// With `rho~ = Y rho* Y` (`Y = sigma2 (x) sigma2`) the matrix under the outer
/// root is `M M^dagger` for `M = sqrt(rho) Y sqrt(rho)*`, so the `l_i` are the
/// singular values of `M`; these are computed directly, which keeps vanishing
/// `l_i` at round-off level instead of its square root.
pub fn wootters_concurrence<T: Real>(rho: &TwoQubitDensity<T>) -> T {
    let m = *rho.matrix();
    let yy = kron2(&pauli::<T>(2), &pauli::<T>(2));
    let root = hermitian_sqrt4_with_floor(&m, T::lit(RANK_EPS));
    let l = complex_singular_values4(&(root * yy * root.conj()));
    (l[0] - l[1] - l[2] - l[3]).max(T::zero())
}

/// `4 |d1 - 2 d2 + 4 d3|` over the computational-basis amplitudes.
pub fn three_tangle<T: Real>(state: &PureState3<T>) -> T {
    let a = |i: usize| state.amp(i);
    let sq = |i: usize, j: usize| a(i) * a(i) * a(j) * a(j);
    let d1 = sq(0, 7) + sq(1, 6) + sq(2, 5) + sq(4, 3);
    let d2 = a(0) * a(7) * a(3) * a(4)
        + a(0) * a(7) * a(5) * a(2)
        + a(0) * a(7) * a(6) * a(1)
        + a(3) * a(4) * a(5) * a(2)
        + a(3) * a(4) * a(6) * a(1)
        + a(5) * a(2) * a(6) * a(1);
    let d3 = a(0) * a(6) * a(5) * a(3) + a(7) * a(1) * a(2) * a(4);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    (d1 - d2 * two + d3 * four).norm() * four
}
