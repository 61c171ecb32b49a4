//! CHSH between Alice and Bob conditioned on Charlie's projective outcome.
//!
//! Charlie measures `P_c = (I + c n.sigma)/2` on the third slot. For each
//! outcome the normalized post-measurement Alice-Bob state is reduced to its
//! correlation matrix `T^c`, giving the per-outcome optimum
//! `2 sqrt((t1^c)^2 + (t2^c)^2)` and the weighted combination
//! `sum_c p(c) * 2 sqrt(...)`.

use crate::correlations::{chsh_optimum, hilbert_schmidt_decompose, unit_vector, TwoQubitDensity};
use crate::error::{Error, Result};
use crate::linalg::{bloch_operator, pauli, sym_eigenvalues, CMat2, CMat4, Mat3};
use crate::qsym::PureState3;
use crate::scalar::{czero, Real, C};
use rayon::prelude::*;
use serde::Serialize;

/// Probability at or below which a branch is treated as impossible.
pub const OUTCOME_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign<T: Real>(self) -> T {
        match self {
            Outcome::Plus => T::one(),
            Outcome::Minus => -T::one(),
        }
    }

    fn idx(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

/// Charlie's measurement direction `n(theta, phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharlieSetting<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> CharlieSetting<T> {
    /// `theta` in `[0, pi]`, `phi` in `[0, 2pi]`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::PI()) {
            return Err(Error::Domain(format!("theta = {theta} outside [0, pi]")));
        }
        if !(phi >= T::zero() && phi <= T::TAU()) {
            return Err(Error::Domain(format!("phi = {phi} outside [0, 2pi]")));
        }
        Ok(CharlieSetting { theta, phi })
    }

    pub fn direction(&self) -> [T; 3] {
        unit_vector(self.theta, self.phi)
    }

    /// The setting measuring along `-n`.
    pub fn antipodal(&self) -> Self {
        let mut phi = self.phi + T::PI();
        if phi >= T::TAU() {
            phi = phi - T::TAU();
        }
        CharlieSetting { theta: T::PI() - self.theta, phi }
    }
}

/// `(I + c n.sigma)/2`
pub fn projector<T: Real>(c: Outcome, setting: &CharlieSetting<T>) -> CMat2<T> {
    let n = setting.direction();
    let s = c.sign::<T>();
    let half = T::lit(0.5);
    let op = bloch_operator([n[0] * s, n[1] * s, n[2] * s]);
    (CMat2::identity() + op).scale(C::new(half, T::zero()))
}

/// Unnormalized Alice-Bob vector `(I (x) I (x) <e_c|) psi`, where `|e_c>` spans
/// the range of `P_c`. Its squared norm is `p(c)`.
fn conditional_vector<T: Real>(state: &PureState3<T>, c: Outcome, setting: &CharlieSetting<T>) -> [C<T>; 4] {
    let (half_t, phi) = (setting.theta / T::lit(2.0), setting.phi);
    // eigenvector of n.sigma with eigenvalue +1 and -1
    let e: [C<T>; 2] = match c {
        Outcome::Plus => [C::new(half_t.cos(), T::zero()), C::from_polar(half_t.sin(), phi)],
        Outcome::Minus => [C::new(-half_t.sin(), T::zero()), C::from_polar(half_t.cos(), phi)],
    };
    std::array::from_fn(|r| e[0].conj() * state.amp(2 * r) + e[1].conj() * state.amp(2 * r + 1))
}

/// Outcome probability and normalized post-measurement Alice-Bob state.
pub fn condition_on_charlie<T: Real>(
    state: &PureState3<T>,
    c: Outcome,
    setting: &CharlieSetting<T>,
) -> Result<(T, TwoQubitDensity<T>)> {
    let p_op = projector(c, setting);
    let mut rho = CMat4::zeros();
    // Tr_C[(I (x) I (x) P) |psi><psi| (I (x) I (x) P)] = sum_kl P..: use P^2 = P
    for r in 0..4 {
        for s in 0..4 {
            let mut acc = czero();
            for k in 0..2 {
                for l in 0..2 {
                    acc = acc + p_op.0[l][k] * state.amp(2 * r + k) * state.amp(2 * s + l).conj();
                }
            }
            rho.0[r][s] = acc;
        }
    }
    let p: T = rho.trace().re;
    if !(p > T::lit(OUTCOME_EPS)) {
        return Err(Error::OutcomeImpossible { p: p.to_f64_lossy() });
    }
    let rho = rho.scale(C::new(T::one() / p, T::zero()));
    Ok((p, TwoQubitDensity::from_unchecked(rho)))
}

/// `<psi| sigma_i (x) sigma_j (x) P_c |psi>` without division by `p(c)`.
pub fn unnormalized_conditional_t<T: Real>(
    state: &PureState3<T>,
    c: Outcome,
    setting: &CharlieSetting<T>,
) -> Mat3<T> {
    let p = projector(c, setting);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let op = crate::linalg::kron3(&pauli(i + 1), &pauli(j + 1), &p);
            state.inner(&state.apply(&op)).re
        })
    })
}

/// Correlation matrix of the pure two-qubit state `v / |v|`.
fn pure_pair_t<T: Real>(v: &[C<T>; 4], norm_sqr: T) -> Mat3<T> {
    // sigma_k applied to one qubit of a 2-qubit vector; `high` selects slot A
    let apply = |k: usize, high: bool, v: &[C<T>; 4]| -> [C<T>; 4] {
        let mask = if high { 2 } else { 1 };
        std::array::from_fn(|i| {
            let bit = (i & mask) != 0;
            let src = v[i ^ mask];
            match k {
                1 => src,
                // Y|0> = i|1>, Y|1> = -i|0>
                2 => {
                    if bit {
                        src * C::new(T::zero(), T::one())
                    } else {
                        src * C::new(T::zero(), -T::one())
                    }
                }
                _ => {
                    if bit {
                        -v[i]
                    } else {
                        v[i]
                    }
                }
            }
        })
    };
    let inv = T::one() / norm_sqr;
    std::array::from_fn(|i| {
        let ai = apply(i + 1, true, v);
        std::array::from_fn(|j| {
            let bj = apply(j + 1, false, &ai);
            let ip = v.iter().zip(bj.iter()).fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * *b);
            ip.re * inv
        })
    })
}

/// Eigenvalues of a real symmetric 3x3 matrix ordered by decreasing modulus.
pub fn eigen_by_magnitude<T: Real>(t: &Mat3<T>) -> [T; 3] {
    let mut ev = sym_eigenvalues(t);
    ev.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct ConditionalReport<T> {
    pub p_plus: T,
    pub p_minus: T,
    pub T_plus: Mat3<T>,
    pub T_minus: Mat3<T>,
    pub eig_plus: [T; 3],
    pub eig_minus: [T; 3],
    /// Per-outcome optima `[c = +1, c = -1]`; zero for an impossible branch.
    pub chsh_c_opt: [T; 2],
    pub chsh_con_opt: T,
}

fn assemble<T: Real>(branches: [(T, Mat3<T>); 2]) -> ConditionalReport<T> {
    let eps = T::lit(OUTCOME_EPS);
    let mut chsh = [T::zero(); 2];
    let mut eig = [[T::zero(); 3]; 2];
    let mut combined = T::zero();
    for (k, (p, t)) in branches.iter().enumerate() {
        if *p > eps {
            chsh[k] = chsh_optimum(t);
            eig[k] = eigen_by_magnitude(t);
            combined = combined + *p * chsh[k];
        }
    }
    ConditionalReport {
        p_plus: branches[0].0,
        p_minus: branches[1].0,
        T_plus: branches[0].1,
        T_minus: branches[1].1,
        eig_plus: eig[0],
        eig_minus: eig[1],
        chsh_c_opt: chsh,
        chsh_con_opt: combined,
    }
}

/// Conditional CHSH data through the density-matrix route.
pub fn conditional_chsh<T: Real>(state: &PureState3<T>, setting: &CharlieSetting<T>) -> ConditionalReport<T> {
    let branches = Outcome::BOTH.map(|c| match condition_on_charlie(state, c, setting) {
        Ok((p, rho)) => (p, hilbert_schmidt_decompose(&rho).t),
        Err(_) => {
            let p = projected_probability(state, c, setting);
            (p.max(T::zero()), [[T::zero(); 3]; 3])
        }
    });
    assemble(branches)
}

fn projected_probability<T: Real>(state: &PureState3<T>, c: Outcome, setting: &CharlieSetting<T>) -> T {
    conditional_vector(state, c, setting)
        .iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Same report as [`conditional_chsh`], using the fact that the conditional
/// Alice-Bob state of a pure input is pure. Used by the optimizers.
pub fn conditional_chsh_fast<T: Real>(state: &PureState3<T>, setting: &CharlieSetting<T>) -> ConditionalReport<T> {
    let eps = T::lit(OUTCOME_EPS);
    let branches = Outcome::BOTH.map(|c| {
        let v = conditional_vector(state, c, setting);
        let p = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if p > eps {
            (p, pure_pair_t(&v, p))
        } else {
            (p, [[T::zero(); 3]; 3])
        }
    });
    assemble(branches)
}

impl<T: Real> ConditionalReport<T> {
    pub fn branch_chsh(&self, c: Outcome) -> T {
        self.chsh_c_opt[c.idx()]
    }

    pub fn probability(&self, c: Outcome) -> T {
        match c {
            Outcome::Plus => self.p_plus,
            Outcome::Minus => self.p_minus,
        }
    }
}

/// Closed-form conditional data for `canonical_d32(beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct D32Conditional<T> {
    pub mu: T,
    pub p: T,
    /// Eigenvalues `(1, t2, -t2)` of `T^c`.
    pub t: [T; 3],
    /// Closed-form entries of `T^c` (symmetric).
    pub matrix: Mat3<T>,
}

fn check_beta_setting<T: Real>(beta: T, theta: T, phi: T) -> Result<()> {
    if !(beta > T::zero() && beta <= T::PI()) {
        return Err(Error::Domain(format!("beta = {beta} outside (0, pi]")));
    }
    CharlieSetting::new(theta, phi).map(|_| ())
}

/// `6 + 5c cos(theta) + (3 + 4c cos(theta)) cos(beta) + 3c cos(phi) sin(beta) sin(theta)`
pub fn d32_mu<T: Real>(beta: T, theta: T, phi: T, c: Outcome) -> T {
    let s = c.sign::<T>();
    T::lit(6.0)
        + T::lit(5.0) * s * theta.cos()
        + (T::lit(3.0) + T::lit(4.0) * s * theta.cos()) * beta.cos()
        + T::lit(3.0) * s * phi.cos() * beta.sin() * theta.sin()
}

pub fn closed_form_d32<T: Real>(beta: T, theta: T, phi: T, c: Outcome) -> Result<D32Conditional<T>> {
    check_beta_setting(beta, theta, phi)?;
    let mu = d32_mu(beta, theta, phi, c);
    if !(mu > T::lit(1e-12)) {
        return Err(Error::MuDegenerate(mu.to_f64_lossy()));
    }
    let s = c.sign::<T>();
    let (cb, sb) = (beta.cos(), beta.sin());
    let (ct, st) = (theta.cos(), theta.sin());
    let p = mu / (T::lit(6.0) * (T::lit(2.0) + cb));
    let t11 = (T::one() + s * ct) * (T::one() - cb) / mu;
    let t13 = (T::lit(3.0) * (T::one() + s * ct) * sb + s * phi.cos() * st * (T::one() - cb)) / mu;
    let t23 = s * st * phi.sin() * (T::one() - cb) / mu;
    let t33 = T::one() - T::lit(2.0) * t11;
    let z = T::zero();
    Ok(D32Conditional {
        mu,
        p,
        t: [T::one(), t11, -t11],
        matrix: [[t11, z, t13], [z, t11, t23], [t13, t23, t33]],
    })
}

/// Closed-form conditional data for `canonical_d33(1, 0, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct D33Conditional<T> {
    /// Denominator of `t2`; carries the sign of `c`.
    pub nu: T,
    /// The denominator in its originally published arrangement, which agrees
    /// with `nu` only where `sin(beta) sin(theta) cos(phi) = 0`.
    pub nu_published: T,
    pub p: T,
    /// Eigenvalues `(1, t2, -t2)` of `T^c`.
    pub t: [T; 3],
}

pub fn d33_nu<T: Real>(beta: T, theta: T, phi: T, c: Outcome) -> T {
    let s = c.sign::<T>();
    let hb = beta / T::lit(2.0);
    let c3 = hb.cos().powi(3);
    let two = T::lit(2.0);
    phi.cos() * theta.sin() * beta.sin() * (two * hb.sin() + beta.sin())
        + two * hb.sin() * (two * s * (T::one() + c3) + theta.cos() * (T::one() + two * c3 + beta.cos()))
}

pub fn d33_nu_published<T: Real>(beta: T, theta: T, phi: T, c: Outcome) -> T {
    let s = c.sign::<T>();
    let hb = beta / T::lit(2.0);
    let c3 = hb.cos().powi(3);
    let two = T::lit(2.0);
    phi.cos() * theta.sin() * beta.sin() * (T::one() + beta.sin())
        + two * hb.sin() * (two * s * (T::one() + c3) + theta.cos() * (T::one() + two * c3 + beta.cos()))
}

/// Outcome probability for `canonical_d33(1, 0, beta)`.
pub fn d33_probability<T: Real>(beta: T, theta: T, phi: T, c: Outcome) -> T {
    let s = c.sign::<T>();
    let hb = beta / T::lit(2.0);
    let c3 = hb.cos().powi(3);
    let two = T::lit(2.0);
    let num = two + s * theta.cos() * (T::one() + beta.cos())
        + two * c3 * (T::one() + s * theta.cos())
        + s * phi.cos() * theta.sin() * beta.sin() * (T::one() + hb.cos());
    num / (T::lit(4.0) * (T::one() + c3))
}

/// Closed forms on the `y = 1, alpha = 0` slice.
pub fn closed_form_d33<T: Real>(beta: T, theta: T, phi: T, c: Outcome) -> Result<D33Conditional<T>> {
    check_beta_setting(beta, theta, phi)?;
    let nu = d33_nu(beta, theta, phi, c);
    if !(nu.abs() > T::lit(1e-12)) {
        return Err(Error::NuDegenerate(nu.to_f64_lossy()));
    }
    let s = c.sign::<T>();
    let (ct, st) = (theta.cos(), theta.sin());
    let one_m_cb = T::one() - beta.cos();
    let inner = T::one() + s * ct * beta.cos() + s * phi.cos() * st * beta.sin();
    let radicand = T::lit(2.0) * (T::one() + s * ct) * one_m_cb.powi(3) * inner;
    let t2 = (radicand.max(T::zero()).sqrt() / nu).abs();
    Ok(D33Conditional {
        nu,
        nu_published: d33_nu_published(beta, theta, phi, c),
        p: d33_probability(beta, theta, phi, c),
        t: [T::one(), t2, -t2],
    })
}

/// Closed forms for a general `(y, alpha)`; only the `y = 1, alpha = 0`
/// slice is available.
pub fn closed_form_d33_at<T: Real>(
    y: T,
    alpha: T,
    beta: T,
    theta: T,
    phi: T,
    c: Outcome,
) -> Result<D33Conditional<T>> {
    if y != T::one() || alpha != T::zero() {
        return Err(Error::Domain(format!(
            "closed form available only for y = 1, alpha = 0 (got y = {y}, alpha = {alpha})"
        )));
    }
    closed_form_d33(beta, theta, phi, c)
}

/// Grid and refinement schedule for the search over Charlie's direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalGrid {
    /// Points over `[0, pi]`, endpoints included.
    pub theta_steps: usize,
    /// Points over `[0, 2pi]`, endpoints included.
    pub phi_steps: usize,
    pub refine_rounds: usize,
    pub shrink: f64,
}

impl Default for ConditionalGrid {
    fn default() -> Self {
        ConditionalGrid { theta_steps: 181, phi_steps: 91, refine_rounds: 3, shrink: 0.1 }
    }
}

impl ConditionalGrid {
    pub fn coarse(theta_steps: usize, phi_steps: usize) -> Self {
        ConditionalGrid { theta_steps, phi_steps, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizedConditional<T> {
    pub setting: CharlieSetting<T>,
    pub report: ConditionalReport<T>,
}

pub(crate) fn grid_value<T: Real>(steps: usize, span: T, k: usize) -> T {
    span * T::from_usize(k).unwrap() / T::from_usize(steps.max(2) - 1).unwrap()
}

/// Maximizes `chsh_con_opt` over Charlie's direction: full grid, then
/// coordinate refinement from the best grid point. Exact ties resolve to the
/// smallest theta, then the smallest phi.
pub fn optimize_conditional<T: Real>(state: &PureState3<T>, grid: ConditionalGrid) -> OptimizedConditional<T> {
    let nt = grid.theta_steps.max(2);
    let np = grid.phi_steps.max(2);
    let value = |theta: T, phi: T| conditional_chsh_fast(state, &CharlieSetting { theta, phi }).chsh_con_opt;

    let best = (0..nt)
        .into_par_iter()
        .map(|i| {
            let theta = grid_value(nt, T::PI(), i);
            let mut b = (T::neg_infinity(), i, 0usize);
            for j in 0..np {
                let v = value(theta, grid_value(np, T::TAU(), j));
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

    let mut theta = grid_value(nt, T::PI(), best.1);
    let mut phi = grid_value(np, T::TAU(), best.2);
    let mut fx = best.0;
    let mut steps = [T::PI() / T::from_usize(nt - 1).unwrap(), T::TAU() / T::from_usize(np - 1).unwrap()];
    let shrink = T::lit(grid.shrink);
    for _round in 0..=grid.refine_rounds {
        for _ in 0..200 {
            let mut improved = false;
            for k in 0..2 {
                for sign in [-T::one(), T::one()] {
                    let (mut th, mut ph) = (theta, phi);
                    if k == 0 {
                        th = (th + sign * steps[0]).max(T::zero()).min(T::PI());
                    } else {
                        ph = ph + sign * steps[1];
                        if ph < T::zero() {
                            ph = ph + T::TAU();
                        } else if ph >= T::TAU() {
                            ph = ph - T::TAU();
                        }
                    }
                    let f = value(th, ph);
                    if f > fx {
                        theta = th;
                        phi = ph;
                        fx = f;
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
    let setting = CharlieSetting { theta, phi };
    OptimizedConditional { setting, report: conditional_chsh(state, &setting) }
}

/// `max{0, (v - 2)/(2 sqrt2 - 2)}` for a combined conditional CHSH value `v`.
pub fn q_from_value<T: Real>(v: T) -> T {
    let two = T::lit(2.0);
    ((v - two) / (two * T::SQRT_2() - two)).max(T::zero()).min(T::one())
}

/// Nonlocality quantifier from the optimized combined conditional CHSH value.
pub fn quantifier_q<T: Real>(state: &PureState3<T>, grid: ConditionalGrid) -> T {
    q_from_value(optimize_conditional(state, grid).report.chsh_con_opt)
}
