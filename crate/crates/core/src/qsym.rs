//! Pure permutation-symmetric three-qubit states in the Majorana picture.
//!
//! Basis convention used everywhere: `|q_A q_B q_C>` has index
//! `4 q_A + 2 q_B + q_C`, so party C (Charlie) is the least significant bit.

use crate::error::{Error, Result};
use crate::linalg::{CMat2, CMat8};
use crate::scalar::{c, cone, creal, czero, Real, C};
use serde::de::Deserializer;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// The six orderings of three slots.
pub(crate) const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[inline]
pub(crate) fn bits(idx: usize) -> [usize; 3] {
    [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1]
}

#[inline]
pub(crate) fn index(b: [usize; 3]) -> usize {
    (b[0] << 2) | (b[1] << 1) | b[2]
}

/// Single-qubit pure state `a0|0> + a1|1>`, unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor<T> {
    a0: C<T>,
    a1: C<T>,
}

impl<T: Real> Spinor<T> {
    /// Normalizes the given amplitudes.
    pub fn new(a0: C<T>, a1: C<T>) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Domain("spinor with zero or non-finite norm".into()));
        }
        Ok(Spinor { a0: a0 / n, a1: a1 / n })
    }

    /// `cos(beta/2)|0> + e^{i alpha} sin(beta/2)|1>`
    pub fn from_angles(alpha: T, beta: T) -> Self {
        let half = beta / T::lit(2.0);
        Spinor {
            a0: creal(half.cos()),
            a1: C::from_polar(half.sin(), alpha),
        }
    }

    /// Spinor `|0> + z|1>` (normalized), the state whose stereographic
    /// coordinate is `z`.
    pub fn from_stereographic(z: C<T>) -> Self {
        Self::new(cone(), z).expect("finite stereographic coordinate")
    }

    pub fn zero() -> Self {
        Spinor { a0: cone(), a1: czero() }
    }

    pub fn one() -> Self {
        Spinor { a0: czero(), a1: cone() }
    }

    /// `(|0> + |1>)/sqrt 2`
    pub fn plus() -> Self {
        Self::from_angles(T::zero(), T::FRAC_PI_2())
    }

    pub fn a0(&self) -> C<T> {
        self.a0
    }

    pub fn a1(&self) -> C<T> {
        self.a1
    }

    pub fn amplitudes(&self) -> [C<T>; 2] {
        [self.a0, self.a1]
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> C<T> {
        self.a0.conj() * other.a0 + self.a1.conj() * other.a1
    }

    /// Fubini-Study angle `arccos |<a|b>|`, evaluated stably near zero.
    pub fn fs_distance(&self, other: &Self) -> T {
        let wedge = (self.a0 * other.a1 - self.a1 * other.a0).norm();
        wedge.atan2(self.inner(other).norm())
    }

    pub fn bloch_vector(&self) -> [T; 3] {
        let cross = self.a0.conj() * self.a1;
        let two = T::lit(2.0);
        [
            two * cross.re,
            two * cross.im,
            self.a0.norm_sqr() - self.a1.norm_sqr(),
        ]
    }

    pub fn apply(&self, u: &CMat2<T>) -> Self {
        let v = u.apply(&[self.a0, self.a1]);
        Spinor { a0: v[0], a1: v[1] }
    }

    /// Copy with the global phase fixed so that `other`-overlap is real and
    /// non-negative; used to compare with published spinors.
    pub fn phase_aligned_to(&self, other: &Self) -> Self {
        let ov = other.inner(self);
        let n = ov.norm();
        if n == T::zero() {
            return *self;
        }
        let ph = ov.conj() / n;
        Spinor { a0: self.a0 * ph, a1: self.a1 * ph }
    }
}

/// Pure three-qubit state, eight amplitudes, unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState3<T> {
    amp: [C<T>; 8],
}

impl<T: Real> PureState3<T> {
    /// Normalizes the given amplitudes.
    pub fn new(amp: [C<T>; 8]) -> Result<Self> {
        let n = amp.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Domain("state with zero or non-finite norm".into()));
        }
        Ok(PureState3 { amp: amp.map(|z| z / n) })
    }

    pub fn from_real(amp: [T; 8]) -> Result<Self> {
        Self::new(amp.map(creal))
    }

    pub fn basis(idx: usize) -> Self {
        let mut amp = [czero(); 8];
        amp[idx] = cone();
        PureState3 { amp }
    }

    pub fn product(a: &Spinor<T>, b: &Spinor<T>, cc: &Spinor<T>) -> Self {
        let s = [a, b, cc];
        let amp = std::array::from_fn(|i| {
            let q = bits(i);
            s[0].amplitudes()[q[0]] * s[1].amplitudes()[q[1]] * s[2].amplitudes()[q[2]]
        });
        PureState3 { amp }
    }

    /// `(|000> + |111>)/sqrt 2`
    pub fn ghz() -> Self {
        let h = T::FRAC_1_SQRT_2();
        let mut amp = [czero(); 8];
        amp[0] = creal(h);
        amp[7] = creal(h);
        PureState3 { amp }
    }

    /// `(|001> + |010> + |100>)/sqrt 3`
    pub fn w() -> Self {
        Self::weight_class(1)
    }

    /// `(|110> + |101> + |011>)/sqrt 3`
    pub fn w_bar() -> Self {
        Self::weight_class(2)
    }

    fn weight_class(weight: u32) -> Self {
        let amp = std::array::from_fn(|i| {
            if (i as u32).count_ones() == weight {
                cone()
            } else {
                czero()
            }
        });
        Self::new(amp).expect("nonzero")
    }

    /// `a|000> + b|111> + c (|001> + |010> + |100>)`, renormalized.
    pub fn ghz_w_form(a: T, b: T, cw: T) -> Result<Self> {
        let mut amp = [T::zero(); 8];
        amp[0] = a;
        amp[7] = b;
        amp[1] = cw;
        amp[2] = cw;
        amp[4] = cw;
        Self::from_real(amp)
    }

    pub fn amplitudes(&self) -> &[C<T>; 8] {
        &self.amp
    }

    pub fn amp(&self, idx: usize) -> C<T> {
        self.amp[idx]
    }

    pub fn norm_sqr(&self) -> T {
        self.amp.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> C<T> {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    /// Largest `|a_i - b_i|` after removing the best global sign; for
    /// comparing against tables that publish signed real amplitudes.
    pub fn max_amplitude_diff_up_to_sign(&self, other: &Self) -> T {
        let mut best = T::infinity();
        for s in [T::one(), -T::one()] {
            let d = self
                .amp
                .iter()
                .zip(other.amp.iter())
                .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b * s).norm()));
            best = best.min(d);
        }
        best
    }

    pub fn apply(&self, op: &CMat8<T>) -> Self {
        PureState3 { amp: op.apply(&self.amp) }
    }

    /// Amplitudes with the qubit slots reordered: slot `k` of the result
    /// carries slot `perm[k]` of `self`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut amp = [czero(); 8];
        for (i, a) in amp.iter_mut().enumerate() {
            let q = bits(i);
            let mut src = [0; 3];
            for k in 0..3 {
                src[perm[k]] = q[k];
            }
            *a = self.amp[index(src)];
        }
        PureState3 { amp }
    }
}

impl<T: Real + Serialize> Serialize for PureState3<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(8))?;
        for z in &self.amp {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for PureState3<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<[T; 2]> = Vec::deserialize(d)?;
        if raw.len() != 8 {
            return Err(serde::de::Error::invalid_length(raw.len(), &"8 [re, im] pairs"));
        }
        let amp = std::array::from_fn(|i| c(raw[i][0], raw[i][1]));
        PureState3::new(amp).map_err(serde::de::Error::custom)
    }
}

impl<T: Real + Serialize> Serialize for Spinor<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [[self.a0.re, self.a0.im], [self.a1.re, self.a1.im]].serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SloccClass {
    Separable,
    /// D(3,2): two distinct Majorana spinors.
    TwoDistinct,
    /// D(3,3): three distinct Majorana spinors.
    ThreeDistinct,
    NotSymmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub fn slot(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 1,
            Party::C => 2,
        }
    }

    fn label(self) -> char {
        match self {
            Party::A => 'A',
            Party::B => 'B',
            Party::C => 'C',
        }
    }
}

/// `U_A (x) U_B (x) U_C`, each factor unitary within 1e-10.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalUnitaryTriple<T> {
    factors: [CMat2<T>; 3],
}

impl<T: Real> LocalUnitaryTriple<T> {
    pub fn new(ua: CMat2<T>, ub: CMat2<T>, uc: CMat2<T>) -> Result<Self> {
        let factors = [ua, ub, uc];
        for (u, p) in factors.iter().zip([Party::A, Party::B, Party::C]) {
            let residual = u.unitarity_residual();
            if !(residual <= T::lit(1e-10)) {
                return Err(Error::NonUnitary {
                    party: p.label(),
                    residual: residual.to_f64_lossy(),
                });
            }
        }
        Ok(LocalUnitaryTriple { factors })
    }

    pub fn identity() -> Self {
        LocalUnitaryTriple { factors: [CMat2::identity(); 3] }
    }

    pub fn factor(&self, p: Party) -> &CMat2<T> {
        &self.factors[p.slot()]
    }

    pub fn to_operator(&self) -> CMat8<T> {
        crate::linalg::kron3(&self.factors[0], &self.factors[1], &self.factors[2])
    }
}

/// `sum_P P{s1 (x) s2 (x) s3}` over all 3! slot orderings, unnormalized.
pub fn unnormalized_symmetrization<T: Real>(spinors: &[Spinor<T>; 3]) -> [C<T>; 8] {
    let mut amp = [czero(); 8];
    for perm in PERMUTATIONS {
        for (i, a) in amp.iter_mut().enumerate() {
            let q = bits(i);
            *a = *a
                + spinors[perm[0]].amplitudes()[q[0]]
                    * spinors[perm[1]].amplitudes()[q[1]]
                    * spinors[perm[2]].amplitudes()[q[2]];
        }
    }
    amp
}

/// Normalized symmetrization of three spinors.
pub fn symmetrize<T: Real>(spinors: &[Spinor<T>; 3]) -> Result<PureState3<T>> {
    let amp = unnormalized_symmetrization(spinors);
    let n2 = amp.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    if !(n2 > T::epsilon() * T::epsilon()) {
        return Err(Error::DegenerateSymmetrization);
    }
    PureState3::new(amp)
}

/// `cos(beta/2)|0> + sin(beta/2)|1>`
pub fn beta_spinor<T: Real>(beta: T) -> Spinor<T> {
    Spinor::from_angles(T::zero(), beta)
}

/// Two-distinct-spinor canonical state: symmetrization of `{|0>, |0>, |beta>}`.
pub fn canonical_d32<T: Real>(beta: T) -> Result<PureState3<T>> {
    if beta == T::zero() {
        return Err(Error::ProductState);
    }
    if !(beta > T::zero() && beta <= T::PI()) {
        return Err(Error::Domain(format!("beta = {beta} outside (0, pi]")));
    }
    symmetrize(&[Spinor::zero(), Spinor::zero(), beta_spinor(beta)])
}

/// `1 + y^2 + 2 y cos(alpha) cos^3(beta/2)`, the inverse squared
/// normalization of [`canonical_d33`].
pub fn d33_norm_denominator<T: Real>(y: T, alpha: T, beta: T) -> T {
    let ch = (beta / T::lit(2.0)).cos();
    T::one() + y * y + T::lit(2.0) * y * alpha.cos() * ch * ch * ch
}

fn check_d33_domain<T: Real>(y: T, alpha: T, beta: T) -> Result<()> {
    if !(y > T::zero() && y <= T::one()) {
        return Err(Error::Domain(format!("y = {y} outside (0, 1]")));
    }
    if !(alpha >= T::zero() && alpha <= T::TAU()) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, 2pi]")));
    }
    if !(beta > T::zero() && beta <= T::PI()) {
        return Err(Error::Domain(format!("beta = {beta} outside (0, pi]")));
    }
    Ok(())
}

pub(crate) fn d33_domain<T: Real>(y: T, alpha: T, beta: T) -> Result<()> {
    check_d33_domain(y, alpha, beta)
}

/// Three-distinct-spinor canonical state `N(|000> + y e^{i alpha} |beta>^3)`.
pub fn canonical_d33<T: Real>(y: T, alpha: T, beta: T) -> Result<PureState3<T>> {
    check_d33_domain(y, alpha, beta)?;
    let b = beta_spinor(beta);
    let cube = PureState3::product(&b, &b, &b);
    let w = C::from_polar(y, alpha);
    let mut amp = cube.amp.map(|z| z * w);
    amp[0] = amp[0] + cone();
    let n2 = d33_norm_denominator(y, alpha, beta);
    let n = n2.sqrt();
    Ok(PureState3 { amp: amp.map(|z| z / n) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryCheck<T> {
    pub symmetric: bool,
    pub residual: T,
}

/// Max over the six slot permutations of `|| P psi - psi ||`.
pub fn is_permutation_symmetric<T: Real>(state: &PureState3<T>, tol: T) -> SymmetryCheck<T> {
    let residual = PERMUTATIONS.iter().fold(T::zero(), |acc, &perm| {
        let p = state.permuted(perm);
        let d = p
            .amp
            .iter()
            .zip(state.amp.iter())
            .fold(T::zero(), |s, (a, b)| s + (*a - *b).norm_sqr())
            .sqrt();
        acc.max(d)
    });
    SymmetryCheck { symmetric: residual <= tol, residual }
}

pub fn apply_local_unitary<T: Real>(state: &PureState3<T>, u: &LocalUnitaryTriple<T>) -> PureState3<T> {
    state.apply(&u.to_operator())
}

/// Homogeneous Majorana polynomial coefficients `[c3, c2, c1, c0]` of
/// `c3 z^3 + c2 z^2 + c1 z + c0`, whose roots `z` are the stereographic
/// coordinates of the constituent spinors `|0> + z|1>`.
///
/// For `a|000> + b|111> + sqrt3 c|W>` this is `-a z^3 + 3c z^2 + b`.
pub fn majorana_polynomial<T: Real>(state: &PureState3<T>) -> [C<T>; 4] {
    let third = T::one() / T::lit(3.0);
    let three = creal(T::lit(3.0));
    let w1 = (state.amp[1] + state.amp[2] + state.amp[4]) * third;
    let w2 = (state.amp[3] + state.amp[5] + state.amp[6]) * third;
    [-state.amp[0], three * w1, -(three * w2), state.amp[7]]
}

/// Roots of `coeffs[0] x^n + ... + coeffs[n]` (leading coefficient nonzero)
/// by Aberth-Ehrlich simultaneous iteration.
pub(crate) fn poly_roots<T: Real>(coeffs: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    if lead == czero() {
        return Err(Error::NumericalRootFailure);
    }
    if n == 1 {
        return Ok(vec![-coeffs[1] / lead]);
    }
    let monic: Vec<C<T>> = coeffs.iter().map(|z| *z / lead).collect();
    let eval = |z: C<T>| -> (C<T>, C<T>, T) {
        let mut p = czero();
        let mut dp = czero();
        let mut bound = T::zero();
        let az = z.norm();
        for cf in &monic {
            dp = dp * z + p;
            p = p * z + *cf;
            bound = bound * az + cf.norm();
        }
        (p, dp, bound)
    };

    // Fujiwara-type radius and centroid for the starting circle
    let mut radius = T::zero();
    for (k, cf) in monic.iter().enumerate().skip(1) {
        let r = cf.norm().powf(T::one() / T::from_usize(k).unwrap());
        radius = radius.max(r);
    }
    let radius = radius.max(T::lit(1e-3));
    let center = -monic[1] / T::from_usize(n).unwrap();
    let mut z: Vec<C<T>> = (0..n)
        .map(|k| {
            let ang = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(n).unwrap() + T::lit(0.4);
            center + C::from_polar(radius, ang)
        })
        .collect();

    let tiny = T::epsilon() * T::lit(16.0);
    for _ in 0..500 {
        let mut done = true;
        for k in 0..n {
            let (p, dp, bound) = eval(z[k]);
            if p.norm() <= tiny * bound {
                continue;
            }
            done = false;
            let ratio = if dp == czero() { cone() } else { p / dp };
            let mut sum = czero();
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d != czero() {
                        sum = sum + cone::<T>() / d;
                    }
                }
            }
            let denom = cone::<T>() - ratio * sum;
            let step = if denom == czero() { ratio } else { ratio / denom };
            z[k] = z[k] - step;
        }
        if done {
            return Ok(z);
        }
    }
    // accept a stagnated iteration whose backward error is still small
    let loose = T::epsilon().sqrt();
    if z.iter().all(|&r| {
        let (p, _, bound) = eval(r);
        p.norm() <= loose * bound && r.re.is_finite() && r.im.is_finite()
    }) {
        Ok(z)
    } else {
        Err(Error::NumericalRootFailure)
    }
}

/// Relative size below which a Majorana coefficient is treated as zero.
fn coefficient_cutoff<T: Real>() -> T {
    T::epsilon() * T::lit(1e4)
}

/// Decomposes a symmetric state into its three Majorana spinors.
///
/// Each missing degree of the polynomial in `z` contributes a root at
/// infinity, the spinor `|1>`. When the constant term dominates the leading
/// one, the reversed polynomial in `1/z` is solved instead so that large
/// roots stay well-conditioned.
pub fn majorana_roots<T: Real>(state: &PureState3<T>, tol: T) -> Result<[Spinor<T>; 3]> {
    let check = is_permutation_symmetric(state, tol);
    if !check.symmetric {
        return Err(Error::NotSymmetric { residual: check.residual.to_f64_lossy() });
    }
    let coeffs = majorana_polynomial(state);
    let scale = coeffs.iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
    let cut = coefficient_cutoff::<T>() * scale;
    let reversed = coeffs[3].norm() > coeffs[0].norm();
    // `work` is ordered from leading to constant in the solved variable
    let mut work: Vec<C<T>> = coeffs.to_vec();
    if reversed {
        work.reverse();
    }
    let (far, near) = if reversed {
        (Spinor::zero(), Spinor::one())
    } else {
        (Spinor::one(), Spinor::zero())
    };
    let mut spinors = Vec::with_capacity(3);
    while work.len() > 1 && work[0].norm() <= cut {
        work.remove(0);
        spinors.push(far);
    }
    while work.len() > 1 && work[work.len() - 1].norm() <= cut {
        work.pop();
        spinors.push(near);
    }
    for r in poly_roots(&work)? {
        let s = if reversed {
            Spinor::new(r, cone())?
        } else {
            Spinor::new(cone(), r)?
        };
        spinors.push(s);
    }
    if spinors.len() != 3 {
        return Err(Error::NumericalRootFailure);
    }
    Ok([spinors[0], spinors[1], spinors[2]])
}

/// Number of distinct spinors among three, clustering pairs closer than
/// `tol` in Fubini-Study distance (transitively).
pub fn distinct_spinor_count<T: Real>(s: &[Spinor<T>; 3], tol: T) -> usize {
    let mut parent = [0usize, 1, 2];
    fn find(p: &mut [usize; 3], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            if s[i].fs_distance(&s[j]) <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    (0..3).filter(|&i| find(&mut parent, i) == i).count()
}

pub fn slocc_class<T: Real>(state: &PureState3<T>, tol: T) -> Result<SloccClass> {
    if !is_permutation_symmetric(state, tol).symmetric {
        return Ok(SloccClass::NotSymmetric);
    }
    let roots = majorana_roots(state, tol)?;
    Ok(match distinct_spinor_count(&roots, tol) {
        1 => SloccClass::Separable,
        2 => SloccClass::TwoDistinct,
        _ => SloccClass::ThreeDistinct,
    })
}

/// Default root-coincidence / symmetry tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;
