#![allow(dead_code)]

use qsym3::linalg::CMat2;
use qsym3::qsym::{symmetrize, LocalUnitaryTriple, PureState3, Spinor};
use qsym3::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal<R: Rng>(r: &mut R) -> f64 {
    r.sample(StandardNormal)
}

pub fn gaussian_complex<R: Rng>(r: &mut R) -> Complex<f64> {
    Complex::new(standard_normal(r), standard_normal(r))
}

/// Haar-random qubit state.
pub fn random_spinor<R: Rng>(r: &mut R) -> Spinor<f64> {
    Spinor::new(gaussian_complex(r), gaussian_complex(r)).unwrap()
}

/// Symmetrization of three Haar-random spinors.
pub fn random_symmetric<R: Rng>(r: &mut R) -> PureState3<f64> {
    loop {
        let s = [random_spinor(r), random_spinor(r), random_spinor(r)];
        if let Ok(state) = symmetrize(&s) {
            return state;
        }
    }
}

/// Haar-random three-qubit pure state.
pub fn random_state3<R: Rng>(r: &mut R) -> PureState3<f64> {
    PureState3::new(std::array::from_fn(|_| gaussian_complex(r))).unwrap()
}

/// Random SU(2) element from a random unit quaternion.
pub fn random_unitary<R: Rng>(r: &mut R) -> CMat2<f64> {
    let q: [f64; 4] = std::array::from_fn(|_| standard_normal(r));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    let z1 = Complex::new(a, b);
    let z2 = Complex::new(c, d);
    qsym3::linalg::CMat([[z1, -z2.conj()], [z2, z1.conj()]])
}

pub fn random_local_unitary<R: Rng>(r: &mut R) -> LocalUnitaryTriple<f64> {
    LocalUnitaryTriple::new(random_unitary(r), random_unitary(r), random_unitary(r)).unwrap()
}

/// `n` evenly spaced points on `[lo, hi]`, both ends included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

/// Haar-ish proper rotation from a random unit quaternion.
pub fn random_rotation<R: Rng>(r: &mut R) -> [[f64; 3]; 3] {
    let q: [f64; 4] = std::array::from_fn(|_| standard_normal(r));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}
