//! Three-party, two-setting, two-outcome Bell expressions.
//!
//! An expression is a coefficient tensor `coeff[a][b][c]` with `0` standing
//! for the identity and `1`, `2` for the two settings of that party, so
//! `coeff[1][0][2]` multiplies `<A1 C2>`.

mod classes;
mod expression;

pub use classes::*;
pub use expression::{parse_expression, parse_expression_file, render};

use crate::error::{Error, Result};
use crate::linalg::{kron3, CMat2, CMat8};
use crate::qsym::PureState3;
use crate::scalar::{creal, Real};
use num_rational::Rational64;
use num_traits::{Num, ToPrimitive};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellExpression322<S> {
    pub coeff: [[[S; 3]; 3]; 3],
    /// Bound attached to the text form; advisory, see [`classical_bound`].
    pub local_bound: Option<S>,
}

impl<S: Copy + Num> BellExpression322<S> {
    pub fn zero() -> Self {
        BellExpression322 { coeff: [[[S::zero(); 3]; 3]; 3], local_bound: None }
    }

    /// Number of nonzero monomials.
    pub fn term_count(&self) -> usize {
        self.coeff.iter().flatten().flatten().filter(|v| !v.is_zero()).count()
    }

    /// The expression after exchanging settings 1 and 2 of `party` (0, 1, 2).
    pub fn swap_settings(&self, party: usize) -> Self {
        let sw = |k: usize| match k {
            1 => 2,
            2 => 1,
            k => k,
        };
        let mut out = *self;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let mut idx = [a, b, c];
                    idx[party] = sw(idx[party]);
                    out.coeff[idx[0]][idx[1]][idx[2]] = self.coeff[a][b][c];
                }
            }
        }
        out
    }

    /// Value of the expression for a deterministic strategy, `signs[p][k]`
    /// being party `p`'s outcome for setting `k + 1`.
    pub fn deterministic_value(&self, signs: [[bool; 2]; 3]) -> S
    where
        S: std::ops::Neg<Output = S>,
    {
        let factor = |p: usize, k: usize| -> Option<bool> {
            if k == 0 {
                None
            } else {
                Some(signs[p][k - 1])
            }
        };
        let mut acc = S::zero();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let v = self.coeff[a][b][c];
                    if v.is_zero() {
                        continue;
                    }
                    let negative = [factor(0, a), factor(1, b), factor(2, c)]
                        .iter()
                        .filter(|s| **s == Some(false))
                        .count()
                        % 2
                        == 1;
                    acc = if negative { acc - v } else { acc + v };
                }
            }
        }
        acc
    }
}

impl BellExpression322<Rational64> {
    pub fn to_real<T: Real>(&self) -> BellExpression322<T> {
        let conv = |x: &Rational64| T::lit(x.to_f64().unwrap_or(f64::NAN));
        BellExpression322 {
            coeff: self.coeff.map(|m| m.map(|r| r.map(|x| conv(&x)))),
            local_bound: self.local_bound.as_ref().map(conv),
        }
    }
}

/// Maximum over the 64 deterministic local strategies, in the scalar type
/// of the expression (exact for rationals).
pub fn classical_bound<S>(expr: &BellExpression322<S>) -> S
where
    S: Copy + Num + PartialOrd + std::ops::Neg<Output = S>,
{
    let mut best: Option<S> = None;
    for mask in 0u32..64 {
        let bit = |n: u32| mask & (1 << n) == 0;
        let signs = [[bit(0), bit(1)], [bit(2), bit(3)], [bit(4), bit(5)]];
        let v = expr.deterministic_value(signs);
        if best.is_none_or(|b| v > b) {
            best = Some(v);
        }
    }
    best.expect("64 strategies")
}

/// The two dichotomic observables of one party.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartyObservables<T> {
    settings: [CMat2<T>; 2],
}

impl<T: Real> PartyObservables<T> {
    /// Requires Hermitian matrices (1e-12) with spectrum in `[-1, 1]` (1e-9).
    pub fn new(first: CMat2<T>, second: CMat2<T>) -> Result<Self> {
        for (k, m) in [first, second].iter().enumerate() {
            let h = m.hermiticity_residual();
            if !(h <= T::lit(1e-12)) {
                return Err(Error::Domain(format!("setting {} not Hermitian (residual {h:e})", k + 1)));
            }
            let ev = spectral_radius(m);
            if !(ev <= T::one() + T::lit(1e-9)) {
                return Err(Error::Domain(format!(
                    "setting {} has eigenvalue of modulus {ev} > 1",
                    k + 1
                )));
            }
        }
        Ok(PartyObservables { settings: [first, second] })
    }

    /// Skips validation; for evaluating matrices that are not valid
    /// dichotomic observables.
    pub fn new_unchecked(first: CMat2<T>, second: CMat2<T>) -> Self {
        PartyObservables { settings: [first, second] }
    }

    /// `n1.sigma` and `n2.sigma`.
    pub fn from_bloch(n1: [T; 3], n2: [T; 3]) -> Result<Self> {
        Self::new(crate::linalg::bloch_operator(n1), crate::linalg::bloch_operator(n2))
    }

    /// Setting `k` in {1, 2}; `k = 0` gives the identity.
    pub fn operator(&self, k: usize) -> CMat2<T> {
        match k {
            0 => CMat2::identity(),
            k => self.settings[k - 1],
        }
    }
}

/// Largest eigenvalue modulus of a Hermitian 2x2 matrix.
fn spectral_radius<T: Real>(m: &CMat2<T>) -> T {
    let a = m.0[0][0].re;
    let d = m.0[1][1].re;
    let off = m.0[0][1].norm();
    let mean = (a + d) / T::lit(2.0);
    let half = (a - d) / T::lit(2.0);
    let r = (half * half + off * off).sqrt();
    (mean + r).abs().max((mean - r).abs())
}

/// Bell operator `sum coeff[a][b][c] O_A(a) (x) O_B(b) (x) O_C(c)`.
pub fn bell_operator<T: Real>(expr: &BellExpression322<T>, obs: &[PartyObservables<T>; 3]) -> CMat8<T> {
    let mut op = CMat8::zeros();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let v = expr.coeff[a][b][c];
                if v != T::zero() {
                    let term = kron3(&obs[0].operator(a), &obs[1].operator(b), &obs[2].operator(c));
                    op = op + term.scale(creal(v));
                }
            }
        }
    }
    op
}

/// `<psi| B |psi>`
pub fn quantum_value<T: Real>(
    expr: &BellExpression322<T>,
    obs: &[PartyObservables<T>; 3],
    state: &PureState3<T>,
) -> T {
    state.inner(&state.apply(&bell_operator(expr, obs))).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use num_traits::Zero;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn bound_of_simple_forms() {
        let e = parse_expression("A1 + B1 + C1").unwrap();
        assert_eq!(classical_bound(&e), r(3));
        let e = parse_expression("-A1 B2").unwrap();
        assert_eq!(classical_bound(&e), r(1));
        assert_eq!(classical_bound(&BellExpression322::<Rational64>::zero()), Rational64::zero());
        let f = parse_expression("(A1 B1 + A2 B2) C1 + (A2 B1 - A1 B2) C2").unwrap().to_real::<f64>();
        assert_eq!(classical_bound(&f), 2.0);
    }

    #[test]
    fn swap_is_involution() {
        let e = parse_expression("A1 B2 C1 - 2 A2 + 3 B1 C2").unwrap();
        for p in 0..3 {
            assert_eq!(e.swap_settings(p).swap_settings(p), e);
        }
        assert_eq!(e.swap_settings(0).coeff[2][2][1], r(1));
    }

    #[test]
    fn mermin_like_on_product_state() {
        let e = parse_expression("(A1 B1 + A2 B2) C1 + (A2 B1 - A1 B2) C2").unwrap().to_real::<f64>();
        let z: PartyObservables<f64> = PartyObservables::new(pauli(3), pauli(1)).unwrap();
        let v = quantum_value(&e, &[z, z, z], &PureState3::basis(0));
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn observable_validation() {
        let big = pauli::<f64>(3).scale(creal(1.1));
        assert!(PartyObservables::new(big, pauli(1)).is_err());
        let mut nh = pauli::<f64>(1);
        nh.0[0][1] = creal(0.5);
        assert!(PartyObservables::new(nh, pauli(1)).is_err());
        assert!(PartyObservables::from_bloch([0.6, 0.0, 0.8], [1.0, 0.0, 0.0]).is_ok());
    }
}
