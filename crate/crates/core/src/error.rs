use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("symmetrized vector has zero norm")]
    DegenerateSymmetrization,
    #[error("beta = 0 gives a product state, not a two-distinct-spinor state")]
    ProductState,
    #[error("state is not permutation symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },
    #[error("polynomial root finder did not converge")]
    NumericalRootFailure,
    #[error("local unitary factor {party} is not unitary (residual {residual:e})")]
    NonUnitary { party: char, residual: f64 },
    #[error("measurement outcome has probability {p:e}")]
    OutcomeImpossible { p: f64 },
    #[error("mu_c vanishes ({0:e}): probability-zero branch")]
    MuDegenerate(f64),
    #[error("nu_c vanishes ({0:e}): probability-zero branch")]
    NuDegenerate(f64),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("product of two settings of party {party} at byte {pos}")]
    Degree { party: char, pos: usize },
    #[error("unknown Bell inequality class {0} (supported: 2, 5, 22, 26, 33, 39)")]
    UnknownClass(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
