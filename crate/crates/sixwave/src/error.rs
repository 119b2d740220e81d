use thiserror::Error;

/// Errors surfaced by field operations, quadrature and the solvers.
#[derive(Debug, Error)]
pub enum SixwaveError {
    #[error("non-finite field")]
    NonFiniteField,
    #[error("weight overflow")]
    WeightOverflow,
    #[error("insufficient quadrature: n_theta = {0} < 4")]
    InsufficientQuadrature(usize),
    #[error("needs tail policy: endpoint {0} outside time grid")]
    NeedsTailPolicy(f64),
    #[error("outside small-data regime: ||f0|| = {norm:.6e} > R_e = {limit:.6e}")]
    OutsideSmallDataRegime { norm: f64, limit: f64 },
    #[error("outside KS regime: ||f0|| = {norm:.6e} > R_ks = {limit:.6e}")]
    OutsideKsRegime { norm: f64, limit: f64 },
    #[error("outside scattering regime: ||f|| = {norm:.6e} > R_s = {limit:.6e}")]
    OutsideScatteringRegime { norm: f64, limit: f64 },
    #[error("Maxwellian-centered regime unavailable for these weights")]
    MaxwellianRegimeUnavailable,
    #[error("ALP requires nonnegative data (min value {0:.6e})")]
    AlpNegativeData(f64),
    #[error("beginning condition violated at t = {time}, (x, v) = ({x}, {v}): {detail}")]
    BeginningCondition {
        time: f64,
        x: f64,
        v: f64,
        detail: String,
    },
    #[error("degenerate direction")]
    DegenerateDirection,
    #[error("{0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SixwaveError>;
