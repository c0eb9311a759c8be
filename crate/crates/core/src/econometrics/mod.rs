//! Floating-point estimation: OLS with Newey-West errors and Wald tests for
//! uncovered interest parity, Johansen rank selection, VECM estimation,
//! impulse responses and companion-matrix diagnostics.

use thiserror::Error;

pub mod diagnostics;
pub mod irf;
pub mod johansen;
pub mod montecarlo;
pub mod ols;
pub mod series;
pub mod synthetic;
pub mod uip;
pub mod vecm;

pub use diagnostics::{jarque_bera, ljung_box, select_lags, stability_check, LagCriterion, StabilityReport};
pub use irf::{granger_long_run, irf, IrfResult};
pub use johansen::{johansen, JohansenResult};
pub use ols::{default_hac_lags, newey_west, ols, white, OlsFit};
pub use series::{resample, Aggregation, Frequency, RateSeries, Resampled};
pub use uip::{uip_regress, wald, RegressionResult};
pub use vecm::{vecm_fit, VecmFit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EconError {
    #[error("insufficient observations: need {needed}, have {have}")]
    InsufficientObservations { needed: usize, have: usize },
    #[error("regressor has zero variance")]
    DegenerateRegressor,
    #[error("design matrix is singular")]
    SingularDesign,
    #[error("rank {rank} out of range 0..={k}")]
    RankOutOfRange { rank: usize, k: usize },
    #[error("residual covariance is not positive definite")]
    NonPsdCovariance,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, EconError>;
