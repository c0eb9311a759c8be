//! Loanable-funds market toolkit: fixed-point interest-rate models, a
//! block-level market engine, an agent-based simulator, and the UIP / VECM
//! econometrics used to study rate efficiency across lending protocols.

pub mod analytics;
pub mod econometrics;
pub mod fixed_point;
pub mod market_engine;
pub mod panel;
pub mod rate_models;
pub mod simulator;

pub use fixed_point::{FixedDec, FixedError};
pub use market_engine::{CeilingPolicy, LiquidationParams, MarketState, Position};
pub use rate_models::{RateModel, DEFAULT_BLOCKS_PER_YEAR};
pub use simulator::{Scenario, SimError, SimOutput};
