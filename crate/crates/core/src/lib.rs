//! Two-user movable-antenna NOMA downlink.
//!
//! * [`channel`]: far-field channel response and its coupling-matrix
//!   expansion.
//! * [`alloc`]: closed-form NOMA power allocation (five cases).
//! * [`sca`]: successive convex approximation for the antenna position.
//! * [`schemes`]: proposed MA-NOMA and the three baselines on one draw.
//! * [`scenario`]: random draws, Monte Carlo trials and sweeps.
//! * [`config`], [`output`]: JSON run configuration and CSV emission.
//! * [`oracle`], [`validation`]: brute-force references and the self-check
//!   suite behind `manoma validate`.

pub mod alloc;
pub mod channel;
pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod sca;
pub mod scenario;
pub mod schemes;
pub mod units;
pub mod validation;

pub use error::{ConfigError, Error, ModelError, Result, ScaError};
