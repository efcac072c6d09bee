//! Channel estimation and data detection for massive MIMO uplink receivers
//! with 1-bit ADCs under i.i.d. Rayleigh fading.
//!
//! Each closed-form quantity (estimator MSE, mean and variance of the MRC
//! soft symbol, their high-SNR limits and worst-pilot bounds) lives next to
//! a Monte Carlo routine in [`oracle`] that measures the same quantity from
//! simulated quantized signals.

pub mod chest;
pub mod cmatrix;
pub mod config;
pub mod detect;
pub mod error;
pub mod oracle;
pub mod pilots;
pub mod quant;
pub mod rng;

pub use chest::{EstimatorKind, LinearEstimator, MseKind, PilotCorrelation, ScalingFactors};
pub use cmatrix::CMatrix;
pub use config::{db_to_linear, linear_to_db, SystemConfig};
pub use detect::{Constellation, ConstellationKind, Receiver, SymbolStats};

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use oracle::{OracleReport, Tolerance};

pub use pilots::{PilotKind, PilotMatrix};
pub use rng::SeededRng;
