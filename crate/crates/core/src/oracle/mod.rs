//! Monte Carlo and brute-force validators for the closed-form results.
//!
//! Every routine returns an [`OracleReport`] pairing a closed-form value with
//! an independent empirical or numerical estimate of the same quantity.

mod arcsine;
mod limits;
mod mse;
mod report;
mod stats;
mod suite;
mod symbols;

pub use arcsine::arcsine_check;
pub use limits::{
    amplitude_transfer, amplitude_transfer_check, phase_angle_check, phase_recovery_check,
    phase_recovery_noiseless, quarter_shift_check,
};
pub use mse::{empirical_mse, empirical_mse_many, mse_closed_form};
pub use report::{OracleReport, Tolerance};
pub use stats::SampleMoments;
pub use suite::validation_suite;
pub use symbols::{empirical_normvar, empirical_symbol_stats, sample_xhat};
