//! Uplink data detection with MRC on 1-bit observations (single user).

mod chain;
mod constellation;
mod stats;

pub use chain::{mdd, mrc_soft, ser_simulate, uplink_receive, DetectionChain, Receiver, SerReport};
pub use constellation::{Constellation, ConstellationKind};
pub use stats::{
    expected_symbol, normvar_bound_ones, normvar_bound_ones_lim_rho, normvar_bound_ones_lim_tau,
    symbol_stats_asymptotic, variance_symbol, SymbolModel, SymbolStats,
};

use crate::error::{Error, Result};
use crate::pilots::PilotMatrix;

/// Detection statistics are derived for one user only.
pub(crate) fn require_single_user(p: &PilotMatrix) -> Result<()> {
    if p.k() == 1 {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "detection analysis covers a single user, got K = {}",
            p.k()
        )))
    }
}
