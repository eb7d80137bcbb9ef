//! Waiting-time and jump-size laws with their transforms and exact samplers.

mod jumps;
mod tabulated;
mod waiting;

pub use jumps::{JumpModel, Support};
pub use tabulated::TabulatedDensity;
pub use waiting::WaitingTimeModel;

use crate::error::{bail, Result};

/// A moment that may fail to exist for heavy-tailed laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Undefined,
}

impl Moment {
    pub fn finite(self) -> Result<f64> {
        match self {
            Moment::Finite(v) => Ok(v),
            Moment::Undefined => bail!(Model, "moment is undefined for this law"),
        }
    }
}
