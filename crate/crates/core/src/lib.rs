//! Mean exit times of drifting continuous-time random walks from `(0, b)`.
//!
//! The walk moves with constant drift `v` between jumps; jumps arrive after
//! i.i.d. sojourn times and have i.i.d. sizes. Two expectations are computed:
//! the mean exit time `T̃_b(x)` when the present is a jump instant, and
//! `T_b(x, r)` when the present is an arbitrary time `r` and only the current
//! position is known. The latter differs through the excess-life law of the
//! renewal process of jump times.
//!
//! Every analytic route is paired with an independent one: closed forms
//! against Laplace inversion or Nyström solves, and all of them against the
//! event-driven Monte Carlo simulator in [`montecarlo`].

pub mod continuum;
pub mod distributions;
mod error;
pub mod exit;
pub mod interp;
pub mod laplace;
pub mod montecarlo;
pub mod process;
pub mod quadrature;
pub mod renewal;
pub mod special;

pub use distributions::{JumpModel, Moment, Support, WaitingTimeModel};
pub use error::{Error, Result};
pub use laplace::{InversionMethod, LaplaceFunction};
pub use montecarlo::ExitTimeEstimate;
pub use process::{ProcessSpec, Regime};
pub use renewal::{ExcessLifeLaw, ObservationTime, RenewalSolution};

pub use num_complex::Complex64;
