//! Phase-diagram toolkit for N two-level atoms in a lossy cavity driven by a
//! two-photon (squeezed) drive.
//!
//! - [`model`]: parameters, mean-field state and equations of motion
//! - [`meanfield`]: fixed points, closed-form branches and phase boundaries
//! - [`stability`]: drift matrix and eigenvalue stability verdicts
//! - [`fluctuations`]: Lyapunov covariances and photon-number fluctuations
//! - [`quantum`]: exact finite-N master equation, steady states, Wigner maps

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fluctuations;
pub mod meanfield;
pub mod model;
pub mod quantum;
pub mod sparse;
pub mod stability;

pub use error::{Error, Result};
pub use model::{ModelParams, Phase, PhaseLabel, SemiclassicalState};
