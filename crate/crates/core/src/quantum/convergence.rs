//! Fock-cutoff convergence checks.

use super::hilbert::HilbertSpec;
use super::liouvillian::build_liouvillian;
use super::observables::{collective_spin, mean_photon};
use super::steady::steady_state;
use crate::error::Result;
use crate::model::ModelParams;

/// Relative change above which a cutoff is flagged as unconverged.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Extra photon levels used for the comparison solve.
pub const CUTOFF_STEP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    MeanPhoton,
    SpinZ,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffCheck {
    pub cutoff: usize,
    pub value: f64,
    pub value_extended: f64,
    pub relative_difference: f64,
    pub converged: bool,
}

/// Steady-state `observable` at N_ph and N_ph + 10.
pub fn cutoff_convergence(
    params: &ModelParams,
    spec: &HilbertSpec,
    observable: Observable,
) -> Result<CutoffCheck> {
    let eval = |spec: &HilbertSpec| -> Result<f64> {
        let rho = steady_state(&build_liouvillian(params, spec)?)?;
        Ok(match observable {
            Observable::MeanPhoton => mean_photon(&rho),
            Observable::SpinZ => collective_spin(&rho)?[2],
        })
    };
    let value = eval(spec)?;
    let value_extended = eval(&spec.with_fock_cutoff(spec.fock_cutoff() + CUTOFF_STEP)?)?;
    let scale = value.abs().max(value_extended.abs());
    let relative_difference = if scale == 0.0 {
        0.0
    } else {
        (value - value_extended).abs() / scale
    };
    Ok(CutoffCheck {
        cutoff: spec.fock_cutoff(),
        value,
        value_extended,
        relative_difference,
        converged: relative_difference <= CONVERGENCE_TOL,
    })
}
