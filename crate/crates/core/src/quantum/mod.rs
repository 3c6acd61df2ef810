//! Exact finite-N treatment: Dicke sector ⊗ truncated Fock space.

pub mod convergence;
pub mod density;
pub mod hilbert;
pub mod liouvillian;
pub mod observables;
pub mod steady;
pub mod wigner;

pub use convergence::{cutoff_convergence, CutoffCheck, Observable};
pub use density::{DensityMatrix, DensityReport, Layout};
pub use hilbert::{HilbertSpec, DEFAULT_FOCK_CUTOFF, MAX_ATOMS};
pub use liouvillian::{build_hamiltonian, build_liouvillian, Liouvillian};
pub use observables::{collective_spin, mean_photon, reduced_cavity, scaled_photon_number};
pub use steady::{evolve_to, steady_state, time_evolve, Trajectory};
pub use wigner::{wigner, GridSpec, WignerGrid};
