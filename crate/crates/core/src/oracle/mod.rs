//! Brute-force checks independent of the closed forms: refined grid search
//! over scheme space, numerical differentiation of trajectories, and exact
//! diagonalization of a truncated bosonic environment.

pub mod fd;
pub mod fock;
pub mod grid;

pub use fd::{finite_difference_velocity, FdEstimate, FdMethod};
pub use fock::{exact_diagonalization_coherence, exact_diagonalization_converged, FockMode, FockOracleConfig, FockTrajectory};
pub use grid::{search_initial_coherence_max, search_velocity_extrema, GridPoint, GridSearchReport, GridSpec};
