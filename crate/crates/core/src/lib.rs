//! Simulator for two driven, tunnel-coupled optomechanical cavities whose
//! mechanical resonators interact through a Coulomb force.
//!
//! The nonlinear mean-field equations ([`classical`]) are co-integrated with
//! the covariance matrix of the linearised Gaussian fluctuations
//! ([`fluctuation`]); complete, phi- and phase-synchronisation measures
//! ([`sync`]) are then read off every covariance snapshot. [`scenario`]
//! wraps this in a config-driven runner that writes CSV output.
//!
//! All rates are in units of the first mechanical frequency and time is
//! `tau = omega1 * t`.

pub mod classical;
pub mod error;
pub mod fluctuation;
pub mod linalg;
pub mod model;
mod ode;
pub mod scenario;
pub mod sync;

pub use classical::{
    cavity_cross_correlation, classical_rhs, integrate_classical, integrate_classical_partial,
    limit_cycle_summary, mechanical_phase, phase_locking_metric, ClassicalState,
    ClassicalTrajectory, LimitCycleSummary, PhaseLocking,
};
pub use error::{Error, Result};
pub use fluctuation::{
    build_diffusion, build_drift, default_initial_covariance, integrate_coupled,
    integrate_coupled_partial, integrate_covariance_frozen, lyapunov_rhs, CoupledTrajectory,
    CovarianceMatrix, DiffusionMatrix, DriftMatrix,
};
pub use model::{
    coulomb_coupling, effective_coupling, effective_detuning, CoulombGeometry, Quadrature,
    SystemParams,
};
pub use scenario::{
    load_config, run_scenario, run_sweep, Config, RunManifest, ScenarioConfig, SweepConfig,
};
pub use sync::{sync_complete, sync_phase, sync_phi, sync_series, PhiMode, SyncSample, SyncSeries};
