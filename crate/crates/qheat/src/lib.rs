//! Steady-state quantum heat of a continuously driven two-level system.
//!
//! A qubit with Hamiltonian H(t) = (ħ g Ω(t)/2) σ_z + (ħ ω₀/2) σ_x is driven
//! periodically between its minimum gap ħω₂ = ħω₀ and maximum gap
//! ħω₁ = ħ√(4g² + ω₀²) while coupled to one or two thermal baths. The power
//! it dissipates shows resonances at fractional frequencies f_M/n set by the
//! dynamical phase accumulated per cycle, where f_M = (ω₁+ω₂)/4π is the mean
//! gap frequency.
//!
//! The crate provides two independent routes to the steady-state cycle:
//!
//! * [`lindblad`] — full numeric integration of the time-dependent master
//!   equation in the lab frame, with jump operators built in the
//!   instantaneous eigenbasis of H(t);
//! * [`analytic`] — the closed four-leg affine map for square-wave driving
//!   (two thermalization legs, two sudden basis rotations), its exact fixed
//!   point, and closed-form power/occupation expressions.
//!
//! [`observables`] post-processes converged cycles (exact cycle power, Bloch
//! trajectories, winding numbers, peak detection, cooling windows) and
//! [`harness`] adds config parsing, deterministic parallel sweeps and CSV
//! output for the `qheat` command-line tool.
//!
//! Public interfaces quote ordinary frequencies in GHz and temperatures in
//! mK; internally everything is angular frequency in rad/ns with ħ = 1 (see
//! [`units`]).

// validation code uses `!(x > 0.0)` on purpose: it rejects NaN along with
// non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dissipation;
pub mod error;
pub mod harness;
pub mod lindblad;
pub mod model;
pub mod observables;
pub mod units;

pub use analytic::{BlochState, CornerStates, LegForm, LegPropagator, MapParams};
pub use dissipation::{ActiveBranch, BathCoupling, RateSet, ResonatorFilter, TransmonCircuit};
pub use error::{AnalyticError, ConfigError, DissipationError, ModelError, SimError};
pub use harness::config::ExperimentConfig;
pub use harness::sweep::{run_sweep, SweepResultSet};
pub use lindblad::{
    evolve_one_cycle, find_steady_cycle, CycleSolution, DensityMatrix, IntegratorConfig,
};
pub use model::{DriveWaveform, PeakPrediction, QubitDriveModel};
pub use observables::{Peak, PowerSpectrumPoint};
