//! Error types for the library and harness.

use thiserror::Error;

/// Invalid model or drive parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("omega0 must be positive, got {0} GHz")]
    NonPositiveOmega0(f64),
    #[error("drive amplitude g must be non-negative, got {0} GHz")]
    NegativeG(f64),
    #[error("invalid drive: {0}")]
    InvalidDrive(String),
}

/// Invalid bath, filter or circuit parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DissipationError {
    #[error("bose occupation requires a positive energy gap, got {0} J")]
    NonPositiveGap(f64),
    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),
    #[error("coupling kappa must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("invalid resonator filter: {0}")]
    InvalidFilter(String),
    #[error("invalid transmon circuit: {0}")]
    InvalidCircuit(String),
}

/// Numeric propagation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),
    #[error("positivity violated at t = {t_ns} ns (min eigenvalue {min_eigenvalue:.3e}); step too coarse")]
    StepUnstable { t_ns: f64, min_eigenvalue: f64 },
    #[error("no steady cycle after {cycles} cycles (residual {residual:.3e})")]
    NotConverged { cycles: usize, residual: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failures of the closed-form cycle map.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("cycle map is singular (all thermal rates zero); no unique steady state")]
    SingularMap,
    #[error("outside the validity domain: {0}")]
    Domain(String),
}

/// Failures of cycle post-processing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservablesError {
    #[error("winding undefined: coherence phasor below 1e-12 on {zero_fraction:.0}% of the cycle")]
    UndefinedWinding { zero_fraction: f64 },
    #[error("no local maximum within ±25% of predicted peak n = {n}")]
    NoPeak { n: u32 },
}

/// Config-file parsing and validation.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid config:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
