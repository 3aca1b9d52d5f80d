//! Unit conventions and fixed physical constants.
//!
//! Internal unit system: ħ = 1, time in ns, angular frequency (and energy)
//! in rad/ns, rates in 1/ns, power in rad/ns². Public constructors accept
//! ordinary frequencies in GHz and temperatures in mK, which keeps every
//! internal number O(1)–O(100) for the parameter ranges of interest.

use std::f64::consts::PI;

/// Fixed physical constants (CODATA). Not user-configurable.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants;

impl PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Boltzmann constant, J/K.
    pub const K_B: f64 = 1.380_649e-23;
}

/// ħ/k_B expressed in ns·K: `omega[rad/ns] * HBAR_OVER_KB_NS_K / T[K]`
/// is the dimensionless ratio ħω/k_BT.
pub const HBAR_OVER_KB_NS_K: f64 = PhysicalConstants::HBAR / PhysicalConstants::K_B * 1e9;

/// One internal power unit (rad/ns²) in watts: ħ · (10⁹)².
pub const INTERNAL_POWER_UNIT_W: f64 = PhysicalConstants::HBAR * 1e18;

/// Ordinary frequency in GHz to angular frequency in rad/ns.
pub fn ghz_to_rad_ns(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

/// Angular frequency in rad/ns to ordinary frequency in GHz.
pub fn rad_ns_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Temperature in mK to K.
pub fn mk_to_kelvin(t_mk: f64) -> f64 {
    t_mk * 1e-3
}

/// Internal power (rad/ns²) to watts.
pub fn power_to_watts(p_internal: f64) -> f64 {
    p_internal * INTERNAL_POWER_UNIT_W
}

/// Internal energy (rad/ns, ħ = 1) to joules.
pub fn energy_to_joules(e_internal: f64) -> f64 {
    e_internal * PhysicalConstants::HBAR * 1e9
}

/// ħω/k_BT for an internal angular frequency and a temperature in K.
pub fn thermal_ratio(omega: f64, t_kelvin: f64) -> f64 {
    omega * HBAR_OVER_KB_NS_K / t_kelvin
}

/// k_BT/ħ as an internal angular frequency (rad/ns).
pub fn thermal_frequency(t_kelvin: f64) -> f64 {
    t_kelvin / HBAR_OVER_KB_NS_K
}
