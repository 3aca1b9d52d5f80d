//! Bath-induced rates: relaxation, excitation by detailed balance, pure
//! dephasing, resonator-filtered rates, and the transmon/resistor estimate.

use crate::error::DissipationError;
use crate::model::QubitDriveModel;
use crate::units::{
    ghz_to_rad_ns, mk_to_kelvin, thermal_frequency, thermal_ratio, PhysicalConstants,
};

/// Which part of the drive cycle a bath acts on. The branch classifier is
/// Ω(t) ≤ 1 (low gap) vs Ω(t) > 1 (high gap).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveBranch {
    Always,
    OnlyLowGap,
    OnlyHighGap,
}

/// A resonator between qubit and bath. Multiplies the bare rate by the
/// Lorentzian 1/(1 + Q_r²(ω_r/ω − ω/ω_r)²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorFilter {
    q_r: f64,
    omega_r: f64,
}

impl ResonatorFilter {
    /// Filter with quality factor `q_r` resonant at `f_r_ghz`.
    pub fn new(q_r: f64, f_r_ghz: f64) -> Result<Self, DissipationError> {
        if !(q_r > 0.0) || !q_r.is_finite() {
            return Err(DissipationError::InvalidFilter(format!(
                "quality factor must be positive, got {q_r}"
            )));
        }
        if !(f_r_ghz > 0.0) || !f_r_ghz.is_finite() {
            return Err(DissipationError::InvalidFilter(format!(
                "resonance frequency must be positive, got {f_r_ghz} GHz"
            )));
        }
        Ok(ResonatorFilter {
            q_r,
            omega_r: ghz_to_rad_ns(f_r_ghz),
        })
    }

    pub fn q_r(&self) -> f64 {
        self.q_r
    }

    /// Resonance angular frequency, rad/ns.
    pub fn omega_r(&self) -> f64 {
        self.omega_r
    }

    /// Lorentzian suppression at gap ω (rad/ns); in (0, 1], equal to 1 only
    /// at ω = ω_r.
    pub fn factor(&self, omega: f64) -> f64 {
        let detune = self.omega_r / omega - omega / self.omega_r;
        1.0 / (1.0 + self.q_r * self.q_r * detune * detune)
    }
}

/// One bath: dimensionless coupling κ, temperature, optional spectral
/// filter, and the branch it acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathCoupling {
    kappa: f64,
    temperature: f64, // K
    filter: Option<ResonatorFilter>,
    active_branch: ActiveBranch,
    dephasing: bool,
}

impl BathCoupling {
    /// Bath with coupling `kappa` at temperature `t_mk` (mK), acting on the
    /// whole cycle, unfiltered, with pure dephasing enabled.
    pub fn new(kappa: f64, t_mk: f64) -> Result<Self, DissipationError> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(DissipationError::NonPositiveKappa(kappa));
        }
        if !(t_mk > 0.0) || !t_mk.is_finite() {
            return Err(DissipationError::NonPositiveTemperature(mk_to_kelvin(t_mk)));
        }
        Ok(BathCoupling {
            kappa,
            temperature: mk_to_kelvin(t_mk),
            filter: None,
            active_branch: ActiveBranch::Always,
            dephasing: true,
        })
    }

    pub fn with_filter(mut self, filter: ResonatorFilter) -> Self {
        self.filter = Some(filter);
        self
    }

    pub fn on_branch(mut self, branch: ActiveBranch) -> Self {
        self.active_branch = branch;
        self
    }

    /// Disable the pure-dephasing channel (the single-bath resonance
    /// presets leave it off).
    pub fn with_dephasing(mut self, enabled: bool) -> Self {
        self.dephasing = enabled;
        self
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Bath temperature in K.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn filter(&self) -> Option<&ResonatorFilter> {
        self.filter.as_ref()
    }

    pub fn active_branch(&self) -> ActiveBranch {
        self.active_branch
    }

    pub fn dephasing_enabled(&self) -> bool {
        self.dephasing
    }

    /// Whether this bath acts at drive value `omega_drive` = Ω(t).
    pub fn acts_on(&self, drive_value: f64) -> bool {
        match self.active_branch {
            ActiveBranch::Always => true,
            ActiveBranch::OnlyLowGap => drive_value <= 1.0,
            ActiveBranch::OnlyHighGap => drive_value > 1.0,
        }
    }
}

/// Instantaneous transition and dephasing rates, 1/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub gamma_down: f64,
    pub gamma_up: f64,
    pub gamma_phi: f64,
    pub gamma_sigma: f64,
}

impl RateSet {
    pub const ZERO: RateSet = RateSet {
        gamma_down: 0.0,
        gamma_up: 0.0,
        gamma_phi: 0.0,
        gamma_sigma: 0.0,
    };
}

/// Bose occupation N(ΔE) = 1/(e^{ΔE/k_BT} − 1) for an energy gap in J and a
/// temperature in K. Rejects non-positive gaps (zero-gap singularity).
pub fn bose_occupation(delta_e: f64, t_kelvin: f64) -> Result<f64, DissipationError> {
    if !(delta_e > 0.0) {
        return Err(DissipationError::NonPositiveGap(delta_e));
    }
    if !(t_kelvin > 0.0) {
        return Err(DissipationError::NonPositiveTemperature(t_kelvin));
    }
    Ok(1.0 / (delta_e / (PhysicalConstants::K_B * t_kelvin)).exp_m1())
}

/// Bose occupation for an internal gap (rad/ns) at a temperature in K.
pub(crate) fn occupation_internal(omega: f64, t_kelvin: f64) -> f64 {
    1.0 / thermal_ratio(omega, t_kelvin).exp_m1()
}

/// Rates of one bath at drive value Ω and gap ω(Ω) (both precomputed).
///
/// Γ↓ = κ · ω₀²/(ω₀²+g²Ω²) · ω · (N+1), filtered by the Lorentzian when a
/// resonator is present; Γ↑ from detailed balance; Γ^φ = κ · (ω₀²/(gΩ)² +
/// 1)⁻¹ · k_BT/ħ, exactly 0 at Ω = 0 (the prefactor limit). All zero when
/// the bath's branch rule excludes the current branch.
pub(crate) fn rates_for(omega0: f64, g: f64, drive_value: f64, bath: &BathCoupling) -> RateSet {
    if !bath.acts_on(drive_value) {
        return RateSet::ZERO;
    }
    let g_om = g * drive_value;
    let omega = (g_om * g_om + omega0 * omega0).sqrt();
    let matrix_element = omega0 * omega0 / (omega0 * omega0 + g_om * g_om);
    let n = occupation_internal(omega, bath.temperature);
    let mut gamma_down = bath.kappa * matrix_element * omega * (n + 1.0);
    if let Some(f) = &bath.filter {
        gamma_down *= f.factor(omega);
    }
    let gamma_up = (-thermal_ratio(omega, bath.temperature)).exp() * gamma_down;
    let gamma_phi = if bath.dephasing && g_om > 0.0 {
        // no resonator filter on dephasing (zero-frequency noise channel)
        bath.kappa
            * (g_om * g_om / (omega0 * omega0 + g_om * g_om))
            * thermal_frequency(bath.temperature)
    } else {
        0.0
    };
    RateSet {
        gamma_down,
        gamma_up,
        gamma_phi,
        gamma_sigma: gamma_down + gamma_up,
    }
}

/// Rates of `bath` at time `t` for the given model.
pub fn rates_at(model: &QubitDriveModel, bath: &BathCoupling, t: f64) -> RateSet {
    rates_for(model.omega0(), model.g(), model.waveform_value(t), bath)
}

/// A transmon coupled to a resistor through C_c: the concrete circuit behind
/// the rate estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonCircuit {
    c_j: f64,   // F
    c_c: f64,   // F
    r: f64,     // Ohm
    omega: f64, // rad/s
}

/// Full and approximate relaxation rates of a transmon/resistor circuit,
/// 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonRates {
    /// Capacitive-participation formula with the thermal (N+1) factor and
    /// the drive matrix element.
    pub full: f64,
    /// Low-temperature small-drive limit Γ↓ ≈ C_c²(C_J+C_c)⁻² ω² R C_J.
    pub approx: f64,
}

impl TransmonCircuit {
    /// Circuit with junction capacitance `c_j_ff` and coupling capacitance
    /// `c_c_ff` (fF), resistor `r_ohm`, at transition frequency `f_ghz`.
    pub fn new(c_j_ff: f64, c_c_ff: f64, r_ohm: f64, f_ghz: f64) -> Result<Self, DissipationError> {
        if !(c_j_ff > 0.0) || c_c_ff < 0.0 || r_ohm < 0.0 || !(f_ghz > 0.0) {
            return Err(DissipationError::InvalidCircuit(format!(
                "need C_J > 0, C_c >= 0, R >= 0, f > 0; got {c_j_ff} fF, {c_c_ff} fF, {r_ohm} Ohm, {f_ghz} GHz"
            )));
        }
        Ok(TransmonCircuit {
            c_j: c_j_ff * 1e-15,
            c_c: c_c_ff * 1e-15,
            r: r_ohm,
            omega: 2.0 * std::f64::consts::PI * f_ghz * 1e9,
        })
    }

    /// Transition angular frequency, rad/s.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Capacitive participation C_c²/(C_J+C_c)².
    ///
    /// The quoted estimate Γ↓/ω ≈ 0.01 at C_J = 30 fF, C_c = 8 fF pins this
    /// combination (a C_c + 2C_J shunt would give 0.003).
    pub fn participation(&self) -> f64 {
        let s = self.c_c + self.c_j;
        (self.c_c / s) * (self.c_c / s)
    }
}

/// Relaxation rate of the circuit, full and low-temperature/small-drive
/// approximate.
///
/// The full rate carries the drive matrix element ω₀²/(ω₀²+g²Ω(t)²) of
/// `model` evaluated at `t_ns` and the thermal factor (N+1) at `t_mk`; the
/// approximation drops both.
pub fn transmon_rate(
    circ: &TransmonCircuit,
    model: &QubitDriveModel,
    t_mk: f64,
    t_ns: f64,
) -> Result<TransmonRates, DissipationError> {
    let t_kelvin = mk_to_kelvin(t_mk);
    if !(t_kelvin > 0.0) {
        return Err(DissipationError::NonPositiveTemperature(t_kelvin));
    }
    let base = circ.participation() * circ.omega * circ.omega * circ.r * circ.c_j;
    let g_om = model.g() * model.waveform_value(t_ns);
    let w0 = model.omega0();
    let matrix_element = w0 * w0 / (w0 * w0 + g_om * g_om);
    let n = bose_occupation(PhysicalConstants::HBAR * circ.omega, t_kelvin)?;
    Ok(TransmonRates {
        full: matrix_element * base * (n + 1.0),
        approx: base,
    })
}

/// Dimensionless κ that makes the generic rate formula reproduce the
/// circuit's relaxation rate at Ω = 0: κ = C_c²/(C_J+C_c)² · ω C_J R.
pub fn effective_kappa(circ: &TransmonCircuit) -> f64 {
    circ.participation() * circ.omega * circ.c_j * circ.r
}
