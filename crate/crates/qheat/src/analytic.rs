//! Closed-form steady-state machinery for square-wave driving: the four-leg
//! affine cycle map, its exact fixed point, closed-form power and excited
//! occupation, and purity accounting.
//!
//! One cycle visits four corners p → q → r → s → p:
//!
//! * p → q: thermalization on the low-gap branch (gap ω₂, duration δt₂),
//! * q → r: sudden switch to the high-gap eigenbasis (rotation by η),
//! * r → s: thermalization on the high-gap branch (gap ω₁, duration δt₁),
//! * s → p: sudden switch back.
//!
//! The state vector is x = (D, R, I) in the instantaneous eigenbasis, with
//! D = 1/2 − ρ_ee and R + iI the eigenbasis coherence; Bloch coordinates
//! are 2(R, I, D). Thermal legs damp and rotate, sudden legs are orthogonal
//! (purity-preserving) rotations mixing D and R by η = √(1 − ω₂²/ω₁²).

use crate::dissipation::{rates_for, BathCoupling};
use crate::error::AnalyticError;
use crate::model::{DriveWaveform, QubitDriveModel};
use crate::units::power_to_watts;

/// Eigenbasis state (D, R, I); D = 1/2 − ρ_ee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub d: f64,
    pub r: f64,
    pub i: f64,
}

impl BlochState {
    pub fn new(d: f64, r: f64, i: f64) -> Self {
        BlochState { d, r, i }
    }

    /// Excited-state occupation ρ_ee = 1/2 − D.
    pub fn rho_ee(&self) -> f64 {
        0.5 - self.d
    }

    /// R² + I² + D² (the quantity conserved by sudden legs).
    pub fn purity_radius_sq(&self) -> f64 {
        self.r * self.r + self.i * self.i + self.d * self.d
    }

    /// Bloch-vector coordinates 2(R, I, D).
    pub fn bloch_vector(&self) -> [f64; 3] {
        [2.0 * self.r, 2.0 * self.i, 2.0 * self.d]
    }

    fn as_array(&self) -> [f64; 3] {
        [self.d, self.r, self.i]
    }

    fn from_array(x: [f64; 3]) -> Self {
        BlochState {
            d: x[0],
            r: x[1],
            i: x[2],
        }
    }
}

/// Parameters of the four-leg map: gaps, leg durations and branch rates.
/// Angular frequencies in rad/ns, durations in ns, rates in 1/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub omega1: f64,
    pub omega2: f64,
    pub dt1: f64,
    pub dt2: f64,
    pub gamma_down1: f64,
    pub gamma_sigma1: f64,
    pub gamma_down2: f64,
    pub gamma_sigma2: f64,
}

impl MapParams {
    /// Branch rates and timing for `model` with the given baths.
    ///
    /// Rates are summed over all baths active on each branch, evaluated at
    /// the flat-branch drive values Ω = 0 and Ω = 2. For tanh drives the
    /// legs are the square-wave halves δt₁ = δt₂ = π/ω_L.
    pub fn from_physical(model: &QubitDriveModel, baths: &[BathCoupling]) -> Self {
        let (omega1, omega2) = model.extremal_gaps();
        let (dt1, dt2) = match *model.drive() {
            DriveWaveform::TanhCosine { omega_l, .. } => {
                let half = std::f64::consts::PI / omega_l;
                (half, half)
            }
            DriveWaveform::AsymmetricSquare { dt1, dt2 } => (dt1, dt2),
        };
        let mut p = MapParams {
            omega1,
            omega2,
            dt1,
            dt2,
            gamma_down1: 0.0,
            gamma_sigma1: 0.0,
            gamma_down2: 0.0,
            gamma_sigma2: 0.0,
        };
        for bath in baths {
            let r2 = rates_for(model.omega0(), model.g(), 0.0, bath);
            p.gamma_down2 += r2.gamma_down;
            p.gamma_sigma2 += r2.gamma_sigma;
            let r1 = rates_for(model.omega0(), model.g(), 2.0, bath);
            p.gamma_down1 += r1.gamma_down;
            p.gamma_sigma1 += r1.gamma_sigma;
        }
        p
    }

    /// η = √(1 − ω₂²/ω₁²).
    pub fn eta(&self) -> f64 {
        (1.0 - (self.omega2 * self.omega2) / (self.omega1 * self.omega1)).sqrt()
    }

    /// Largest Γ^Σ·δt of the two thermal legs; the map linearizes the
    /// dissipative factors, so validity needs this ≪ 1.
    pub fn linearization_parameter(&self) -> f64 {
        (self.gamma_sigma1 * self.dt1).max(self.gamma_sigma2 * self.dt2)
    }
}

/// Thermal legs come in two flavors: first-order (linearized) factors
/// (1 − Γ^Σδt/2 on coherences, first order in δt on D) or exact exponential
/// relaxation. The linearized form is the default and the one the
/// acceptance data uses; the exponential form extends validity at large
/// Γ^Σδt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LegForm {
    #[default]
    Linearized,
    Exponential,
}

/// Which leg of the cycle an affine propagator represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegKind {
    /// p → q, thermalization at gap ω₂.
    Thermal2,
    /// q → r, sudden basis rotation into the high-gap frame.
    SuddenUp,
    /// r → s, thermalization at gap ω₁.
    Thermal1,
    /// s → p, sudden rotation back.
    SuddenDown,
}

/// Affine transform x ← M·x + b on x = (D, R, I).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPropagator {
    pub kind: LegKind,
    pub matrix: [[f64; 3]; 3],
    pub offset: [f64; 3],
}

impl LegPropagator {
    pub fn apply(&self, x: BlochState) -> BlochState {
        let v = x.as_array();
        let mut out = self.offset;
        for (row, m_row) in out.iter_mut().zip(self.matrix.iter()) {
            for (m, xv) in m_row.iter().zip(v.iter()) {
                *row += m * xv;
            }
        }
        BlochState::from_array(out)
    }

    fn thermal(
        kind: LegKind,
        omega: f64,
        dt: f64,
        gamma_down: f64,
        gamma_sigma: f64,
        form: LegForm,
    ) -> Self {
        let (c, s) = ((omega * dt).cos(), (omega * dt).sin());
        let (d_decay, coh_decay, d_offset) = match form {
            LegForm::Linearized => (
                1.0 - gamma_sigma * dt,
                1.0 - 0.5 * gamma_sigma * dt,
                (gamma_down - 0.5 * gamma_sigma) * dt,
            ),
            LegForm::Exponential => {
                let e = (-gamma_sigma * dt).exp();
                let d_inf = if gamma_sigma > 0.0 {
                    (2.0 * gamma_down - gamma_sigma) / (2.0 * gamma_sigma)
                } else {
                    0.0
                };
                (e, (-0.5 * gamma_sigma * dt).exp(), d_inf * (1.0 - e))
            }
        };
        LegPropagator {
            kind,
            matrix: [
                [d_decay, 0.0, 0.0],
                [0.0, c * coh_decay, -s * coh_decay],
                [0.0, s * coh_decay, c * coh_decay],
            ],
            offset: [d_offset, 0.0, 0.0],
        }
    }

    fn sudden(kind: LegKind, eta: f64) -> Self {
        let ce = (1.0 - eta * eta).sqrt();
        // SuddenUp mixes with -eta on R into D; SuddenDown with +eta.
        let s = match kind {
            LegKind::SuddenUp => eta,
            _ => -eta,
        };
        LegPropagator {
            kind,
            matrix: [[ce, -s, 0.0], [s, ce, 0.0], [0.0, 0.0, 1.0]],
            offset: [0.0; 3],
        }
    }
}

/// Warning that the linearized thermal legs are outside their comfort zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityWarning {
    pub gamma_sigma1_dt1: f64,
    pub gamma_sigma2_dt2: f64,
}

/// The four leg propagators in cycle order p→q→r→s→p, plus a validity
/// warning when Γ^Σ·δt exceeds 0.1 on either branch.
pub fn build_leg_propagators(
    params: &MapParams,
    form: LegForm,
) -> ([LegPropagator; 4], Option<ValidityWarning>) {
    let eta = params.eta();
    let legs = [
        LegPropagator::thermal(
            LegKind::Thermal2,
            params.omega2,
            params.dt2,
            params.gamma_down2,
            params.gamma_sigma2,
            form,
        ),
        LegPropagator::sudden(LegKind::SuddenUp, eta),
        LegPropagator::thermal(
            LegKind::Thermal1,
            params.omega1,
            params.dt1,
            params.gamma_down1,
            params.gamma_sigma1,
            form,
        ),
        LegPropagator::sudden(LegKind::SuddenDown, eta),
    ];
    let g1 = params.gamma_sigma1 * params.dt1;
    let g2 = params.gamma_sigma2 * params.dt2;
    let warning = (g1 > 0.1 || g2 > 0.1).then_some(ValidityWarning {
        gamma_sigma1_dt1: g1,
        gamma_sigma2_dt2: g2,
    });
    (legs, warning)
}

/// The steady-state corner states of the cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerStates {
    pub p: BlochState,
    pub q: BlochState,
    pub r: BlochState,
    pub s: BlochState,
}

impl CornerStates {
    pub fn corner(&self, kind: LegKind) -> (BlochState, BlochState) {
        match kind {
            LegKind::Thermal2 => (self.p, self.q),
            LegKind::SuddenUp => (self.q, self.r),
            LegKind::Thermal1 => (self.r, self.s),
            LegKind::SuddenDown => (self.s, self.p),
        }
    }
}

/// Exact fixed point of the composite cycle map by direct 3×3 linear solve
/// of (I − M)x = b.
///
/// Fails with [`AnalyticError::SingularMap`] when the composite map is not a
/// contraction (all thermal rates zero: the composite is orthogonal and
/// I − M is singular along its rotation axis).
pub fn steady_state_fixed_point(
    params: &MapParams,
    form: LegForm,
) -> Result<CornerStates, AnalyticError> {
    let (legs, _) = build_leg_propagators(params, form);
    // composite affine map starting and ending at p
    let mut m = [[0.0f64; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut b = [0.0f64; 3];
    for leg in &legs {
        let mut m_next = [[0.0f64; 3]; 3];
        let mut b_next = leg.offset;
        for i in 0..3 {
            for k in 0..3 {
                b_next[i] += leg.matrix[i][k] * b[k];
                for j in 0..3 {
                    m_next[i][j] += leg.matrix[i][k] * m[k][j];
                }
            }
        }
        m = m_next;
        b = b_next;
    }
    // solve (I - M) x = b by Gaussian elimination with partial pivoting
    let mut a = [[0.0f64; 4]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = (if i == j { 1.0 } else { 0.0 }) - m[i][j];
        }
        a[i][3] = b[i];
    }
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 {
            return Err(AnalyticError::SingularMap);
        }
        a.swap(col, pivot_row);
        let pivot = a[col];
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / pivot[col];
            for (x, p) in row.iter_mut().zip(pivot.iter()).skip(col) {
                *x -= f * p;
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut acc = a[i][3];
        for j in i + 1..3 {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    let p = BlochState::from_array(x);
    let q = legs[0].apply(p);
    let r = legs[1].apply(q);
    let s = legs[2].apply(r);
    Ok(CornerStates { p, q, r, s })
}

fn require_symmetric_single_bath(params: &MapParams) -> Result<f64, AnalyticError> {
    let dt = params.dt1;
    if ((params.dt1 - params.dt2) / params.dt1).abs() > 1e-9 {
        return Err(AnalyticError::Domain(format!(
            "closed forms need symmetric legs, got dt1 = {} ns, dt2 = {} ns",
            params.dt1, params.dt2
        )));
    }
    if params.gamma_down1 != 0.0 || params.gamma_sigma1 != 0.0 {
        return Err(AnalyticError::Domain(
            "closed forms need zero branch-1 rates".into(),
        ));
    }
    if params.gamma_sigma2 * dt > 0.5 {
        return Err(AnalyticError::Domain(format!(
            "closed forms are first order in Gamma_Sigma2*dt; got {}",
            params.gamma_sigma2 * dt
        )));
    }
    Ok(dt)
}

fn closed_form_denominator(params: &MapParams, dt: f64) -> f64 {
    let (w1, w2) = (params.omega1, params.omega2);
    let k = 2.0 * (w1 * w1 - w2 * w2) * (w2 * dt).cos()
        + (w1 - w2) * (w1 - w2) * ((w1 - w2) * dt).cos();
    4.0 * w1 * w1 - (w1 + w2) * (w1 + w2) * ((w1 + w2) * dt).cos() - k
}

/// Closed-form cycle power for Γ₁ = 0 and symmetric legs, in watts.
/// Zero at δt = 2nπ/ω₁ and for ω₁ = ω₂.
pub fn closed_form_power(params: &MapParams) -> Result<f64, AnalyticError> {
    let dt = require_symmetric_single_bath(params)?;
    let (w1, w2) = (params.omega1, params.omega2);
    let num = w2
        * (2.0 * params.gamma_down2 - params.gamma_sigma2)
        * (1.0 - (w1 * dt).cos())
        * (w1 * w1 - w2 * w2);
    Ok(power_to_watts(
        num / (2.0 * closed_form_denominator(params, dt)),
    ))
}

/// Closed-form steady-state excited occupation at corner p for Γ₁ = 0 and
/// symmetric legs. Equals Γ↑₂/Γ^Σ₂ at δt = 2nπ/ω₁ (the classical limit)
/// and 1/2 for an infinite-temperature bath.
pub fn closed_form_excitation(params: &MapParams) -> Result<f64, AnalyticError> {
    let dt = require_symmetric_single_bath(params)?;
    let (w1, w2) = (params.omega1, params.omega2);
    let bracket = w1 * (w1 * dt / 2.0).cos() * (w2 * dt / 2.0).sin()
        + w2 * (w2 * dt / 2.0).cos() * (w1 * dt / 2.0).sin();
    let frac = 4.0 * bracket * bracket / closed_form_denominator(params, dt);
    Ok(0.5 - (2.0 * params.gamma_down2 - params.gamma_sigma2) / params.gamma_sigma2 * frac)
}

/// Purity bookkeeping across the four legs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityAudit {
    /// R² + I² + D² at p, q, r, s.
    pub at_corners: [f64; 4],
    /// Change along p→q, q→r, r→s, s→p. The sudden legs (indices 1 and 3)
    /// are orthogonal and must show exactly zero change.
    pub leg_changes: [f64; 4],
}

/// Per-leg purity changes of a converged cycle.
pub fn purity_audit(corners: &CornerStates) -> PurityAudit {
    let at = [
        corners.p.purity_radius_sq(),
        corners.q.purity_radius_sq(),
        corners.r.purity_radius_sq(),
        corners.s.purity_radius_sq(),
    ];
    PurityAudit {
        at_corners: at,
        leg_changes: [at[1] - at[0], at[2] - at[1], at[3] - at[2], at[0] - at[3]],
    }
}

/// Per-bath and total power from the corner populations:
/// P₂ = ΔE₂(D_q − D_p)·ω_L/2π, P₁ = ΔE₁(D_s − D_r)·ω_L/2π. Watts.
pub fn map_power(params: &MapParams, corners: &CornerStates) -> (f64, f64, f64) {
    let omega_l_over_2pi = 1.0 / (params.dt1 + params.dt2);
    let p2 = params.omega2 * (corners.q.d - corners.p.d) * omega_l_over_2pi;
    let p1 = params.omega1 * (corners.s.d - corners.r.d) * omega_l_over_2pi;
    (
        power_to_watts(p1 + p2),
        power_to_watts(p1),
        power_to_watts(p2),
    )
}
