//! Numeric integration of the time-dependent master equation to a
//! steady-state cycle.
//!
//! The density matrix is propagated in the fixed lab basis (σ_z eigenbasis)
//! as four real numbers (ρ₀₀, ρ₁₁, Re ρ₀₁, Im ρ₀₁). Jump operators are
//! rebuilt in the instantaneous eigenbasis of H(t) at every step (adiabatic
//! dissipator convention). The master equation is linear in those four
//! components, so each time step applies precomputed 4×4 generator tables;
//! a cycle map is iterated from the instantaneous thermal state until the
//! cycle-start state stops moving.

use num_complex::Complex64;

use crate::analytic::BlochState;
use crate::dissipation::{rates_for, BathCoupling, RateSet};
use crate::error::SimError;
use crate::model::{DriveWaveform, QubitDriveModel};
use crate::units::{energy_to_joules, power_to_watts, thermal_ratio};

/// 2×2 Hermitian density matrix in the lab (σ_z) basis, stored as two
/// populations and one complex off-diagonal ρ₀₁ = ⟨0|ρ|1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub rho00: f64,
    pub rho11: f64,
    pub re01: f64,
    pub im01: f64,
}

impl DensityMatrix {
    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            rho00: 0.5,
            rho11: 0.5,
            re01: 0.0,
            im01: 0.0,
        }
    }

    /// Thermal state of the instantaneous Hamiltonian H(t) at temperature
    /// `t_kelvin`.
    pub fn thermal(model: &QubitDriveModel, t_kelvin: f64, t: f64) -> Self {
        let (omega, theta) = instantaneous_eigenbasis(model, t);
        let boltz = (-thermal_ratio(omega, t_kelvin)).exp();
        let rho_ee = boltz / (1.0 + boltz);
        Self::from_eigen_populations(theta, rho_ee)
    }

    /// Pure ground state of H(t).
    pub fn ground_state(model: &QubitDriveModel, t: f64) -> Self {
        let (_, theta) = instantaneous_eigenbasis(model, t);
        Self::from_eigen_populations(theta, 0.0)
    }

    fn from_eigen_populations(theta: f64, rho_ee: f64) -> Self {
        let (g, e) = eigenvectors(theta);
        let rho_gg = 1.0 - rho_ee;
        DensityMatrix {
            rho00: rho_gg * g[0] * g[0] + rho_ee * e[0] * e[0],
            rho11: rho_gg * g[1] * g[1] + rho_ee * e[1] * e[1],
            re01: rho_gg * g[0] * g[1] + rho_ee * e[0] * e[1],
            im01: 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.rho00 * self.rho00
            + self.rho11 * self.rho11
            + 2.0 * (self.re01 * self.re01 + self.im01 * self.im01)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.rho00 + self.rho11);
        let half_gap = 0.5 * (self.rho00 - self.rho11);
        mean - (half_gap * half_gap + self.re01 * self.re01 + self.im01 * self.im01).sqrt()
    }

    /// Raw Pauli expectations (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩).
    pub fn pauli_expectations(&self) -> [f64; 3] {
        [2.0 * self.re01, -2.0 * self.im01, self.rho00 - self.rho11]
    }

    /// Lab-frame Bloch vector in the presentation frame (−⟨σ_x⟩, ⟨σ_y⟩,
    /// −⟨σ_z⟩), a π rotation about y chosen so the undriven ground state
    /// sits at +x.
    pub fn bloch_lab(&self) -> [f64; 3] {
        let [sx, sy, sz] = self.pauli_expectations();
        [-sx, sy, -sz]
    }

    /// Components (D, R, I) in the eigenbasis with mixing angle `theta`.
    pub fn in_eigenbasis(&self, theta: f64) -> BlochState {
        let (g, e) = eigenvectors(theta);
        let rho_ee =
            e[0] * e[0] * self.rho00 + e[1] * e[1] * self.rho11 + 2.0 * e[0] * e[1] * self.re01;
        let r = g[0] * e[0] * self.rho00
            + g[1] * e[1] * self.rho11
            + (g[0] * e[1] + g[1] * e[0]) * self.re01;
        let i = (g[0] * e[1] - g[1] * e[0]) * self.im01;
        BlochState::new(0.5 - rho_ee, r, i)
    }

    fn as_vec(&self) -> [f64; 4] {
        [self.rho00, self.rho11, self.re01, self.im01]
    }

    fn from_vec(x: [f64; 4]) -> Self {
        DensityMatrix {
            rho00: x[0],
            rho11: x[1],
            re01: x[2],
            im01: x[3],
        }
    }
}

/// Gap ω(t) and eigenbasis mixing angle θ(t) of H(t), with
/// sin θ = gΩ/√(g²Ω²+ω₀²).
pub fn instantaneous_eigenbasis(model: &QubitDriveModel, t: f64) -> (f64, f64) {
    let g_om = model.g() * model.waveform_value(t);
    let omega0 = model.omega0();
    ((g_om * g_om + omega0 * omega0).sqrt(), g_om.atan2(omega0))
}

/// Real ground and excited eigenvectors of H at mixing angle θ, in the lab
/// basis. The phase convention is pinned by the analytic map: a sudden
/// change θ_a → θ_b transforms (D, R) by a rotation with sin δ = −(θ_b −
/// θ_a) mixing on R into D, matching the square-wave cycle legs.
pub fn eigenvectors(theta: f64) -> ([f64; 2], [f64; 2]) {
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    (
        [(c - s) * inv_sqrt2, -(c + s) * inv_sqrt2],
        [(c + s) * inv_sqrt2, (c - s) * inv_sqrt2],
    )
}

type M2 = [[Complex64; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[Complex64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn m2_from_outer(u: &[f64; 2], v: &[f64; 2]) -> M2 {
    let mut out = [[Complex64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = Complex64::new(u[i] * v[j], 0.0);
        }
    }
    out
}

fn m2_rho(x: &[f64; 4]) -> M2 {
    [
        [Complex64::new(x[0], 0.0), Complex64::new(x[2], x[3])],
        [Complex64::new(x[2], -x[3]), Complex64::new(x[1], 0.0)],
    ]
}

/// D[L]ρ = LρL† − ½{L†L, ρ} for a real jump operator L.
fn dissipator_term(l: &M2, rho: &M2) -> M2 {
    let l_dag: M2 = [[l[0][0], l[1][0]], [l[0][1], l[1][1]]];
    let l_rho_ldag = m2_mul(&m2_mul(l, rho), &l_dag);
    let ldl = m2_mul(&l_dag, l);
    let anti = m2_mul(&ldl, rho);
    let anti2 = m2_mul(rho, &ldl);
    let mut out = [[Complex64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = l_rho_ldag[i][j] - 0.5 * (anti[i][j] + anti2[i][j]);
        }
    }
    out
}

/// Full Lindblad right-hand side at drive value Ω: commutator with H plus
/// the per-bath dissipators built in the instantaneous eigenbasis.
fn rhs_at_drive_value(
    omega0: f64,
    g: f64,
    drive_value: f64,
    bath_rates: &[RateSet],
    theta: f64,
    x: &[f64; 4],
) -> [f64; 4] {
    let rho = m2_rho(x);
    let hz = 0.5 * g * drive_value;
    let hx = 0.5 * omega0;
    let h: M2 = [
        [Complex64::new(hz, 0.0), Complex64::new(hx, 0.0)],
        [Complex64::new(hx, 0.0), Complex64::new(-hz, 0.0)],
    ];
    let h_rho = m2_mul(&h, &rho);
    let rho_h = m2_mul(&rho, &h);
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = [[Complex64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = minus_i * (h_rho[i][j] - rho_h[i][j]);
        }
    }
    let (gv, ev) = eigenvectors(theta);
    let sigma_minus = m2_from_outer(&gv, &ev);
    let sigma_plus = m2_from_outer(&ev, &gv);
    let mut sigma_z_eig = [[Complex64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            sigma_z_eig[i][j] = Complex64::new(ev[i] * ev[j] - gv[i] * gv[j], 0.0);
        }
    }
    for rates in bath_rates {
        if rates.gamma_down > 0.0 || rates.gamma_up > 0.0 {
            let down = dissipator_term(&sigma_minus, &rho);
            let up = dissipator_term(&sigma_plus, &rho);
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += rates.gamma_down * down[i][j] + rates.gamma_up * up[i][j];
                }
            }
        }
        if rates.gamma_phi > 0.0 {
            let z_rho_z = m2_mul(&m2_mul(&sigma_z_eig, &rho), &sigma_z_eig);
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += rates.gamma_phi * (z_rho_z[i][j] - rho[i][j]);
                }
            }
        }
    }
    [out[0][0].re, out[1][1].re, out[0][1].re, out[0][1].im]
}

fn drive_rates(model: &QubitDriveModel, baths: &[BathCoupling], drive_value: f64) -> Vec<RateSet> {
    baths
        .iter()
        .map(|b| rates_for(model.omega0(), model.g(), drive_value, b))
        .collect()
}

/// dρ/dt at time `t`: −i[H(t), ρ] + Σ_baths (Lρ + L^φρ), as
/// [dρ₀₀, dρ₁₁, dRe ρ₀₁, dIm ρ₀₁]. Trace-free by construction.
pub fn master_equation_rhs(
    model: &QubitDriveModel,
    baths: &[BathCoupling],
    rho: &DensityMatrix,
    t: f64,
) -> [f64; 4] {
    let drive_value = model.waveform_value(t);
    let (_, theta) = instantaneous_eigenbasis(model, t);
    let rates = drive_rates(model, baths, drive_value);
    rhs_at_drive_value(
        model.omega0(),
        model.g(),
        drive_value,
        &rates,
        theta,
        &rho.as_vec(),
    )
}

/// Heat flow into `bath` at time `t` and state `rho`, internal units
/// (rad/ns per ns): ΔE(t)·(Γ↓ρ_ee − Γ↑ρ_gg) in the instantaneous eigenbasis.
/// Positive when the qubit dumps energy. Pure dephasing carries no energy.
pub fn bath_heat_rate(
    model: &QubitDriveModel,
    bath: &BathCoupling,
    rho: &DensityMatrix,
    t: f64,
) -> f64 {
    let (omega, theta) = instantaneous_eigenbasis(model, t);
    let rates = rates_for(model.omega0(), model.g(), model.waveform_value(t), bath);
    heat_rate_internal(omega, theta, &rates, &rho.as_vec())
}

fn heat_rate_internal(omega: f64, theta: f64, rates: &RateSet, x: &[f64; 4]) -> f64 {
    let (gv, ev) = eigenvectors(theta);
    let rho_ee = ev[0] * ev[0] * x[0] + ev[1] * ev[1] * x[1] + 2.0 * ev[0] * ev[1] * x[2];
    let rho_gg = gv[0] * gv[0] * x[0] + gv[1] * gv[1] * x[1] + 2.0 * gv[0] * gv[1] * x[2];
    omega * (rates.gamma_down * rho_ee - rates.gamma_up * rho_gg)
}

/// Fixed-step integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// RK4 steps per drive period (≥ 256).
    pub steps_per_cycle: usize,
    /// Convergence tolerance on the max-abs change of the four state
    /// components at cycle start; in (0, 1e-4].
    pub convergence_tol: f64,
    pub max_cycles: usize,
    /// Store every n-th step in the returned trajectory.
    pub sample_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            steps_per_cycle: 4096,
            convergence_tol: 1e-10,
            max_cycles: 20_000,
            sample_stride: 4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let mut problems = Vec::new();
        if self.steps_per_cycle < 256 {
            problems.push(format!(
                "steps_per_cycle must be >= 256, got {}",
                self.steps_per_cycle
            ));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol <= 1e-4) {
            problems.push(format!(
                "convergence_tol must be in (0, 1e-4], got {}",
                self.convergence_tol
            ));
        }
        if self.max_cycles < 1 {
            problems.push("max_cycles must be >= 1".into());
        }
        if self.sample_stride == 0 || !self.steps_per_cycle.is_multiple_of(self.sample_stride) {
            problems.push(format!(
                "sample_stride must divide steps_per_cycle, got {} / {}",
                self.sample_stride, self.steps_per_cycle
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(problems.join("; ")))
        }
    }
}

/// One stored point of the converged cycle.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t_ns: f64,
    pub rho: DensityMatrix,
    /// (D, R, I) in the instantaneous eigenbasis. At square-wave switching
    /// instants two samples share the time, one per adjacent leg basis.
    pub bloch: BlochState,
}

/// A converged steady-state cycle with observables attached.
#[derive(Debug, Clone)]
pub struct CycleSolution {
    pub trajectory: Vec<TrajectorySample>,
    /// Heat dissipated into each bath over one cycle, J.
    pub heats_j: Vec<f64>,
    /// Cycle-averaged power into each bath, W.
    pub powers_w: Vec<f64>,
    pub power_total_w: f64,
    /// Work done on the qubit by the drive over one cycle, J.
    pub work_j: f64,
    pub cycles_to_converge: usize,
    pub converged: bool,
    /// Cycle-start residual per iteration.
    pub residual_history: Vec<f64>,
    /// Drive period, ns.
    pub period_ns: f64,
    /// Per-bath heat rates at each trajectory sample, internal units
    /// (bath-major).
    pub heat_rate_samples: Vec<Vec<f64>>,
    /// d(work)/dt at each trajectory sample, internal units. Square-wave
    /// switch work is carried separately in `switch_work_j`.
    pub work_rate_samples: Vec<f64>,
    /// Work injected at the two square-wave switches, J (zero for smooth
    /// drives).
    pub switch_work_j: f64,
}

impl CycleSolution {
    /// |work − Σ heats| / max|·|: first-law residual of the converged cycle.
    pub fn first_law_residual(&self) -> f64 {
        let q: f64 = self.heats_j.iter().sum();
        (self.work_j - q).abs() / q.abs().max(self.work_j.abs()).max(f64::MIN_POSITIVE)
    }

    /// Smallest Tr ρ² along the stored trajectory.
    pub fn purity_min(&self) -> f64 {
        self.trajectory
            .iter()
            .map(|s| s.rho.purity())
            .fold(f64::INFINITY, f64::min)
    }
}

type Gen4 = [[f64; 4]; 4];

fn gen_matvec(a: &Gen4, x: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(a.iter()) {
        *o = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    out
}

/// Build the 4×4 real generator at a fixed drive value by applying the
/// Lindblad right-hand side to the four Hermitian basis matrices.
fn build_generator(model: &QubitDriveModel, baths: &[BathCoupling], drive_value: f64) -> Gen4 {
    let theta = (model.g() * drive_value).atan2(model.omega0());
    let rates = drive_rates(model, baths, drive_value);
    let basis: [[f64; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let mut a = [[0.0; 4]; 4];
    for (col, e) in basis.iter().enumerate() {
        let d = rhs_at_drive_value(model.omega0(), model.g(), drive_value, &rates, theta, e);
        for row in 0..4 {
            a[row][col] = d[row];
        }
    }
    a
}

/// One leg of the integration scheme: uniform RK4 steps under a generator
/// table (odd indices are half-step times).
struct Leg {
    /// 2·steps + 1 generators at t₀ + k·h/2.
    table: Vec<Gen4>,
    h: f64,
    steps: usize,
    t0: f64,
    /// Drive value used for sample bookkeeping on this leg (square waves),
    /// None for smooth legs.
    frozen_drive: Option<f64>,
}

struct CyclePropagator<'a> {
    model: &'a QubitDriveModel,
    baths: &'a [BathCoupling],
    legs: Vec<Leg>,
    period: f64,
}

impl<'a> CyclePropagator<'a> {
    fn new(model: &'a QubitDriveModel, baths: &'a [BathCoupling], cfg: &IntegratorConfig) -> Self {
        let period = model.drive().period();
        let legs = match *model.drive() {
            DriveWaveform::TanhCosine { .. } => {
                let steps = cfg.steps_per_cycle;
                let h = period / steps as f64;
                let table = (0..=2 * steps)
                    .map(|k| {
                        let t = 0.5 * h * k as f64;
                        build_generator(model, baths, model.waveform_value(t))
                    })
                    .collect();
                vec![Leg {
                    table,
                    h,
                    steps,
                    t0: 0.0,
                    frozen_drive: None,
                }]
            }
            DriveWaveform::AsymmetricSquare { dt1, dt2 } => {
                // split exactly at the switching instants; the sudden basis
                // change needs no action on the lab-frame state
                let n2 = ((cfg.steps_per_cycle as f64 * dt2 / period).round() as usize).max(64);
                let n1 = (cfg.steps_per_cycle.saturating_sub(n2)).max(64);
                let low = Leg {
                    table: vec![build_generator(model, baths, 0.0)],
                    h: dt2 / n2 as f64,
                    steps: n2,
                    t0: 0.0,
                    frozen_drive: Some(0.0),
                };
                let high = Leg {
                    table: vec![build_generator(model, baths, 2.0)],
                    h: dt1 / n1 as f64,
                    steps: n1,
                    t0: dt2,
                    frozen_drive: Some(2.0),
                };
                vec![low, high]
            }
        };
        CyclePropagator {
            model,
            baths,
            legs,
            period,
        }
    }

    /// Advance the state over one full cycle.
    fn run_cycle(&self, x: &mut [f64; 4]) {
        for leg in &self.legs {
            let constant = leg.table.len() == 1;
            for k in 0..leg.steps {
                let (a0, a1, a2) = if constant {
                    (&leg.table[0], &leg.table[0], &leg.table[0])
                } else {
                    (
                        &leg.table[2 * k],
                        &leg.table[2 * k + 1],
                        &leg.table[2 * k + 2],
                    )
                };
                rk4_step(a0, a1, a2, leg.h, x);
            }
        }
    }

    /// Final pass: advance one cycle while collecting samples, heats, work.
    fn run_cycle_collect(
        &self,
        x: &mut [f64; 4],
        cfg: &IntegratorConfig,
    ) -> Result<CollectedCycle, SimError> {
        let n_baths = self.baths.len();
        let mut out = CollectedCycle {
            samples: Vec::new(),
            heat_rates: vec![Vec::new(); n_baths],
            work_rates: Vec::new(),
            heats: vec![0.0; n_baths],
            work: 0.0,
            switch_work: 0.0,
        };
        let mut prev_heat = vec![0.0; n_baths];
        let mut prev_work = 0.0;
        for (leg_idx, leg) in self.legs.iter().enumerate() {
            let constant = leg.table.len() == 1;
            if self.legs.len() == 2 {
                // square-wave switch into this leg: H jumps while rho is
                // fixed; the jump does work (g ΔΩ/2)·⟨σ_z⟩ on the qubit
                let from = if leg_idx == 0 { 2.0 } else { 0.0 };
                let to = leg.frozen_drive.unwrap_or(from);
                out.switch_work += 0.5 * self.model.g() * (to - from) * (x[0] - x[1]);
            }
            self.bookkeep(leg, 0, x, &mut out, &mut prev_heat, &mut prev_work, true)?;
            for k in 0..leg.steps {
                let (a0, a1, a2) = if constant {
                    (&leg.table[0], &leg.table[0], &leg.table[0])
                } else {
                    (
                        &leg.table[2 * k],
                        &leg.table[2 * k + 1],
                        &leg.table[2 * k + 2],
                    )
                };
                rk4_step(a0, a1, a2, leg.h, x);
                let store = (k + 1) % cfg.sample_stride == 0 || k + 1 == leg.steps;
                self.bookkeep(
                    leg,
                    k + 1,
                    x,
                    &mut out,
                    &mut prev_heat,
                    &mut prev_work,
                    store,
                )?;
            }
        }
        Ok(out)
    }

    /// Accumulate quadratures at a step boundary; optionally store a sample.
    #[allow(clippy::too_many_arguments)]
    fn bookkeep(
        &self,
        leg: &Leg,
        step: usize,
        x: &[f64; 4],
        out: &mut CollectedCycle,
        prev_heat: &mut [f64],
        prev_work: &mut f64,
        store_sample: bool,
    ) -> Result<(), SimError> {
        let t = leg.t0 + leg.h * step as f64;
        let drive_value = leg
            .frozen_drive
            .unwrap_or_else(|| self.model.waveform_value(t));
        let g_om = self.model.g() * drive_value;
        let omega0 = self.model.omega0();
        let omega = (g_om * g_om + omega0 * omega0).sqrt();
        let theta = g_om.atan2(omega0);
        let work_rate = if leg.frozen_drive.is_some() {
            0.0
        } else {
            0.5 * self.model.g() * self.model.drive().derivative(t) * (x[0] - x[1])
        };
        let mut heat = vec![0.0; self.baths.len()];
        for (b, bath) in self.baths.iter().enumerate() {
            let rates = rates_for(omega0, self.model.g(), drive_value, bath);
            heat[b] = heat_rate_internal(omega, theta, &rates, x);
        }
        if step > 0 {
            for b in 0..heat.len() {
                out.heats[b] += 0.5 * leg.h * (prev_heat[b] + heat[b]);
            }
            out.work += 0.5 * leg.h * (*prev_work + work_rate);
        }
        prev_heat.copy_from_slice(&heat);
        *prev_work = work_rate;
        if store_sample {
            let rho = DensityMatrix::from_vec(*x);
            let min_eig = rho.min_eigenvalue();
            if min_eig < -1e-6 {
                return Err(SimError::StepUnstable {
                    t_ns: t,
                    min_eigenvalue: min_eig,
                });
            }
            out.samples.push(TrajectorySample {
                t_ns: t,
                rho,
                bloch: rho.in_eigenbasis(theta),
            });
            for (b, h) in heat.iter().enumerate() {
                out.heat_rates[b].push(*h);
            }
            out.work_rates.push(work_rate);
        }
        Ok(())
    }
}

struct CollectedCycle {
    samples: Vec<TrajectorySample>,
    heat_rates: Vec<Vec<f64>>,
    work_rates: Vec<f64>,
    heats: Vec<f64>,
    work: f64,
    switch_work: f64,
}

fn rk4_step(a0: &Gen4, a_half: &Gen4, a1: &Gen4, h: f64, x: &mut [f64; 4]) {
    let k1 = gen_matvec(a0, x);
    let mut tmp = [0.0; 4];
    for i in 0..4 {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    let k2 = gen_matvec(a_half, &tmp);
    for i in 0..4 {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    let k3 = gen_matvec(a_half, &tmp);
    for i in 0..4 {
        tmp[i] = x[i] + h * k3[i];
    }
    let k4 = gen_matvec(a1, &tmp);
    for i in 0..4 {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Propagate `rho0` over one drive period.
pub fn evolve_one_cycle(
    model: &QubitDriveModel,
    baths: &[BathCoupling],
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix, SimError> {
    cfg.validate()?;
    let prop = CyclePropagator::new(model, baths, cfg);
    let mut x = rho0.as_vec();
    prop.run_cycle(&mut x);
    let rho = DensityMatrix::from_vec(x);
    let min_eig = rho.min_eigenvalue();
    if min_eig < -1e-6 {
        return Err(SimError::StepUnstable {
            t_ns: model.drive().period(),
            min_eigenvalue: min_eig,
        });
    }
    Ok(rho)
}

/// Iterate the cycle map from the instantaneous thermal state until the
/// cycle-start state stops moving, then collect the converged cycle.
///
/// Iteration proceeds to half of `convergence_tol` (the max-abs cycle map
/// of a damped rotation can amplify a residual by up to √2), so the
/// returned trajectory closes within `convergence_tol`. The starting
/// temperature is that of the first bath acting at t = 0 (first bath
/// overall as fallback). Fails with `NotConverged` when `max_cycles` is
/// exhausted, e.g. for near-unitary dynamics.
pub fn find_steady_cycle(
    model: &QubitDriveModel,
    baths: &[BathCoupling],
    cfg: &IntegratorConfig,
) -> Result<CycleSolution, SimError> {
    cfg.validate()?;
    if baths.is_empty() {
        // purely unitary dynamics has no unique steady cycle
        return Err(SimError::NotConverged {
            cycles: 0,
            residual: f64::INFINITY,
        });
    }
    let prop = CyclePropagator::new(model, baths, cfg);
    let drive0 = model.waveform_value(0.0);
    let t_start = baths
        .iter()
        .find(|b| b.acts_on(drive0))
        .or_else(|| baths.first())
        .map(|b| b.temperature());
    let rho0 = match t_start {
        Some(t_kelvin) => DensityMatrix::thermal(model, t_kelvin, 0.0),
        None => DensityMatrix::maximally_mixed(),
    };
    let mut x = rho0.as_vec();
    let mut residual_history = Vec::new();
    let mut converged = false;
    let mut cycles = 0;
    while cycles < cfg.max_cycles {
        let prev = x;
        prop.run_cycle(&mut x);
        cycles += 1;
        let residual = prev
            .iter()
            .zip(x.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        residual_history.push(residual);
        let rho = DensityMatrix::from_vec(x);
        let min_eig = rho.min_eigenvalue();
        if min_eig < -1e-6 {
            return Err(SimError::StepUnstable {
                t_ns: cycles as f64 * prop.period,
                min_eigenvalue: min_eig,
            });
        }
        if residual < 0.5 * cfg.convergence_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SimError::NotConverged {
            cycles,
            residual: residual_history.last().copied().unwrap_or(f64::NAN),
        });
    }
    let collected = prop.run_cycle_collect(&mut x, cfg)?;
    let period = prop.period;
    let heats_j: Vec<f64> = collected
        .heats
        .iter()
        .map(|&q| energy_to_joules(q))
        .collect();
    let powers_w: Vec<f64> = collected
        .heats
        .iter()
        .map(|&q| power_to_watts(q / period))
        .collect();
    let power_total_w = powers_w.iter().sum();
    let work_internal = collected.work + collected.switch_work;
    Ok(CycleSolution {
        trajectory: collected.samples,
        heats_j,
        powers_w,
        power_total_w,
        work_j: energy_to_joules(work_internal),
        cycles_to_converge: cycles,
        converged: true,
        residual_history,
        period_ns: period,
        heat_rate_samples: collected.heat_rates,
        work_rate_samples: collected.work_rates,
        switch_work_j: energy_to_joules(collected.switch_work),
    })
}
