//! Physical outputs of converged cycles: exact cycle power, Bloch
//! trajectories and winding numbers, peak detection, and cooling windows.

use crate::analytic::BlochState;
use crate::dissipation::BathCoupling;
use crate::error::{ObservablesError, SimError};
use crate::lindblad::{bath_heat_rate, find_steady_cycle, CycleSolution, IntegratorConfig};
use crate::model::{PeakPrediction, QubitDriveModel};
use crate::units::power_to_watts;

/// One sweep-grid point of a power spectrum. Powers are stored in the CSV
/// unit (fW) so that writing and re-reading rows is bit-exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrumPoint {
    /// Drive frequency, GHz.
    pub f_l_ghz: f64,
    /// High-gap leg duration for square-wave sweeps, ns.
    pub dt1_ns: Option<f64>,
    pub p_total_fw: Option<f64>,
    pub p1_fw: Option<f64>,
    pub p2_fw: Option<f64>,
    /// P·2π/(ħω₀ω_L), unit-free.
    pub p_dimensionless: Option<f64>,
    /// Excited-state occupation at the cycle start (corner p).
    pub rho_ee_p: Option<f64>,
    pub winding: Option<i32>,
    /// Smallest Tr ρ² along the cycle.
    pub purity_min: Option<f64>,
    pub converged: bool,
    /// Cycles to convergence (or the cycle budget when unconverged).
    pub cycles: usize,
}

/// A located spectrum maximum matched to a prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub n: u32,
    pub f_at_max_ghz: f64,
    pub p_at_max_fw: f64,
    pub predicted_f_ghz: f64,
    /// |found − predicted| / predicted.
    pub relative_offset: f64,
}

/// Search outcome per prediction; `found` is None when no local maximum
/// lies within ±25% of the predicted frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakMatch {
    pub prediction: PeakPrediction,
    pub found: Option<Peak>,
}

/// Per-bath cycle powers by trapezoid quadrature of −Tr[H·Lρ] over the
/// stored trajectory samples, in watts. Heat flowing into the bath is
/// positive; for square-wave drives the duplicated switch samples carry the
/// leg-local rates on each side.
pub fn cycle_power_exact(
    model: &QubitDriveModel,
    baths: &[BathCoupling],
    cycle: &CycleSolution,
) -> Vec<f64> {
    let n = cycle.trajectory.len();
    let mut heats = vec![0.0; baths.len()];
    if n < 2 {
        return heats;
    }
    // prefer the rates stored at collection time (they know which side of a
    // switch each sample belongs to); recompute only if missing
    let stored = cycle.heat_rate_samples.len() == baths.len()
        && cycle.heat_rate_samples.iter().all(|h| h.len() == n);
    for w in 0..n - 1 {
        let (s0, s1) = (&cycle.trajectory[w], &cycle.trajectory[w + 1]);
        let dt = s1.t_ns - s0.t_ns;
        if dt <= 0.0 {
            continue; // duplicated switch sample
        }
        for (b, bath) in baths.iter().enumerate() {
            let (q0, q1) = if stored {
                (
                    cycle.heat_rate_samples[b][w],
                    cycle.heat_rate_samples[b][w + 1],
                )
            } else {
                (
                    bath_heat_rate(model, bath, &s0.rho, s0.t_ns),
                    bath_heat_rate(model, bath, &s1.rho, s1.t_ns),
                )
            };
            heats[b] += 0.5 * dt * (q0 + q1);
        }
    }
    heats
        .iter()
        .map(|q| power_to_watts(q / cycle.period_ns))
        .collect()
}

/// Lab-frame (presentation axes, ground state of the undriven qubit at +x)
/// and eigenbasis-frame (2R, 2I, 2D) trajectories of a converged cycle.
pub fn bloch_trajectory(cycle: &CycleSolution) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let lab = cycle.trajectory.iter().map(|s| s.rho.bloch_lab()).collect();
    let eigen = cycle
        .trajectory
        .iter()
        .map(|s| s.bloch.bloch_vector())
        .collect();
    (lab, eigen)
}

/// Net turns of the eigenbasis coherence phasor (R, I) over one cycle.
///
/// Accumulates unwrapped angle increments and rounds the total to the
/// nearest integer; the winding equals the resonance order n at f_{L,n}.
/// Fails when the phasor magnitude is below 1e-12 on more than 10% of the
/// samples.
pub fn winding_number(cycle: &CycleSolution) -> Result<i32, ObservablesError> {
    let states: Vec<&BlochState> = cycle.trajectory.iter().map(|s| &s.bloch).collect();
    if states.is_empty() {
        return Err(ObservablesError::UndefinedWinding {
            zero_fraction: 100.0,
        });
    }
    let zero_count = states
        .iter()
        .filter(|b| (b.r * b.r + b.i * b.i).sqrt() < 1e-12)
        .count();
    let zero_fraction = 100.0 * zero_count as f64 / states.len() as f64;
    if zero_fraction > 10.0 {
        return Err(ObservablesError::UndefinedWinding { zero_fraction });
    }
    let mut total = 0.0;
    let mut prev = states[0].i.atan2(states[0].r);
    for b in &states[1..] {
        let cur = b.i.atan2(b.r);
        let mut delta = cur - prev;
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        total += delta;
        prev = cur;
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i32)
}

/// Locate spectrum maxima near each prediction: interior 3-point local
/// maxima refined by a parabolic fit, matched within ±25% of the predicted
/// frequency. The spectrum must be sorted by frequency.
pub fn find_peaks(
    spectrum: &[PowerSpectrumPoint],
    predictions: &[PeakPrediction],
) -> Vec<PeakMatch> {
    let pts: Vec<(f64, f64)> = spectrum
        .iter()
        .filter_map(|p| p.p_total_fw.map(|w| (p.f_l_ghz, w)))
        .collect();
    let mut maxima = Vec::new();
    for i in 1..pts.len().saturating_sub(1) {
        let (f0, y0) = pts[i - 1];
        let (f1, y1) = pts[i];
        let (f2, y2) = pts[i + 1];
        if y1 > y0 && y1 > y2 {
            // parabolic refinement through the three points
            let denom = y0 - 2.0 * y1 + y2;
            let (f_ref, p_ref) = if denom.abs() > 0.0 {
                let shift = 0.5 * (y0 - y2) / denom;
                let h = 0.5 * (f2 - f0);
                (f1 + shift * h, y1 - 0.25 * (y0 - y2) * shift)
            } else {
                (f1, y1)
            };
            maxima.push((f_ref, p_ref));
        }
    }
    predictions
        .iter()
        .map(|&prediction| {
            let found = maxima
                .iter()
                .filter(|(f, _)| (f - prediction.f_l_ghz).abs() <= 0.25 * prediction.f_l_ghz)
                .min_by(|a, b| {
                    (a.0 - prediction.f_l_ghz)
                        .abs()
                        .total_cmp(&(b.0 - prediction.f_l_ghz).abs())
                })
                .map(|&(f, p)| Peak {
                    n: prediction.n,
                    f_at_max_ghz: f,
                    p_at_max_fw: p,
                    predicted_f_ghz: prediction.f_l_ghz,
                    relative_offset: (f - prediction.f_l_ghz).abs() / prediction.f_l_ghz,
                });
            PeakMatch { prediction, found }
        })
        .collect()
}

/// A contiguous run of square-wave sweep points with P₂ < 0 and P₁ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingWindow {
    /// dt1 interval endpoints, ns.
    pub dt1_range: (f64, f64),
    /// Most negative P₂ inside the window, fW.
    pub min_p2_fw: f64,
}

/// Contiguous cooling windows of a dt1 sweep. Points without dt1 or without
/// converged two-bath powers never join a window.
pub fn cooling_windows(points: &[PowerSpectrumPoint]) -> Vec<CoolingWindow> {
    let mut windows = Vec::new();
    let mut current: Option<CoolingWindow> = None;
    for p in points {
        let cooling = match (p.dt1_ns, p.p1_fw, p.p2_fw) {
            (Some(_), Some(p1), Some(p2)) => p2 < 0.0 && p1 > 0.0,
            _ => false,
        };
        if cooling {
            let dt1 = p.dt1_ns.unwrap();
            let p2 = p.p2_fw.unwrap();
            current = Some(match current {
                None => CoolingWindow {
                    dt1_range: (dt1, dt1),
                    min_p2_fw: p2,
                },
                Some(w) => CoolingWindow {
                    dt1_range: (w.dt1_range.0, dt1),
                    min_p2_fw: w.min_p2_fw.min(p2),
                },
            });
        } else if let Some(w) = current.take() {
            windows.push(w);
        }
    }
    if let Some(w) = current {
        windows.push(w);
    }
    windows
}

/// Which model parameter a peak-amplitude study sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyVariable {
    /// ω₁/ω₂ via the drive amplitude g = ω₀√(r²−1)/2.
    OmegaRatio,
    /// Drive squareness a.
    Squareness,
}

/// One row of a peak-amplitude study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub variable_value: f64,
    pub n: u32,
    /// Frequency of the window maximum, GHz.
    pub f_at_max_ghz: f64,
    /// Largest total power in the window, W.
    pub p_max_w: f64,
}

/// Maximum power near each predicted resonance as one model parameter
/// varies (the odd/even peak-intensity studies).
///
/// For each parameter value and order n, scans `window_points` frequencies
/// within ±`window_frac` of the predicted f_{L,n} and records the largest
/// converged power. Unconverged points are skipped; a window with no
/// converged point at all propagates the failure.
#[allow(clippy::too_many_arguments)]
pub fn peak_amplitude_study(
    base: &QubitDriveModel,
    baths: &[BathCoupling],
    cfg: &IntegratorConfig,
    variable: StudyVariable,
    values: &[f64],
    orders: &[u32],
    window_frac: f64,
    window_points: usize,
) -> Result<Vec<StudyRow>, SimError> {
    use rayon::prelude::*;
    let mut rows = Vec::new();
    for &value in values {
        let model = apply_study_variable(base, variable, value)?;
        let n_max = orders.iter().copied().max().unwrap_or(1);
        let predictions = model.resonance_frequencies(n_max);
        for &n in orders {
            let Some(pred) = predictions.iter().find(|p| p.n == n) else {
                continue;
            };
            let freqs: Vec<f64> = (0..window_points)
                .map(|k| {
                    let x = if window_points == 1 {
                        0.0
                    } else {
                        2.0 * k as f64 / (window_points - 1) as f64 - 1.0
                    };
                    pred.f_l_ghz * (1.0 + window_frac * x)
                })
                .collect();
            let powers: Vec<Option<(f64, f64)>> = freqs
                .par_iter()
                .map(|&f| {
                    let m = model.with_drive_frequency(f).ok()?;
                    let sol = find_steady_cycle(&m, baths, cfg).ok()?;
                    Some((f, sol.power_total_w))
                })
                .collect();
            let best = powers
                .iter()
                .flatten()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .copied();
            match best {
                Some((f, p)) => rows.push(StudyRow {
                    variable_value: value,
                    n,
                    f_at_max_ghz: f,
                    p_max_w: p,
                }),
                None => {
                    return Err(SimError::NotConverged {
                        cycles: cfg.max_cycles,
                        residual: f64::NAN,
                    })
                }
            }
        }
    }
    Ok(rows)
}

fn apply_study_variable(
    base: &QubitDriveModel,
    variable: StudyVariable,
    value: f64,
) -> Result<QubitDriveModel, SimError> {
    use crate::model::DriveWaveform;
    use crate::units::rad_ns_to_ghz;
    let out = match variable {
        StudyVariable::OmegaRatio => {
            if value < 1.0 {
                return Err(SimError::InvalidConfig(format!(
                    "omega1/omega2 ratio must be >= 1, got {value}"
                )));
            }
            let omega0_ghz = rad_ns_to_ghz(base.omega0());
            let g_ghz = omega0_ghz * (value * value - 1.0).sqrt() / 2.0;
            QubitDriveModel::new(omega0_ghz, g_ghz, *base.drive())?
        }
        StudyVariable::Squareness => {
            let drive = match *base.drive() {
                DriveWaveform::TanhCosine { omega_l, .. } => {
                    DriveWaveform::TanhCosine { a: value, omega_l }
                }
                other => {
                    return Err(SimError::InvalidConfig(format!(
                        "squareness study needs a tanh drive, got {other:?}"
                    )))
                }
            };
            drive.validate()?;
            QubitDriveModel::new(rad_ns_to_ghz(base.omega0()), rad_ns_to_ghz(base.g()), drive)?
        }
    };
    Ok(out)
}

/// Corner states p, q, r, s extracted from a converged square-wave-like
/// cycle, each read in the basis of the flat branch it belongs to.
///
/// For the tanh family the corners sit at ω_L t = π/2 (p, s) and 3π/2
/// (q, r); for the asymmetric square wave at the exact switch samples.
pub fn corner_states(
    model: &QubitDriveModel,
    cycle: &CycleSolution,
) -> crate::analytic::CornerStates {
    use crate::lindblad::instantaneous_eigenbasis;
    let period = cycle.period_ns;
    let (t_p, t_q) = match *model.drive() {
        crate::model::DriveWaveform::TanhCosine { .. } => (0.25 * period, 0.75 * period),
        crate::model::DriveWaveform::AsymmetricSquare { dt2, .. } => (0.0, dt2),
    };
    let theta_low = 0.0;
    let theta_high = instantaneous_eigenbasis(model, {
        // any time on the high branch; t = 0 for tanh, after dt2 for square
        match *model.drive() {
            crate::model::DriveWaveform::TanhCosine { .. } => 0.0,
            crate::model::DriveWaveform::AsymmetricSquare { dt2, .. } => dt2 + 1e-12,
        }
    })
    .1;
    let nearest = |t: f64| {
        cycle
            .trajectory
            .iter()
            .min_by(|a, b| (a.t_ns - t).abs().total_cmp(&(b.t_ns - t).abs()))
            .expect("non-empty trajectory")
            .rho
    };
    let rho_p = nearest(t_p);
    let rho_q = nearest(t_q);
    crate::analytic::CornerStates {
        p: rho_p.in_eigenbasis(theta_low),
        q: rho_q.in_eigenbasis(theta_low),
        r: rho_q.in_eigenbasis(theta_high),
        s: rho_p.in_eigenbasis(theta_high),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DriveWaveform, QubitDriveModel};
    use approx::assert_relative_eq;

    fn spectrum_from(f_p: &[(f64, f64)]) -> Vec<PowerSpectrumPoint> {
        f_p.iter()
            .map(|&(f, p)| PowerSpectrumPoint {
                f_l_ghz: f,
                dt1_ns: None,
                p_total_fw: Some(p),
                p1_fw: Some(p),
                p2_fw: Some(0.0),
                p_dimensionless: Some(p),
                rho_ee_p: Some(0.1),
                winding: None,
                purity_min: Some(0.9),
                converged: true,
                cycles: 10,
            })
            .collect()
    }

    #[test]
    fn peak_finding_with_parabolic_refinement() {
        // quadratic peak centered at 3.03 with the grid off-center
        let center = 3.03;
        let pts: Vec<(f64, f64)> = (0..21)
            .map(|k| {
                let f = 2.8 + 0.02 * k as f64;
                (f, 1.0 - (f - center) * (f - center) * 8.0)
            })
            .collect();
        let spectrum = spectrum_from(&pts);
        let predictions = vec![PeakPrediction {
            n: 2,
            f_l_ghz: 3.0,
            f_m_ghz: 6.0,
        }];
        let matches = find_peaks(&spectrum, &predictions);
        let peak = matches[0].found.expect("peak found");
        assert_relative_eq!(peak.f_at_max_ghz, center, max_relative = 1e-6);
        assert!(peak.relative_offset < 0.011);
        // monotone spectrum: no peak
        let flat: Vec<(f64, f64)> = (0..21).map(|k| (2.8 + 0.02 * k as f64, k as f64)).collect();
        let none = find_peaks(&spectrum_from(&flat), &predictions);
        assert!(none[0].found.is_none());
        // a maximum 30% away does not match (outside ±25%)
        let far = vec![PeakPrediction {
            n: 1,
            f_l_ghz: 4.4,
            f_m_ghz: 6.0,
        }];
        let unmatched = find_peaks(&spectrum, &far);
        assert!(unmatched[0].found.is_none());
    }

    #[test]
    fn unconverged_points_are_invisible_to_peaks() {
        let mut spectrum = spectrum_from(&[(1.0, 0.1), (1.1, 0.2), (1.2, 0.15)]);
        spectrum[1].p_total_fw = None;
        spectrum[1].converged = false;
        let predictions = vec![PeakPrediction {
            n: 1,
            f_l_ghz: 1.1,
            f_m_ghz: 1.1,
        }];
        assert!(find_peaks(&spectrum, &predictions)[0].found.is_none());
    }

    #[test]
    fn cooling_window_extraction() {
        let mk = |dt1: f64, p1: f64, p2: f64| PowerSpectrumPoint {
            f_l_ghz: 1.0 / (dt1 + 0.08),
            dt1_ns: Some(dt1),
            p_total_fw: Some(p1 + p2),
            p1_fw: Some(p1),
            p2_fw: Some(p2),
            p_dimensionless: None,
            rho_ee_p: None,
            winding: None,
            purity_min: None,
            converged: true,
            cycles: 5,
        };
        let points = vec![
            mk(0.10, 1.0, 0.5),
            mk(0.12, 1.0, -0.1),
            mk(0.14, 1.0, -0.3),
            mk(0.16, 1.0, 0.2),
            mk(0.18, -0.5, -0.2), // P1 < 0: not a cooling point
            mk(0.20, 1.0, -0.4),
        ];
        let windows = cooling_windows(&points);
        assert_eq!(windows.len(), 2);
        assert_eq!(windows[0].dt1_range, (0.12, 0.14));
        assert_relative_eq!(windows[0].min_p2_fw, -0.3);
        assert_eq!(windows[1].dt1_range, (0.20, 0.20));
        // single-bath sweeps (no dt1) yield nothing
        let single = spectrum_from(&[(1.0, 1.0), (2.0, 2.0)]);
        assert!(cooling_windows(&single).is_empty());
    }

    #[test]
    fn winding_on_synthetic_cycles() {
        use crate::lindblad::{DensityMatrix, TrajectorySample};
        // synthetic trajectory: phasor rotating counterclockwise twice
        let n = 200;
        let mk_cycle = |turns: f64, radius: f64| CycleSolution {
            trajectory: (0..=n)
                .map(|k| {
                    let ang = 2.0 * std::f64::consts::PI * turns * k as f64 / n as f64;
                    TrajectorySample {
                        t_ns: k as f64,
                        rho: DensityMatrix::maximally_mixed(),
                        bloch: BlochState::new(0.1, radius * ang.cos(), radius * ang.sin()),
                    }
                })
                .collect(),
            heats_j: vec![],
            powers_w: vec![],
            power_total_w: 0.0,
            work_j: 0.0,
            cycles_to_converge: 1,
            converged: true,
            residual_history: vec![],
            period_ns: n as f64,
            heat_rate_samples: vec![],
            work_rate_samples: vec![],
            switch_work_j: 0.0,
        };
        assert_eq!(winding_number(&mk_cycle(2.0, 0.3)).unwrap(), 2);
        assert_eq!(winding_number(&mk_cycle(1.0, 0.3)).unwrap(), 1);
        // dead phasor: undefined
        assert!(matches!(
            winding_number(&mk_cycle(1.0, 0.0)),
            Err(ObservablesError::UndefinedWinding { .. })
        ));
    }

    #[test]
    fn study_variable_mapping() {
        let base = QubitDriveModel::new(6.0, 1.0, DriveWaveform::tanh_cosine(8.0, 6.0)).unwrap();
        let r = apply_study_variable(&base, StudyVariable::OmegaRatio, 1.05).unwrap();
        let (w1, w2) = r.extremal_gaps();
        assert_relative_eq!(w1 / w2, 1.05, max_relative = 1e-12);
        let a = apply_study_variable(&base, StudyVariable::Squareness, 0.4).unwrap();
        match a.drive() {
            DriveWaveform::TanhCosine { a, .. } => assert_relative_eq!(*a, 0.4),
            _ => panic!(),
        }
        assert!(apply_study_variable(&base, StudyVariable::OmegaRatio, 0.9).is_err());
    }
}
