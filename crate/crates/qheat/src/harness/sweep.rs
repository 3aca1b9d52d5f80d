//! Sweep orchestration: deterministic grids with peak refinement, parallel
//! execution, ordered assembly.

use rayon::prelude::*;

use crate::error::ConfigError;
use crate::harness::config::{ExperimentConfig, SweepVariable};
use crate::lindblad::find_steady_cycle;
use crate::observables::{corner_states, winding_number, PowerSpectrumPoint};
use crate::units::INTERNAL_POWER_UNIT_W;

fn watts_to_fw(w: f64) -> f64 {
    w * 1e15
}

/// Where a sweep came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepProvenance {
    /// FNV-1a hash of the canonical config rendering.
    pub config_hash: u64,
    pub code_version: &'static str,
    /// Wall-clock duration of the sweep; excluded from any persisted output
    /// so identical configs stay byte-identical.
    pub wall_time_ms: u128,
}

/// Ordered sweep rows plus provenance. Row order always matches the grid
/// order regardless of how many workers executed the points.
#[derive(Debug, Clone)]
pub struct SweepResultSet {
    pub points: Vec<PowerSpectrumPoint>,
    pub provenance: SweepProvenance,
}

fn fnv1a(text: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// The sweep grid in the sweep variable (f_L in GHz, or dt1 in ns):
/// a uniform base grid, optionally with 8× denser patches within ±5% of
/// each predicted resonance.
pub fn sweep_grid(config: &ExperimentConfig) -> Result<Vec<f64>, ConfigError> {
    let model = config
        .reference_model()
        .map_err(|e| ConfigError::Validation(vec![e.to_string()]))?;
    let (lo, hi) = match config.drive.sweep {
        SweepVariable::DriveFrequency => (
            config.drive.f_min_ghz.unwrap(),
            config.drive.f_max_ghz.unwrap(),
        ),
        SweepVariable::Dt1 => (
            config.drive.dt1_min_ns.unwrap(),
            config.drive.dt1_max_ns.unwrap(),
        ),
    };
    let n = config.drive.points;
    let mut grid: Vec<f64> = if n == 1 {
        vec![lo]
    } else {
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()
    };
    if config.drive.refine_peaks && n > 1 {
        let base_spacing = (hi - lo) / (n - 1) as f64;
        let fine = base_spacing / 8.0;
        // enough orders to cover the low end of the range
        let predictions = model.resonance_frequencies(24);
        let (w1, _) = model.extremal_gaps();
        let centers: Vec<f64> = match config.drive.sweep {
            SweepVariable::DriveFrequency => predictions.iter().map(|p| p.f_l_ghz).collect(),
            SweepVariable::Dt1 => {
                // resonant dt1 values, plus the cooling points 2n pi/omega1
                let dt2 = config.dt2_ns().unwrap();
                let mut c: Vec<f64> = predictions
                    .iter()
                    .map(|p| 1.0 / p.f_l_ghz - dt2)
                    .filter(|&dt1| dt1 > 0.0)
                    .collect();
                let mut k = 1.0;
                while 2.0 * k * std::f64::consts::PI / w1 < hi {
                    c.push(2.0 * k * std::f64::consts::PI / w1);
                    k += 1.0;
                }
                c
            }
        };
        for center in centers {
            if center < lo || center > hi {
                continue;
            }
            let from = (center * 0.95).max(lo);
            let to = (center * 1.05).min(hi);
            let mut x = from;
            while x <= to {
                grid.push(x);
                x += fine;
            }
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() < fine * 1e-6);
    }
    Ok(grid)
}

/// Run every grid point, never aborting on per-point failures. Output row
/// order matches the grid; results are bit-identical for any worker count.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResultSet, ConfigError> {
    let started = std::time::Instant::now();
    let grid = sweep_grid(config)?;
    let baths = config.bath_couplings();
    let integrator = config.integrator_config();
    let omega0 = crate::units::ghz_to_rad_ns(config.qubit.omega0_ghz);
    let dt2 = config.dt2_ns();
    let sweep_kind = config.drive.sweep;

    let points: Vec<PowerSpectrumPoint> = grid
        .par_iter()
        .map(|&x| {
            let (f_l_ghz, dt1_ns) = match sweep_kind {
                SweepVariable::DriveFrequency => (x, dt2.map(|d| 1.0 / x - d)),
                SweepVariable::Dt1 => (1.0 / (x + dt2.unwrap()), Some(x)),
            };
            let model = match config.model(f_l_ghz) {
                Ok(m) => m,
                Err(_) => {
                    return PowerSpectrumPoint {
                        f_l_ghz,
                        dt1_ns,
                        p_total_fw: None,
                        p1_fw: None,
                        p2_fw: None,
                        p_dimensionless: None,
                        rho_ee_p: None,
                        winding: None,
                        purity_min: None,
                        converged: false,
                        cycles: 0,
                    }
                }
            };
            match find_steady_cycle(&model, &baths, &integrator) {
                Ok(cycle) => {
                    let omega_l = model.drive().omega_l();
                    let p_total = cycle.power_total_w;
                    let p_internal = p_total / INTERNAL_POWER_UNIT_W;
                    let corners = corner_states(&model, &cycle);
                    PowerSpectrumPoint {
                        f_l_ghz,
                        dt1_ns,
                        p_total_fw: Some(watts_to_fw(p_total)),
                        p1_fw: cycle.powers_w.first().copied().map(watts_to_fw),
                        p2_fw: cycle.powers_w.get(1).copied().map(watts_to_fw),
                        p_dimensionless: Some(
                            p_internal * 2.0 * std::f64::consts::PI / (omega0 * omega_l),
                        ),
                        rho_ee_p: Some(corners.p.rho_ee()),
                        winding: winding_number(&cycle).ok(),
                        purity_min: Some(cycle.purity_min()),
                        converged: true,
                        cycles: cycle.cycles_to_converge,
                    }
                }
                Err(_) => PowerSpectrumPoint {
                    f_l_ghz,
                    dt1_ns,
                    p_total_fw: None,
                    p1_fw: None,
                    p2_fw: None,
                    p_dimensionless: None,
                    rho_ee_p: None,
                    winding: None,
                    purity_min: None,
                    converged: false,
                    cycles: integrator.max_cycles,
                },
            }
        })
        .collect();

    Ok(SweepResultSet {
        points,
        provenance: SweepProvenance {
            config_hash: fnv1a(&config.canonical_string()),
            code_version: env!("CARGO_PKG_VERSION"),
            wall_time_ms: started.elapsed().as_millis(),
        },
    })
}
