//! Cross-checks between the numeric propagator, the analytic map, and the
//! cycle observables that exercise several modules together.

use qheat::analytic::{map_power, steady_state_fixed_point, LegForm, MapParams};
use qheat::lindblad::find_steady_cycle;
use qheat::model::{DriveWaveform, QubitDriveModel};
use qheat::observables::{
    cooling_windows, corner_states, cycle_power_exact, winding_number, PowerSpectrumPoint,
};
use qheat::{BathCoupling, IntegratorConfig};

const F_M_GHZ: f64 = 6.162_277_660_168_379;

fn base_bath() -> BathCoupling {
    BathCoupling::new(0.01, 70.0).unwrap().with_dephasing(false)
}

fn model(a: f64, f_l_ghz: f64) -> QubitDriveModel {
    QubitDriveModel::new(6.0, 1.0, DriveWaveform::tanh_cosine(a, f_l_ghz)).unwrap()
}

#[test]
fn quadrature_consistency_under_sample_density_doubling() {
    let m = model(8.0, F_M_GHZ);
    let baths = [base_bath()];
    let coarse_cfg = IntegratorConfig::default(); // stride 4
    let dense_cfg = IntegratorConfig {
        sample_stride: 2,
        ..coarse_cfg
    };
    let coarse = find_steady_cycle(&m, &baths, &coarse_cfg).unwrap();
    let dense = find_steady_cycle(&m, &baths, &dense_cfg).unwrap();
    let p_coarse: f64 = cycle_power_exact(&m, &baths, &coarse).iter().sum();
    let p_dense: f64 = cycle_power_exact(&m, &baths, &dense).iter().sum();
    let rel = (p_coarse - p_dense).abs() / p_dense;
    assert!(rel < 1e-3, "2x sample density moved the power by {rel:.2e}");
}

#[test]
fn exact_power_matches_the_corner_difference_form_at_a8() {
    // heat-rate quadrature vs the corner-difference power evaluated on
    // the numeric corner states of the same cycle (a = 8, f_L = f_M)
    let m = model(8.0, F_M_GHZ);
    let baths = [base_bath()];
    let cycle = find_steady_cycle(&m, &baths, &IntegratorConfig::default()).unwrap();
    let p_quadrature: f64 = cycle_power_exact(&m, &baths, &cycle).iter().sum();
    let corners = corner_states(&m, &cycle);
    let params = MapParams::from_physical(&m, &baths);
    let (p_corners, _, _) = map_power(&params, &corners);
    let rel = (p_quadrature - p_corners).abs() / p_corners;
    assert!(rel < 0.05, "quadrature vs corner form: {:.2}%", 100.0 * rel);
}

#[test]
fn numeric_corner_states_match_the_map_fixed_point_for_square_drives() {
    // f_L = f_M, near-square drive: component-wise 2% with a small absolute
    // floor for the near-zero components
    let m = model(30.0, F_M_GHZ);
    let baths = [base_bath()];
    let cycle = find_steady_cycle(&m, &baths, &IntegratorConfig::default()).unwrap();
    let numeric = corner_states(&m, &cycle);
    let params = MapParams::from_physical(&m, &baths);
    let map = steady_state_fixed_point(&params, LegForm::Linearized).unwrap();
    for (label, n, a) in [
        ("p", numeric.p, map.p),
        ("q", numeric.q, map.q),
        ("r", numeric.r, map.r),
        ("s", numeric.s, map.s),
    ] {
        for (comp, x, y) in [("D", n.d, a.d), ("R", n.r, a.r), ("I", n.i, a.i)] {
            let tol = (0.02 * y.abs()).max(0.002);
            assert!(
                (x - y).abs() < tol,
                "corner {label} component {comp}: numeric {x:.5} vs map {y:.5}"
            );
        }
    }
}

#[test]
fn trajectories_dive_deeper_at_resonance_than_between_peaks() {
    let baths = [base_bath()];
    let cfg = IntegratorConfig {
        steps_per_cycle: 2048,
        convergence_tol: 1e-10,
        max_cycles: 8000,
        sample_stride: 4,
    };
    let at_peak = find_steady_cycle(&model(8.0, F_M_GHZ / 2.0), &baths, &cfg).unwrap();
    let between = find_steady_cycle(&model(8.0, 4.5), &baths, &cfg).unwrap();
    assert!(
        at_peak.purity_min() < between.purity_min(),
        "peak purity {} vs off-peak {}",
        at_peak.purity_min(),
        between.purity_min()
    );
    // off resonance the trajectory hugs the Bloch-sphere surface
    assert!(between.purity_min() > 0.9, "{}", between.purity_min());
    // both frames stay inside the unit ball at every sample
    for cycle in [&at_peak, &between] {
        let (lab, eigen) = qheat::observables::bloch_trajectory(cycle);
        for v in lab.iter().chain(eigen.iter()) {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!(norm <= 1.0 + 1e-9, "Bloch vector left the ball: {norm}");
        }
    }
}

#[test]
fn undriven_qubit_has_no_winding() {
    let m = QubitDriveModel::new(6.0, 0.0, DriveWaveform::tanh_cosine(8.0, 3.0)).unwrap();
    let cfg = IntegratorConfig {
        steps_per_cycle: 1024,
        convergence_tol: 1e-10,
        max_cycles: 2000,
        sample_stride: 4,
    };
    let cycle = find_steady_cycle(&m, &[base_bath()], &cfg).unwrap();
    assert!(
        winding_number(&cycle).is_err(),
        "g = 0 generates no coherence"
    );
}

#[test]
fn hotter_second_bath_widens_the_cooling_windows() {
    // dt1 sweep of the two-bath square-wave engine at T2 = T1 and T2 = 2 T1;
    // more points satisfy P2 < 0 when bath 2 runs hotter
    let (w1, w2) = model(8.0, 6.0).extremal_gaps();
    let dt2 = std::f64::consts::PI / w2;
    let cfg = IntegratorConfig {
        steps_per_cycle: 1024,
        convergence_tol: 1e-9,
        max_cycles: 8000,
        sample_stride: 4,
    };
    let measure = |t2_mk: f64| {
        let baths = [
            BathCoupling::new(0.01, 210.0)
                .unwrap()
                .on_branch(qheat::ActiveBranch::OnlyHighGap)
                .with_dephasing(false),
            BathCoupling::new(0.01, t2_mk)
                .unwrap()
                .on_branch(qheat::ActiveBranch::OnlyLowGap)
                .with_dephasing(false),
        ];
        let n = 80;
        let points: Vec<PowerSpectrumPoint> = (0..n)
            .map(|k| {
                let dt1 = 0.05 + (0.45 - 0.05) * k as f64 / (n - 1) as f64;
                let m = QubitDriveModel::new(6.0, 1.0, DriveWaveform::asymmetric_square(dt1, dt2))
                    .unwrap();
                let sol = find_steady_cycle(&m, &baths, &cfg).unwrap();
                PowerSpectrumPoint {
                    f_l_ghz: 1.0 / (dt1 + dt2),
                    dt1_ns: Some(dt1),
                    p_total_fw: Some(sol.power_total_w * 1e15),
                    p1_fw: Some(sol.powers_w[0] * 1e15),
                    p2_fw: Some(sol.powers_w[1] * 1e15),
                    p_dimensionless: None,
                    rho_ee_p: None,
                    winding: None,
                    purity_min: None,
                    converged: true,
                    cycles: sol.cycles_to_converge,
                }
            })
            .collect();
        let windows = cooling_windows(&points);
        assert!(
            windows
                .iter()
                .any(|w| w.dt1_range.0 <= 2.0 * std::f64::consts::PI / w1
                    && 2.0 * std::f64::consts::PI / w1 <= w.dt1_range.1),
            "cooling must cover dt1 = 2pi/omega1 at T2 = {t2_mk} mK"
        );
        windows
            .iter()
            .map(|w| w.dt1_range.1 - w.dt1_range.0)
            .sum::<f64>()
    };
    let equal = measure(210.0);
    let hotter = measure(420.0);
    assert!(
        hotter > equal,
        "cooling measure should widen: {equal:.4} -> {hotter:.4}"
    );
}

#[test]
fn undriven_amplitude_study_measures_no_power() {
    use qheat::observables::{peak_amplitude_study, StudyVariable};
    let base = model(8.0, 6.0);
    let cfg = IntegratorConfig {
        steps_per_cycle: 1024,
        convergence_tol: 1e-10,
        max_cycles: 2000,
        sample_stride: 4,
    };
    // omega1/omega2 = 1 means g = 0: no coherent pumping, thermal cycle
    let rows = peak_amplitude_study(
        &base,
        &[base_bath()],
        &cfg,
        StudyVariable::OmegaRatio,
        &[1.0],
        &[1],
        0.005,
        3,
    )
    .unwrap();
    assert!(rows[0].p_max_w.abs() < 1e-25, "P = {} W", rows[0].p_max_w);
}

#[test]
fn no_baths_means_no_heat_flow() {
    // with the dissipator absent the exact cycle power has nothing to sum
    let m = model(8.0, F_M_GHZ);
    let baths = [base_bath()];
    let cycle = find_steady_cycle(&m, &baths, &IntegratorConfig::default()).unwrap();
    let powers = cycle_power_exact(&m, &[], &cycle);
    assert!(powers.is_empty());
}
