//! Bundled experiment presets (also shipped as files under `presets/`).

pub const FIG1C: &str = include_str!("../../../../presets/fig1c.ini");
pub const FIG1D: &str = include_str!("../../../../presets/fig1d.ini");
pub const FIG1E: &str = include_str!("../../../../presets/fig1e.ini");
pub const FIG3: &str = include_str!("../../../../presets/fig3.ini");

pub fn preset_names() -> [&'static str; 4] {
    ["fig1c", "fig1d", "fig1e", "fig3"]
}

pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "fig1c" => Some(FIG1C),
        "fig1d" => Some(FIG1D),
        "fig1e" => Some(FIG1E),
        "fig3" => Some(FIG3),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;

    #[test]
    fn all_presets_parse() {
        for name in preset_names() {
            let cfg = parse_config(preset(name).unwrap())
                .unwrap_or_else(|e| panic!("preset {name} invalid: {e}"));
            assert!(cfg.reference_model().is_ok());
        }
    }

    #[test]
    fn fig1c_matches_the_reference_operating_point() {
        let cfg = parse_config(FIG1C).unwrap();
        assert_eq!(cfg.qubit.omega0_ghz, 6.0);
        assert_eq!(cfg.qubit.g_ghz, 1.0);
        assert_eq!(cfg.drive.a, Some(8.0));
        assert_eq!(cfg.baths[0].kappa, 0.01);
        assert_eq!(cfg.baths[0].t_mk, 70.0);
        assert_eq!(cfg.drive.points, 400);
        assert_eq!(
            (cfg.drive.f_min_ghz, cfg.drive.f_max_ghz),
            (Some(0.8), Some(6.6))
        );
    }

    #[test]
    fn fig3_is_a_two_bath_branch_filtered_dt1_sweep() {
        use crate::dissipation::ActiveBranch;
        use crate::harness::config::SweepVariable;
        let cfg = parse_config(FIG3).unwrap();
        assert_eq!(cfg.baths.len(), 2);
        assert_eq!(cfg.baths[0].t_mk, 210.0);
        assert_eq!(cfg.baths[1].t_mk, 210.0);
        assert_eq!(cfg.baths[0].active_branch, ActiveBranch::OnlyHighGap);
        assert_eq!(cfg.baths[1].active_branch, ActiveBranch::OnlyLowGap);
        assert_eq!(cfg.drive.sweep, SweepVariable::Dt1);
        let dt2 = cfg.dt2_ns().unwrap();
        let expect = std::f64::consts::PI / crate::units::ghz_to_rad_ns(6.0);
        assert!((dt2 - expect).abs() < 1e-15);
    }
}
