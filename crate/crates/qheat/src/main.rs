//! Command-line front end: sweeps, trajectories, peak tables, analytic
//! comparison, and resonance predictions.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

use qheat::analytic::{map_power, steady_state_fixed_point, LegForm, MapParams};
use qheat::error::ConfigError;
use qheat::harness::config::{load_config, SweepVariable};
use qheat::harness::csv::{render_csv, write_csv_file};
use qheat::harness::sweep::run_sweep;
use qheat::lindblad::find_steady_cycle;
use qheat::observables::{
    bloch_trajectory, cooling_windows, cycle_power_exact, find_peaks, peak_amplitude_study,
    winding_number,
};

/// Relative power tolerance for `analytic-compare` (numeric Lindblad vs
/// square-wave cycle map at the first three resonances).
const COMPARE_TOLERANCE: f64 = 0.05;

#[derive(Parser)]
#[command(
    name = "qheat",
    version,
    about = "Steady-state quantum heat of a driven two-level system",
    after_help = "CONFIG accepts a file path or a bundled preset name \
                  (fig1c, fig1d, fig1e, fig3)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweeps (default: all cores). Results are
    /// byte-identical for any value.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured frequency or dt1 sweep and write CSV.
    Sweep {
        config: String,
        /// Output path (default: the config's [output] path, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Steady-cycle Bloch trajectory at one drive frequency, both frames.
    Trajectory {
        config: String,
        /// Drive frequency in GHz.
        #[arg(long = "f-ghz")]
        f_ghz: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep, then locate power maxima and compare with predictions.
    Peaks {
        config: String,
        /// Also write the sweep CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numeric vs analytic corner states and powers at the n = 1..3
    /// resonances. Exits 3 if any power comparison exceeds 5%.
    AnalyticCompare { config: String },
    /// Print predicted resonance tables (no simulation).
    Predict {
        config: String,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
    /// Run the config's [study] block: peak amplitudes vs omega1/omega2 or
    /// vs drive squareness.
    AmplitudeStudy {
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are success, anything else is usage error
            if e.use_stderr() {
                eprintln!("{e}");
                let _ = Cli::command().write_help(&mut std::io::stderr());
                eprintln!();
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.workers {
            builder = builder.num_threads(n);
        }
        match builder.build() {
            Ok(pool) => pool,
            Err(e) => {
                eprintln!("error: cannot build worker pool: {e}");
                return ExitCode::from(2);
            }
        }
    };
    let outcome = pool.install(|| dispatch(cli.command));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum AppError {
    Config(ConfigError),
    Runtime(String),
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e)
    }
}

fn dispatch(command: Command) -> Result<u8, AppError> {
    match command {
        Command::Sweep { config, out } => cmd_sweep(&config, out),
        Command::Trajectory { config, f_ghz, out } => cmd_trajectory(&config, f_ghz, out),
        Command::Peaks { config, out } => cmd_peaks(&config, out),
        Command::AnalyticCompare { config } => cmd_analytic_compare(&config),
        Command::Predict { config, n_max } => cmd_predict(&config, n_max),
        Command::AmplitudeStudy { config, out } => cmd_amplitude_study(&config, out),
    }
}

fn emit(text: &str, out: Option<PathBuf>, default: Option<&str>) -> Result<(), AppError> {
    let target = out.or_else(|| default.map(PathBuf::from));
    match target {
        Some(path) => std::fs::write(&path, text).map_err(|source| {
            AppError::Config(ConfigError::Io {
                path: path.display().to_string(),
                source,
            })
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_sweep(config_name: &str, out: Option<PathBuf>) -> Result<u8, AppError> {
    let config = load_config(config_name)?;
    let results = run_sweep(&config)?;
    let unconverged = results.points.iter().filter(|p| !p.converged).count();
    eprintln!(
        "swept {} points ({} unconverged) in {} ms [config {:016x}, qheat {}]",
        results.points.len(),
        unconverged,
        results.provenance.wall_time_ms,
        results.provenance.config_hash,
        results.provenance.code_version,
    );
    emit(
        &render_csv(&results.points),
        out,
        config.output.path.as_deref(),
    )?;
    Ok(0)
}

fn cmd_trajectory(config_name: &str, f_ghz: f64, out: Option<PathBuf>) -> Result<u8, AppError> {
    let config = load_config(config_name)?;
    let model = config
        .model(f_ghz)
        .map_err(|e| AppError::Config(ConfigError::Validation(vec![e.to_string()])))?;
    let cycle = find_steady_cycle(
        &model,
        &config.bath_couplings(),
        &config.integrator_config(),
    )
    .map_err(|e| AppError::Runtime(e.to_string()))?;
    let winding = winding_number(&cycle).ok();
    let (lab, eigen) = bloch_trajectory(&cycle);
    let mut text = String::new();
    text.push_str("t_ns,lab_x,lab_y,lab_z,two_r,two_i,two_d,purity,winding\n");
    for ((sample, l), e) in cycle.trajectory.iter().zip(&lab).zip(&eigen) {
        let _ = write!(
            text,
            "{},{},{},{},{},{},{},{}",
            sample.t_ns,
            l[0],
            l[1],
            l[2],
            e[0],
            e[1],
            e[2],
            sample.rho.purity()
        );
        match winding {
            Some(w) => {
                let _ = writeln!(text, ",{w}");
            }
            None => text.push_str(",\n"),
        }
    }
    eprintln!(
        "steady cycle at {f_ghz} GHz after {} cycles; winding {:?}; P = {:.4e} W",
        cycle.cycles_to_converge, winding, cycle.power_total_w
    );
    emit(&text, out, None)?;
    Ok(0)
}

fn cmd_peaks(config_name: &str, out: Option<PathBuf>) -> Result<u8, AppError> {
    let config = load_config(config_name)?;
    let model = config
        .reference_model()
        .map_err(|e| AppError::Config(ConfigError::Validation(vec![e.to_string()])))?;
    let results = run_sweep(&config)?;
    if let Some(path) = out {
        write_csv_file(&results.points, &path)?;
    }
    let lowest = results
        .points
        .iter()
        .map(|p| p.f_l_ghz)
        .fold(f64::INFINITY, f64::min);
    let n_max = model
        .resonance_frequencies(24)
        .iter()
        .filter(|p| p.f_l_ghz >= lowest)
        .map(|p| p.n)
        .max()
        .unwrap_or(1);
    let predictions = model.resonance_frequencies(n_max);
    let matches = find_peaks(&results.points, &predictions);
    println!(
        "{:>3} {:>14} {:>14} {:>10} {:>14}",
        "n", "predicted_GHz", "found_GHz", "offset_%", "P_max_fW"
    );
    for m in &matches {
        match m.found {
            Some(peak) => println!(
                "{:>3} {:>14.6} {:>14.6} {:>10.4} {:>14.6e}",
                m.prediction.n,
                m.prediction.f_l_ghz,
                peak.f_at_max_ghz,
                100.0 * peak.relative_offset,
                peak.p_at_max_fw
            ),
            None => println!(
                "{:>3} {:>14.6} {:>14} {:>10} {:>14}",
                m.prediction.n, m.prediction.f_l_ghz, "-", "-", "-"
            ),
        }
    }
    if config.drive.sweep == SweepVariable::Dt1 {
        let windows = cooling_windows(&results.points);
        println!("cooling windows (P2 < 0, P1 > 0):");
        for w in windows {
            println!(
                "  dt1 in [{:.4}, {:.4}] ns, min P2 = {:.4e} fW",
                w.dt1_range.0, w.dt1_range.1, w.min_p2_fw
            );
        }
    }
    Ok(0)
}

fn cmd_analytic_compare(config_name: &str) -> Result<u8, AppError> {
    let config = load_config(config_name)?;
    let reference = config
        .reference_model()
        .map_err(|e| AppError::Config(ConfigError::Validation(vec![e.to_string()])))?;
    let baths = config.bath_couplings();
    let integrator = config.integrator_config();
    let predictions = reference.resonance_frequencies(3);
    println!(
        "{:>3} {:>12} {:>16} {:>16} {:>9}",
        "n", "f_L_GHz", "P_numeric_fW", "P_analytic_fW", "rel_%"
    );
    let mut worst: f64 = 0.0;
    for pred in &predictions {
        let model = config
            .model(pred.f_l_ghz)
            .map_err(|e| AppError::Config(ConfigError::Validation(vec![e.to_string()])))?;
        let cycle = find_steady_cycle(&model, &baths, &integrator)
            .map_err(|e| AppError::Runtime(format!("n = {}: {e}", pred.n)))?;
        let p_numeric: f64 = cycle_power_exact(&model, &baths, &cycle).iter().sum();
        let params = MapParams::from_physical(&model, &baths);
        let corners = steady_state_fixed_point(&params, LegForm::Linearized)
            .map_err(|e| AppError::Runtime(e.to_string()))?;
        let (p_map, _, _) = map_power(&params, &corners);
        let rel = (p_numeric - p_map) / p_map;
        worst = worst.max(rel.abs());
        println!(
            "{:>3} {:>12.6} {:>16.6e} {:>16.6e} {:>9.3}",
            pred.n,
            pred.f_l_ghz,
            p_numeric * 1e15,
            p_map * 1e15,
            100.0 * rel
        );
        let numeric_corners = qheat::observables::corner_states(&model, &cycle);
        for (label, nc, ac) in [
            ("p", numeric_corners.p, corners.p),
            ("q", numeric_corners.q, corners.q),
            ("r", numeric_corners.r, corners.r),
            ("s", numeric_corners.s, corners.s),
        ] {
            println!(
                "      {label}: numeric (D,R,I) = ({:+.5}, {:+.5}, {:+.5})   map = ({:+.5}, {:+.5}, {:+.5})",
                nc.d, nc.r, nc.i, ac.d, ac.r, ac.i
            );
        }
    }
    if worst > COMPARE_TOLERANCE {
        eprintln!(
            "worst relative power deviation {:.2}% exceeds {:.0}%",
            100.0 * worst,
            100.0 * COMPARE_TOLERANCE
        );
        return Ok(3);
    }
    Ok(0)
}

fn cmd_predict(config_name: &str, n_max: u32) -> Result<u8, AppError> {
    let config = load_config(config_name)?;
    let model = config
        .reference_model()
        .map_err(|e| AppError::Config(ConfigError::Validation(vec![e.to_string()])))?;
    let (w1, w2) = model.extremal_gaps();
    println!(
        "omega1/2pi = {:.6} GHz, omega2/2pi = {:.6} GHz, f_M = {:.6} GHz",
        qheat::units::rad_ns_to_ghz(w1),
        qheat::units::rad_ns_to_ghz(w2),
        qheat::units::rad_ns_to_ghz(w1 + w2) / 2.0
    );
    println!("symmetric drive (f_M/n):");
    println!("{:>3} {:>12}", "n", "f_L_GHz");
    for p in model.resonance_frequencies(n_max) {
        println!("{:>3} {:>12.6}", p.n, p.f_l_ghz);
    }
    // asymmetric table at dt2 = pi/omega2 (the config's own dt2 for square
    // drives)
    let dt2 = config.dt2_ns().unwrap_or(std::f64::consts::PI / w2);
    let asym_model = qheat::model::QubitDriveModel::new(
        config.qubit.omega0_ghz,
        config.qubit.g_ghz,
        qheat::model::DriveWaveform::asymmetric_square(0.1, dt2),
    )
    .map_err(|e| AppError::Config(ConfigError::Validation(vec![e.to_string()])))?;
    println!("asymmetric square wave, dt2 = {dt2:.6} ns:");
    println!("{:>3} {:>12}", "n", "f_L_GHz");
    for p in asym_model.resonance_frequencies(n_max) {
        println!("{:>3} {:>12.6}", p.n, p.f_l_ghz);
    }
    Ok(0)
}

fn cmd_amplitude_study(config_name: &str, out: Option<PathBuf>) -> Result<u8, AppError> {
    let config = load_config(config_name)?;
    let Some(study) = config.study.clone() else {
        return Err(AppError::Config(ConfigError::Validation(vec![
            "config has no [study] section".into(),
        ])));
    };
    let model = config
        .reference_model()
        .map_err(|e| AppError::Config(ConfigError::Validation(vec![e.to_string()])))?;
    let rows = peak_amplitude_study(
        &model,
        &config.bath_couplings(),
        &config.integrator_config(),
        study.variable,
        &study.values,
        &study.orders,
        study.window_frac,
        study.window_points,
    )
    .map_err(|e| AppError::Runtime(e.to_string()))?;
    let mut text = String::from("variable_value,n,f_at_max_GHz,P_max_fW\n");
    for r in &rows {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            r.variable_value,
            r.n,
            r.f_at_max_ghz,
            r.p_max_w * 1e15
        );
    }
    emit(&text, out, None)?;
    Ok(0)
}
