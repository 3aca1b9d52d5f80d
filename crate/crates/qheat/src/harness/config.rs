//! Flat sectioned key-value config files (INI style).
//!
//! Sections: `[qubit]`, `[drive]`, one or more `[bath]`, optional
//! `[integrator]`, `[output]` and `[study]`. Full-line and trailing `#`
//! comments are stripped. Example:
//!
//! ```text
//! [qubit]
//! omega0_ghz = 6.0
//! g_ghz = 1.0
//!
//! [drive]
//! kind = tanh_cosine      # or asymmetric_square
//! a = 8.0                 # tanh squareness
//! sweep = f_l             # or dt1
//! f_min_ghz = 0.8
//! f_max_ghz = 6.6
//! points = 400
//! refine_peaks = true
//!
//! [bath]
//! kappa = 0.01
//! t_mk = 70.0
//! active_branch = always  # only_low_gap | only_high_gap
//! dephasing = off
//! ```
//!
//! Square-wave drives take `dt2_ns = <float>` or the exact token
//! `dt2 = pi_over_omega2`, plus `dt1_min_ns`/`dt1_max_ns` for the sweep.
//! Baths accept an optional resonator filter (`q_r`, `omega_r_ghz`).

use std::collections::BTreeMap;

use crate::dissipation::{ActiveBranch, BathCoupling, ResonatorFilter};
use crate::error::ConfigError;
use crate::lindblad::IntegratorConfig;
use crate::model::{DriveWaveform, QubitDriveModel};
use crate::observables::StudyVariable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveKind {
    TanhCosine,
    AsymmetricSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    DriveFrequency,
    Dt1,
}

/// dt2 of a square-wave drive: a literal duration or exactly π/ω₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dt2Spec {
    Ns(f64),
    PiOverOmega2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitBlock {
    pub omega0_ghz: f64,
    pub g_ghz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveBlock {
    pub kind: DriveKind,
    /// Tanh squareness.
    pub a: Option<f64>,
    pub dt2: Option<Dt2Spec>,
    pub sweep: SweepVariable,
    pub f_min_ghz: Option<f64>,
    pub f_max_ghz: Option<f64>,
    pub dt1_min_ns: Option<f64>,
    pub dt1_max_ns: Option<f64>,
    pub points: usize,
    /// Add an 8× denser grid within ±5% of each predicted peak.
    pub refine_peaks: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathBlock {
    pub kappa: f64,
    pub t_mk: f64,
    pub active_branch: ActiveBranch,
    pub dephasing: bool,
    pub q_r: Option<f64>,
    pub omega_r_ghz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorBlock {
    pub steps_per_cycle: usize,
    pub tol: f64,
    pub max_cycles: usize,
}

impl Default for IntegratorBlock {
    fn default() -> Self {
        IntegratorBlock {
            steps_per_cycle: 4096,
            tol: 1e-10,
            max_cycles: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputBlock {
    pub sample_stride: usize,
    pub path: Option<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            sample_stride: 4,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyBlock {
    pub variable: StudyVariable,
    pub values: Vec<f64>,
    pub orders: Vec<u32>,
    /// Half width of each scan window, fraction of the predicted frequency.
    pub window_frac: f64,
    pub window_points: usize,
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub qubit: QubitBlock,
    pub drive: DriveBlock,
    pub baths: Vec<BathBlock>,
    pub integrator: IntegratorBlock,
    pub output: OutputBlock,
    pub study: Option<StudyBlock>,
}

impl ExperimentConfig {
    /// dt2 in ns for square-wave drives.
    pub fn dt2_ns(&self) -> Option<f64> {
        self.drive.dt2.map(|d| match d {
            Dt2Spec::Ns(v) => v,
            Dt2Spec::PiOverOmega2 => {
                // omega2 = omega0
                std::f64::consts::PI / crate::units::ghz_to_rad_ns(self.qubit.omega0_ghz)
            }
        })
    }

    /// Model with the drive tuned to `f_l_ghz`.
    pub fn model(&self, f_l_ghz: f64) -> Result<QubitDriveModel, crate::error::ModelError> {
        let drive = match self.drive.kind {
            DriveKind::TanhCosine => {
                DriveWaveform::tanh_cosine(self.drive.a.unwrap_or(8.0), f_l_ghz)
            }
            DriveKind::AsymmetricSquare => {
                let dt2 = self.dt2_ns().expect("validated square drive has dt2");
                let period = 1.0 / f_l_ghz;
                DriveWaveform::asymmetric_square(period - dt2, dt2)
            }
        };
        QubitDriveModel::new(self.qubit.omega0_ghz, self.qubit.g_ghz, drive)
    }

    /// Model at the center of the sweep range (drive shape and predictions
    /// do not depend on the tuning).
    pub fn reference_model(&self) -> Result<QubitDriveModel, crate::error::ModelError> {
        let f = match self.drive.sweep {
            SweepVariable::DriveFrequency => {
                0.5 * (self.drive.f_min_ghz.unwrap() + self.drive.f_max_ghz.unwrap())
            }
            SweepVariable::Dt1 => {
                let dt1 = 0.5 * (self.drive.dt1_min_ns.unwrap() + self.drive.dt1_max_ns.unwrap());
                1.0 / (dt1 + self.dt2_ns().unwrap())
            }
        };
        self.model(f)
    }

    pub fn bath_couplings(&self) -> Vec<BathCoupling> {
        self.baths
            .iter()
            .map(|b| {
                let mut bath = BathCoupling::new(b.kappa, b.t_mk)
                    .expect("validated bath")
                    .on_branch(b.active_branch)
                    .with_dephasing(b.dephasing);
                if let (Some(q), Some(f)) = (b.q_r, b.omega_r_ghz) {
                    bath = bath.with_filter(ResonatorFilter::new(q, f).expect("validated filter"));
                }
                bath
            })
            .collect()
    }

    pub fn integrator_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            steps_per_cycle: self.integrator.steps_per_cycle,
            convergence_tol: self.integrator.tol,
            max_cycles: self.integrator.max_cycles,
            sample_stride: self.output.sample_stride,
        }
    }

    /// Canonical text rendering used for the provenance hash.
    pub fn canonical_string(&self) -> String {
        format!("{self:?}")
    }
}

struct RawSection {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

fn syntax_pass(text: &str) -> Result<Vec<RawSection>, ConfigError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or(ConfigError::Parse {
                line: line_no,
                message: format!("section header without closing bracket: {line}"),
            })?;
            sections.push(RawSection {
                name: name.trim().to_ascii_lowercase(),
                line: line_no,
                entries: Vec::new(),
            });
        } else if let Some((key, value)) = line.split_once('=') {
            let section = sections.last_mut().ok_or(ConfigError::Parse {
                line: line_no,
                message: format!("key '{}' before any [section]", key.trim()),
            })?;
            section.entries.push((
                key.trim().to_ascii_lowercase(),
                value.trim().to_string(),
                line_no,
            ));
        } else {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("expected 'key = value' or '[section]', got: {line}"),
            });
        }
    }
    Ok(sections)
}

struct SectionReader<'a> {
    name: &'a str,
    map: BTreeMap<&'a str, (&'a str, usize)>,
    seen: std::cell::RefCell<Vec<&'a str>>,
    problems: &'a std::cell::RefCell<Vec<String>>,
}

impl<'a> SectionReader<'a> {
    fn new(section: &'a RawSection, problems: &'a std::cell::RefCell<Vec<String>>) -> Self {
        let mut map = BTreeMap::new();
        for (k, v, line) in &section.entries {
            if map.insert(k.as_str(), (v.as_str(), *line)).is_some() {
                problems.borrow_mut().push(format!(
                    "[{}] duplicate key '{}' (line {})",
                    section.name, k, line
                ));
            }
        }
        SectionReader {
            name: &section.name,
            map,
            seen: std::cell::RefCell::new(Vec::new()),
            problems,
        }
    }

    fn raw(&self, key: &'a str) -> Option<&'a str> {
        self.seen.borrow_mut().push(key);
        self.map.get(key).map(|(v, _)| *v)
    }

    fn parse<T: std::str::FromStr>(&self, key: &'a str, kind: &str) -> Option<T> {
        let v = self.raw(key)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(_) => {
                self.problems
                    .borrow_mut()
                    .push(format!("[{}] {key}: expected {kind}, got '{v}'", self.name));
                None
            }
        }
    }

    fn float(&self, key: &'a str) -> Option<f64> {
        self.parse::<f64>(key, "a number")
    }

    fn integer(&self, key: &'a str) -> Option<usize> {
        self.parse::<usize>(key, "an integer")
    }

    fn boolean(&self, key: &'a str) -> Option<bool> {
        let v = self.raw(key)?;
        match v.to_ascii_lowercase().as_str() {
            "true" | "on" | "yes" => Some(true),
            "false" | "off" | "no" => Some(false),
            _ => {
                self.problems
                    .borrow_mut()
                    .push(format!("[{}] {key}: expected on/off, got '{v}'", self.name));
                None
            }
        }
    }

    fn require_float(&self, key: &'a str) -> Option<f64> {
        if self.map.contains_key(key) {
            self.float(key)
        } else {
            self.problems
                .borrow_mut()
                .push(format!("[{}] missing required key '{key}'", self.name));
            None
        }
    }

    fn float_list(&self, key: &'a str) -> Option<Vec<f64>> {
        let v = self.raw(key)?;
        let mut out = Vec::new();
        for part in v.split(',') {
            match part.trim().parse::<f64>() {
                Ok(x) => out.push(x),
                Err(_) => {
                    self.problems.borrow_mut().push(format!(
                        "[{}] {key}: expected comma-separated numbers, got '{v}'",
                        self.name
                    ));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn finish(&self) {
        let seen = self.seen.borrow();
        for key in self.map.keys() {
            if !seen.contains(key) {
                self.problems
                    .borrow_mut()
                    .push(format!("[{}] unknown key '{key}'", self.name));
            }
        }
    }
}

/// Parse and validate a config. Syntax problems fail fast with a line
/// number; semantic problems are aggregated into one `Validation` error
/// listing every violation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let sections = syntax_pass(text)?;
    let problems = std::cell::RefCell::new(Vec::<String>::new());

    let mut qubit = None;
    let mut drive = None;
    let mut baths = Vec::new();
    let mut integrator = IntegratorBlock::default();
    let mut output = OutputBlock::default();
    let mut study = None;
    let mut seen_sections: Vec<&str> = Vec::new();

    for section in &sections {
        match section.name.as_str() {
            "qubit" => {
                let r = SectionReader::new(section, &problems);
                qubit = Some(QubitBlock {
                    omega0_ghz: r.require_float("omega0_ghz").unwrap_or(f64::NAN),
                    g_ghz: r.require_float("g_ghz").unwrap_or(f64::NAN),
                });
                r.finish();
            }
            "drive" => {
                let r = SectionReader::new(section, &problems);
                let kind = match r.raw("kind") {
                    Some("tanh_cosine") => Some(DriveKind::TanhCosine),
                    Some("asymmetric_square") => Some(DriveKind::AsymmetricSquare),
                    Some(other) => {
                        problems.borrow_mut().push(format!(
                            "[drive] kind: expected tanh_cosine or asymmetric_square, got '{other}'"
                        ));
                        None
                    }
                    None => {
                        problems
                            .borrow_mut()
                            .push("[drive] missing required key 'kind'".into());
                        None
                    }
                };
                let a = r.float("a");
                let dt2 = match (r.raw("dt2"), r.map.contains_key("dt2_ns")) {
                    (Some(_), true) => {
                        problems
                            .borrow_mut()
                            .push("[drive] specify either dt2 or dt2_ns, not both".into());
                        r.float("dt2_ns");
                        None
                    }
                    (Some("pi_over_omega2"), false) => Some(Dt2Spec::PiOverOmega2),
                    (Some(other), _) => {
                        problems.borrow_mut().push(format!(
                            "[drive] dt2: only the token 'pi_over_omega2' is allowed, got '{other}' (use dt2_ns for a literal)"
                        ));
                        None
                    }
                    (None, true) => r.float("dt2_ns").map(Dt2Spec::Ns),
                    (None, false) => None,
                };
                let sweep = match r.raw("sweep") {
                    Some("f_l") | None => SweepVariable::DriveFrequency,
                    Some("dt1") => SweepVariable::Dt1,
                    Some(other) => {
                        problems
                            .borrow_mut()
                            .push(format!("[drive] sweep: expected f_l or dt1, got '{other}'"));
                        SweepVariable::DriveFrequency
                    }
                };
                drive = Some(DriveBlock {
                    kind: kind.unwrap_or(DriveKind::TanhCosine),
                    a,
                    dt2,
                    sweep,
                    f_min_ghz: r.float("f_min_ghz"),
                    f_max_ghz: r.float("f_max_ghz"),
                    dt1_min_ns: r.float("dt1_min_ns"),
                    dt1_max_ns: r.float("dt1_max_ns"),
                    points: r.integer("points").unwrap_or(100),
                    refine_peaks: r.boolean("refine_peaks").unwrap_or(false),
                });
                r.finish();
            }
            "bath" => {
                let r = SectionReader::new(section, &problems);
                let branch = match r.raw("active_branch") {
                    Some("always") | None => ActiveBranch::Always,
                    Some("only_low_gap") => ActiveBranch::OnlyLowGap,
                    Some("only_high_gap") => ActiveBranch::OnlyHighGap,
                    Some(other) => {
                        problems.borrow_mut().push(format!(
                            "[bath] active_branch: expected always/only_low_gap/only_high_gap, got '{other}'"
                        ));
                        ActiveBranch::Always
                    }
                };
                baths.push(BathBlock {
                    kappa: r.require_float("kappa").unwrap_or(f64::NAN),
                    t_mk: r.require_float("t_mk").unwrap_or(f64::NAN),
                    active_branch: branch,
                    dephasing: r.boolean("dephasing").unwrap_or(true),
                    q_r: r.float("q_r"),
                    omega_r_ghz: r.float("omega_r_ghz"),
                });
                r.finish();
            }
            "integrator" => {
                let r = SectionReader::new(section, &problems);
                if let Some(v) = r.integer("steps_per_cycle") {
                    integrator.steps_per_cycle = v;
                }
                if let Some(v) = r.float("tol") {
                    integrator.tol = v;
                }
                if let Some(v) = r.integer("max_cycles") {
                    integrator.max_cycles = v;
                }
                r.finish();
            }
            "output" => {
                let r = SectionReader::new(section, &problems);
                if let Some(v) = r.integer("sample_stride") {
                    output.sample_stride = v;
                }
                output.path = r.raw("path").map(str::to_string);
                r.finish();
            }
            "study" => {
                let r = SectionReader::new(section, &problems);
                let variable = match r.raw("variable") {
                    Some("omega_ratio") => Some(StudyVariable::OmegaRatio),
                    Some("a") => Some(StudyVariable::Squareness),
                    Some(other) => {
                        problems.borrow_mut().push(format!(
                            "[study] variable: expected omega_ratio or a, got '{other}'"
                        ));
                        None
                    }
                    None => {
                        problems
                            .borrow_mut()
                            .push("[study] missing required key 'variable'".into());
                        None
                    }
                };
                let values = r.float_list("values").unwrap_or_default();
                let orders: Vec<u32> = r
                    .float_list("orders")
                    .unwrap_or_default()
                    .iter()
                    .map(|&x| x as u32)
                    .collect();
                study = Some(StudyBlock {
                    variable: variable.unwrap_or(StudyVariable::Squareness),
                    values,
                    orders,
                    window_frac: r.float("window_pct").map(|p| p / 100.0).unwrap_or(0.012),
                    window_points: r.integer("window_points").unwrap_or(21),
                });
                r.finish();
            }
            other => {
                problems
                    .borrow_mut()
                    .push(format!("unknown section [{other}] (line {})", section.line));
            }
        }
        seen_sections.push(&section.name);
    }

    if qubit.is_none() {
        problems.borrow_mut().push("missing [qubit] section".into());
    }
    if drive.is_none() {
        problems.borrow_mut().push("missing [drive] section".into());
    }
    if baths.is_empty() {
        problems
            .borrow_mut()
            .push("at least one [bath] section is required".into());
    }

    let config = ExperimentConfig {
        qubit: qubit.unwrap_or(QubitBlock {
            omega0_ghz: f64::NAN,
            g_ghz: f64::NAN,
        }),
        drive: drive.unwrap_or(DriveBlock {
            kind: DriveKind::TanhCosine,
            a: None,
            dt2: None,
            sweep: SweepVariable::DriveFrequency,
            f_min_ghz: None,
            f_max_ghz: None,
            dt1_min_ns: None,
            dt1_max_ns: None,
            points: 0,
            refine_peaks: false,
        }),
        baths,
        integrator,
        output,
        study,
    };
    validate(&config, &mut problems.borrow_mut());
    let problems = problems.into_inner();
    if problems.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Validation(problems))
    }
}

fn validate(config: &ExperimentConfig, problems: &mut Vec<String>) {
    if !(config.qubit.omega0_ghz > 0.0) {
        problems.push(format!(
            "[qubit] omega0_ghz must be positive, got {}",
            config.qubit.omega0_ghz
        ));
    }
    if !(config.qubit.g_ghz >= 0.0) {
        problems.push(format!(
            "[qubit] g_ghz must be non-negative, got {}",
            config.qubit.g_ghz
        ));
    }
    match config.drive.kind {
        DriveKind::TanhCosine => {
            match config.drive.a {
                Some(a) if a > 0.0 => {}
                Some(a) => problems.push(format!("[drive] a must be positive, got {a}")),
                None => problems.push("[drive] tanh_cosine needs 'a'".into()),
            }
            if config.drive.dt2.is_some() {
                problems.push("[drive] dt2 applies only to asymmetric_square".into());
            }
        }
        DriveKind::AsymmetricSquare => {
            match config.dt2_ns() {
                Some(dt2) if dt2 > 0.0 => {}
                Some(dt2) => problems.push(format!("[drive] dt2 must be positive, got {dt2} ns")),
                None => problems
                    .push("[drive] asymmetric_square needs dt2_ns or dt2 = pi_over_omega2".into()),
            }
            if config.drive.a.is_some() {
                problems.push("[drive] a applies only to tanh_cosine".into());
            }
        }
    }
    match config.drive.sweep {
        SweepVariable::DriveFrequency => {
            match (config.drive.f_min_ghz, config.drive.f_max_ghz) {
                (Some(lo), Some(hi)) => {
                    if !(lo > 0.0 && hi > lo) {
                        problems.push(format!(
                            "[drive] need 0 < f_min_ghz < f_max_ghz, got {lo} and {hi}"
                        ));
                    }
                    // square-wave frequency sweeps must keep dt1 positive
                    if let Some(dt2) = config.dt2_ns() {
                        if dt2 > 0.0 && 1.0 / hi <= dt2 {
                            problems.push(format!(
                                "[drive] f_max_ghz = {hi} leaves no room for dt1 (period <= dt2 = {dt2} ns)"
                            ));
                        }
                    }
                }
                _ => problems.push("[drive] f_l sweep needs f_min_ghz and f_max_ghz".into()),
            }
            if config.drive.dt1_min_ns.is_some() || config.drive.dt1_max_ns.is_some() {
                problems.push("[drive] dt1_min_ns/dt1_max_ns apply only to sweep = dt1".into());
            }
        }
        SweepVariable::Dt1 => {
            if config.drive.kind != DriveKind::AsymmetricSquare {
                problems.push("[drive] sweep = dt1 needs kind = asymmetric_square".into());
            }
            match (config.drive.dt1_min_ns, config.drive.dt1_max_ns) {
                (Some(lo), Some(hi)) => {
                    if !(lo > 0.0 && hi > lo) {
                        problems.push(format!(
                            "[drive] need 0 < dt1_min_ns < dt1_max_ns, got {lo} and {hi}"
                        ));
                    }
                }
                _ => problems.push("[drive] dt1 sweep needs dt1_min_ns and dt1_max_ns".into()),
            }
            if config.drive.f_min_ghz.is_some() || config.drive.f_max_ghz.is_some() {
                problems.push("[drive] f_min_ghz/f_max_ghz apply only to sweep = f_l".into());
            }
        }
    }
    if config.drive.points < 1 {
        problems.push("[drive] points must be >= 1".into());
    }
    for (i, b) in config.baths.iter().enumerate() {
        if !(b.kappa > 0.0) {
            problems.push(format!(
                "[bath #{}] kappa must be positive, got {}",
                i + 1,
                b.kappa
            ));
        }
        if !(b.t_mk > 0.0) {
            problems.push(format!(
                "[bath #{}] t_mk must be positive, got {}",
                i + 1,
                b.t_mk
            ));
        }
        match (b.q_r, b.omega_r_ghz) {
            (None, None) => {}
            (Some(q), Some(f)) => {
                if !(q > 0.0) || !(f > 0.0) {
                    problems.push(format!(
                        "[bath #{}] filter needs positive q_r and omega_r_ghz",
                        i + 1
                    ));
                }
            }
            _ => problems.push(format!(
                "[bath #{}] a filter needs both q_r and omega_r_ghz",
                i + 1
            )),
        }
    }
    let integ = IntegratorConfig {
        steps_per_cycle: config.integrator.steps_per_cycle,
        convergence_tol: config.integrator.tol,
        max_cycles: config.integrator.max_cycles,
        sample_stride: config.output.sample_stride,
    };
    if let Err(e) = integ.validate() {
        problems.push(e.to_string());
    }
    if let Some(study) = &config.study {
        if study.values.is_empty() {
            problems.push("[study] values must not be empty".into());
        }
        if study.orders.is_empty() || study.orders.contains(&0) {
            problems.push("[study] orders must be positive integers".into());
        }
        if !(study.window_frac > 0.0 && study.window_frac < 0.25) {
            problems.push(format!(
                "[study] window_pct must be in (0, 25), got {}",
                study.window_frac * 100.0
            ));
        }
        if study.window_points < 3 {
            problems.push("[study] window_points must be >= 3".into());
        }
    }
}

/// Read a config from a file path, or from the bundled presets when `name`
/// matches one (`fig1c`, `fig1d`, `fig1e`, `fig3`).
pub fn load_config(name: &str) -> Result<ExperimentConfig, ConfigError> {
    if let Some(text) = super::presets::preset(name) {
        return parse_config(text);
    }
    let text = std::fs::read_to_string(name).map_err(|source| ConfigError::Io {
        path: name.to_string(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[qubit]
omega0_ghz = 6.0
g_ghz = 1.0

[drive]
kind = tanh_cosine
a = 8.0
sweep = f_l
f_min_ghz = 0.8
f_max_ghz = 6.6
points = 40

[bath]
kappa = 0.01
t_mk = 70.0
";

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.qubit.omega0_ghz, 6.0);
        assert_eq!(cfg.integrator.steps_per_cycle, 4096);
        assert_eq!(cfg.output.sample_stride, 4);
        assert_eq!(cfg.baths.len(), 1);
        assert!(cfg.baths[0].dephasing);
        assert!(cfg.study.is_none());
        assert!(cfg.model(3.0).is_ok());
    }

    #[test]
    fn comments_and_whitespace() {
        let text = MINIMAL.replace("points = 40", "points = 40   # grid size");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.drive.points, 40);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "[qubit\nomega0_ghz = 6.0\n";
        match parse_config(text) {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text2 = "[qubit]\nomega0_ghz 6.0\n";
        match parse_config(text2) {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text3 = "omega0_ghz = 6.0\n";
        assert!(matches!(
            parse_config(text3),
            Err(ConfigError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn validation_aggregates_every_violation() {
        let text = "\
[qubit]
omega0_ghz = -6.0
g_ghz = 1.0

[drive]
kind = tanh_cosine
a = -8.0
sweep = f_l
f_min_ghz = 6.6
f_max_ghz = 0.8
points = 40

[bath]
kappa = -0.01
t_mk = 70.0
typo_key = 3
";
        match parse_config(text) {
            Err(ConfigError::Validation(problems)) => {
                let joined = problems.join("\n");
                assert!(joined.contains("omega0_ghz"), "{joined}");
                assert!(joined.contains("a must be positive"), "{joined}");
                assert!(joined.contains("f_min_ghz < f_max_ghz"), "{joined}");
                assert!(joined.contains("kappa"), "{joined}");
                assert!(joined.contains("unknown key 'typo_key'"), "{joined}");
                assert!(problems.len() >= 5);
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn square_wave_config_with_dt2_token() {
        let text = "\
[qubit]
omega0_ghz = 6.0
g_ghz = 1.0

[drive]
kind = asymmetric_square
dt2 = pi_over_omega2
sweep = dt1
dt1_min_ns = 0.02
dt1_max_ns = 0.7
points = 50

[bath]
kappa = 0.01
t_mk = 210.0
active_branch = only_high_gap

[bath]
kappa = 0.01
t_mk = 210.0
active_branch = only_low_gap
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.baths.len(), 2);
        let dt2 = cfg.dt2_ns().unwrap();
        let expect = std::f64::consts::PI / crate::units::ghz_to_rad_ns(6.0);
        assert!((dt2 - expect).abs() < 1e-15);
        assert_eq!(cfg.baths[0].active_branch, ActiveBranch::OnlyHighGap);
        let m = cfg.model(2.0).unwrap();
        match m.drive() {
            DriveWaveform::AsymmetricSquare { dt1, dt2: d2 } => {
                assert!((dt1 + d2 - 0.5).abs() < 1e-12);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let text = MINIMAL.to_string() + "\n[bath]\nkappa = 0.01\nkappa = 0.02\nt_mk = 70\n";
        match parse_config(&text) {
            Err(ConfigError::Validation(problems)) => {
                assert!(problems.iter().any(|p| p.contains("duplicate key 'kappa'")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }
}
