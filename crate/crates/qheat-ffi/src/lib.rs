//! C ABI for the qheat simulator: opaque handles, status codes, and a flat
//! row struct, so other languages can run sweeps and read results.
//!
//! Conventions:
//! * functions returning [`QhStatus`] report failure details through
//!   [`qh_last_error`] (thread-local, valid until the next failing call on
//!   the same thread);
//! * handles are created and released strictly through this API
//!   ([`qh_config_free`], [`qh_sweep_free`]);
//! * missing numeric values (unconverged points, single-bath P2, undefined
//!   winding) are NaN / [`QH_WINDING_UNDEFINED`] in [`QhRow`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qheat::harness::config::{load_config, parse_config, ExperimentConfig};
use qheat::harness::csv::render_csv;
use qheat::harness::sweep::{run_sweep, SweepResultSet};

/// Sentinel winding value for rows where the coherence phasor vanishes.
pub const QH_WINDING_UNDEFINED: i32 = i32::MIN;

/// Status of a C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    IoError = 5,
    RuntimeError = 6,
    BufferTooSmall = 7,
    IndexOutOfRange = 8,
}

/// Opaque parsed experiment configuration.
pub struct QhConfig(ExperimentConfig);

/// Opaque sweep result set.
pub struct QhSweepResult(SweepResultSet);

/// One sweep row. NaN marks missing values.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QhRow {
    pub f_l_ghz: f64,
    pub dt1_ns: f64,
    pub p_total_fw: f64,
    pub p1_fw: f64,
    pub p2_fw: f64,
    pub p_dimensionless: f64,
    pub rho_ee_p: f64,
    pub purity_min: f64,
    /// `QH_WINDING_UNDEFINED` when the winding is undefined.
    pub winding: i32,
    pub converged: bool,
    pub cycles: usize,
}

/// One predicted resonance.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QhPeakPrediction {
    pub n: u32,
    pub f_l_ghz: f64,
    pub f_m_ghz: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).ok();
    });
}

/// Message of the most recent failure on this thread, or NULL. Owned by the
/// library; do not free. Invalidated by the next failing call.
#[no_mangle]
pub extern "C" fn qh_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, QhStatus> {
    if ptr.is_null() {
        set_last_error("null string argument");
        return Err(QhStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8");
        QhStatus::InvalidUtf8
    })
}

fn config_error_status(e: &qheat::error::ConfigError) -> QhStatus {
    use qheat::error::ConfigError::*;
    set_last_error(e.to_string());
    match e {
        Parse { .. } => QhStatus::ParseError,
        Validation(_) => QhStatus::ValidationError,
        Io { .. } => QhStatus::IoError,
    }
}

/// Parse a config from UTF-8 text. On success writes a handle (to be freed
/// with [`qh_config_free`]) into `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_config_parse(text: *const c_char, out: *mut *mut QhConfig) -> QhStatus {
    if out.is_null() {
        set_last_error("null output pointer");
        return QhStatus::NullArgument;
    }
    let text = match cstr_arg(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_config(text) {
        Ok(config) => {
            *out = Box::into_raw(Box::new(QhConfig(config)));
            QhStatus::Ok
        }
        Err(e) => config_error_status(&e),
    }
}

/// Load a config from a file path or bundled preset name (`fig1c`, `fig1d`,
/// `fig1e`, `fig3`).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_config_load(name: *const c_char, out: *mut *mut QhConfig) -> QhStatus {
    if out.is_null() {
        set_last_error("null output pointer");
        return QhStatus::NullArgument;
    }
    let name = match cstr_arg(name) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match load_config(name) {
        Ok(config) => {
            *out = Box::into_raw(Box::new(QhConfig(config)));
            QhStatus::Ok
        }
        Err(e) => config_error_status(&e),
    }
}

/// Release a config handle. NULL is a no-op.
///
/// # Safety
/// `config` must come from this API and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qh_config_free(config: *mut QhConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run the configured sweep with `workers` threads (0 = all cores). Results
/// are identical for any worker count. The handle must be freed with
/// [`qh_sweep_free`].
///
/// # Safety
/// `config` must be a live handle from this API; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_sweep_run(
    config: *const QhConfig,
    workers: usize,
    out: *mut *mut QhSweepResult,
) -> QhStatus {
    if config.is_null() || out.is_null() {
        set_last_error("null argument");
        return QhStatus::NullArgument;
    }
    let config = &(*config).0;
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if workers > 0 {
            builder = builder.num_threads(workers);
        }
        let pool = builder.build().map_err(|e| e.to_string())?;
        pool.install(|| run_sweep(config))
            .map_err(|e| e.to_string())
    }));
    match outcome {
        Ok(Ok(results)) => {
            *out = Box::into_raw(Box::new(QhSweepResult(results)));
            QhStatus::Ok
        }
        Ok(Err(message)) => {
            set_last_error(message);
            QhStatus::RuntimeError
        }
        Err(_) => {
            set_last_error("panic inside the sweep");
            QhStatus::RuntimeError
        }
    }
}

/// Number of rows in a sweep result (0 for NULL).
///
/// # Safety
/// `result` must be a live handle from this API or NULL.
#[no_mangle]
pub unsafe extern "C" fn qh_sweep_len(result: *const QhSweepResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).0.points.len()
}

/// Copy row `index` into `row`.
///
/// # Safety
/// `result` must be a live handle from this API; `row` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_sweep_row(
    result: *const QhSweepResult,
    index: usize,
    row: *mut QhRow,
) -> QhStatus {
    if result.is_null() || row.is_null() {
        set_last_error("null argument");
        return QhStatus::NullArgument;
    }
    let points = &(*result).0.points;
    let Some(p) = points.get(index) else {
        set_last_error(format!("row {index} out of range ({} rows)", points.len()));
        return QhStatus::IndexOutOfRange;
    };
    let opt = |v: Option<f64>| v.unwrap_or(f64::NAN);
    *row = QhRow {
        f_l_ghz: p.f_l_ghz,
        dt1_ns: opt(p.dt1_ns),
        p_total_fw: opt(p.p_total_fw),
        p1_fw: opt(p.p1_fw),
        p2_fw: opt(p.p2_fw),
        p_dimensionless: opt(p.p_dimensionless),
        rho_ee_p: opt(p.rho_ee_p),
        purity_min: opt(p.purity_min),
        winding: p.winding.unwrap_or(QH_WINDING_UNDEFINED),
        converged: p.converged,
        cycles: p.cycles,
    };
    QhStatus::Ok
}

/// Write a sweep result as CSV (exact same bytes as the CLI).
///
/// # Safety
/// `result` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qh_sweep_write_csv(
    result: *const QhSweepResult,
    path: *const c_char,
) -> QhStatus {
    if result.is_null() {
        set_last_error("null result handle");
        return QhStatus::NullArgument;
    }
    let path = match cstr_arg(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match std::fs::write(path, render_csv(&(*result).0.points)) {
        Ok(()) => QhStatus::Ok,
        Err(e) => {
            set_last_error(format!("cannot write {path}: {e}"));
            QhStatus::IoError
        }
    }
}

/// Release a sweep result handle. NULL is a no-op.
///
/// # Safety
/// `result` must come from this API and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qh_sweep_free(result: *mut QhSweepResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Fill `out` with up to `capacity` resonance predictions f_{L,n} for
/// n = 1..=n_max of the configured model; `written` receives the count.
/// Fails with `BufferTooSmall` (after writing `capacity` entries) when the
/// buffer cannot hold every prediction.
///
/// # Safety
/// `config` must be a live handle; `out` must point to at least `capacity`
/// entries; `written` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_predict(
    config: *const QhConfig,
    n_max: u32,
    out: *mut QhPeakPrediction,
    capacity: usize,
    written: *mut usize,
) -> QhStatus {
    if config.is_null() || out.is_null() || written.is_null() {
        set_last_error("null argument");
        return QhStatus::NullArgument;
    }
    let config = &(*config).0;
    let model = match config.reference_model() {
        Ok(m) => m,
        Err(e) => {
            set_last_error(e.to_string());
            return QhStatus::ValidationError;
        }
    };
    let predictions = model.resonance_frequencies(n_max);
    let n_copy = predictions.len().min(capacity);
    for (i, p) in predictions.iter().take(n_copy).enumerate() {
        *out.add(i) = QhPeakPrediction {
            n: p.n,
            f_l_ghz: p.f_l_ghz,
            f_m_ghz: p.f_m_ghz,
        };
    }
    *written = n_copy;
    if predictions.len() > capacity {
        set_last_error(format!(
            "buffer holds {capacity} predictions, {} available",
            predictions.len()
        ));
        return QhStatus::BufferTooSmall;
    }
    QhStatus::Ok
}
