//! C ABI over `satarch-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_load`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`SatarchStatus`]; on failure a message is available from
//! [`satarch_last_error`] on the same thread until the next failing call.
//! Panics never unwind into the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use satarch_core::scenario::{baseline_chemical, baseline_electric, load_scenario};
use satarch_core::simulator::mc_estimate;
use satarch_core::surrogate::SurrogateModel;
use satarch_core::vehicle::design_vehicle;
use satarch_core::{DesignPoint, Error, Scenario};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatarchStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Numeric = 5,
    Model = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

impl From<&Error> for SatarchStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) | Error::MissingKey(_) | Error::UnknownKey(_) => SatarchStatus::Parse,
            Error::Invariant { .. } | Error::CapacityExceeded { .. } | Error::EmptyExtensionSet => {
                SatarchStatus::InvalidArgument
            }
            Error::NonFinite(_) | Error::NonPositiveBusMass(_) | Error::NotPositiveDefinite => SatarchStatus::Numeric,
            Error::DegenerateData(_) | Error::ModelFormat(_) => SatarchStatus::Model,
            Error::Csv { .. } | Error::Io { .. } => SatarchStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (SatarchStatus, String)>) -> SatarchStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SatarchStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SatarchStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (SatarchStatus, String) {
    (SatarchStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (SatarchStatus, String) {
    (SatarchStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SatarchStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SatarchStatus::InvalidArgument, format!("`{what}` is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), (SatarchStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn satarch_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn satarch_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Opaque scenario handle.
pub struct SatarchScenario(Scenario);

/// Opaque surrogate model handle.
pub struct SatarchModel(SurrogateModel);

/// Loads a built-in scenario: `"chemical"` or `"electric"`.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn satarch_scenario_builtin(
    name: *const c_char,
    out: *mut *mut SatarchScenario,
) -> SatarchStatus {
    guard(|| {
        let s = match str_arg(name, "name")? {
            "chemical" => baseline_chemical(),
            "electric" => baseline_electric(),
            other => {
                return Err((
                    SatarchStatus::InvalidArgument,
                    format!("unknown built-in scenario `{other}`"),
                ));
            }
        };
        write_out(out, Box::into_raw(Box::new(SatarchScenario(s))), "out")
    })
}

/// Loads and validates a scenario JSON file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn satarch_scenario_load(path: *const c_char, out: *mut *mut SatarchScenario) -> SatarchStatus {
    guard(|| {
        let s = load_scenario(Path::new(str_arg(path, "path")?)).map_err(core_err)?;
        write_out(out, Box::into_raw(Box::new(SatarchScenario(s))), "out")
    })
}

/// Parses a scenario from a JSON string.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn satarch_scenario_from_json(
    json: *const c_char,
    out: *mut *mut SatarchScenario,
) -> SatarchStatus {
    guard(|| {
        let s = Scenario::from_json_str(str_arg(json, "json")?).map_err(core_err)?;
        write_out(out, Box::into_raw(Box::new(SatarchScenario(s))), "out")
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `h` must come from a `satarch_scenario_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn satarch_scenario_free(h: *mut SatarchScenario) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Copies the 64-character hex scenario hash plus NUL into `buf`.
///
/// # Safety
/// `h` must be a live handle and `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn satarch_scenario_hash(
    h: *const SatarchScenario,
    buf: *mut c_char,
    len: usize,
) -> SatarchStatus {
    guard(|| {
        let s = h.as_ref().ok_or_else(|| null("scenario"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let hash = s.0.hash();
        if len < hash.len() + 1 {
            return Err((SatarchStatus::BufferTooSmall, format!("need {} bytes", hash.len() + 1)));
        }
        ptr::copy_nonoverlapping(hash.as_ptr().cast::<c_char>(), buf, hash.len());
        buf.add(hash.len()).write(0);
        Ok(())
    })
}

/// Sized masses (kg), costs ($M) and ΔV capacity (m/s) of one design.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SatarchBreakdown {
    pub m_dry: f64,
    pub m_wet: f64,
    pub m_p_des: f64,
    pub m_ps: f64,
    pub m_str: f64,
    pub m_adcs: f64,
    pub c_sat: f64,
    pub c_lau: f64,
    pub c_ioc: f64,
    pub dv_des: f64,
}

/// Sizes and costs the design `(t_life_yr, m_p_des_kg)`.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn satarch_design_vehicle(
    h: *const SatarchScenario,
    t_life_yr: f64,
    m_p_des_kg: f64,
    out: *mut SatarchBreakdown,
) -> SatarchStatus {
    guard(|| {
        let s = h.as_ref().ok_or_else(|| null("scenario"))?;
        let b = design_vehicle(&s.0.params, &DesignPoint::new(t_life_yr, m_p_des_kg)).map_err(core_err)?;
        let v = SatarchBreakdown {
            m_dry: b.m_dry,
            m_wet: b.m_wet,
            m_p_des: b.m_p_des,
            m_ps: b.m_ps,
            m_str: b.m_str,
            m_adcs: b.m_adcs,
            c_sat: b.c_sat,
            c_lau: b.c_lau,
            c_ioc: b.c_ioc,
            dv_des: b.dv_des,
        };
        write_out(out, v, "out")
    })
}

/// Monte Carlo NPV mean and sample standard deviation over `n` ≥ 2
/// replicates. Identical arguments give identical results.
///
/// # Safety
/// `h` must be a live handle; `mean` and `std` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn satarch_mc_estimate(
    h: *const SatarchScenario,
    t_life_yr: f64,
    m_p_des_kg: f64,
    n: usize,
    seed: u64,
    experiment: u64,
    mean: *mut f64,
    std: *mut f64,
) -> SatarchStatus {
    guard(|| {
        let s = h.as_ref().ok_or_else(|| null("scenario"))?;
        if mean.is_null() || std.is_null() {
            return Err(null("mean/std"));
        }
        let est = mc_estimate(
            &s.0.params,
            DesignPoint::new(t_life_yr, m_p_des_kg),
            n,
            seed,
            experiment,
        )
        .map_err(core_err)?;
        mean.write(est.mean);
        std.write(est.std);
        Ok(())
    })
}

/// Loads a saved surrogate model.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn satarch_model_load(path: *const c_char, out: *mut *mut SatarchModel) -> SatarchStatus {
    guard(|| {
        let m = SurrogateModel::load(Path::new(str_arg(path, "path")?)).map_err(core_err)?;
        write_out(out, Box::into_raw(Box::new(SatarchModel(m))), "out")
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `h` must come from [`satarch_model_load`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn satarch_model_free(h: *mut SatarchModel) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Posterior mean and variance at one design point, in target units.
///
/// # Safety
/// `h` must be a live handle; `mean` must be valid, `var` may be null.
#[no_mangle]
pub unsafe extern "C" fn satarch_model_predict(
    h: *const SatarchModel,
    t_life_yr: f64,
    m_p_des_kg: f64,
    mean: *mut f64,
    var: *mut f64,
) -> SatarchStatus {
    guard(|| {
        let m = h.as_ref().ok_or_else(|| null("model"))?;
        if !t_life_yr.is_finite() || !m_p_des_kg.is_finite() {
            return Err((SatarchStatus::InvalidArgument, "design point must be finite".into()));
        }
        let (mu, v) = m.0.predict(&DesignPoint::new(t_life_yr, m_p_des_kg));
        write_out(mean, mu, "mean")?;
        if !var.is_null() {
            var.write(v);
        }
        Ok(())
    })
}
