//! C ABI over `panelcount`.
//!
//! Datasets and fits are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every entry point returns a
//! [`PcStatus`]; on failure the message is available from
//! [`pc_last_error`] on the same thread until the next call.
//! Array outputs are copied into caller buffers whose length is passed
//! explicitly and must match exactly.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};

use panelcount::estimate::fit;
use panelcount::inference::{bootstrap_se, scenario_cov, wald_test};
use panelcount::io::{parse_csv, CountKind};
use panelcount::sim::generate::Scenario;
use panelcount::{Dataset, Error, FitConfig, FitResult, Method};

/// Result code of every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    BufferLength = 2,
    InvalidInput = 3,
    Validation = 4,
    Domain = 5,
    Numerical = 6,
    Divergence = 7,
    NonIdentifiable = 8,
    Stagnation = 9,
    Inference = 10,
    Io = 11,
    Panic = 12,
}

/// Estimator selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcMethod {
    Mple = 0,
    Mle = 1,
}

impl From<PcMethod> for Method {
    fn from(m: PcMethod) -> Self {
        match m {
            PcMethod::Mple => Method::Mple,
            PcMethod::Mle => Method::Mle,
        }
    }
}

/// Opaque panel count dataset.
pub struct PcDataset(Dataset);

/// Opaque fitted model.
pub struct PcFit(FitResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Input(_) => PcStatus::InvalidInput,
            Error::Validation { .. } => PcStatus::Validation,
            Error::Domain(_) => PcStatus::Domain,
            Error::Numerical(_) => PcStatus::Numerical,
            Error::Divergence(_) => PcStatus::Divergence,
            Error::NonIdentifiable(_) => PcStatus::NonIdentifiable,
            Error::Stagnation { .. } => PcStatus::Stagnation,
            Error::Inference(_) => PcStatus::Inference,
            Error::Io(_) | Error::Csv(_) => PcStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(PcStatus::NullPointer, format!("{name} is null"))
}

fn set_last_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("interior nul removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PcStatus {
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_string());
        Err(Failure(PcStatus::Panic, msg))
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            PcStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_last_error(Some(msg));
            status
        }
    }
}

unsafe fn by_ref<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(name))
}

unsafe fn out_slice<'a>(ptr: *mut f64, len: usize, expected: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if len != expected {
        return Err(Failure(
            PcStatus::BufferLength,
            format!("{name} has length {len}, expected {expected}"),
        ));
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn in_slice<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn count_kind(increments: bool) -> CountKind {
    if increments {
        CountKind::Increments
    } else {
        CountKind::Cumulative
    }
}

fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    Ok(())
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    check_out(out)?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Reads a CSV file (header `subject_id,time,count,z1,...,zd`).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_dataset_from_csv_path(
    path: *const c_char,
    increments: bool,
    out: *mut *mut PcDataset,
) -> PcStatus {
    guard(|| {
        check_out(out)?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(PcStatus::InvalidInput, "path is not UTF-8".into()))?;
        let file = File::open(path).map_err(|e| Failure(PcStatus::Io, format!("cannot open {path}: {e}")))?;
        let data = parse_csv(BufReader::new(file), count_kind(increments))?;
        store(out, PcDataset(data))
    })
}

/// Parses CSV text held in memory.
///
/// # Safety
/// `buf` must point to `len` readable bytes and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_dataset_from_csv_buffer(
    buf: *const u8,
    len: usize,
    increments: bool,
    out: *mut *mut PcDataset,
) -> PcStatus {
    guard(|| {
        check_out(out)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let bytes = std::slice::from_raw_parts(buf, len);
        let data = parse_csv(bytes, count_kind(increments))?;
        store(out, PcDataset(data))
    })
}

/// Releases a dataset. Null is ignored.
///
/// # Safety
/// `data` must come from a `pc_dataset_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn pc_dataset_free(data: *mut PcDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Number of subjects, or 0 for null.
///
/// # Safety
/// `data` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_dataset_len(data: *const PcDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.len())
}

/// Number of covariates, or 0 for null.
///
/// # Safety
/// `data` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_dataset_dim(data: *const PcDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.dim())
}

/// Fits the model with default settings and stopping tolerance `eta`.
///
/// # Safety
/// `data` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_fit(data: *const PcDataset, method: PcMethod, eta: f64, out: *mut *mut PcFit) -> PcStatus {
    guard(|| {
        check_out(out)?;
        let data = &by_ref(data, "data")?.0;
        let cfg = FitConfig::default().with_eta(eta);
        cfg.validate()?;
        let result = fit(data, method.into(), &vec![0.0; data.dim()], &cfg)?;
        store(out, PcFit(result))
    })
}

/// Releases a fit. Null is ignored.
///
/// # Safety
/// `fit` must come from [`pc_fit`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn pc_fit_free(fit: *mut PcFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Number of regression coefficients, or 0 for null.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_fit_dim(fit: *const PcFit) -> usize {
    fit.as_ref().map_or(0, |f| f.0.beta.len())
}

/// Copies β̂ into `beta[0..len]`; `len` must equal [`pc_fit_dim`].
///
/// # Safety
/// `fit` must be a live handle and `beta` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_fit_beta(fit: *const PcFit, beta: *mut f64, len: usize) -> PcStatus {
    guard(|| {
        let fit = &by_ref(fit, "fit")?.0;
        out_slice(beta, len, fit.beta.len(), "beta")?.copy_from_slice(&fit.beta);
        Ok(())
    })
}

/// Maximized log-likelihood and convergence flag.
///
/// # Safety
/// `fit` must be a live handle; `loglik` and `converged` may be null.
#[no_mangle]
pub unsafe extern "C" fn pc_fit_summary(fit: *const PcFit, loglik: *mut f64, converged: *mut bool) -> PcStatus {
    guard(|| {
        let fit = &by_ref(fit, "fit")?.0;
        if let Some(l) = loglik.as_mut() {
            *l = fit.loglik;
        }
        if let Some(c) = converged.as_mut() {
            *c = fit.converged;
        }
        Ok(())
    })
}

/// Number of jump points of the baseline estimate, or 0 for null.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pc_fit_lambda_len(fit: *const PcFit) -> usize {
    fit.as_ref().map_or(0, |f| f.0.lambda.jumps().len())
}

/// Copies the baseline step function: value `values[i]` holds on
/// `[times[i], times[i+1])`. `len` must equal [`pc_fit_lambda_len`].
///
/// # Safety
/// `fit` must be a live handle; `times` and `values` must each point to
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_fit_lambda(fit: *const PcFit, times: *mut f64, values: *mut f64, len: usize) -> PcStatus {
    guard(|| {
        let lambda = &by_ref(fit, "fit")?.0.lambda;
        let n = lambda.jumps().len();
        out_slice(times, len, n, "times")?.copy_from_slice(lambda.jumps());
        out_slice(values, len, n, "values")?.copy_from_slice(lambda.values());
        Ok(())
    })
}

/// Nonparametric bootstrap standard errors of β̂ written to `se[0..len]`.
/// `len` must equal the dataset dimension.
///
/// # Safety
/// `data` must be a live handle and `se` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_bootstrap_se(
    data: *const PcDataset,
    method: PcMethod,
    replicates: usize,
    seed: u64,
    eta: f64,
    se: *mut f64,
    len: usize,
) -> PcStatus {
    guard(|| {
        let data = &by_ref(data, "data")?.0;
        let out = out_slice(se, len, data.dim(), "se")?;
        let cfg = FitConfig::default().with_eta(eta);
        cfg.validate()?;
        let result = bootstrap_se(data, method.into(), replicates, seed, &cfg)?;
        out.copy_from_slice(&result.se);
        Ok(())
    })
}

/// Wald statistics `z = estimate / se` and two-sided normal p-values.
///
/// # Safety
/// `estimates` and `se` must point to `len` readable doubles; `zstat` and
/// `pvalue` to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pc_wald(
    estimates: *const f64,
    se: *const f64,
    len: usize,
    zstat: *mut f64,
    pvalue: *mut f64,
) -> PcStatus {
    guard(|| {
        let rows = wald_test(in_slice(estimates, len, "estimates")?, in_slice(se, len, "se")?)?;
        let z = out_slice(zstat, len, len, "zstat")?;
        let p = out_slice(pvalue, len, len, "pvalue")?;
        for (i, row) in rows.iter().enumerate() {
            z[i] = row.zstat;
            p[i] = row.pvalue;
        }
        Ok(())
    })
}

/// Analytic asymptotic covariances of reference scenario 1 or 2 at the
/// three-component `beta0`, written row-major into two 9-element buffers.
///
/// # Safety
/// `beta0` must point to 3 readable doubles; `sigma_pseudo` and `sigma`
/// to 9 writable doubles each.
#[no_mangle]
pub unsafe extern "C" fn pc_asymptotic_cov(
    scenario: u8,
    beta0: *const f64,
    sigma_pseudo: *mut f64,
    sigma: *mut f64,
) -> PcStatus {
    guard(|| {
        let scenario = Scenario::from_number(scenario)?;
        let cov = scenario_cov(scenario, in_slice(beta0, 3, "beta0")?)?;
        let d = cov.pseudo.nrows();
        let ps = out_slice(sigma_pseudo, 9, d * d, "sigma_pseudo")?;
        let ml = out_slice(sigma, 9, d * d, "sigma")?;
        for i in 0..d {
            for j in 0..d {
                ps[i * d + j] = cov.pseudo[(i, j)];
                ml[i * d + j] = cov.full[(i, j)];
            }
        }
        Ok(())
    })
}
