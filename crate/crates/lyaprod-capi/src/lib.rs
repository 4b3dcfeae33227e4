//! C ABI over the lyaprod library.
//!
//! Conventions: every function returns a [`LyapStatus`]; results leave through
//! out-pointers, which are written only on `Ok`. Distributions live behind the
//! opaque `LyapDist` handle; constructors allocate one and `lyap_dist_free`
//! releases it. No function reads a pointer it was handed as null, and every
//! body runs under a panic guard, so a bug surfaces as `Panic` instead of
//! unwinding across the ABI. The `include/lyaprod.h` header is generated from
//! this file at build time.

// Every pointer is null-checked before the dereference; the validity of
// non-null pointers is the caller's half of the C contract, so the entry
// points stay callable without `unsafe` on the Rust side.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use lyaprod::estimators::{
    classify_degeneracy, lambda_closed_form, sigma2_block_estimate, sigma2_closed_form,
    DegeneracyVerdict, EstimateError,
};
use lyaprod::quad::{lambda_quadrature, sigma2_quadrature, QuadError, QuadratureSpec};
use lyaprod::{log_norm_closed, log_norm_direct, EntryDistribution, LogNorm};

/// Result of every call. Zero is success; everything else leaves the
/// out-pointers untouched.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyapStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Parameters outside the model (validation failed).
    InvalidParams = 2,
    /// The operation does not apply to this distribution family.
    Unsupported = 3,
    /// Quadrature failed to reach its tolerance within budget.
    Nonconvergence = 4,
    /// Zero-product retry cap exhausted while sampling.
    DegenerateSample = 5,
    /// Internal panic caught at the boundary; report a bug.
    Panic = 6,
}

/// Degeneracy verdict codes for `lyap_classify`.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyapForm {
    NotApplicable = 0,
    FormI = 1,
    FormII = 2,
    FormIII = 3,
    Nondegenerate = 4,
}

/// Moment table from one Monte Carlo path, mirroring the library's block
/// estimate. `stderr_sigma2` is NaN when the path is too short for batching.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LyapMoments {
    pub lambda_hat: f64,
    pub m2_hat: f64,
    pub c1_hat: f64,
    pub sigma2_hat: f64,
    pub n_samples: u64,
    pub stderr_lambda: f64,
    pub stderr_sigma2: f64,
}

/// Opaque distribution handle.
pub struct LyapDist(EntryDistribution);

fn guarded<F: FnOnce() -> LyapStatus>(f: F) -> LyapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => LyapStatus::Panic,
    }
}

fn estimate_status(e: &EstimateError) -> LyapStatus {
    match e {
        EstimateError::Dist(_) | EstimateError::TooShort(..) => LyapStatus::InvalidParams,
        EstimateError::DegenerateSample { .. } => LyapStatus::DegenerateSample,
    }
}

fn quad_status(e: &QuadError) -> LyapStatus {
    match e {
        QuadError::Dist(_) | QuadError::BadSpec(_) => LyapStatus::InvalidParams,
        QuadError::Unsupported(_) => LyapStatus::Unsupported,
        QuadError::Nonconvergence { .. } => LyapStatus::Nonconvergence,
    }
}

/// Validates `dist` and, on success, writes a fresh handle to `out`.
fn new_handle(dist: EntryDistribution, out: *mut *mut LyapDist) -> LyapStatus {
    if out.is_null() {
        return LyapStatus::NullPointer;
    }
    if dist.validate().is_err() {
        return LyapStatus::InvalidParams;
    }
    let handle = Box::into_raw(Box::new(LyapDist(dist)));
    unsafe { *out = handle };
    LyapStatus::Ok
}

/// Borrows the distribution behind a handle, or fails on null.
fn dist_ref<'a>(dist: *const LyapDist) -> Result<&'a EntryDistribution, LyapStatus> {
    if dist.is_null() {
        return Err(LyapStatus::NullPointer);
    }
    Ok(unsafe { &(*dist).0 })
}

/// Two atoms: `a` with probability `p`, `b` with probability `1 - p`.
#[no_mangle]
pub extern "C" fn lyap_dist_binary(a: f64, b: f64, p: f64, out: *mut *mut LyapDist) -> LyapStatus {
    guarded(|| new_handle(EntryDistribution::Binary { a, b, p }, out))
}

/// Uniform on `[lo, hi]`; requires `lo <= 0 < hi`.
#[no_mangle]
pub extern "C" fn lyap_dist_uniform(lo: f64, hi: f64, out: *mut *mut LyapDist) -> LyapStatus {
    guarded(|| new_handle(EntryDistribution::Uniform { lo, hi }, out))
}

/// Exponential with the given rate.
#[no_mangle]
pub extern "C" fn lyap_dist_exponential(rate: f64, out: *mut *mut LyapDist) -> LyapStatus {
    guarded(|| new_handle(EntryDistribution::Exponential { rate }, out))
}

/// Double exponential with the given scale.
#[no_mangle]
pub extern "C" fn lyap_dist_laplace(scale: f64, out: *mut *mut LyapDist) -> LyapStatus {
    guarded(|| new_handle(EntryDistribution::Laplace { scale }, out))
}

/// Finite support: `len` atoms with `len` matching probability weights.
#[no_mangle]
pub extern "C" fn lyap_dist_atoms(
    atoms: *const f64,
    weights: *const f64,
    len: usize,
    out: *mut *mut LyapDist,
) -> LyapStatus {
    guarded(|| {
        if atoms.is_null() || weights.is_null() {
            return LyapStatus::NullPointer;
        }
        if len == 0 {
            return LyapStatus::InvalidParams;
        }
        let atoms = unsafe { std::slice::from_raw_parts(atoms, len) }.to_vec();
        let weights = unsafe { std::slice::from_raw_parts(weights, len) }.to_vec();
        new_handle(EntryDistribution::DiscreteAtoms { atoms, weights }, out)
    })
}

/// Releases a handle; null is a no-op. Handles must be freed exactly once.
#[no_mangle]
pub extern "C" fn lyap_dist_free(dist: *mut LyapDist) {
    if !dist.is_null() {
        drop(unsafe { Box::from_raw(dist) });
    }
}

/// Writes a new handle for the entrywise-scaled law `c * X` to `out`.
#[no_mangle]
pub extern "C" fn lyap_dist_scale(
    dist: *const LyapDist,
    c: f64,
    out: *mut *mut LyapDist,
) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match d.scale(c) {
            Ok(scaled) => new_handle(scaled, out),
            Err(_) => LyapStatus::InvalidParams,
        }
    })
}

/// Exact growth rate.
#[no_mangle]
pub extern "C" fn lyap_lambda_closed(dist: *const LyapDist, out: *mut f64) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out.is_null() {
            return LyapStatus::NullPointer;
        }
        match lambda_closed_form(d) {
            Ok(v) => {
                unsafe { *out = v };
                LyapStatus::Ok
            }
            Err(_) => LyapStatus::InvalidParams,
        }
    })
}

/// Exact fluctuation variance. `out_has_value` receives 0 when the family has
/// no closed variance (general uniform); `out_value` is written only when it
/// receives 1.
#[no_mangle]
pub extern "C" fn lyap_sigma2_closed(
    dist: *const LyapDist,
    out_value: *mut f64,
    out_has_value: *mut i32,
) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out_value.is_null() || out_has_value.is_null() {
            return LyapStatus::NullPointer;
        }
        match sigma2_closed_form(d) {
            Ok(Some(v)) => {
                unsafe {
                    *out_value = v;
                    *out_has_value = 1;
                }
                LyapStatus::Ok
            }
            Ok(None) => {
                unsafe { *out_has_value = 0 };
                LyapStatus::Ok
            }
            Err(_) => LyapStatus::InvalidParams,
        }
    })
}

/// Monte Carlo growth rate from one path of `n` entries: point estimate and
/// a dependence-aware standard error.
#[no_mangle]
pub extern "C" fn lyap_lambda_estimate(
    dist: *const LyapDist,
    n: u64,
    seed: u64,
    out_lambda: *mut f64,
    out_stderr: *mut f64,
) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out_lambda.is_null() || out_stderr.is_null() {
            return LyapStatus::NullPointer;
        }
        match lyaprod::estimators::lambda_block_estimate(d, n, seed) {
            Ok((lambda, stderr)) => {
                unsafe {
                    *out_lambda = lambda;
                    *out_stderr = stderr;
                }
                LyapStatus::Ok
            }
            Err(e) => estimate_status(&e),
        }
    })
}

/// Full Monte Carlo moment table from one path of `n` entries.
#[no_mangle]
pub extern "C" fn lyap_sigma2_estimate(
    dist: *const LyapDist,
    n: u64,
    seed: u64,
    out: *mut LyapMoments,
) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out.is_null() {
            return LyapStatus::NullPointer;
        }
        match sigma2_block_estimate(d, n, seed) {
            Ok(est) => {
                unsafe {
                    *out = LyapMoments {
                        lambda_hat: est.lambda_hat,
                        m2_hat: est.m2_hat,
                        c1_hat: est.c1_hat,
                        sigma2_hat: est.sigma2_hat,
                        n_samples: est.n_samples,
                        stderr_lambda: est.stderr_lambda,
                        stderr_sigma2: est.stderr_sigma2,
                    };
                }
                LyapStatus::Ok
            }
            Err(e) => estimate_status(&e),
        }
    })
}

/// Growth rate by adaptive quadrature (continuous families only).
#[no_mangle]
pub extern "C" fn lyap_lambda_quadrature(
    dist: *const LyapDist,
    abs_tol: f64,
    rel_tol: f64,
    out_value: *mut f64,
    out_error_bound: *mut f64,
) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out_value.is_null() || out_error_bound.is_null() {
            return LyapStatus::NullPointer;
        }
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            ..QuadratureSpec::default()
        };
        match lambda_quadrature(d, &spec) {
            Ok(r) => {
                unsafe {
                    *out_value = r.value;
                    *out_error_bound = r.error_bound;
                }
                LyapStatus::Ok
            }
            Err(e) => quad_status(&e),
        }
    })
}

/// Fluctuation variance by adaptive quadrature (continuous families only).
#[no_mangle]
pub extern "C" fn lyap_sigma2_quadrature(
    dist: *const LyapDist,
    abs_tol: f64,
    rel_tol: f64,
    out_value: *mut f64,
    out_error_bound: *mut f64,
) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out_value.is_null() || out_error_bound.is_null() {
            return LyapStatus::NullPointer;
        }
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            ..QuadratureSpec::default()
        };
        match sigma2_quadrature(d, &spec) {
            Ok(r) => {
                unsafe {
                    *out_value = r.sigma2;
                    *out_error_bound = r.error_bound;
                }
                LyapStatus::Ok
            }
            Err(e) => quad_status(&e),
        }
    })
}

/// Degeneracy verdict with the given relative tolerance on the atom ratio.
#[no_mangle]
pub extern "C" fn lyap_classify(
    dist: *const LyapDist,
    rtol: f64,
    out_form: *mut LyapForm,
) -> LyapStatus {
    guarded(|| {
        let d = match dist_ref(dist) {
            Ok(d) => d,
            Err(s) => return s,
        };
        if out_form.is_null() {
            return LyapStatus::NullPointer;
        }
        match classify_degeneracy(d, rtol) {
            Ok(v) => {
                let form = match v {
                    DegeneracyVerdict::NotApplicable => LyapForm::NotApplicable,
                    DegeneracyVerdict::FormI { .. } => LyapForm::FormI,
                    DegeneracyVerdict::FormII { .. } => LyapForm::FormII,
                    DegeneracyVerdict::FormIII { .. } => LyapForm::FormIII,
                    DegeneracyVerdict::Nondegenerate => LyapForm::Nondegenerate,
                };
                unsafe { *out_form = form };
                LyapStatus::Ok
            }
            Err(_) => LyapStatus::InvalidParams,
        }
    })
}

/// `log ||Y(xs[len-1]) ... Y(xs[0])||` via the closed product form; writes
/// `-INFINITY` when the product is the zero matrix.
#[no_mangle]
pub extern "C" fn lyap_log_norm_closed(xs: *const f64, len: usize, out: *mut f64) -> LyapStatus {
    guarded(|| {
        if xs.is_null() || out.is_null() {
            return LyapStatus::NullPointer;
        }
        if len == 0 {
            return LyapStatus::InvalidParams;
        }
        let path = unsafe { std::slice::from_raw_parts(xs, len) };
        if path.iter().any(|x| !x.is_finite() || *x == 0.0) {
            return LyapStatus::InvalidParams;
        }
        let v = match log_norm_closed(path) {
            LogNorm::Finite(v) => v,
            LogNorm::MinusInfinity => f64::NEG_INFINITY,
        };
        unsafe { *out = v };
        LyapStatus::Ok
    })
}

/// Same quantity by explicit matrix multiplication.
#[no_mangle]
pub extern "C" fn lyap_log_norm_direct(xs: *const f64, len: usize, out: *mut f64) -> LyapStatus {
    guarded(|| {
        if xs.is_null() || out.is_null() {
            return LyapStatus::NullPointer;
        }
        if len == 0 {
            return LyapStatus::InvalidParams;
        }
        let path = unsafe { std::slice::from_raw_parts(xs, len) };
        if path.iter().any(|x| !x.is_finite() || *x == 0.0) {
            return LyapStatus::InvalidParams;
        }
        unsafe { *out = log_norm_direct(path) };
        LyapStatus::Ok
    })
}

/// Library version as a static null-terminated string.
#[no_mangle]
pub extern "C" fn lyap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
