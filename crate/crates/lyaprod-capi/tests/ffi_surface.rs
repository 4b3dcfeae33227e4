//! Drives the C surface the way a foreign caller would: raw pointers in,
//! status codes out. Everything here goes through the exported `extern "C"`
//! functions; the only Rust-side convenience is the `make` helper.

use lyaprod_capi::{
    lyap_classify, lyap_dist_atoms, lyap_dist_binary, lyap_dist_exponential, lyap_dist_free,
    lyap_dist_laplace, lyap_dist_scale, lyap_dist_uniform, lyap_lambda_closed,
    lyap_lambda_estimate, lyap_lambda_quadrature, lyap_log_norm_closed, lyap_log_norm_direct,
    lyap_sigma2_closed, lyap_sigma2_estimate, lyap_sigma2_quadrature, lyap_version, LyapDist,
    LyapForm, LyapMoments, LyapStatus,
};
use std::f64::consts::{LN_2, PI};
use std::ffi::CStr;
use std::ptr;

fn make(build: impl FnOnce(*mut *mut LyapDist) -> LyapStatus) -> *mut LyapDist {
    let mut handle: *mut LyapDist = ptr::null_mut();
    assert_eq!(build(&mut handle), LyapStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn closed_forms_come_back_through_out_pointers() {
    let h = make(|out| lyap_dist_exponential(1.0, out));
    let mut lambda = 0.0;
    assert_eq!(lyap_lambda_closed(h, &mut lambda), LyapStatus::Ok);
    assert_eq!(lambda, 1.0);

    let mut sigma2 = 0.0;
    let mut has = -1;
    assert_eq!(lyap_sigma2_closed(h, &mut sigma2, &mut has), LyapStatus::Ok);
    assert_eq!(has, 1);
    assert!((sigma2 - (PI * PI - 9.0) / 3.0).abs() <= 1e-15, "{sigma2}");
    lyap_dist_free(h);

    // the general uniform has no closed variance; the flag says so and the
    // value slot stays untouched
    let h = make(|out| lyap_dist_uniform(-1.0, 2.0, out));
    let mut untouched = -7.0;
    let mut has = -1;
    assert_eq!(lyap_sigma2_closed(h, &mut untouched, &mut has), LyapStatus::Ok);
    assert_eq!(has, 0);
    assert_eq!(untouched, -7.0);
    lyap_dist_free(h);
}

#[test]
fn estimates_fill_the_moment_table() {
    let h = make(|out| lyap_dist_binary(1.0, 2.0, 0.5, out));
    let mut m = LyapMoments {
        lambda_hat: 0.0,
        m2_hat: 0.0,
        c1_hat: 0.0,
        sigma2_hat: 0.0,
        n_samples: 0,
        stderr_lambda: 0.0,
        stderr_sigma2: 0.0,
    };
    assert_eq!(lyap_sigma2_estimate(h, 100_000, 5, &mut m), LyapStatus::Ok);
    assert_eq!(m.n_samples, 100_000);

    let mut lambda_closed = 0.0;
    assert_eq!(lyap_lambda_closed(h, &mut lambda_closed), LyapStatus::Ok);
    assert!(
        (m.lambda_hat - lambda_closed).abs() <= 0.01,
        "{} vs {lambda_closed}",
        m.lambda_hat
    );
    assert!(m.stderr_lambda.is_finite() && m.stderr_lambda > 0.0);
    assert!(m.stderr_sigma2.is_finite() && m.stderr_sigma2 > 0.0);

    // the two estimate entry points share the path stream, so the scalar
    // variant must reproduce the table's first column
    let (mut lambda, mut stderr) = (0.0, 0.0);
    assert_eq!(
        lyap_lambda_estimate(h, 100_000, 5, &mut lambda, &mut stderr),
        LyapStatus::Ok
    );
    assert_eq!(lambda, m.lambda_hat);
    assert_eq!(stderr, m.stderr_lambda);
    lyap_dist_free(h);
}

#[test]
fn quadrature_reaches_the_exact_constants() {
    let h = make(|out| lyap_dist_exponential(1.0, out));
    let (mut v, mut eb) = (0.0, 0.0);
    assert_eq!(
        lyap_lambda_quadrature(h, 1e-10, 1e-10, &mut v, &mut eb),
        LyapStatus::Ok
    );
    assert!((v - 1.0).abs() <= 1e-6, "{v}");
    assert!(eb > 0.0 && eb <= 1e-6, "{eb}");

    assert_eq!(
        lyap_sigma2_quadrature(h, 1e-10, 1e-10, &mut v, &mut eb),
        LyapStatus::Ok
    );
    assert!((v - (PI * PI - 9.0) / 3.0).abs() <= 1e-6, "{v}");
    lyap_dist_free(h);

    // atomic laws have no density to integrate
    let h = make(|out| lyap_dist_binary(1.0, 2.0, 0.5, out));
    assert_eq!(
        lyap_lambda_quadrature(h, 1e-10, 1e-10, &mut v, &mut eb),
        LyapStatus::Unsupported
    );
    lyap_dist_free(h);
}

#[test]
fn classifier_returns_form_codes() {
    let atoms = [1.0, -3.0 - 2.0 * 2.0f64.sqrt()];
    let weights = [0.4, 0.6];
    let h = make(|out| lyap_dist_atoms(atoms.as_ptr(), weights.as_ptr(), 2, out));
    let mut form = LyapForm::Nondegenerate;
    assert_eq!(lyap_classify(h, 1e-9, &mut form), LyapStatus::Ok);
    assert_eq!(form, LyapForm::FormII);

    // a flat form grows at exactly log 2
    let mut lambda = 0.0;
    assert_eq!(lyap_lambda_closed(h, &mut lambda), LyapStatus::Ok);
    assert!((lambda - LN_2).abs() <= 1e-12, "{lambda}");
    lyap_dist_free(h);

    let h = make(|out| lyap_dist_binary(1.0, 2.0, 0.5, out));
    assert_eq!(lyap_classify(h, 1e-9, &mut form), LyapStatus::Ok);
    assert_eq!(form, LyapForm::Nondegenerate);
    lyap_dist_free(h);

    let h = make(|out| lyap_dist_laplace(1.0, out));
    assert_eq!(lyap_classify(h, 1e-9, &mut form), LyapStatus::Ok);
    assert_eq!(form, LyapForm::NotApplicable);
    lyap_dist_free(h);
}

#[test]
fn product_norms_agree_between_routes() {
    let xs = [0.5, 2.0, -3.0, 1.25];
    let (mut closed, mut direct) = (0.0, 0.0);
    assert_eq!(
        lyap_log_norm_closed(xs.as_ptr(), xs.len(), &mut closed),
        LyapStatus::Ok
    );
    assert_eq!(
        lyap_log_norm_direct(xs.as_ptr(), xs.len(), &mut direct),
        LyapStatus::Ok
    );
    assert!((closed - direct).abs() <= 1e-12 * closed.abs().max(1.0));

    // a cancelling step annihilates the product in both routes
    let zeroing = [1.0, -1.0];
    assert_eq!(
        lyap_log_norm_closed(zeroing.as_ptr(), 2, &mut closed),
        LyapStatus::Ok
    );
    assert_eq!(
        lyap_log_norm_direct(zeroing.as_ptr(), 2, &mut direct),
        LyapStatus::Ok
    );
    assert_eq!(closed, f64::NEG_INFINITY);
    assert_eq!(direct, f64::NEG_INFINITY);

    // zero entries are outside the model
    let bad = [1.0, 0.0];
    assert_eq!(
        lyap_log_norm_closed(bad.as_ptr(), 2, &mut closed),
        LyapStatus::InvalidParams
    );
}

#[test]
fn scaling_preserves_the_constants() {
    let h = make(|out| lyap_dist_laplace(1.7, out));
    let mut scaled: *mut LyapDist = ptr::null_mut();
    assert_eq!(lyap_dist_scale(h, -2.0, &mut scaled), LyapStatus::Ok);

    let (mut before, mut after) = (0.0, 0.0);
    assert_eq!(lyap_lambda_closed(h, &mut before), LyapStatus::Ok);
    assert_eq!(lyap_lambda_closed(scaled, &mut after), LyapStatus::Ok);
    assert_eq!(before, 0.5);
    assert!((before - after).abs() <= 1e-12);
    lyap_dist_free(scaled);
    lyap_dist_free(h);

    // one-sided laws cannot absorb a sign flip
    let h = make(|out| lyap_dist_exponential(1.0, out));
    let mut flipped: *mut LyapDist = ptr::null_mut();
    assert_eq!(lyap_dist_scale(h, -1.0, &mut flipped), LyapStatus::InvalidParams);
    assert!(flipped.is_null());
    lyap_dist_free(h);
}

#[test]
fn nulls_and_bad_parameters_map_to_status_codes() {
    let mut out = 0.0;
    assert_eq!(lyap_lambda_closed(ptr::null(), &mut out), LyapStatus::NullPointer);

    let h = make(|out| lyap_dist_laplace(1.0, out));
    assert_eq!(lyap_lambda_closed(h, ptr::null_mut()), LyapStatus::NullPointer);
    lyap_dist_free(h);

    let mut handle: *mut LyapDist = ptr::null_mut();
    assert_eq!(
        lyap_dist_binary(1.0, -1.0, 0.5, &mut handle),
        LyapStatus::InvalidParams
    );
    assert_eq!(lyap_dist_exponential(-1.0, &mut handle), LyapStatus::InvalidParams);
    assert_eq!(lyap_dist_uniform(0.5, 1.0, &mut handle), LyapStatus::InvalidParams);
    assert_eq!(
        lyap_dist_atoms(ptr::null(), ptr::null(), 2, &mut handle),
        LyapStatus::NullPointer
    );
    let atoms = [1.0];
    let weights = [1.0];
    assert_eq!(
        lyap_dist_atoms(atoms.as_ptr(), weights.as_ptr(), 0, &mut handle),
        LyapStatus::InvalidParams
    );
    assert!(handle.is_null());

    // freeing null is the documented no-op
    lyap_dist_free(ptr::null_mut());
}

#[test]
fn version_and_header_describe_the_surface() {
    let v = unsafe { CStr::from_ptr(lyap_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));

    let header_path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/lyaprod.h");
    let header = std::fs::read_to_string(header_path).unwrap();
    for symbol in [
        "enum LyapStatus",
        "typedef struct LyapMoments",
        "lyap_dist_binary",
        "lyap_dist_free",
        "lyap_lambda_closed",
        "lyap_sigma2_quadrature",
        "lyap_classify",
        "lyap_log_norm_direct",
        "lyap_version",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
}
