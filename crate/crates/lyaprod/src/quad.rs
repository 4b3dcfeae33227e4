//! Deterministic quadrature route to `lambda` and `sigma^2` for the
//! continuous entry families.
//!
//! Everything reduces to iterated one-dimensional integrals of
//! `T(x, z) = log |1 + z/x|` by the substitution `x = Q(u)` with `Q` the
//! quantile function: each expectation becomes an integral over the unit
//! interval, and unbounded supports need no truncation. Writing
//!
//! * `g_out(v) = E_z[T(v, z)]` (v in the denominator slot),
//! * `g_in(v)  = E_x[T(x, v)]` (v in the numerator slot),
//! * `h(v)     = E_z[T(v, z)^2]`,
//!
//! and using that `T_j` and `T_{j+1}` are independent given their shared
//! entry, the three targets are plain unit-interval integrals:
//!
//! ```text
//! lambda = int g_out(Q(u)) du
//! M2     = int h(Q(u)) du
//! C1     = int g_in(Q(u)) g_out(Q(u)) du        (uncentered lag-1 moment)
//! sigma^2 = M2 + 2 C1 - 3 lambda^2
//! ```
//!
//! The integrands have integrable log singularities where an entry or a
//! factor vanishes. Each one's location is known exactly (a quantile of 0 or
//! of `-v`), so the initial partition places panel boundaries there and the
//! adaptive refinement never evaluates at a singular point: Gauss-Kronrod
//! nodes are interior to their panel.
//!
//! The whole route shares no code with the closed forms in `estimators` and
//! no randomness with the simulation route, which is what makes the
//! three-way agreement checks meaningful.

use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

use crate::dist::{DistError, EntryDistribution};

/// Tolerances and budgets for one quadrature call.
///
/// `tail_quantile` seeds panel boundaries at `1 - tail_quantile` and
/// `tail_quantile`, isolating the far tails of unbounded laws where the
/// quantile transform compresses them; it does not truncate anything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisection budget per one-dimensional integral.
    pub max_subdivisions: u32,
    pub tail_quantile: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 20_000,
            tail_quantile: 1.0 - 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadError::BadSpec("abs_tol must be positive and finite"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadError::BadSpec("rel_tol must be positive and finite"));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadError::BadSpec("max_subdivisions must be at least 1"));
        }
        if !(self.tail_quantile > 0.5 && self.tail_quantile < 1.0) {
            return Err(QuadError::BadSpec("tail_quantile must lie in (0.5, 1)"));
        }
        Ok(())
    }

    /// Same budgets, tolerances divided by `factor`; inner integrals run
    /// tighter than the outer one so their error stays subordinate.
    fn tightened(&self, factor: f64) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            ..*self
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("unsupported distribution: {0}")]
    Unsupported(&'static str),
    #[error("bad quadrature spec: {0}")]
    BadSpec(&'static str),
    #[error("quadrature did not converge: error bound {achieved:e} above target {requested:e}")]
    Nonconvergence { achieved: f64, requested: f64 },
}

/// One converged integral with an honest error bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Outer adaptive error estimate plus the worst inner one.
    pub error_bound: f64,
    /// Bisections spent by the outer integral.
    pub subdivisions: u32,
}

/// `sigma^2` with the three integrals it was assembled from.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sigma2Quadrature {
    pub sigma2: f64,
    /// First-order propagation of the three component bounds.
    pub error_bound: f64,
    pub lambda: QuadResult,
    pub m2: QuadResult,
    pub c1: QuadResult,
}

// ---------------------------------------------------------------------------
// 15-point Gauss-Kronrod panel rule (QUADPACK dqk15 constants, kept at their
// published 33-digit precision)

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// QUADPACK's error heuristic: the raw Gauss-Kronrod difference, damped by
/// the integrand's deviation scale `resasc` and floored at roundoff level of
/// `resabs`.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut abserr = err.abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * 1.0f64.min((200.0 * abserr / resasc).powf(1.5));
    }
    let floor_scale = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > floor_scale {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    abserr
}

/// Integral and error estimate of `f` over `[a, b]` from one 15-point panel.
fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let fc = f(center);
    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let scale = half.abs();
    let err = rescale_error((resk - resg) * half, resabs * scale, resasc * scale);
    (resk * half, err)
}

// ---------------------------------------------------------------------------
// globally adaptive driver

struct Panel {
    error: f64,
    value: f64,
    a: f64,
    b: f64,
    /// Insertion order; ties on error refine the oldest panel first so the
    /// whole schedule is deterministic.
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct IntegralOut {
    value: f64,
    error: f64,
    splits: u32,
    converged: bool,
}

/// Globally adaptive integration of `f` over [0, 1].
///
/// `seeds` become initial panel boundaries (only interior points count), so
/// known singularities must be listed there. Refinement always bisects the
/// panel with the largest error estimate; panels too narrow to bisect retire
/// but keep contributing their error. The final value and bound are resummed
/// left to right, independent of refinement order.
fn adaptive(f: &mut dyn FnMut(f64) -> f64, seeds: &[f64], spec: &QuadratureSpec) -> IntegralOut {
    // Deep bisection next to a boundary can round a Kronrod node onto 0 or 1
    // exactly; the integrands live on the open interval, so pin every node one
    // step inside. The displaced mass is below roundoff.
    let mut pinned =
        move |u: f64| f(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0));
    let f = &mut pinned as &mut dyn FnMut(f64) -> f64;
    let mut cuts: Vec<f64> = seeds
        .iter()
        .copied()
        .filter(|s| s.is_finite() && *s > 0.0 && *s < 1.0)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.insert(0, 0.0);
    cuts.push(1.0);

    let mut heap = BinaryHeap::new();
    let mut retired: Vec<Panel> = Vec::new();
    let mut seq = 0u64;
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error) = gk15(f, a, b);
        total_value += value;
        total_error += error;
        heap.push(Panel {
            error,
            value,
            a,
            b,
            seq,
        });
        seq += 1;
    }

    let mut splits = 0u32;
    while total_error > spec.target(total_value) && splits < spec.max_subdivisions {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            retired.push(worst);
            continue;
        }
        splits += 1;
        total_value -= worst.value;
        total_error -= worst.error;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(f, a, b);
            total_value += value;
            total_error += error;
            heap.push(Panel {
                error,
                value,
                a,
                b,
                seq,
            });
            seq += 1;
        }
    }

    let mut panels: Vec<Panel> = retired;
    panels.extend(heap.into_vec());
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum::<f64>();
    let error = panels.iter().map(|p| p.error).sum::<f64>();
    IntegralOut {
        value,
        error,
        splits,
        converged: error <= spec.target(value),
    }
}

// ---------------------------------------------------------------------------
// integrands

/// `log |1 + num/den|`, clamped away from the two measure-zero poles so a
/// node that lands exactly on one cannot inject an infinity.
fn log_abs_factor(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        return 0.0;
    }
    let r = 1.0 + num / den;
    r.abs().max(f64::MIN_POSITIVE).ln()
}

/// Panel boundaries for an inner integral in `w`: the integrand is singular
/// where the integrated entry `Q(w)` hits 0 or `-v`.
fn inner_seeds(dist: &EntryDistribution, v: f64, spec: &QuadratureSpec) -> Vec<f64> {
    let mut seeds = vec![1.0 - spec.tail_quantile, spec.tail_quantile];
    if let Some(c) = dist.cdf(0.0) {
        seeds.push(c);
    }
    if let Some(c) = dist.cdf(-v) {
        seeds.push(c);
    }
    seeds
}

/// Panel boundaries for the outer integral in `u`: `g_out` and `h` blow up
/// (integrably) where `Q(u) = 0`, and a bounded support puts kinks where
/// `-Q(u)` crosses a support endpoint.
fn outer_seeds(dist: &EntryDistribution, spec: &QuadratureSpec) -> Vec<f64> {
    let mut seeds = vec![1.0 - spec.tail_quantile, spec.tail_quantile];
    if let Some(c) = dist.cdf(0.0) {
        seeds.push(c);
    }
    if let EntryDistribution::Uniform { lo, hi } = dist {
        for edge in [-lo, -hi] {
            if let Some(c) = dist.cdf(edge) {
                seeds.push(c);
            }
        }
    }
    seeds
}

fn g_out(dist: &EntryDistribution, v: f64, spec: &QuadratureSpec) -> IntegralOut {
    let mut f = |w: f64| log_abs_factor(dist.quantile(w), v);
    adaptive(&mut f, &inner_seeds(dist, v, spec), spec)
}

fn g_in(dist: &EntryDistribution, v: f64, spec: &QuadratureSpec) -> IntegralOut {
    let mut f = |w: f64| log_abs_factor(v, dist.quantile(w));
    adaptive(&mut f, &inner_seeds(dist, v, spec), spec)
}

fn h(dist: &EntryDistribution, v: f64, spec: &QuadratureSpec) -> IntegralOut {
    let mut f = |w: f64| {
        let t = log_abs_factor(dist.quantile(w), v);
        t * t
    };
    adaptive(&mut f, &inner_seeds(dist, v, spec), spec)
}

/// Tracks the worst inner integral seen while the outer one runs.
struct InnerWatch {
    worst_error: Cell<f64>,
    all_converged: Cell<bool>,
}

impl InnerWatch {
    fn new() -> Self {
        InnerWatch {
            worst_error: Cell::new(0.0),
            all_converged: Cell::new(true),
        }
    }

    fn note(&self, error: f64, converged: bool) {
        if error > self.worst_error.get() {
            self.worst_error.set(error);
        }
        if !converged {
            self.all_converged.set(false);
        }
    }
}

fn continuous_only(dist: &EntryDistribution) -> Result<(), QuadError> {
    dist.validate()?;
    if !dist.is_continuous() {
        return Err(QuadError::Unsupported(
            "atomic laws have exact finite sums; quadrature covers the continuous families",
        ));
    }
    Ok(())
}

/// Growth rate by nested quadrature.
pub fn lambda_quadrature(
    dist: &EntryDistribution,
    spec: &QuadratureSpec,
) -> Result<QuadResult, QuadError> {
    spec.validate()?;
    continuous_only(dist)?;
    let inner_spec = spec.tightened(4.0);
    let watch = InnerWatch::new();
    let mut f = |u: f64| {
        let inner = g_out(dist, dist.quantile(u), &inner_spec);
        watch.note(inner.error, inner.converged);
        inner.value
    };
    let out = adaptive(&mut f, &outer_seeds(dist, spec), spec);
    let error_bound = out.error + watch.worst_error.get();
    if !(out.converged && watch.all_converged.get()) {
        return Err(QuadError::Nonconvergence {
            achieved: error_bound,
            requested: spec.target(out.value),
        });
    }
    Ok(QuadResult {
        value: out.value,
        error_bound,
        subdivisions: out.splits,
    })
}

/// Fluctuation variance by nested quadrature: `M2 + 2 C1 - 3 lambda^2` with
/// each piece integrated separately and the bounds propagated first order.
pub fn sigma2_quadrature(
    dist: &EntryDistribution,
    spec: &QuadratureSpec,
) -> Result<Sigma2Quadrature, QuadError> {
    spec.validate()?;
    continuous_only(dist)?;
    // lambda enters squared, scaled by 3, so it gets the tightest budget
    let lambda = lambda_quadrature(dist, &spec.tightened(8.0))?;
    let inner_spec = spec.tightened(4.0);

    let watch_m2 = InnerWatch::new();
    let mut f_m2 = |u: f64| {
        let inner = h(dist, dist.quantile(u), &inner_spec);
        watch_m2.note(inner.error, inner.converged);
        inner.value
    };
    let m2_out = adaptive(&mut f_m2, &outer_seeds(dist, spec), spec);
    let m2 = QuadResult {
        value: m2_out.value,
        error_bound: m2_out.error + watch_m2.worst_error.get(),
        subdivisions: m2_out.splits,
    };
    if !(m2_out.converged && watch_m2.all_converged.get()) {
        return Err(QuadError::Nonconvergence {
            achieved: m2.error_bound,
            requested: spec.target(m2.value),
        });
    }

    let watch_c1 = InnerWatch::new();
    let mut f_c1 = |u: f64| {
        let v = dist.quantile(u);
        let into = g_in(dist, v, &inner_spec);
        let from = g_out(dist, v, &inner_spec);
        let product_error = into.value.abs() * from.error
            + from.value.abs() * into.error
            + into.error * from.error;
        watch_c1.note(product_error, into.converged && from.converged);
        into.value * from.value
    };
    let c1_out = adaptive(&mut f_c1, &outer_seeds(dist, spec), spec);
    let c1 = QuadResult {
        value: c1_out.value,
        error_bound: c1_out.error + watch_c1.worst_error.get(),
        subdivisions: c1_out.splits,
    };
    if !(c1_out.converged && watch_c1.all_converged.get()) {
        return Err(QuadError::Nonconvergence {
            achieved: c1.error_bound,
            requested: spec.target(c1.value),
        });
    }

    let sigma2 = m2.value + 2.0 * c1.value - 3.0 * lambda.value * lambda.value;
    let error_bound = m2.error_bound
        + 2.0 * c1.error_bound
        + 3.0 * (2.0 * lambda.value.abs() + lambda.error_bound) * lambda.error_bound;
    Ok(Sigma2Quadrature {
        sigma2,
        error_bound,
        lambda,
        m2,
        c1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn panel_rule_is_exact_on_low_degree_polynomials() {
        // the 15-point Kronrod rule integrates degree <= 22 exactly
        let (v, e) = gk15(&mut |x: f64| x.powi(10), 0.0, 1.0);
        assert!((v - 1.0 / 11.0).abs() < 1e-15, "{v}");
        assert!(e < 1e-13, "{e}");
    }

    #[test]
    fn adaptive_handles_an_endpoint_log_singularity() {
        let mut f = |w: f64| w.max(f64::MIN_POSITIVE).ln();
        let out = adaptive(&mut f, &[], &spec());
        assert!(out.converged);
        assert!((out.value + 1.0).abs() <= out.error.max(1e-12), "{}", out.value);
    }

    #[test]
    fn adaptive_respects_interior_seeds() {
        // |w - 1/3|^(-1/2) integrates to 2(sqrt(1/3) + sqrt(2/3)); the
        // singular point sits on a seeded boundary so nodes never hit it
        let c = 1.0 / 3.0;
        let mut f = |w: f64| (w - c).abs().sqrt().recip().min(1e12);
        let out = adaptive(&mut f, &[c], &spec());
        let exact = 2.0 * (c.sqrt() + (1.0 - c).sqrt());
        assert!((out.value - exact).abs() <= 1e-7, "{} vs {exact}", out.value);
    }

    #[test]
    fn lambda_matches_closed_forms_on_every_continuous_family() {
        let cases = [
            (EntryDistribution::Exponential { rate: 1.0 }, 1.0),
            (EntryDistribution::Exponential { rate: 4.0 }, 1.0),
            (EntryDistribution::Laplace { scale: 1.0 }, 0.5),
            (EntryDistribution::Laplace { scale: 3.0 }, 0.5),
            (
                EntryDistribution::Uniform { lo: 0.0, hi: 1.0 },
                2.0 * LN_2 - 0.5,
            ),
            (
                EntryDistribution::Uniform { lo: -2.0, hi: 2.0 },
                LN_2 - 0.5,
            ),
            // no simple closed form on this support; frozen reference value
            (
                EntryDistribution::Uniform { lo: -1.0, hi: 2.0 },
                0.42419624074659375,
            ),
        ];
        for (dist, want) in cases {
            let got = lambda_quadrature(&dist, &spec()).unwrap();
            assert!(
                (got.value - want).abs() <= 1e-8,
                "{dist:?}: {} vs {want}, bound {}",
                got.value,
                got.error_bound
            );
            assert!(got.error_bound <= 1e-7, "{dist:?}: bound {}", got.error_bound);
        }
    }

    #[test]
    fn sigma2_matches_closed_forms() {
        let cases = [
            (
                EntryDistribution::Exponential { rate: 1.0 },
                (PI * PI - 9.0) / 3.0,
            ),
            (
                EntryDistribution::Laplace { scale: 1.0 },
                (8.0 * PI * PI - 27.0) / 36.0,
            ),
            (
                EntryDistribution::Uniform { lo: 0.0, hi: 1.0 },
                (4.0 * PI * PI + 15.0) / 36.0 - (2.0 / 3.0) * LN_2 * (7.0 * LN_2 - 2.0),
            ),
            (
                EntryDistribution::Uniform { lo: -2.0, hi: 2.0 },
                (5.0 * PI * PI + 15.0) / 36.0,
            ),
        ];
        for (dist, want) in cases {
            let got = sigma2_quadrature(&dist, &spec()).unwrap();
            assert!(
                (got.sigma2 - want).abs() <= 1e-6,
                "{dist:?}: {} vs {want}",
                got.sigma2
            );
        }
    }

    #[test]
    fn exponential_component_integrals_hit_their_exact_values() {
        // for unit-rate exponential entries the pieces are exact:
        // M2 = 2 and C1 = pi^2/6 - 1
        let got = sigma2_quadrature(&EntryDistribution::Exponential { rate: 1.0 }, &spec())
            .unwrap();
        assert!((got.m2.value - 2.0).abs() <= 1e-7, "{}", got.m2.value);
        assert!(
            (got.c1.value - (PI * PI / 6.0 - 1.0)).abs() <= 1e-7,
            "{}",
            got.c1.value
        );
        assert!((got.lambda.value - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn sigma2_on_the_general_uniform_support_matches_frozen_reference() {
        // independently computed to 25 digits; nothing else in the crate
        // knows this number
        let dist = EntryDistribution::Uniform { lo: -1.0, hi: 2.0 };
        let got = sigma2_quadrature(&dist, &spec()).unwrap();
        assert!(
            (got.sigma2 - 1.3117211632657496).abs() <= 1e-6,
            "{}",
            got.sigma2
        );
    }

    #[test]
    fn scale_invariance_holds_through_the_quadrature_route() {
        let base = EntryDistribution::Laplace { scale: 1.0 };
        let scaled = base.scale(-2.5).unwrap();
        let a = lambda_quadrature(&base, &spec()).unwrap();
        let b = lambda_quadrature(&scaled, &spec()).unwrap();
        assert!((a.value - b.value).abs() <= a.error_bound + b.error_bound);
    }

    #[test]
    fn atomic_laws_are_refused() {
        let d = EntryDistribution::Binary { a: 1.0, b: 2.0, p: 0.5 };
        assert!(matches!(
            lambda_quadrature(&d, &spec()),
            Err(QuadError::Unsupported(_))
        ));
    }

    #[test]
    fn bad_specs_are_refused() {
        let d = EntryDistribution::Exponential { rate: 1.0 };
        for bad in [
            QuadratureSpec { abs_tol: 0.0, ..spec() },
            QuadratureSpec { rel_tol: -1.0, ..spec() },
            QuadratureSpec { max_subdivisions: 0, ..spec() },
            QuadratureSpec { tail_quantile: 0.3, ..spec() },
            QuadratureSpec { tail_quantile: 1.0, ..spec() },
        ] {
            assert!(matches!(
                lambda_quadrature(&d, &bad),
                Err(QuadError::BadSpec(_))
            ));
        }
    }

    #[test]
    fn starved_budget_reports_nonconvergence() {
        let d = EntryDistribution::Laplace { scale: 1.0 };
        let starved = QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_subdivisions: 3,
            ..spec()
        };
        assert!(matches!(
            lambda_quadrature(&d, &starved),
            Err(QuadError::Nonconvergence { .. })
        ));
    }
}
