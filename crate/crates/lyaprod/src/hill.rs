//! Where products of `Y(x)` come from: propagators of strongly unstable
//! second-order cycles.
//!
//! A cycle with trace parameter `h` and coupling `g` propagates via the
//! unimodular matrix
//!
//! ```text
//! M = [ h         (h^2 - 1)/g ]
//!     [ g         h           ]
//! ```
//!
//! which splits as `M = h * Y(h/g) + D` with `Y(x) = [[1, x], [1/x, 1]]` and
//! the defect `D = [[0, -1/g], [0, 0]]`. In Hilbert-Schmidt norm the defect
//! is smaller than the unscaled ratio part by `|h| / (h^2 + g^2)`, and the
//! scale `h` in front of `Y` buys another factor `1/|h|`, so for strongly
//! unstable cycles (`|h|` large) a product of propagators is a product of
//! scaled `Y` matrices plus a vanishing correction. [`unstable_growth_check`]
//! makes that quantitative: it drives both products down the same parameter
//! path and reports the gap between their empirical growth rates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand_chacha::rand_core::RngCore;
use rayon::prelude::*;

use crate::matrix::{y_matrix, Matrix2};
use crate::product::{LogNorm, ProductAccumulator};
use crate::rng::{stream_rng, unit_open, REPLICATION_BASE};

/// One cycle's trace parameter `h` and coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleParams {
    pub h: f64,
    pub g: f64,
}

#[derive(Debug, Error)]
pub enum HillError {
    #[error("coupling g must be finite and nonzero, got {0}")]
    BadCoupling(f64),
    #[error("trace parameter h must be finite and nonzero, got {0}")]
    BadTrace(f64),
    #[error("bad scalar law: {0}")]
    BadLaw(&'static str),
    #[error("need at least 4 cycles and 1 replication, got n={0}, reps={1}")]
    TooShort(u64, u64),
}

impl CycleParams {
    pub fn validate(&self) -> Result<(), HillError> {
        if !(self.g != 0.0 && self.g.is_finite()) {
            return Err(HillError::BadCoupling(self.g));
        }
        if !self.h.is_finite() || self.h == 0.0 {
            return Err(HillError::BadTrace(self.h));
        }
        Ok(())
    }
}

/// The full propagator.
pub fn transfer_matrix(c: &CycleParams) -> Matrix2 {
    Matrix2::new(c.h, (c.h * c.h - 1.0) / c.g, c.g, c.h)
}

/// The split `M = scale * Y(x) + defect`, returned as `(scale, x, defect)`.
pub fn transfer_matrix_split(c: &CycleParams) -> (f64, f64, Matrix2) {
    (c.h, c.h / c.g, Matrix2::new(0.0, -1.0 / c.g, 0.0, 0.0))
}

/// Hilbert-Schmidt norm of the defect relative to the unscaled ratio part:
/// `(1/|g|) / (|g/h| + |h/g|)`, which simplifies to `|h| / (h^2 + g^2)`.
pub fn residual_ratio(c: &CycleParams) -> f64 {
    let (_, x, defect) = transfer_matrix_split(c);
    defect.hs_norm() / y_matrix(x).hs_norm()
}

/// Law of a per-cycle scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScalarLaw {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl ScalarLaw {
    pub fn validate(&self) -> Result<(), HillError> {
        match self {
            ScalarLaw::Constant { value } => {
                if !(value.is_finite() && *value != 0.0) {
                    return Err(HillError::BadLaw("constant must be finite and nonzero"));
                }
            }
            ScalarLaw::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(HillError::BadLaw("uniform needs finite lo < hi"));
                }
                if *lo <= 0.0 && *hi >= 0.0 {
                    return Err(HillError::BadLaw(
                        "uniform support must not contain or touch 0",
                    ));
                }
            }
        }
        Ok(())
    }

    fn draw<R: RngCore>(&self, rng: &mut R) -> f64 {
        match self {
            ScalarLaw::Constant { value } => *value,
            ScalarLaw::Uniform { lo, hi } => lo + (hi - lo) * unit_open(rng),
        }
    }

    /// `E[log |h|]`, in closed form.
    pub fn mean_log_abs(&self) -> f64 {
        match self {
            ScalarLaw::Constant { value } => value.abs().ln(),
            ScalarLaw::Uniform { lo, hi } => {
                // on a sign-definite support |.| maps to another interval
                let (a, b) = if *lo > 0.0 { (*lo, *hi) } else { (-hi, -lo) };
                (b * (b.ln() - 1.0) - a * (a.ln() - 1.0)) / (b - a)
            }
        }
    }

    /// Smallest `|h|` the law can produce.
    fn min_abs(&self) -> f64 {
        match self {
            ScalarLaw::Constant { value } => value.abs(),
            ScalarLaw::Uniform { lo, hi } => lo.abs().min(hi.abs()),
        }
    }
}

/// Outcome of one growth comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthCheck {
    /// Smallest `|h|` the trace law can produce.
    pub h_floor: f64,
    /// Empirical growth rate of the exact propagator product.
    pub rate_exact: f64,
    /// Empirical growth rate of the matched scaled-Y product.
    pub rate_approx: f64,
    /// `|rate_exact - rate_approx|`.
    pub gap: f64,
    /// Largest per-cycle defect ratio seen on any path.
    pub residual_ratio_max: f64,
    pub n: u64,
    pub reps: u64,
}

/// Compares the growth rate of exact propagator products against their
/// scaled-Y approximations along the same random parameter paths.
///
/// Both rates are measured on the second half of each path: the first half
/// burns in the direction alignment, whose O(1) transient would otherwise
/// pollute the comparison at order `log(h)/n`. The two products share the
/// drawn `(h_j, g_j)`, so the reported gap isolates the matrix-level defect
/// and is not Monte Carlo noise; in the unstable regime it shrinks like
/// `1/h^2`. Laws only have to avoid zero: at the stability edge `|h| = 1`
/// the check still runs and reports the collapse of the approximation.
pub fn unstable_growth_check(
    h_law: &ScalarLaw,
    g_law: &ScalarLaw,
    n: u64,
    reps: u64,
    seed: u64,
) -> Result<GrowthCheck, HillError> {
    h_law.validate()?;
    g_law.validate()?;
    if n < 4 || reps < 1 {
        return Err(HillError::TooShort(n, reps));
    }
    let runs: Vec<(f64, f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|r| one_growth_run(h_law, g_law, n, seed, r))
        .collect();
    let k = reps as f64;
    let rate_exact = runs.iter().map(|t| t.0).sum::<f64>() / k;
    let rate_approx = runs.iter().map(|t| t.1).sum::<f64>() / k;
    let residual_ratio_max = runs.iter().map(|t| t.2).fold(0.0, f64::max);
    Ok(GrowthCheck {
        h_floor: h_law.min_abs(),
        rate_exact,
        rate_approx,
        gap: (rate_exact - rate_approx).abs(),
        residual_ratio_max,
        n,
        reps,
    })
}

/// `(rate_exact, rate_approx, residual_ratio_max)` for one parameter path.
fn one_growth_run(
    h_law: &ScalarLaw,
    g_law: &ScalarLaw,
    n: u64,
    seed: u64,
    rep: u64,
) -> (f64, f64, f64) {
    let mut rng = stream_rng(seed, REPLICATION_BASE + rep);
    let cycles: Vec<CycleParams> = (0..n)
        .map(|_| {
            let h = h_law.draw(&mut rng);
            let g = g_law.draw(&mut rng);
            CycleParams { h, g }
        })
        .collect();
    let half = n / 2;
    let window = (n - half) as f64;

    // exact route: rescaled propagator product with a checkpoint at half
    let mut log_acc = 0.0;
    let mut log_at_half = 0.0;
    let mut m = transfer_matrix(&cycles[0]);
    let mut norm = m.hs_norm();
    m = m.scaled(1.0 / norm);
    log_acc += norm.ln();
    let mut worst_ratio = residual_ratio(&cycles[0]);
    for (j, c) in cycles.iter().enumerate().skip(1) {
        worst_ratio = worst_ratio.max(residual_ratio(c));
        m = transfer_matrix(c).mul(&m);
        norm = m.hs_norm();
        m = m.scaled(1.0 / norm);
        log_acc += norm.ln();
        if (j + 1) as u64 == half {
            log_at_half = log_acc;
        }
    }
    let rate_exact = (log_acc - log_at_half) / window;

    // approximate route on the same path: scalars factor out of the product,
    // and the Y part has an exact log norm
    let mut scalar_sum = 0.0;
    let mut scalar_at_half = 0.0;
    let mut acc = ProductAccumulator::new();
    let mut y_at_half = 0.0;
    for (j, c) in cycles.iter().enumerate() {
        scalar_sum += c.h.abs().ln();
        acc.push(c.h / c.g);
        if (j + 1) as u64 == half {
            scalar_at_half = scalar_sum;
            y_at_half = match acc.finish() {
                LogNorm::Finite(v) => v,
                LogNorm::MinusInfinity => f64::NEG_INFINITY,
            };
        }
    }
    let y_total = match acc.finish() {
        LogNorm::Finite(v) => v,
        LogNorm::MinusInfinity => f64::NEG_INFINITY,
    };
    let rate_approx = ((scalar_sum - scalar_at_half) + (y_total - y_at_half)) / window;

    (rate_exact, rate_approx, worst_ratio)
}
