//! Closed forms and Monte Carlo estimators for the growth rate `lambda` and
//! the fluctuation variance `sigma^2`.
//!
//! Everything is driven by the product form: with `T_j = log |1 + x_{j+1}/x_j|`,
//!
//! * `lambda = E[T]`,
//! * `sigma^2 = M2 + 2*C1 - 3*lambda^2` where `M2 = E[T^2]` and
//!   `C1 = E[T_j T_{j+1}]` (uncentered lag-1 moment).
//!
//! Consecutive `T_j` share an entry, so the sequence is 1-dependent, never
//! i.i.d.; each standard error below uses the 1-dependent (Diananda) variance,
//! not the i.i.d. formula. For two-atom laws everything collapses further:
//! with `L = log ((a+b)^2 / (4|ab|))` and `q = 1 - p`,
//!
//! * `lambda = log 2 + p*q*L`,
//! * `sigma^2 = p*q*(1 - 3*p*q) * L^2`.
//!
//! `sigma^2` vanishes exactly for three atom configurations: a single atom,
//! and atom pairs with ratio `-3 - 2*sqrt(2)` (form II) or `-3 + 2*sqrt(2)`
//! (form III). [`classify_degeneracy`] recognizes them; `lambda` equals
//! `log 2` on all three.

use serde::Serialize;
use std::f64::consts::{LN_2, PI, SQRT_2};
use thiserror::Error;

use rand_chacha::rand_core::RngCore;
use rayon::prelude::*;

use crate::dist::{DistError, EntryDistribution, PathSampler};
use crate::matrix::y_matrix;
use crate::rng::{stream_rng, PATH_STREAM, REPLICATION_BASE};

/// Atom-pair ratio of the zero-variance form II.
pub const RATIO_FORM_II: f64 = -3.0 - 2.0 * SQRT_2;
/// Atom-pair ratio of the zero-variance form III; the reciprocal of form II.
pub const RATIO_FORM_III: f64 = -3.0 + 2.0 * SQRT_2;

/// Default relative tolerance on the atom ratio when classifying degeneracy.
pub const DEFAULT_DEGENERACY_RTOL: f64 = 1e-9;

/// Retry budget for paths rejected because a factor cancelled exactly.
const PATH_RETRY_CAP: u32 = 100;

/// Moment estimates from one long path of `n_samples` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockMomentEstimate {
    /// Mean of the `T_j`.
    pub lambda_hat: f64,
    /// Mean of the `T_j^2`.
    pub m2_hat: f64,
    /// Mean of the products `T_j * T_{j+1}` (uncentered).
    pub c1_hat: f64,
    /// `m2_hat + 2*c1_hat - 3*lambda_hat^2`.
    pub sigma2_hat: f64,
    /// Path length consumed; the means run over `n_samples - 1` factor terms.
    pub n_samples: u64,
    /// 1-dependent standard error of `lambda_hat`.
    pub stderr_lambda: f64,
    /// Batch-means standard error of `sigma2_hat`; NaN when the path is too
    /// short for 30 batches of at least two terms.
    pub stderr_sigma2: f64,
}

/// Outcome of the degeneracy test for discrete laws.
///
/// The two-atom verdicts are anchored at the first-declared atom (`a` of a
/// binary law, the first listed atom otherwise): FormII means the other atom
/// equals `(-3 - 2*sqrt(2)) * a`, FormIII means `(-3 + 2*sqrt(2)) * a`. The
/// two ratios are reciprocal, so the anchor choice is what makes the verdict
/// well defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form")]
pub enum DegeneracyVerdict {
    /// All mass on one atom.
    FormI { a: f64 },
    /// Atoms `{a, (-3 - 2*sqrt(2)) a}`, `p` on the anchor.
    FormII { a: f64, p: f64 },
    /// Atoms `{a, (-3 + 2*sqrt(2)) a}`, `p` on the anchor.
    FormIII { a: f64, p: f64 },
    Nondegenerate,
    /// Continuous law; the test only applies to atomic ones.
    NotApplicable,
}

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("path of length {0} is too short: {1}")]
    TooShort(u64, &'static str),
    #[error("gave up after {retries} paths in a row hit an exact zero factor")]
    DegenerateSample { retries: u32 },
}

// ---------------------------------------------------------------------------
// closed forms

/// Growth rate in closed form; defined for every valid family.
pub fn lambda_closed_form(dist: &EntryDistribution) -> Result<f64, DistError> {
    dist.validate()?;
    Ok(match dist {
        EntryDistribution::Binary { a, b, p } => {
            if a == b || *p == 0.0 || *p == 1.0 {
                LN_2
            } else {
                LN_2 + p * (1.0 - p) * binary_log_ratio(*a, *b)
            }
        }
        EntryDistribution::Uniform { lo, hi } => uniform_lambda(-lo, *hi),
        EntryDistribution::Exponential { .. } => 1.0,
        EntryDistribution::Laplace { .. } => 0.5,
        EntryDistribution::DiscreteAtoms { .. } => {
            lambda_exact_sums(&dist.charged_atoms().expect("atomic"))
        }
    })
}

/// Fluctuation variance in closed form; `None` for the one family without one
/// (uniform supports that are neither `[0, b]` nor `[-a, a]`).
pub fn sigma2_closed_form(dist: &EntryDistribution) -> Result<Option<f64>, DistError> {
    dist.validate()?;
    Ok(match dist {
        EntryDistribution::Binary { a, b, p } => {
            if a == b || *p == 0.0 || *p == 1.0 {
                Some(0.0)
            } else {
                let pq = p * (1.0 - p);
                let l = binary_log_ratio(*a, *b);
                Some(pq * (1.0 - 3.0 * pq) * l * l)
            }
        }
        EntryDistribution::Uniform { lo, hi } => {
            let (a, b) = (-lo, *hi);
            if a == 0.0 {
                Some((4.0 * PI * PI + 15.0) / 36.0 - (2.0 / 3.0) * LN_2 * (7.0 * LN_2 - 2.0))
            } else if a == b {
                Some((5.0 * PI * PI + 15.0) / 36.0)
            } else {
                None
            }
        }
        EntryDistribution::Exponential { .. } => Some((PI * PI - 9.0) / 3.0),
        EntryDistribution::Laplace { .. } => Some((8.0 * PI * PI - 27.0) / 36.0),
        EntryDistribution::DiscreteAtoms { .. } => {
            Some(sigma2_exact_sums(&dist.charged_atoms().expect("atomic")))
        }
    })
}

/// `log ((a+b)^2 / (4 |ab|))`, the quantity whose vanishing kills the variance
/// of a two-atom law.
fn binary_log_ratio(a: f64, b: f64) -> f64 {
    ((a + b) * (a + b) / (4.0 * (a * b).abs())).ln()
}

/// Growth rate of `Uniform[-a, b]`, `a >= 0 < b`.
///
/// The general expression has a removable `0 * log(inf)` at `a = 0`, so the
/// two special supports get their own branches.
fn uniform_lambda(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        2.0 * LN_2 - 0.5
    } else if a == b {
        LN_2 - 0.5
    } else {
        let s = a + b;
        2.0 * (a * a + b * b) / (s * s) * LN_2 - 0.5
            + (a - b) / (s * s) * (b * (1.0 - a / b).abs().ln() - a * (1.0 - b / a).abs().ln())
    }
}

/// `E[T]` for a finite-atom law, by direct summation over atom pairs.
pub fn lambda_exact_sums(atoms: &[(f64, f64)]) -> f64 {
    let mut sum = 0.0;
    for &(ai, wi) in atoms {
        for &(ak, wk) in atoms {
            sum += wi * wk * (1.0 + ak / ai).abs().ln();
        }
    }
    sum
}

/// `sigma^2` for a finite-atom law, by exact summation.
///
/// The lag-1 term factorizes through the middle atom: conditioned on
/// `x_2 = a_k`, the two logs are independent, so the triple sum reduces to
/// `sum_k w_k * g_in(k) * g_out(k)` with the two conditional means below.
pub fn sigma2_exact_sums(atoms: &[(f64, f64)]) -> f64 {
    let m = atoms.len();
    let t = |i: usize, k: usize| (1.0 + atoms[k].0 / atoms[i].0).abs().ln();
    let mut lambda = 0.0;
    let mut m2 = 0.0;
    let mut g_in = vec![0.0; m]; // E[T(x, a_k)] over the denominator x
    let mut g_out = vec![0.0; m]; // E[T(a_i, z)] over the numerator z
    for i in 0..m {
        for k in 0..m {
            let w = atoms[i].1 * atoms[k].1;
            let v = t(i, k);
            lambda += w * v;
            m2 += w * v * v;
            g_in[k] += atoms[i].1 * v;
            g_out[i] += atoms[k].1 * v;
        }
    }
    let c1: f64 = (0..m).map(|k| atoms[k].1 * g_in[k] * g_out[k]).sum();
    m2 + 2.0 * c1 - 3.0 * lambda * lambda
}

// ---------------------------------------------------------------------------
// degeneracy classification

/// Recognizes the three zero-variance atom configurations.
///
/// `rel_tol` is the relative tolerance on the atom ratio (use
/// [`DEFAULT_DEGENERACY_RTOL`] unless there is a reason not to). Continuous
/// laws report [`DegeneracyVerdict::NotApplicable`]; three or more charged
/// atoms are always nondegenerate.
pub fn classify_degeneracy(
    dist: &EntryDistribution,
    rel_tol: f64,
) -> Result<DegeneracyVerdict, DistError> {
    dist.validate()?;
    let atoms = match dist.charged_atoms() {
        None => return Ok(DegeneracyVerdict::NotApplicable),
        Some(a) => a,
    };
    Ok(match atoms.as_slice() {
        [(a, _)] => DegeneracyVerdict::FormI { a: *a },
        [(a, p), (b, _)] => {
            let ratio = b / a;
            if (ratio - RATIO_FORM_II).abs() <= rel_tol * RATIO_FORM_II.abs() {
                DegeneracyVerdict::FormII { a: *a, p: *p }
            } else if (ratio - RATIO_FORM_III).abs() <= rel_tol * RATIO_FORM_III.abs() {
                DegeneracyVerdict::FormIII { a: *a, p: *p }
            } else {
                DegeneracyVerdict::Nondegenerate
            }
        }
        _ => DegeneracyVerdict::Nondegenerate,
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo estimators

/// Mean and 1-dependent standard error of `lambda` from one path of `n`
/// entries (so `n - 1` block terms).
pub fn lambda_block_estimate(
    dist: &EntryDistribution,
    n: u64,
    seed: u64,
) -> Result<(f64, f64), EstimateError> {
    let est = block_moments(dist, n, seed)?.0;
    Ok((est.lambda_hat, est.stderr_lambda))
}

/// Full block-moment table from one path of `n` entries, including the
/// variance estimate `sigma2_hat` with a batch-means standard error.
pub fn sigma2_block_estimate(
    dist: &EntryDistribution,
    n: u64,
    seed: u64,
) -> Result<BlockMomentEstimate, EstimateError> {
    if n < 3 {
        return Err(EstimateError::TooShort(n, "sigma2 needs lag-1 pairs"));
    }
    Ok(block_moments(dist, n, seed)?.0)
}

/// Block moments plus the sampler's zero-resample count.
pub fn block_moments(
    dist: &EntryDistribution,
    n: u64,
    seed: u64,
) -> Result<(BlockMomentEstimate, u64), EstimateError> {
    dist.validate()?;
    if n < 2 {
        return Err(EstimateError::TooShort(n, "need at least two entries"));
    }
    let mut sampler = PathSampler::new(stream_rng(seed, PATH_STREAM));
    'retry: for _ in 0..=PATH_RETRY_CAP {
        let m = n - 1; // number of T terms
        let batches = batch_count(m);
        let mut acc = BatchAccum::new(m, batches);
        let mut x_prev = sampler.draw(dist);
        let mut t_prev = f64::NAN;
        for j in 0..m {
            let x = sampler.draw(dist);
            let factor = 1.0 + x / x_prev;
            if factor == 0.0 {
                // exact cancellation: the whole path is rejected and redrawn
                continue 'retry;
            }
            let t = factor.abs().ln();
            acc.push_t(j, t);
            if j > 0 {
                acc.push_pair(j - 1, t_prev * t);
            }
            x_prev = x;
            t_prev = t;
        }
        return Ok((acc.finish(), sampler.zero_resamples));
    }
    Err(EstimateError::DegenerateSample {
        retries: PATH_RETRY_CAP,
    })
}

/// Streaming moment sums, partitioned into batches for the sigma^2 stderr.
struct BatchAccum {
    m: u64,
    batches: usize,
    sum_t: f64,
    sum_t2: f64,
    sum_tt: f64,
    b_t2: Vec<f64>,
    b_tt: Vec<f64>,
    b_nt: Vec<u64>,
    b_ntt: Vec<u64>,
}

impl BatchAccum {
    fn new(m: u64, batches: usize) -> Self {
        BatchAccum {
            m,
            batches,
            sum_t: 0.0,
            sum_t2: 0.0,
            sum_tt: 0.0,
            b_t2: vec![0.0; batches],
            b_tt: vec![0.0; batches],
            b_nt: vec![0; batches],
            b_ntt: vec![0; batches],
        }
    }

    fn slot(&self, j: u64) -> usize {
        ((j as u128 * self.batches as u128) / self.m as u128) as usize
    }

    fn push_t(&mut self, j: u64, t: f64) {
        self.sum_t += t;
        self.sum_t2 += t * t;
        if self.batches > 0 {
            let b = self.slot(j);
            self.b_t2[b] += t * t;
            self.b_nt[b] += 1;
        }
    }

    fn push_pair(&mut self, k: u64, tt: f64) {
        self.sum_tt += tt;
        if self.batches > 0 {
            let b = self.slot(k);
            self.b_tt[b] += tt;
            self.b_ntt[b] += 1;
        }
    }

    fn finish(&self) -> BlockMomentEstimate {
        let m = self.m as f64;
        let lambda_hat = self.sum_t / m;
        let m2_hat = self.sum_t2 / m;
        let c1_hat = if self.m >= 2 {
            self.sum_tt / (m - 1.0)
        } else {
            f64::NAN
        };
        let sigma2_hat = m2_hat + 2.0 * c1_hat - 3.0 * lambda_hat * lambda_hat;
        let stderr_lambda = (sigma2_hat.max(0.0) / m).sqrt();
        let stderr_sigma2 = if self.batches > 0 {
            let lam2 = 3.0 * lambda_hat * lambda_hat;
            let per: Vec<f64> = (0..self.batches)
                .map(|b| {
                    self.b_t2[b] / self.b_nt[b] as f64
                        + 2.0 * self.b_tt[b] / self.b_ntt[b] as f64
                        - lam2
                })
                .collect();
            let bn = self.batches as f64;
            let mean = per.iter().sum::<f64>() / bn;
            let var = per.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (bn - 1.0);
            (var / bn).sqrt()
        } else {
            f64::NAN
        };
        BlockMomentEstimate {
            lambda_hat,
            m2_hat,
            c1_hat,
            sigma2_hat,
            n_samples: self.m + 1,
            stderr_lambda,
            stderr_sigma2,
        }
    }
}

/// At least 30 batches with at least two terms each, capped at 200; zero means
/// the path is too short for a batch-means stderr.
fn batch_count(m: u64) -> usize {
    if m < 60 {
        return 0;
    }
    ((m / 1000).clamp(30, 200) as usize).min((m / 2) as usize)
}

/// Direct-route estimate: `reps` independent paths of length `n`, each scored
/// by `log_norm_direct / n`; returns their mean and plain standard error
/// (replications are i.i.d., unlike the in-path block terms).
pub fn lambda_direct_estimate(
    dist: &EntryDistribution,
    n: u64,
    reps: u64,
    seed: u64,
) -> Result<(f64, f64), EstimateError> {
    dist.validate()?;
    if n < 1 || reps < 1 {
        return Err(EstimateError::TooShort(n.min(reps), "need n, reps >= 1"));
    }
    let values = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut sampler = PathSampler::new(stream_rng(seed, REPLICATION_BASE + r));
            direct_path_rate(dist, n, &mut sampler)
        })
        .collect::<Result<Vec<f64>, EstimateError>>()?;
    let mean = values.iter().sum::<f64>() / reps as f64;
    let stderr = if reps >= 2 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (reps as f64 - 1.0);
        (var / reps as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok((mean, stderr))
}

/// `(1/n) log ||S_n||` for one freshly drawn path, multiplying matrices with
/// per-step rescaling; zero products reject the path (capped retries).
fn direct_path_rate<R: RngCore>(
    dist: &EntryDistribution,
    n: u64,
    sampler: &mut PathSampler<R>,
) -> Result<f64, EstimateError> {
    'retry: for _ in 0..=PATH_RETRY_CAP {
        let mut m = y_matrix(sampler.draw(dist));
        let mut acc = 0.0f64;
        let mut norm = m.hs_norm();
        m = m.scaled(1.0 / norm);
        acc += norm.ln();
        for _ in 1..n {
            m = y_matrix(sampler.draw(dist)).mul(&m);
            norm = m.hs_norm();
            if norm == 0.0 {
                continue 'retry;
            }
            m = m.scaled(1.0 / norm);
            acc += norm.ln();
        }
        return Ok(acc / n as f64);
    }
    Err(EstimateError::DegenerateSample {
        retries: PATH_RETRY_CAP,
    })
}
