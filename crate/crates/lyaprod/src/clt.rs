//! Monte Carlo harness for the fluctuation theory: normalized scores
//! `(log ||S_n|| - n lambda) / sqrt(n)` over independent replications, a
//! Kolmogorov-Smirnov check of their limit law `N(0, sigma^2)`, and the
//! even/odd cancellation experiment that makes the zero-variance mechanism
//! visible.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rayon::prelude::*;

use crate::dist::{DistError, EntryDistribution, PathSampler};
use crate::estimators::{lambda_block_estimate, lambda_closed_form, EstimateError};
use crate::product::log_norm_direct;
use crate::rng::{stream_rng, CALIBRATION_STREAM, REPLICATION_BASE};
use crate::stats::{ks_distance, mean, normal_cdf, pearson_correlation, sample_variance};

/// Asymptotic 1% critical value of the Kolmogorov statistic `sqrt(reps) * D`.
const KOLMOGOROV_CRIT_1PCT: f64 = 1.6276;

/// Retry budget for replications whose product collapses to the zero matrix.
const REP_RETRY_CAP: u32 = 100;

/// Where the centering constant comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSource {
    /// Exact closed form; available for every supported family.
    ClosedForm,
    /// A long-path estimate drawn from a dedicated calibration stream, so
    /// the centering never reuses the replication randomness.
    Estimate,
}

#[derive(Debug, Error)]
pub enum CltError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("need at least 2 replications, got {0}")]
    TooFewReps(u64),
    #[error("need a path of at least 2 entries, got {0}")]
    PathTooShort(u64),
    #[error("reference variance must be positive, got {0}")]
    ZeroVariance(f64),
    #[error("even/odd split needs an even number of factors, got {0}")]
    UnevenLength(u64),
    #[error("gave up after {retries} replications in a row collapsed to zero")]
    DegenerateSample { retries: u32 },
}

/// Normalized scores from independent replications.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizedSample {
    pub n: u64,
    pub reps: u64,
    /// Centering constant actually used.
    pub lambda_used: f64,
    pub lambda_source: LambdaSource,
    pub empirical_mean: f64,
    /// Should approach `sigma^2` as `n` grows.
    pub empirical_var: f64,
    /// One score per replication, in replication order.
    #[serde(skip)]
    pub scores: Vec<f64>,
}

/// Kolmogorov-Smirnov verdict against `N(0, sigma2_ref)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub threshold_1pct: f64,
    pub reject_at_1pct: bool,
    pub sigma2_ref: f64,
    pub reps: u64,
}

/// Draws `reps` paths of `n` entries and returns the normalized scores
/// `(log ||S_n|| - n lambda) / sqrt(n)`.
///
/// Each score runs the explicit matrix product, not the closed product
/// form, so the harness exercises the same arithmetic a consumer of the
/// matrices would. Replications use independent seed streams, so results
/// are reproducible for a given `(seed, reps)` no matter the thread count.
pub fn simulate_normalized(
    dist: &EntryDistribution,
    n: u64,
    reps: u64,
    seed: u64,
    lambda_source: LambdaSource,
) -> Result<NormalizedSample, CltError> {
    dist.validate()?;
    if n < 2 {
        return Err(CltError::PathTooShort(n));
    }
    if reps < 2 {
        return Err(CltError::TooFewReps(reps));
    }
    let lambda = match lambda_source {
        LambdaSource::ClosedForm => lambda_closed_form(dist)?,
        LambdaSource::Estimate => {
            // one calibration path an order longer than the replications,
            // within fixed bounds
            let n_cal = (10 * n).clamp(1_000_000, 10_000_000);
            lambda_block_estimate_on_stream(dist, n_cal, seed)?
        }
    };
    let scores = (0..reps)
        .into_par_iter()
        .map(|r| one_score(dist, n, lambda, seed, r))
        .collect::<Result<Vec<f64>, CltError>>()?;
    Ok(NormalizedSample {
        n,
        reps,
        lambda_used: lambda,
        lambda_source,
        empirical_mean: mean(&scores),
        empirical_var: sample_variance(&scores),
        scores,
    })
}

fn lambda_block_estimate_on_stream(
    dist: &EntryDistribution,
    n_cal: u64,
    seed: u64,
) -> Result<f64, CltError> {
    // the calibration stream id is disjoint from every replication stream
    let (lambda, _) = lambda_block_estimate(dist, n_cal, seed ^ CALIBRATION_STREAM)?;
    Ok(lambda)
}

fn one_score(
    dist: &EntryDistribution,
    n: u64,
    lambda: f64,
    seed: u64,
    rep: u64,
) -> Result<f64, CltError> {
    let mut sampler = PathSampler::new(stream_rng(seed, REPLICATION_BASE + rep));
    let mut path = vec![0.0f64; n as usize];
    for _ in 0..=REP_RETRY_CAP {
        for slot in path.iter_mut() {
            *slot = sampler.draw(dist);
        }
        let log_norm = log_norm_direct(&path);
        if log_norm.is_finite() {
            return Ok((log_norm - n as f64 * lambda) / (n as f64).sqrt());
        }
    }
    Err(CltError::DegenerateSample {
        retries: REP_RETRY_CAP,
    })
}

/// One-sample KS test of `scores` against `N(0, sigma2)` at the 1% level.
pub fn ks_against_normal(scores: &[f64], sigma2: f64) -> Result<KsOutcome, CltError> {
    if scores.len() < 2 {
        return Err(CltError::TooFewReps(scores.len() as u64));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(CltError::ZeroVariance(sigma2));
    }
    let sd = sigma2.sqrt();
    let mut sorted = scores.to_vec();
    let statistic = ks_distance(&mut sorted, |x| normal_cdf(x / sd));
    let threshold_1pct = KOLMOGOROV_CRIT_1PCT / (scores.len() as f64).sqrt();
    Ok(KsOutcome {
        statistic,
        threshold_1pct,
        reject_at_1pct: statistic > threshold_1pct,
        sigma2_ref: sigma2,
        reps: scores.len() as u64,
    })
}

/// One replication of the even/odd experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CancellationRun {
    /// Centered sum over all `n` factors.
    pub s_total: f64,
    /// Centered sum over even-indexed factors (0-based: 0, 2, ...).
    pub s_even: f64,
    pub s_odd: f64,
}

/// Summary of the even/odd cancellation experiment.
///
/// The factor terms are 1-dependent, so same-parity terms are independent:
/// each half-sum obeys an ordinary i.i.d. CLT with per-term variance `C0`.
/// For the zero-variance laws the halves cancel: their correlation tends to
/// -1 and the per-term variance of the total tends to 0, which is exactly
/// how `sigma^2 = 0` coexists with individually diffusive halves.
#[derive(Debug, Clone, Serialize)]
pub struct CancellationReport {
    pub n: u64,
    pub reps: u64,
    pub lambda: f64,
    /// `Var(s_total) / n`.
    pub var_total_over_n: f64,
    /// `Var(s_even) / (n/2)`.
    pub var_even_over_half: f64,
    pub var_odd_over_half: f64,
    pub correlation_even_odd: f64,
    #[serde(skip)]
    pub runs: Vec<CancellationRun>,
}

/// Splits the centered factor sum of each replication by index parity.
///
/// `n` is the number of factors (so paths have `n + 1` entries) and must be
/// even for the halves to be comparable.
pub fn even_odd_cancellation(
    dist: &EntryDistribution,
    n: u64,
    reps: u64,
    seed: u64,
) -> Result<CancellationReport, CltError> {
    dist.validate()?;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(CltError::UnevenLength(n));
    }
    if reps < 2 {
        return Err(CltError::TooFewReps(reps));
    }
    let lambda = lambda_closed_form(dist)?;
    let runs = (0..reps)
        .into_par_iter()
        .map(|r| one_cancellation_run(dist, n, lambda, seed, r))
        .collect::<Result<Vec<CancellationRun>, CltError>>()?;
    let total: Vec<f64> = runs.iter().map(|r| r.s_total).collect();
    let even: Vec<f64> = runs.iter().map(|r| r.s_even).collect();
    let odd: Vec<f64> = runs.iter().map(|r| r.s_odd).collect();
    let half = n as f64 / 2.0;
    Ok(CancellationReport {
        n,
        reps,
        lambda,
        var_total_over_n: sample_variance(&total) / n as f64,
        var_even_over_half: sample_variance(&even) / half,
        var_odd_over_half: sample_variance(&odd) / half,
        correlation_even_odd: pearson_correlation(&even, &odd),
        runs,
    })
}

fn one_cancellation_run(
    dist: &EntryDistribution,
    n: u64,
    lambda: f64,
    seed: u64,
    rep: u64,
) -> Result<CancellationRun, CltError> {
    let mut sampler = PathSampler::new(stream_rng(seed, REPLICATION_BASE + rep));
    'retry: for _ in 0..=REP_RETRY_CAP {
        let mut x_prev = sampler.draw(dist);
        let mut s_even = 0.0;
        let mut s_odd = 0.0;
        for j in 0..n {
            let x = sampler.draw(dist);
            let factor = 1.0 + x / x_prev;
            if factor == 0.0 {
                continue 'retry;
            }
            let centered = factor.abs().ln() - lambda;
            if j % 2 == 0 {
                s_even += centered;
            } else {
                s_odd += centered;
            }
            x_prev = x;
        }
        return Ok(CancellationRun {
            s_total: s_even + s_odd,
            s_even,
            s_odd,
        });
    }
    Err(CltError::DegenerateSample {
        retries: REP_RETRY_CAP,
    })
}
