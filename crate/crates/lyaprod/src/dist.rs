//! Entry distributions for the i.i.d. matrix entries `x_j`.
//!
//! The model needs `x_j != 0` (the matrix carries `1/x_j`) and, for a finite
//! growth rate, `E[log(1 + |x|)]` and `E[log(1 + 1/|x|)]` both finite. Every
//! family below satisfies the moment conditions for all legal parameters with
//! a single discrete exception: a pair of atoms at `a` and `-a`, which makes a
//! product factor exactly zero with positive probability. Validation rejects
//! that pair outright.

use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::unit_open;

/// Law of the i.i.d. entries.
///
/// The JSON form mirrors the variant names: `{"kind": "binary", "a": 1.0,
/// "b": 2.0, "p": 0.5}`, `{"kind": "uniform", "lo": -1.0, "hi": 2.0}`,
/// `{"kind": "exponential", "rate": 1.0}`, `{"kind": "laplace", "scale": 1.0}`,
/// `{"kind": "atoms", "atoms": [...], "weights": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EntryDistribution {
    /// Two atoms: `a` with probability `p`, `b` with probability `1 - p`.
    Binary { a: f64, b: f64, p: f64 },
    /// Uniform on `[lo, hi]` with `lo <= 0 < hi`.
    Uniform { lo: f64, hi: f64 },
    /// Exponential with the given rate; density `rate * exp(-rate x)` on `x > 0`.
    Exponential { rate: f64 },
    /// Double exponential; density `exp(-|x| / scale) / (2 scale)`.
    Laplace { scale: f64 },
    /// Finite support with the given probability weights.
    #[serde(rename = "atoms")]
    DiscreteAtoms { atoms: Vec<f64>, weights: Vec<f64> },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("an atom at exactly 0 is outside the model (entries appear as 1/x)")]
    ZeroAtom,
    #[error("atoms {0} and {1} cancel (sum exactly 0), so a product factor vanishes with positive probability")]
    CancellingAtoms(f64, f64),
    #[error("weights must be finite, strictly positive, and sum to 1 (got sum {0})")]
    BadWeights(f64),
    #[error("support must satisfy lo <= 0 < hi with finite bounds (got [{0}, {1}])")]
    BadSupport(f64, f64),
    #[error("{0} must be positive and finite (got {1})")]
    NonPositiveScale(&'static str, f64),
    #[error("scale factor {0} would take this family outside its parameterization")]
    UnsupportedScale(f64),
    #[error("atoms must be pairwise distinct (atom {0} repeats)")]
    RepeatedAtom(f64),
}

/// Weights are accepted when they sum to 1 within this slack, then used as
/// given (they are never renormalized, so reports echo the caller's numbers).
const WEIGHT_SUM_SLACK: f64 = 1e-9;

impl EntryDistribution {
    /// Checks the parameter constraints of the variant.
    pub fn validate(&self) -> Result<(), DistError> {
        match self {
            EntryDistribution::Binary { a, b, p } => {
                for v in [a, b] {
                    if !v.is_finite() {
                        return Err(DistError::BadSupport(*a, *b));
                    }
                    if *v == 0.0 {
                        return Err(DistError::ZeroAtom);
                    }
                }
                if a + b == 0.0 {
                    return Err(DistError::CancellingAtoms(*a, *b));
                }
                // p = 0 and p = 1 are accepted (the law collapses to one atom).
                if !(*p >= 0.0 && *p <= 1.0) {
                    return Err(DistError::BadWeights(*p));
                }
                Ok(())
            }
            EntryDistribution::Uniform { lo, hi } => {
                if lo.is_finite() && hi.is_finite() && *lo <= 0.0 && 0.0 < *hi {
                    Ok(())
                } else {
                    Err(DistError::BadSupport(*lo, *hi))
                }
            }
            EntryDistribution::Exponential { rate } => {
                if rate.is_finite() && *rate > 0.0 {
                    Ok(())
                } else {
                    Err(DistError::NonPositiveScale("rate", *rate))
                }
            }
            EntryDistribution::Laplace { scale } => {
                if scale.is_finite() && *scale > 0.0 {
                    Ok(())
                } else {
                    Err(DistError::NonPositiveScale("scale", *scale))
                }
            }
            EntryDistribution::DiscreteAtoms { atoms, weights } => {
                if atoms.is_empty() || atoms.len() != weights.len() {
                    return Err(DistError::BadWeights(weights.iter().sum()));
                }
                for &a in atoms {
                    if !a.is_finite() {
                        return Err(DistError::BadSupport(a, a));
                    }
                    if a == 0.0 {
                        return Err(DistError::ZeroAtom);
                    }
                }
                for i in 0..atoms.len() {
                    for k in (i + 1)..atoms.len() {
                        if atoms[i] == atoms[k] {
                            return Err(DistError::RepeatedAtom(atoms[i]));
                        }
                        if atoms[i] + atoms[k] == 0.0 {
                            return Err(DistError::CancellingAtoms(atoms[i], atoms[k]));
                        }
                    }
                }
                let sum: f64 = weights.iter().sum();
                let all_pos = weights.iter().all(|w| w.is_finite() && *w > 0.0);
                if !all_pos || (sum - 1.0).abs() > WEIGHT_SUM_SLACK {
                    return Err(DistError::BadWeights(sum));
                }
                Ok(())
            }
        }
    }

    /// Law of `c * x` for `x` with this law, staying inside the family.
    ///
    /// All targets computed by this crate depend only on the ratios of
    /// consecutive entries, so they are invariant under any nonzero `c`.
    /// Restrictions: a uniform support can only be flipped (`c < 0`) when
    /// `lo < 0` strictly, and a negative multiple of an exponential is not an
    /// exponential; both cases return [`DistError::UnsupportedScale`]. The
    /// Laplace family is symmetric, so any `c != 0` maps to `Laplace(|c| s)`.
    pub fn scale(&self, c: f64) -> Result<EntryDistribution, DistError> {
        if !c.is_finite() || c == 0.0 {
            return Err(DistError::UnsupportedScale(c));
        }
        let scaled = match self {
            EntryDistribution::Binary { a, b, p } => EntryDistribution::Binary {
                a: c * a,
                b: c * b,
                p: *p,
            },
            EntryDistribution::Uniform { lo, hi } => {
                if c > 0.0 {
                    EntryDistribution::Uniform {
                        lo: c * lo,
                        hi: c * hi,
                    }
                } else if *lo < 0.0 {
                    EntryDistribution::Uniform {
                        lo: c * hi,
                        hi: c * lo,
                    }
                } else {
                    return Err(DistError::UnsupportedScale(c));
                }
            }
            EntryDistribution::Exponential { rate } => {
                if c > 0.0 {
                    EntryDistribution::Exponential { rate: rate / c }
                } else {
                    return Err(DistError::UnsupportedScale(c));
                }
            }
            EntryDistribution::Laplace { scale } => EntryDistribution::Laplace {
                scale: c.abs() * scale,
            },
            EntryDistribution::DiscreteAtoms { atoms, weights } => {
                EntryDistribution::DiscreteAtoms {
                    atoms: atoms.iter().map(|a| c * a).collect(),
                    weights: weights.clone(),
                }
            }
        };
        scaled.validate()?;
        Ok(scaled)
    }

    /// Quantile (inverse CDF) at `u`, which must lie in the open interval
    /// (0, 1). Atomic laws get the usual right-continuous step inverse. Both
    /// the sampler and the integration routines draw through this function,
    /// so a law and its samples can never disagree.
    pub(crate) fn quantile(&self, u: f64) -> f64 {
        debug_assert!(0.0 < u && u < 1.0);
        match self {
            EntryDistribution::Binary { a, b, p } => {
                if u < *p {
                    *a
                } else {
                    *b
                }
            }
            EntryDistribution::Uniform { lo, hi } => lo + (hi - lo) * u,
            // ln_1p keeps full precision at both ends of (0, 1)
            EntryDistribution::Exponential { rate } => -(-u).ln_1p() / rate,
            EntryDistribution::Laplace { scale } => {
                if u < 0.5 {
                    scale * (2.0 * u).ln()
                } else {
                    -scale * (2.0 * (1.0 - u)).ln()
                }
            }
            EntryDistribution::DiscreteAtoms { atoms, weights } => {
                let mut acc = 0.0;
                for (a, w) in atoms.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return *a;
                    }
                }
                *atoms.last().expect("validated atoms are non-empty")
            }
        }
    }

    /// CDF for the continuous families; `None` for atomic laws.
    pub(crate) fn cdf(&self, x: f64) -> Option<f64> {
        Some(match self {
            EntryDistribution::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            EntryDistribution::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            EntryDistribution::Laplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            _ => return None,
        })
    }

    /// Charged atoms as `(value, weight)` pairs in declaration order, merging
    /// coinciding atoms; `None` for the continuous families.
    ///
    /// A binary law with `p` at 0 or 1, or with `a == b`, collapses to a
    /// single charged atom here.
    pub fn charged_atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            EntryDistribution::Binary { a, b, p } => Some(if a == b {
                vec![(*a, 1.0)]
            } else if *p == 0.0 {
                vec![(*b, 1.0)]
            } else if *p == 1.0 {
                vec![(*a, 1.0)]
            } else {
                vec![(*a, *p), (*b, 1.0 - *p)]
            }),
            EntryDistribution::DiscreteAtoms { atoms, weights } => Some(
                atoms
                    .iter()
                    .zip(weights)
                    .map(|(&a, &w)| (a, w))
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.charged_atoms().is_none()
    }
}

/// Draws entry sequences and counts the float-zero rejections.
///
/// A continuous draw can land on exactly 0.0 (for the uniform family with
/// `lo < 0` the probability is about one ulp worth of mass). Such draws are
/// rejected and redrawn because `1/x_j` must exist; the counter records how
/// often that happened so long runs can report it.
pub struct PathSampler<R> {
    rng: R,
    pub zero_resamples: u64,
}

impl<R: RngCore> PathSampler<R> {
    pub fn new(rng: R) -> Self {
        PathSampler {
            rng,
            zero_resamples: 0,
        }
    }

    /// One draw from `dist`, guaranteed nonzero.
    pub fn draw(&mut self, dist: &EntryDistribution) -> f64 {
        loop {
            let x = self.draw_raw(dist);
            if x != 0.0 {
                return x;
            }
            self.zero_resamples += 1;
        }
    }

    /// A path of `count` draws.
    pub fn sample(&mut self, dist: &EntryDistribution, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(dist)).collect()
    }

    fn draw_raw(&mut self, dist: &EntryDistribution) -> f64 {
        dist.quantile(unit_open(&mut self.rng))
    }
}
