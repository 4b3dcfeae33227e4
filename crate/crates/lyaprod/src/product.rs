//! Log-norm of the running product `S_n = Y(x_n) ... Y(x_1)`, two ways.
//!
//! The factors are rank one, which collapses the whole product: with
//! `a_n = prod_{j=1}^{n-1} (1 + x_{j+1}/x_j)` one has
//! `S_n = a_n * [[1, x_1], [1/x_n, x_1/x_n]]`, hence
//!
//! `log ||S_n|| = sum_j log |1 + x_{j+1}/x_j|
//!              + (1/2) log ((1 + x_1^2)(1 + 1/x_n^2))`.
//!
//! [`log_norm_closed`] evaluates that identity in streaming form.
//! [`log_norm_direct`] multiplies the matrices out, rescaling by the HS norm
//! after every factor so it survives `n = 1e7` without overflow. The two
//! routes share no arithmetic; tests drive them against each other.

use crate::matrix::y_matrix;

/// Value of `log ||S_n||`; `MinusInfinity` when some factor `1 + x_{j+1}/x_j`
/// is exactly zero, which makes the product the zero matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogNorm {
    Finite(f64),
    MinusInfinity,
}

impl LogNorm {
    /// Collapses to `f64`, mapping `MinusInfinity` to `f64::NEG_INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            LogNorm::Finite(v) => *v,
            LogNorm::MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LogNorm::Finite(_))
    }
}

/// Streaming accumulator for the closed product form.
///
/// Feed entries left to right with [`push`](Self::push); [`finish`](Self::finish)
/// adds the boundary residual. Disjoint chunks of a path combine with
/// [`merge`](Self::merge), which accounts for the one factor straddling the
/// cut, so sharded accumulation is exact, not approximate.
#[derive(Debug, Clone, Copy)]
pub struct ProductAccumulator {
    /// Running `sum log |1 + x_{j+1}/x_j|` over the factors seen so far.
    log_a: f64,
    x_first: f64,
    x_last: f64,
    n: u64,
    /// Set when some factor was exactly zero; the product is the zero matrix
    /// from that point on.
    sign_zero: bool,
}

impl ProductAccumulator {
    pub fn new() -> Self {
        ProductAccumulator {
            log_a: 0.0,
            x_first: f64::NAN,
            x_last: f64::NAN,
            n: 0,
            sign_zero: false,
        }
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Appends one entry; `x` must be nonzero.
    pub fn push(&mut self, x: f64) {
        debug_assert!(x != 0.0);
        if self.n == 0 {
            self.x_first = x;
        } else {
            let factor = 1.0 + x / self.x_last;
            if factor == 0.0 {
                self.sign_zero = true;
            } else {
                self.log_a += factor.abs().ln();
            }
        }
        self.x_last = x;
        self.n += 1;
    }

    /// Combines `self` (left chunk) with `right` (the entries that follow).
    pub fn merge(&self, right: &ProductAccumulator) -> ProductAccumulator {
        if self.n == 0 {
            return *right;
        }
        if right.n == 0 {
            return *self;
        }
        let mut out = ProductAccumulator {
            log_a: self.log_a + right.log_a,
            x_first: self.x_first,
            x_last: right.x_last,
            n: self.n + right.n,
            sign_zero: self.sign_zero || right.sign_zero,
        };
        let seam = 1.0 + right.x_first / self.x_last;
        if seam == 0.0 {
            out.sign_zero = true;
        } else {
            out.log_a += seam.abs().ln();
        }
        out
    }

    /// `log ||S_n||` for the entries pushed so far; panics on an empty
    /// accumulator (there is no norm of an empty product to report).
    pub fn finish(&self) -> LogNorm {
        assert!(self.n > 0, "finish() on an empty ProductAccumulator");
        if self.sign_zero {
            return LogNorm::MinusInfinity;
        }
        // residual: (1/2) log((1 + x_first^2)(1 + 1/x_last^2)), split into two
        // log1p calls so extreme first/last entries cannot overflow the product
        let residual = 0.5
            * ((self.x_first * self.x_first).ln_1p()
                + (1.0 / (self.x_last * self.x_last)).ln_1p());
        LogNorm::Finite(self.log_a + residual)
    }
}

impl Default for ProductAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Closed product form of `log ||Y(x_n) ... Y(x_1)||`; `xs` must be non-empty
/// and nonzero.
pub fn log_norm_closed(xs: &[f64]) -> LogNorm {
    let mut acc = ProductAccumulator::new();
    for &x in xs {
        acc.push(x);
    }
    acc.finish()
}

/// `log ||Y(x_n) ... Y(x_1)||` by explicit matrix multiplication.
///
/// The running product is rescaled to unit HS norm after every factor and the
/// logs of the scales accumulate, so there is no overflow or underflow for
/// any path length. Returns `f64::NEG_INFINITY` when the product becomes the
/// zero matrix (exact cancellation inside a factor).
pub fn log_norm_direct(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "log_norm_direct needs at least one entry");
    let mut m = y_matrix(xs[0]);
    let mut acc = 0.0f64;
    let mut norm = m.hs_norm();
    if norm == 0.0 {
        return f64::NEG_INFINITY;
    }
    m = m.scaled(1.0 / norm);
    acc += norm.ln();
    for &x in &xs[1..] {
        m = y_matrix(x).mul(&m);
        norm = m.hs_norm();
        if norm == 0.0 {
            return f64::NEG_INFINITY;
        }
        m = m.scaled(1.0 / norm);
        acc += norm.ln();
    }
    acc
}
