//! Dense 2x2 real matrices, just enough for the product kernels.

use serde::Serialize;

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Matrix2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Matrix2 {
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Matrix2 { m11, m12, m21, m22 }
    }

    /// `self * rhs` (self applied after rhs).
    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        Matrix2 {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    /// Hilbert-Schmidt (Frobenius) norm, the root of the entry-square sum.
    ///
    /// Entries above about 1e150 in magnitude overflow the intermediate
    /// squares; the product routines rescale every step, so they never get
    /// there for any distribution this crate ships.
    pub fn hs_norm(&self) -> f64 {
        (self.m11 * self.m11
            + self.m12 * self.m12
            + self.m21 * self.m21
            + self.m22 * self.m22)
            .sqrt()
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn scaled(&self, s: f64) -> Matrix2 {
        Matrix2 {
            m11: s * self.m11,
            m12: s * self.m12,
            m21: s * self.m21,
            m22: s * self.m22,
        }
    }

    pub fn add(&self, rhs: &Matrix2) -> Matrix2 {
        Matrix2 {
            m11: self.m11 + rhs.m11,
            m12: self.m12 + rhs.m12,
            m21: self.m21 + rhs.m21,
            m22: self.m22 + rhs.m22,
        }
    }
}

/// The rank-one factor `[[1, x], [1/x, 1]]`; requires `x != 0`.
///
/// Its rows are proportional, so `det = 0` and the HS norm collapses to
/// `|x| + 1/|x|`.
pub fn y_matrix(x: f64) -> Matrix2 {
    debug_assert!(x != 0.0, "y_matrix needs a nonzero entry");
    Matrix2::new(1.0, x, 1.0 / x, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_is_plain_row_into_column() {
        let a = Matrix2::new(1.0, 2.0, 3.0, 4.0);
        let b = Matrix2::new(5.0, 6.0, 7.0, 8.0);
        assert_eq!(a.mul(&b), Matrix2::new(19.0, 22.0, 43.0, 50.0));
    }

    #[test]
    fn hs_norm_fixed_value() {
        // sqrt(1 + 1 + 0.25 + 0.25) = sqrt(2.5)
        let m = Matrix2::new(1.0, 1.0, -0.5, -0.5);
        assert_eq!(m.hs_norm(), 2.5f64.sqrt());
    }

    #[test]
    fn y_matrix_norm_is_abs_x_plus_inverse() {
        // |x| + 1/|x| squared expands to exactly the entry-square sum
        for &x in &[0.5f64, -0.5, 1.0, -2.0, 3.7, -1e-6, 1e6, -123.456] {
            let want = x.abs() + 1.0 / x.abs();
            let got = y_matrix(x).hs_norm();
            assert!(
                (got - want).abs() <= 1e-14 * want,
                "x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn y_matrix_is_singular() {
        for &x in &[0.5, -2.0, 10.0] {
            assert!(y_matrix(x).det().abs() <= 1e-16);
        }
    }
}
