//! Exponential second-order difference operator.
//!
//! `(Δ a)_j = a_j - 2 e^{-αh} a_{j-1} + e^{-2αh} a_{j-2}`, which annihilates
//! `e^{-αx}` and `x e^{-αx}` sampled on a grid of spacing `h`. At `α = 0` it is
//! the ordinary second difference.

use crate::banded::RowBanded;
use crate::basis::check_frequency;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyOperator {
    alpha: f64,
    h: f64,
    n: usize,
    stencil: [f64; 3],
}

impl PenaltyOperator {
    /// Operator mapping `n + 2` coefficients to `n` differences.
    pub fn new(alpha: f64, h: f64, n: usize) -> Result<Self> {
        check_frequency(alpha, h)?;
        if n < 1 {
            return Err(invalid("penalty needs at least one row"));
        }
        let e = (-alpha * h).exp();
        Ok(Self {
            alpha,
            h,
            n,
            stencil: [e * e, -2.0 * e, 1.0],
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.n + 2
    }

    /// Coefficients `(e^{-2αh}, -2e^{-αh}, 1)` in ascending column order.
    pub fn stencil(&self) -> [f64; 3] {
        self.stencil
    }

    pub fn apply_to_sequence(&self, a: &[f64]) -> Result<Vec<f64>> {
        if a.len() != self.cols() {
            return Err(invalid(format!(
                "sequence of length {} for an operator on {} coefficients",
                a.len(),
                self.cols()
            )));
        }
        let [w0, w1, w2] = self.stencil;
        Ok(a.windows(3)
            .map(|s| {
                let mut acc = w0 * s[0];
                acc += w1 * s[1];
                acc += w2 * s[2];
                acc
            })
            .collect())
    }

    /// The `n × (n + 2)` banded matrix; row `r` holds the stencil in columns
    /// `r, r + 1, r + 2`.
    pub fn build_matrix(&self) -> RowBanded {
        let mut d = RowBanded::zeros(self.n, self.n + 2, 3);
        for r in 0..self.n {
            d.set_row(r, r, &self.stencil);
        }
        d
    }

    /// `‖D a‖²`.
    pub fn penalty_value(&self, a: &[f64]) -> Result<f64> {
        Ok(self.apply_to_sequence(a)?.iter().map(|v| v * v).sum())
    }
}

/// `u(x) - 2 e^{-αh} u(x - h) + e^{-2αh} u(x - 2h)`.
pub fn apply_to_function(f: impl Fn(f64) -> f64, x: f64, alpha: f64, h: f64) -> f64 {
    let e = (-alpha * h).exp();
    f(x) - 2.0 * e * f(x - h) + e * e * f(x - 2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::HpError;

    #[test]
    fn geometric_sequence_is_annihilated() {
        let (alpha, h) = (0.8, 0.25);
        let op = PenaltyOperator::new(alpha, h, 6).unwrap();
        let a: Vec<f64> = (0..8).map(|j| (-alpha * j as f64 * h).exp()).collect();
        for v in op.apply_to_sequence(&a).unwrap() {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn classical_second_difference() {
        let op = PenaltyOperator::new(0.0, 0.3, 5).unwrap();
        let a = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(
            op.apply_to_sequence(&a).unwrap(),
            vec![1.0, -2.0, 1.0, 0.0, 0.0]
        );
        assert_eq!(op.stencil(), [1.0, -2.0, 1.0]);
    }

    #[test]
    fn constant_sequence() {
        let (alpha, h) = (-1.3, 0.4);
        let op = PenaltyOperator::new(alpha, h, 4).unwrap();
        let expected = (1.0 - (-alpha * h).exp()).powi(2);
        for v in op.apply_to_sequence(&[1.0; 6]).unwrap() {
            assert!((v - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn function_form() {
        let (alpha, h) = (1.0, 1.0);
        let v = apply_to_function(|x: f64| (alpha * x).exp(), 0.0, alpha, h);
        assert!((v - (1.0 - (-2.0f64).exp()).powi(2)).abs() < 1e-15);
        let v = apply_to_function(|x: f64| x * (-alpha * x).exp(), 2.5, alpha, h);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn single_row_matrix() {
        let (alpha, h) = (0.5, 2.0);
        let d = PenaltyOperator::new(alpha, h, 1).unwrap().build_matrix();
        assert_eq!(d.rows(), 1);
        assert_eq!(d.cols(), 3);
        let e = (-alpha * h).exp();
        assert_eq!(d.row(0), &[e * e, -2.0 * e, 1.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            PenaltyOperator::new(1.0, 1.0, 0),
            Err(HpError::InvalidArgument(_))
        ));
        assert!(matches!(
            PenaltyOperator::new(-400.0, 1.0, 3),
            Err(HpError::Range(_))
        ));
        let op = PenaltyOperator::new(1.0, 1.0, 3).unwrap();
        assert!(op.apply_to_sequence(&[1.0; 4]).is_err());
    }
}
