//! Slow, independent reference implementations used to cross-check the
//! primary paths: nested adaptive quadrature for the basis, dense linear
//! algebra for the normal equations and hat matrix, and oversampled least
//! squares for reproduction coefficients.
//!
//! Nothing here calls the closed-form convolution, the banded solver, the
//! penalty operator or the collocation code.

mod dense;
mod quadrature;

pub use dense::{dense_gcv_selection, dense_solve_reference, reproduction_oracle, DenseReference};
pub use quadrature::{adaptive_simpson, integrate_panels, quadrature_convolution_eval, QuadratureSpec};
