//! Penalized least-squares fitting of HP-splines.
//!
//! The coefficients solve `(Bᵀ W B + λ Dᵀ D) a = Bᵀ W y`, where `B` is the
//! HB-spline collocation matrix and `D` the exponential difference penalty.

use crate::banded::{BandCholesky, SymBanded};
use crate::basis::HbBasis;
use crate::error::{invalid, HpError, Result};
use crate::grid::KnotGrid;
use crate::penalty::PenaltyOperator;

/// Data sites, values and positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    sites: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl FitProblem {
    pub fn new(sites: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let m = sites.len();
        Self::with_weights(sites, values, vec![1.0; m])
    }

    pub fn with_weights(sites: Vec<f64>, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let m = sites.len();
        if m < 2 {
            return Err(invalid(format!("need at least 2 data points, got {m}")));
        }
        if values.len() != m || weights.len() != m {
            return Err(invalid(format!(
                "length mismatch: {m} sites, {} values, {} weights",
                values.len(),
                weights.len()
            )));
        }
        if sites.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(invalid("sites and values must be finite"));
        }
        if let Some(i) = sites.windows(2).position(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "sites must be strictly increasing (index {})",
                i + 1
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(invalid(format!("weight {i} is not positive")));
        }
        Ok(Self {
            sites,
            values,
            weights,
        })
    }

    pub fn sites(&self) -> &[f64] {
        &self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn unit_weights(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Same sites and weights, different values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::with_weights(self.sites.clone(), values, self.weights.clone())
    }

    /// `[x_1, x_m]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.sites[0], *self.sites.last().unwrap())
    }
}

/// Default knot count `max(4, ⌊m/4⌋ + 1)`.
pub fn default_knots(m: usize) -> usize {
    4.max(m / 4 + 1)
}

/// Assembled normal equations.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    pub matrix: SymBanded,
    pub rhs: Vec<f64>,
}

/// Everything needed to solve for one or more values of λ on a fixed grid.
#[derive(Debug, Clone)]
pub struct SystemParts {
    pub basis: HbBasis,
    pub penalty: PenaltyOperator,
    pub collocation: crate::banded::RowBanded,
    /// `Bᵀ W B`
    pub gram: SymBanded,
    /// `Dᵀ D`
    pub penalty_gram: SymBanded,
    /// `Bᵀ W y`
    pub rhs: Vec<f64>,
}

impl SystemParts {
    pub fn new(problem: &FitProblem, grid: &KnotGrid, alpha: f64) -> Result<Self> {
        let basis = HbBasis::new(*grid, alpha)?;
        let penalty = PenaltyOperator::new(alpha, grid.h(), grid.n())?;
        let collocation = basis.collocation_matrix(problem.sites())?;
        let size = grid.basis_len();
        let mut gram = SymBanded::zeros(size, 3);
        collocation.accumulate_gram(Some(problem.weights()), 1.0, &mut gram);
        let mut penalty_gram = SymBanded::zeros(size, 2);
        penalty.build_matrix().accumulate_gram(None, 1.0, &mut penalty_gram);
        let rhs = collocation.transpose_weighted_matvec(problem.weights(), problem.values());
        Ok(Self {
            basis,
            penalty,
            collocation,
            gram,
            penalty_gram,
            rhs,
        })
    }

    /// `Bᵀ W B + λ Dᵀ D`.
    pub fn matrix(&self, lambda: f64) -> SymBanded {
        let size = self.gram.dim();
        let mut a = self.gram.clone();
        for i in 0..size {
            for j in i.saturating_sub(2)..=i {
                a.add(i, j, lambda * self.penalty_gram.get(i, j));
            }
        }
        a
    }

    /// Factorizes the system for `lambda`, applying the solvability rules.
    pub fn factor(&self, problem: &FitProblem, lambda: f64) -> Result<BandCholesky> {
        check_lambda(lambda)?;
        let size = self.gram.dim();
        if lambda == 0.0 && problem.len() < size {
            return Err(HpError::Singular {
                index: problem.len(),
                guidance: format!(
                    "lambda = 0 needs at least {size} data points for {size} coefficients; \
                     increase lambda or reduce the knot count"
                ),
            });
        }
        BandCholesky::factor(&self.matrix(lambda))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// Builds `(Bᵀ W B + λ Dᵀ D, Bᵀ W y)`; the matrix has three sub-diagonals.
pub fn assemble_system(
    problem: &FitProblem,
    grid: &KnotGrid,
    alpha: f64,
    lambda: f64,
) -> Result<NormalEquations> {
    check_lambda(lambda)?;
    let parts = SystemParts::new(problem, grid, alpha)?;
    Ok(NormalEquations {
        matrix: parts.matrix(lambda),
        rhs: parts.rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitDiagnostics {
    /// Weighted residual sum of squares at the data sites.
    pub rss: f64,
    pub effective_df: Option<f64>,
    pub condition_estimate: Option<f64>,
}

/// A fitted HP-spline `s(x) = Σ_j a_j B_j(x)` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct HpSplineModel {
    coefficients: Vec<f64>,
    basis: HbBasis,
    lambda: f64,
    diagnostics: FitDiagnostics,
}

impl HpSplineModel {
    /// Rebuilds a model from stored parts, e.g. after loading from disk.
    pub fn from_parts(grid: KnotGrid, alpha: f64, lambda: f64, coefficients: Vec<f64>) -> Result<Self> {
        check_lambda(lambda)?;
        if coefficients.len() != grid.basis_len() {
            return Err(invalid(format!(
                "{} coefficients for a grid with {} basis functions",
                coefficients.len(),
                grid.basis_len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coefficients must be finite"));
        }
        Ok(Self {
            coefficients,
            basis: HbBasis::new(grid, alpha)?,
            lambda,
            diagnostics: FitDiagnostics::default(),
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn grid(&self) -> &KnotGrid {
        self.basis.grid()
    }

    pub fn alpha(&self) -> f64 {
        self.basis.alpha()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn diagnostics(&self) -> &FitDiagnostics {
        &self.diagnostics
    }

    pub fn basis(&self) -> &HbBasis {
        &self.basis
    }

    /// `s(x)`; sites outside `[a, b]` are rejected.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.basis.combine(&self.coefficients, x)
    }

    pub fn predict(&self, sites: &[f64]) -> Result<Vec<f64>> {
        sites.iter().map(|&x| self.eval(x)).collect()
    }
}

/// Fits on the grid `[x_1, x_m]` with `n` knots.
pub fn fit(problem: &FitProblem, alpha: f64, n: usize, lambda: f64) -> Result<HpSplineModel> {
    let (a, b) = problem.domain();
    fit_on_grid(problem, &KnotGrid::new(a, b, n)?, alpha, lambda)
}

pub fn fit_on_grid(
    problem: &FitProblem,
    grid: &KnotGrid,
    alpha: f64,
    lambda: f64,
) -> Result<HpSplineModel> {
    let parts = SystemParts::new(problem, grid, alpha)?;
    fit_with_parts(problem, &parts, lambda)
}

pub(crate) fn fit_with_parts(
    problem: &FitProblem,
    parts: &SystemParts,
    lambda: f64,
) -> Result<HpSplineModel> {
    let chol = parts.factor(problem, lambda)?;
    let coefficients = chol.solve(&parts.rhs)?;
    let fitted = parts.collocation.matvec(&coefficients)?;
    let rss = weighted_rss(problem, &fitted);
    Ok(HpSplineModel {
        coefficients,
        basis: parts.basis.clone(),
        lambda,
        diagnostics: FitDiagnostics {
            rss,
            effective_df: None,
            condition_estimate: Some(chol.condition_estimate()),
        },
    })
}

pub(crate) fn weighted_rss(problem: &FitProblem, fitted: &[f64]) -> f64 {
    let terms = problem
        .values()
        .iter()
        .zip(fitted)
        .zip(problem.weights())
        .map(|((y, f), w)| w * (y - f) * (y - f));
    compensated_sum(terms)
}

/// Model predictions at `sites`.
pub fn predict(model: &HpSplineModel, sites: &[f64]) -> Result<Vec<f64>> {
    model.predict(sites)
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exponential moments `(Σ e^{-αx_i} v_i, Σ x_i e^{-αx_i} v_i)`.
pub fn exponential_moments(sites: &[f64], values: &[f64], alpha: f64) -> Result<(f64, f64)> {
    if sites.len() != values.len() {
        return Err(invalid(format!(
            "{} sites but {} values",
            sites.len(),
            values.len()
        )));
    }
    let weighted = || sites.iter().zip(values).map(|(x, v)| (x, (-alpha * x).exp() * v));
    Ok((
        compensated_sum(weighted().map(|(_, ev)| ev)),
        compensated_sum(weighted().map(|(x, ev)| x * ev)),
    ))
}

/// Absolute exponential moments `(Σ |e^{-αx_i} v_i|, Σ |x_i e^{-αx_i} v_i|)`,
/// the scale for relative moment discrepancies.
pub fn absolute_exponential_moments(sites: &[f64], values: &[f64], alpha: f64) -> Result<(f64, f64)> {
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let abs_sites: Vec<f64> = sites.iter().map(|x| x.abs()).collect();
    let (m0, _) = exponential_moments(sites, &abs, alpha)?;
    let m1 = compensated_sum(
        abs_sites
            .iter()
            .zip(sites)
            .zip(&abs)
            .map(|((ax, x), v)| ax * (-alpha * x).exp() * v),
    );
    Ok((m0, m1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub rss: f64,
    pub max_abs_residual: f64,
    /// Fitted minus raw `Σ e^{-αx} v`.
    pub moment0_discrepancy: f64,
    /// Fitted minus raw `Σ x e^{-αx} v`.
    pub moment1_discrepancy: f64,
    pub moment0_relative: f64,
    pub moment1_relative: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub n: usize,
}

impl FitReport {
    pub fn max_relative_moment_discrepancy(&self) -> f64 {
        self.moment0_relative.max(self.moment1_relative)
    }
}

pub fn fit_report(model: &HpSplineModel, problem: &FitProblem) -> Result<FitReport> {
    let fitted = model.predict(problem.sites())?;
    let alpha = model.alpha();
    let rss = weighted_rss(problem, &fitted);
    let max_abs_residual = problem
        .values()
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f).abs())
        .fold(0.0, f64::max);
    let raw = exponential_moments(problem.sites(), problem.values(), alpha)?;
    let fit = exponential_moments(problem.sites(), &fitted, alpha)?;
    let scale = absolute_exponential_moments(problem.sites(), problem.values(), alpha)?;
    let d0 = fit.0 - raw.0;
    let d1 = fit.1 - raw.1;
    Ok(FitReport {
        rss,
        max_abs_residual,
        moment0_discrepancy: d0,
        moment1_discrepancy: d1,
        moment0_relative: d0.abs() / scale.0.max(f64::MIN_POSITIVE),
        moment1_relative: d1.abs() / scale.1.max(f64::MIN_POSITIVE),
        lambda: model.lambda(),
        alpha,
        n: model.grid().n(),
    })
}

/// `max_i |ŷ_i - y_i| / max_i |y_i|` (absolute when all `y_i = 0`).
pub fn max_relative_residual(values: &[f64], fitted: &[f64]) -> f64 {
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let worst = values
        .iter()
        .zip(fitted)
        .map(|(y, f)| (y - f).abs())
        .fold(0.0, f64::max);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;

    fn exp_problem(m: usize) -> FitProblem {
        let x = linspace(0.0, 1.0, m);
        let y = x.iter().map(|x| (-x).exp()).collect();
        FitProblem::new(x, y).unwrap()
    }

    #[test]
    fn problem_validation() {
        assert!(FitProblem::new(vec![0.0], vec![1.0]).is_err());
        assert!(FitProblem::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(FitProblem::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(FitProblem::with_weights(vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 0.0]).is_err());
        assert!(FitProblem::new(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn zero_data_gives_zero_model() {
        let p = FitProblem::new(linspace(0.0, 1.0, 20), vec![0.0; 20]).unwrap();
        let grid = KnotGrid::new(0.0, 1.0, 6).unwrap();
        let sys = assemble_system(&p, &grid, 1.0, 1.0).unwrap();
        assert!(sys.rhs.iter().all(|&v| v == 0.0));
        let model = fit(&p, 1.0, 6, 1.0).unwrap();
        assert!(model.coefficients().iter().all(|&c| c == 0.0));
        assert!(model.predict(p.sites()).unwrap().iter().all(|&v| v == 0.0));
        let r = fit_report(&model, &p).unwrap();
        assert_eq!(r.rss, 0.0);
        assert_eq!(r.max_abs_residual, 0.0);
        assert_eq!(r.moment0_discrepancy, 0.0);
        assert_eq!(r.moment1_relative, 0.0);
    }

    #[test]
    fn unpenalized_matrix_is_gram() {
        let p = exp_problem(30);
        let grid = KnotGrid::new(0.0, 1.0, 7).unwrap();
        let sys = assemble_system(&p, &grid, 0.5, 0.0).unwrap();
        let b = HbBasis::new(grid, 0.5).unwrap().collocation_matrix(p.sites()).unwrap().to_dense();
        for i in 0..grid.basis_len() {
            for j in 0..grid.basis_len() {
                let g: f64 = b.iter().map(|row| row[i] * row[j]).sum();
                assert!((sys.matrix.get(i, j) - g).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exponential_data_is_reproduced() {
        let p = exp_problem(50);
        let model = fit(&p, 1.0, 13, 1.0).unwrap();
        let yhat = model.predict(p.sites()).unwrap();
        assert!(max_relative_residual(p.values(), &yhat) < 1e-7);
    }

    #[test]
    fn predict_refuses_extrapolation() {
        let p = exp_problem(20);
        let model = fit(&p, 1.0, 5, 1.0).unwrap();
        assert!(matches!(
            model.predict(&[1.5]),
            Err(HpError::OutOfDomain { .. })
        ));
        assert!(model.eval(-0.01).is_err());
    }

    #[test]
    fn unpenalized_needs_enough_data() {
        let p = exp_problem(5);
        assert!(matches!(
            fit(&p, 1.0, 6, 0.0),
            Err(HpError::Singular { .. })
        ));
        assert!(fit(&p, 1.0, 6, 1.0).is_ok());
        assert!(fit(&p, 1.0, 3, -1.0).is_err());
    }

    #[test]
    fn moments_basic() {
        assert_eq!(exponential_moments(&[0.0], &[3.0], 2.7).unwrap(), (3.0, 0.0));
        let x = [0.5, 1.0, 2.0];
        let v = [1.0, -2.0, 4.0];
        assert_eq!(exponential_moments(&x, &v, 0.0).unwrap(), (3.0, 6.5));
        assert!(exponential_moments(&x, &v[..2], 0.0).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s = compensated_sum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn default_knot_rule() {
        assert_eq!(default_knots(8), 4);
        assert_eq!(default_knots(50), 13);
        assert_eq!(default_knots(200), 51);
    }
}
