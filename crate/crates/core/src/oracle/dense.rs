use nalgebra::{DMatrix, DVector};

use crate::basis::{build_hb_spline, ReproductionTarget};
use crate::error::{HpError, Result};
use crate::expo::PiecewiseExpo;
use crate::fit::FitProblem;
use crate::grid::KnotGrid;

fn dense_singular(what: &str) -> HpError {
    HpError::Singular {
        index: 0,
        guidance: format!("dense reference: {what} is singular"),
    }
}

/// `B_j(x) = B^h(x - (a + (j - 3) h))`, evaluated straight from the spline.
fn dense_basis(spline: &PiecewiseExpo, grid: &KnotGrid, sites: &[f64]) -> DMatrix<f64> {
    let (a, h) = (grid.a(), grid.h());
    let cols = grid.n() + 2;
    DMatrix::from_fn(sites.len(), cols, |i, j| {
        spline.evaluate(sites[i] - (a + (j as f64 - 3.0) * h))
    })
}

fn dense_penalty(alpha: f64, h: f64, n: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n + 2);
    for r in 0..n {
        d[(r, r)] = (-2.0 * alpha * h).exp();
        d[(r, r + 1)] = -2.0 * (-alpha * h).exp();
        d[(r, r + 2)] = 1.0;
    }
    d
}

/// Dense solution of the penalized normal equations together with the
/// dense hat matrix.
#[derive(Debug, Clone)]
pub struct DenseReference {
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub rss: f64,
    pub hat: DMatrix<f64>,
    pub hat_trace: f64,
    /// `‖D a‖²`
    pub penalty: f64,
}

impl DenseReference {
    pub fn gcv(&self) -> f64 {
        let m = self.fitted.len() as f64;
        m * self.rss / (m - self.hat_trace).powi(2)
    }
}

pub fn dense_solve_reference(
    problem: &FitProblem,
    grid: &KnotGrid,
    alpha: f64,
    lambda: f64,
) -> Result<DenseReference> {
    let spline = build_hb_spline(alpha, grid.h())?;
    let b = dense_basis(&spline, grid, problem.sites());
    let d = dense_penalty(alpha, grid.h(), grid.n());
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(problem.weights()));
    let y = DVector::from_column_slice(problem.values());

    let btw = b.transpose() * &w;
    let a = &btw * &b + (d.transpose() * &d) * lambda;
    let rhs = &btw * &y;
    let lu = a.clone().lu();
    let coef = lu.solve(&rhs).ok_or_else(|| dense_singular("normal matrix"))?;
    let inverse = lu.try_inverse().ok_or_else(|| dense_singular("normal matrix"))?;
    let hat = &b * inverse * &btw;
    let fitted = &b * &coef;
    let residual = &y - &fitted;
    let rss = (0..residual.len())
        .map(|i| problem.weights()[i] * residual[i] * residual[i])
        .sum();
    let dc = &d * &coef;
    Ok(DenseReference {
        coefficients: coef.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
        rss,
        hat_trace: hat.trace(),
        hat,
        penalty: dc.dot(&dc),
    })
}

/// GCV scores over `lambdas` and the selected index (first score within
/// `1e-12` of the minimum, relative to `max(min, mean w y²)`).
pub fn dense_gcv_selection(
    problem: &FitProblem,
    grid: &KnotGrid,
    alpha: f64,
    lambdas: &[f64],
) -> Result<(usize, Vec<f64>)> {
    let scores = lambdas
        .iter()
        .map(|&l| Ok(dense_solve_reference(problem, grid, alpha, l)?.gcv()))
        .collect::<Result<Vec<f64>>>()?;
    let mean_sq = problem
        .values()
        .iter()
        .zip(problem.weights())
        .map(|(y, w)| w * y * y)
        .sum::<f64>()
        / problem.len() as f64;
    let mut best = f64::INFINITY;
    for &s in &scores {
        if s < best {
            best = s;
        }
    }
    let tol = 1e-12 * best.abs().max(mean_sq);
    let mut index = 0;
    while scores[index] > best + tol {
        index += 1;
    }
    Ok((index, scores))
}

/// Reproduction coefficients by least-squares collocation on 500 sites,
/// certified on an independent 200-site grid.
pub fn reproduction_oracle(target: ReproductionTarget, grid: &KnotGrid, alpha: f64) -> Result<Vec<f64>> {
    let spline = build_hb_spline(alpha, grid.h())?;
    let (a, b) = (grid.a(), grid.b());
    let fit_sites: Vec<f64> = (0..500).map(|i| a + (b - a) * i as f64 / 499.0).collect();
    let basis = dense_basis(&spline, grid, &fit_sites);
    let rhs = DVector::from_iterator(500, fit_sites.iter().map(|&x| target.eval(alpha, x)));
    let svd = basis.svd(true, true);
    let coef = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| HpError::InternalConsistency(format!("least squares failed: {e}")))?;

    // certification grid: midpoints, disjoint from the fitting sites
    let check: Vec<f64> = (0..200).map(|i| a + (b - a) * (i as f64 + 0.5) / 200.0).collect();
    let values = dense_basis(&spline, grid, &check) * &coef;
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for (i, &x) in check.iter().enumerate() {
        let t = target.eval(alpha, x);
        scale = scale.max(t.abs());
        worst = worst.max((values[i] - t).abs());
    }
    if !(worst <= 1e-9 * scale) {
        return Err(HpError::InternalConsistency(format!(
            "oracle certification failed for {target:?}: residual {worst:e}"
        )));
    }
    Ok(coef.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data() {
        let grid = KnotGrid::new(0.0, 1.0, 5).unwrap();
        let x: Vec<f64> = (0..12).map(|i| i as f64 / 11.0).collect();
        let p = FitProblem::new(x, vec![0.0; 12]).unwrap();
        let r = dense_solve_reference(&p, &grid, 1.0, 1.0).unwrap();
        assert!(r.coefficients.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn square_interpolation_trace() {
        let grid = KnotGrid::new(0.0, 1.0, 5).unwrap();
        let x: Vec<f64> = (0..7).map(|i| i as f64 / 6.0).collect();
        let y = x.iter().map(|v| v.cos()).collect();
        let p = FitProblem::new(x, y).unwrap();
        let r = dense_solve_reference(&p, &grid, -0.5, 0.0).unwrap();
        assert!((r.hat_trace - 7.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_geometric_ratios() {
        let grid = KnotGrid::new(0.0, 1.0, 9).unwrap();
        let alpha = 1.2;
        let c = reproduction_oracle(ReproductionTarget::ExpMinus, &grid, alpha).unwrap();
        for w in c.windows(2) {
            assert!((w[1] / w[0] - (-alpha * grid.h()).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_partition_of_unity() {
        let grid = KnotGrid::new(0.0, 1.0, 9).unwrap();
        let c = reproduction_oracle(ReproductionTarget::ExpPlus, &grid, 0.0).unwrap();
        for ck in c {
            assert!((ck - 1.0).abs() < 1e-10, "{ck}");
        }
    }
}
