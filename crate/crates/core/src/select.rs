//! Smoothing-parameter selection over a geometric λ grid.

use crate::banded::BandCholesky;
use crate::error::{invalid, HpError, Result};
use crate::fit::{weighted_rss, FitProblem, SystemParts};
use crate::grid::KnotGrid;

/// Scores within this relative distance of the optimum are ties; the
/// smallest λ wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMethod {
    Gcv,
    LCurve,
    Discrepancy,
}

impl std::str::FromStr for SelectionMethod {
    type Err = HpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcv" => Ok(Self::Gcv),
            "lcurve" => Ok(Self::LCurve),
            "discrepancy" => Ok(Self::Discrepancy),
            other => Err(invalid(format!("unknown selection method {other:?}"))),
        }
    }
}

/// `count` geometrically spaced values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || count < 2 {
        return Err(invalid(format!(
            "geometric grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {count}"
        )));
    }
    let (l0, l1) = (lo.log10(), hi.log10());
    let step = (l1 - l0) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                10f64.powf(l0 + i as f64 * step)
            }
        })
        .collect())
}

/// The default grid: 61 points from 1e-6 to 1e6.
pub fn default_lambda_grid() -> Vec<f64> {
    geometric_grid(1e-6, 1e6, 61).expect("static grid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSearchSpec {
    grid: Vec<f64>,
    method: SelectionMethod,
    noise_level: Option<f64>,
}

impl LambdaSearchSpec {
    pub fn new(grid: Vec<f64>, method: SelectionMethod, noise_level: Option<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(invalid("lambda grid is empty"));
        }
        if grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(invalid("lambda grid must be positive"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("lambda grid must be increasing"));
        }
        if method == SelectionMethod::LCurve && grid.len() < 3 {
            return Err(invalid("the L-curve needs at least 3 grid points"));
        }
        match (method, noise_level) {
            (SelectionMethod::Discrepancy, None) => {
                return Err(invalid("the discrepancy principle needs a noise level"))
            }
            (_, Some(s)) if !(s >= 0.0 && s.is_finite()) => {
                return Err(invalid(format!("noise level must be non-negative, got {s}")))
            }
            _ => {}
        }
        Ok(Self {
            grid,
            method,
            noise_level,
        })
    }

    pub fn with_default_grid(method: SelectionMethod, noise_level: Option<f64>) -> Result<Self> {
        Self::new(default_lambda_grid(), method, noise_level)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn method(&self) -> SelectionMethod {
        self.method
    }

    pub fn noise_level(&self) -> Option<f64> {
        self.noise_level
    }
}

/// Per-λ quantities recorded during a search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEvaluation {
    pub lambda: f64,
    pub rss: f64,
    /// `‖D a‖²`
    pub penalty: f64,
    pub effective_df: Option<f64>,
    /// GCV score, L-curve curvature, or RSS depending on the method; `None`
    /// at L-curve endpoints.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSelection {
    pub lambda: f64,
    /// Grid index of the selection, or of the upper bracket when the
    /// discrepancy principle refined between grid points.
    pub index: usize,
    pub trace: Vec<LambdaEvaluation>,
}

fn trace_of_hat(parts: &SystemParts, chol: &BandCholesky) -> Result<f64> {
    let size = parts.gram.dim();
    let mut trace = 0.0;
    let mut column = vec![0.0; size];
    for j in 0..size {
        for (i, c) in column.iter_mut().enumerate() {
            *c = parts.gram.get(i, j);
        }
        trace += chol.solve(&column)?[j];
    }
    Ok(trace)
}

struct Solved {
    rss: f64,
    penalty: f64,
    df: Option<f64>,
}

fn solve_at(problem: &FitProblem, parts: &SystemParts, lambda: f64, with_df: bool) -> Result<Solved> {
    let chol = parts.factor(problem, lambda)?;
    let coefficients = chol.solve(&parts.rhs)?;
    let fitted = parts.collocation.matvec(&coefficients)?;
    Ok(Solved {
        rss: weighted_rss(problem, &fitted),
        penalty: parts.penalty.penalty_value(&coefficients)?,
        df: if with_df {
            Some(trace_of_hat(parts, &chol)?)
        } else {
            None
        },
    })
}

/// Trace of the hat matrix `B (BᵀWB + λDᵀD)⁻¹ BᵀW`.
pub fn effective_df(problem: &FitProblem, grid: &KnotGrid, alpha: f64, lambda: f64) -> Result<f64> {
    let parts = SystemParts::new(problem, grid, alpha)?;
    let chol = parts.factor(problem, lambda)?;
    trace_of_hat(&parts, &chol)
}

fn gcv_from(m: usize, rss: f64, df: f64) -> Result<f64> {
    let dof = m as f64 - df;
    if !(dof > 0.0) {
        return Err(HpError::DegenerateDf { m, df });
    }
    Ok(m as f64 * rss / (dof * dof))
}

/// `m · RSS / (m − tr H)²`.
pub fn gcv_score(problem: &FitProblem, grid: &KnotGrid, alpha: f64, lambda: f64) -> Result<f64> {
    let parts = SystemParts::new(problem, grid, alpha)?;
    let s = solve_at(problem, &parts, lambda, true)?;
    gcv_from(problem.len(), s.rss, s.df.unwrap())
}

/// Index of the minimum of `scores`, taking the first index within
/// [`TIE_TOLERANCE`] of it. `floor` sets an absolute scale below which
/// differences are ties.
pub fn argmin_smallest(scores: &[f64], floor: f64) -> usize {
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = TIE_TOLERANCE * best.abs().max(floor);
    scores
        .iter()
        .position(|&s| s <= best + tol)
        .expect("non-empty scores")
}

/// Signed curvature through three points; positive for a left turn.
pub fn menger_curvature(p1: (f64, f64), p2: (f64, f64), p3: (f64, f64)) -> f64 {
    let (ax, ay) = (p2.0 - p1.0, p2.1 - p1.1);
    let (bx, by) = (p3.0 - p2.0, p3.1 - p2.1);
    let (cx, cy) = (p3.0 - p1.0, p3.1 - p1.1);
    let denom = ax.hypot(ay) * bx.hypot(by) * cx.hypot(cy);
    if denom == 0.0 {
        0.0
    } else {
        2.0 * (ax * by - ay * bx) / denom
    }
}

fn safe_ln(v: f64) -> f64 {
    v.max(f64::MIN_POSITIVE).ln()
}

/// Mean weighted square of the data; the absolute scale for GCV ties.
pub(crate) fn gcv_floor(problem: &FitProblem) -> f64 {
    let s: f64 = problem
        .values()
        .iter()
        .zip(problem.weights())
        .map(|(y, w)| w * y * y)
        .sum();
    s / problem.len() as f64
}

pub fn select_lambda(
    problem: &FitProblem,
    grid: &KnotGrid,
    alpha: f64,
    spec: &LambdaSearchSpec,
) -> Result<LambdaSelection> {
    let parts = SystemParts::new(problem, grid, alpha)?;
    let with_df = spec.method == SelectionMethod::Gcv;
    let solved = spec
        .grid
        .iter()
        .map(|&l| solve_at(problem, &parts, l, with_df))
        .collect::<Result<Vec<_>>>()?;
    let mut trace: Vec<LambdaEvaluation> = spec
        .grid
        .iter()
        .zip(&solved)
        .map(|(&lambda, s)| LambdaEvaluation {
            lambda,
            rss: s.rss,
            penalty: s.penalty,
            effective_df: s.df,
            score: None,
        })
        .collect();

    match spec.method {
        SelectionMethod::Gcv => {
            let m = problem.len();
            let scores = solved
                .iter()
                .map(|s| gcv_from(m, s.rss, s.df.unwrap()))
                .collect::<Result<Vec<_>>>()?;
            for (t, s) in trace.iter_mut().zip(&scores) {
                t.score = Some(*s);
            }
            let index = argmin_smallest(&scores, gcv_floor(problem));
            Ok(LambdaSelection {
                lambda: spec.grid[index],
                index,
                trace,
            })
        }
        SelectionMethod::LCurve => {
            let points: Vec<(f64, f64)> = solved
                .iter()
                .map(|s| (safe_ln(s.rss), safe_ln(s.penalty)))
                .collect();
            let mut best: Option<(usize, f64)> = None;
            for i in 1..points.len() - 1 {
                let k = menger_curvature(points[i - 1], points[i], points[i + 1]);
                trace[i].score = Some(k);
                match best {
                    Some((_, b)) if k <= b + TIE_TOLERANCE * b.abs() => {}
                    _ => best = Some((i, k)),
                }
            }
            let best = best.expect("at least three grid points");
            Ok(LambdaSelection {
                lambda: spec.grid[best.0],
                index: best.0,
                trace,
            })
        }
        SelectionMethod::Discrepancy => {
            let sigma = spec.noise_level.expect("validated");
            let target = problem.len() as f64 * sigma * sigma;
            for t in trace.iter_mut() {
                t.score = Some(t.rss);
            }
            let Some(index) = solved.iter().position(|s| s.rss >= target) else {
                let rss_min = solved.iter().map(|s| s.rss).fold(f64::INFINITY, f64::min);
                let rss_max = solved.iter().map(|s| s.rss).fold(0.0, f64::max);
                return Err(HpError::NoSolution {
                    target,
                    rss_min,
                    rss_max,
                });
            };
            if index == 0 {
                return Ok(LambdaSelection {
                    lambda: spec.grid[0],
                    index,
                    trace,
                });
            }
            // RSS is monotone in λ: bisect ln λ inside the bracketing cell.
            let (mut lo, mut hi) = (spec.grid[index - 1].ln(), spec.grid[index].ln());
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= 1e-12 * hi.abs().max(1.0) {
                    break;
                }
                let rss = solve_at(problem, &parts, mid.exp(), false)?.rss;
                if rss >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let lambda = if hi == spec.grid[index].ln() {
                spec.grid[index]
            } else {
                hi.exp()
            };
            Ok(LambdaSelection {
                lambda,
                index,
                trace,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linspace;

    #[test]
    fn default_grid_shape() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 61);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[60], 1e6);
        assert!((g[30] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(LambdaSearchSpec::with_default_grid(SelectionMethod::Discrepancy, None).is_err());
        assert!(LambdaSearchSpec::new(vec![1.0, 0.5], SelectionMethod::Gcv, None).is_err());
        assert!(LambdaSearchSpec::new(vec![-1.0], SelectionMethod::Gcv, None).is_err());
        assert!(LambdaSearchSpec::new(vec![1.0, 2.0], SelectionMethod::LCurve, None).is_err());
        assert!("gcv".parse::<SelectionMethod>().is_ok());
        assert!("reml".parse::<SelectionMethod>().is_err());
    }

    #[test]
    fn interpolating_hat_is_identity() {
        // λ = 0 and m = n + 2: B is square and invertible.
        let grid = KnotGrid::new(0.0, 1.0, 5).unwrap();
        let x = linspace(0.0, 1.0, 7);
        let y = x.iter().map(|v| v.sin()).collect();
        let p = FitProblem::new(x, y).unwrap();
        let df = effective_df(&p, &grid, 0.7, 0.0).unwrap();
        assert!((df - 7.0).abs() < 1e-9, "{df}");
    }

    #[test]
    fn heavy_penalty_leaves_nullspace() {
        let grid = KnotGrid::new(0.0, 1.0, 10).unwrap();
        let x = linspace(0.0, 1.0, 40);
        let y = x.iter().map(|v| (3.0 * v).cos()).collect();
        let p = FitProblem::new(x, y).unwrap();
        let df = effective_df(&p, &grid, 1.0, 1e12).unwrap();
        assert!((df - 2.0).abs() < 0.05, "{df}");
    }

    #[test]
    fn discrepancy_zero_noise() {
        let grid = KnotGrid::new(0.0, 1.0, 6).unwrap();
        let x = linspace(0.0, 1.0, 30);
        let y = x.iter().map(|v| v * v).collect();
        let p = FitProblem::new(x, y).unwrap();
        let spec = LambdaSearchSpec::with_default_grid(SelectionMethod::Discrepancy, Some(0.0)).unwrap();
        let s = select_lambda(&p, &grid, 1.0, &spec).unwrap();
        assert_eq!(s.lambda, 1e-6);
        assert_eq!(s.index, 0);
    }

    #[test]
    fn discrepancy_unreachable() {
        let grid = KnotGrid::new(0.0, 1.0, 6).unwrap();
        let x = linspace(0.0, 1.0, 30);
        let y = x.iter().map(|v| v * v).collect();
        let p = FitProblem::new(x, y).unwrap();
        let spec = LambdaSearchSpec::with_default_grid(SelectionMethod::Discrepancy, Some(10.0)).unwrap();
        assert!(matches!(
            select_lambda(&p, &grid, 1.0, &spec),
            Err(HpError::NoSolution { .. })
        ));
    }

    #[test]
    fn curvature_sign() {
        // down then right is a left turn
        assert!(menger_curvature((0.0, 1.0), (0.0, 0.0), (1.0, 0.0)) > 0.0);
        assert_eq!(menger_curvature((0.0, 0.0), (1.0, 1.0), (2.0, 2.0)), 0.0);
    }

    #[test]
    fn ties_take_smallest() {
        assert_eq!(argmin_smallest(&[3.0, 1.0, 1.0, 2.0], 0.0), 1);
        assert_eq!(argmin_smallest(&[1e-30, 3e-31, 2e-30], 1.0), 0);
    }
}
