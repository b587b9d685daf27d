//! Synthetic exponential-data scenarios with an HP-spline fit and a cubic
//! P-spline comparison.
//!
//! Two test functions, `e^{-x}` and `x e^{-x}`, are sampled at 50 uniform
//! sites on `[0, 1]`, optionally perturbed by Gaussian noise, and fitted with
//! 13 knots and `λ = 1`. Each function comes with three panels given as
//! `(caption frequency, σ)`: `(-1, 0)`, `(-1, 0.005)`, `(-0.5, 0.005)`.
//!
//! The fit reproduces `span{e^{-αx}, x e^{-αx}}`, so a panel with caption
//! frequency `c` is fitted with `α = -c`: the `e^{-x}` panels run at `α = 1`.

use crate::error::{invalid, Result};
use crate::fit::{fit, fit_report, FitProblem, FitReport, HpSplineModel};
use crate::grid::linspace;
use crate::noise::GaussianStream;

pub const SITES: usize = 50;
pub const KNOTS: usize = 13;
pub const LAMBDA: f64 = 1.0;
pub const CURVE_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `e^{-x}`
    ExpDecay,
    /// `x e^{-x}`
    XExpDecay,
}

impl TestFunction {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::ExpDecay => (-x).exp(),
            Self::XExpDecay => x * (-x).exp(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::ExpDecay => "exp(-x)",
            Self::XExpDecay => "x*exp(-x)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub figure: u8,
    pub panel: u8,
    pub function: TestFunction,
    /// Frequency as listed in the panel caption.
    pub caption_alpha: f64,
    /// Frequency passed to the fit.
    pub alpha: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub sites: usize,
    pub knots: usize,
    pub interval: (f64, f64),
}

impl Scenario {
    pub fn panel(figure: u8, panel: u8) -> Result<Self> {
        let function = match figure {
            1 => TestFunction::ExpDecay,
            2 => TestFunction::XExpDecay,
            _ => return Err(invalid(format!("unknown figure {figure}"))),
        };
        let (caption_alpha, sigma) = match panel {
            1 => (-1.0, 0.0),
            2 => (-1.0, 0.5e-2),
            3 => (-0.5, 0.5e-2),
            _ => return Err(invalid(format!("unknown panel {panel}"))),
        };
        Ok(Self {
            figure,
            panel,
            function,
            caption_alpha,
            alpha: -caption_alpha,
            sigma,
            lambda: LAMBDA,
            sites: SITES,
            knots: KNOTS,
            interval: (0.0, 1.0),
        })
    }

    pub fn all() -> Vec<Self> {
        (1..=2)
            .flat_map(|f| (1..=3).map(move |p| Self::panel(f, p).expect("static panel")))
            .collect()
    }

    /// Samples the data set; noise is drawn only when `σ > 0`.
    pub fn problem(&self, seed: u64) -> Result<FitProblem> {
        let x = linspace(self.interval.0, self.interval.1, self.sites);
        let mut y: Vec<f64> = x.iter().map(|&v| self.function.eval(v)).collect();
        if self.sigma > 0.0 {
            let noise = GaussianStream::new(seed).samples(y.len(), self.sigma);
            for (yi, e) in y.iter_mut().zip(noise) {
                *yi += e;
            }
        }
        FitProblem::new(x, y)
    }

    pub fn run(&self, seed: u64) -> Result<ScenarioResult> {
        let problem = self.problem(seed)?;
        let model = fit(&problem, self.alpha, self.knots, self.lambda)?;
        let pspline = fit(&problem, 0.0, self.knots, self.lambda)?;
        let report = fit_report(&model, &problem)?;
        let pspline_report = fit_report(&pspline, &problem)?;
        let curve_x = linspace(self.interval.0, self.interval.1, CURVE_POINTS);
        Ok(ScenarioResult {
            scenario: *self,
            hp_curve: model.predict(&curve_x)?,
            pspline_curve: pspline.predict(&curve_x)?,
            true_curve: curve_x.iter().map(|&v| self.function.eval(v)).collect(),
            curve_x,
            problem,
            model,
            pspline,
            report,
            pspline_report,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub problem: FitProblem,
    pub model: HpSplineModel,
    pub pspline: HpSplineModel,
    pub report: FitReport,
    pub pspline_report: FitReport,
    pub curve_x: Vec<f64>,
    pub hp_curve: Vec<f64>,
    pub pspline_curve: Vec<f64>,
    pub true_curve: Vec<f64>,
}
