//! Plain-Rust bodies of the exported operations; each returns a JSON string.

use hpspline::grid::linspace;
use hpspline::scenario::{Scenario, CURVE_POINTS};
use hpspline::{
    build_hb_spline, fit_report, fit_on_grid, select_lambda, KnotGrid, LambdaSearchSpec,
    SelectionMethod,
};
use serde_json::json;

pub type DemoResult = Result<String, String>;

fn msg(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// The HB-spline for `(α, h)` and the cubic B-spline with the same spacing,
/// sampled at `points` sites over the support `[0, 4h]`.
pub fn basis_curve(alpha: f64, h: f64, points: usize) -> DemoResult {
    if points < 2 {
        return Err("need at least 2 points".into());
    }
    let hb = build_hb_spline(alpha, h).map_err(msg)?;
    let cubic = build_hb_spline(0.0, h).map_err(msg)?;
    let x = linspace(0.0, 4.0 * h, points);
    let hb_y: Vec<f64> = x.iter().map(|&t| hb.evaluate(t)).collect();
    let cubic_y: Vec<f64> = x.iter().map(|&t| cubic.evaluate(t)).collect();
    Ok(json!({ "x": x, "hb": hb_y, "cubic": cubic_y }).to_string())
}

/// One figure panel refitted with a user-chosen `α` and `λ`.
pub fn fit_panel(figure: u8, panel: u8, seed: u64, alpha: f64, lambda: f64) -> DemoResult {
    let scenario = Scenario::panel(figure, panel).map_err(msg)?;
    let problem = scenario.problem(seed).map_err(msg)?;
    let (a, b) = scenario.interval;
    let grid = KnotGrid::new(a, b, scenario.knots).map_err(msg)?;
    let model = fit_on_grid(&problem, &grid, alpha, lambda).map_err(msg)?;
    let pspline = fit_on_grid(&problem, &grid, 0.0, lambda).map_err(msg)?;
    let report = fit_report(&model, &problem).map_err(msg)?;
    let curve_x = linspace(a, b, CURVE_POINTS);
    let truth: Vec<f64> = curve_x.iter().map(|&x| scenario.function.eval(x)).collect();
    Ok(json!({
        "function": scenario.function.label(),
        "caption_alpha": scenario.caption_alpha,
        "sigma": scenario.sigma,
        "x": problem.sites(),
        "y": problem.values(),
        "curve_x": curve_x,
        "hp": model.predict(&curve_x).map_err(msg)?,
        "pspline": pspline.predict(&curve_x).map_err(msg)?,
        "truth": truth,
        "report": {
            "rss": report.rss,
            "max_abs_residual": report.max_abs_residual,
            "moment0_relative": report.moment0_relative,
            "moment1_relative": report.moment1_relative,
        },
    })
    .to_string())
}

/// The λ search trace over the default grid for one panel.
pub fn lambda_scan(figure: u8, panel: u8, seed: u64, alpha: f64, method: &str) -> DemoResult {
    let scenario = Scenario::panel(figure, panel).map_err(msg)?;
    let problem = scenario.problem(seed).map_err(msg)?;
    let method: SelectionMethod = method.parse().map_err(msg)?;
    let noise = (method == SelectionMethod::Discrepancy).then_some(scenario.sigma);
    let spec = LambdaSearchSpec::with_default_grid(method, noise).map_err(msg)?;
    let grid = KnotGrid::new(scenario.interval.0, scenario.interval.1, scenario.knots).map_err(msg)?;
    let selection = select_lambda(&problem, &grid, alpha, &spec).map_err(msg)?;
    let pick = |f: fn(&hpspline::select::LambdaEvaluation) -> Option<f64>| -> Vec<Option<f64>> {
        selection.trace.iter().map(f).collect()
    };
    Ok(json!({
        "lambda": pick(|t| Some(t.lambda)),
        "rss": pick(|t| Some(t.rss)),
        "penalty": pick(|t| Some(t.penalty)),
        "score": pick(|t| t.score),
        "selected": selection.lambda,
        "index": selection.index,
    })
    .to_string())
}
