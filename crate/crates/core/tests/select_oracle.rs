mod common;

use common::{random_problem, sampled};
use hpspline::noise::GaussianStream;
use hpspline::oracle::{dense_gcv_selection, dense_solve_reference};
use hpspline::select::default_lambda_grid;
use hpspline::{effective_df, gcv_score, select_lambda, KnotGrid, LambdaSearchSpec, SelectionMethod};

#[test]
fn df_matches_dense_trace() {
    let mut rng = GaussianStream::new(41);
    for _ in 0..10 {
        let p = random_problem(&mut rng, 60);
        let (a, b) = p.domain();
        let grid = KnotGrid::new(a, b, 12).unwrap();
        let lambda = 10f64.powf(-3.0 + 6.0 * rng.next_uniform());
        let alpha = 2.0 * rng.next_uniform() - 1.0;
        let df = effective_df(&p, &grid, alpha, lambda).unwrap();
        let dense = dense_solve_reference(&p, &grid, alpha, lambda).unwrap();
        assert!((df - dense.hat_trace).abs() <= 1e-9, "{df} {}", dense.hat_trace);
        let g = gcv_score(&p, &grid, alpha, lambda).unwrap();
        assert!((g - dense.gcv()).abs() <= 1e-8 * dense.gcv());
    }
}

#[test]
fn heavy_penalty_trace_against_dense() {
    let p = sampled(|x| (4.0 * x).sin(), 0.0, 1.0, 60, 0.1, 2);
    let grid = KnotGrid::new(0.0, 1.0, 12).unwrap();
    let dense = dense_solve_reference(&p, &grid, 0.5, 1e12).unwrap();
    assert!((dense.hat_trace - 2.0).abs() < 0.05);
    let df = effective_df(&p, &grid, 0.5, 1e12).unwrap();
    assert!((df - 2.0).abs() < 0.05);
}

#[test]
fn df_non_increasing_and_rss_non_decreasing() {
    let mut rng = GaussianStream::new(43);
    for alpha in [-1.0, 0.0, 1.5] {
        let p = random_problem(&mut rng, 80);
        let (a, b) = p.domain();
        let grid = KnotGrid::new(a, b, 15).unwrap();
        let spec = LambdaSearchSpec::with_default_grid(SelectionMethod::Gcv, None).unwrap();
        let sel = select_lambda(&p, &grid, alpha, &spec).unwrap();
        for w in sel.trace.windows(2) {
            let (d0, d1) = (w[0].effective_df.unwrap(), w[1].effective_df.unwrap());
            assert!(d1 <= d0 + 1e-9, "{d0} -> {d1}");
            assert!(w[1].rss >= w[0].rss * (1.0 - 1e-10));
        }
    }
}

#[test]
fn noise_free_gcv_prefers_smallest_lambda() {
    let p = sampled(|x| (-x).exp(), 0.0, 1.0, 50, 0.0, 0);
    let grid = KnotGrid::new(0.0, 1.0, 13).unwrap();
    let spec = LambdaSearchSpec::with_default_grid(SelectionMethod::Gcv, None).unwrap();
    let sel = select_lambda(&p, &grid, 1.0, &spec).unwrap();
    for t in &sel.trace {
        assert!(t.score.unwrap() <= 1e-12);
    }
    assert_eq!(sel.index, 0);
    assert_eq!(sel.lambda, 1e-6);
}

#[test]
fn gcv_selection_matches_dense() {
    let p = sampled(|x| (-x).exp(), 0.0, 1.0, 50, 0.05, 2024);
    let grid = KnotGrid::new(0.0, 1.0, 13).unwrap();
    let lambdas = default_lambda_grid();
    let spec = LambdaSearchSpec::new(lambdas.clone(), SelectionMethod::Gcv, None).unwrap();
    let sel = select_lambda(&p, &grid, 0.5, &spec).unwrap();
    let (index, scores) = dense_gcv_selection(&p, &grid, 0.5, &lambdas).unwrap();
    assert_eq!(sel.index, index);
    for (t, s) in sel.trace.iter().zip(&scores) {
        assert!((t.score.unwrap() - s).abs() <= 1e-8 * s);
    }
    // deterministic
    assert_eq!(select_lambda(&p, &grid, 0.5, &spec).unwrap(), sel);
}

#[test]
fn lcurve_picks_interior_corner() {
    let p = sampled(|x| (6.0 * x).sin(), 0.0, 1.0, 100, 0.05, 8);
    let grid = KnotGrid::new(0.0, 1.0, 25).unwrap();
    let spec = LambdaSearchSpec::with_default_grid(SelectionMethod::LCurve, None).unwrap();
    let sel = select_lambda(&p, &grid, 1.0, &spec).unwrap();
    assert!(sel.index > 0 && sel.index < 60);
    assert!(sel.trace[0].score.is_none());
    assert!(sel.trace[60].score.is_none());
    let best = sel.trace[sel.index].score.unwrap();
    assert!(sel.trace.iter().filter_map(|t| t.score).all(|k| k <= best));
}

#[test]
fn discrepancy_hits_target() {
    let sigma = 0.05;
    let p = sampled(|x| (6.0 * x).sin(), 0.0, 1.0, 100, sigma, 8);
    let grid = KnotGrid::new(0.0, 1.0, 25).unwrap();
    let spec = LambdaSearchSpec::with_default_grid(SelectionMethod::Discrepancy, Some(sigma)).unwrap();
    let sel = select_lambda(&p, &grid, 1.0, &spec).unwrap();
    let target = 100.0 * sigma * sigma;
    let rss = hpspline::fit(&p, 1.0, 25, sel.lambda).unwrap().diagnostics().rss;
    assert!(rss >= target);
    assert!((rss - target).abs() <= 1e-6 * target, "{rss} {target}");
    assert!(sel.lambda <= spec.grid()[sel.index]);
    assert!(sel.lambda >= spec.grid()[sel.index - 1]);
}

#[test]
fn degenerate_df_is_reported() {
    // interpolation: m = n + 2 and λ tiny, so trace(H) ≈ m
    let p = sampled(|x| x * x, 0.0, 1.0, 8, 0.0, 0);
    let grid = KnotGrid::new(0.0, 1.0, 6).unwrap();
    assert!(matches!(
        gcv_score(&p, &grid, 0.0, 0.0),
        Err(hpspline::HpError::DegenerateDf { .. })
    ));
}
