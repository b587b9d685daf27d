#![allow(dead_code)]

use hpspline::grid::linspace;
use hpspline::noise::GaussianStream;
use hpspline::FitProblem;

/// Uniform sites on `[a, b]` with values `f(x) + σ·noise`.
pub fn sampled(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize, sigma: f64, seed: u64) -> FitProblem {
    let x = linspace(a, b, m);
    let mut rng = GaussianStream::new(seed);
    let y = x.iter().map(|&v| f(v) + sigma * rng.next_gaussian()).collect();
    FitProblem::new(x, y).unwrap()
}

/// Random sorted sites and noisy values, with the grid interval `[x_1, x_m]`.
pub fn random_problem(rng: &mut GaussianStream, m: usize) -> FitProblem {
    let mut x: Vec<f64> = (0..m).map(|_| 3.0 * rng.next_uniform() - 1.0).collect();
    x.sort_by(f64::total_cmp);
    x.dedup();
    let y = x
        .iter()
        .map(|v| (2.0 * v).sin() + 0.3 * rng.next_gaussian())
        .collect();
    FitProblem::new(x, y).unwrap()
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}
