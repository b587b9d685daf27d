use crate::error::{HpError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub tolerance: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_depth: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }
}

fn simpson_step(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(HpError::Accuracy(format!(
            "recursion depth exhausted on [{a}, {b}]"
        )));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    spec: QuadratureSpec,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    // split once up front; a single coarse panel can match its halves by accident
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let half = 0.5 * spec.tolerance;
    Ok(simpson_step(f, a, m, fa, flm, fm, left, half, spec.max_depth)?
        + simpson_step(f, m, b, fm, frm, fb, right, half, spec.max_depth)?)
}

/// Integrates over `[a, b]` split at every interior point of `cuts`.
pub fn integrate_panels(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    cuts: &[f64],
    spec: QuadratureSpec,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut points = vec![a];
    points.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let panels = (points.len() - 1) as f64;
    let panel_spec = QuadratureSpec {
        tolerance: spec.tolerance / panels,
        ..spec
    };
    let mut total = 0.0;
    for w in points.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], panel_spec)?;
    }
    Ok(total)
}

/// Order-2 kernel `(k_r * k_r)(t)` on the unit grid, by quadrature.
fn order_two(rate: f64, t: f64, spec: QuadratureSpec) -> Result<f64> {
    if !(0.0..=2.0).contains(&t) {
        return Ok(0.0);
    }
    let lo = (t - 1.0).max(0.0);
    let hi = t.min(1.0);
    let integrand = |r: f64| Ok((rate * r).exp() * (rate * (t - r)).exp());
    adaptive_simpson(&integrand, lo, hi, spec)
}

/// `B^h(x)` for frequencies `(α, α, -α, -α)` by nested quadrature of
/// `(k_{αh} * k_{αh}) * (k_{-αh} * k_{-αh})` evaluated at `x / h`.
pub fn quadrature_convolution_eval(alpha: f64, h: f64, x: f64, spec: QuadratureSpec) -> Result<f64> {
    let u = x / h;
    if !(u > 0.0 && u < 4.0) {
        return Ok(0.0);
    }
    let rate = alpha * h;
    let inner = QuadratureSpec {
        tolerance: spec.tolerance * 1e-3,
        ..spec
    };
    let integrand = |t: f64| Ok(order_two(rate, t, inner)? * order_two(-rate, u - t, inner)?);
    let lo = (u - 2.0).max(0.0);
    let hi = u.min(2.0);
    integrate_panels(&integrand, lo, hi, &[1.0, u - 1.0, u - 2.0, u], spec)
}
