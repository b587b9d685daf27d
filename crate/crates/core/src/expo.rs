//! Piecewise exponential-polynomial functions and their exact convolution.
//!
//! Every function handled here is, on each interval between consecutive
//! breakpoints, a finite sum of terms `c * x^p * exp(rho * x)`. Such functions
//! are closed under convolution, which is how the HB-spline basis is built.

use crate::error::{invalid, Result};

/// One term `coefficient * x^power * exp(rate * x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpoTerm {
    pub coefficient: f64,
    pub power: u32,
    pub rate: f64,
}

impl ExpoTerm {
    pub fn new(coefficient: f64, power: u32, rate: f64) -> Self {
        Self {
            coefficient,
            power,
            rate,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficient * x.powi(self.power as i32) * (self.rate * x).exp()
    }
}

/// Two rates are treated as equal when they differ by at most this much,
/// relative to `max(1, |r1|, |r2|)`.
pub const RATE_TOLERANCE: f64 = 1e-12;

#[inline]
pub fn rates_equal(r1: f64, r2: f64) -> bool {
    (r1 - r2).abs() <= RATE_TOLERANCE * 1f64.max(r1.abs()).max(r2.abs())
}

/// Sorts terms by `(power, rate)` and merges terms sharing both.
pub fn canonicalize(mut terms: Vec<ExpoTerm>) -> Vec<ExpoTerm> {
    terms.retain(|t| t.coefficient != 0.0);
    terms.sort_by(|a, b| a.power.cmp(&b.power).then(a.rate.total_cmp(&b.rate)));
    let mut out: Vec<ExpoTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.power == t.power && rates_equal(last.rate, t.rate) => {
                last.coefficient += t.coefficient;
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coefficient != 0.0);
    out
}

/// A compactly supported function that is a sum of [`ExpoTerm`]s on each
/// interval between consecutive breakpoints and zero outside.
///
/// Pieces are half-open `[x_k, x_{k+1})`, except the last one which is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExpo {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<ExpoTerm>>,
}

impl PiecewiseExpo {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<ExpoTerm>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(invalid("a piecewise function needs at least two breakpoints"));
        }
        if pieces.len() != breakpoints.len() - 1 {
            return Err(invalid(format!(
                "{} pieces for {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(invalid("breakpoints must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        let pieces = pieces.into_iter().map(canonicalize).collect();
        Ok(Self {
            breakpoints,
            pieces,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<ExpoTerm>] {
        &self.pieces
    }

    /// Support interval `[first breakpoint, last breakpoint]`.
    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Index of the piece containing `x`, if `x` lies in the support.
    pub fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let k = self.breakpoints.partition_point(|&b| b <= x);
        Some((k - 1).min(self.pieces.len() - 1))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match self.piece_index(x) {
            Some(k) => self.pieces[k].iter().map(|t| t.eval(x)).sum(),
            None => 0.0,
        }
    }

    /// Returns `x -> self(x / h)`.
    pub fn dilate(&self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("dilation factor must be positive, got {h}")));
        }
        let breakpoints = self.breakpoints.iter().map(|b| b * h).collect();
        let pieces = self
            .pieces
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| ExpoTerm::new(t.coefficient / h.powi(t.power as i32), t.power, t.rate / h))
                    .collect()
            })
            .collect();
        Self::new(breakpoints, pieces)
    }

    /// Exact convolution `(self * other)(x) = ∫ self(t) other(x - t) dt`.
    pub fn convolve(&self, other: &Self) -> Self {
        convolve(self, other)
    }
}

/// One end of an integration range in `t`: either a constant or `x - shift`.
#[derive(Debug, Clone, Copy)]
enum Limit {
    Const(f64),
    Shift(f64),
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Antiderivative of `t^n exp(delta t)` as `(coefficient, power of t)` pairs
/// multiplying `exp(delta t)`; `delta = 0` gives the polynomial case.
fn antiderivative(n: u32, delta: f64) -> Vec<(f64, u32)> {
    if delta == 0.0 {
        return vec![(1.0 / f64::from(n + 1), n + 1)];
    }
    let mut out = Vec::with_capacity(n as usize + 1);
    // falling factorial n!/(n-j)!
    let mut falling = 1.0;
    let mut inv_delta_pow = 1.0 / delta;
    for j in 0..=n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push((sign * falling * inv_delta_pow, n - j));
        falling *= f64::from(n - j);
        inv_delta_pow /= delta;
    }
    out
}

/// Evaluates the antiderivative at `limit`, returning terms in `x`.
fn antiderivative_at(anti: &[(f64, u32)], delta: f64, limit: Limit) -> Vec<ExpoTerm> {
    match limit {
        Limit::Const(c) => {
            let value: f64 = anti
                .iter()
                .map(|&(coef, p)| coef * c.powi(p as i32))
                .sum::<f64>()
                * (delta * c).exp();
            vec![ExpoTerm::new(value, 0, 0.0)]
        }
        Limit::Shift(b) => {
            // (x - b)^p exp(delta (x - b))
            let scale = (-delta * b).exp();
            let mut out = Vec::new();
            for &(coef, p) in anti {
                for l in 0..=p {
                    let c = coef * scale * binomial(p, l) * (-b).powi((p - l) as i32);
                    out.push(ExpoTerm::new(c, l, delta));
                }
            }
            out
        }
    }
}

/// `∫_{lower}^{upper} tf(t) tg(x - t) dt` for two single terms, as terms in `x`.
fn pair_integral(tf: &ExpoTerm, tg: &ExpoTerm, lower: Limit, upper: Limit) -> Vec<ExpoTerm> {
    // tf(t) tg(x-t) = cf cg t^p (x-t)^q exp(rf t) exp(rg (x-t))
    //              = cf cg exp(rg x) sum_k C(q,k) (-1)^k x^(q-k) t^(p+k) exp((rf-rg) t)
    let delta = if rates_equal(tf.rate, tg.rate) {
        0.0
    } else {
        tf.rate - tg.rate
    };
    let c = tf.coefficient * tg.coefficient;
    let q = tg.power;
    let mut out = Vec::new();
    for k in 0..=q {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let factor = c * sign * binomial(q, k);
        let anti = antiderivative(tf.power + k, delta);
        let hi = antiderivative_at(&anti, delta, upper);
        let lo = antiderivative_at(&anti, delta, lower);
        let shifted = |t: ExpoTerm, s: f64| {
            ExpoTerm::new(s * factor * t.coefficient, t.power + q - k, t.rate + tg.rate)
        };
        out.extend(hi.into_iter().map(|t| shifted(t, 1.0)));
        out.extend(lo.into_iter().map(|t| shifted(t, -1.0)));
    }
    out
}

fn dedup_sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match out.last() {
            Some(&last) if (x - last).abs() <= 1e-12 * 1f64.max(x.abs()).max(last.abs()) => {}
            _ => out.push(x),
        }
    }
    out
}

/// Exact convolution of two piecewise exponential-polynomial functions.
///
/// Result breakpoints are the pairwise sums of input breakpoints. Equal rates
/// (see [`rates_equal`]) raise the polynomial power; distinct rates keep both.
pub fn convolve(f: &PiecewiseExpo, g: &PiecewiseExpo) -> PiecewiseExpo {
    let sums: Vec<f64> = f
        .breakpoints
        .iter()
        .flat_map(|&a| g.breakpoints.iter().map(move |&b| a + b))
        .collect();
    let breakpoints = dedup_sorted(sums);

    let mut pieces = Vec::with_capacity(breakpoints.len() - 1);
    for w in breakpoints.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let mut terms = Vec::new();
        for (fi, fterms) in f.pieces.iter().enumerate() {
            let (a0, a1) = (f.breakpoints[fi], f.breakpoints[fi + 1]);
            for (gi, gterms) in g.pieces.iter().enumerate() {
                let (b0, b1) = (g.breakpoints[gi], g.breakpoints[gi + 1]);
                if mid <= a0 + b0 || mid >= a1 + b1 {
                    continue;
                }
                // overlap in t: [max(a0, x - b1), min(a1, x - b0)]
                let lower = if mid < a0 + b1 {
                    Limit::Const(a0)
                } else {
                    Limit::Shift(b1)
                };
                let upper = if mid > a1 + b0 {
                    Limit::Const(a1)
                } else {
                    Limit::Shift(b0)
                };
                for tf in fterms {
                    for tg in gterms {
                        terms.extend(pair_integral(tf, tg, lower, upper));
                    }
                }
            }
        }
        pieces.push(canonicalize(terms));
    }
    PiecewiseExpo {
        breakpoints,
        pieces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(rate: f64) -> PiecewiseExpo {
        PiecewiseExpo::new(vec![0.0, 1.0], vec![vec![ExpoTerm::new(1.0, 0, rate)]]).unwrap()
    }

    #[test]
    fn resonant_order_two() {
        let alpha = 0.7;
        let b2 = convolve(&kernel(alpha), &kernel(alpha));
        assert_eq!(b2.breakpoints(), &[0.0, 1.0, 2.0]);
        assert_eq!(b2.pieces()[0], vec![ExpoTerm::new(1.0, 1, alpha)]);
        for x in [1.0, 1.3, 1.9] {
            let expected = (2.0 - x) * (alpha * x).exp();
            assert!((b2.evaluate(x) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn non_resonant_is_sinh() {
        let alpha = 1.3;
        let g = convolve(&kernel(alpha), &kernel(-alpha));
        for x in [0.1, 0.5, 0.99] {
            let expected = (alpha * x).sinh() / alpha;
            assert!((g.evaluate(x) - expected).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn hat_function() {
        let hat = convolve(&kernel(0.0), &kernel(0.0));
        assert_eq!(hat.evaluate(1.0), 1.0);
        assert!((hat.evaluate(0.25) - 0.25).abs() < 1e-15);
        assert!((hat.evaluate(1.5) - 0.5).abs() < 1e-15);
        assert_eq!(hat.evaluate(-0.5), 0.0);
        assert_eq!(hat.evaluate(2.5), 0.0);
    }

    #[test]
    fn canonicalize_merges() {
        let t = canonicalize(vec![
            ExpoTerm::new(1.0, 1, 0.5),
            ExpoTerm::new(2.0, 0, 0.5),
            ExpoTerm::new(3.0, 1, 0.5 + 1e-15),
        ]);
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].coefficient, 4.0);
    }

    #[test]
    fn piece_convention() {
        let f = PiecewiseExpo::new(
            vec![0.0, 1.0, 2.0],
            vec![vec![ExpoTerm::new(1.0, 0, 0.0)], vec![ExpoTerm::new(2.0, 0, 0.0)]],
        )
        .unwrap();
        assert_eq!(f.evaluate(1.0), 2.0);
        assert_eq!(f.evaluate(2.0), 2.0);
        assert_eq!(f.evaluate(0.0), 1.0);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PiecewiseExpo::new(vec![0.0, 0.0], vec![vec![]]).is_err());
        assert!(PiecewiseExpo::new(vec![0.0, 1.0], vec![]).is_err());
    }
}
