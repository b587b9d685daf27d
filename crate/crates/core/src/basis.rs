//! HB-spline basis: construction by convolution, collocation, reproduction.
//!
//! The cardinal HB-spline is the four-fold convolution of first-order kernels
//! `exp(ρx)` on `[0, 1]` with frequencies `(α, α, -α, -α)`. On a grid of
//! spacing `h` the basis function is the pure dilation `B(x / h)` of the
//! cardinal spline built with unit-grid frequency `αh`, so its segments lie in
//! `span{e^{αx}, x e^{αx}, e^{-αx}, x e^{-αx}}`.
//!
//! For small `|αh|` these four exponentials are nearly dependent and their
//! coefficients grow like `(αh)^{-3}`, so evaluation cancels catastrophically.
//! There the kernels are replaced by Taylor polynomials of `e^{ρx}` truncated
//! below double precision and convolved exactly, giving polynomial segments.

use crate::banded::RowBanded;
use crate::error::{invalid, HpError, Result};
use crate::expo::{ExpoTerm, PiecewiseExpo};
use crate::grid::KnotGrid;

/// At or below this `|αh|` the basis is built from Taylor-expanded kernels
/// instead of the exponential closed forms.
pub const SMALL_FREQUENCY: f64 = 1e-2;

/// Kernel truncation error bound for the series construction.
const SERIES_TRUNCATION: f64 = 1e-17;

/// Largest `|αh|` accepted before exponentials leave double range.
pub const MAX_FREQUENCY_STEP: f64 = 350.0;

pub(crate) fn check_frequency(alpha: f64, h: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(invalid(format!("frequency must be finite, got {alpha}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("knot spacing must be positive, got {h}")));
    }
    if (alpha * h).abs() > MAX_FREQUENCY_STEP {
        return Err(HpError::Range(format!(
            "|alpha * h| = {} exceeds {MAX_FREQUENCY_STEP}",
            (alpha * h).abs()
        )));
    }
    Ok(())
}

/// `exp(αx)` on `[0, 1]`, zero elsewhere.
pub fn first_order_kernel(alpha: f64) -> Result<PiecewiseExpo> {
    if !alpha.is_finite() {
        return Err(invalid(format!("frequency must be finite, got {alpha}")));
    }
    PiecewiseExpo::new(vec![0.0, 1.0], vec![vec![ExpoTerm::new(1.0, 0, alpha)]])
}

/// Taylor polynomial of `e^{ρx}` on `[0, 1]`, truncated once the next term
/// is below [`SERIES_TRUNCATION`].
fn series_kernel(rate: f64) -> Result<PiecewiseExpo> {
    let mut terms = vec![ExpoTerm::new(1.0, 0, 0.0)];
    let mut c = 1.0f64;
    let mut k = 0u32;
    while c.abs() > SERIES_TRUNCATION {
        k += 1;
        c *= rate / f64::from(k);
        terms.push(ExpoTerm::new(c, k, 0.0));
    }
    PiecewiseExpo::new(vec![0.0, 1.0], vec![terms])
}

/// Drops polynomial terms that stay below `1e-20` on `[0, 4]`.
fn prune(spline: PiecewiseExpo) -> Result<PiecewiseExpo> {
    let (lo, hi) = spline.support();
    let reach = lo.abs().max(hi.abs()).max(1.0);
    let pieces = spline
        .pieces()
        .iter()
        .map(|terms| {
            terms
                .iter()
                .copied()
                .filter(|t| (t.coefficient * reach.powi(t.power as i32)).abs() >= 1e-20)
                .collect()
        })
        .collect();
    PiecewiseExpo::new(spline.breakpoints().to_vec(), pieces)
}

/// Convolution of first-order kernels with the given frequencies on spacing
/// `h`, defined by dilation of the unit-grid spline.
///
/// The unit-grid frequencies are `freq * h`; the result is supported on
/// `[0, k h]` for `k` frequencies.
pub fn build_with_frequencies(frequencies: &[f64], h: f64) -> Result<PiecewiseExpo> {
    let Some((&first, rest)) = frequencies.split_first() else {
        return Err(invalid("at least one frequency is required"));
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("knot spacing must be positive, got {h}")));
    }
    let mut acc = first_order_kernel(first * h)?;
    for &f in rest {
        acc = acc.convolve(&first_order_kernel(f * h)?);
    }
    if h == 1.0 {
        Ok(acc)
    } else {
        acc.dilate(h)
    }
}

/// The order-4 HB-spline `B^h` with frequencies `(α, α, -α, -α)`, supported on
/// `[0, 4h]`. At `α = 0` this is the cardinal cubic B-spline.
pub fn build_hb_spline(alpha: f64, h: f64) -> Result<PiecewiseExpo> {
    check_frequency(alpha, h)?;
    let rate = alpha * h;
    if rate.abs() > SMALL_FREQUENCY {
        return build_with_frequencies(&[alpha, alpha, -alpha, -alpha], h);
    }
    let plus = series_kernel(rate)?;
    let minus = series_kernel(-rate)?;
    let unit = prune(plus.convolve(&plus).convolve(&minus).convolve(&minus))?;
    if h == 1.0 {
        Ok(unit)
    } else {
        unit.dilate(h)
    }
}

/// Functions reproduced by the HB-spline space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproductionTarget {
    /// `e^{αx}`
    ExpPlus,
    /// `x e^{αx}`
    XExpPlus,
    /// `e^{-αx}`
    ExpMinus,
    /// `x e^{-αx}`
    XExpMinus,
}

impl ReproductionTarget {
    pub const ALL: [Self; 4] = [Self::ExpPlus, Self::XExpPlus, Self::ExpMinus, Self::XExpMinus];

    /// Sign of the exponent relative to α.
    pub fn sign(self) -> f64 {
        match self {
            Self::ExpPlus | Self::XExpPlus => 1.0,
            Self::ExpMinus | Self::XExpMinus => -1.0,
        }
    }

    pub fn has_linear_factor(self) -> bool {
        matches!(self, Self::XExpPlus | Self::XExpMinus)
    }

    pub fn eval(self, alpha: f64, x: f64) -> f64 {
        let e = (self.sign() * alpha * x).exp();
        if self.has_linear_factor() {
            x * e
        } else {
            e
        }
    }
}

/// Uniform HB-spline basis `B_0, …, B_{n+1}` on a [`KnotGrid`], with
/// `B_j(x) = B^h(x - ξ_{j-2})`.
#[derive(Debug, Clone)]
pub struct HbBasis {
    alpha: f64,
    grid: KnotGrid,
    spline: PiecewiseExpo,
}

impl HbBasis {
    pub fn new(grid: KnotGrid, alpha: f64) -> Result<Self> {
        let spline = build_hb_spline(alpha, grid.h())?;
        Ok(Self {
            alpha,
            grid,
            spline,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.basis_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The translated prototype spline `B^h`.
    pub fn spline(&self) -> &PiecewiseExpo {
        &self.spline
    }

    /// `B_j(x)`, with no domain restriction.
    pub fn eval(&self, j: usize, x: f64) -> f64 {
        self.spline.evaluate(x - self.grid.offset(j))
    }

    /// First active column and the four basis values at `x ∈ [a, b]`.
    pub fn active(&self, x: f64) -> (usize, [f64; 4]) {
        let k = self.grid.first_active(x);
        let mut v = [0.0; 4];
        for (p, vp) in v.iter_mut().enumerate() {
            *vp = self.eval(k + p, x);
        }
        (k, v)
    }

    /// Banded collocation matrix `(B_j(x_i))`, `m × (n + 2)`, four stored
    /// entries per row.
    pub fn collocation_matrix(&self, sites: &[f64]) -> Result<RowBanded> {
        let mut m = RowBanded::zeros(sites.len(), self.len(), 4);
        for (i, &x) in sites.iter().enumerate() {
            self.grid.check(x)?;
            let (k, v) = self.active(x);
            m.set_row(i, k, &v);
        }
        Ok(m)
    }

    /// `Σ_j c_j B_j(x)` for `x ∈ [a, b]`.
    pub fn combine(&self, coefficients: &[f64], x: f64) -> Result<f64> {
        if coefficients.len() != self.len() {
            return Err(invalid(format!(
                "{} coefficients for a basis of size {}",
                coefficients.len(),
                self.len()
            )));
        }
        self.grid.check(x)?;
        let (k, v) = self.active(x);
        Ok(v.iter().zip(&coefficients[k..k + 4]).map(|(b, c)| b * c).sum())
    }

    /// Coefficients reproducing `target` exactly on `[a, b]`.
    ///
    /// The coefficients have the form `c_k = e^{±α t_k} (γ₀ + γ₁ t_k)` with
    /// `t_k` the left end of the support of `B_k`. `γ₀, γ₁` are fixed by
    /// collocation at two interior points and then certified on a 200-point
    /// grid.
    pub fn reproduction_coefficients(&self, target: ReproductionTarget) -> Result<Vec<f64>> {
        let rate = target.sign() * self.alpha;
        let (a, b) = (self.grid.a(), self.grid.b());
        let offsets: Vec<f64> = (0..self.len()).map(|j| self.grid.offset(j)).collect();
        let geometric: Vec<f64> = offsets.iter().map(|t| (rate * t).exp()).collect();
        let linear: Vec<f64> = offsets.iter().zip(&geometric).map(|(t, g)| t * g).collect();

        let x1 = a + (b - a) / 3.0;
        let x2 = a + 2.0 * (b - a) / 3.0;
        let g0 = |x| self.combine(&geometric, x);
        let g1 = |x| self.combine(&linear, x);

        let (gamma0, gamma1) = if target.has_linear_factor() {
            let (p, q) = (g0(x1)?, g1(x1)?);
            let (r, s) = (g0(x2)?, g1(x2)?);
            let (y1, y2) = (target.eval(self.alpha, x1), target.eval(self.alpha, x2));
            let det = p * s - q * r;
            ((y1 * s - q * y2) / det, (p * y2 - r * y1) / det)
        } else {
            (target.eval(self.alpha, x1) / g0(x1)?, 0.0)
        };
        let coefficients: Vec<f64> = geometric
            .iter()
            .zip(&linear)
            .map(|(g, l)| gamma0 * g + gamma1 * l)
            .collect();

        let check = self.grid.linspace(200);
        let scale = check
            .iter()
            .map(|&x| target.eval(self.alpha, x).abs())
            .fold(1.0, f64::max);
        let mut worst = 0.0f64;
        for &x in &check {
            let r = (self.combine(&coefficients, x)? - target.eval(self.alpha, x)).abs();
            worst = worst.max(r);
        }
        if !(worst <= 1e-9 * scale) || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(HpError::InternalConsistency(format!(
                "reproduction of {target:?} leaves residual {worst:e}"
            )));
        }
        Ok(coefficients)
    }
}

/// Collocation matrix of the HB-spline basis on `grid` at `sites`.
pub fn collocation_matrix(grid: &KnotGrid, alpha: f64, sites: &[f64]) -> Result<RowBanded> {
    HbBasis::new(*grid, alpha)?.collocation_matrix(sites)
}

/// Coefficients `c` with `Σ_j c_j B_j = target` on `[a, b]`.
pub fn reproduction_coefficients(
    target: ReproductionTarget,
    grid: &KnotGrid,
    alpha: f64,
) -> Result<Vec<f64>> {
    HbBasis::new(*grid, alpha)?.reproduction_coefficients(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expo::rates_equal;

    #[test]
    fn kernel_values() {
        let k0 = first_order_kernel(0.0).unwrap();
        assert_eq!(k0.evaluate(0.5), 1.0);
        let k1 = first_order_kernel(1.0).unwrap();
        assert!((k1.evaluate(0.5) - 0.5f64.exp()).abs() < 1e-15);
        for a in [-2.0, 0.0, 3.0] {
            let k = first_order_kernel(a).unwrap();
            assert_eq!(k.evaluate(-0.1), 0.0);
            assert_eq!(k.evaluate(1.1), 0.0);
        }
        assert!(first_order_kernel(f64::NAN).is_err());
        assert!(first_order_kernel(f64::INFINITY).is_err());
    }

    #[test]
    fn order_two_at_one_is_e() {
        let b2 = build_with_frequencies(&[1.0, 1.0], 1.0).unwrap();
        assert!((b2.evaluate(1.0) - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn cubic_values() {
        let b = build_hb_spline(0.0, 1.0).unwrap();
        let expected = [0.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 0.0];
        for (x, e) in expected.iter().enumerate() {
            assert!((b.evaluate(x as f64) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn structure_of_segments() {
        for (alpha, h) in [(1.0, 1.0), (-2.0, 0.1), (0.5, 0.25)] {
            let b = build_hb_spline(alpha, h).unwrap();
            assert_eq!(b.pieces().len(), 4);
            let (lo, hi) = b.support();
            assert_eq!(lo, 0.0);
            assert!((hi - 4.0 * h).abs() < 1e-14);
            assert_eq!(b.evaluate(4.0 * h + 1e-9), 0.0);
            for piece in b.pieces() {
                for t in piece {
                    assert!(t.power <= 1, "{t:?}");
                    assert!(
                        rates_equal(t.rate, alpha) || rates_equal(t.rate, -alpha),
                        "{t:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_spacing() {
        assert!(matches!(
            build_hb_spline(1.0, 0.0),
            Err(HpError::InvalidArgument(_))
        ));
        assert!(build_hb_spline(1.0, -1.0).is_err());
        assert!(matches!(
            build_hb_spline(400.0, 1.0),
            Err(HpError::Range(_))
        ));
    }

    #[test]
    fn collocation_at_knot() {
        let grid = KnotGrid::new(0.0, 1.0, 11).unwrap();
        let c = collocation_matrix(&grid, 0.0, &[0.5]).unwrap();
        let row: Vec<f64> = (0..grid.basis_len()).map(|j| c.get(0, j)).collect();
        let nz: Vec<f64> = row.iter().copied().filter(|v| v.abs() > 1e-14).collect();
        assert_eq!(nz.len(), 3);
        for (v, e) in nz.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn collocation_rows_and_domain() {
        let grid = KnotGrid::new(0.0, 1.0, 6).unwrap();
        let sites = vec![0.0; 5];
        let c = collocation_matrix(&grid, 1.5, &sites).unwrap();
        assert_eq!(c.width(), 4);
        for i in 1..5 {
            assert_eq!(c.row(i), c.row(0));
            assert_eq!(c.first_col(i), c.first_col(0));
        }
        assert!(matches!(
            collocation_matrix(&grid, 1.5, &[1.01]),
            Err(HpError::OutOfDomain { .. })
        ));
        let last = collocation_matrix(&grid, 1.5, &[1.0]).unwrap();
        assert_eq!(last.first_col(0) + 4, grid.basis_len());
    }

    #[test]
    fn partition_of_unity() {
        let grid = KnotGrid::new(0.0, 1.0, 9).unwrap();
        let c = reproduction_coefficients(ReproductionTarget::ExpPlus, &grid, 0.0).unwrap();
        for ck in c {
            assert!((ck - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_ratio() {
        let grid = KnotGrid::new(0.0, 2.0, 9).unwrap();
        for alpha in [-1.5, 0.7, 2.0] {
            let c = reproduction_coefficients(ReproductionTarget::ExpPlus, &grid, alpha).unwrap();
            for w in c.windows(2) {
                assert!((w[1] / w[0] - (alpha * grid.h()).exp()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn all_targets_reproduced() {
        let grid = KnotGrid::new(-0.5, 1.5, 8).unwrap();
        for target in ReproductionTarget::ALL {
            for alpha in [-2.0, -0.3, 0.0, 1.0, 3.0] {
                reproduction_coefficients(target, &grid, alpha).unwrap();
            }
        }
    }
}
