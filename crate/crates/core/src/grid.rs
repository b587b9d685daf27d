use crate::error::{invalid, HpError, Result};

/// Uniform knot partition of `[a, b]` with `n` knots, extended by three extra
/// knots on each side.
///
/// Knots are indexed `ξ_{-2}, …, ξ_{n+3}` with `ξ_ℓ = a + (ℓ - 1) h`, so that
/// `ξ_1 = a` and `ξ_n = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotGrid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl KnotGrid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(invalid("grid bounds must be finite"));
        }
        if b <= a {
            return Err(invalid(format!("grid needs b > a, got a = {a}, b = {b}")));
        }
        if n < 2 {
            return Err(invalid(format!("grid needs at least 2 knots, got {n}")));
        }
        Ok(Self {
            a,
            b,
            n,
            h: (b - a) / (n - 1) as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of knots in `[a, b]`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of basis functions, `n + 2`.
    pub fn basis_len(&self) -> usize {
        self.n + 2
    }

    /// Knot `ξ_ℓ` for `ℓ ∈ [-2, n + 3]`.
    pub fn knot(&self, l: isize) -> f64 {
        if l == self.n as isize {
            self.b
        } else {
            self.a + (l - 1) as f64 * self.h
        }
    }

    /// All knots `ξ_{-2}, …, ξ_{n+3}` (n + 6 values).
    pub fn knots(&self) -> Vec<f64> {
        (-2..=(self.n as isize + 3)).map(|l| self.knot(l)).collect()
    }

    /// Left end of the support of basis function `j`, i.e. `ξ_{j-2}`.
    pub fn offset(&self, j: usize) -> f64 {
        self.a + (j as f64 - 3.0) * self.h
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(HpError::OutOfDomain {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }

    /// Index of the first of the (at most) four basis functions active at `x`.
    pub(crate) fn first_active(&self, x: f64) -> usize {
        let u = ((x - self.a) / self.h).floor().max(0.0) as usize;
        u.min(self.n - 2)
    }

    /// `count` equally spaced points spanning `[a, b]`, endpoints included.
    pub fn linspace(&self, count: usize) -> Vec<f64> {
        linspace(self.a, self.b, count)
    }
}

pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { b } else { a + i as f64 * step })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_knots_on_unit_interval() {
        let g = KnotGrid::new(0.0, 1.0, 11).unwrap();
        assert!((g.h() - 0.1).abs() < 1e-15);
        assert!((g.knot(-2) + 0.3).abs() < 1e-15);
        assert!((g.knot(14) - 1.3).abs() < 1e-15);
        assert_eq!(g.knots().len(), 17);
    }

    #[test]
    fn two_knots() {
        let g = KnotGrid::new(0.0, 1.0, 2).unwrap();
        assert_eq!(g.h(), 1.0);
        assert_eq!(
            g.knots(),
            vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]
        );
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            KnotGrid::new(0.0, -1.0, 5),
            Err(HpError::InvalidArgument(_))
        ));
        assert!(KnotGrid::new(0.0, 1.0, 1).is_err());
        assert!(KnotGrid::new(0.0, f64::NAN, 4).is_err());
    }

    #[test]
    fn knots_are_uniform() {
        let g = KnotGrid::new(-1.5, 2.25, 9).unwrap();
        let k = g.knots();
        for w in k.windows(2) {
            assert!((w[1] - w[0] - g.h()).abs() < 1e-14);
        }
    }
}
