//! Seeded Gaussian noise.
//!
//! The stream is SplitMix64: the state advances by `0x9E3779B97F4A7C15` and
//! each output is mixed with the constants `0xBF58476D1CE4E5B9` and
//! `0x94D049BB133111EB` (shifts 30, 27, 31). A uniform in `(0, 1]` is
//! `((z >> 11) + 1) · 2⁻⁵³`. Gaussians come from Box–Muller on two
//! consecutive uniforms `u1, u2`: first `√(−2 ln u1) cos(2π u2)`, then the
//! matching `sin` value.

#[derive(Debug, Clone)]
pub struct GaussianStream {
    state: u64,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `(0, 1]`.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal sample.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(s) = self.spare.take() {
            return s;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// `count` samples with mean 0 and standard deviation `sigma`.
    pub fn samples(&mut self, count: usize, sigma: f64) -> Vec<f64> {
        (0..count).map(|_| sigma * self.next_gaussian()).collect()
    }
}
