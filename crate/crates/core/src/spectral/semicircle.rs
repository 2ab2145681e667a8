use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Semicircle law on `[-2σ, 2σ]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Semicircle {
    sigma: f64,
}

impl Semicircle {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("σ must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn edge(&self) -> f64 {
        2.0 * self.sigma
    }

    pub fn density(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d = 4.0 * s2 - x * x;
        if d <= 0.0 {
            0.0
        } else {
            d.sqrt() / (2.0 * PI * s2)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let e = self.edge();
        if x <= -e {
            return 0.0;
        }
        if x >= e {
            return 1.0;
        }
        let s2 = self.sigma * self.sigma;
        let v = 0.5 + x * (4.0 * s2 - x * x).sqrt() / (4.0 * PI * s2) + (x / e).asin() / PI;
        v.clamp(0.0, 1.0)
    }

    /// `g_σ(z) = ∫ dμ(x)/(z − x)`, the root of `σ²g² − zg + 1 = 0` that
    /// vanishes at infinity.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_support(z)?;
        let s2 = self.sigma * self.sigma;
        // s = z √(1 − 4σ²/z²) has Re s · Re z ≥ 0, so z + s never cancels.
        let s = z * (Complex64::new(1.0, 0.0) - 4.0 * s2 / (z * z)).sqrt();
        Ok(2.0 / (z + s))
    }

    pub fn stieltjes_deriv(&self, z: Complex64) -> Result<Complex64> {
        let g = self.stieltjes(z)?;
        Ok(g / (2.0 * self.sigma * self.sigma * g - z))
    }

    pub fn stieltjes_real(&self, x: f64) -> Result<f64> {
        Ok(self.stieltjes(Complex64::new(x, 0.0))?.re)
    }

    pub fn stieltjes_deriv_real(&self, x: f64) -> Result<f64> {
        Ok(self.stieltjes_deriv(Complex64::new(x, 0.0))?.re)
    }

    fn check_off_support(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite spectral parameter {z}")));
        }
        if z.im == 0.0 && z.re.abs() <= self.edge() {
            return Err(Error::OnSupport(format!("{}", z.re)));
        }
        Ok(())
    }

    /// `ρ_θ = θ + σ²/θ`.
    pub fn rho(&self, theta: f64) -> Result<f64> {
        if theta == 0.0 || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("θ must be finite and nonzero, got {theta}")));
        }
        Ok(theta + self.sigma * self.sigma / theta)
    }

    /// `c_θ = θ²/(θ² − σ²)`.
    pub fn c_theta(&self, theta: f64) -> Result<f64> {
        let s2 = self.sigma * self.sigma;
        if !(theta.abs() > self.sigma) {
            return Err(Error::Subcritical {
                theta,
                sigma: self.sigma,
            });
        }
        Ok(theta * theta / (theta * theta - s2))
    }

    /// `θ² − σ² = −1/g′(ρ_θ)`.
    pub fn fluctuation_scale(&self, theta: f64) -> Result<f64> {
        if !(theta.abs() > self.sigma) {
            return Err(Error::Subcritical {
                theta,
                sigma: self.sigma,
            });
        }
        Ok(theta * theta - self.sigma * self.sigma)
    }

    /// `∫ f dμ` by Gauss–Legendre in the angle `x = 2σ cos t`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let rule = crate::quadrature::Composite::new(0.0, PI, 32, 16);
        let e = self.edge();
        rule.integrate(|t| f(e * t.cos()) * 2.0 / PI * t.sin().powi(2))
    }
}
