use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{Error, Result};
use crate::quadrature::Composite;

/// Shape `χ(t)` of the cutoff in the scaled variable `t = (x − c)/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Cutoff {
    /// `(1 − t²)^power` on `|t| < 1`; of class `C^(power−1)`.
    Polynomial { power: u32 },
    /// `exp(1 − 1/(1 − t²))` on `|t| < 1`.
    Exponential,
    /// 1 on `|t| ≤ inner`, 0 on `|t| ≥ 1`, smooth in between.
    Plateau { inner: f64 },
    /// `exp(−t²/2)`, supported on the whole line.
    Gaussian,
}

/// `f(x) = p(x) χ((x − c)/r)` with `p` a polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    /// Ascending coefficients of `p`.
    pub poly: Vec<f64>,
    pub cutoff: Cutoff,
    pub center: f64,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub order: usize,
    /// `max_{k ≤ n} sup_I |f^(k)|`.
    pub c_n: f64,
    /// `max_{k ≤ n} ∫ |f^(k)|`.
    pub sobolev: f64,
    /// `max_{k ≤ n} ∫ (1 + |x|) |f^(k)|`.
    pub sobolev_plus: f64,
}

fn psi(s: &Jet) -> Jet {
    s.recip().affine(-1.0, 0.0).exp()
}

fn cutoff_jet(c: Cutoff, t: &Jet) -> Jet {
    let n = t.order();
    let t0 = t.0[0];
    let zero = Jet::constant(0.0, n);
    match c {
        Cutoff::Polynomial { power } => {
            if t0.abs() >= 1.0 {
                zero
            } else {
                t.mul(t).affine(-1.0, 1.0).powi(power)
            }
        }
        Cutoff::Exponential => {
            if t0.abs() >= 1.0 {
                zero
            } else {
                t.mul(t).affine(-1.0, 1.0).recip().affine(-1.0, 1.0).exp()
            }
        }
        Cutoff::Plateau { inner } => {
            if t0.abs() <= inner {
                Jet::constant(1.0, n)
            } else if t0.abs() >= 1.0 {
                zero
            } else {
                let sign = t0.signum();
                let s = t.affine(-sign / (1.0 - inner), 1.0 / (1.0 - inner));
                let a = psi(&s);
                let b = psi(&s.affine(-1.0, 1.0));
                a.mul(&a.add(&b).recip())
            }
        }
        Cutoff::Gaussian => t.mul(t).affine(-0.5, 0.0).exp(),
    }
}

impl TestFunction {
    fn with_cutoff(cutoff: Cutoff, center: f64, radius: f64) -> Self {
        Self {
            poly: vec![1.0],
            cutoff,
            center,
            radius,
        }
    }

    pub fn poly_bump(center: f64, radius: f64, power: u32) -> Self {
        Self::with_cutoff(Cutoff::Polynomial { power }, center, radius)
    }

    pub fn smooth_bump(center: f64, radius: f64) -> Self {
        Self::with_cutoff(Cutoff::Exponential, center, radius)
    }

    pub fn plateau(center: f64, radius: f64, inner: f64) -> Self {
        Self::with_cutoff(Cutoff::Plateau { inner }, center, radius)
    }

    pub fn gaussian(center: f64, width: f64) -> Self {
        Self::with_cutoff(Cutoff::Gaussian, center, width)
    }

    /// Multiplies the cutoff by `Σ coeffs[k] x^k`.
    pub fn weighted(mut self, coeffs: &[f64]) -> Self {
        self.poly = coeffs.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.center.is_finite() || self.poly.is_empty() {
            return Err(Error::InvalidParameter(format!("test function {self:?}")));
        }
        if let Cutoff::Plateau { inner } = self.cutoff {
            if !(0.0..1.0).contains(&inner) {
                return Err(Error::InvalidParameter(format!("plateau inner fraction {inner}")));
            }
        }
        if let Cutoff::Polynomial { power } = self.cutoff {
            if power == 0 {
                return Err(Error::InvalidParameter("bump power must be positive".into()));
            }
        }
        Ok(())
    }

    /// `[c − r, c + r]`, or `None` for the whole line.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self.cutoff {
            Cutoff::Gaussian => None,
            _ => Some((self.center - self.radius, self.center + self.radius)),
        }
    }

    /// Highest order `n` with `f ∈ C^n`; `None` means smooth.
    pub fn smoothness(&self) -> Option<usize> {
        match self.cutoff {
            Cutoff::Polynomial { power } => Some(power as usize - 1),
            _ => None,
        }
    }

    /// `f(x), f′(x), …, f^(n)(x)`.
    pub fn derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        let xj = Jet::variable(x, n);
        let t = xj.affine(1.0 / self.radius, -self.center / self.radius);
        let mut p = Jet::constant(0.0, n);
        for &c in self.poly.iter().rev() {
            p = p.mul(&xj).affine(1.0, c);
        }
        p.mul(&cutoff_jet(self.cutoff, &t)).derivatives()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivatives(x, 0)[0]
    }

    /// Interval used for integrals and suprema.
    pub fn integration_range(&self) -> (f64, f64) {
        self.support()
            .unwrap_or((self.center - 12.0 * self.radius, self.center + 12.0 * self.radius))
    }

    pub fn norms(&self, n: usize) -> NormReport {
        let (a, b) = self.integration_range();
        let q = Composite::new(a, b, 200, 8);
        let mut c_n = 0.0f64;
        let mut l1 = vec![0.0; n + 1];
        let mut l1p = vec![0.0; n + 1];
        for (&x, &w) in q.nodes().iter().zip(q.weights()) {
            for (k, d) in self.derivatives(x, n).into_iter().enumerate() {
                c_n = c_n.max(d.abs());
                l1[k] += w * d.abs();
                l1p[k] += w * (1.0 + x.abs()) * d.abs();
            }
        }
        let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
        NormReport {
            order: n,
            c_n,
            sobolev: max(l1),
            sobolev_plus: max(l1p),
        }
    }

    /// Largest relative gap between the derivative evaluators and
    /// fourth-order central differences of the next lower derivative, over
    /// `probes` interior points. Each probe uses the best of several steps.
    pub fn finite_difference_defect(&self, n: usize, probes: usize) -> f64 {
        let (a, b) = self.integration_range();
        let mut worst = 0.0f64;
        for i in 0..probes {
            let x = a + (b - a) * (i as f64 + 0.5) / probes as f64;
            let d = self.derivatives(x, n);
            let scale = d.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let mut best = vec![f64::INFINITY; n + 1];
            for e in 2..=6 {
                let h = self.radius * 10f64.powi(-e);
                let at = |s: f64| self.derivatives(x + s * h, n);
                let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
                for k in 1..=n {
                    let j = k - 1;
                    let fd = (8.0 * (p1[j] - m1[j]) - (p2[j] - m2[j])) / (12.0 * h);
                    best[k] = best[k].min((fd - d[k]).abs() / scale);
                }
            }
            worst = best[1..].iter().fold(worst, |w, &v| w.max(v));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_bump_values() {
        let f = TestFunction::poly_bump(0.0, 2.0, 3);
        // (1 − x²/4)³ at x = 1 and its derivative −(3/2) x (1 − x²/4)².
        let d = f.derivatives(1.0, 1);
        assert!((d[0] - 27.0 / 64.0).abs() < 1e-15);
        assert!((d[1] + 1.5 * 9.0 / 16.0).abs() < 1e-15);
        assert_eq!(f.eval(2.5), 0.0);
        assert_eq!(f.smoothness(), Some(2));
    }

    #[test]
    fn plateau_is_flat_inside() {
        let f = TestFunction::plateau(0.0, 3.0, 0.5);
        assert_eq!(f.derivatives(1.0, 4), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(f.eval(3.1), 0.0);
        let mid = f.eval(2.25);
        assert!((mid - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivatives_agree_with_differences() {
        for f in [
            TestFunction::smooth_bump(0.2, 3.0).weighted(&[1.0, -0.5, 0.25]),
            TestFunction::plateau(0.0, 3.0, 0.4),
            TestFunction::gaussian(0.0, 1.0),
            TestFunction::poly_bump(0.0, 2.5, 8),
        ] {
            let d = f.finite_difference_defect(6, 100);
            assert!(d <= 1e-6, "{f:?}: {d}");
        }
    }

    #[test]
    fn gaussian_norms() {
        let n = TestFunction::gaussian(0.0, 1.0).norms(1);
        // ∫ e^{−x²/2} = √(2π), ∫ |x| e^{−x²/2} = 2.
        assert!((n.sobolev - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        assert!((n.sobolev_plus - ((2.0 * std::f64::consts::PI).sqrt() + 2.0)).abs() < 1e-10);
        assert!((n.c_n - 1.0).abs() < 1e-3);
    }
}
