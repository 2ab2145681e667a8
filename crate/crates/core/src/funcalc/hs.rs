use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::testfn::TestFunction;
use crate::error::{Error, Result};
use crate::linalg::{tridiagonal_inverse, ComplexMat, Mat, Scalar, Tridiagonal};
use crate::smooth::{smooth_step, smooth_step_deriv};

/// Cutoff `σ(y)` in the imaginary direction: 1 on `|y| ≤ 1/2`, 0 on `|y| ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bump {
    /// `S((1 − |y|)/(1/2))` with `S` the exponential smooth step.
    Exponential,
    /// Same step composed with `t ↦ t²(3 − 2t)`.
    Warped,
}

impl Bump {
    fn arg(y: f64) -> f64 {
        (1.0 - y.abs()) / 0.5
    }

    pub fn value(self, y: f64) -> f64 {
        let t = Self::arg(y);
        match self {
            Bump::Exponential => smooth_step(t),
            Bump::Warped => {
                let t = t.clamp(0.0, 1.0);
                smooth_step(t * t * (3.0 - 2.0 * t))
            }
        }
    }

    pub fn deriv(self, y: f64) -> f64 {
        let t = Self::arg(y);
        let dt = -2.0 * y.signum();
        match self {
            Bump::Exponential => smooth_step_deriv(t) * dt,
            Bump::Warped => {
                if !(0.0..=1.0).contains(&t) {
                    return 0.0;
                }
                let w = t * t * (3.0 - 2.0 * t);
                smooth_step_deriv(w) * 6.0 * t * (1.0 - t) * dt
            }
        }
    }
}

/// Tensor midpoint rule on `supp f × (0, 1]`: uniform in `x`, geometric in
/// `y` on `(0, 1/2]` and uniform on `[1/2, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HSQuadrature {
    /// Order `l` of the almost-analytic extension.
    pub order: usize,
    pub bump: Bump,
    pub x_step: f64,
    /// Lowest geometric cell edge; `(0, y_min)` is one extra cell.
    pub y_min: f64,
    pub y_geometric: usize,
    pub y_uniform: usize,
    pub max_nodes: usize,
}

impl Default for HSQuadrature {
    fn default() -> Self {
        Self {
            order: 4,
            bump: Bump::Exponential,
            x_step: 0.02,
            y_min: 1e-3,
            y_geometric: 24,
            y_uniform: 24,
            max_nodes: 2_000_000,
        }
    }
}

impl HSQuadrature {
    /// Every grid step halved.
    pub fn refined(&self) -> Self {
        Self {
            x_step: self.x_step / 2.0,
            y_min: self.y_min / 2.0,
            y_geometric: 2 * self.y_geometric,
            y_uniform: 2 * self.y_uniform,
            ..self.clone()
        }
    }

    /// Midpoints and widths of the `y` cells.
    pub fn y_cells(&self) -> Vec<(f64, f64)> {
        let mut cells = vec![(self.y_min / 2.0, self.y_min)];
        let ratio = (0.5 / self.y_min).powf(1.0 / self.y_geometric as f64);
        let mut lo = self.y_min;
        for _ in 0..self.y_geometric {
            let hi = lo * ratio;
            cells.push((0.5 * (lo + hi), hi - lo));
            lo = hi;
        }
        let h = 0.5 / self.y_uniform as f64;
        cells.extend((0..self.y_uniform).map(|k| (0.5 + (k as f64 + 0.5) * h, h)));
        cells
    }

    pub fn x_cells(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let n = ((hi - lo) / self.x_step).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        (0..n).map(|k| (lo + (k as f64 + 0.5) * h, h)).collect()
    }

    /// `∂f̃/∂z̄` at `x + iy` from `derivs = f(x), …, f^(l+1)(x)`.
    pub fn dbar(&self, derivs: &[f64], y: f64) -> Complex64 {
        let l = self.order;
        let iy = Complex64::new(0.0, y);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for (n, &d) in derivs.iter().take(l + 1).enumerate() {
            if n > 0 {
                pow *= iy;
                fact *= n as f64;
            }
            sum += d * pow / fact;
        }
        let top = derivs[l + 1] * pow / fact;
        0.5 * sum * Complex64::new(0.0, self.bump.deriv(y)) + 0.5 * top * self.bump.value(y)
    }

    /// `max |∂̄f̃| / (max_{j ≤ l+1} |f^(j)(x)| · y^l)` over the grid.
    pub fn dbar_constant(&self, f: &TestFunction) -> f64 {
        let (a, b) = f.integration_range();
        let mut c = 0.0f64;
        for (x, _) in self.x_cells(a, b) {
            let d = f.derivatives(x, self.order + 1);
            let m = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m == 0.0 {
                continue;
            }
            for (y, _) in self.y_cells() {
                c = c.max(self.dbar(&d, y).norm() / (m * y.powi(self.order as i32)));
            }
        }
        c
    }
}

/// Number of eigenvalues of the tridiagonal matrix below `x`.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { offdiag[i - 1] * offdiag[i - 1] };
        q = d - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest and largest eigenvalue of the tridiagonal matrix, by bisection.
pub fn spectral_bounds(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let r = |i: usize| {
        (if i > 0 { offdiag[i - 1] } else { 0.0 }) + if i + 1 < n { offdiag[i] } else { 0.0 }
    };
    let lo0 = (0..n).map(|i| diag[i] - r(i)).fold(f64::INFINITY, f64::min) - 1e-12;
    let hi0 = (0..n).map(|i| diag[i] + r(i)).fold(f64::NEG_INFINITY, f64::max) + 1e-12;
    let bisect = |k: usize| {
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(diag, offdiag, mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    (bisect(1), bisect(n))
}

/// `f(X) = −(1/π) ∫ ∂f̃/∂z̄ (z − X)⁻¹ dx dy`.
///
/// Only `y > 0` is integrated: the lower half-plane contributes the adjoint,
/// so the sum is `−(2/π) Re S` in the reduced basis where `X` is a real
/// tridiagonal matrix.
pub fn hs_apply<T: Scalar>(x: &Mat<T>, f: &TestFunction, quad: &HSQuadrature) -> Result<Mat<T>> {
    f.validate()?;
    let (a, b) = f
        .support()
        .ok_or_else(|| Error::InvalidParameter("functional calculus needs a compactly supported f".into()))?;
    if let Some(s) = f.smoothness() {
        if s < quad.order + 1 {
            return Err(Error::InvalidParameter(format!(
                "f is only C^{s}; order {} needs C^{}",
                quad.order,
                quad.order + 1
            )));
        }
    }
    let tri = Tridiagonal::reduce(x)?;
    let n = tri.dim();
    let (spec_lo, spec_hi) = spectral_bounds(&tri.diag, &tri.offdiag);
    if !(a < spec_lo && spec_hi < b) {
        return Err(Error::SupportTooSmall {
            lo: a,
            hi: b,
            spec_lo,
            spec_hi,
        });
    }
    let xs = quad.x_cells(a, b);
    let ys = quad.y_cells();
    let nodes = xs.len() * ys.len();
    if nodes > quad.max_nodes {
        return Err(Error::QuadratureBudget {
            nodes,
            limit: quad.max_nodes,
        });
    }
    let mut s = ComplexMat::zeros(n, n);
    for &(xc, wx) in &xs {
        let d = f.derivatives(xc, quad.order + 1);
        if d.iter().all(|&v| v == 0.0) {
            continue;
        }
        for &(yc, wy) in &ys {
            let w = quad.dbar(&d, yc) * (wx * wy);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let r = tridiagonal_inverse(&tri.diag, &tri.offdiag, Complex64::new(xc, yc))?;
            for (acc, &v) in s.as_mut_slice().iter_mut().zip(r.as_slice()) {
                *acc += w * v;
            }
        }
    }
    let ft = Mat::<T>::from_fn(n, n, |i, j| T::from_re(-2.0 / std::f64::consts::PI * s[(i, j)].re));
    let q = tri.basis();
    let out = q.matmul(&ft).matmul(&q.adjoint());
    Ok(out.add(&out.adjoint()).scaled(0.5))
}

/// `‖A(quad) − A(refined)‖_F / ‖A(refined)‖_F`.
pub fn hs_error_estimate<T: Scalar>(x: &Mat<T>, f: &TestFunction, quad: &HSQuadrature) -> Result<f64> {
    let coarse = hs_apply(x, f, quad)?;
    let fine = hs_apply(x, f, &quad.refined())?;
    Ok(coarse.sub(&fine).frobenius_norm() / fine.frobenius_norm().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RealMat;

    #[test]
    fn bumps_have_the_required_plateau() {
        for b in [Bump::Exponential, Bump::Warped] {
            assert_eq!(b.value(0.3), 1.0);
            assert_eq!(b.value(-0.5), 1.0);
            assert_eq!(b.value(1.0), 0.0);
            assert_eq!(b.deriv(0.2), 0.0);
            let v = b.value(0.75);
            assert!(v > 0.0 && v < 1.0);
            let h = 1e-6;
            let fd = (b.value(0.8 + h) - b.value(0.8 - h)) / (2.0 * h);
            assert!((fd - b.deriv(0.8)).abs() < 1e-7);
        }
    }

    #[test]
    fn sturm_bounds_of_a_known_matrix() {
        // Path graph of length 3: eigenvalues 0, ±√2.
        let (lo, hi) = spectral_bounds(&[0.0; 3], &[1.0, 1.0]);
        assert!((lo + 2f64.sqrt()).abs() < 1e-12 && (hi - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(sturm_count(&[0.0; 3], &[1.0, 1.0], 0.5), 2);
    }

    #[test]
    fn diagonal_example() {
        // f = (−1/2 + 5x/2)·plateau: f(1) = 2, f(−1) = −3.
        let f = TestFunction::plateau(0.0, 3.0, 0.5).weighted(&[-0.5, 2.5]);
        let x = RealMat::diag(&[1.0, -1.0]);
        let out = hs_apply(&x, &f, &HSQuadrature::default()).unwrap();
        let want = RealMat::diag(&[2.0, -3.0]);
        let err = out.sub(&want).frobenius_norm() / want.frobenius_norm();
        assert!(err <= 1e-3, "relative error {err}");
    }

    #[test]
    fn rejects_small_support_and_rough_functions() {
        let x = RealMat::diag(&[1.0, -1.0]);
        let f = TestFunction::smooth_bump(0.0, 0.9);
        assert!(matches!(hs_apply(&x, &f, &HSQuadrature::default()), Err(Error::SupportTooSmall { .. })));
        let f = TestFunction::poly_bump(0.0, 3.0, 4);
        assert!(hs_apply(&x, &f, &HSQuadrature::default()).is_err());
        let q = HSQuadrature {
            max_nodes: 10,
            ..HSQuadrature::default()
        };
        assert!(matches!(
            hs_apply(&x, &TestFunction::smooth_bump(0.0, 3.0), &q),
            Err(Error::QuadratureBudget { .. })
        ));
    }
}
