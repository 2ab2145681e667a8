use crate::error::{Error, Result};
use crate::linalg::{dot, eig_projected, Mat, Scalar};
use crate::smooth::plateau;
use crate::spectral::{Resolvent, Semicircle};

/// Evaluation window `[2σ + 2δ, L]` with grid step `N^(-1/3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolventWindow {
    pub sigma: f64,
    pub delta: f64,
    pub upper: f64,
    pub grid: Vec<f64>,
}

impl ResolventWindow {
    /// Window for the supercritical spikes among `thetas`.
    ///
    /// `delta` (default `σ/4`) is halved until every `θ > σ` satisfies
    /// `θ > 1/g_σ(2σ + 2δ)`, i.e. `ρ_θ > 2σ + 2δ`. The upper end is
    /// `L = max θ + 2σ + 2δ`; without supercritical spikes `L = 2σ + 2δ + σ`.
    pub fn for_spikes(sigma: f64, thetas: &[f64], n: usize, delta: Option<f64>) -> Result<Self> {
        let sc = Semicircle::new(sigma)?;
        let mut delta = delta.unwrap_or(0.25 * sigma);
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!("δ must be positive, got {delta}")));
        }
        let supercritical: Vec<f64> = thetas.iter().copied().filter(|&t| t > sigma).collect();
        let mut halvings = 0;
        while supercritical
            .iter()
            .any(|&t| !(t > 1.0 / sc.stieltjes_real(2.0 * sigma + 2.0 * delta).unwrap_or(f64::NAN)))
        {
            delta /= 2.0;
            halvings += 1;
            if halvings > 60 {
                return Err(Error::InvalidParameter("could not choose δ for the spikes".into()));
            }
        }
        let top = supercritical.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let upper = if top.is_finite() {
            top + 2.0 * sigma + 2.0 * delta
        } else {
            3.0 * sigma + 2.0 * delta
        };
        Self::new(sigma, delta, upper, n)
    }

    /// Grid `x_0 = 2σ + 2δ < x_1 < …` with step `N^(-1/3)`, ending at the
    /// first point beyond `L`.
    pub fn new(sigma: f64, delta: f64, upper: f64, n: usize) -> Result<Self> {
        let lo = 2.0 * sigma + 2.0 * delta;
        if !(upper >= lo) || n == 0 {
            return Err(Error::InvalidParameter(format!("empty window [{lo}, {upper}]")));
        }
        let step = (n as f64).powf(-1.0 / 3.0);
        let count = ((upper - lo) / step).floor() as usize + 2;
        let grid = (0..count).map(|i| lo + i as f64 * step).collect();
        Ok(Self {
            sigma,
            delta,
            upper,
            grid,
        })
    }

    /// `h`: 1 on `[−2σ − δ/2, 2σ + δ/2]`, 0 outside `[−2σ − δ, 2σ + δ]`.
    pub fn cutoff(&self, x: f64) -> f64 {
        let e = 2.0 * self.sigma;
        plateau(x, e + self.delta / 2.0, e + self.delta)
    }

    /// `log N · N^(1/6)`.
    pub fn bound(n: usize) -> f64 {
        let nf = n as f64;
        nf.ln() * nf.powf(1.0 / 6.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZetaScan {
    pub max_abs: f64,
    pub argmax: f64,
    /// Same maximum with `R²` replaced by `h(X) R²`.
    pub max_abs_cutoff: f64,
    pub points: usize,
}

/// `max_x |ζ_N(x)|` over the window grid, where
/// `ζ_N(x) = −√N(⟨u, R²(x) v⟩ + g′_σ(x)⟨u, v⟩)`.
///
/// One eigen-projection of `X` onto `u, v` serves every grid point.
pub fn zeta_scan<T: Scalar>(x: &Mat<T>, window: &ResolventWindow, u: &[T], v: &[T], sigma: f64) -> Result<ZetaScan> {
    if window.grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let sc = Semicircle::new(sigma)?;
    let proj = eig_projected(x, &[u, v])?;
    let tol = crate::spectral::DEFAULT_SPECTRUM_TOLERANCE * x.inf_norm().max(1.0);
    let top = proj.eigenvalues.first().copied().unwrap_or(f64::NEG_INFINITY);
    if window.grid[0] - top <= tol {
        return Err(Error::InsideSpectrum {
            z: format!("{}", window.grid[0]),
            distance: window.grid[0] - top,
            tolerance: tol,
        });
    }
    let uv = dot(u, v).to_c64();
    let root = (x.rows() as f64).sqrt();
    let weights: Vec<_> = proj.coords[0]
        .iter()
        .zip(&proj.coords[1])
        .map(|(a, b)| (a.conj() * *b).to_c64())
        .collect();
    let hs: Vec<f64> = proj.eigenvalues.iter().map(|&l| window.cutoff(l)).collect();
    let mut best = (0.0, window.grid[0]);
    let mut best_cut = 0.0f64;
    for &p in &window.grid {
        let gp = sc.stieltjes_deriv_real(p)?;
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        let mut sh = s;
        for ((w, &l), &h) in weights.iter().zip(&proj.eigenvalues).zip(&hs) {
            let r2 = 1.0 / ((p - l) * (p - l));
            s += w * r2;
            sh += w * (r2 * h);
        }
        let z = (-root * (s + gp * uv)).norm();
        let zc = (-root * (sh + gp * uv)).norm();
        if z > best.0 {
            best = (z, p);
        }
        best_cut = best_cut.max(zc);
    }
    Ok(ZetaScan {
        max_abs: best.0,
        argmax: best.1,
        max_abs_cutoff: best_cut,
        points: window.grid.len(),
    })
}

/// `ζ_N` at one point by two chained solves.
pub fn zeta_at<T: Scalar>(x: &Mat<T>, point: f64, u: &[T], v: &[T], sigma: f64) -> Result<f64> {
    let gp = Semicircle::new(sigma)?.stieltjes_deriv_real(point)?;
    let r = Resolvent::real(x, point)?;
    let root = (x.rows() as f64).sqrt();
    Ok((-root * (r.bilinear_sq(u, v).to_c64() + gp * dot(u, v).to_c64())).norm())
}
