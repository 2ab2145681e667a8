//! Sample summaries, Kolmogorov–Smirnov distances and log-log rate fits.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub experiment: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Finite real sample with a label and its origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    values: Vec<f64>,
    pub label: String,
    pub provenance: Provenance,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, label: impl Into<String>, provenance: Provenance) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample value"));
        }
        Ok(Self {
            values,
            label: label.into(),
            provenance,
        })
    }

    /// Sample without provenance beyond its size.
    pub fn anonymous(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let trials = values.len();
        Self::new(
            values,
            label,
            Provenance {
                trials,
                ..Provenance::default()
            },
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `sup |F_a − F_b|` between the two empirical distribution functions.
pub fn ks_two_sample(a: &SampleSet, b: &SampleSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample("sample"));
    }
    let (xs, ys) = (a.sorted(), b.sorted());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// `sup |F_a − F|` against a continuous distribution function.
pub fn ks_one_sample(a: &SampleSet, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySample("sample"));
    }
    let xs = a.sorted();
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut prev = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        if !(0.0..=1.0).contains(&f) || f < prev {
            return Err(Error::InvalidParameter(format!("cdf is not a distribution function at {x}")));
        }
        prev = f;
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Type-7 sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample("sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("quantile level {p}")));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, p)
}

pub fn iqr(values: &[f64]) -> Result<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&v, 0.75)? - quantile_sorted(&v, 0.25)?)
}

pub fn median(values: &[f64]) -> Result<f64> {
    quantile(values, 0.5)
}

pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample("sample"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidParameter("variance needs at least two values".into()));
    }
    let m = mean(values)?;
    Ok(values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSpec {
    pub resamples: usize,
    pub level: f64,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        Self {
            resamples: 1000,
            level: 0.95,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    /// Normal-theory standard error of the variance.
    pub se_variance: f64,
    /// 5, 25, 50, 75 and 95% quantiles.
    pub quantiles: [f64; 5],
    pub bootstrap: BootstrapSpec,
    pub mean_ci: Interval,
    pub variance_ci: Interval,
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Percentile interval, widened if needed so it covers the point estimate.
fn percentile_ci(mut stats: Vec<f64>, level: f64, estimate: f64) -> Result<Interval> {
    stats.sort_by(f64::total_cmp);
    let a = (1.0 - level) / 2.0;
    let lo = quantile_sorted(&stats, a)?.min(estimate);
    let hi = quantile_sorted(&stats, 1.0 - a)?.max(estimate);
    Ok(Interval { lo, hi })
}

/// Moments, quantiles and percentile-bootstrap intervals for mean and variance.
pub fn summarize<R: Rng + ?Sized>(a: &SampleSet, boot: &BootstrapSpec, rng: &mut R) -> Result<SummaryStats> {
    let v = a.values();
    if v.len() < 2 {
        return Err(Error::InvalidParameter("summary needs at least two values".into()));
    }
    if boot.resamples == 0 || !(boot.level > 0.0 && boot.level < 1.0) {
        return Err(Error::InvalidParameter(format!("bootstrap {boot:?}")));
    }
    let n = v.len();
    let m = mean(v)?;
    let var = variance(v)?;
    let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n as f64;
    let se_variance = ((m4 - var * var * (n as f64 - 3.0) / (n as f64 - 1.0)) / n as f64).max(0.0).sqrt();
    let sorted = a.sorted();
    let mut quantiles = [0.0; 5];
    for (q, &p) in quantiles.iter_mut().zip(&QUANTILE_LEVELS) {
        *q = quantile_sorted(&sorted, p)?;
    }
    let mut means = Vec::with_capacity(boot.resamples);
    let mut vars = Vec::with_capacity(boot.resamples);
    let mut draw = vec![0.0; n];
    for _ in 0..boot.resamples {
        for d in draw.iter_mut() {
            *d = v[rng.gen_range(0..n)];
        }
        means.push(mean(&draw)?);
        vars.push(variance(&draw)?);
    }
    Ok(SummaryStats {
        n,
        mean: m,
        variance: var,
        se_mean: (var / n as f64).sqrt(),
        se_variance,
        quantiles,
        bootstrap: *boot,
        mean_ci: percentile_ci(means, boot.level, m)?,
        variance_ci: percentile_ci(vars, boot.level, var)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// 95% t-interval for the slope (a point when the fit is exact).
    pub slope_ci: Interval,
    pub points: usize,
}

/// Least-squares fit of `ln stat = a + b ln N`.
pub fn rate_fit(pairs: &[(f64, f64)]) -> Result<RateFit> {
    let mut ns: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::InvalidParameter("rate fit needs at least three distinct N".into()));
    }
    if pairs.iter().any(|&(n, s)| !(n > 0.0) || !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidParameter("rate fit needs positive N and statistics".into()));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = k - 2.0;
    let slope_se = if dof > 0.0 { (rss / dof / sxx).sqrt() } else { 0.0 };
    let t = if dof > 0.0 {
        StudentsT::new(0.0, 1.0, dof)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .inverse_cdf(0.975)
    } else {
        0.0
    };
    Ok(RateFit {
        slope,
        intercept,
        slope_se,
        slope_ci: Interval {
            lo: slope - t * slope_se,
            hi: slope + t * slope_se,
        },
        points: pairs.len(),
    })
}
