use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lift, orthonormalize_columns, Mat, RealMat, Scalar};

/// Eigenvalue `θ` of the perturbation with multiplicity `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub theta: f64,
    #[serde(default = "one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

impl Spike {
    pub fn new(theta: f64, multiplicity: usize) -> Self {
        Self { theta, multiplicity }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelocalizationMethod {
    /// Orthonormalized `N × r` standard Gaussian block.
    Qr,
    /// Real Fourier modes `√(2/N) cos(2π f k/N)`, `√(2/N) sin(2π f k/N)`.
    Fourier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DeformationMode {
    /// Eigenvectors supported on the first `K` coordinates. `block` is the
    /// `K × r` coordinate matrix (rows); `None` means `e_1, …, e_r`.
    CanonicalLocalized {
        #[serde(default)]
        block: Option<Vec<Vec<f64>>>,
    },
    RandomDelocalized {
        #[serde(default = "default_method")]
        method: DelocalizationMethod,
    },
    /// `u_m ∝ ratio^m` on the coordinates congruent to the column index
    /// modulo `r`, truncated to `N` coordinates and renormalized.
    L2Tail {
        #[serde(default = "default_ratio")]
        ratio: f64,
    },
}

fn default_method() -> DelocalizationMethod {
    DelocalizationMethod::Qr
}

fn default_ratio() -> f64 {
    0.5
}

/// `A_N = U Θ U*` stored as its factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    pub spikes: Vec<Spike>,
    /// `N × r`, orthonormal columns, grouped by spike in order.
    pub u: RealMat,
    pub mode: DeformationMode,
    /// Number of canonical basis vectors needed to span the columns.
    pub span_count: usize,
    pub max_abs_entry: f64,
    /// For `L2Tail`: the smallest `n` with `ratio^n < N^(-1/2)/ln N`.
    pub truncation: Option<usize>,
    /// For `L2Tail`: largest distance between an infinite vector and its
    /// truncation to `N` coordinates.
    pub tail_norm: Option<f64>,
}

impl Deformation {
    /// Rank-zero deformation.
    pub fn empty(n: usize) -> Self {
        Self {
            spikes: Vec::new(),
            u: RealMat::zeros(n, 0),
            mode: DeformationMode::CanonicalLocalized { block: None },
            span_count: 0,
            max_abs_entry: 0.0,
            truncation: None,
            tail_norm: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    /// `θ` of each column of `U`.
    pub fn column_thetas(&self) -> Vec<f64> {
        self.spikes
            .iter()
            .flat_map(|s| std::iter::repeat(s.theta).take(s.multiplicity))
            .collect()
    }

    /// Column indices of spike `j`.
    pub fn spike_columns(&self, j: usize) -> std::ops::Range<usize> {
        let start: usize = self.spikes[..j].iter().map(|s| s.multiplicity).sum();
        start..start + self.spikes[j].multiplicity
    }

    pub fn column<T: Scalar>(&self, c: usize) -> Vec<T> {
        lift(&self.u.column(c))
    }

    pub fn spike_block<T: Scalar>(&self, j: usize) -> Vec<Vec<T>> {
        self.spike_columns(j).map(|c| self.column(c)).collect()
    }

    /// Canonical span of the columns of spikes with `|θ| > σ`.
    pub fn span_count_above(&self, sigma: f64) -> usize {
        let cols: Vec<usize> = (0..self.spikes.len())
            .filter(|&j| self.spikes[j].theta.abs() > sigma)
            .flat_map(|j| self.spike_columns(j))
            .collect();
        (0..self.dim())
            .filter(|&i| cols.iter().any(|&c| self.u[(i, c)] != 0.0))
            .count()
    }

    /// Dense `U Θ U*`.
    pub fn matrix<T: Scalar>(&self) -> Mat<T> {
        let mut a = Mat::zeros(self.dim(), self.dim());
        add_low_rank(&mut a, &self.u, &self.column_thetas());
        a
    }
}

fn add_low_rank<T: Scalar>(m: &mut Mat<T>, u: &RealMat, thetas: &[f64]) {
    let n = m.rows();
    for (c, &theta) in thetas.iter().enumerate() {
        let col = u.column(c);
        for i in 0..n {
            let a = theta * col[i];
            if a == 0.0 {
                continue;
            }
            for j in i..n {
                m[(i, j)] += T::from_re(a * col[j]);
            }
        }
    }
    m.fill_lower_from_upper();
}

fn validate_spikes(spikes: &[Spike], n: usize) -> Result<usize> {
    for (j, s) in spikes.iter().enumerate() {
        if !s.theta.is_finite() || s.theta == 0.0 {
            return Err(Error::InvalidDeformation(format!("spike {j}: θ must be finite and nonzero, got {}", s.theta)));
        }
        if s.multiplicity == 0 {
            return Err(Error::InvalidDeformation(format!("spike {j}: multiplicity must be at least 1")));
        }
        if j > 0 && !(s.theta < spikes[j - 1].theta) {
            return Err(Error::InvalidDeformation("spike values must be strictly decreasing".into()));
        }
    }
    let r: usize = spikes.iter().map(|s| s.multiplicity).sum();
    if r > n {
        return Err(Error::InvalidDeformation(format!("total multiplicity {r} exceeds N = {n}")));
    }
    Ok(r)
}

/// Largest tail norm allowed for `L2Tail` truncations at dimension `n`.
pub fn tail_tolerance(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(-0.5) / nf.ln()
}

/// Builds `U` for the given spikes. `rng` is only consumed by
/// `RandomDelocalized { method: Qr }`.
pub fn build_deformation<R: Rng + ?Sized>(
    spikes: &[Spike],
    mode: &DeformationMode,
    n: usize,
    rng: &mut R,
) -> Result<Deformation> {
    let r = validate_spikes(spikes, n)?;
    let mut truncation = None;
    let mut tail_norm = None;
    let u = match mode {
        DeformationMode::CanonicalLocalized { block } => {
            let block = match block {
                None => RealMat::identity(r),
                Some(rows) => {
                    if rows.is_empty() || rows.iter().any(|row| row.len() != r) {
                        return Err(Error::InvalidDeformation(format!(
                            "localized block must have {r} columns per row"
                        )));
                    }
                    RealMat::from_rows(rows)
                }
            };
            let k = block.rows();
            if k > n {
                return Err(Error::InvalidDeformation(format!("block has {k} rows but N = {n}")));
            }
            if block.has_non_finite() {
                return Err(Error::InvalidDeformation("block has non-finite entries".into()));
            }
            let block = if block.orthonormality_defect() <= 1e-12 {
                block
            } else {
                orthonormalize_columns(&block)?
            };
            let mut u = RealMat::zeros(n, r);
            for i in 0..k {
                u.row_mut(i).copy_from_slice(block.row(i));
            }
            u
        }
        DeformationMode::RandomDelocalized { method } => match method {
            DelocalizationMethod::Qr => {
                let g = RealMat::from_fn(n, r, |_, _| rng.sample::<f64, _>(StandardNormal));
                orthonormalize_columns(&g)?
            }
            DelocalizationMethod::Fourier => {
                if 2 * (r / 2 + 1) >= n {
                    return Err(Error::InvalidDeformation(format!(
                        "Fourier modes need N > {}, got {n}",
                        2 * (r / 2 + 1)
                    )));
                }
                let s = (2.0 / n as f64).sqrt();
                let f = RealMat::from_fn(n, r, |k, c| {
                    let freq = (c / 2 + 1) as f64;
                    let phase = 2.0 * PI * freq * k as f64 / n as f64;
                    s * if c % 2 == 0 { phase.cos() } else { phase.sin() }
                });
                orthonormalize_columns(&f)?
            }
        },
        DeformationMode::L2Tail { ratio } => {
            if !(*ratio > 0.0 && *ratio < 1.0) {
                return Err(Error::InvalidDeformation(format!("tail ratio {ratio} not in (0, 1)")));
            }
            let tol = tail_tolerance(n);
            let mut u = RealMat::zeros(n, r);
            let mut worst_tail = 0.0f64;
            let norm = (1.0 - ratio * ratio).sqrt();
            for c in 0..r {
                let len = (n - c).div_ceil(r);
                let tail = ratio.powi(len as i32);
                worst_tail = worst_tail.max(tail);
                let mut col = vec![0.0; n];
                for m in 0..len {
                    col[c + m * r] = norm * ratio.powi(m as i32);
                }
                let l2 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
                col.iter_mut().for_each(|x| *x /= l2);
                u.set_column(c, &col);
            }
            if worst_tail >= tol {
                return Err(Error::InvalidDeformation(format!(
                    "truncation tail {worst_tail:e} is not below N^(-1/2)/ln N = {tol:e}"
                )));
            }
            let needed = (tol.ln() / ratio.ln()).floor() as usize + 1;
            truncation = Some(needed);
            tail_norm = Some(worst_tail);
            u
        }
    };
    let span_count = (0..n).filter(|&i| u.row(i).iter().any(|&x| x != 0.0)).count();
    let max_abs_entry = u.max_abs();
    Ok(Deformation {
        spikes: spikes.to_vec(),
        u,
        mode: mode.clone(),
        span_count,
        max_abs_entry,
        truncation,
        tail_norm,
    })
}

/// `M = X + U Θ U*`.
#[derive(Clone, Debug)]
pub struct DeformedMatrix<T> {
    pub x: Mat<T>,
    pub deformation: Deformation,
    /// `max |θ|`, which bounds `‖M − X‖`.
    pub perturbation_bound: f64,
}

impl<T: Scalar> DeformedMatrix<T> {
    /// Materializes `M`, exactly self-adjoint.
    pub fn m(&self) -> Mat<T> {
        let mut m = self.x.clone();
        // The upper triangle of X is authoritative.
        m.fill_lower_from_upper();
        add_low_rank(&mut m, &self.deformation.u, &self.deformation.column_thetas());
        m
    }
}

pub fn assemble<T: Scalar>(x: Mat<T>, deformation: Deformation) -> Result<DeformedMatrix<T>> {
    if !x.is_square() || x.rows() != deformation.dim() {
        return Err(Error::DimensionMismatch {
            context: "assemble",
            expected: deformation.dim(),
            found: x.rows(),
        });
    }
    let perturbation_bound = deformation
        .spikes
        .iter()
        .map(|s| s.theta.abs())
        .fold(0.0, f64::max);
    Ok(DeformedMatrix {
        x,
        deformation,
        perturbation_bound,
    })
}
