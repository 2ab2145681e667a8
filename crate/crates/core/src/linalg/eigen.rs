//! Dense self-adjoint eigensolver.
//!
//! Householder reduction to a Hermitian tridiagonal matrix, a diagonal
//! unitary similarity that makes the off-diagonal real and nonnegative,
//! then implicit-shift QL iterations on the real tridiagonal matrix.
//!
//! Besides full eigendecompositions the solver can return the coordinates
//! of a few given vectors in the eigenbasis without ever forming the
//! eigenvectors, which keeps bilinear forms `⟨u, f(X) v⟩` at the cost of
//! the reduction alone.

use super::mat::Mat;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Iteration cap per eigenvalue in the QL sweep.
pub const MAX_QL_ITERATIONS: usize = 50;

#[derive(Clone, Debug)]
struct Reflector<T> {
    start: usize,
    w: Vec<T>,
    tau: f64,
}

impl<T: Scalar> Reflector<T> {
    /// `v ← (I - τ w w*) v` on the trailing coordinates.
    fn apply(&self, v: &mut [T]) {
        let tail = &mut v[self.start..];
        let s: T = self.w.iter().zip(tail.iter()).map(|(&w, &x)| w.conj() * x).sum();
        let s = s.scale(self.tau);
        for (x, &w) in tail.iter_mut().zip(&self.w) {
            *x -= w * s;
        }
    }

    /// `Y ← (I - τ conj(w) wᵀ) Y` on the trailing rows of a row-major matrix.
    fn apply_transpose_left(&self, y: &mut Mat<T>) {
        let cols = y.cols();
        let mut s = vec![T::zero(); cols];
        for (i, &w) in self.w.iter().enumerate() {
            let row = y.row(self.start + i);
            for (acc, &x) in s.iter_mut().zip(row) {
                *acc += w * x;
            }
        }
        for (i, &w) in self.w.iter().enumerate() {
            let f = w.conj().scale(self.tau);
            let row = y.row_mut(self.start + i);
            for (x, &acc) in row.iter_mut().zip(&s) {
                *x -= f * acc;
            }
        }
    }
}

/// `X = Q D T D* Q*` with `T` real symmetric tridiagonal.
#[derive(Clone, Debug)]
pub struct Tridiagonal<T> {
    pub diag: Vec<f64>,
    /// `offdiag[k] = T[k+1, k] ≥ 0`.
    pub offdiag: Vec<f64>,
    reflectors: Vec<Reflector<T>>,
    phases: Vec<T>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// Reduces a self-adjoint matrix; only the upper triangle is read.
    pub fn reduce(m: &Mat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                context: "eigensolver input",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.has_non_finite() {
            return Err(Error::NonFinite("eigensolver input"));
        }
        let n = m.rows();
        let mut a = m.clone();
        let mut sub: Vec<T> = Vec::with_capacity(n.saturating_sub(1));
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let mut p = vec![T::zero(); n];

        for k in 0..n.saturating_sub(2) {
            let start = k + 1;
            let len = n - start;
            // Column below the diagonal, read from the upper triangle.
            let x: Vec<T> = a.row(k)[start..].iter().map(|v| v.conj()).collect();
            let alpha = x.iter().map(|v| v.abs2()).sum::<f64>().sqrt();
            if alpha == 0.0 {
                sub.push(T::zero());
                reflectors.push(Reflector {
                    start,
                    w: vec![T::zero(); len],
                    tau: 0.0,
                });
                continue;
            }
            let x0 = x[0];
            let ph = x0.phase();
            let mut w = x;
            w[0] = x0 + ph.scale(alpha);
            let tau = 1.0 / (alpha * (alpha + x0.abs()));
            sub.push(-ph.scale(alpha));

            // p = τ A22 w from the upper triangle of the trailing block.
            let p = &mut p[..len];
            p.iter_mut().for_each(|v| *v = T::zero());
            for i in 0..len {
                let row = &a.row(start + i)[start + i..];
                let wi = w[i];
                let mut acc = row[0] * wi;
                let (w_tail, p_tail) = (&w[i + 1..], &mut p[i + 1..]);
                for ((&aij, &wj), pj) in row[1..].iter().zip(w_tail).zip(p_tail.iter_mut()) {
                    acc += aij * wj;
                    *pj += aij.conj() * wi;
                }
                p[i] += acc;
            }
            p.iter_mut().for_each(|v| *v = v.scale(tau));
            let wp: f64 = w.iter().zip(p.iter()).map(|(&a, &b)| (a.conj() * b).re()).sum();
            let kk = 0.5 * tau * wp;
            // q = p - K w, stored in p.
            for (pi, &wi) in p.iter_mut().zip(&w) {
                *pi -= wi.scale(kk);
            }
            let qc: Vec<T> = p.iter().map(|v| v.conj()).collect();
            let wc: Vec<T> = w.iter().map(|v| v.conj()).collect();
            for i in 0..len {
                let (wi, qi) = (w[i], p[i]);
                let row = &mut a.row_mut(start + i)[start + i..];
                for ((x, &qj), &wj) in row.iter_mut().zip(&qc[i..]).zip(&wc[i..]) {
                    *x -= wi * qj + qi * wj;
                }
            }
            reflectors.push(Reflector { start, w, tau });
        }
        if n >= 2 {
            sub.push(a[(n - 2, n - 1)].conj());
        }

        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re()).collect();
        let mut phases = Vec::with_capacity(n);
        let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
        if n > 0 {
            phases.push(T::one());
        }
        for (k, &e) in sub.iter().enumerate() {
            offdiag.push(e.abs());
            let next = phases[k] * e.phase();
            phases.push(next);
        }
        Ok(Self {
            diag,
            offdiag,
            reflectors,
            phases,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `D* Q* u`: coordinates of `u` in the basis that makes `T` real.
    pub fn to_reduced(&self, u: &[T]) -> Vec<T> {
        assert_eq!(u.len(), self.dim(), "vector length mismatch");
        let mut v = u.to_vec();
        for r in &self.reflectors {
            r.apply(&mut v);
        }
        for (x, &d) in v.iter_mut().zip(&self.phases) {
            *x = d.conj() * *x;
        }
        v
    }

    /// `QD`: columns map reduced coordinates back, `X = (QD) T (QD)*`.
    pub fn basis(&self) -> Mat<T> {
        let y = self.basis_transposed();
        Mat::from_fn(self.dim(), self.dim(), |i, j| y[(j, i)])
    }

    /// `(QD)ᵀ` as a row-major matrix.
    fn basis_transposed(&self) -> Mat<T> {
        let n = self.dim();
        let mut y = Mat::identity(n);
        for r in &self.reflectors {
            r.apply_transpose_left(&mut y);
        }
        for (i, &d) in self.phases.iter().enumerate() {
            for x in y.row_mut(i) {
                *x = d * *x;
            }
        }
        y
    }

    /// Eigenvalues of `T` (ascending) together with `Zᵀ rows`, where the
    /// rows of `rows` are rotated by every QL Givens step.
    fn diagonalize(&self, mut rows: Option<&mut Mat<T>>) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.offdiag.clone();
        e.push(0.0);
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence {
                        index: l,
                        iterations: MAX_QL_ITERATIONS,
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
                let mut deflated = false;
                for i in (l..m).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if let Some(z) = rows.as_deref_mut() {
                        rotate_rows(z, i, s, c);
                    }
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        Ok(d)
    }
}

fn rotate_rows<T: Scalar>(z: &mut Mat<T>, i: usize, s: f64, c: f64) {
    let cols = z.cols();
    let data = z.as_mut_slice();
    let (lo, hi) = data.split_at_mut((i + 1) * cols);
    let ri = &mut lo[i * cols..];
    let rj = &mut hi[..cols];
    for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
        let f = *b;
        *b = a.scale(s) + f.scale(c);
        *a = a.scale(c) - f.scale(s);
    }
}

/// Ordered spectrum of a self-adjoint matrix.
#[derive(Clone, Debug)]
pub struct SpectralData<T> {
    /// Descending: `λ1 ≥ … ≥ λN`.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: Option<Mat<T>>,
    /// `max_i ‖M v_i − λ_i v_i‖`, zero when vectors were not requested.
    pub max_residual: f64,
}

impl<T: Scalar> SpectralData<T> {
    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn smallest(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// Distance from `x` to the spectrum.
    pub fn distance_to(&self, x: f64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&l| (l - x).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

/// Full spectrum of a self-adjoint matrix, descending.
pub fn eig_sym<T: Scalar>(m: &Mat<T>, want_vectors: bool) -> Result<SpectralData<T>> {
    let tri = Tridiagonal::reduce(m)?;
    if !want_vectors {
        let mut values = tri.diagonalize(None)?;
        values.sort_by(|a, b| b.total_cmp(a));
        return Ok(SpectralData {
            eigenvalues: values,
            eigenvectors: None,
            max_residual: 0.0,
        });
    }
    let mut rows = tri.basis_transposed();
    let values = tri.diagonalize(Some(&mut rows))?;
    let order = descending_order(&values);
    let n = values.len();
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for (k, &x) in rows.row(src).iter().enumerate() {
            vectors[(k, col)] = x;
        }
    }
    let max_residual = residual(m, &eigenvalues, &vectors);
    Ok(SpectralData {
        eigenvalues,
        eigenvectors: Some(vectors),
        max_residual,
    })
}

fn residual<T: Scalar>(m: &Mat<T>, values: &[f64], vectors: &Mat<T>) -> f64 {
    let mv = m.matmul(vectors);
    let mut worst = 0.0f64;
    for (j, &lambda) in values.iter().enumerate() {
        let r = (0..m.rows())
            .map(|i| (mv[(i, j)] - vectors[(i, j)].scale(lambda)).abs2())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Eigenvalues (descending) and the coordinates `⟨v_i, u⟩` of each given
/// vector `u` along each eigenvector `v_i`.
///
/// Eigenvector phases are fixed by the reduction, so products
/// `conj(⟨v_i, u⟩) ⟨v_i, w⟩` are basis independent.
#[derive(Clone, Debug)]
pub struct ProjectedSpectrum<T> {
    pub eigenvalues: Vec<f64>,
    /// `coords[j][i] = ⟨v_i, vectors[j]⟩`.
    pub coords: Vec<Vec<T>>,
}

impl<T: Scalar> ProjectedSpectrum<T> {
    /// `⟨u_a, f(X) u_b⟩` for two of the projected vectors.
    pub fn bilinear(&self, a: usize, b: usize, f: impl Fn(f64) -> f64) -> T {
        self.eigenvalues
            .iter()
            .zip(self.coords[a].iter().zip(&self.coords[b]))
            .map(|(&l, (&ca, &cb))| (ca.conj() * cb).scale(f(l)))
            .sum()
    }
}

pub fn eig_projected<T: Scalar>(m: &Mat<T>, vectors: &[&[T]]) -> Result<ProjectedSpectrum<T>> {
    let tri = Tridiagonal::reduce(m)?;
    let n = tri.dim();
    let k = vectors.len();
    let mut rows = Mat::zeros(n, k);
    for (j, u) in vectors.iter().enumerate() {
        let reduced = tri.to_reduced(u);
        rows.set_column(j, &reduced);
    }
    let values = tri.diagonalize(Some(&mut rows))?;
    let order = descending_order(&values);
    Ok(ProjectedSpectrum {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        coords: (0..k)
            .map(|j| order.iter().map(|&i| rows[(i, j)]).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMat, RealMat};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> RealMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = RealMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        m.fill_lower_from_upper();
        m
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        m.fill_lower_from_upper();
        m
    }

    #[test]
    fn two_by_two_swap() {
        let m = RealMat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s = eig_sym(&m, true).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
        assert!(s.max_residual < 1e-14);
    }

    #[test]
    fn diagonal_input_gives_permuted_identity() {
        let m = RealMat::diag(&[1.0, 3.0, -2.0]);
        let s = eig_sym(&m, true).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 1.0, -2.0]);
        let v = s.eigenvectors.unwrap();
        assert_eq!(v[(1, 0)].abs(), 1.0);
        assert_eq!(v[(0, 1)].abs(), 1.0);
        assert_eq!(v[(2, 2)].abs(), 1.0);
    }

    #[test]
    fn real_residuals_and_orthonormality() {
        let m = random_symmetric(60, 3);
        let s = eig_sym(&m, true).unwrap();
        let v = s.eigenvectors.as_ref().unwrap();
        assert!(s.max_residual < 1e-9 * (1.0 + m.inf_norm()));
        assert!(v.orthonormality_defect() < 1e-9);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn hermitian_residuals_and_orthonormality() {
        let m = random_hermitian(40, 5);
        let s = eig_sym(&m, true).unwrap();
        let v = s.eigenvectors.as_ref().unwrap();
        assert!(s.max_residual < 1e-9 * (1.0 + m.inf_norm()), "{}", s.max_residual);
        assert!(v.orthonormality_defect() < 1e-9);
        let values_only = eig_sym(&m, false).unwrap();
        for (a, b) in values_only.eigenvalues.iter().zip(&s.eigenvalues) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn projections_match_full_vectors() {
        let m = random_hermitian(25, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<Complex64> = (0..25)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let w: Vec<Complex64> = (0..25)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let full = eig_sym(&m, true).unwrap();
        let proj = eig_projected(&m, &[&u, &w]).unwrap();
        let v = full.eigenvectors.unwrap();
        let f = |x: f64| x * x - 0.3 * x;
        let direct: Complex64 = (0..25)
            .map(|i| {
                let vi = v.column(i);
                let a = crate::linalg::dot(&vi, &u);
                let b = crate::linalg::dot(&vi, &w);
                a.conj() * b * f(full.eigenvalues[i])
            })
            .sum();
        let fast = proj.bilinear(0, 1, f);
        assert!((direct - fast).norm() < 1e-12, "{direct} vs {fast}");
    }

    #[test]
    fn degenerate_cases() {
        let empty = RealMat::zeros(0, 0);
        assert!(eig_sym(&empty, true).unwrap().eigenvalues.is_empty());
        let one = RealMat::from_rows(&[vec![-4.0]]);
        assert_eq!(eig_sym(&one, true).unwrap().eigenvalues, vec![-4.0]);
        let zero = RealMat::zeros(5, 5);
        assert!(eig_sym(&zero, true).unwrap().eigenvalues.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn nan_input_rejected() {
        let mut m = RealMat::identity(3);
        m[(0, 2)] = f64::NAN;
        assert!(matches!(eig_sym(&m, false), Err(Error::NonFinite(_))));
    }
}
