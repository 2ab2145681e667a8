use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dot, eig_sym, lift, Lu, Mat, Scalar};

/// Relative tolerance for "z lies in the spectrum", in units of `‖X‖`.
pub const DEFAULT_SPECTRUM_TOLERANCE: f64 = 1e-8;

const GUARD_ITERATIONS: usize = 12;

/// `(zI − X)⁻¹` at one spectral parameter, factored once.
#[derive(Clone, Debug)]
pub struct Resolvent<T> {
    lu: Lu<T>,
    z: Complex64,
    distance: f64,
}

impl<T: Scalar> Resolvent<T> {
    /// Real spectral parameter, factored in the matrix's own field.
    pub fn real(x: &Mat<T>, z: f64) -> Result<Self> {
        Self::real_with_tolerance(x, z, DEFAULT_SPECTRUM_TOLERANCE)
    }

    pub fn real_with_tolerance(x: &Mat<T>, z: f64, rel_tol: f64) -> Result<Self> {
        check_input(x)?;
        let mut a = x.scaled(-1.0);
        for i in 0..a.rows() {
            a[(i, i)] += T::from_re(z);
        }
        let lu = factor(a, Complex64::new(z, 0.0), x)?;
        let distance = distance_estimate(&lu);
        guard(Complex64::new(z, 0.0), distance, rel_tol * x.inf_norm().max(1.0))?;
        Ok(Self {
            lu,
            z: Complex64::new(z, 0.0),
            distance,
        })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// Estimated `dist(z, Sp(X))`.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.lu.solve(v)
    }

    /// `⟨u, R v⟩` with the inner product conjugate-linear in `u`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        dot(u, &self.apply(v))
    }

    /// `⟨u, R² v⟩`.
    pub fn bilinear_sq(&self, u: &[T], v: &[T]) -> T {
        dot(u, &self.apply(&self.apply(v)))
    }

    /// `U* R U` for the columns `us`.
    pub fn compress(&self, us: &[Vec<T>]) -> Mat<T> {
        let solved: Vec<Vec<T>> = us.iter().map(|u| self.apply(u)).collect();
        Mat::from_fn(us.len(), us.len(), |a, b| dot(&us[a], &solved[b]))
    }
}

impl Resolvent<Complex64> {
    /// Complex spectral parameter.
    pub fn complex<T: Scalar>(x: &Mat<T>, z: Complex64) -> Result<Self> {
        check_input(x)?;
        let mut a = x.to_complex().scaled(-1.0);
        for i in 0..a.rows() {
            a[(i, i)] += z;
        }
        let lu = factor(a, z, x)?;
        let distance = if z.im.abs() > 0.0 {
            distance_estimate(&lu).max(z.im.abs())
        } else {
            distance_estimate(&lu)
        };
        guard(z, distance, DEFAULT_SPECTRUM_TOLERANCE * x.inf_norm().max(1.0))?;
        Ok(Self { lu, z, distance })
    }
}

fn check_input<T: Scalar>(x: &Mat<T>) -> Result<()> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch {
            context: "resolvent",
            expected: x.rows(),
            found: x.cols(),
        });
    }
    if x.has_non_finite() {
        return Err(Error::NonFinite("resolvent input"));
    }
    Ok(())
}

fn factor<T: Scalar, S: Scalar>(a: Mat<T>, z: Complex64, x: &Mat<S>) -> Result<Lu<T>> {
    Lu::factor(a).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::InsideSpectrum {
            z: format!("{z}"),
            distance: 0.0,
            tolerance: DEFAULT_SPECTRUM_TOLERANCE * x.inf_norm().max(1.0),
        },
        other => other,
    })
}

fn guard(z: Complex64, distance: f64, tolerance: f64) -> Result<()> {
    if !(distance > tolerance) {
        return Err(Error::InsideSpectrum {
            z: format!("{z}"),
            distance,
            tolerance,
        });
    }
    Ok(())
}

/// `1/‖(zI − X)⁻¹‖` by power iteration on the normal matrix `(zI − X)⁻¹`.
fn distance_estimate<T: Scalar>(lu: &Lu<T>) -> f64 {
    let n = lu.dim();
    if n == 0 {
        return f64::INFINITY;
    }
    let mut w: Vec<T> = (0..n)
        .map(|i| T::from_re((i as f64 * 1.618_033_988_75 + 0.3).sin() + 1.1))
        .collect();
    let mut growth = 0.0;
    for _ in 0..GUARD_ITERATIONS {
        let nw = w.iter().map(|x| x.abs2()).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x = x.scale(1.0 / nw));
        w = lu.solve(&w);
        growth = w.iter().map(|x| x.abs2()).sum::<f64>().sqrt();
        if !growth.is_finite() {
            return 0.0;
        }
    }
    1.0 / growth
}

/// `⟨u, R(z) v⟩` through one factorization and one solve.
pub fn resolvent_bilinear<T: Scalar>(x: &Mat<T>, z: Complex64, u: &[T], v: &[T]) -> Result<Complex64> {
    check_vectors(x, u, v)?;
    if z.im == 0.0 {
        Ok(Resolvent::real(x, z.re)?.bilinear(u, v).to_c64())
    } else {
        let r = Resolvent::complex(x, z)?;
        Ok(r.bilinear(&to_c(u), &to_c(v)))
    }
}

/// `⟨u, R(x)² v⟩` at a real point, two chained solves.
pub fn resolvent_bilinear_sq<T: Scalar>(x: &Mat<T>, z: f64, u: &[T], v: &[T]) -> Result<T> {
    check_vectors(x, u, v)?;
    Ok(Resolvent::real(x, z)?.bilinear_sq(u, v))
}

fn to_c<T: Scalar>(u: &[T]) -> Vec<Complex64> {
    u.iter().map(|x| x.to_c64()).collect()
}

fn check_vectors<T: Scalar>(x: &Mat<T>, u: &[T], v: &[T]) -> Result<()> {
    for w in [u, v] {
        if w.len() != x.rows() {
            return Err(Error::DimensionMismatch {
                context: "resolvent bilinear form",
                expected: x.rows(),
                found: w.len(),
            });
        }
    }
    Ok(())
}

/// `f(X) = V f(Λ) V*`.
pub fn spectral_apply<T: Scalar>(x: &Mat<T>, f: impl Fn(f64) -> f64) -> Result<Mat<T>> {
    let sd = eig_sym(x, true)?;
    let v = sd.eigenvectors.expect("requested eigenvectors");
    let n = x.rows();
    let fl: Vec<f64> = sd.eigenvalues.iter().map(|&l| f(l)).collect();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = T::zero();
            for (k, &w) in fl.iter().enumerate() {
                s += (v[(i, k)] * v[(j, k)].conj()).scale(w);
            }
            out[(i, j)] = s;
        }
    }
    out.fill_lower_from_upper();
    Ok(out)
}

/// Lifts a real unit vector into the matrix field.
pub fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    lift(&e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RealMat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> RealMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = RealMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0) / (n as f64).sqrt());
        m.fill_lower_from_upper();
        m
    }

    #[test]
    fn zero_matrix_resolvent() {
        let x = RealMat::zeros(3, 3);
        let e1 = unit::<f64>(3, 0);
        let r = resolvent_bilinear(&x, Complex64::new(2.0, 0.0), &e1, &e1).unwrap();
        assert_eq!(r, Complex64::new(0.5, 0.0));
        assert_eq!(resolvent_bilinear_sq(&x, 2.0, &e1, &e1).unwrap(), 0.25);
        let x1 = RealMat::diag(&[1.0]);
        assert_eq!(resolvent_bilinear_sq(&x1, 3.0, &[1.0], &[1.0]).unwrap(), 0.25);
    }

    #[test]
    fn diagonal_resolvent_has_no_cross_terms() {
        let x = RealMat::diag(&[1.0, -1.0]);
        let r = resolvent_bilinear(&x, Complex64::new(3.0, 0.0), &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(r, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn eigenvalue_is_inside_spectrum() {
        let x = RealMat::diag(&[1.0, -1.0]);
        let e = resolvent_bilinear(&x, Complex64::new(1.0, 0.0), &[1.0, 0.0], &[1.0, 0.0]);
        assert!(matches!(e, Err(Error::InsideSpectrum { .. })));
        let e = resolvent_bilinear(&x, Complex64::new(1.0 + 1e-12, 0.0), &[1.0, 0.0], &[1.0, 0.0]);
        assert!(matches!(e, Err(Error::InsideSpectrum { .. })));
    }

    #[test]
    fn distance_estimate_is_accurate() {
        let x = random_symmetric(40, 4);
        let ev = eig_sym(&x, false).unwrap();
        let z = ev.largest() + 0.01;
        let r = Resolvent::real(&x, z).unwrap();
        assert!((r.distance() - 0.01).abs() < 1e-6);
    }

    #[test]
    fn imaginary_axis_bound() {
        let x = random_symmetric(30, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let mut u: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut v: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for w in [&mut u, &mut v] {
                let n = crate::linalg::norm(w);
                w.iter_mut().for_each(|a| *a /= n);
            }
            let r = resolvent_bilinear(&x, Complex64::new(0.0, 4.0), &u, &v).unwrap();
            assert!(r.norm() <= 0.25 + 1e-14);
        }
    }

    #[test]
    fn squared_form_is_minus_derivative() {
        let x = random_symmetric(25, 5);
        let u: Vec<f64> = (0..25).map(|i| (i as f64).cos()).collect();
        let v: Vec<f64> = (0..25).map(|i| (i as f64 * 0.7).sin()).collect();
        let (x0, h) = (3.0, 1e-4);
        let f = |t: f64| Resolvent::real(&x, t).unwrap().bilinear(&u, &v);
        let fd = -(f(x0 + h) - f(x0 - h)) / (2.0 * h);
        let sq = resolvent_bilinear_sq(&x, x0, &u, &v).unwrap();
        assert!((fd - sq).abs() < 1e-6, "{fd} vs {sq}");
    }

    #[test]
    fn spectral_apply_identities() {
        let x = random_symmetric(12, 1);
        assert!(spectral_apply(&x, |t| t).unwrap().sub(&x).max_abs() < 1e-10);
        assert!(spectral_apply(&x, |_| 1.0).unwrap().sub(&RealMat::identity(12)).max_abs() < 1e-12);
        let s = RealMat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let sq = spectral_apply(&s, |t| t * t).unwrap();
        assert!(sq.sub(&RealMat::identity(2)).max_abs() < 1e-14);
    }
}
