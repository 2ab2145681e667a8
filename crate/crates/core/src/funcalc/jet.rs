//! Truncated Taylor series `Σ c_k h^k`, used to get exact derivatives of
//! the test functions.

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The variable `x0 + h`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order > 0 {
            j.0[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn affine(&self, a: f64, b: f64) -> Self {
        let mut v: Vec<f64> = self.0.iter().map(|c| a * c).collect();
        v[0] += b;
        Jet(v)
    }

    pub fn add(&self, o: &Self) -> Self {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.0.len();
        let mut v = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                v[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(v)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut r = Self::constant(1.0, self.order());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn recip(&self) -> Self {
        let a = &self.0;
        let mut r = vec![0.0; a.len()];
        r[0] = 1.0 / a[0];
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| a[j] * r[k - j]).sum();
            r[k] = -s / a[0];
        }
        Jet(r)
    }

    pub fn exp(&self) -> Self {
        let a = &self.0;
        let mut e = vec![0.0; a.len()];
        e[0] = a[0].exp();
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    /// `f^(k)(x0) = k! c_k`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.0
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }
}
