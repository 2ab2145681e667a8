use rand::Rng;

use super::law::EntryLaw;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Scalar};

/// Default cap on the matrix dimension.
pub const DEFAULT_MAX_N: usize = 4096;

/// Mixture of laws along the tail of a row.
///
/// Entry `(i, l)` with `l ≥ K` takes the component whose cumulative weight
/// interval contains `(l − K + ½)/(N − K)`, so the row's empirical fourth
/// moment converges to `Σ w_c E|ξ_c|⁴`.
#[derive(Clone, Debug, PartialEq)]
pub struct RowProfile {
    pub components: Vec<(f64, EntryLaw)>,
}

impl RowProfile {
    pub fn iid(law: EntryLaw) -> Self {
        Self {
            components: vec![(1.0, law)],
        }
    }

    fn law_at(&self, pos: f64) -> &EntryLaw {
        let total: f64 = self.components.iter().map(|c| c.0).sum();
        let mut acc = 0.0;
        for (w, law) in &self.components {
            acc += w / total;
            if pos < acc {
                return law;
            }
        }
        &self.components.last().expect("empty row profile").1
    }

    /// Limiting `(1/N) Σ_l E|W_il|⁴` of the row.
    pub fn fourth_moment(&self) -> f64 {
        let total: f64 = self.components.iter().map(|c| c.0).sum();
        self.components
            .iter()
            .map(|(w, law)| w / total * law.abs_moment(4.0))
            .sum()
    }
}

/// Non-i.i.d. entry laws on the leading `K` rows and columns.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowOverride {
    pub size: usize,
    /// Row-major `K × K`; only the upper triangle (with diagonal) is used.
    pub laws: Vec<EntryLaw>,
    /// One profile per window row for the entries outside the window;
    /// empty means the ensemble's off-diagonal law.
    pub row_tails: Vec<RowProfile>,
}

impl WindowOverride {
    /// Window where every entry follows `law`, diagonal included.
    pub fn uniform(size: usize, law: EntryLaw) -> Self {
        Self {
            size,
            laws: vec![law; size * size],
            row_tails: Vec::new(),
        }
    }

    pub fn law(&self, i: usize, l: usize) -> &EntryLaw {
        let (a, b) = if i <= l { (i, l) } else { (l, i) };
        &self.laws[a * self.size + b]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerSpec {
    pub n: usize,
    pub beta: u8,
    pub offdiag: EntryLaw,
    pub diag: EntryLaw,
    pub window: Option<WindowOverride>,
    pub max_n: usize,
}

impl WignerSpec {
    /// Spec with the default diagonal: real Gaussian of variance `2σ²`
    /// (β = 1) or `σ²` (β = 2).
    pub fn new(n: usize, beta: u8, offdiag: EntryLaw) -> Self {
        let sigma2 = offdiag.variance;
        let diag = EntryLaw::gaussian(if beta == 1 { 2.0 * sigma2 } else { sigma2 });
        Self {
            n,
            beta,
            offdiag,
            diag,
            window: None,
            max_n: DEFAULT_MAX_N,
        }
    }

    pub fn gaussian(n: usize, beta: u8, sigma: f64) -> Self {
        let law = super::law::resolve_entry_law(&super::law::LawKind::gaussian(sigma * sigma), beta)
            .expect("valid Gaussian law");
        Self::new(n, beta, law)
    }

    pub fn with_diag(mut self, diag: EntryLaw) -> Self {
        self.diag = diag;
        self
    }

    pub fn with_window(mut self, window: WindowOverride) -> Self {
        self.window = Some(window);
        self
    }

    pub fn sigma(&self) -> f64 {
        self.offdiag.variance.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidEnsemble(m));
        if self.n == 0 {
            return bad("N must be positive".into());
        }
        if self.n > self.max_n {
            return bad(format!("N = {} exceeds the cap {}", self.n, self.max_n));
        }
        if self.beta != 1 && self.beta != 2 {
            return bad(format!("beta must be 1 or 2, got {}", self.beta));
        }
        if !(self.offdiag.variance > 0.0) {
            return bad("off-diagonal variance must be positive".into());
        }
        if self.offdiag.complex_mode != (self.beta == 2) {
            return bad("off-diagonal law mode does not match beta".into());
        }
        if self.diag.complex_mode {
            return bad("diagonal law must be real".into());
        }
        if let Some(w) = &self.window {
            if w.size > self.n {
                return bad(format!("window size {} exceeds N = {}", w.size, self.n));
            }
            if w.laws.len() != w.size * w.size {
                return bad(format!("window needs {} laws, got {}", w.size * w.size, w.laws.len()));
            }
            if !w.row_tails.is_empty() && w.row_tails.len() != w.size {
                return bad(format!("window needs {} row profiles, got {}", w.size, w.row_tails.len()));
            }
            let s2 = self.offdiag.variance;
            let same = |law: &EntryLaw| (law.variance - s2).abs() <= 1e-12 * s2;
            for i in 0..w.size {
                for l in (i + 1)..w.size {
                    let law = w.law(i, l);
                    if !same(law) {
                        return bad(format!("window law ({i},{l}) has variance {} ≠ σ² = {s2}", law.variance));
                    }
                    if law.complex_mode != (self.beta == 2) {
                        return bad(format!("window law ({i},{l}) mode does not match beta"));
                    }
                }
                if w.law(i, i).complex_mode {
                    return bad(format!("window diagonal law ({i},{i}) must be real"));
                }
            }
            for (i, row) in w.row_tails.iter().enumerate() {
                if row.components.is_empty() || row.components.iter().any(|c| !(c.0 > 0.0)) {
                    return bad(format!("row profile {i} needs positive weights"));
                }
                if row.components.iter().any(|c| !same(&c.1) || c.1.complex_mode != (self.beta == 2)) {
                    return bad(format!("row profile {i} has a law with variance ≠ σ²"));
                }
            }
        }
        Ok(())
    }

    fn law(&self, i: usize, j: usize) -> &EntryLaw {
        if let Some(w) = &self.window {
            let k = w.size;
            if i < k && j < k {
                return w.law(i, j);
            }
            if i < k && !w.row_tails.is_empty() && self.n > k {
                let pos = (j - k) as f64 + 0.5;
                return w.row_tails[i].law_at(pos / (self.n - k) as f64);
            }
        }
        if i == j {
            &self.diag
        } else {
            &self.offdiag
        }
    }
}

/// Draws `X_N = W_N / √N`, filling the upper triangle row by row and then
/// mirroring it.
pub fn sample_wigner<T: Scalar, R: Rng + ?Sized>(spec: &WignerSpec, rng: &mut R) -> Result<Mat<T>> {
    spec.validate()?;
    if T::BETA != spec.beta {
        return Err(Error::InvalidEnsemble(format!(
            "beta = {} requested into a field with beta = {}",
            spec.beta,
            T::BETA
        )));
    }
    let n = spec.n;
    let scale = 1.0 / (n as f64).sqrt();
    let mut x = Mat::<T>::zeros(n, n);
    for i in 0..n {
        x[(i, i)] = T::from_re(spec.law(i, i).draw_real(rng) * scale);
        for j in (i + 1)..n {
            x[(i, j)] = spec.law(i, j).draw::<T, R>(rng).scale(scale);
        }
    }
    x.fill_lower_from_upper();
    Ok(x)
}
