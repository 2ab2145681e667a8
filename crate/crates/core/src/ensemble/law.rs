//! Centered entry laws with exact moment bookkeeping.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg::Scalar;
use crate::quadrature::Composite;

fn unit_variance() -> f64 {
    1.0
}

/// Law descriptor as it appears in configuration files.
///
/// `Gaussian`, `Rademacher` and `Uniform` are parametrized by their
/// variance. `TwoPoint { a, p }` puts mass `p` at `a` and `1 - p` at
/// `-a p / (1 - p)`. `Table` is an arbitrary finite law, which must be
/// centered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawKind {
    Gaussian {
        #[serde(default = "unit_variance")]
        variance: f64,
    },
    Rademacher {
        #[serde(default = "unit_variance")]
        variance: f64,
    },
    Uniform {
        #[serde(default = "unit_variance")]
        variance: f64,
    },
    TwoPoint {
        a: f64,
        p: f64,
    },
    Table {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
}

impl LawKind {
    pub fn gaussian(variance: f64) -> Self {
        LawKind::Gaussian { variance }
    }

    pub fn rademacher(variance: f64) -> Self {
        LawKind::Rademacher { variance }
    }

    pub fn uniform(variance: f64) -> Self {
        LawKind::Uniform { variance }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LawKind::Gaussian { .. } => "gaussian",
            LawKind::Rademacher { .. } => "rademacher",
            LawKind::Uniform { .. } => "uniform",
            LawKind::TwoPoint { .. } => "two_point",
            LawKind::Table { .. } => "table",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Base {
    Gaussian { sd: f64 },
    Uniform { half_width: f64 },
    Atoms { values: Vec<f64>, probs: Vec<f64>, cumulative: Vec<f64> },
}

/// A centered scalar law together with its declared moments.
///
/// In complex mode an entry is `(X1 + i X2)/√2` with `X1, X2` i.i.d. copies
/// of the real base law, so `E|ξ|² = variance` and the real and imaginary
/// parts each carry `variance / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryLaw {
    pub kind: LawKind,
    /// `E|ξ|²`.
    pub variance: f64,
    /// Third cumulant of the real base law.
    pub third_cumulant: f64,
    /// `E|ξ|⁴ − (4 − β)(E|ξ|²)²`.
    pub fourth_cumulant: f64,
    /// `E|ξ|³`.
    pub third_abs_moment: f64,
    /// `E|ξ|⁵`.
    pub fifth_abs_moment: f64,
    pub complex_mode: bool,
    base: Base,
}

/// Validates a descriptor and computes its moments. `beta = 2` gives the
/// complex-mode law used for Hermitian off-diagonal entries.
pub fn resolve_entry_law(kind: &LawKind, beta: u8) -> Result<EntryLaw> {
    let complex_mode = match beta {
        1 => false,
        2 => true,
        b => return Err(Error::InvalidLaw(format!("beta must be 1 or 2, got {b}"))),
    };
    let check_var = |v: f64| {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidLaw(format!("variance must be finite and nonnegative, got {v}")))
        }
    };
    let base = match kind {
        LawKind::Gaussian { variance } => Base::Gaussian {
            sd: check_var(*variance)?.sqrt(),
        },
        LawKind::Uniform { variance } => Base::Uniform {
            half_width: (3.0 * check_var(*variance)?).sqrt(),
        },
        LawKind::Rademacher { variance } => {
            let s = check_var(*variance)?.sqrt();
            atoms(vec![s, -s], vec![0.5, 0.5])?
        }
        LawKind::TwoPoint { a, p } => {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(Error::InvalidLaw(format!("two-point weight p = {p} not in (0, 1)")));
            }
            if !a.is_finite() || *a == 0.0 {
                return Err(Error::InvalidLaw(format!("two-point atom a = {a} must be finite and nonzero")));
            }
            atoms(vec![*a, -a * p / (1.0 - p)], vec![*p, 1.0 - p])?
        }
        LawKind::Table { values, probs } => atoms(values.clone(), probs.clone())?,
    };
    let mut law = EntryLaw {
        kind: kind.clone(),
        variance: 0.0,
        third_cumulant: 0.0,
        fourth_cumulant: 0.0,
        third_abs_moment: 0.0,
        fifth_abs_moment: 0.0,
        complex_mode,
        base,
    };
    let v = law.raw_moment(2);
    law.variance = v;
    law.third_cumulant = law.cumulant(3);
    law.third_abs_moment = law.abs_moment(3.0);
    law.fifth_abs_moment = law.abs_moment(5.0);
    law.fourth_cumulant = law.abs_moment(4.0) - (4.0 - beta as f64) * v * v;
    if !law.fifth_abs_moment.is_finite() {
        return Err(Error::InvalidLaw("infinite fifth moment".into()));
    }
    Ok(law)
}

fn atoms(values: Vec<f64>, probs: Vec<f64>) -> Result<Base> {
    if values.is_empty() || values.len() != probs.len() {
        return Err(Error::InvalidLaw(format!(
            "table needs matching nonempty values and probs ({} vs {})",
            values.len(),
            probs.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidLaw("infinite fifth moment: non-finite atom".into()));
    }
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidLaw("table probabilities must be nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidLaw(format!("table probabilities sum to {total}")));
    }
    let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean: f64 = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
    if mean.abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::InvalidLaw(format!("non-centered table (mean {mean:e})")));
    }
    let mut acc = 0.0;
    let cumulative = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    Ok(Base::Atoms {
        values,
        probs,
        cumulative,
    })
}

fn double_factorial(n: u32) -> f64 {
    (1..=n).rev().step_by(2).map(f64::from).product::<f64>()
}

impl EntryLaw {
    pub fn gaussian(variance: f64) -> Self {
        resolve_entry_law(&LawKind::gaussian(variance), 1).expect("valid Gaussian law")
    }

    pub fn rademacher(variance: f64) -> Self {
        resolve_entry_law(&LawKind::rademacher(variance), 1).expect("valid Rademacher law")
    }

    pub fn beta(&self) -> u8 {
        if self.complex_mode {
            2
        } else {
            1
        }
    }

    /// `E X^k` of the real base law.
    pub fn raw_moment(&self, k: u32) -> f64 {
        match &self.base {
            Base::Gaussian { sd } => {
                if k % 2 == 1 {
                    0.0
                } else {
                    sd.powi(k as i32) * double_factorial(k.saturating_sub(1))
                }
            }
            Base::Uniform { half_width } => {
                if k % 2 == 1 {
                    0.0
                } else {
                    half_width.powi(k as i32) / (k as f64 + 1.0)
                }
            }
            Base::Atoms { values, probs, .. } => values
                .iter()
                .zip(probs)
                .map(|(v, p)| p * v.powi(k as i32))
                .sum(),
        }
    }

    /// Cumulant `κ_n` of the real base law, by the moment recursion.
    pub fn cumulant(&self, n: u32) -> f64 {
        self.cumulants(n)[n as usize]
    }

    /// `[κ_0 = 0, κ_1, …, κ_n]` of the real base law.
    pub fn cumulants(&self, n: u32) -> Vec<f64> {
        let m: Vec<f64> = (0..=n).map(|k| self.raw_moment(k)).collect();
        let mut kappa = vec![0.0; n as usize + 1];
        for j in 1..=n as usize {
            let mut s = m[j];
            let mut binom = 1.0; // C(j-1, i-1)
            for i in 1..j {
                s -= binom * kappa[i] * m[j - i];
                binom = binom * (j - i) as f64 / i as f64;
            }
            kappa[j] = s;
        }
        kappa
    }

    /// `E|ξ|^q` for the entry (complex entry in complex mode).
    pub fn abs_moment(&self, q: f64) -> f64 {
        let even = q >= 0.0 && q.fract() == 0.0 && (q as u32) % 2 == 0;
        if even && !self.complex_mode {
            return self.raw_moment(q as u32);
        }
        if even {
            if let Base::Gaussian { sd } = &self.base {
                let h = q as u32 / 2;
                return sd.powi(q as i32) * (1..=h).map(f64::from).product::<f64>();
            }
        }
        if !self.complex_mode {
            return match &self.base {
                Base::Gaussian { sd } => {
                    sd.powf(q) * 2f64.powf(q / 2.0) * gamma((q + 1.0) / 2.0) / PI.sqrt()
                }
                Base::Uniform { half_width } => half_width.powf(q) / (q + 1.0),
                Base::Atoms { values, probs, .. } => values
                    .iter()
                    .zip(probs)
                    .map(|(v, p)| p * v.abs().powf(q))
                    .sum(),
            };
        }
        match &self.base {
            // |ξ|² is exponential with mean sd².
            Base::Gaussian { sd } => sd.powf(q) * gamma(1.0 + q / 2.0),
            Base::Uniform { half_width } => {
                let c = *half_width;
                if c == 0.0 {
                    return 0.0;
                }
                let rule = Composite::new(-c, c, 8, 20);
                let density = 1.0 / (2.0 * c);
                rule.integrate(|x| {
                    rule.integrate(|y| ((x * x + y * y) / 2.0).powf(q / 2.0)) * density
                }) * density
            }
            Base::Atoms { values, probs, .. } => {
                let mut s = 0.0;
                for (x, px) in values.iter().zip(probs) {
                    for (y, py) in values.iter().zip(probs) {
                        s += px * py * ((x * x + y * y) / 2.0).powf(q / 2.0);
                    }
                }
                s
            }
        }
    }

    pub fn draw_real<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.base {
            Base::Gaussian { sd } => sd * rng.sample::<f64, _>(StandardNormal),
            Base::Uniform { half_width } => {
                if *half_width == 0.0 {
                    0.0
                } else {
                    rng.gen_range(-half_width..*half_width)
                }
            }
            Base::Atoms {
                values, cumulative, ..
            } => {
                if values.len() == 2 {
                    return if rng.gen::<f64>() < cumulative[0] {
                        values[0]
                    } else {
                        values[1]
                    };
                }
                let u: f64 = rng.gen();
                let i = cumulative.partition_point(|&c| c <= u).min(values.len() - 1);
                values[i]
            }
        }
    }

    pub fn draw_complex<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let re = self.draw_real(rng);
        let im = self.draw_real(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// One entry in the field `T`. Panics if a complex-mode law is drawn
    /// into a real matrix; ensemble validation rules that out.
    pub fn draw<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        if self.complex_mode {
            T::from_c64(self.draw_complex(rng)).expect("complex law drawn into a real matrix")
        } else {
            T::from_re(self.draw_real(rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_has_no_fourth_cumulant() {
        let law = resolve_entry_law(&LawKind::gaussian(1.0), 1).unwrap();
        assert_eq!(law.fourth_cumulant, 0.0);
        assert!(law.third_cumulant.abs() < 1e-15);
        let c = resolve_entry_law(&LawKind::gaussian(1.0), 2).unwrap();
        assert!(c.fourth_cumulant.abs() < 1e-14);
    }

    #[test]
    fn rademacher_fourth_cumulant() {
        let law = resolve_entry_law(&LawKind::rademacher(1.0), 1).unwrap();
        assert_eq!(law.fourth_cumulant, -2.0);
        assert_eq!(law.cumulants(4), vec![0.0, 0.0, 1.0, 0.0, -2.0]);
    }

    #[test]
    fn uniform_moments() {
        let law = resolve_entry_law(&LawKind::uniform(1.0), 1).unwrap();
        assert!((law.variance - 1.0).abs() < 1e-14);
        assert!((law.fourth_cumulant + 1.2).abs() < 1e-14);
        // E|U|^5 with U uniform on [-√3, √3] is 3^(5/2)/6.
        assert!((law.fifth_abs_moment - 3f64.powf(2.5) / 6.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_absolute_moments_closed_form() {
        let law = EntryLaw::gaussian(1.0);
        // E|Z|^3 = 2√(2/π), E|Z|^5 = 8√(2/π).
        let c = (2.0 / PI).sqrt();
        assert!((law.third_abs_moment - 2.0 * c).abs() < 1e-13);
        assert!((law.fifth_abs_moment - 8.0 * c).abs() < 1e-13);
    }

    #[test]
    fn complex_uniform_fourth_moment_matches_expansion() {
        // E|ξ|⁴ = (2 m4 + 2 v²)/4 for ξ = (X1 + i X2)/√2.
        let law = resolve_entry_law(&LawKind::uniform(1.0), 2).unwrap();
        let m4 = 9.0 / 5.0;
        assert!((law.abs_moment(4.0) - (m4 + 1.0) / 2.0).abs() < 1e-12);
        assert!((law.fourth_cumulant - (m4 - 3.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_is_centered() {
        let law = resolve_entry_law(&LawKind::TwoPoint { a: 1.0, p: 0.25 }, 1).unwrap();
        assert!(law.raw_moment(1).abs() < 1e-15);
        // b = -1/3, variance = 1/4 + (1/9)(3/4) = 1/3.
        assert!((law.variance - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_tables() {
        let off = LawKind::Table {
            values: vec![0.0, 1.0],
            probs: vec![0.5, 0.5],
        };
        assert!(matches!(resolve_entry_law(&off, 1), Err(Error::InvalidLaw(m)) if m.contains("non-centered")));
        let inf = LawKind::Table {
            values: vec![f64::INFINITY, f64::NEG_INFINITY],
            probs: vec![0.5, 0.5],
        };
        assert!(matches!(resolve_entry_law(&inf, 1), Err(Error::InvalidLaw(m)) if m.contains("fifth")));
        assert!(resolve_entry_law(&LawKind::TwoPoint { a: 1.0, p: 1.0 }, 1).is_err());
    }

    #[test]
    fn descriptor_round_trips_through_json() {
        let k: LawKind = serde_json::from_str(r#"{"kind":"two_point","a":2.0,"p":0.2}"#).unwrap();
        assert_eq!(k, LawKind::TwoPoint { a: 2.0, p: 0.2 });
        let k: LawKind = serde_json::from_str(r#"{"kind":"rademacher"}"#).unwrap();
        assert_eq!(k, LawKind::rademacher(1.0));
        assert!(serde_json::from_str::<LawKind>(r#"{"kind":"cauchy"}"#).is_err());
    }
}
