use std::ops::Range;

use crate::ensemble::Spike;
use crate::error::Result;
use crate::spectral::Semicircle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// Predicted outlier group of one supercritical spike.
#[derive(Clone, Debug, PartialEq)]
pub struct OutlierGroup {
    /// Position of the spike in the deformation's list.
    pub spike: usize,
    pub theta: f64,
    pub multiplicity: usize,
    pub rho: f64,
    pub c_theta: f64,
    /// `θ² − σ² = −1/g′(ρ)`.
    pub scale: f64,
    /// Zero-based positions in the descending spectrum of `M`.
    pub indices: Range<usize>,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutlierPrediction {
    pub sigma: f64,
    pub n: usize,
    pub groups: Vec<OutlierGroup>,
    /// Number of distinct spikes above `σ` and below `−σ`.
    pub j_plus: usize,
    pub j_minus: usize,
    /// Outlier counts with multiplicity.
    pub k_plus: usize,
    pub k_minus: usize,
}

impl OutlierPrediction {
    /// Predicted limit of `λ1`: the top outlier, or the edge `2σ`.
    pub fn top(&self) -> f64 {
        self.groups
            .iter()
            .find(|g| g.side == Side::Upper)
            .map_or(2.0 * self.sigma, |g| g.rho)
    }

    /// Predicted limit of `λN`.
    pub fn bottom(&self) -> f64 {
        self.groups
            .iter()
            .rev()
            .find(|g| g.side == Side::Lower)
            .map_or(-2.0 * self.sigma, |g| g.rho)
    }

    pub fn group_for_spike(&self, spike: usize) -> Option<&OutlierGroup> {
        self.groups.iter().find(|g| g.spike == spike)
    }
}

/// Outlier locations `ρ_θ = θ + σ²/θ` for every spike with `|θ| > σ`,
/// indexed in the descending spectrum of the `n × n` deformed matrix.
pub fn predict_outliers(spikes: &[Spike], sigma: f64, n: usize) -> Result<OutlierPrediction> {
    let sc = Semicircle::new(sigma)?;
    let mut groups = Vec::new();
    let mut next_top = 0;
    let k_minus: usize = spikes
        .iter()
        .filter(|s| s.theta < -sigma)
        .map(|s| s.multiplicity)
        .sum();
    let mut next_bottom = n.saturating_sub(k_minus);
    for (j, s) in spikes.iter().enumerate() {
        if s.theta.abs() <= sigma {
            continue;
        }
        let side = if s.theta > 0.0 { Side::Upper } else { Side::Lower };
        let start = match side {
            Side::Upper => &mut next_top,
            Side::Lower => &mut next_bottom,
        };
        let indices = *start..*start + s.multiplicity;
        *start += s.multiplicity;
        groups.push(OutlierGroup {
            spike: j,
            theta: s.theta,
            multiplicity: s.multiplicity,
            rho: sc.rho(s.theta)?,
            c_theta: sc.c_theta(s.theta)?,
            scale: sc.fluctuation_scale(s.theta)?,
            indices,
            side,
        });
    }
    Ok(OutlierPrediction {
        sigma,
        n,
        j_plus: groups.iter().filter(|g| g.side == Side::Upper).count(),
        j_minus: groups.iter().filter(|g| g.side == Side::Lower).count(),
        k_plus: next_top,
        k_minus,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spike() {
        let p = predict_outliers(&[Spike::new(2.0, 1)], 1.0, 100).unwrap();
        assert_eq!(p.groups.len(), 1);
        assert_eq!(p.groups[0].rho, 2.5);
        assert_eq!(p.groups[0].indices, 0..1);
        assert_eq!(p.top(), 2.5);
    }

    #[test]
    fn subcritical_spike_predicts_the_edge() {
        let p = predict_outliers(&[Spike::new(0.5, 3)], 1.0, 100).unwrap();
        assert!(p.groups.is_empty());
        assert_eq!(p.top(), 2.0);
        assert_eq!((p.k_plus, p.j_plus), (0, 0));
    }

    #[test]
    fn both_sides() {
        let n = 50;
        let p = predict_outliers(&[Spike::new(3.0, 2), Spike::new(-2.0, 1)], 1.0, n).unwrap();
        assert!((p.groups[0].rho - (3.0 + 1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(p.groups[0].indices, 0..2);
        assert_eq!(p.groups[1].rho, -2.5);
        assert_eq!(p.groups[1].indices, n - 1..n);
        assert_eq!((p.k_plus, p.k_minus, p.j_plus, p.j_minus), (2, 1, 1, 1));
    }

    #[test]
    fn lower_groups_keep_descending_order() {
        let n = 10;
        let p = predict_outliers(&[Spike::new(-2.0, 1), Spike::new(-3.0, 2)], 1.0, n).unwrap();
        assert_eq!(p.groups[0].indices, 7..8);
        assert_eq!(p.groups[1].indices, 8..10);
        assert!(p.groups[0].rho > p.groups[1].rho);
        assert_eq!(p.bottom(), p.groups[1].rho);
    }
}
