//! Harmonic δ-peaks of the ground-coherence power spectrum.
//!
//! The coherent part of the spectrum is a comb of δ-peaks at `n·δω_s`; peak
//! `n` has weight `Σ_l |ρ^R_{l,l+2n}|²`. Peaks are kept as data, and
//! [`broadened_spectrum`] only exists for plotting.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::liouvillian::GroundCoherences;
use crate::{Error, Result};

/// Default relative display cutoff for "visible" peaks.
pub const DEFAULT_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contributor {
    /// Lower odd label `l` of the pair `(l, l+2n)`.
    pub l: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub n: usize,
    pub frequency: f64,
    pub weight: f64,
    pub contributors: Vec<Contributor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub delta_omega_s: f64,
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    /// Peaks whose weight is at least `threshold` times the fundamental's.
    pub fn visible(&self, threshold: f64) -> Vec<&Peak> {
        let Some(fundamental) = self.peaks.first().map(|p| p.weight) else {
            return Vec::new();
        };
        if fundamental <= 0.0 {
            return Vec::new();
        }
        self.peaks
            .iter()
            .filter(|p| p.weight >= threshold * fundamental)
            .collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.weight).collect()
    }
}

/// Peak weights relative to the fundamental, `H_{n,1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightRatios {
    pub fundamental_weight: f64,
    /// `ratios[k]` is `H_{k+1,1}`, so `ratios[0] = 1`.
    pub ratios: Vec<f64>,
}

impl HeightRatios {
    /// `H_{n,1}` for `n ≥ 1`.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|k| self.ratios.get(k).copied())
    }
}

/// Least-squares line through `(n, ln w_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Peaks `n = 1..n_ground-1` from ground-chain coherences.
pub fn coherence_peaks(rho: &GroundCoherences, delta_omega_s: f64) -> Result<PeakSet> {
    let n_ground = rho.n_ground();
    if n_ground < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: n_ground,
        });
    }
    let m = rho.matrix();
    let peaks = (1..n_ground)
        .map(|n| {
            let contributors: Vec<Contributor> = (0..n_ground - n)
                .map(|k| Contributor {
                    l: 2 * k + 1,
                    weight: m[(k, k + n)].norm_sqr(),
                })
                .collect();
            Peak {
                n,
                frequency: n as f64 * delta_omega_s,
                weight: contributors.iter().map(|c| c.weight).sum(),
                contributors,
            }
        })
        .collect();
    Ok(PeakSet {
        delta_omega_s,
        peaks,
    })
}

pub fn height_ratios(peaks: &PeakSet) -> Result<HeightRatios> {
    let fundamental = peaks.peaks.first().map(|p| p.weight).unwrap_or(0.0);
    if !(fundamental > 0.0) {
        return Err(Error::ZeroFundamental);
    }
    Ok(HeightRatios {
        fundamental_weight: fundamental,
        ratios: peaks.peaks.iter().map(|p| p.weight / fundamental).collect(),
    })
}

/// Fits `ln H_{n,1}` against `n` over the peaks with nonzero weight. The slope
/// and `r²` equal those of a fit to the raw weights.
pub fn loglinear_fit(ratios: &HeightRatios) -> Result<LogLinearFit> {
    let points: Vec<(f64, f64)> = ratios
        .ratios
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0 && r.is_finite())
        .map(|(k, r)| ((k + 1) as f64, r.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::TooFewPeaks(points.len()));
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LogLinearFit {
        slope,
        intercept: intercept + ratios.fundamental_weight.ln(),
        r_squared,
    })
}

/// Sum of unit-area Lorentzians of full width `linewidth` centred on the peaks
/// and scaled by their weights. A lone peak has height
/// `weight / (π · linewidth / 2)` at its centre.
pub fn broadened_spectrum(peaks: &PeakSet, linewidth: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !(linewidth > 0.0 && linewidth.is_finite()) {
        return Err(Error::param("linewidth", format!("must be finite and > 0, got {linewidth}")));
    }
    let half = linewidth / 2.0;
    Ok(grid
        .iter()
        .map(|w| {
            peaks
                .peaks
                .iter()
                .map(|p| p.weight * half / (PI * ((w - p.frequency).powi(2) + half * half)))
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CMatrix, C64};

    fn ground(entries: &[(usize, usize, C64)], n: usize) -> GroundCoherences {
        let mut m = CMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0);
        for &(i, j, z) in entries {
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        GroundCoherences::new(m).unwrap()
    }

    #[test]
    fn diagonal_state_has_empty_peaks() {
        let p = coherence_peaks(&ground(&[], 4), 1.0).unwrap();
        assert_eq!(p.peaks.len(), 3);
        assert!(p.weights().iter().all(|w| *w == 0.0));
        assert_eq!(height_ratios(&p).unwrap_err(), Error::ZeroFundamental);
    }

    #[test]
    fn contributors_and_frequencies() {
        let z = C64::new(0.1, -0.2);
        let p = coherence_peaks(&ground(&[(0, 1, z), (1, 2, z), (0, 2, z * 0.5)], 3), 2.5).unwrap();
        assert_eq!(p.peaks[0].contributors.len(), 2);
        assert_eq!(p.peaks[1].contributors.len(), 1);
        assert_eq!(p.peaks[0].contributors[1].l, 3);
        assert_eq!(p.peaks[1].frequency, 5.0);
        let sum: f64 = p.peaks[0].contributors.iter().map(|c| c.weight).sum();
        assert_eq!(sum, p.peaks[0].weight);
        let h = height_ratios(&p).unwrap();
        assert_eq!(h.get(1), Some(1.0));
        assert!((h.get(2).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn geometric_weights_fit_exactly() {
        let r: f64 = 0.03;
        let h = HeightRatios {
            fundamental_weight: 2.0,
            ratios: (0..5).map(|k| r.powi(k)).collect(),
        };
        let fit = loglinear_fit(&h).unwrap();
        assert!((fit.slope - r.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        // ln w_n = ln 2 + (n-1) ln r.
        assert!((fit.intercept - (2.0f64.ln() - r.ln())).abs() < 1e-12);
        let short = HeightRatios {
            fundamental_weight: 1.0,
            ratios: vec![1.0, 0.1, 0.0],
        };
        assert_eq!(loglinear_fit(&short).unwrap_err(), Error::TooFewPeaks(2));
    }

    #[test]
    fn lorentzian_heights() {
        let set = |weights: &[f64]| PeakSet {
            delta_omega_s: 10.0,
            peaks: weights
                .iter()
                .enumerate()
                .map(|(k, w)| Peak {
                    n: k + 1,
                    frequency: 10.0 * (k + 1) as f64,
                    weight: *w,
                    contributors: vec![],
                })
                .collect(),
        };
        let one = broadened_spectrum(&set(&[3.0]), 0.5, &[10.0]).unwrap();
        assert!((one[0] - 3.0 / (PI * 0.25)).abs() < 1e-12);
        let zero = broadened_spectrum(&set(&[0.0, 0.0]), 0.5, &[5.0, 10.0, 20.0]).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
        // Peaks 10 linewidths apart barely overlap.
        let two = broadened_spectrum(&set(&[1.0, 1.0]), 1.0, &[10.0, 20.0]).unwrap();
        let isolated = 1.0 / (PI * 0.5);
        assert!(two.iter().all(|v| (v / isolated - 1.0).abs() < 0.01));
        assert_eq!(broadened_spectrum(&set(&[1.0]), 1.0, &[]).unwrap_err(), Error::EmptyGrid);
        assert!(broadened_spectrum(&set(&[1.0]), 0.0, &[1.0]).is_err());
    }

    #[test]
    fn visible_peaks_respect_threshold() {
        let set = PeakSet {
            delta_omega_s: 1.0,
            peaks: [1.0, 1e-3, 1e-6]
                .iter()
                .enumerate()
                .map(|(k, w)| Peak {
                    n: k + 1,
                    frequency: (k + 1) as f64,
                    weight: *w,
                    contributors: vec![],
                })
                .collect(),
        };
        assert_eq!(set.visible(DEFAULT_THRESHOLD).len(), 2);
        assert_eq!(set.visible(1e-7).len(), 3);
    }
}
