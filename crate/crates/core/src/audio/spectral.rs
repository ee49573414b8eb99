//! Per-frame spectral descriptors.
//!
//! Moments, flatness and flux weight bins by magnitude; rolloff and
//! brightness by energy (squared magnitude).

use super::{AudioError, SpectralFrameSeries};
use crate::math;

/// Spectral distribution moments of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMoments {
    /// Mean frequency in Hz.
    pub centroid: f64,
    /// Standard deviation in Hz.
    pub spread: f64,
    /// Third standardized moment.
    pub skewness: f64,
    /// Fourth standardized moment.
    pub kurtosis: f64,
    /// Spread was negligible; skewness and kurtosis are reported as 0.
    pub degenerate: bool,
}

fn total(magnitudes: &[f64]) -> Result<f64, AudioError> {
    let s: f64 = magnitudes.iter().sum();
    if s > 0.0 {
        Ok(s)
    } else {
        Err(AudioError::SilentFrame)
    }
}

fn energy_total(magnitudes: &[f64]) -> Result<f64, AudioError> {
    let s: f64 = magnitudes.iter().map(|m| m * m).sum();
    if s > 0.0 {
        Ok(s)
    } else {
        Err(AudioError::SilentFrame)
    }
}

/// Centroid, spread, skewness and kurtosis of the magnitude-weighted
/// frequency distribution.
pub fn spectral_moments(magnitudes: &[f64], bin_frequencies: &[f64]) -> Result<SpectralMoments, AudioError> {
    let sum = total(magnitudes)?;
    let weights = magnitudes.iter().map(|m| m / sum);
    let centroid: f64 = weights.clone().zip(bin_frequencies).map(|(w, f)| w * f).sum();
    let central = |p: i32| -> f64 {
        weights
            .clone()
            .zip(bin_frequencies)
            .map(|(w, f)| w * math::powi(f - centroid, p))
            .sum()
    };
    let spread = math::sqrt(central(2));
    let nyquist = bin_frequencies.last().copied().unwrap_or(0.0);
    if spread < 1e-9 * nyquist || spread == 0.0 {
        return Ok(SpectralMoments {
            centroid,
            spread,
            skewness: 0.0,
            kurtosis: 0.0,
            degenerate: true,
        });
    }
    Ok(SpectralMoments {
        centroid,
        spread,
        skewness: central(3) / math::powi(spread, 3),
        kurtosis: central(4) / math::powi(spread, 4),
        degenerate: false,
    })
}

/// Geometric over arithmetic mean of bins `1..`, DC excluded.
///
/// A zero magnitude anywhere in that range makes the result 0.
pub fn spectral_flatness(magnitudes: &[f64]) -> Result<f64, AudioError> {
    total(magnitudes)?;
    let bins = magnitudes.get(1..).unwrap_or(&[]);
    if bins.is_empty() || bins.contains(&0.0) {
        return Ok(0.0);
    }
    if bins.iter().all(|&m| m == bins[0]) {
        return Ok(1.0);
    }
    let arith = math::mean(bins);
    let log_geo = bins.iter().map(|&m| math::ln(m / arith)).sum::<f64>() / bins.len() as f64;
    Ok(math::exp(log_geo).clamp(0.0, 1.0))
}

/// Lowest bin frequency at which cumulative energy reaches `fraction` of the total.
pub fn spectral_rolloff(magnitudes: &[f64], bin_frequencies: &[f64], fraction: f64) -> Result<f64, AudioError> {
    let energy = energy_total(magnitudes)?;
    let target = fraction * energy;
    let mut cumulative = 0.0;
    for (m, &f) in magnitudes.iter().zip(bin_frequencies) {
        cumulative += m * m;
        if cumulative >= target {
            return Ok(f);
        }
    }
    // rounding can leave the running sum a hair under the total
    Ok(bin_frequencies[magnitudes.len().min(bin_frequencies.len()) - 1])
}

/// Share of energy in bins at or above `cutoff` Hz.
pub fn brightness(magnitudes: &[f64], bin_frequencies: &[f64], cutoff: f64) -> Result<f64, AudioError> {
    let energy = energy_total(magnitudes)?;
    let high: f64 = magnitudes
        .iter()
        .zip(bin_frequencies)
        .filter(|(_, &f)| f >= cutoff)
        .map(|(m, _)| m * m)
        .sum();
    Ok((high / energy).clamp(0.0, 1.0))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Mean Euclidean distance between consecutive frames' magnitude spectra.
pub fn spectral_flux(series: &SpectralFrameSeries) -> Result<f64, AudioError> {
    flux_of(series.magnitudes.iter().map(|m| m.as_slice()))
}

pub(super) fn flux_of<'a>(frames: impl Iterator<Item = &'a [f64]>) -> Result<f64, AudioError> {
    let mut prev: Option<&[f64]> = None;
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for frame in frames {
        if let Some(p) = prev {
            sum += euclidean(p, frame);
            pairs += 1;
        }
        prev = Some(frame);
    }
    if pairs == 0 {
        return Err(AudioError::TooFewFrames);
    }
    Ok(sum / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    fn freqs(n: usize, step: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * step).collect()
    }

    #[test]
    fn two_point_moments() {
        let f = freqs(4, 500.0); // 0, 500, 1000, 1500
        let m = spectral_moments(&[0.0, 1.0, 0.0, 1.0], &f).unwrap();
        assert_abs_diff_eq!(m.centroid, 1000.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.spread, 500.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.skewness, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.kurtosis, 1.0, epsilon = 1e-12);
        assert!(!m.degenerate);
    }

    #[test]
    fn single_bin_is_degenerate() {
        let f = freqs(5, 500.0);
        let m = spectral_moments(&[0.0, 0.0, 3.0, 0.0, 0.0], &f).unwrap();
        assert_eq!(m.centroid, 1000.0);
        assert_eq!(m.spread, 0.0);
        assert!(m.degenerate);
        assert_eq!((m.skewness, m.kurtosis), (0.0, 0.0));
    }

    #[test]
    fn uniform_centroid_is_mean_frequency() {
        let f = freqs(9, 100.0);
        let m = spectral_moments(&[2.0; 9], &f).unwrap();
        assert_abs_diff_eq!(m.centroid, 400.0, epsilon = 1e-9);
    }

    #[test]
    fn silent_frame_errors() {
        let f = freqs(3, 1.0);
        assert_eq!(spectral_moments(&[0.0; 3], &f), Err(AudioError::SilentFrame));
        assert_eq!(spectral_flatness(&[0.0; 3]), Err(AudioError::SilentFrame));
        assert_eq!(spectral_rolloff(&[0.0; 3], &f, 0.85), Err(AudioError::SilentFrame));
        assert_eq!(brightness(&[0.0; 3], &f, 1.0), Err(AudioError::SilentFrame));
    }

    #[test]
    fn flatness_examples() {
        assert_eq!(spectral_flatness(&[5.0, 2.0, 2.0, 2.0]).unwrap(), 1.0);
        assert_eq!(spectral_flatness(&[0.0, 0.0, 3.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(spectral_flatness(&[0.0, 1.0, 4.0]).unwrap(), 0.8, epsilon = 1e-12);
    }

    #[test]
    fn rolloff_examples() {
        let f = freqs(5, 1000.0);
        let single = [0.0, 0.0, 1.0, 0.0, 0.0];
        assert_eq!(spectral_rolloff(&single, &f, 0.85).unwrap(), 2000.0);
        assert_eq!(spectral_rolloff(&single, &f, 0.95).unwrap(), 2000.0);

        let f100 = freqs(100, 10.0);
        assert_eq!(spectral_rolloff(&[1.0; 100], &f100, 0.85).unwrap(), f100[84]);

        // energies 3 and 1 at 100 and 200 Hz
        let mags = [libm::sqrt(3.0), 1.0];
        assert_eq!(spectral_rolloff(&mags, &[100.0, 200.0], 0.85).unwrap(), 200.0);
        assert_eq!(spectral_rolloff(&mags, &[100.0, 200.0], 0.7).unwrap(), 100.0);
    }

    #[test]
    fn brightness_edges() {
        let f = freqs(5, 1000.0);
        let m = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(brightness(&m, &f, 0.0).unwrap(), 1.0);
        assert_eq!(brightness(&m, &f, 5000.0).unwrap(), 0.0);
    }

    #[test]
    fn flux_examples() {
        let series = |frames: Vec<Vec<f64>>| SpectralFrameSeries {
            magnitudes: frames,
            bin_frequencies: vec![0.0, 1.0],
            frame_hop: 0.1,
        };
        assert_eq!(spectral_flux(&series(vec![vec![1.0, 2.0]; 3])).unwrap(), 0.0);
        assert_abs_diff_eq!(
            spectral_flux(&series(vec![vec![1.0, 0.0], vec![0.0, 1.0]])).unwrap(),
            core::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
        let base = vec![vec![1.0, 0.5], vec![0.2, 3.0], vec![2.0, 2.0]];
        let scaled: Vec<Vec<f64>> = base.iter().map(|f| f.iter().map(|x| x * 2.5).collect()).collect();
        let a = spectral_flux(&series(base)).unwrap();
        let b = spectral_flux(&series(scaled)).unwrap();
        assert_abs_diff_eq!(b, 2.5 * a, epsilon = 1e-12);
        assert_eq!(spectral_flux(&series(vec![vec![1.0, 1.0]])), Err(AudioError::TooFewFrames));
    }
}
