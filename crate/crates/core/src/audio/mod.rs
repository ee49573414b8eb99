//! Closed-form audio descriptors: zero-crossing rate, RMS, spectral
//! moments, flatness, rolloff, flux and brightness, each reduced to one
//! value per clip.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

mod fft;
pub mod spectral;
mod wav;

pub use spectral::{brightness, spectral_flatness, spectral_flux, spectral_moments, spectral_rolloff, SpectralMoments};
pub use wav::read_wav;

/// Audio decoding and analysis errors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AudioError {
    /// Missing RIFF/WAVE magic.
    #[error("not a RIFF/WAVE file")]
    NotRiff,
    /// Anything other than 16-bit PCM or 32-bit float.
    #[error("unsupported WAVE codec")]
    UnsupportedCodec,
    /// Missing chunks or a data chunk shorter than declared.
    #[error("truncated WAVE data")]
    TruncatedData,
    /// NaN or infinite sample.
    #[error("non-finite sample value")]
    NonFiniteSample,
    /// Zero or negative sample rate.
    #[error("sample rate must be positive")]
    InvalidSampleRate,
    /// Empty clip.
    #[error("clip has no samples")]
    EmptyClip,
    /// Fewer samples than one analysis frame.
    #[error("clip of {len} samples is shorter than the {frame_length}-sample frame")]
    ClipTooShort {
        /// Clip length.
        len: usize,
        /// Requested frame length.
        frame_length: usize,
    },
    /// Frame length or hop of zero.
    #[error("frame length and hop must be positive")]
    InvalidFrameConfig,
    /// All magnitudes zero.
    #[error("silent frame")]
    SilentFrame,
    /// Flux over fewer than two frames.
    #[error("need at least two frames")]
    TooFewFrames,
    /// Every frame of the clip was silent.
    #[error("all frames are silent")]
    AllFramesSilent,
}

/// Mono PCM audio.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl AudioClip {
    /// Wraps samples, rejecting non-finite values and empty clips.
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self, AudioError> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(AudioError::InvalidSampleRate);
        }
        if samples.is_empty() {
            return Err(AudioError::EmptyClip);
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(AudioError::NonFiniteSample);
        }
        Ok(Self { samples, sample_rate })
    }

    /// Averages interleaved channels to mono.
    pub fn from_interleaved(interleaved: &[f64], channels: usize, sample_rate: f64) -> Result<Self, AudioError> {
        if channels == 0 {
            return Err(AudioError::UnsupportedCodec);
        }
        let mono = interleaved
            .chunks_exact(channels)
            .map(|c| c.iter().sum::<f64>() / channels as f64)
            .collect();
        Self::new(mono, sample_rate)
    }

    /// Samples.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Sample rate in Hz.
    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Length in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// Analysis window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// Periodic Hann.
    #[default]
    Hann,
    /// No tapering.
    Rect,
}

impl Window {
    /// Window coefficients for a frame of `len` samples.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Self::Hann => (0..len)
                .map(|i| 0.5 - 0.5 * math::cos(2.0 * PI * i as f64 / len as f64))
                .collect(),
            Self::Rect => alloc::vec![1.0; len],
        }
    }
}

/// Analysis parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioConfig {
    /// Frame length in samples.
    pub frame_length: usize,
    /// Hop in samples.
    pub hop: usize,
    /// Window shape.
    pub window: Window,
    /// Cutoffs in Hz feeding `bright1000`, `bright1500`, `bright3000`.
    pub brightness_cutoffs: [f64; 3],
    /// Energy fractions feeding `rolloff85`, `rolloff95`.
    pub rolloff_fractions: [f64; 2],
}

impl Default for AudioConfig {
    fn default() -> Self {
        Self {
            frame_length: 2048,
            hop: 1024,
            window: Window::Hann,
            brightness_cutoffs: [1000.0, 1500.0, 3000.0],
            rolloff_fractions: [0.85, 0.95],
        }
    }
}

/// Short-time magnitude spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFrameSeries {
    /// One magnitude vector per frame over bins `0..=N/2`.
    pub magnitudes: Vec<Vec<f64>>,
    /// Bin centre frequencies in Hz, 0 to Nyquist.
    pub bin_frequencies: Vec<f64>,
    /// Hop between frames in seconds.
    pub frame_hop: f64,
}

/// Short-time Fourier transform magnitudes.
///
/// Produces `floor((len - frame_length) / hop) + 1` frames.
pub fn stft_magnitudes(clip: &AudioClip, frame_length: usize, hop: usize, window: Window) -> Result<SpectralFrameSeries, AudioError> {
    if frame_length == 0 || hop == 0 {
        return Err(AudioError::InvalidFrameConfig);
    }
    let len = clip.samples.len();
    if len < frame_length {
        return Err(AudioError::ClipTooShort { len, frame_length });
    }
    let frames = (len - frame_length) / hop + 1;
    let coeffs = window.coefficients(frame_length);
    let dft = fft::RealDft::new(frame_length);
    let mut buf = alloc::vec![0.0; frame_length];
    let magnitudes = (0..frames)
        .map(|f| {
            let start = f * hop;
            for ((b, s), w) in buf.iter_mut().zip(&clip.samples[start..start + frame_length]).zip(&coeffs) {
                *b = s * w;
            }
            dft.magnitudes(&buf)
        })
        .collect();
    let bin_frequencies = (0..=frame_length / 2)
        .map(|k| k as f64 * clip.sample_rate / frame_length as f64)
        .collect();
    Ok(SpectralFrameSeries {
        magnitudes,
        bin_frequencies,
        frame_hop: hop as f64 / clip.sample_rate,
    })
}

/// Zero-crossing rate in crossings per second (zero counts as positive)
/// and root mean square.
pub fn time_domain_features(clip: &AudioClip) -> (f64, f64) {
    let s = &clip.samples;
    let crossings = s.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count();
    let rms = math::sqrt(s.iter().map(|x| x * x).sum::<f64>() / s.len() as f64);
    (crossings as f64 / clip.duration(), rms)
}

/// One value per descriptor for a whole clip.
#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(missing_docs)]
pub struct AudioFeatureVector {
    pub zcr: f64,
    pub rms: f64,
    pub centroid: f64,
    pub spread: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub flatness: f64,
    pub rolloff85: f64,
    pub rolloff95: f64,
    pub flux: f64,
    pub bright1000: f64,
    pub bright1500: f64,
    pub bright3000: f64,
}

impl AudioFeatureVector {
    /// Column names in output order.
    pub const NAMES: [&'static str; 13] = [
        "zcr",
        "rms",
        "centroid",
        "spread",
        "skewness",
        "kurtosis",
        "flatness",
        "rolloff85",
        "rolloff95",
        "flux",
        "bright1000",
        "bright1500",
        "bright3000",
    ];

    /// Values aligned with [`Self::NAMES`].
    pub fn values(&self) -> [f64; 13] {
        [
            self.zcr,
            self.rms,
            self.centroid,
            self.spread,
            self.skewness,
            self.kurtosis,
            self.flatness,
            self.rolloff85,
            self.rolloff95,
            self.flux,
            self.bright1000,
            self.bright1500,
            self.bright3000,
        ]
    }
}

/// Frame-level descriptors averaged over non-silent frames.
///
/// Flux is taken between consecutive non-silent frames and is 0 when only
/// one such frame exists.
pub fn extract_audio_features(clip: &AudioClip, config: &AudioConfig) -> Result<AudioFeatureVector, AudioError> {
    let series = stft_magnitudes(clip, config.frame_length, config.hop, config.window)?;
    features_from_series(clip, &series, config)
}

/// Same as [`extract_audio_features`] over a precomputed series.
pub fn features_from_series(clip: &AudioClip, series: &SpectralFrameSeries, config: &AudioConfig) -> Result<AudioFeatureVector, AudioError> {
    let freqs = &series.bin_frequencies;
    let live: Vec<&[f64]> = series
        .magnitudes
        .iter()
        .map(Vec::as_slice)
        .filter(|m| m.iter().any(|&x| x > 0.0))
        .collect();
    if live.is_empty() {
        return Err(AudioError::AllFramesSilent);
    }
    let mut acc = [0.0f64; 10];
    for m in &live {
        let moments = spectral_moments(m, freqs)?;
        let row = [
            moments.centroid,
            moments.spread,
            moments.skewness,
            moments.kurtosis,
            spectral_flatness(m)?,
            spectral_rolloff(m, freqs, config.rolloff_fractions[0])?,
            spectral_rolloff(m, freqs, config.rolloff_fractions[1])?,
            brightness(m, freqs, config.brightness_cutoffs[0])?,
            brightness(m, freqs, config.brightness_cutoffs[1])?,
            brightness(m, freqs, config.brightness_cutoffs[2])?,
        ];
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    let count = live.len() as f64;
    let avg = |i: usize| acc[i] / count;
    let flux = match spectral::flux_of(live.iter().copied()) {
        Ok(f) => f,
        Err(AudioError::TooFewFrames) => 0.0,
        Err(e) => return Err(e),
    };
    let (zcr, rms) = time_domain_features(clip);
    Ok(AudioFeatureVector {
        zcr,
        rms,
        centroid: avg(0),
        spread: avg(1),
        skewness: avg(2),
        kurtosis: avg(3),
        flatness: avg(4),
        rolloff85: avg(5),
        rolloff95: avg(6),
        flux,
        bright1000: avg(7),
        bright1500: avg(8),
        bright3000: avg(9),
    })
}
