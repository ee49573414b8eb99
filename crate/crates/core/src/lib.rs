//! Perceptual music feature toolkit.
//!
//! Pure algorithmic core: Standard MIDI File ingestion, symbolic note
//! features (note density, sound level, pitch, articulation), closed-form
//! spectral descriptors over PCM audio, rater agreement statistics and
//! the regression machinery (OLS with semipartial correlations, NIPALS
//! PLS1, repeated k-fold cross-validation) used to link them.
//!
//! The crate is `no_std` and only needs an allocator. File formats, batch
//! processing and the command-line front-end live in the `percept` crate.
//!
//! ```text
//! SMF bytes -> Song -> annotate -> MidiFeatureVector --\
//! PCM bytes -> AudioClip -> STFT -> AudioFeatureVector --+--> Design -> OLS / PLS -> CV
//! ratings  -> RatingMatrix -> agreement, item means ----/
//! ```

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod audio;
mod math;
pub mod midi;
pub mod midi_features;
pub mod regress;
pub mod stats;

pub use audio::{AudioClip, AudioConfig, AudioError, AudioFeatureVector, SpectralFrameSeries, Window};
pub use midi::{MidiError, MidiNote, PercussionClass, PercussionTable, Song, TrackCategory};
pub use midi_features::{CalibrationCurve, FeatureError, MidiFeatureConfig, MidiFeatureVector};
pub use regress::{CvMethod, CvReport, Design, OlsFit, PlsModel, RegressError};
pub use stats::{AgreementReport, CorrelationCell, RatingMatrix, StatsError};
