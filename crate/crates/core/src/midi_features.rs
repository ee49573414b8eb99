//! Per-song symbolic features: note density, sound level, pitch and
//! articulation per instrument category, plus the annotated tempo.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::math;
use crate::midi::{MidiNote, PercussionClass, PercussionTable, Song, TrackCategory};

/// Notes softer than the loudest note by this many dB or more are dropped.
pub const SOFT_NOTE_GATE_DB: f64 = 20.0;
/// Onsets closer than this to a cluster's first onset count as one.
pub const DEFAULT_MERGE_WINDOW: f64 = 0.050;
/// Inter-onset intervals above this are treated as rests.
pub const MAX_IOI: f64 = 0.8;

/// Errors from the symbolic feature computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    /// Note density over a song of zero or negative length.
    #[error("song duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    /// No notes (or no surviving articulation ratio) for the category.
    #[error("no qualifying notes")]
    EmptyCategory,
    /// Calibration grid with missing combinations or too few points.
    #[error("calibration table must be a full velocity x volume grid")]
    IncompleteCalibrationGrid,
    /// Calibration levels decreasing along an axis.
    #[error("calibration table is not monotone non-decreasing")]
    NonMonotoneCalibration,
}

/// Velocity/volume grid with bilinear interpolation, clamped at the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    velocities: Vec<f64>,
    volumes: Vec<f64>,
    // row-major: velocity index, then volume index
    levels: Vec<f64>,
}

impl CalibrationTable {
    /// Builds the table from `(velocity, volume, dB)` points forming a full grid.
    pub fn new(points: &[(u8, u8, f64)]) -> Result<Self, FeatureError> {
        let mut velocities: Vec<u8> = points.iter().map(|p| p.0).collect();
        let mut volumes: Vec<u8> = points.iter().map(|p| p.1).collect();
        velocities.sort_unstable();
        velocities.dedup();
        volumes.sort_unstable();
        volumes.dedup();
        let grid: BTreeMap<(u8, u8), f64> = points.iter().map(|&(v, c, db)| ((v, c), db)).collect();
        if velocities.is_empty() || grid.len() != velocities.len() * volumes.len() || grid.len() != points.len() {
            return Err(FeatureError::IncompleteCalibrationGrid);
        }
        let levels: Vec<f64> = grid.values().copied().collect();
        let cols = volumes.len();
        for i in 0..velocities.len() {
            for j in 0..cols {
                let here = levels[i * cols + j];
                let down_ok = i == 0 || levels[(i - 1) * cols + j] <= here;
                let left_ok = j == 0 || levels[i * cols + j - 1] <= here;
                if !(down_ok && left_ok) {
                    return Err(FeatureError::NonMonotoneCalibration);
                }
            }
        }
        Ok(Self {
            velocities: velocities.into_iter().map(f64::from).collect(),
            volumes: volumes.into_iter().map(f64::from).collect(),
            levels,
        })
    }

    fn bracket(axis: &[f64], x: f64) -> (usize, usize, f64) {
        if axis.len() == 1 || x <= axis[0] {
            return (0, 0, 0.0);
        }
        let last = axis.len() - 1;
        if x >= axis[last] {
            return (last, last, 0.0);
        }
        let hi = axis.partition_point(|&a| a <= x);
        let lo = hi - 1;
        (lo, hi, (x - axis[lo]) / (axis[hi] - axis[lo]))
    }

    /// Interpolated level in dB.
    pub fn level(&self, velocity: u8, volume: u8) -> f64 {
        let cols = self.volumes.len();
        let (i0, i1, fi) = Self::bracket(&self.velocities, f64::from(velocity));
        let (j0, j1, fj) = Self::bracket(&self.volumes, f64::from(volume));
        let at = |i: usize, j: usize| self.levels[i * cols + j];
        let low = at(i0, j0) * (1.0 - fj) + at(i0, j1) * fj;
        let high = at(i1, j0) * (1.0 - fj) + at(i1, j1) * fj;
        low * (1.0 - fi) + high * fi
    }
}

/// Mapping from (velocity, controller 7 volume) to a relative sound level in dB.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CalibrationCurve {
    /// `20 log10(velocity/127) + 20 log10(max(volume, 1)/127)`, 0 dB at (127, 127).
    #[default]
    Logarithmic,
    /// Measured synthesizer table.
    Table(CalibrationTable),
}

impl CalibrationCurve {
    /// Level in dB for a velocity/volume pair.
    pub fn level(&self, velocity: u8, volume: u8) -> f64 {
        match self {
            Self::Logarithmic => {
                20.0 * math::log10(f64::from(velocity.max(1)) / 127.0)
                    + 20.0 * math::log10(f64::from(volume.max(1)) / 127.0)
            }
            Self::Table(t) => t.level(velocity, volume),
        }
    }
}

/// Sound level of one note in dB.
pub fn note_sound_level(note: &MidiNote, cal: &CalibrationCurve) -> f64 {
    cal.level(note.velocity, note.volume_cc)
}

/// Keeps notes strictly louder than the song maximum minus 20 dB.
pub fn filter_soft_notes(notes: &[MidiNote], cal: &CalibrationCurve) -> Vec<MidiNote> {
    let levels: Vec<f64> = notes.iter().map(|n| note_sound_level(n, cal)).collect();
    let Some(max) = levels.iter().copied().reduce(f64::max) else {
        return Vec::new();
    };
    notes
        .iter()
        .zip(&levels)
        .filter(|(_, &l)| l > max - SOFT_NOTE_GATE_DB)
        .map(|(n, _)| *n)
        .collect()
}

/// Number of onset clusters. A cluster is anchored at its first onset and
/// absorbs every later onset at most `merge_window` after the anchor.
pub fn count_onset_clusters(onsets: &[f64], merge_window: f64) -> usize {
    let mut sorted = onsets.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut anchor = f64::NEG_INFINITY;
    for t in sorted {
        if count == 0 || t - anchor > merge_window {
            count += 1;
            anchor = t;
        }
    }
    count
}

/// Onset clusters per second.
pub fn note_density(onsets: &[f64], song_duration: f64, merge_window: f64) -> Result<f64, FeatureError> {
    if !(song_duration > 0.0) {
        return Err(FeatureError::NonPositiveDuration(song_duration));
    }
    Ok(count_onset_clusters(onsets, merge_window) as f64 / song_duration)
}

/// Mean key number, one term per note.
pub fn mean_pitch(notes: &[MidiNote]) -> Result<f64, FeatureError> {
    if notes.is_empty() {
        return Err(FeatureError::EmptyCategory);
    }
    Ok(notes.iter().map(|n| f64::from(n.key)).sum::<f64>() / notes.len() as f64)
}

/// Mean of duration / IOI, where IOI runs to the next distinct onset in the
/// same track. Last notes of a track and IOIs above [`MAX_IOI`] are skipped.
pub fn mean_articulation(notes: &[MidiNote]) -> Result<f64, FeatureError> {
    let mut by_track: BTreeMap<usize, Vec<&MidiNote>> = BTreeMap::new();
    for n in notes {
        by_track.entry(n.track_id).or_default().push(n);
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for track in by_track.values_mut() {
        track.sort_by(|a, b| a.onset.total_cmp(&b.onset));
        let mut onsets: Vec<f64> = track.iter().map(|n| n.onset).collect();
        onsets.dedup();
        for n in track.iter() {
            let next = onsets.partition_point(|&t| t <= n.onset);
            let Some(&next_onset) = onsets.get(next) else {
                continue;
            };
            let ioi = next_onset - n.onset;
            if ioi > MAX_IOI {
                continue;
            }
            sum += n.duration / ioi;
            count += 1;
        }
    }
    if count == 0 {
        return Err(FeatureError::EmptyCategory);
    }
    Ok(sum / count as f64)
}

fn mean_level(notes: &[MidiNote], cal: &CalibrationCurve) -> Option<f64> {
    if notes.is_empty() {
        return None;
    }
    Some(notes.iter().map(|n| note_sound_level(n, cal)).sum::<f64>() / notes.len() as f64)
}

/// The 21 per-song symbolic features. `None` marks an empty category.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[allow(missing_docs)]
pub struct MidiFeatureVector {
    pub ann_tempo: Option<f64>,
    pub nps_all: Option<f64>,
    pub nps_mel: Option<f64>,
    pub nps_acc: Option<f64>,
    pub nps_bas: Option<f64>,
    pub nps_dru: Option<f64>,
    pub nps_dru_tom: Option<f64>,
    pub nps_dru_rest: Option<f64>,
    pub sl_all: Option<f64>,
    pub sl_mel: Option<f64>,
    pub sl_acc: Option<f64>,
    pub sl_bas: Option<f64>,
    pub sl_dru: Option<f64>,
    pub f0_all: Option<f64>,
    pub f0_mel: Option<f64>,
    pub f0_acc: Option<f64>,
    pub f0_bas: Option<f64>,
    pub art_all: Option<f64>,
    pub art_mel: Option<f64>,
    pub art_acc: Option<f64>,
    pub art_bas: Option<f64>,
}

impl MidiFeatureVector {
    /// Column names in output order.
    pub const NAMES: [&'static str; 21] = [
        "ann_tempo",
        "nps_all",
        "nps_mel",
        "nps_acc",
        "nps_bas",
        "nps_dru",
        "nps_dru_tom",
        "nps_dru_rest",
        "sl_all",
        "sl_mel",
        "sl_acc",
        "sl_bas",
        "sl_dru",
        "f0_all",
        "f0_mel",
        "f0_acc",
        "f0_bas",
        "art_all",
        "art_mel",
        "art_acc",
        "art_bas",
    ];

    /// Values aligned with [`Self::NAMES`].
    pub fn values(&self) -> [Option<f64>; 21] {
        [
            self.ann_tempo,
            self.nps_all,
            self.nps_mel,
            self.nps_acc,
            self.nps_bas,
            self.nps_dru,
            self.nps_dru_tom,
            self.nps_dru_rest,
            self.sl_all,
            self.sl_mel,
            self.sl_acc,
            self.sl_bas,
            self.sl_dru,
            self.f0_all,
            self.f0_mel,
            self.f0_acc,
            self.f0_bas,
            self.art_all,
            self.art_mel,
            self.art_acc,
            self.art_bas,
        ]
    }

    /// Value by column name.
    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES
            .iter()
            .position(|&n| n == name)
            .and_then(|i| self.values()[i])
    }
}

/// Parameters of [`extract_midi_features`].
#[derive(Debug, Clone, PartialEq)]
pub struct MidiFeatureConfig {
    /// Onset merge window in seconds.
    pub merge_window: f64,
    /// Velocity/volume to dB mapping.
    pub calibration: CalibrationCurve,
    /// Tom/rest split of drum keys.
    pub percussion: PercussionTable,
}

impl Default for MidiFeatureConfig {
    fn default() -> Self {
        Self {
            merge_window: DEFAULT_MERGE_WINDOW,
            calibration: CalibrationCurve::default(),
            percussion: PercussionTable::default(),
        }
    }
}

/// Computes the feature vector of an annotated song.
///
/// Soft notes are gated once over the whole song. `nps_*` and `sl_*` of
/// `all` include every surviving note; `f0_all` and `art_all` leave out
/// drum notes, whose key numbers and durations carry no pitch or
/// articulation. `tempo` overrides [`Song::annotated_tempo`].
pub fn extract_midi_features(song: &Song, config: &MidiFeatureConfig, tempo: Option<f64>) -> MidiFeatureVector {
    let cal = &config.calibration;
    let notes = filter_soft_notes(&song.notes, cal);
    let of = |cat: TrackCategory| -> Vec<MidiNote> {
        notes.iter().filter(|n| song.category(n.track_id) == cat).copied().collect()
    };
    let pitched: Vec<MidiNote> = notes
        .iter()
        .filter(|n| song.category(n.track_id) != TrackCategory::Drums)
        .copied()
        .collect();
    let mel = of(TrackCategory::Melody);
    let acc = of(TrackCategory::Accompaniment);
    let bas = of(TrackCategory::Bass);
    let dru = of(TrackCategory::Drums);
    let (tom, rest): (Vec<MidiNote>, Vec<MidiNote>) = dru
        .iter()
        .partition(|n| config.percussion.classify(n.key) == PercussionClass::Tom);

    let nps = |set: &[MidiNote]| -> Option<f64> {
        if set.is_empty() {
            return None;
        }
        let onsets: Vec<f64> = set.iter().map(|n| n.onset).collect();
        note_density(&onsets, song.duration, config.merge_window).ok()
    };
    let sl = |set: &[MidiNote]| mean_level(set, cal);
    let f0 = |set: &[MidiNote]| mean_pitch(set).ok();
    let art = |set: &[MidiNote]| mean_articulation(set).ok();

    MidiFeatureVector {
        ann_tempo: tempo.or(song.annotated_tempo),
        nps_all: nps(&notes),
        nps_mel: nps(&mel),
        nps_acc: nps(&acc),
        nps_bas: nps(&bas),
        nps_dru: nps(&dru),
        nps_dru_tom: nps(&tom),
        nps_dru_rest: nps(&rest),
        sl_all: sl(&notes),
        sl_mel: sl(&mel),
        sl_acc: sl(&acc),
        sl_bas: sl(&bas),
        sl_dru: sl(&dru),
        f0_all: f0(&pitched),
        f0_mel: f0(&mel),
        f0_acc: f0(&acc),
        f0_bas: f0(&bas),
        art_all: art(&pitched),
        art_mel: art(&mel),
        art_acc: art(&acc),
        art_bas: art(&bas),
    }
}
