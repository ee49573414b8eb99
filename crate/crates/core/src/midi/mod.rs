//! Standard MIDI File ingestion into seconds-domain notes, plus per-track
//! instrument categories and the drum-key split.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

mod smf;
mod tempo;

pub use smf::{parse_smf, DEFAULT_VOLUME};
pub use tempo::{build_tempo_map, TempoMap, DEFAULT_US_PER_QUARTER};

/// MIDI channel index (zero-based) reserved for General MIDI percussion.
pub const PERCUSSION_CHANNEL: u8 = 9;

/// Errors raised while reading MIDI data or attaching annotations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MidiError {
    /// Missing `MThd` magic, short header or invalid header fields.
    #[error("malformed MThd header")]
    MalformedHeader,
    /// SMPTE time division.
    #[error("SMPTE time division is not supported")]
    UnsupportedDivision,
    /// A chunk or event runs past the end of the data.
    #[error("truncated chunk")]
    TruncatedChunk,
    /// Format 2 (or other non 0/1) files.
    #[error("unsupported SMF format {0}")]
    UnsupportedFormat(u16),
    /// Data byte without running status, or an unexpected status byte.
    #[error("malformed event at byte offset {offset}")]
    MalformedEvent {
        /// Byte offset into the file.
        offset: usize,
    },
    /// Tempo events out of tick order.
    #[error("tempo events not in tick order at tick {tick}")]
    NonMonotoneTempoEvents {
        /// Offending tick.
        tick: u64,
    },
    /// A Set Tempo event of zero microseconds per quarter.
    #[error("zero tempo at tick {tick}")]
    InvalidTempo {
        /// Offending tick.
        tick: u64,
    },
    /// An annotation names a track the song does not have.
    #[error("unknown track id {0}")]
    UnknownTrackId(usize),
}

/// One sounding note.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidiNote {
    /// Index of the `MTrk` chunk the note came from.
    pub track_id: usize,
    /// Zero-based channel, 0..=15.
    pub channel: u8,
    /// MIDI key number, 0..=127.
    pub key: u8,
    /// Onset in seconds.
    pub onset: f64,
    /// Duration in seconds, always > 0.
    pub duration: f64,
    /// Note-on velocity, 1..=127.
    pub velocity: u8,
    /// Controller 7 value in effect at the onset.
    pub volume_cc: u8,
}

impl MidiNote {
    /// Ordering used for [`Song::notes`]: onset, then track, then key.
    pub fn canonical_cmp(a: &Self, b: &Self) -> Ordering {
        a.onset
            .total_cmp(&b.onset)
            .then(a.track_id.cmp(&b.track_id))
            .then(a.key.cmp(&b.key))
            .then(a.channel.cmp(&b.channel))
            .then(a.duration.total_cmp(&b.duration))
            .then(a.velocity.cmp(&b.velocity))
            .then(a.volume_cc.cmp(&b.volume_cc))
    }

    /// Time the note stops sounding.
    pub fn end(&self) -> f64 {
        self.onset + self.duration
    }
}

/// Instrument role of a track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrackCategory {
    /// Lead melody.
    Melody,
    /// Harmonic accompaniment.
    Accompaniment,
    /// Bass line.
    Bass,
    /// Percussion.
    Drums,
    /// No annotation; counted only in whole-song aggregates.
    Unannotated,
}

impl TrackCategory {
    /// Lower-case name as used in sidecar files.
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Melody => "melody",
            Self::Accompaniment => "accompaniment",
            Self::Bass => "bass",
            Self::Drums => "drums",
            Self::Unannotated => "unannotated",
        }
    }
}

impl fmt::Display for TrackCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unrecognized category name.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown track category `{0}`")]
pub struct ParseCategoryError(pub String);

impl FromStr for TrackCategory {
    type Err = ParseCategoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "melody" => Ok(Self::Melody),
            "accompaniment" => Ok(Self::Accompaniment),
            "bass" => Ok(Self::Bass),
            "drums" => Ok(Self::Drums),
            _ => Err(ParseCategoryError(s.into())),
        }
    }
}

/// Split of drum sounds into toms (incl. snare and bass drum) and the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PercussionClass {
    /// Toms, snare, bass drum.
    Tom,
    /// Hi-hat, cymbals and everything else.
    Rest,
}

/// Key-number table deciding [`PercussionClass`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PercussionTable {
    tom: [bool; 128],
}

impl PercussionTable {
    /// General MIDI bass drums, snares and toms.
    pub const DEFAULT_TOM_KEYS: [u8; 10] = [35, 36, 38, 40, 41, 43, 45, 47, 48, 50];

    /// Table with the given keys classed as [`PercussionClass::Tom`].
    /// Keys above 127 are ignored.
    pub fn with_tom_keys(keys: impl IntoIterator<Item = u8>) -> Self {
        let mut tom = [false; 128];
        for k in keys {
            if let Some(slot) = tom.get_mut(k as usize) {
                *slot = true;
            }
        }
        Self { tom }
    }

    /// Classifies one key.
    pub fn classify(&self, key: u8) -> PercussionClass {
        if self.tom.get(key as usize).copied().unwrap_or(false) {
            PercussionClass::Tom
        } else {
            PercussionClass::Rest
        }
    }
}

impl Default for PercussionTable {
    fn default() -> Self {
        Self::with_tom_keys(Self::DEFAULT_TOM_KEYS)
    }
}

/// Classifies a percussion key with the default table.
pub fn classify_percussion_key(key: u8) -> PercussionClass {
    PercussionTable::default().classify(key)
}

/// A parsed song.
#[derive(Debug, Clone, PartialEq)]
pub struct Song {
    /// Identifier, usually the file stem.
    pub id: String,
    /// Notes in [`MidiNote::canonical_cmp`] order.
    pub notes: alloc::vec::Vec<MidiNote>,
    /// Seconds from the start to the latest end-of-track.
    pub duration: f64,
    /// Number of `MTrk` chunks.
    pub track_count: usize,
    /// Category of every track once annotated; empty before.
    pub annotations: BTreeMap<usize, TrackCategory>,
    /// Manually annotated tempo in beats per second.
    pub annotated_tempo: Option<f64>,
}

impl Song {
    /// Sets the song id.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Category of a track, [`TrackCategory::Unannotated`] if none.
    pub fn category(&self, track_id: usize) -> TrackCategory {
        self.annotations
            .get(&track_id)
            .copied()
            .unwrap_or(TrackCategory::Unannotated)
    }

    /// True when the track has notes and all of them are on the percussion channel.
    pub fn is_percussion_track(&self, track_id: usize) -> bool {
        let mut notes = self.notes.iter().filter(|n| n.track_id == track_id).peekable();
        notes.peek().is_some() && notes.all(|n| n.channel == PERCUSSION_CHANNEL)
    }
}

/// Attaches track categories.
///
/// Tracks missing from `annotations` become [`TrackCategory::Unannotated`],
/// except percussion-channel tracks which default to [`TrackCategory::Drums`].
pub fn annotate_tracks(mut song: Song, annotations: &BTreeMap<usize, TrackCategory>) -> Result<Song, MidiError> {
    if let Some((&bad, _)) = annotations.iter().find(|(&t, _)| t >= song.track_count) {
        return Err(MidiError::UnknownTrackId(bad));
    }
    let resolved = (0..song.track_count)
        .map(|t| {
            let cat = match annotations.get(&t) {
                Some(&c) => c,
                None if song.is_percussion_track(t) => TrackCategory::Drums,
                None => TrackCategory::Unannotated,
            };
            (t, cat)
        })
        .collect();
    song.annotations = resolved;
    Ok(song)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn note(track_id: usize, channel: u8, onset: f64) -> MidiNote {
        MidiNote {
            track_id,
            channel,
            key: 60,
            onset,
            duration: 0.5,
            velocity: 100,
            volume_cc: 100,
        }
    }

    fn two_track_song(ch1: u8) -> Song {
        Song {
            id: "s".into(),
            notes: vec![note(0, 0, 0.0), note(1, ch1, 0.5)],
            duration: 2.0,
            track_count: 2,
            annotations: BTreeMap::new(),
            annotated_tempo: None,
        }
    }

    #[test]
    fn percussion_defaults() {
        assert_eq!(classify_percussion_key(36), PercussionClass::Tom);
        assert_eq!(classify_percussion_key(42), PercussionClass::Rest);
        assert_eq!(classify_percussion_key(127), PercussionClass::Rest);
        for k in PercussionTable::DEFAULT_TOM_KEYS {
            assert_eq!(classify_percussion_key(k), PercussionClass::Tom);
        }
    }

    #[test]
    fn percussion_override() {
        let table = PercussionTable::with_tom_keys([42]);
        assert_eq!(table.classify(42), PercussionClass::Tom);
        assert_eq!(table.classify(36), PercussionClass::Rest);
    }

    #[test]
    fn annotate_labels_tracks() {
        let map = BTreeMap::from([(0, TrackCategory::Melody), (1, TrackCategory::Bass)]);
        let song = annotate_tracks(two_track_song(1), &map).unwrap();
        assert_eq!(song.category(0), TrackCategory::Melody);
        assert_eq!(song.category(1), TrackCategory::Bass);
    }

    #[test]
    fn channel_nine_defaults_to_drums() {
        let song = annotate_tracks(two_track_song(9), &BTreeMap::new()).unwrap();
        assert_eq!(song.category(0), TrackCategory::Unannotated);
        assert_eq!(song.category(1), TrackCategory::Drums);
    }

    #[test]
    fn unknown_track_rejected() {
        let map = BTreeMap::from([(7, TrackCategory::Melody)]);
        assert_eq!(
            annotate_tracks(two_track_song(1), &map).unwrap_err(),
            MidiError::UnknownTrackId(7)
        );
    }

    #[test]
    fn category_names_round_trip() {
        for c in [
            TrackCategory::Melody,
            TrackCategory::Accompaniment,
            TrackCategory::Bass,
            TrackCategory::Drums,
        ] {
            assert_eq!(c.as_str().parse::<TrackCategory>().unwrap(), c);
        }
        assert!("unannotated".parse::<TrackCategory>().is_err());
    }
}
