mod common;

use std::collections::BTreeMap;

use common::smf::{smf, Track};
use percept_core::midi::{annotate_tracks, parse_smf, MidiNote, Song, TrackCategory, PERCUSSION_CHANNEL};
use percept_core::midi_features::{
    extract_midi_features, mean_articulation, note_density, CalibrationCurve, CalibrationTable, FeatureError,
    MidiFeatureConfig, MidiFeatureVector,
};
use proptest::prelude::*;

// 500 ticks per quarter at the default 500 000 us/quarter: one tick per millisecond
const TPQ: u16 = 500;

fn song(tracks: &[Vec<u8>], map: &[(usize, TrackCategory)]) -> Song {
    let parsed = parse_smf(&smf(1, TPQ, tracks)).unwrap();
    annotate_tracks(parsed, &map.iter().copied().collect()).unwrap()
}

fn absent(v: &MidiFeatureVector, names: &[&str]) {
    for name in names {
        assert_eq!(v.get(name), None, "{name} should be absent");
    }
}

#[test]
fn note_density_clusters_coincident_onsets() {
    let melody = Track::new()
        .on(0, 0, 60, 100)
        .on(30, 0, 64, 100)
        .off(100, 0, 60)
        .off(130, 0, 64)
        .note(1000, 1100, 0, 67, 100)
        .note(2000, 2100, 0, 72, 100)
        .end(10_000);
    let s = song(&[melody], &[(0, TrackCategory::Melody)]);
    assert_eq!(s.notes.iter().map(|n| n.onset).collect::<Vec<_>>(), vec![0.0, 0.03, 1.0, 2.0]);
    assert_eq!(s.duration, 10.0);
    let v = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
    assert_eq!(v.nps_mel, Some(0.3));
    assert_eq!(v.nps_all, Some(0.3));
    assert_eq!(v.f0_mel, Some(65.75));
    let expected_sl = 2.0 * 20.0 * (100.0f64 / 127.0).log10();
    assert!((v.sl_mel.unwrap() - expected_sl).abs() < 1e-12);
}

#[test]
fn articulation_ratio_mean() {
    let melody = Track::new()
        .note(0, 250, 0, 60, 100)
        .note(500, 1000, 0, 62, 100)
        .note(1000, 1200, 0, 64, 100)
        .end(2000);
    let s = song(&[melody], &[(0, TrackCategory::Melody)]);
    let v = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
    assert_eq!(v.art_mel, Some(0.75));
    assert_eq!(v.art_all, Some(0.75));
    assert_eq!(v.f0_mel, Some(62.0));
    assert_eq!(v.nps_mel, Some(1.5));
}

#[test]
fn articulation_long_gap_is_excluded() {
    let melody = Track::new().note(0, 400, 0, 60, 100).note(1000, 1100, 0, 62, 100).end(2000);
    let s = song(&[melody], &[(0, TrackCategory::Melody)]);
    assert_eq!(mean_articulation(&s.notes), Err(FeatureError::EmptyCategory));
    let v = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
    assert_eq!(v.art_mel, None);
    assert_eq!(v.nps_mel, Some(1.0));
}

#[test]
fn soft_note_gate() {
    // levels by velocity: 127 -> 0 dB, 20 -> -19, 15 -> -20, 10 -> -21
    let table = CalibrationTable::new(&[(10, 100, -21.0), (15, 100, -20.0), (20, 100, -19.0), (127, 100, 0.0)]).unwrap();
    let config = MidiFeatureConfig {
        calibration: CalibrationCurve::Table(table),
        ..MidiFeatureConfig::default()
    };
    let melody = Track::new()
        .note(0, 100, 0, 60, 127)
        .note(200, 300, 0, 62, 20)
        .note(400, 500, 0, 64, 15)
        .note(600, 700, 0, 65, 10)
        .end(1000);
    let s = song(&[melody], &[(0, TrackCategory::Melody)]);
    let v = extract_midi_features(&s, &config, None);
    assert_eq!(v.sl_mel, Some(-9.5));
    assert_eq!(v.sl_all, Some(-9.5));
    assert_eq!(v.f0_mel, Some(61.0));
    assert_eq!(v.nps_mel, Some(2.0));
    // IOI from 0.2 s runs to the next surviving onset
    assert_eq!(v.art_mel, Some(0.5));
}

#[test]
fn melody_plus_drums() {
    let melody = Track::new()
        .note(500, 1500, 0, 72, 100)
        .note(3500, 4500, 0, 74, 100)
        .note(6500, 7500, 0, 76, 100)
        .end(10_000);
    let mut drums = Track::new();
    for beat in 0..10 {
        drums = drums.note(beat * 1000, beat * 1000 + 100, PERCUSSION_CHANNEL, 36, 100);
    }
    let s = song(&[melody, drums.end(10_000)], &[(0, TrackCategory::Melody)]);
    assert_eq!(s.category(1), TrackCategory::Drums);
    let v = extract_midi_features(&s, &MidiFeatureConfig::default(), Some(2.0));
    assert_eq!(v.nps_dru, Some(1.0));
    assert_eq!(v.nps_dru_tom, Some(1.0));
    assert_eq!(v.nps_dru_rest, None);
    assert_eq!(v.nps_mel, Some(0.3));
    assert_eq!(v.nps_all, Some(1.3));
    assert_eq!(v.f0_mel, Some(74.0));
    assert_eq!(v.f0_all, Some(74.0));
    assert_eq!(v.ann_tempo, Some(2.0));
    assert!(v.sl_dru.is_some() && v.sl_all.is_some());
    absent(&v, &["nps_acc", "nps_bas", "sl_acc", "sl_bas", "f0_acc", "f0_bas", "art_acc", "art_bas"]);
}

#[test]
fn melody_only_song() {
    let melody = Track::new().note(0, 400, 0, 60, 90).note(500, 900, 0, 67, 90).end(4000);
    let s = song(&[melody], &[(0, TrackCategory::Melody)]);
    let v = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
    assert_eq!(v.nps_all, v.nps_mel);
    assert_eq!(v.nps_all, Some(0.5));
    absent(
        &v,
        &[
            "ann_tempo", "nps_acc", "nps_bas", "nps_dru", "nps_dru_tom", "nps_dru_rest", "sl_acc", "sl_bas", "sl_dru",
            "f0_acc", "f0_bas", "art_acc", "art_bas",
        ],
    );
}

#[test]
fn empty_song_is_all_absent() {
    let s = song(&[Track::new().end(1000)], &[]);
    let v = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
    assert!(v.values().iter().all(Option::is_none));
}

#[test]
fn unannotated_tracks_count_in_all_only() {
    let melody = Track::new().note(0, 100, 0, 60, 100).end(1000);
    let other = Track::new().note(500, 600, 1, 48, 100).end(1000);
    let s = song(&[melody, other], &[(0, TrackCategory::Melody)]);
    let v = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
    assert_eq!(v.nps_mel, Some(1.0));
    assert_eq!(v.nps_all, Some(2.0));
    assert_eq!(v.f0_all, Some(54.0));
}

#[test]
fn density_examples() {
    assert_eq!(note_density(&[0.0, 0.04, 0.08], 1.0, 0.05), Ok(2.0));
    assert_eq!(note_density(&[], 5.0, 0.05), Ok(0.0));
    assert_eq!(note_density(&[0.0], 0.0, 0.05), Err(FeatureError::NonPositiveDuration(0.0)));
}

fn arb_song() -> impl Strategy<Value = Song> {
    let arb_note = (0usize..4, 0.0f64..9.0, 0.01f64..1.0, 30u8..90, 20u8..64, 60u8..128);
    prop::collection::vec(arb_note, 1..40).prop_map(|raw| {
        let mut notes: Vec<MidiNote> = raw
            .into_iter()
            .map(|(track_id, onset, duration, key, velocity, volume_cc)| MidiNote {
                track_id,
                channel: if track_id == 3 { PERCUSSION_CHANNEL } else { track_id as u8 },
                key,
                onset,
                duration,
                velocity,
                volume_cc,
            })
            .collect();
        notes.sort_by(MidiNote::canonical_cmp);
        let s = Song {
            id: "p".into(),
            notes,
            duration: 10.0,
            track_count: 4,
            annotations: BTreeMap::new(),
            annotated_tempo: None,
        };
        let map = BTreeMap::from([
            (0, TrackCategory::Melody),
            (1, TrackCategory::Accompaniment),
            (2, TrackCategory::Bass),
        ]);
        annotate_tracks(s, &map).unwrap()
    })
}

fn nps_fields(v: &MidiFeatureVector) -> Vec<Option<f64>> {
    MidiFeatureVector::NAMES
        .iter()
        .filter(|n| n.starts_with("nps"))
        .map(|n| v.get(n))
        .collect()
}

proptest! {
    #[test]
    fn zero_window_never_lowers_density(s in arb_song()) {
        let base = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
        let fine = extract_midi_features(&s, &MidiFeatureConfig { merge_window: 0.0, ..MidiFeatureConfig::default() }, None);
        for (a, b) in nps_fields(&base).into_iter().zip(nps_fields(&fine)) {
            prop_assert_eq!(a.is_some(), b.is_some());
            if let (Some(a), Some(b)) = (a, b) {
                prop_assert!(b >= a);
            }
        }
    }

    #[test]
    fn duplicates_near_anchor_do_not_change_density(s in arb_song(), offset in 0.0f64..0.049) {
        let base = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
        // the earliest note anchors the first cluster of every set it belongs to
        let first = s.notes[0];
        let mut more = s.clone();
        more.notes.push(MidiNote { onset: first.onset + offset, ..first });
        more.notes.sort_by(MidiNote::canonical_cmp);
        let v = extract_midi_features(&more, &MidiFeatureConfig::default(), None);
        prop_assert_eq!(nps_fields(&base), nps_fields(&v));
    }

    #[test]
    fn shifting_inside_duration_keeps_density(s in arb_song(), shift in 0.0f64..0.9) {
        let base = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
        let mut moved = s.clone();
        for n in &mut moved.notes {
            n.onset += shift;
        }
        let v = extract_midi_features(&moved, &MidiFeatureConfig::default(), None);
        prop_assert_eq!(nps_fields(&base), nps_fields(&v));
    }

    #[test]
    fn sound_levels_bounded(s in arb_song()) {
        let v = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
        let cats: Vec<f64> = [v.sl_mel, v.sl_acc, v.sl_bas, v.sl_dru].into_iter().flatten().collect();
        let all = v.sl_all.unwrap();
        prop_assert!(all <= 0.0);
        prop_assert!(cats.iter().all(|&c| c <= 0.0));
        let lo = cats.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(all >= lo - 1e-9 && all <= hi + 1e-9);
        for f in [v.f0_all, v.f0_mel, v.f0_acc, v.f0_bas].into_iter().flatten() {
            prop_assert!((0.0..=127.0).contains(&f));
        }
        for a in [v.art_all, v.art_mel, v.art_acc, v.art_bas].into_iter().flatten() {
            prop_assert!(a >= 0.0);
        }
    }

    #[test]
    fn legato_track_has_unit_articulation(iois in prop::collection::vec(0.05f64..0.8, 2..20)) {
        let mut onset = 0.0;
        let notes: Vec<MidiNote> = iois
            .iter()
            .map(|&d| {
                let n = MidiNote { track_id: 0, channel: 0, key: 60, onset, duration: d, velocity: 100, volume_cc: 100 };
                onset += d;
                n
            })
            .collect();
        let a = mean_articulation(&notes).unwrap();
        prop_assert!((a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn louder_velocities_shift_levels_only(s in arb_song()) {
        let base = extract_midi_features(&s, &MidiFeatureConfig::default(), None);
        let mut loud = s.clone();
        for n in &mut loud.notes {
            n.velocity *= 2;
        }
        let v = extract_midi_features(&loud, &MidiFeatureConfig::default(), None);
        let shift = 20.0 * 2f64.log10();
        for (name, (a, b)) in MidiFeatureVector::NAMES.iter().zip(base.values().into_iter().zip(v.values())) {
            if name.starts_with("sl") {
                if let (Some(a), Some(b)) = (a, b) {
                    prop_assert!((b - a - shift).abs() < 1e-9, "{}", name);
                }
            } else {
                prop_assert_eq!(a, b, "{}", name);
            }
        }
    }
}
