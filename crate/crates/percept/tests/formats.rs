use std::path::{Path, PathBuf};

use percept::formats::{read_annotations, read_calibration, read_tempo};
use percept::{load_ratings, FeatureTable, PerceptError};
use percept_core::TrackCategory;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SCALE: (f64, f64) = (1.0, 9.0);

#[test]
fn two_by_two_ratings() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "r.csv", "item_id,a,b\ns1,1,2\ns2,2,3\n");
    let m = load_ratings(&p, SCALE).unwrap();
    assert_eq!(m.item_ids(), ["s1", "s2"]);
    assert_eq!(m.rater_ids(), ["a", "b"]);
    assert_eq!((m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)), (Some(1.0), Some(2.0), Some(2.0), Some(3.0)));
}

#[test]
fn empty_cell_is_missing() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "r.csv", "item_id,a,b,c\ns1,5,,7\ns2,2,3,4\n");
    let m = load_ratings(&p, SCALE).unwrap();
    assert_eq!(m.get(0, 1), None);
    assert_eq!(m.get(0, 2), Some(7.0));
}

#[test]
fn ragged_row_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "r.csv", "item_id,a,b\ns1,1,2\ns2,2\n");
    match load_ratings(&p, SCALE) {
        Err(PerceptError::Schema { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn out_of_scale_and_custom_scale() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "r.csv", "item_id,a,b\ns1,1,10\ns2,2,3\n");
    match load_ratings(&p, SCALE) {
        Err(PerceptError::OutOfScale { line, value, .. }) => assert_eq!((line, value), (2, 10.0)),
        other => panic!("{other:?}"),
    }
    assert!(load_ratings(&p, (0.0, 10.0)).is_ok());
}

#[test]
fn malformed_ratings() {
    let dir = tempfile::tempdir().unwrap();
    for (text, line) in [
        ("item_id,a,b\ns1,1,x\n", 2),
        ("item_id,a\ns1,1\n", 1),
        ("item_id,a,a\ns1,1,2\n", 1),
        ("item_id,a,b\ns1,1,2\ns1,2,3\n", 3),
    ] {
        let p = write(dir.path(), "r.csv", text);
        match load_ratings(&p, SCALE) {
            Err(PerceptError::Schema { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    let missing = dir.path().join("none.csv");
    assert!(matches!(load_ratings(&missing, SCALE), Err(PerceptError::Io { .. })));
}

#[test]
fn annotation_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "a.csv",
        "song_id,track_id,category\n# comment\nsong1,1,melody\nsong1,2,Drums\nsong2,0,bass\n",
    );
    let a = read_annotations(&p).unwrap();
    assert_eq!(a["song1"][&1], TrackCategory::Melody);
    assert_eq!(a["song1"][&2], TrackCategory::Drums);
    assert_eq!(a["song2"][&0], TrackCategory::Bass);

    let bad = write(dir.path(), "b.csv", "song1,1,vocals\n");
    assert!(matches!(read_annotations(&bad), Err(PerceptError::Schema { line: 1, .. })));
    let conflict = write(dir.path(), "c.csv", "song1,1,melody\nsong1,1,bass\n");
    assert!(matches!(read_annotations(&conflict), Err(PerceptError::Schema { line: 2, .. })));
}

#[test]
fn tempo_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.csv", "song_id,beats_per_second\nsong1,2.0\nsong2,1.5\n");
    let t = read_tempo(&p).unwrap();
    assert_eq!(t["song1"], 2.0);
    assert_eq!(t["song2"], 1.5);
    let bad = write(dir.path(), "u.csv", "song1,0\n");
    assert!(matches!(read_tempo(&bad), Err(PerceptError::Schema { .. })));
}

#[test]
fn calibration_grid() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "c.csv",
        "velocity,volume,dB\n10,100,-21\n15,100,-20\n20,100,-19\n127,100,0\n",
    );
    let t = read_calibration(&p).unwrap();
    assert_eq!(t.level(15, 100), -20.0);
    assert_eq!(t.level(12, 100), -20.6);
    let holes = write(dir.path(), "d.csv", "10,100,-21\n20,90,-19\n");
    assert!(matches!(read_calibration(&holes), Err(PerceptError::Feature { .. })));
}

#[test]
fn feature_table_round_trip_and_join() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = FeatureTable::new("song_id", vec!["nps_all".into(), "sl_all".into()]);
    t.push("s1", vec![Some(0.1 + 0.2), None]);
    t.push("s2", vec![Some(-1e-300), Some(3.0)]);
    let text = t.to_csv();
    assert!(text.starts_with("song_id,nps_all,sl_all\ns1,0.30000000000000004,\n"));
    let p = write(dir.path(), "f.csv", &text);
    assert_eq!(FeatureTable::read(&p).unwrap(), t);

    let mut other = FeatureTable::new("item_id", vec!["speed".into()]);
    other.push("s2", vec![Some(5.0)]);
    other.push("s3", vec![Some(6.0)]);
    let j = t.join(&other).unwrap();
    assert_eq!(j.ids, ["s2"]);
    assert_eq!(j.columns, ["nps_all", "sl_all", "speed"]);
    assert_eq!(j.rows[0], vec![Some(-1e-300), Some(3.0), Some(5.0)]);
    assert!(t.join(&t).is_err());
    assert_eq!(j.select(&["speed".into(), "nps_all".into()]).unwrap(), vec![vec![Some(5.0), Some(-1e-300)]]);
    assert_eq!(j.select(&["nope".into()]).unwrap_err().exit_code(), 2);
}
