//! Comma-separated input and output files.
//!
//! All readers skip `#` comment lines, trim cells and report errors with
//! the 1-based line number of the offending row.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use percept_core::midi_features::CalibrationTable;
use percept_core::{RatingMatrix, TrackCategory};

use crate::error::{PerceptError, Result};

/// Track categories per song id, then per track index.
pub type Annotations = BTreeMap<String, BTreeMap<usize, TrackCategory>>;

fn read_records(path: &Path) -> Result<Vec<(u64, csv::StringRecord)>> {
    let bytes = std::fs::read(path).map_err(|e| PerceptError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            PerceptError::schema(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        out.push((line, record));
    }
    Ok(out)
}

fn expect_fields(path: &Path, line: u64, record: &csv::StringRecord, n: usize) -> Result<()> {
    if record.len() != n {
        return Err(PerceptError::schema(path, line, format!("expected {n} fields, found {}", record.len())));
    }
    Ok(())
}

fn parse_number(path: &Path, line: u64, cell: &str) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(PerceptError::schema(path, line, format!("`{cell}` is not a finite number"))),
    }
}

fn parse_required<T: std::str::FromStr>(path: &Path, line: u64, cell: &str, what: &str) -> Result<T> {
    cell.parse()
        .map_err(|_| PerceptError::schema(path, line, format!("`{cell}` is not a valid {what}")))
}

/// True when the first row is a header whose first cell names the key column.
fn is_header(record: &csv::StringRecord, key: &str) -> bool {
    record.get(0).is_some_and(|c| c.eq_ignore_ascii_case(key))
}

/// Reads an items x raters ratings file: a header of `item_id` followed by
/// rater ids, then one row per item. Empty cells are missing ratings.
pub fn load_ratings(path: &Path, scale: (f64, f64)) -> Result<RatingMatrix> {
    let records = read_records(path)?;
    let Some((header_line, header)) = records.first() else {
        return Err(PerceptError::schema(path, 1, "empty file"));
    };
    let width = header.len();
    let rater_ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if rater_ids.len() < 2 {
        return Err(PerceptError::schema(path, *header_line, "need an item id column and at least 2 rater columns"));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = rater_ids.iter().find(|r| !seen.insert(r.as_str())) {
        return Err(PerceptError::schema(path, *header_line, format!("duplicate rater id `{dup}`")));
    }
    let mut item_ids = Vec::new();
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (line, record) in &records[1..] {
        expect_fields(path, *line, record, width)?;
        let id = record[0].to_owned();
        if id.is_empty() || !seen.insert(id.clone()) {
            return Err(PerceptError::schema(path, *line, format!("missing or duplicate item id `{id}`")));
        }
        let mut row = Vec::with_capacity(width - 1);
        for cell in record.iter().skip(1) {
            let v = parse_number(path, *line, cell)?;
            if let Some(x) = v {
                if x < scale.0 || x > scale.1 {
                    return Err(PerceptError::OutOfScale {
                        path: path.into(),
                        line: *line,
                        value: x,
                        min: scale.0,
                        max: scale.1,
                    });
                }
            }
            row.push(v);
        }
        item_ids.push(id);
        rows.push(row);
    }
    RatingMatrix::new(item_ids, rater_ids, rows, scale).map_err(|source| PerceptError::Stats {
        context: path.display().to_string(),
        source,
    })
}

/// Reads `song_id,track_id,category` rows; a leading header row is optional.
pub fn read_annotations(path: &Path) -> Result<Annotations> {
    let mut out = Annotations::new();
    for (i, (line, record)) in read_records(path)?.iter().enumerate() {
        if i == 0 && is_header(record, "song_id") {
            continue;
        }
        expect_fields(path, *line, record, 3)?;
        let track: usize = parse_required(path, *line, &record[1], "track id")?;
        let category: TrackCategory = parse_required(path, *line, &record[2], "track category")?;
        let tracks = out.entry(record[0].to_owned()).or_default();
        if tracks.insert(track, category).is_some_and(|c| c != category) {
            return Err(PerceptError::schema(path, *line, format!("conflicting category for track {track}")));
        }
    }
    Ok(out)
}

/// Reads `song_id,beats_per_second` rows; a leading header row is optional.
pub fn read_tempo(path: &Path) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (i, (line, record)) in read_records(path)?.iter().enumerate() {
        if i == 0 && is_header(record, "song_id") {
            continue;
        }
        expect_fields(path, *line, record, 2)?;
        let bps: f64 = parse_required(path, *line, &record[1], "tempo")?;
        if !(bps.is_finite() && bps > 0.0) {
            return Err(PerceptError::schema(path, *line, "tempo must be positive"));
        }
        if out.insert(record[0].to_owned(), bps).is_some() {
            return Err(PerceptError::schema(path, *line, format!("duplicate song id `{}`", &record[0])));
        }
    }
    Ok(out)
}

/// Reads a `velocity,volume,dB` grid; a leading header row is optional.
pub fn read_calibration(path: &Path) -> Result<CalibrationTable> {
    let mut points = Vec::new();
    for (i, (line, record)) in read_records(path)?.iter().enumerate() {
        if i == 0 && is_header(record, "velocity") {
            continue;
        }
        expect_fields(path, *line, record, 3)?;
        let velocity: u8 = parse_required(path, *line, &record[0], "velocity")?;
        let volume: u8 = parse_required(path, *line, &record[1], "volume")?;
        let db: f64 = parse_required(path, *line, &record[2], "level")?;
        if velocity > 127 || volume > 127 || !db.is_finite() {
            return Err(PerceptError::schema(path, *line, "velocity and volume must be 0-127, level finite"));
        }
        points.push((velocity, volume, db));
    }
    CalibrationTable::new(&points).map_err(|source| PerceptError::Feature {
        context: path.display().to_string(),
        source,
    })
}

/// Shortest text that reads back as the same `f64`, switching to
/// exponent notation for very small or large magnitudes.
pub fn full_precision(v: f64) -> String {
    format!("{v:?}")
}

/// Named numeric columns keyed by an item id; `None` is an empty cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    /// Header of the id column.
    pub id_column: String,
    /// Value column names.
    pub columns: Vec<String>,
    /// Item ids in row order.
    pub ids: Vec<String>,
    /// One row per id, aligned with `columns`.
    pub rows: Vec<Vec<Option<f64>>>,
}

impl FeatureTable {
    /// Empty table with the given header.
    pub fn new(id_column: impl Into<String>, columns: Vec<String>) -> Self {
        Self {
            id_column: id_column.into(),
            columns,
            ids: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Appends a row.
    pub fn push(&mut self, id: impl Into<String>, values: Vec<Option<f64>>) {
        assert_eq!(values.len(), self.columns.len(), "row width");
        self.ids.push(id.into());
        self.rows.push(values);
    }

    /// Reads a table whose first column holds unique item ids.
    pub fn read(path: &Path) -> Result<Self> {
        let records = read_records(path)?;
        let Some((header_line, header)) = records.first() else {
            return Err(PerceptError::schema(path, 1, "empty file"));
        };
        if header.len() < 2 {
            return Err(PerceptError::schema(path, *header_line, "need an id column and at least one value column"));
        }
        let columns: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut seen = HashSet::new();
        if let Some(dup) = columns.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(PerceptError::schema(path, *header_line, format!("duplicate column `{dup}`")));
        }
        let mut table = Self::new(&header[0], columns);
        let mut seen = HashSet::new();
        for (line, record) in &records[1..] {
            expect_fields(path, *line, record, header.len())?;
            let id = record[0].to_owned();
            if id.is_empty() || !seen.insert(id.clone()) {
                return Err(PerceptError::schema(path, *line, format!("missing or duplicate id `{id}`")));
            }
            let values = record
                .iter()
                .skip(1)
                .map(|c| parse_number(path, *line, c))
                .collect::<Result<Vec<_>>>()?;
            table.push(id, values);
        }
        Ok(table)
    }

    /// CSV text with full-precision numbers and empty missing cells.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once(self.id_column.as_str()).chain(self.columns.iter().map(String::as_str));
        w.write_record(header).expect("in-memory write");
        for (id, row) in self.ids.iter().zip(&self.rows) {
            let cells = std::iter::once(id.clone()).chain(row.iter().map(|v| v.map(full_precision).unwrap_or_default()));
            w.write_record(cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// Values of one column, if present.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Inner join on item id, keeping this table's row order.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if let Some(dup) = other.columns.iter().find(|c| self.columns.contains(c)) {
            return Err(PerceptError::Data(format!("column `{dup}` appears in more than one table")));
        }
        let index: BTreeMap<&str, usize> = other.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        let mut out = Self::new(self.id_column.clone(), columns);
        for (id, row) in self.ids.iter().zip(&self.rows) {
            if let Some(&i) = index.get(id.as_str()) {
                let mut values = row.clone();
                values.extend_from_slice(&other.rows[i]);
                out.push(id.clone(), values);
            }
        }
        Ok(out)
    }

    /// Rows restricted to the named columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<Vec<Vec<Option<f64>>>> {
        let idx = names
            .iter()
            .map(|n| {
                self.columns
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| PerceptError::Usage(format!("unknown column `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect())
    }
}
