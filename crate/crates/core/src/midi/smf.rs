//! Standard MIDI File reader (format 0/1, metrical division).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::tempo::TempoMap;
use super::{MidiError, MidiNote, Song};

/// Controller 7 value assumed before any channel volume message.
pub const DEFAULT_VOLUME: u8 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    NoteOn { channel: u8, key: u8, velocity: u8 },
    NoteOff { channel: u8, key: u8 },
    Volume { channel: u8, value: u8 },
    Tempo(u32),
}

#[derive(Debug, Clone, Copy)]
struct TimedEvent {
    tick: u64,
    track: usize,
    kind: EventKind,
}

struct Track {
    events: Vec<TimedEvent>,
    end_tick: u64,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn u8(&mut self) -> Result<u8, MidiError> {
        let b = *self.bytes.get(self.pos).ok_or(MidiError::TruncatedChunk)?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], MidiError> {
        if self.remaining() < n {
            return Err(MidiError::TruncatedChunk);
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, MidiError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    /// Variable-length quantity, at most four bytes.
    fn vlq(&mut self) -> Result<u32, MidiError> {
        let mut value = 0u32;
        for _ in 0..4 {
            let b = self.u8()?;
            value = (value << 7) | u32::from(b & 0x7f);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::MalformedEvent { offset: self.pos })
    }
}

/// Parses a Standard MIDI File into a seconds-domain [`Song`].
///
/// All tracks are merged through one tempo map. Note-on with velocity 0
/// closes a note, overlapping same-key notes on one channel are matched
/// last-in first-out, and notes still sounding at end-of-track are closed
/// there. Zero-length notes are dropped.
pub fn parse_smf(bytes: &[u8]) -> Result<Song, MidiError> {
    let mut r = Reader::new(bytes);
    if r.remaining() < 8 || r.take(4)? != b"MThd" {
        return Err(MidiError::MalformedHeader);
    }
    let header_len = r.u32()? as usize;
    if header_len < 6 {
        return Err(MidiError::MalformedHeader);
    }
    let header = r.take(header_len)?;
    let format = u16::from_be_bytes([header[0], header[1]]);
    let division = u16::from_be_bytes([header[4], header[5]]);
    match format {
        0 | 1 => {}
        2 => return Err(MidiError::UnsupportedFormat(format)),
        _ => return Err(MidiError::MalformedHeader),
    }
    if division & 0x8000 != 0 {
        return Err(MidiError::UnsupportedDivision);
    }
    if division == 0 {
        return Err(MidiError::MalformedHeader);
    }

    let mut tracks = Vec::new();
    while r.remaining() > 0 {
        if r.remaining() < 8 {
            return Err(MidiError::TruncatedChunk);
        }
        let id = r.take(4)?;
        let len = r.u32()? as usize;
        let body = r.take(len)?;
        let chunk_start = r.pos - len;
        if id == b"MTrk" {
            let index = tracks.len();
            tracks.push(parse_track(body, index, chunk_start)?);
        }
    }

    notes_from_tracks(&tracks, division)
}

fn parse_track(body: &[u8], index: usize, base: usize) -> Result<Track, MidiError> {
    let mut r = Reader::new(body);
    let mut tick = 0u64;
    let mut running: Option<u8> = None;
    let mut events = Vec::new();

    while r.remaining() > 0 {
        tick += u64::from(r.vlq()?);
        let first = r.u8()?;
        let status = if first & 0x80 != 0 {
            first
        } else {
            // data byte: reuse running status and put the byte back
            r.pos -= 1;
            running.ok_or(MidiError::MalformedEvent { offset: base + r.pos })?
        };
        match status {
            0x80..=0xEF => {
                running = Some(status);
                let channel = status & 0x0f;
                let kind = status & 0xf0;
                let d1 = r.u8()? & 0x7f;
                let d2 = if kind == 0xC0 || kind == 0xD0 { 0 } else { r.u8()? & 0x7f };
                let event = match kind {
                    0x90 if d2 > 0 => Some(EventKind::NoteOn {
                        channel,
                        key: d1,
                        velocity: d2,
                    }),
                    0x90 | 0x80 => Some(EventKind::NoteOff { channel, key: d1 }),
                    0xB0 if d1 == 7 => Some(EventKind::Volume { channel, value: d2 }),
                    _ => None,
                };
                if let Some(kind) = event {
                    events.push(TimedEvent { tick, track: index, kind });
                }
            }
            0xF0 | 0xF7 => {
                running = None;
                let len = r.vlq()? as usize;
                r.take(len)?;
            }
            0xFF => {
                running = None;
                let meta = r.u8()?;
                let len = r.vlq()? as usize;
                let data = r.take(len)?;
                match meta {
                    0x2F => return Ok(Track { events, end_tick: tick }),
                    0x51 if len == 3 => {
                        let us = (u32::from(data[0]) << 16) | (u32::from(data[1]) << 8) | u32::from(data[2]);
                        events.push(TimedEvent {
                            tick,
                            track: index,
                            kind: EventKind::Tempo(us),
                        });
                    }
                    _ => {}
                }
            }
            _ => return Err(MidiError::MalformedEvent { offset: base + r.pos - 1 }),
        }
    }
    // no end-of-track meta event: the last event time ends the track
    Ok(Track { events, end_tick: tick })
}

struct Sounding {
    tick: u64,
    velocity: u8,
    volume: u8,
}

fn notes_from_tracks(tracks: &[Track], division: u16) -> Result<Song, MidiError> {
    let mut merged: Vec<TimedEvent> = tracks.iter().flat_map(|t| t.events.iter().copied()).collect();
    // stable: keeps per-track order for equal (tick, track)
    merged.sort_by_key(|e| (e.tick, e.track));

    let tempo_events: Vec<(u64, u32)> = merged
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::Tempo(us) => Some((e.tick, us)),
            _ => None,
        })
        .collect();
    let map = TempoMap::new(division, &tempo_events)?;

    let mut volume = [DEFAULT_VOLUME; 16];
    let mut sounding: BTreeMap<(usize, u8, u8), Vec<Sounding>> = BTreeMap::new();
    let mut spans: Vec<(usize, u8, u8, Sounding, u64)> = Vec::new();

    for e in &merged {
        match e.kind {
            EventKind::NoteOn { channel, key, velocity } => {
                sounding.entry((e.track, channel, key)).or_default().push(Sounding {
                    tick: e.tick,
                    velocity,
                    volume: volume[channel as usize],
                });
            }
            EventKind::NoteOff { channel, key } => {
                if let Some(start) = sounding.get_mut(&(e.track, channel, key)).and_then(Vec::pop) {
                    spans.push((e.track, channel, key, start, e.tick));
                }
            }
            EventKind::Volume { channel, value } => volume[channel as usize] = value,
            EventKind::Tempo(_) => {}
        }
    }
    for ((track, channel, key), stack) in sounding {
        let end = tracks[track].end_tick;
        for start in stack {
            spans.push((track, channel, key, start, end));
        }
    }

    let mut notes: Vec<MidiNote> = spans
        .into_iter()
        .filter(|(_, _, _, start, end)| *end > start.tick)
        .map(|(track, channel, key, start, end)| {
            let onset = map.seconds(start.tick);
            MidiNote {
                track_id: track,
                channel,
                key,
                onset,
                duration: map.seconds(end) - onset,
                velocity: start.velocity,
                volume_cc: start.volume,
            }
        })
        .collect();
    notes.sort_by(MidiNote::canonical_cmp);

    let end_tick = tracks.iter().map(|t| t.end_tick).max().unwrap_or(0);
    let duration = notes
        .iter()
        .map(|n| n.onset + n.duration)
        .fold(map.seconds(end_tick), f64::max);

    Ok(Song {
        id: String::new(),
        notes,
        duration,
        track_count: tracks.len(),
        annotations: BTreeMap::new(),
        annotated_tempo: None,
    })
}
