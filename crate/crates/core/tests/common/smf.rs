//! Byte-level Standard MIDI File writer for fixtures.
#![allow(dead_code)]

pub fn vlq(mut v: u32) -> Vec<u8> {
    let mut out = vec![(v & 0x7f) as u8];
    v >>= 7;
    while v > 0 {
        out.push(0x80 | (v & 0x7f) as u8);
        v >>= 7;
    }
    out.reverse();
    out
}

/// Events must be added in non-decreasing tick order.
#[derive(Default, Clone)]
pub struct Track {
    bytes: Vec<u8>,
    tick: u32,
}

impl Track {
    pub fn new() -> Self {
        Self::default()
    }

    /// Raw event bytes after the delta time; no status check, so running
    /// status can be written by omitting the status byte.
    pub fn raw(mut self, tick: u32, data: &[u8]) -> Self {
        assert!(tick >= self.tick, "events out of order");
        self.bytes.extend(vlq(tick - self.tick));
        self.bytes.extend_from_slice(data);
        self.tick = tick;
        self
    }

    pub fn on(self, tick: u32, ch: u8, key: u8, vel: u8) -> Self {
        self.raw(tick, &[0x90 | ch, key, vel])
    }

    pub fn off(self, tick: u32, ch: u8, key: u8) -> Self {
        self.raw(tick, &[0x80 | ch, key, 0x40])
    }

    pub fn note(self, start: u32, end: u32, ch: u8, key: u8, vel: u8) -> Self {
        self.on(start, ch, key, vel).off(end, ch, key)
    }

    pub fn cc(self, tick: u32, ch: u8, controller: u8, value: u8) -> Self {
        self.raw(tick, &[0xB0 | ch, controller, value])
    }

    pub fn tempo(self, tick: u32, us_per_quarter: u32) -> Self {
        let b = us_per_quarter.to_be_bytes();
        self.raw(tick, &[0xFF, 0x51, 0x03, b[1], b[2], b[3]])
    }

    /// Closes the track with an end-of-track meta event.
    pub fn end(self, tick: u32) -> Vec<u8> {
        self.raw(tick, &[0xFF, 0x2F, 0x00]).bytes
    }

    /// Body without end-of-track.
    pub fn open(self) -> Vec<u8> {
        self.bytes
    }
}

pub fn header(format: u16, tracks: u16, division: u16) -> Vec<u8> {
    let mut out = b"MThd".to_vec();
    out.extend(6u32.to_be_bytes());
    out.extend(format.to_be_bytes());
    out.extend(tracks.to_be_bytes());
    out.extend(division.to_be_bytes());
    out
}

pub fn chunk(body: &[u8]) -> Vec<u8> {
    let mut out = b"MTrk".to_vec();
    out.extend((body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
    out
}

pub fn smf(format: u16, division: u16, tracks: &[Vec<u8>]) -> Vec<u8> {
    let mut out = header(format, tracks.len() as u16, division);
    for t in tracks {
        out.extend(chunk(t));
    }
    out
}
