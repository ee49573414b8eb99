use alloc::vec::Vec;

use super::MidiError;

/// Default tempo before the first Set Tempo meta event (120 BPM).
pub const DEFAULT_US_PER_QUARTER: u32 = 500_000;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    tick: u64,
    seconds: f64,
    us_per_quarter: u32,
}

/// Piecewise-linear tick to seconds mapping built from Set Tempo events.
#[derive(Debug, Clone, PartialEq)]
pub struct TempoMap {
    ticks_per_quarter: u16,
    segments: Vec<Segment>,
}

impl TempoMap {
    /// Builds the map from `(tick, microseconds per quarter note)` pairs.
    ///
    /// Ticks must be non-decreasing. When several events share a tick the
    /// last one wins.
    pub fn new(ticks_per_quarter: u16, events: &[(u64, u32)]) -> Result<Self, MidiError> {
        if ticks_per_quarter == 0 {
            return Err(MidiError::MalformedHeader);
        }
        let mut segments = Vec::with_capacity(events.len() + 1);
        segments.push(Segment {
            tick: 0,
            seconds: 0.0,
            us_per_quarter: DEFAULT_US_PER_QUARTER,
        });
        let mut prev_tick = 0u64;
        for &(tick, us) in events {
            if tick < prev_tick {
                return Err(MidiError::NonMonotoneTempoEvents { tick });
            }
            if us == 0 {
                return Err(MidiError::InvalidTempo { tick });
            }
            prev_tick = tick;
            let last = *segments.last().expect("map always has a first segment");
            if last.tick == tick {
                segments.last_mut().unwrap().us_per_quarter = us;
                continue;
            }
            let seconds = last.seconds + Self::span(ticks_per_quarter, tick - last.tick, last.us_per_quarter);
            segments.push(Segment {
                tick,
                seconds,
                us_per_quarter: us,
            });
        }
        Ok(Self {
            ticks_per_quarter,
            segments,
        })
    }

    fn span(tpq: u16, ticks: u64, us_per_quarter: u32) -> f64 {
        ticks as f64 * us_per_quarter as f64 / (1e6 * tpq as f64)
    }

    /// Ticks per quarter note of the underlying file.
    pub fn ticks_per_quarter(&self) -> u16 {
        self.ticks_per_quarter
    }

    /// Converts an absolute tick to seconds.
    pub fn seconds(&self, tick: u64) -> f64 {
        let idx = self.segments.partition_point(|s| s.tick <= tick) - 1;
        let seg = self.segments[idx];
        seg.seconds + Self::span(self.ticks_per_quarter, tick - seg.tick, seg.us_per_quarter)
    }
}

/// Builds a [`TempoMap`]; see [`TempoMap::new`].
pub fn build_tempo_map(ticks_per_quarter: u16, events: &[(u64, u32)]) -> Result<TempoMap, MidiError> {
    TempoMap::new(ticks_per_quarter, events)
}
