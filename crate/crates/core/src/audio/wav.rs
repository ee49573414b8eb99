//! RIFF/WAVE decoding (16-bit PCM and 32-bit IEEE float).

use alloc::vec::Vec;

use super::{AudioClip, AudioError};

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

fn le_u16(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes([b[0], b[1], b[2], b[3]])
}

struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

/// Decodes a WAVE file to a mono clip. 16-bit samples map to `s / 32768`,
/// channels are averaged.
pub fn read_wav(bytes: &[u8]) -> Result<AudioClip, AudioError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(AudioError::NotRiff);
    }
    let mut pos = 12;
    let mut format: Option<Format> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = le_u32(&bytes[pos + 4..pos + 8]) as usize;
        let body_start = pos + 8;
        let body_end = body_start.checked_add(len).ok_or(AudioError::TruncatedData)?;
        if id == b"data" {
            if body_end > bytes.len() {
                return Err(AudioError::TruncatedData);
            }
            data = Some(&bytes[body_start..body_end]);
        } else if id == b"fmt " {
            if len < 16 || body_end > bytes.len() {
                return Err(AudioError::TruncatedData);
            }
            let b = &bytes[body_start..body_end];
            let mut tag = le_u16(&b[0..2]);
            if tag == FORMAT_EXTENSIBLE && len >= 26 {
                // first two bytes of the sub-format GUID carry the real tag
                tag = le_u16(&b[24..26]);
            }
            format = Some(Format {
                tag,
                channels: le_u16(&b[2..4]),
                sample_rate: le_u32(&b[4..8]),
                bits: le_u16(&b[14..16]),
            });
        }
        // chunks are word aligned
        pos = body_end + (len & 1);
    }
    let format = format.ok_or(AudioError::TruncatedData)?;
    let data = data.ok_or(AudioError::TruncatedData)?;
    if format.channels == 0 || format.sample_rate == 0 {
        return Err(AudioError::UnsupportedCodec);
    }
    let bytes_per_sample = match (format.tag, format.bits) {
        (FORMAT_PCM, 16) => 2,
        (FORMAT_FLOAT, 32) => 4,
        _ => return Err(AudioError::UnsupportedCodec),
    };
    let channels = format.channels as usize;
    let frame_bytes = bytes_per_sample * channels;
    if data.len() % frame_bytes != 0 {
        return Err(AudioError::TruncatedData);
    }
    let decode = |s: &[u8]| -> f64 {
        if bytes_per_sample == 2 {
            f64::from(i16::from_le_bytes([s[0], s[1]])) / 32768.0
        } else {
            f64::from(f32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        }
    };
    let samples: Vec<f64> = data
        .chunks_exact(frame_bytes)
        .map(|frame| frame.chunks_exact(bytes_per_sample).map(decode).sum::<f64>() / channels as f64)
        .collect();
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(AudioError::NonFiniteSample);
    }
    AudioClip::new(samples, f64::from(format.sample_rate))
}
