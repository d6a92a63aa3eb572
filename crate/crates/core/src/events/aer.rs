//! Address-event file formats.
//!
//! CSV: a header line `timestamp_us,x,y,polarity` followed by one event per
//! line, polarity `1` for ON and `0` for OFF.
//!
//! Binary: the magic bytes `AER1`, then packed little-endian records of
//! `u32 timestamp_us, u16 x, u16 y, u8 polarity` (9 bytes each).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SENSOR_HEIGHT, SENSOR_WIDTH};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "timestamp_us,x,y,polarity";
pub const BINARY_MAGIC: &[u8; 4] = b"AER1";
pub const BINARY_RECORD_LEN: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Off,
    On,
}

impl Polarity {
    fn from_bit(b: u8) -> Option<Self> {
        match b {
            0 => Some(Polarity::Off),
            1 => Some(Polarity::On),
            _ => None,
        }
    }

    fn bit(self) -> u8 {
        match self {
            Polarity::Off => 0,
            Polarity::On => 1,
        }
    }
}

/// One sensor event at full sensor resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawEvent {
    pub timestamp_us: u32,
    pub x: u16,
    pub y: u16,
    pub polarity: Polarity,
}

impl RawEvent {
    pub fn in_bounds(&self) -> bool {
        (self.x as usize) < SENSOR_WIDTH && (self.y as usize) < SENSOR_HEIGHT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventFormat {
    Csv,
    Binary,
}

impl EventFormat {
    /// Guess from the file extension: `.csv` is CSV, anything else binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => EventFormat::Csv,
            _ => EventFormat::Binary,
        }
    }
}

/// Decoded events plus the number of records dropped for out-of-range
/// coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLoad {
    pub events: Vec<RawEvent>,
    pub rejected: usize,
}

impl EventLoad {
    fn push(&mut self, ev: RawEvent, location: impl FnOnce() -> String) -> Result<()> {
        if !ev.in_bounds() {
            self.rejected += 1;
            return Ok(());
        }
        if let Some(last) = self.events.last() {
            if ev.timestamp_us < last.timestamp_us {
                return Err(Error::MalformedRecord {
                    location: location(),
                    message: format!(
                        "timestamp {} precedes {}",
                        ev.timestamp_us, last.timestamp_us
                    ),
                });
            }
        }
        self.events.push(ev);
        Ok(())
    }
}

pub fn load_events(path: &Path, format: EventFormat) -> Result<EventLoad> {
    match format {
        EventFormat::Csv => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            decode_csv(&text)
        }
        EventFormat::Binary => {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            decode_binary(&bytes)
        }
    }
}

pub fn save_events(path: &Path, format: EventFormat, events: &[RawEvent]) -> Result<()> {
    let bytes = match format {
        EventFormat::Csv => encode_csv(events).into_bytes(),
        EventFormat::Binary => encode_binary(events),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn decode_csv(text: &str) -> Result<EventLoad> {
    let mut out = EventLoad::default();
    let mut lines = text.lines().enumerate().peekable();
    match lines.peek() {
        None => return Ok(out),
        Some((_, l)) if l.trim() == CSV_HEADER => {
            lines.next();
        }
        Some(_) => {
            return Err(Error::MalformedRecord {
                location: "line 1".into(),
                message: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let location = || format!("line {}", i + 1);
        let bad = |message: String| Error::MalformedRecord {
            location: location(),
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", fields.len())));
        }
        let timestamp_us = fields[0]
            .parse::<u32>()
            .map_err(|e| bad(format!("timestamp: {e}")))?;
        let x = fields[1].parse::<u16>().map_err(|e| bad(format!("x: {e}")))?;
        let y = fields[2].parse::<u16>().map_err(|e| bad(format!("y: {e}")))?;
        let polarity = fields[3]
            .parse::<u8>()
            .ok()
            .and_then(Polarity::from_bit)
            .ok_or_else(|| bad(format!("polarity must be 0 or 1, found `{}`", fields[3])))?;
        out.push(
            RawEvent {
                timestamp_us,
                x,
                y,
                polarity,
            },
            location,
        )?;
    }
    Ok(out)
}

pub fn encode_csv(events: &[RawEvent]) -> String {
    let mut s = String::with_capacity(16 * (events.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for e in events {
        let _ = writeln!(s, "{},{},{},{}", e.timestamp_us, e.x, e.y, e.polarity.bit());
    }
    s
}

pub fn decode_binary(bytes: &[u8]) -> Result<EventLoad> {
    let mut out = EventLoad::default();
    if bytes.is_empty() {
        return Ok(out);
    }
    if bytes.len() < BINARY_MAGIC.len() || &bytes[..4] != BINARY_MAGIC {
        return Err(Error::MalformedRecord {
            location: "byte 0".into(),
            message: "missing AER1 magic".into(),
        });
    }
    let body = &bytes[4..];
    let whole = body.len() / BINARY_RECORD_LEN * BINARY_RECORD_LEN;
    for (i, rec) in body[..whole].chunks_exact(BINARY_RECORD_LEN).enumerate() {
        let offset = 4 + i * BINARY_RECORD_LEN;
        let location = || format!("byte {offset}");
        let polarity = Polarity::from_bit(rec[8]).ok_or_else(|| Error::MalformedRecord {
            location: location(),
            message: format!("polarity byte {} is not 0 or 1", rec[8]),
        })?;
        out.push(
            RawEvent {
                timestamp_us: u32::from_le_bytes([rec[0], rec[1], rec[2], rec[3]]),
                x: u16::from_le_bytes([rec[4], rec[5]]),
                y: u16::from_le_bytes([rec[6], rec[7]]),
                polarity,
            },
            location,
        )?;
    }
    if whole != body.len() {
        return Err(Error::MalformedRecord {
            location: format!("byte {}", 4 + whole),
            message: format!("truncated record ({} trailing bytes)", body.len() - whole),
        });
    }
    Ok(out)
}

pub fn encode_binary(events: &[RawEvent]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + events.len() * BINARY_RECORD_LEN);
    out.extend_from_slice(BINARY_MAGIC);
    for e in events {
        out.extend_from_slice(&e.timestamp_us.to_le_bytes());
        out.extend_from_slice(&e.x.to_le_bytes());
        out.extend_from_slice(&e.y.to_le_bytes());
        out.push(e.polarity.bit());
    }
    out
}
