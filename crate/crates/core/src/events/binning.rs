use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::aer::{Polarity, RawEvent};
use super::{GRID_SIDE, INPUT_PIXELS, SENSOR_HEIGHT, SENSOR_WIDTH, TIMESTEP_US};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarityFilter {
    #[default]
    OnOnly,
    Both,
}

/// Input spikes on the 16×16 grid, one sorted set of pixel ids per step.
///
/// Pixel id is `row * 16 + col`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BinnedInput {
    frames: Vec<Vec<u16>>,
}

#[derive(Serialize, Deserialize)]
struct JsonFrame {
    t: u64,
    pixels: Vec<u16>,
}

impl BinnedInput {
    pub fn silent(duration: usize) -> Self {
        BinnedInput {
            frames: vec![Vec::new(); duration],
        }
    }

    /// Build from per-step pixel lists; each list is sorted and deduplicated.
    pub fn from_frames(mut frames: Vec<Vec<u16>>) -> Result<Self> {
        for (t, f) in frames.iter_mut().enumerate() {
            f.sort_unstable();
            f.dedup();
            if let Some(&p) = f.last() {
                if p as usize >= INPUT_PIXELS {
                    return Err(Error::precondition(format!(
                        "pixel id {p} at step {t} outside the {GRID_SIDE}x{GRID_SIDE} grid"
                    )));
                }
            }
        }
        Ok(BinnedInput { frames })
    }

    pub fn duration(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Vec<u16>] {
        &self.frames
    }

    /// Active pixels at step `t`; empty past the end.
    pub fn at(&self, t: usize) -> &[u16] {
        self.frames.get(t).map_or(&[], Vec::as_slice)
    }

    pub fn spike_count(&self) -> usize {
        self.frames.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, t: usize, pixel: u16) -> bool {
        self.at(t).binary_search(&pixel).is_ok()
    }

    /// Extend with silence (or truncate) to exactly `duration` steps.
    pub fn resized(mut self, duration: usize) -> Self {
        self.frames.resize(duration, Vec::new());
        self
    }

    /// Append `other` after this input.
    pub fn concat(mut self, other: &BinnedInput) -> Self {
        self.frames.extend(other.frames.iter().cloned());
        self
    }

    /// Per-pixel spike counts over the whole input.
    pub fn pixel_counts(&self) -> Vec<u32> {
        let mut c = vec![0u32; INPUT_PIXELS];
        for f in &self.frames {
            for &p in f {
                c[p as usize] += 1;
            }
        }
        c
    }

    /// JSON lines, one object per non-empty step.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for (t, f) in self.frames.iter().enumerate() {
            if f.is_empty() {
                continue;
            }
            let frame = JsonFrame {
                t: t as u64,
                pixels: f.clone(),
            };
            let _ = writeln!(s, "{}", serde_json::to_string(&frame).expect("plain struct"));
        }
        s
    }

    /// Parse JSON lines; `duration` pads trailing silent steps that the
    /// format cannot represent.
    pub fn from_json_lines(text: &str, duration: Option<usize>) -> Result<Self> {
        let mut frames: Vec<Vec<u16>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: JsonFrame = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
                location: format!("line {}", i + 1),
                message: e.to_string(),
            })?;
            let t = f.t as usize;
            if frames.len() <= t {
                frames.resize(t + 1, Vec::new());
            }
            frames[t].extend(f.pixels);
        }
        if let Some(d) = duration {
            if d < frames.len() {
                return Err(Error::precondition(format!(
                    "duration {d} shorter than last active step {}",
                    frames.len() - 1
                )));
            }
            frames.resize(d, Vec::new());
        }
        Self::from_frames(frames)
    }
}

pub fn downsample_x(x: u16) -> usize {
    x as usize * GRID_SIDE / SENSOR_WIDTH
}

pub fn downsample_y(y: u16) -> usize {
    y as usize * GRID_SIDE / SENSOR_HEIGHT
}

/// Smallest sensor coordinates that land on grid cell `(row, col)`.
pub fn sensor_coords(row: usize, col: usize) -> (u16, u16) {
    let x = (col * SENSOR_WIDTH).div_ceil(GRID_SIDE);
    let y = (row * SENSOR_HEIGHT).div_ceil(GRID_SIDE);
    (x as u16, y as u16)
}

/// Drop filtered events, map to the grid and bin into timesteps. Duplicate
/// `(step, pixel)` pairs collapse to one spike. Events outside the sensor are
/// ignored.
pub fn downsample_bin(events: &[RawEvent], filter: PolarityFilter) -> BinnedInput {
    let mut frames: Vec<Vec<u16>> = Vec::new();
    for e in events {
        if !e.in_bounds() || (filter == PolarityFilter::OnOnly && e.polarity != Polarity::On) {
            continue;
        }
        let t = (e.timestamp_us / TIMESTEP_US) as usize;
        let pixel = (downsample_y(e.y) * GRID_SIDE + downsample_x(e.x)) as u16;
        if frames.len() <= t {
            frames.resize(t + 1, Vec::new());
        }
        frames[t].push(pixel);
    }
    BinnedInput::from_frames(frames).expect("downsampled ids are on the grid")
}

/// Sensor-resolution events that bin back to exactly `input`.
pub fn to_raw_events(input: &BinnedInput) -> Vec<RawEvent> {
    let mut out = Vec::with_capacity(input.spike_count());
    for (t, f) in input.frames().iter().enumerate() {
        for &p in f {
            let (x, y) = sensor_coords(p as usize / GRID_SIDE, p as usize % GRID_SIDE);
            out.push(RawEvent {
                timestamp_us: t as u32 * TIMESTEP_US,
                x,
                y,
                polarity: Polarity::On,
            });
        }
    }
    out
}
