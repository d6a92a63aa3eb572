//! Synthetic bar patterns with a square-wave positional jiggle.
//!
//! A shape is drawn on a 5×5 cell grid. At scale class `s` the cells are the
//! blocks of an `n×n` partition of the 16×16 input (`n = 11 - 2s`, so class 0
//! is the smallest pattern and class 3 fills the grid). Each bar is one pixel
//! thick, running through the centres of the blocks it spans.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::binning::BinnedInput;
use super::GRID_SIDE;
use crate::error::{Error, Result};

pub const CELLS: usize = 5;
pub const SCALE_CLASSES: usize = 4;

/// Block-grid size for a scale class.
pub fn grid_for_scale(scale: u8) -> usize {
    11 - 2 * scale as usize
}

/// Pixel boundary `i` of an `n`-way partition of the input side:
/// `round(i * 16 / n)` with halves rounded up.
pub fn block_boundary(i: usize, n: usize) -> usize {
    (2 * GRID_SIDE * i + n) / (2 * n)
}

pub fn block_centre(i: usize, n: usize) -> usize {
    (block_boundary(i, n) + block_boundary(i + 1, n) - 1) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A bar on the cell grid. `line` is the row (horizontal) or column
/// (vertical); it covers cells `from..=to` along its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bar {
    pub orientation: Orientation,
    pub line: u8,
    pub from: u8,
    pub to: u8,
}

impl Bar {
    pub const fn h(row: u8, from: u8, to: u8) -> Self {
        Bar {
            orientation: Orientation::Horizontal,
            line: row,
            from,
            to,
        }
    }

    pub const fn v(col: u8, from: u8, to: u8) -> Self {
        Bar {
            orientation: Orientation::Vertical,
            line: col,
            from,
            to,
        }
    }

    fn validate(&self) -> Result<()> {
        let c = CELLS as u8;
        if self.line >= c || self.from > self.to || self.to >= c {
            return Err(Error::precondition(format!(
                "bar {self:?} does not fit the {CELLS}x{CELLS} cell grid"
            )));
        }
        Ok(())
    }

    /// `(row, col)` cells covered.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.from..=self.to).map(move |k| match self.orientation {
            Orientation::Horizontal => (self.line as usize, k as usize),
            Orientation::Vertical => (k as usize, self.line as usize),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    T,
    L,
    Plus,
    H,
    Custom(Vec<Bar>),
}

impl Shape {
    /// The built-in pattern set, in class order.
    pub fn standard() -> [Shape; 4] {
        [Shape::T, Shape::L, Shape::Plus, Shape::H]
    }

    pub fn bars(&self) -> Vec<Bar> {
        match self {
            Shape::T => vec![Bar::h(0, 0, 4), Bar::v(2, 0, 4)],
            Shape::L => vec![Bar::v(0, 0, 4), Bar::h(4, 0, 4)],
            Shape::Plus => vec![Bar::h(2, 0, 4), Bar::v(2, 0, 4)],
            Shape::H => vec![Bar::v(0, 0, 4), Bar::v(4, 0, 4), Bar::h(2, 0, 4)],
            Shape::Custom(b) => b.clone(),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::T => f.write_str("T"),
            Shape::L => f.write_str("L"),
            Shape::Plus => f.write_str("plus"),
            Shape::H => f.write_str("H"),
            Shape::Custom(b) => write!(f, "custom({} bars)", b.len()),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t" => Ok(Shape::T),
            "l" => Ok(Shape::L),
            "plus" | "+" => Ok(Shape::Plus),
            "h" => Ok(Shape::H),
            _ => Err(Error::precondition(format!(
                "unknown shape `{s}` (expected T, L, plus or H)"
            ))),
        }
    }
}

/// Square-wave dither: the offset cycles `(+a,0) (0,+a) (-a,0) (0,-a)`,
/// holding each for `period` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Jiggle {
    pub amplitude: u8,
    pub period: u32,
}

impl Jiggle {
    pub const NONE: Jiggle = Jiggle {
        amplitude: 0,
        period: 1,
    };

    /// `(d_row, d_col)` at step `t`.
    pub fn offset(&self, t: usize) -> (i32, i32) {
        if self.amplitude == 0 {
            return (0, 0);
        }
        let a = self.amplitude as i32;
        match (t / self.period as usize) % 4 {
            0 => (0, a),
            1 => (a, 0),
            2 => (0, -a),
            _ => (-a, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPattern {
    pub shape: Shape,
    /// Size class 0 (smallest) to 3 (fills the grid).
    pub scale: u8,
    /// `(row, col)` offset in blocks of the scale's grid.
    pub position: (u8, u8),
    pub jiggle: Jiggle,
    /// Spike probability per active pixel per step.
    pub event_rate: f64,
}

impl SynthPattern {
    pub fn new(shape: Shape, scale: u8, position: (u8, u8)) -> Self {
        SynthPattern {
            shape,
            scale,
            position,
            jiggle: Jiggle {
                amplitude: 1,
                period: 40,
            },
            event_rate: 0.1,
        }
    }

    pub fn grid(&self) -> usize {
        grid_for_scale(self.scale)
    }

    /// Largest valid block offset on each axis.
    pub fn max_position(scale: u8) -> u8 {
        (grid_for_scale(scale) - CELLS) as u8
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale as usize >= SCALE_CLASSES {
            return Err(Error::precondition(format!(
                "scale class {} out of range 0..{SCALE_CLASSES}",
                self.scale
            )));
        }
        let max = Self::max_position(self.scale);
        if self.position.0 > max || self.position.1 > max {
            return Err(Error::precondition(format!(
                "position {:?} exceeds {max} at scale {}",
                self.position, self.scale
            )));
        }
        let bars = self.shape.bars();
        if bars.is_empty() {
            return Err(Error::precondition("shape has no bars"));
        }
        for b in &bars {
            b.validate()?;
        }
        if !(0.0..=1.0).contains(&self.event_rate) {
            return Err(Error::precondition(format!(
                "event_rate {} outside [0, 1]",
                self.event_rate
            )));
        }
        if self.jiggle.amplitude > 0 && self.jiggle.period == 0 {
            return Err(Error::precondition("jiggle period must be positive"));
        }
        let a = self.jiggle.amplitude as usize;
        let px = self.base_pixels();
        let lo = px.iter().map(|&(r, c)| r.min(c)).min().unwrap_or(0);
        let hi = px.iter().map(|&(r, c)| r.max(c)).max().unwrap_or(0);
        if lo < a || hi + a >= GRID_SIDE {
            return Err(Error::precondition(format!(
                "jiggle amplitude {a} moves the pattern off the grid"
            )));
        }
        Ok(())
    }

    /// `(row, col)` pixels of the undisplaced pattern.
    pub fn base_pixels(&self) -> Vec<(usize, usize)> {
        let n = self.grid();
        let (or, oc) = (self.position.0 as usize, self.position.1 as usize);
        let mut px = Vec::new();
        for b in self.shape.bars() {
            let (lo, hi) = (b.from as usize, b.to as usize);
            let fixed = block_centre(b.line as usize + match b.orientation {
                Orientation::Horizontal => or,
                Orientation::Vertical => oc,
            }, n);
            let along = match b.orientation {
                Orientation::Horizontal => oc,
                Orientation::Vertical => or,
            };
            for k in block_centre(along + lo, n)..=block_centre(along + hi, n) {
                px.push(match b.orientation {
                    Orientation::Horizontal => (fixed, k),
                    Orientation::Vertical => (k, fixed),
                });
            }
        }
        px.sort_unstable();
        px.dedup();
        px
    }

    /// Sorted pixel ids at step `t`, including the jiggle displacement.
    pub fn active_pixels(&self, t: usize) -> Vec<u16> {
        let (dr, dc) = self.jiggle.offset(t);
        let mut ids: Vec<u16> = self
            .base_pixels()
            .into_iter()
            .map(|(r, c)| {
                let r = (r as i32 + dr) as usize;
                let c = (c as i32 + dc) as usize;
                (r * GRID_SIDE + c) as u16
            })
            .collect();
        ids.sort_unstable();
        ids
    }
}

/// Bernoulli spikes on the pattern's active pixels, deterministic per seed.
pub fn synthesize(pattern: &SynthPattern, duration_steps: usize, seed: u64) -> Result<BinnedInput> {
    pattern.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = pattern.event_rate;
    let mut frames = Vec::with_capacity(duration_steps);
    let mut cache: Option<((i32, i32), Vec<u16>)> = None;
    for t in 0..duration_steps {
        let off = pattern.jiggle.offset(t);
        if cache.as_ref().is_none_or(|(o, _)| *o != off) {
            cache = Some((off, pattern.active_pixels(t)));
        }
        let active = &cache.as_ref().expect("set above").1;
        let frame: Vec<u16> = if p == 0.0 {
            Vec::new()
        } else {
            active.iter().copied().filter(|_| rng.random_bool(p)).collect()
        };
        frames.push(frame);
    }
    BinnedInput::from_frames(frames)
}
