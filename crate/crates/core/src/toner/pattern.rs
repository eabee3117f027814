use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::IntensityMap;
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternFamily {
    /// AM dot screen: product of two sinusoids along the rotated axes.
    Dot,
    /// Parallel stripes along the rotated x axis.
    Line,
    /// Tiled ordered-dither matrix.
    Bayer,
    /// Constant threshold at one half.
    Threshold,
}

impl FromStr for PatternFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(Self::Dot),
            "line" => Ok(Self::Line),
            "bayer" => Ok(Self::Bayer),
            "threshold" => Ok(Self::Threshold),
            other => Err(Error::Pattern(format!(
                "unknown pattern `{other}` (expected dot, line, bayer or threshold)"
            ))),
        }
    }
}

impl fmt::Display for PatternFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dot => "dot",
            Self::Line => "line",
            Self::Bayer => "bayer",
            Self::Threshold => "threshold",
        })
    }
}

/// Screentone pattern parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSpec<T> {
    pub family: PatternFamily,
    /// Cycles per pixel, in `(0, 0.5]`.
    pub frequency: T,
    /// Screen angle in degrees, in `[0, 180)`.
    pub angle: T,
    /// Side of the ordered-dither matrix; a power of two.
    pub bayer_order: usize,
    /// Intensities at or below this stay solid black.
    pub black_point: T,
    /// Intensities at or above this stay paper white.
    pub white_point: T,
}

impl<T: Scalar> Default for PatternSpec<T> {
    fn default() -> Self {
        Self {
            family: PatternFamily::Bayer,
            frequency: T::lit(0.125),
            angle: T::lit(45.0),
            bayer_order: 8,
            black_point: T::lit(0.02),
            white_point: T::lit(0.98),
        }
    }
}

pub const MAX_BAYER_ORDER: usize = 256;

impl<T: Scalar> PatternSpec<T> {
    pub fn new(family: PatternFamily) -> Self {
        Self {
            family,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > T::zero() && self.frequency <= T::lit(0.5)) {
            return Err(Error::Pattern(format!(
                "frequency {} must lie in (0, 0.5] cycles per pixel",
                self.frequency
            )));
        }
        if !(self.angle >= T::zero() && self.angle < T::lit(180.0)) {
            return Err(Error::Pattern(format!(
                "angle {} must lie in [0, 180)",
                self.angle
            )));
        }
        if self.bayer_order < 2
            || self.bayer_order > MAX_BAYER_ORDER
            || !self.bayer_order.is_power_of_two()
        {
            return Err(Error::Pattern(format!(
                "bayer order {} must be a power of two in 2..={MAX_BAYER_ORDER}",
                self.bayer_order
            )));
        }
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !(unit(self.black_point)
            && unit(self.white_point)
            && self.black_point < self.white_point)
        {
            return Err(Error::Pattern(format!(
                "need 0 <= black_point < white_point <= 1, got {} and {}",
                self.black_point, self.white_point
            )));
        }
        Ok(())
    }

    pub fn period(&self) -> T {
        T::one() / self.frequency
    }
}

/// Recursive Bayer index matrix of side `order`, row-major, values `0..order²`.
pub fn bayer_matrix(order: usize) -> Result<Vec<u32>> {
    if order == 0 || !order.is_power_of_two() || order > MAX_BAYER_ORDER {
        return Err(Error::Pattern(format!("invalid bayer order {order}")));
    }
    let mut m = vec![0u32];
    let mut n = 1;
    while n < order {
        let next = n * 2;
        let mut grown = vec![0u32; next * next];
        for y in 0..n {
            for x in 0..n {
                let v = 4 * m[y * n + x];
                grown[y * next + x] = v;
                grown[y * next + x + n] = v + 2;
                grown[(y + n) * next + x] = v + 3;
                grown[(y + n) * next + x + n] = v + 1;
            }
        }
        m = grown;
        n = next;
    }
    Ok(m)
}

/// Threshold field sampled at pixel centers.
enum Field<T> {
    Constant(T),
    Matrix {
        order: usize,
        thresholds: Vec<T>,
    },
    Wave {
        dot: bool,
        frequency: T,
        cos: T,
        sin: T,
    },
}

impl<T: Scalar> Field<T> {
    fn new(spec: &PatternSpec<T>) -> Result<Self> {
        Ok(match spec.family {
            PatternFamily::Threshold => Field::Constant(T::lit(0.5)),
            PatternFamily::Bayer => {
                let order = spec.bayer_order;
                let cells = T::from_usize_lossy(order * order);
                let thresholds = bayer_matrix(order)?
                    .into_iter()
                    .map(|m| (T::from_u32(m).unwrap() + T::lit(0.5)) / cells)
                    .collect();
                Field::Matrix { order, thresholds }
            }
            PatternFamily::Dot | PatternFamily::Line => {
                let theta = spec.angle.to_radians();
                Field::Wave {
                    dot: spec.family == PatternFamily::Dot,
                    frequency: spec.frequency,
                    cos: theta.cos(),
                    sin: theta.sin(),
                }
            }
        })
    }

    fn at(&self, x: usize, y: usize) -> T {
        match self {
            Field::Constant(t) => *t,
            Field::Matrix { order, thresholds } => thresholds[(y % order) * order + x % order],
            Field::Wave {
                dot,
                frequency,
                cos,
                sin,
            } => {
                let half = T::lit(0.5);
                let px = T::from_usize_lossy(x) + half;
                let py = T::from_usize_lossy(y) + half;
                let u = px * *cos + py * *sin;
                let v = py * *cos - px * *sin;
                let wave = if *dot {
                    cyclic_sin(*frequency * u) * cyclic_sin(*frequency * v)
                } else {
                    cyclic_sin(*frequency * u)
                };
                half + half * wave
            }
        }
    }
}

/// `sin(2π t)` with `t` reduced to one cycle first, so that shifting `t` by an
/// integer number of cycles reproduces the exact same value.
#[inline]
fn cyclic_sin<T: Scalar>(t: T) -> T {
    let phase = t - t.floor();
    (T::lit(std::f64::consts::TAU) * phase).sin()
}

/// Binarizes `intensity` against the pattern's threshold field.
///
/// A pixel is black (0) where its intensity falls below the local threshold
/// and white (1) otherwise; the black and white points override the field.
pub fn synthesize<T: Scalar>(
    intensity: &IntensityMap<T>,
    spec: &PatternSpec<T>,
) -> Result<IntensityMap<T>> {
    spec.validate()?;
    let field = Field::new(spec)?;
    let width = intensity.width();
    let data: Vec<T> = intensity
        .as_slice()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let black = v < spec.white_point
                && (v <= spec.black_point || v < field.at(i % width, i / width));
            if black {
                T::zero()
            } else {
                T::one()
            }
        })
        .collect();
    Ok(IntensityMap::from_raw_unchecked(
        width,
        intensity.height(),
        data,
    ))
}
