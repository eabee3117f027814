//! Region-adaptive scaling: imprints rough-manga screentones onto the color
//! illustration by modulating one HSV channel per region, then composes the
//! final grayscale manga.
//!
//! For a region `R` with rough-map standard deviation `σ`, the multiplier
//! range is `[1 - w_low·σ, 1 + w_high·σ]`. Inside the region, a pixel whose
//! rough intensity sits at the region minimum gets the top of the range and
//! one at the region maximum gets the bottom, linearly in between. Dark
//! screentone pixels therefore gain saturation (or value) and light ones
//! lose it, with flat regions left alone.

mod histogram;

pub use histogram::match_histogram;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{dims_match, Error, Result};
use crate::image::{
    hsv_to_rgb_pixel, rgb_to_hsv_pixel, to_intensity, ColorImage, Hsv, HsvImage, IntensityMap,
};
use crate::num::{unit_clamp, Scalar};
use crate::segmentation::{LabelMap, RegionStats};

/// HSV channel that receives the multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    #[default]
    Saturation,
    /// HSV value, standing in for lightness.
    Lightness,
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "saturation" | "s" => Ok(Self::Saturation),
            "lightness" | "l" | "value" | "v" => Ok(Self::Lightness),
            other => Err(Error::Config(format!(
                "unknown channel `{other}` (expected saturation or lightness)"
            ))),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Saturation => "saturation",
            Self::Lightness => "lightness",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams<T> {
    pub w_low: T,
    pub w_high: T,
    pub channel: Channel,
    /// Match the final manga's histogram to the rough map's.
    pub histogram_match: bool,
    /// Regions whose mean saturation is below this use the lightness channel.
    pub low_sat_fallback: T,
    /// Regions with fewer pixels are left untouched.
    pub min_region_pixels: usize,
}

impl<T: Scalar> Default for ScalingParams<T> {
    fn default() -> Self {
        Self {
            w_low: T::lit(0.08),
            w_high: T::lit(0.16),
            channel: Channel::Saturation,
            histogram_match: false,
            low_sat_fallback: T::lit(0.1),
            min_region_pixels: 16,
        }
    }
}

impl<T: Scalar> ScalingParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_low >= T::zero() && self.w_high >= T::zero())
            || !self.w_low.is_finite()
            || !self.w_high.is_finite()
        {
            return Err(Error::Config(format!(
                "scaling weights must be finite and non-negative, got w_low={} w_high={}",
                self.w_low, self.w_high
            )));
        }
        if !(self.low_sat_fallback >= T::zero() && self.low_sat_fallback <= T::one()) {
            return Err(Error::Config(format!(
                "low_sat_fallback {} must lie in [0, 1]",
                self.low_sat_fallback
            )));
        }
        Ok(())
    }
}

/// Multiplier bounds for one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRange<T> {
    pub low: T,
    pub high: T,
}

impl<T: Scalar> ScalingRange<T> {
    pub const fn new(low: T, high: T) -> Self {
        Self { low, high }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::one())
    }
}

/// `(1 - w_low·σ, 1 + w_high·σ)`, with the lower bound floored at zero.
pub fn scaling_range<T: Scalar>(sigma: T, params: &ScalingParams<T>) -> ScalingRange<T> {
    let low = (T::one() - params.w_low * sigma).max(T::zero());
    let high = T::one() + params.w_high * sigma;
    ScalingRange { low, high }
}

/// Multiplier for a pixel with rough intensity `ir` inside a region.
///
/// Linear from `range.high` at the region's minimum rough intensity down to
/// `range.low` at its maximum. Regions with a flat rough map get exactly 1.
pub fn pixel_scale<T: Scalar>(ir: T, stats: &RegionStats<T>, range: ScalingRange<T>) -> T {
    let spread = stats.max_ir - stats.min_ir;
    if spread <= T::zero() || spread.is_nan() {
        return T::one();
    }
    let t = (ir - stats.min_ir) / spread;
    let s = range.high - t * (range.high - range.low);
    s.max(range.low).min(range.high)
}

/// How one region is treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPlan<T> {
    pub range: ScalingRange<T>,
    pub channel: Channel,
    /// Left bit-identical (tiny or flat region).
    pub passthrough: bool,
}

/// Scaled illustration together with its HSV form.
#[derive(Debug, Clone)]
pub struct ScaledIllustration<T> {
    pub image: ColorImage,
    pub hsv: HsvImage<T>,
    pub plans: Vec<RegionPlan<T>>,
}

/// Applies region-adaptive scaling to `illustration`.
pub fn adaptive_scale<T: Scalar>(
    illustration: &ColorImage,
    rough: &IntensityMap<T>,
    regions: &LabelMap,
    stats: &[RegionStats<T>],
    params: &ScalingParams<T>,
) -> Result<ColorImage> {
    adaptive_scale_detailed(illustration, rough, regions, stats, params).map(|s| s.image)
}

pub fn adaptive_scale_detailed<T: Scalar>(
    illustration: &ColorImage,
    rough: &IntensityMap<T>,
    regions: &LabelMap,
    stats: &[RegionStats<T>],
    params: &ScalingParams<T>,
) -> Result<ScaledIllustration<T>> {
    params.validate()?;
    let dims = illustration.dimensions();
    dims_match("rough map", dims, rough.dimensions())?;
    dims_match("region map", dims, regions.dimensions())?;

    let count = regions.region_count();
    let mut by_label: Vec<Option<&RegionStats<T>>> = vec![None; count];
    for s in stats {
        if let Some(slot) = by_label.get_mut(s.region_id as usize) {
            *slot = Some(s);
        }
    }
    let by_label: Vec<&RegionStats<T>> = by_label
        .into_iter()
        .enumerate()
        .map(|(label, s)| s.ok_or(Error::MissingStats(label as u32)))
        .collect::<Result<_>>()?;

    let hsv_in: Vec<Hsv<T>> = illustration
        .as_raw()
        .par_chunks_exact(3)
        .map(|c| rgb_to_hsv_pixel([c[0], c[1], c[2]]))
        .collect();

    let mut sat_sum = vec![T::zero(); count];
    for (p, &l) in hsv_in.iter().zip(regions.labels()) {
        sat_sum[l as usize] = sat_sum[l as usize] + p.s;
    }

    let plans: Vec<RegionPlan<T>> = by_label
        .iter()
        .zip(&sat_sum)
        .map(|(s, &sat)| {
            let mean_sat = sat / T::from_usize_lossy(s.pixel_count.max(1));
            let channel =
                if params.channel == Channel::Saturation && mean_sat < params.low_sat_fallback {
                    Channel::Lightness
                } else {
                    params.channel
                };
            RegionPlan {
                range: scaling_range(s.sigma, params),
                channel,
                passthrough: s.pixel_count < params.min_region_pixels || s.max_ir <= s.min_ir,
            }
        })
        .collect();

    let scaled: Vec<(Hsv<T>, [u8; 3])> = hsv_in
        .par_iter()
        .zip(rough.as_slice().par_iter())
        .zip(regions.labels().par_iter())
        .enumerate()
        .map(|(i, ((&hsv, &ir), &label))| {
            let original = illustration.pixel_at(i);
            let plan = &plans[label as usize];
            if plan.passthrough {
                return (hsv, original);
            }
            let s = pixel_scale(ir, by_label[label as usize], plan.range);
            if s == T::one() {
                return (hsv, original);
            }
            let mut out = hsv;
            match plan.channel {
                Channel::Saturation => out.s = unit_clamp(hsv.s * s),
                Channel::Lightness => out.v = unit_clamp(hsv.v * s),
            }
            (out, hsv_to_rgb_pixel(out))
        })
        .collect();

    let (hsv_out, rgb): (Vec<_>, Vec<_>) = scaled.into_iter().unzip();
    let image = ColorImage::new(dims.0, dims.1, rgb.into_iter().flatten().collect())?;
    let hsv = HsvImage::new(dims.0, dims.1, hsv_out)?;
    Ok(ScaledIllustration { image, hsv, plans })
}

/// Final manga: grayscale of the scaled illustration, optionally histogram
/// matched to the rough map.
pub fn compose_final<T: Scalar>(
    scaled: &ColorImage,
    rough: &IntensityMap<T>,
    params: &ScalingParams<T>,
) -> Result<IntensityMap<T>> {
    let gray = to_intensity(scaled);
    if params.histogram_match {
        dims_match("rough map", scaled.dimensions(), rough.dimensions())?;
        Ok(match_histogram(&gray, rough))
    } else {
        Ok(gray)
    }
}
