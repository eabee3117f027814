//! Raster containers and the color conversions every stage builds on.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::num::{quantize_unit, unit_clamp, Scalar};

/// Interleaved 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColorImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width * height * 3 {
            return Err(Error::InvalidImage(format!(
                "expected {} bytes for {width}x{height} RGB, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be non-zero");
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixel_at(y * self.width + x)
    }

    pub fn pixel_at(&self, index: usize) -> [u8; 3] {
        let i = index * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn pixels(&self) -> impl ExactSizeIterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }
}

/// Single-channel raster with every value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> IntensityMap<T> {
    /// Validates dimensions and that every value lies in `[0, 1]`.
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "expected {} values for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::InvalidImage(format!(
                "intensity {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a map from `f(x, y)`, clamping results into `[0, 1]` (NaN becomes 0).
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "map dimensions must be non-zero");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(unit_clamp(f(x, y)));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub(crate) fn from_raw_unchecked(width: usize, height: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// 8-bit representation, `round(v * 255)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_unit(v)).collect()
    }

    pub fn from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        let scale = T::lit(255.0);
        let data = bytes
            .iter()
            .map(|&b| T::from_u8(b).unwrap() / scale)
            .collect();
        Self::new(width, height, data)
    }
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hsv<T> {
    pub h: T,
    pub s: T,
    pub v: T,
}

/// Per-pixel HSV raster.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage<T> {
    width: usize,
    height: usize,
    data: Vec<Hsv<T>>,
}

impl<T: Scalar> HsvImage<T> {
    pub fn new(width: usize, height: usize, data: Vec<Hsv<T>>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "HSV buffer of {} pixels does not fit {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn as_slice(&self) -> &[Hsv<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Hsv<T>] {
        &mut self.data
    }

    pub fn get(&self, x: usize, y: usize) -> Hsv<T> {
        self.data[y * self.width + x]
    }

    pub fn saturation_map(&self) -> IntensityMap<T> {
        let data = self.data.iter().map(|p| unit_clamp(p.s)).collect();
        IntensityMap::from_raw_unchecked(self.width, self.height, data)
    }

    pub fn value_map(&self) -> IntensityMap<T> {
        let data = self.data.iter().map(|p| unit_clamp(p.v)).collect();
        IntensityMap::from_raw_unchecked(self.width, self.height, data)
    }
}

/// BT.601 luma of an 8-bit pixel, normalized to `[0, 1]`.
///
/// Evaluated as `(299 R + 587 G + 114 B) / 255000` so the numerator is an
/// exact integer: gray pixels map to exactly `v / 255` and the result is
/// monotone in every channel.
#[inline]
pub fn luma<T: Scalar>(rgb: [u8; 3]) -> T {
    let weighted = 299 * u32::from(rgb[0]) + 587 * u32::from(rgb[1]) + 114 * u32::from(rgb[2]);
    let value = T::from_u32(weighted).unwrap() / T::lit(255_000.0);
    value.min(T::one())
}

/// Grayscale intensity map of a color image.
pub fn to_intensity<T: Scalar>(img: &ColorImage) -> IntensityMap<T> {
    let data: Vec<T> = img
        .as_raw()
        .par_chunks_exact(3)
        .map(|c| luma([c[0], c[1], c[2]]))
        .collect();
    IntensityMap::from_raw_unchecked(img.width(), img.height(), data)
}

/// Hexcone RGB to HSV for one pixel.
pub fn rgb_to_hsv_pixel<T: Scalar>(rgb: [u8; 3]) -> Hsv<T> {
    let scale = T::lit(255.0);
    let r = T::from_u8(rgb[0]).unwrap() / scale;
    let g = T::from_u8(rgb[1]).unwrap() / scale;
    let b = T::from_u8(rgb[2]).unwrap() / scale;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let v = max;
    let s = if max > T::zero() {
        delta / max
    } else {
        T::zero()
    };
    let sixty = T::lit(60.0);
    let mut h = if delta == T::zero() {
        T::zero()
    } else if rgb[0] >= rgb[1] && rgb[0] >= rgb[2] {
        sixty * ((g - b) / delta)
    } else if rgb[1] >= rgb[2] {
        sixty * ((b - r) / delta + T::lit(2.0))
    } else {
        sixty * ((r - g) / delta + T::lit(4.0))
    };
    let full = T::lit(360.0);
    if h < T::zero() {
        h = h + full;
    }
    if h >= full {
        h = T::zero();
    }
    Hsv { h, s, v }
}

/// Hexcone HSV to RGB for one pixel; inputs outside their ranges are clamped.
pub fn hsv_to_rgb_pixel<T: Scalar>(hsv: Hsv<T>) -> [u8; 3] {
    let s = unit_clamp(hsv.s);
    let v = unit_clamp(hsv.v);
    let full = T::lit(360.0);
    let mut h = hsv.h % full;
    if h < T::zero() {
        h = h + full;
    }
    let sector_pos = h / T::lit(60.0);
    let sector = sector_pos.floor();
    let f = sector_pos - sector;
    let p = v * (T::one() - s);
    let q = v * (T::one() - s * f);
    let t = v * (T::one() - s * (T::one() - f));
    let (r, g, b) = match sector.to_u32().unwrap_or(0) % 6 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [quantize_unit(r), quantize_unit(g), quantize_unit(b)]
}

pub fn rgb_to_hsv<T: Scalar>(img: &ColorImage) -> HsvImage<T> {
    let data = img
        .as_raw()
        .par_chunks_exact(3)
        .map(|c| rgb_to_hsv_pixel([c[0], c[1], c[2]]))
        .collect();
    HsvImage {
        width: img.width(),
        height: img.height(),
        data,
    }
}

pub fn hsv_to_rgb<T: Scalar>(img: &HsvImage<T>) -> ColorImage {
    let data = img
        .as_slice()
        .par_iter()
        .flat_map_iter(|&p| hsv_to_rgb_pixel(p))
        .collect();
    ColorImage {
        width: img.width(),
        height: img.height(),
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn color_image_rejects_bad_buffers() {
        assert!(ColorImage::new(0, 4, vec![]).is_err());
        assert!(ColorImage::new(2, 2, vec![0; 11]).is_err());
        assert!(ColorImage::new(2, 2, vec![0; 12]).is_ok());
    }

    #[test]
    fn intensity_map_rejects_out_of_range() {
        assert!(IntensityMap::new(1, 2, vec![0.5f64, 1.01]).is_err());
        assert!(IntensityMap::new(1, 2, vec![0.5f64, f64::NAN]).is_err());
        assert!(IntensityMap::new(1, 2, vec![0.0f64, 1.0]).is_ok());
    }

    #[test]
    fn luma_examples() {
        assert_eq!(luma::<f64>([255, 255, 255]), 1.0);
        assert_eq!(luma::<f64>([0, 0, 0]), 0.0);
        assert!((luma::<f64>([255, 0, 0]) - 0.299).abs() < 1e-15);
        assert!((luma::<f32>([255, 0, 0]) - 0.299).abs() < 1e-7);
    }

    #[test]
    fn achromatic_intensity_is_exact() {
        for v in 0..=255u8 {
            assert_eq!(luma::<f64>([v, v, v]), f64::from(v) / 255.0);
            assert_eq!(luma::<f32>([v, v, v]), f32::from(v) / 255.0);
        }
    }

    #[test]
    fn hsv_examples() {
        let red = rgb_to_hsv_pixel::<f64>([255, 0, 0]);
        assert_eq!((red.h, red.s, red.v), (0.0, 1.0, 1.0));

        let gray = rgb_to_hsv_pixel::<f64>([128, 128, 128]);
        assert_eq!(gray.s, 0.0);
        assert!((gray.v - 0.502).abs() < 1e-3);

        let rgb = hsv_to_rgb_pixel(Hsv {
            h: 120.0f64,
            s: 0.5,
            v: 1.0,
        });
        for (got, want) in rgb.iter().zip([128u8, 255, 128]) {
            assert!(got.abs_diff(want) <= 1, "{rgb:?}");
        }
    }

    #[test]
    fn hue_is_in_range() {
        // (255, 0, 1) produces a tiny negative raw hue.
        let hsv = rgb_to_hsv_pixel::<f64>([255, 0, 1]);
        assert!(hsv.h >= 0.0 && hsv.h < 360.0);
    }

    #[test]
    fn hsv_round_trip_is_exact_over_all_triples() {
        // Full 256^3 sweep; the bound allows 1, but rounding recovers the
        // original byte in practice.
        let mut worst = 0u8;
        for r in 0..=255u8 {
            for g in 0..=255u8 {
                for b in 0..=255u8 {
                    let back = hsv_to_rgb_pixel(rgb_to_hsv_pixel::<f64>([r, g, b]));
                    worst = worst
                        .max(back[0].abs_diff(r))
                        .max(back[1].abs_diff(g))
                        .max(back[2].abs_diff(b));
                }
            }
        }
        assert!(worst <= 1, "worst round-trip error {worst}");
    }

    #[test]
    fn hsv_round_trip_f32_stratified() {
        let mut worst = 0u8;
        for r in 0..=255u8 {
            for g in 0..=255u8 {
                for b in (0..=255u8).step_by(16) {
                    let back = hsv_to_rgb_pixel(rgb_to_hsv_pixel::<f32>([r, g, b]));
                    worst = worst
                        .max(back[0].abs_diff(r))
                        .max(back[1].abs_diff(g))
                        .max(back[2].abs_diff(b));
                }
            }
        }
        assert!(worst <= 1, "worst round-trip error {worst}");
    }

    proptest! {
        #[test]
        fn intensity_is_monotone(rgb in any::<[u8; 3]>(), channel in 0usize..3, bump in 1u8..=255) {
            let mut brighter = rgb;
            brighter[channel] = rgb[channel].saturating_add(bump);
            prop_assert!(luma::<f64>(brighter) >= luma::<f64>(rgb));
        }

        #[test]
        fn hsv_components_in_range(rgb in any::<[u8; 3]>()) {
            let hsv = rgb_to_hsv_pixel::<f32>(rgb);
            prop_assert!(hsv.h >= 0.0 && hsv.h < 360.0);
            prop_assert!((0.0..=1.0).contains(&hsv.s));
            prop_assert!((0.0..=1.0).contains(&hsv.v));
        }
    }
}
