//! Lossless 8-bit PNG reading and writing.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};

use crate::error::{Error, Result};
use crate::image::{ColorImage, IntensityMap};
use crate::num::Scalar;

/// Something that can be written as an 8-bit PNG.
pub trait PngRaster {
    fn png_parts(&self) -> (usize, usize, ColorType, Vec<u8>);
}

impl PngRaster for ColorImage {
    fn png_parts(&self) -> (usize, usize, ColorType, Vec<u8>) {
        (
            self.width(),
            self.height(),
            ColorType::Rgb,
            self.as_raw().to_vec(),
        )
    }
}

impl<T: Scalar> PngRaster for IntensityMap<T> {
    fn png_parts(&self) -> (usize, usize, ColorType, Vec<u8>) {
        (
            self.width(),
            self.height(),
            ColorType::Grayscale,
            self.to_bytes(),
        )
    }
}

/// Decodes a PNG into 8-bit RGB.
///
/// Grayscale is replicated across channels, palettes are expanded, and
/// alpha is composited over white. Sub-byte depths are widened; 16-bit
/// input is rejected.
pub fn load_image(path: impl AsRef<Path>) -> Result<ColorImage> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let decode_err = |e: png::DecodingError| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    };

    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(decode_err)?;

    let source_depth = reader.info().bit_depth;
    if source_depth == BitDepth::Sixteen {
        return Err(Error::UnsupportedBitDepth {
            path: path.to_path_buf(),
            bits: 16,
        });
    }

    let size = reader.output_buffer_size().ok_or_else(|| Error::Decode {
        path: path.to_path_buf(),
        message: "image too large".into(),
    })?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(decode_err)?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    let bytes = &buf[..frame.buffer_size()];
    let stride = frame.line_size;

    let mut rgb = Vec::with_capacity(width * height * 3);
    for row in bytes.chunks_exact(stride).take(height) {
        match frame.color_type {
            ColorType::Grayscale => {
                for &v in &row[..width] {
                    rgb.extend_from_slice(&[v, v, v]);
                }
            }
            ColorType::GrayscaleAlpha => {
                for px in row[..width * 2].chunks_exact(2) {
                    let v = over_white(px[0], px[1]);
                    rgb.extend_from_slice(&[v, v, v]);
                }
            }
            ColorType::Rgb => rgb.extend_from_slice(&row[..width * 3]),
            ColorType::Rgba => {
                for px in row[..width * 4].chunks_exact(4) {
                    rgb.extend_from_slice(&[
                        over_white(px[0], px[3]),
                        over_white(px[1], px[3]),
                        over_white(px[2], px[3]),
                    ]);
                }
            }
            ColorType::Indexed => {
                return Err(Error::Decode {
                    path: path.to_path_buf(),
                    message: "palette was not expanded".into(),
                })
            }
        }
    }
    ColorImage::new(width, height, rgb)
}

/// Loads a PNG as an intensity map (grayscale PNGs map to `v / 255` exactly).
pub fn load_intensity<T: Scalar>(path: impl AsRef<Path>) -> Result<IntensityMap<T>> {
    Ok(crate::image::to_intensity(&load_image(path)?))
}

/// `round((c * a + 255 * (255 - a)) / 255)` in integer arithmetic.
#[inline]
fn over_white(channel: u8, alpha: u8) -> u8 {
    let a = u32::from(alpha);
    let num = u32::from(channel) * a + 255 * (255 - a);
    ((num + 127) / 255) as u8
}

/// Writes a lossless 8-bit PNG. Intensity maps are quantized with `round(v * 255)`.
pub fn save_image(img: &impl PngRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (width, height, color, bytes) = img.png_parts();
    let file = File::create(path).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })?;
    let encode_err = |e: png::EncodingError| Error::Encode {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(color);
    encoder.set_depth(BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(encode_err)?;
    writer.write_image_data(&bytes).map_err(encode_err)?;
    writer.finish().map_err(encode_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_raw(path: &Path, w: u32, h: u32, color: ColorType, depth: BitDepth, data: &[u8]) {
        let file = File::create(path).unwrap();
        let mut enc = png::Encoder::new(BufWriter::new(file), w, h);
        enc.set_color(color);
        enc.set_depth(depth);
        let mut writer = enc.write_header().unwrap();
        writer.write_image_data(data).unwrap();
    }

    #[test]
    fn decodes_rgb_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.png");
        let data = [0, 0, 0, 255, 255, 255, 255, 0, 0, 0, 0, 255];
        write_raw(&path, 2, 2, ColorType::Rgb, BitDepth::Eight, &data);
        let img = load_image(&path).unwrap();
        assert_eq!(img.dimensions(), (2, 2));
        assert_eq!(img.as_raw(), &data);
    }

    #[test]
    fn grayscale_is_replicated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gray.png");
        write_raw(&path, 1, 1, ColorType::Grayscale, BitDepth::Eight, &[128]);
        assert_eq!(load_image(&path).unwrap().pixel(0, 0), [128, 128, 128]);
    }

    #[test]
    fn low_bit_depth_is_widened() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bilevel.png");
        // 1-bit row: pixels 1,0,1,1 then padding
        write_raw(
            &path,
            4,
            1,
            ColorType::Grayscale,
            BitDepth::One,
            &[0b1011_0000],
        );
        let img = load_image(&path).unwrap();
        let values: Vec<u8> = img.pixels().map(|p| p[0]).collect();
        assert_eq!(values, vec![255, 0, 255, 255]);
    }

    #[test]
    fn alpha_composited_over_white() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgba.png");
        write_raw(
            &path,
            1,
            1,
            ColorType::Rgba,
            BitDepth::Eight,
            &[255, 0, 0, 128],
        );
        let px = load_image(&path).unwrap().pixel(0, 0);
        // 255 * (1 - 128/255) = 127 exactly
        assert_eq!(px[0], 255);
        assert!(
            px[1].abs_diff(127) <= 1 && px[2].abs_diff(127) <= 1,
            "{px:?}"
        );

        let path = dir.path().join("la.png");
        write_raw(
            &path,
            1,
            1,
            ColorType::GrayscaleAlpha,
            BitDepth::Eight,
            &[0, 0],
        );
        assert_eq!(load_image(&path).unwrap().pixel(0, 0), [255, 255, 255]);
    }

    #[test]
    fn sixteen_bit_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        write_raw(
            &path,
            1,
            1,
            ColorType::Grayscale,
            BitDepth::Sixteen,
            &[1, 2],
        );
        assert!(matches!(
            load_image(&path),
            Err(Error::UnsupportedBitDepth { bits: 16, .. })
        ));
    }

    #[test]
    fn missing_and_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_image(dir.path().join("nope.png")),
            Err(Error::Read { .. })
        ));
        let path = dir.path().join("junk.png");
        std::fs::write(&path, b"\x89PNG\r\n\x1a\nthis is not a png").unwrap();
        assert!(matches!(load_image(&path), Err(Error::Decode { .. })));
    }

    #[test]
    fn unwritable_path() {
        let img = ColorImage::filled(1, 1, [1, 2, 3]);
        let err = save_image(&img, "/nonexistent-dir/x/out.png").unwrap_err();
        assert!(matches!(err, Error::Write { .. }));
    }

    #[test]
    fn intensity_quantization_on_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.png");
        let map = IntensityMap::new(3, 1, vec![0.5f64, 1.0, 0.0]).unwrap();
        save_image(&map, &path).unwrap();
        let back = load_image(&path).unwrap();
        let bytes: Vec<u8> = back.pixels().map(|p| p[0]).collect();
        assert_eq!(bytes, vec![128, 255, 0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn color_round_trip_bit_exact(w in 1usize..9, h in 1usize..9, seed in any::<u64>()) {
            let mut state = seed;
            let img = ColorImage::from_fn(w, h, |_, _| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = state.to_le_bytes();
                [b[5], b[6], b[7]]
            });
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("rt.png");
            save_image(&img, &path).unwrap();
            prop_assert_eq!(load_image(&path).unwrap(), img);
        }
    }
}
