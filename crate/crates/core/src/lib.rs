//! Turns color illustrations into screentoned manga.
//!
//! The pipeline computes a grayscale intensity map, obtains a rough
//! screentoned map from a [`toner::RoughGenerator`], partitions the
//! illustration into connected color regions, and imprints the screentones
//! through region-adaptive HSV scaling.
//!
//! Numeric stages are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar for common use.

pub mod error;
pub mod image;
pub mod io;
pub mod num;
pub mod pipeline;
pub mod sample;
pub mod scaling;
pub mod segmentation;
pub mod toner;

pub use error::{Error, Result};
pub use image::{hsv_to_rgb, rgb_to_hsv, to_intensity, ColorImage, Hsv, HsvImage, IntensityMap};
pub use io::{load_image, load_intensity, save_image};
pub use num::Scalar;
pub use pipeline::{
    parse_config, run_pipeline, ConfigOverrides, GeneratorChoice, InputKind, PipelineConfig,
    RunReport,
};
pub use scaling::{
    adaptive_scale, compose_final, match_histogram, pixel_scale, scaling_range, Channel,
    ScalingParams, ScalingRange,
};
pub use segmentation::{kmeans_colors, region_stats, split_connected, LabelMap, RegionStats};
pub use toner::{run_external_generator, synthesize, PatternFamily, PatternSpec, RoughGenerator};

pub type IntensityMap32 = IntensityMap<f32>;
pub type IntensityMap64 = IntensityMap<f64>;
pub type HsvImage32 = HsvImage<f32>;
pub type HsvImage64 = HsvImage<f64>;
pub type RegionStats32 = RegionStats<f32>;
pub type RegionStats64 = RegionStats<f64>;
pub type ScalingParams32 = ScalingParams<f32>;
pub type ScalingParams64 = ScalingParams<f64>;
pub type PatternSpec32 = PatternSpec<f32>;
pub type PatternSpec64 = PatternSpec<f64>;
