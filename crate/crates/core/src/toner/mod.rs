//! Rough-manga generation: a classical threshold-field halftoner, and the
//! external-command boundary for plugging in other generators.

mod external;
mod pattern;

pub use external::{
    run_external_command, run_external_generator, CommandTemplate, ExternalGenerator,
};
pub use pattern::{bayer_matrix, synthesize, PatternFamily, PatternSpec};

use crate::error::Result;
use crate::image::IntensityMap;
use crate::num::Scalar;

/// Produces a rough screentoned map from an intensity map of the same size.
pub trait RoughGenerator<T: Scalar> {
    fn generate(&self, intensity: &IntensityMap<T>) -> Result<IntensityMap<T>>;
}

impl<T: Scalar, F> RoughGenerator<T> for F
where
    F: Fn(&IntensityMap<T>) -> Result<IntensityMap<T>>,
{
    fn generate(&self, intensity: &IntensityMap<T>) -> Result<IntensityMap<T>> {
        self(intensity)
    }
}

impl<T: Scalar> RoughGenerator<T> for PatternSpec<T> {
    fn generate(&self, intensity: &IntensityMap<T>) -> Result<IntensityMap<T>> {
        synthesize(intensity, self)
    }
}
