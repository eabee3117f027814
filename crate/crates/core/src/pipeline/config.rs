//! Pipeline configuration: defaults, a flat TOML file, and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scaling::{Channel, ScalingParams};
use crate::segmentation::KMeansConfig;
use crate::toner::{CommandTemplate, PatternFamily, PatternSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    #[default]
    Illustration,
    /// Line-art sketch; colorized by an external command first.
    Sketch,
}

impl FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "illustration" => Ok(Self::Illustration),
            "sketch" => Ok(Self::Sketch),
            other => Err(Error::Config(format!(
                "unknown input kind `{other}` (expected illustration or sketch)"
            ))),
        }
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Illustration => "illustration",
            Self::Sketch => "sketch",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorChoice {
    Builtin(PatternSpec<f64>),
    External(CommandTemplate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Input PNG, or a directory of PNGs for batch mode.
    pub input: Option<PathBuf>,
    /// Output PNG, or a directory in batch mode.
    pub output: Option<PathBuf>,
    pub generator: GeneratorChoice,
    pub kmeans: KMeansConfig,
    pub scaling: ScalingParams<f64>,
    pub dump_intermediates: bool,
    pub input_kind: InputKind,
    pub colorizer: Option<CommandTemplate>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            output: None,
            generator: GeneratorChoice::Builtin(PatternSpec::default()),
            kmeans: KMeansConfig::default(),
            scaling: ScalingParams::default(),
            dump_intermediates: false,
            input_kind: InputKind::Illustration,
            colorizer: None,
        }
    }
}

/// Every configurable value, each optional. Used both for the config file
/// and for command-line flags; unknown file keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// `builtin` or a command template containing `{in}` and `{out}`.
    pub generator: Option<String>,
    pub pattern: Option<PatternFamily>,
    pub frequency: Option<f64>,
    pub angle: Option<f64>,
    pub bayer_order: Option<usize>,
    pub black_point: Option<f64>,
    pub white_point: Option<f64>,
    pub kmeans_k: Option<usize>,
    pub kmeans_max_iters: Option<usize>,
    pub kmeans_restarts: Option<usize>,
    pub seed: Option<u64>,
    pub w_low: Option<f64>,
    pub w_high: Option<f64>,
    pub channel: Option<Channel>,
    pub match_hist: Option<bool>,
    pub low_sat_fallback: Option<f64>,
    pub min_region_pixels: Option<usize>,
    pub dump_intermediates: Option<bool>,
    pub input_kind: Option<InputKind>,
    pub colorizer: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl ConfigOverrides {
    /// Reads a flat TOML key/value file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    /// Values set in `top` win.
    pub fn overlay(mut self, top: ConfigOverrides) -> Self {
        overlay!(self, top;
            input, output, generator, pattern, frequency, angle, bayer_order,
            black_point, white_point, kmeans_k, kmeans_max_iters, kmeans_restarts,
            seed, w_low, w_high, channel, match_hist, low_sat_fallback,
            min_region_pixels, dump_intermediates, input_kind, colorizer,
        );
        self
    }

    /// Applies the overrides to the defaults and validates the result.
    pub fn resolve(self) -> Result<PipelineConfig> {
        let defaults = PipelineConfig::default();

        let mut spec = PatternSpec::<f64>::default();
        if let Some(v) = self.pattern {
            spec.family = v;
        }
        if let Some(v) = self.frequency {
            spec.frequency = v;
        }
        if let Some(v) = self.angle {
            spec.angle = v;
        }
        if let Some(v) = self.bayer_order {
            spec.bayer_order = v;
        }
        if let Some(v) = self.black_point {
            spec.black_point = v;
        }
        if let Some(v) = self.white_point {
            spec.white_point = v;
        }
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;

        let generator = match self.generator.as_deref().map(str::trim) {
            None | Some("builtin") => GeneratorChoice::Builtin(spec),
            Some(template) => GeneratorChoice::External(
                CommandTemplate::parse(template)
                    .map_err(|e| Error::Config(format!("generator: {e}")))?,
            ),
        };

        let mut kmeans = defaults.kmeans;
        if let Some(k) = self.kmeans_k {
            if k == 0 {
                return Err(Error::Config("kmeans_k must be at least 1 (got 0)".into()));
            }
            kmeans.k = k;
        }
        if let Some(n) = self.kmeans_max_iters {
            if n == 0 {
                return Err(Error::Config(
                    "kmeans_max_iters must be at least 1 (got 0)".into(),
                ));
            }
            kmeans.max_iters = n;
        }
        if let Some(n) = self.kmeans_restarts {
            if n == 0 {
                return Err(Error::Config(
                    "kmeans_restarts must be at least 1 (got 0)".into(),
                ));
            }
            kmeans.n_init = n;
        }
        if let Some(seed) = self.seed {
            kmeans.seed = seed;
        }

        let mut scaling = defaults.scaling;
        if let Some(v) = self.w_low {
            scaling.w_low = v;
        }
        if let Some(v) = self.w_high {
            scaling.w_high = v;
        }
        if let Some(v) = self.channel {
            scaling.channel = v;
        }
        if let Some(v) = self.match_hist {
            scaling.histogram_match = v;
        }
        if let Some(v) = self.low_sat_fallback {
            scaling.low_sat_fallback = v;
        }
        if let Some(v) = self.min_region_pixels {
            scaling.min_region_pixels = v;
        }
        scaling.validate()?;

        let input_kind = self.input_kind.unwrap_or_default();
        let colorizer = self
            .colorizer
            .as_deref()
            .map(|t| {
                CommandTemplate::parse(t).map_err(|e| Error::Config(format!("colorizer: {e}")))
            })
            .transpose()?;
        match (input_kind, &colorizer) {
            (InputKind::Sketch, None) => return Err(Error::Config(
                "input_kind = sketch needs a colorizer command (no colorization model is bundled)"
                    .into(),
            )),
            (InputKind::Illustration, Some(_)) => {
                return Err(Error::Config(
                    "a colorizer was given but input_kind is illustration; set input_kind = sketch"
                        .into(),
                ))
            }
            _ => {}
        }

        Ok(PipelineConfig {
            input: self.input,
            output: self.output,
            generator,
            kmeans,
            scaling,
            dump_intermediates: self.dump_intermediates.unwrap_or(false),
            input_kind,
            colorizer,
        })
    }
}

/// Builds a configuration from defaults, an optional config file, and flags
/// (flags take precedence over the file).
pub fn parse_config(flags: ConfigOverrides, file: Option<&Path>) -> Result<PipelineConfig> {
    let base = match file {
        Some(path) => ConfigOverrides::from_file(path)?,
        None => ConfigOverrides::default(),
    };
    base.overlay(flags).resolve()
}
