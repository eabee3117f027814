//! End-to-end orchestration: illustration in, screentoned manga out.

mod config;

pub use config::{parse_config, ConfigOverrides, GeneratorChoice, InputKind, PipelineConfig};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::image::{to_intensity, ColorImage, IntensityMap};
use crate::io::{load_image, save_image};
use crate::num::Scalar;
use crate::scaling::{adaptive_scale_detailed, compose_final, ScaledIllustration, ScalingParams};
use crate::segmentation::{
    kmeans_colors_with, region_stats, split_connected, KMeansConfig, LabelMap, RegionStats,
};
use crate::toner::{run_external_command, ExternalGenerator, PatternSpec, RoughGenerator};

#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub stage: &'static str,
    pub elapsed: Duration,
}

/// Outcome of processing one image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageReport {
    pub input: PathBuf,
    pub output: PathBuf,
    pub width: usize,
    pub height: usize,
    pub region_count: usize,
    pub stages: Vec<StageTiming>,
    /// Hex SHA-256 of the final manga's 8-bit pixels, row-major.
    pub checksum: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub images: Vec<ImageReport>,
}

impl RunReport {
    pub fn total_time(&self) -> Duration {
        self.images
            .iter()
            .flat_map(|r| &r.stages)
            .map(|s| s.elapsed)
            .sum()
    }
}

/// Every intermediate of one run through the stages.
#[derive(Debug, Clone)]
pub struct Artifacts<T> {
    pub intensity: IntensityMap<T>,
    pub rough: IntensityMap<T>,
    pub clusters: LabelMap,
    pub regions: LabelMap,
    pub stats: Vec<RegionStats<T>>,
    pub scaled: ScaledIllustration<T>,
    pub manga: IntensityMap<T>,
}

#[derive(Debug, Default)]
struct Timer {
    stages: Vec<StageTiming>,
}

impl Timer {
    fn run<R>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<R>) -> Result<R> {
        let start = Instant::now();
        let out = f().map_err(|e| e.in_stage(stage))?;
        let elapsed = start.elapsed();
        log::debug!("stage {stage}: {elapsed:?}");
        self.stages.push(StageTiming { stage, elapsed });
        Ok(out)
    }
}

/// Runs the in-memory stages on an illustration.
pub fn process_illustration<T: Scalar>(
    illustration: &ColorImage,
    generator: &dyn RoughGenerator<T>,
    kmeans: &KMeansConfig,
    params: &ScalingParams<T>,
) -> Result<(Artifacts<T>, Vec<StageTiming>)> {
    let mut timer = Timer::default();
    let artifacts = process_timed(illustration, generator, kmeans, params, &mut timer)?;
    Ok((artifacts, timer.stages))
}

fn process_timed<T: Scalar>(
    illustration: &ColorImage,
    generator: &dyn RoughGenerator<T>,
    kmeans: &KMeansConfig,
    params: &ScalingParams<T>,
    timer: &mut Timer,
) -> Result<Artifacts<T>> {
    let intensity = timer.run("intensity", || Ok(to_intensity::<T>(illustration)))?;
    let rough = timer.run("generate", || {
        let rough = generator.generate(&intensity)?;
        crate::error::dims_match("rough map", intensity.dimensions(), rough.dimensions())?;
        Ok(rough)
    })?;
    let clusters = timer.run("kmeans", || kmeans_colors_with::<T>(illustration, kmeans))?;
    let regions = timer.run("split", || Ok(split_connected(&clusters)))?;
    let stats = timer.run("stats", || {
        region_stats(&regions, &rough, Some(illustration))
    })?;
    let scaled = timer.run("scale", || {
        adaptive_scale_detailed(illustration, &rough, &regions, &stats, params)
    })?;
    let manga = timer.run("compose", || compose_final(&scaled.image, &rough, params))?;
    Ok(Artifacts {
        intensity,
        rough,
        clusters,
        regions,
        stats,
        scaled,
        manga,
    })
}

/// Hex SHA-256 of the 8-bit quantized map.
pub fn checksum<T: Scalar>(map: &IntensityMap<T>) -> String {
    let digest = Sha256::digest(map.to_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Directory receiving intermediates for `output`: `<stem>.intermediates` beside it.
pub fn intermediates_dir(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "manga".into());
    output.with_file_name(format!("{stem}.intermediates"))
}

/// Runs the configured pipeline on a single file or on every PNG in a directory.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport> {
    let input = config
        .input
        .as_deref()
        .ok_or_else(|| Error::Config("no input path given".into()))?;
    let output = config
        .output
        .as_deref()
        .ok_or_else(|| Error::Config("no output path given".into()))?;

    if input.is_dir() {
        let jobs = batch_jobs(input, output)?;
        // images are independent; collect keeps input order
        let results: Vec<Result<ImageReport>> = jobs
            .par_iter()
            .map(|(src, dst)| run_single(config, src, dst))
            .collect();
        let images = results.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(RunReport { images })
    } else {
        Ok(RunReport {
            images: vec![run_single(config, input, output)?],
        })
    }
}

fn batch_jobs(input: &Path, output: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    if output.exists() && !output.is_dir() {
        return Err(Error::Config(format!(
            "input {} is a directory, so output {} must be one too",
            input.display(),
            output.display()
        )));
    }
    std::fs::create_dir_all(output).map_err(|source| Error::Write {
        path: output.to_path_buf(),
        source,
    })?;
    let entries = std::fs::read_dir(input).map_err(|source| Error::Read {
        path: input.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| Error::Read {
                path: input.to_path_buf(),
                source,
            })?
            .path();
        let is_png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if path.is_file() && is_png {
            files.push(path);
        }
    }
    files.sort();
    Ok(files
        .into_iter()
        .map(|src| {
            let dst = output.join(src.file_name().expect("file has a name"));
            (src, dst)
        })
        .collect())
}

fn run_single(config: &PipelineConfig, input: &Path, output: &Path) -> Result<ImageReport> {
    let mut timer = Timer::default();

    let dump_dir = config.dump_intermediates.then(|| intermediates_dir(output));
    if let Some(dir) = &dump_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Write {
            path: dir.clone(),
            source,
        })?;
    }
    // exchanged files for external commands land here; dropped on return
    let scratch = match &dump_dir {
        Some(dir) => Scratch::Kept(dir.clone()),
        None => Scratch::Temp(tempfile::tempdir().map_err(|source| Error::Write {
            path: std::env::temp_dir(),
            source,
        })?),
    };

    let illustration = match (&config.input_kind, &config.colorizer) {
        (InputKind::Sketch, Some(colorizer)) => timer.run("colorize", || {
            load_image(input)?;
            run_external_command(colorizer, input, &scratch.path().join("colorized.png"))
        })?,
        (InputKind::Sketch, None) => {
            return Err(Error::Config(
                "input_kind = sketch needs a colorizer command".into(),
            ))
        }
        (InputKind::Illustration, _) => timer.run("load", || load_image(input))?,
    };

    let generator: Box<dyn RoughGenerator<f64>> = match &config.generator {
        GeneratorChoice::Builtin(spec) => Box::new(*spec as PatternSpec<f64>),
        GeneratorChoice::External(template) => {
            Box::new(ExternalGenerator::new(template.clone()).keep_files_in(scratch.path()))
        }
    };

    let artifacts = process_timed(
        &illustration,
        generator.as_ref(),
        &config.kmeans,
        &config.scaling,
        &mut timer,
    )?;

    timer.run("save", || {
        if let Some(dir) = &dump_dir {
            save_image(&artifacts.intensity, dir.join("intensity.png"))?;
            save_image(&artifacts.rough, dir.join("rough.png"))?;
            save_image(&artifacts.regions.render(), dir.join("labels.png"))?;
            save_image(&artifacts.scaled.image, dir.join("scaled.png"))?;
            save_image(
                &artifacts.scaled.hsv.saturation_map(),
                dir.join("scaled_s.png"),
            )?;
            save_image(&artifacts.scaled.hsv.value_map(), dir.join("scaled_v.png"))?;
        }
        save_image(&artifacts.manga, output)
    })?;

    let report = ImageReport {
        input: input.to_path_buf(),
        output: output.to_path_buf(),
        width: illustration.width(),
        height: illustration.height(),
        region_count: artifacts.regions.region_count(),
        stages: timer.stages,
        checksum: checksum(&artifacts.manga),
    };
    log::info!(
        "{} -> {}: {} regions, checksum {}",
        input.display(),
        output.display(),
        report.region_count,
        report.checksum
    );
    Ok(report)
}

enum Scratch {
    Kept(PathBuf),
    Temp(tempfile::TempDir),
}

impl Scratch {
    fn path(&self) -> &Path {
        match self {
            Scratch::Kept(p) => p,
            Scratch::Temp(t) => t.path(),
        }
    }
}
