//! Process-boundary generators.
//!
//! Wire contract: the caller writes an 8-bit PNG to `{in}`, runs the command
//! with `{in}`/`{out}` substituted, and expects exit status 0 plus an 8-bit
//! PNG of identical dimensions at `{out}`. The command is tokenized with
//! shell quoting rules and executed directly, without a shell.

use std::path::{Path, PathBuf};
use std::process::Command;

use super::RoughGenerator;
use crate::error::{dims_match, Error, Result};
use crate::image::{to_intensity, ColorImage, IntensityMap};
use crate::io::{load_image, save_image};
use crate::num::Scalar;

const IN: &str = "{in}";
const OUT: &str = "{out}";
const STDERR_TAIL: usize = 4096;

/// A tokenized command line with `{in}` and `{out}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandTemplate {
    raw: String,
    words: Vec<String>,
}

impl CommandTemplate {
    pub fn parse(template: &str) -> Result<Self> {
        let words = shell_words::split(template)
            .map_err(|e| Error::Template(format!("`{template}`: {e}")))?;
        if words.is_empty() {
            return Err(Error::Template("command template is empty".into()));
        }
        for placeholder in [IN, OUT] {
            if !words.iter().any(|w| w.contains(placeholder)) {
                return Err(Error::Template(format!(
                    "`{template}` is missing the {placeholder} placeholder"
                )));
            }
        }
        Ok(Self {
            raw: template.to_string(),
            words,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    /// Program and arguments with placeholders substituted.
    pub fn render(&self, input: &Path, output: &Path) -> (String, Vec<String>) {
        let input = input.to_string_lossy();
        let output = output.to_string_lossy();
        let mut words = self
            .words
            .iter()
            .map(|w| w.replace(IN, &input).replace(OUT, &output));
        let program = words.next().expect("template has at least one word");
        (program, words.collect())
    }
}

/// Runs `template` on an existing PNG and loads the PNG it writes to `output`.
///
/// The produced image must match the input's dimensions.
pub fn run_external_command(
    template: &CommandTemplate,
    input: &Path,
    output: &Path,
) -> Result<ColorImage> {
    let expected = load_image(input)?.dimensions();
    let (program, args) = template.render(input, output);
    let rendered = shell_words::join(std::iter::once(&program).chain(&args));
    log::debug!("running external command: {rendered}");

    let result = Command::new(&program)
        .args(&args)
        .output()
        .map_err(|source| Error::GeneratorSpawn {
            command: rendered.clone(),
            source,
        })?;
    if !result.status.success() {
        let stderr = String::from_utf8_lossy(&result.stderr);
        let start = stderr.len().saturating_sub(STDERR_TAIL);
        let start = (start..stderr.len())
            .find(|&i| stderr.is_char_boundary(i))
            .unwrap_or(stderr.len());
        return Err(Error::GeneratorFailed {
            command: rendered,
            status: result.status.to_string(),
            stderr: stderr[start..].trim_end().to_string(),
        });
    }
    if !output.is_file() {
        return Err(Error::MissingOutput(output.to_path_buf()));
    }
    let produced = load_image(output)?;
    dims_match("generator output", expected, produced.dimensions())?;
    Ok(produced)
}

/// Runs an external generator on an intensity PNG already on disk.
///
/// The output is written into a fresh temporary directory that is removed
/// afterwards; the result is normalized to `[0, 1]`.
pub fn run_external_generator<T: Scalar>(
    intensity_path: &Path,
    command: &str,
) -> Result<IntensityMap<T>> {
    let template = CommandTemplate::parse(command)?;
    let dir = tempfile::tempdir().map_err(|source| Error::Write {
        path: std::env::temp_dir(),
        source,
    })?;
    let out = dir.path().join("rough.png");
    let produced = run_external_command(&template, intensity_path, &out)?;
    Ok(to_intensity(&produced))
}

/// [`RoughGenerator`] backed by an external command.
#[derive(Debug, Clone)]
pub struct ExternalGenerator {
    template: CommandTemplate,
    /// Keep the exchanged PNGs here instead of a temporary directory.
    keep_dir: Option<PathBuf>,
}

impl ExternalGenerator {
    pub fn new(template: CommandTemplate) -> Self {
        Self {
            template,
            keep_dir: None,
        }
    }

    pub fn keep_files_in(mut self, dir: impl Into<PathBuf>) -> Self {
        self.keep_dir = Some(dir.into());
        self
    }

    pub fn template(&self) -> &CommandTemplate {
        &self.template
    }
}

impl<T: Scalar> RoughGenerator<T> for ExternalGenerator {
    fn generate(&self, intensity: &IntensityMap<T>) -> Result<IntensityMap<T>> {
        let temp;
        let dir = match &self.keep_dir {
            Some(dir) => dir.as_path(),
            None => {
                temp = tempfile::tempdir().map_err(|source| Error::Write {
                    path: std::env::temp_dir(),
                    source,
                })?;
                temp.path()
            }
        };
        let input = dir.join("generator_in.png");
        let output = dir.join("generator_out.png");
        save_image(intensity, &input)?;
        let produced = run_external_command(&self.template, &input, &output)?;
        Ok(to_intensity(&produced))
    }
}
