use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sketch2manga::pipeline::{parse_config, run_pipeline, ConfigOverrides, InputKind};
use sketch2manga::sample::sample_illustration;
use sketch2manga::{save_image, Channel, PatternFamily};

#[derive(Parser, Debug)]
#[command(
    name = "sketch2manga",
    version,
    about = "Turn color illustrations into screentoned manga"
)]
struct Cli {
    /// Enable verbose logging.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the screening pipeline on a PNG or a directory of PNGs.
    Run(Box<RunArgs>),
    /// Write the procedural sample illustration.
    Sample {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 64)]
        size: usize,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Input PNG, or a directory for batch mode.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Output PNG, or a directory for batch mode.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Flat key/value (TOML) config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// `builtin`, or a command template with {in} and {out} placeholders.
    #[arg(long)]
    generator: Option<String>,

    #[arg(long, value_parser = parse_pattern)]
    pattern: Option<PatternFamily>,

    /// Screen frequency in cycles per pixel (dot and line patterns).
    #[arg(long)]
    frequency: Option<f64>,

    /// Screen angle in degrees.
    #[arg(long)]
    angle: Option<f64>,

    #[arg(long)]
    bayer_order: Option<usize>,

    #[arg(long)]
    black_point: Option<f64>,

    #[arg(long)]
    white_point: Option<f64>,

    /// Number of k-means color clusters.
    #[arg(long)]
    kmeans_k: Option<usize>,

    #[arg(long)]
    kmeans_max_iters: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    w_low: Option<f64>,

    #[arg(long)]
    w_high: Option<f64>,

    #[arg(long, value_parser = parse_channel)]
    channel: Option<Channel>,

    /// Match the final histogram to the rough manga's.
    #[arg(long)]
    match_hist: bool,

    #[arg(long)]
    low_sat_fallback: Option<f64>,

    #[arg(long)]
    min_region_pixels: Option<usize>,

    /// Keep intensity.png, rough.png, labels.png, scaled.png beside the output.
    #[arg(long)]
    dump_intermediates: bool,

    #[arg(long, value_parser = parse_input_kind)]
    input_kind: Option<InputKind>,

    /// Colorization command template for sketch input, with {in} and {out}.
    #[arg(long)]
    colorizer: Option<String>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_pattern(s: &str) -> Result<PatternFamily, String> {
    s.parse().map_err(|e: sketch2manga::Error| e.to_string())
}

fn parse_channel(s: &str) -> Result<Channel, String> {
    s.parse().map_err(|e: sketch2manga::Error| e.to_string())
}

fn parse_input_kind(s: &str) -> Result<InputKind, String> {
    s.parse().map_err(|e: sketch2manga::Error| e.to_string())
}

impl RunArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            input: self.input.clone(),
            output: self.output.clone(),
            generator: self.generator.clone(),
            pattern: self.pattern,
            frequency: self.frequency,
            angle: self.angle,
            bayer_order: self.bayer_order,
            black_point: self.black_point,
            white_point: self.white_point,
            kmeans_k: self.kmeans_k,
            kmeans_max_iters: self.kmeans_max_iters,
            kmeans_restarts: None,
            seed: self.seed,
            w_low: self.w_low,
            w_high: self.w_high,
            channel: self.channel,
            match_hist: self.match_hist.then_some(true),
            low_sat_fallback: self.low_sat_fallback,
            min_region_pixels: self.min_region_pixels,
            dump_intermediates: self.dump_intermediates.then_some(true),
            input_kind: self.input_kind,
            colorizer: self.colorizer.clone(),
        }
    }
}

const EXIT_STAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn run(args: RunArgs) -> ExitCode {
    let config = match parse_config(args.overrides(), args.config.as_deref()) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if config.input.is_none() || config.output.is_none() {
        eprintln!(
            "error: both --input and --output are required (on the command line or in --config)"
        );
        return ExitCode::from(EXIT_CONFIG);
    }

    let result = match args.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run_pipeline(&config)),
            Err(e) => {
                eprintln!("error: cannot start {n} worker threads: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => run_pipeline(&config),
    };

    match result {
        Ok(report) => {
            for image in &report.images {
                println!(
                    "{} -> {} ({}x{}, {} regions)",
                    image.input.display(),
                    image.output.display(),
                    image.width,
                    image.height,
                    image.region_count
                );
                for stage in &image.stages {
                    println!(
                        "  {:<10} {:>10.3} ms",
                        stage.stage,
                        stage.elapsed.as_secs_f64() * 1e3
                    );
                }
                println!("  checksum   {}", image.checksum);
            }
            ExitCode::SUCCESS
        }
        Err(e) if e.is_config() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_STAGE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Run(args) => run(*args),
        Command::Sample { output, size } => {
            if size == 0 {
                eprintln!("error: --size must be at least 1");
                return ExitCode::from(EXIT_CONFIG);
            }
            match save_image(&sample_illustration(size), &output) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_STAGE)
                }
            }
        }
    }
}
