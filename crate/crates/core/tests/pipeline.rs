use std::path::{Path, PathBuf};

use sketch2manga::io::load_intensity;
use sketch2manga::pipeline::{checksum, intermediates_dir, process_illustration};
use sketch2manga::sample::sample_illustration;
use sketch2manga::scaling::compose_final;
use sketch2manga::{
    load_image, parse_config, run_pipeline, save_image, ColorImage, ConfigOverrides, Error,
    IntensityMap, PatternSpec, PipelineConfig, ScalingParams,
};

fn config_for(input: &Path, output: &Path, extra: ConfigOverrides) -> PipelineConfig {
    let flags = ConfigOverrides {
        input: Some(input.to_path_buf()),
        output: Some(output.to_path_buf()),
        ..extra
    };
    parse_config(flags, None).unwrap()
}

fn write_sample(dir: &Path, name: &str, size: usize) -> PathBuf {
    let path = dir.join(name);
    save_image(&sample_illustration(size), &path).unwrap();
    path
}

#[test]
fn constant_white_stays_white() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("white.png");
    save_image(&ColorImage::filled(32, 32, [255, 255, 255]), &input).unwrap();
    let output = dir.path().join("out.png");
    let report = run_pipeline(&config_for(&input, &output, ConfigOverrides::default())).unwrap();
    assert_eq!(report.images[0].region_count, 1);
    let manga = load_intensity::<f64>(&output).unwrap();
    assert!(manga.as_slice().iter().all(|&v| v == 1.0));
}

#[test]
fn pipeline_matches_manual_stage_chain() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "sample.png", 48);
    let output = dir.path().join("out.png");
    let config = config_for(
        &input,
        &output,
        ConfigOverrides {
            seed: Some(3),
            kmeans_k: Some(6),
            ..Default::default()
        },
    );
    let report = run_pipeline(&config).unwrap();

    let img = load_image(&input).unwrap();
    let spec = PatternSpec::<f64>::default();
    let (artifacts, stages) =
        process_illustration(&img, &spec, &config.kmeans, &config.scaling).unwrap();
    assert_eq!(report.images[0].checksum, checksum(&artifacts.manga));
    assert_eq!(
        report.images[0].region_count,
        artifacts.regions.region_count()
    );
    assert_eq!(
        load_intensity::<f64>(&output).unwrap().to_bytes(),
        artifacts.manga.to_bytes()
    );

    let names: Vec<&str> = report.images[0].stages.iter().map(|s| s.stage).collect();
    assert_eq!(
        names,
        [
            "load",
            "intensity",
            "generate",
            "kmeans",
            "split",
            "stats",
            "scale",
            "compose",
            "save"
        ]
    );
    assert_eq!(stages.len(), 7);
}

#[test]
fn identity_external_generator_matches_direct_stages() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "sample.png", 40);
    let output = dir.path().join("out.png");
    let config = config_for(
        &input,
        &output,
        ConfigOverrides {
            generator: Some("cp {in} {out}".into()),
            ..Default::default()
        },
    );
    let report = run_pipeline(&config).unwrap();

    // the copier hands back the 8-bit quantized intensity map
    let img = load_image(&input).unwrap();
    let quantized =
        |m: &IntensityMap<f64>| IntensityMap::from_bytes(m.width(), m.height(), &m.to_bytes());
    let (artifacts, _) =
        process_illustration(&img, &quantized, &config.kmeans, &config.scaling).unwrap();
    assert_eq!(report.images[0].checksum, checksum(&artifacts.manga));

    // a smooth rough map barely moves the result away from plain grayscale
    let unscaled = compose_final(&img, &artifacts.rough, &ScalingParams::default()).unwrap();
    let worst = unscaled
        .as_slice()
        .iter()
        .zip(artifacts.manga.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 0.05, "max deviation {worst}");
}

#[test]
fn f32_and_f64_paths_agree_closely() {
    let img = sample_illustration(32);
    let config = PipelineConfig::default();
    let (a64, _) = process_illustration(
        &img,
        &PatternSpec::<f64>::default(),
        &config.kmeans,
        &config.scaling,
    )
    .unwrap();
    let params32 = ScalingParams::<f32>::default();
    let (a32, _) = process_illustration(
        &img,
        &PatternSpec::<f32>::default(),
        &config.kmeans,
        &params32,
    )
    .unwrap();
    assert_eq!(a64.regions, a32.regions);
    let differing = a64
        .manga
        .to_bytes()
        .iter()
        .zip(a32.manga.to_bytes())
        .filter(|(a, b)| a.abs_diff(*b) > 1)
        .count();
    assert_eq!(differing, 0);
}

#[test]
fn dumps_intermediates_with_fixed_names() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "sample.png", 32);
    let output = dir.path().join("manga.png");
    let config = config_for(
        &input,
        &output,
        ConfigOverrides {
            dump_intermediates: Some(true),
            generator: Some("cp {in} {out}".into()),
            ..Default::default()
        },
    );
    run_pipeline(&config).unwrap();
    let dump = intermediates_dir(&output);
    assert_eq!(dump, dir.path().join("manga.intermediates"));
    for name in [
        "intensity.png",
        "rough.png",
        "labels.png",
        "scaled.png",
        "scaled_s.png",
        "scaled_v.png",
        "generator_in.png",
        "generator_out.png",
    ] {
        assert!(dump.join(name).is_file(), "missing {name}");
    }
}

#[test]
fn no_intermediates_without_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "sample.png", 24);
    let output = dir.path().join("manga.png");
    run_pipeline(&config_for(&input, &output, ConfigOverrides::default())).unwrap();
    let entries: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries.len(), 2, "{entries:?}");
}

#[test]
fn stage_failure_names_the_stage_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "sample.png", 16);
    let output = dir.path().join("out.png");
    let config = config_for(
        &input,
        &output,
        ConfigOverrides {
            generator: Some("sh -c 'exit 3' sh {in} {out}".into()),
            ..Default::default()
        },
    );
    let err = run_pipeline(&config).unwrap_err();
    match &err {
        Error::Stage { stage, source } => {
            assert_eq!(*stage, "generate");
            assert!(matches!(**source, Error::GeneratorFailed { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(!output.exists());

    let missing = config_for(
        &dir.path().join("nope.png"),
        &output,
        ConfigOverrides::default(),
    );
    assert!(matches!(
        run_pipeline(&missing).unwrap_err(),
        Error::Stage { stage: "load", .. }
    ));
}

#[test]
fn batch_directory_mode() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in");
    std::fs::create_dir(&inputs).unwrap();
    for (i, size) in [20usize, 28, 36].iter().enumerate() {
        write_sample(&inputs, &format!("img{i}.png"), *size);
    }
    std::fs::write(inputs.join("notes.txt"), "ignored").unwrap();
    let outputs = dir.path().join("out");
    let report = run_pipeline(&config_for(&inputs, &outputs, ConfigOverrides::default())).unwrap();
    assert_eq!(report.images.len(), 3);
    for (i, image) in report.images.iter().enumerate() {
        assert_eq!(image.output, outputs.join(format!("img{i}.png")));
        assert!(image.output.is_file());
        let single = dir.path().join(format!("single{i}.png"));
        let again = run_pipeline(&config_for(
            &image.input,
            &single,
            ConfigOverrides::default(),
        ))
        .unwrap();
        assert_eq!(again.images[0].checksum, image.checksum);
    }
}

#[test]
fn sketch_input_goes_through_colorizer() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sample(dir.path(), "sketch.png", 24);
    let output = dir.path().join("out.png");
    let sketch = config_for(
        &input,
        &output,
        ConfigOverrides {
            input_kind: Some(sketch2manga::InputKind::Sketch),
            colorizer: Some("cp {in} {out}".into()),
            ..Default::default()
        },
    );
    let via_colorizer = run_pipeline(&sketch).unwrap();
    assert_eq!(via_colorizer.images[0].stages[0].stage, "colorize");
    let direct = run_pipeline(&config_for(
        &input,
        &dir.path().join("direct.png"),
        ConfigOverrides::default(),
    ))
    .unwrap();
    assert_eq!(via_colorizer.images[0].checksum, direct.images[0].checksum);
}

#[test]
fn missing_paths_are_config_errors() {
    let err = run_pipeline(&PipelineConfig::default()).unwrap_err();
    assert!(err.is_config());
}
