use std::collections::HashMap;
use std::path::Path;

use log::info;
use looptrace::features::{score_outliers, OutlierMethod, DEFAULT_MAD_FLOOR_KM};
use looptrace::ingest::{parse_tracks, ProjectedTrack, RecordError, Schema};
use looptrace::io::{parse_features, parse_labels, write_dataset, write_diagrams, write_features, write_labels, LabelRow};
use looptrace::metric::{parse_dense_table, quasi_symmetrize};
use looptrace::pipeline::{analyze_matrix, analyze_track, prepare_tracks, PipelineConfig, TrackAnalysis};
use looptrace::plot::{auc_curve, feature_scatter};
use looptrace::sweep::{sweep_k, SweepResult};
use looptrace::synth::{build_benchmark, synthesize_clean_tracks, AnomalySpec, Label, LabeledTrack};
use rayon::prelude::*;

use crate::args::*;
use crate::output::{open_input, write_atomic, write_json, CliResult, Failure, EXIT_FLAGGED};

pub struct Context {
    pub output_dir: std::path::PathBuf,
    pub format: Format,
    pub seed: u64,
}

/// Parses, segments and projects a track file, writing rejected rows and
/// tracks to `errors.jsonl`.
fn load_tracks(ctx: &Context, input: &Path, schema: &Schema, rest_gap_secs: f64) -> CliResult<Vec<ProjectedTrack>> {
    let report = parse_tracks(open_input(input)?, schema)?;
    let (tracks, track_errors) = prepare_tracks(&report.tracks, rest_gap_secs);
    let errors: Vec<&RecordError> = report.errors.iter().chain(&track_errors).collect();
    info!(
        "{}: {} points in {} tracks, {} rejected rows, {} duplicates",
        input.display(),
        report.point_count(),
        tracks.len(),
        report.errors.len(),
        report.duplicates
    );
    write_atomic(&ctx.output_dir, "errors.jsonl", |w| {
        for e in errors {
            serde_json::to_writer(&mut *w, e)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    if tracks.is_empty() {
        return Err(Failure::input(format!("no tracks parsed from {}", input.display())));
    }
    Ok(tracks)
}

fn write_records(ctx: &Context, analyses: &[TrackAnalysis], method: OutlierMethod) -> CliResult<bool> {
    let records: Vec<_> = analyses.iter().map(|a| a.record.clone()).collect();
    let report = score_outliers(&records, method)?;
    match ctx.format {
        Format::Csv => write_atomic(&ctx.output_dir, "features.csv", |w| write_features(&records, w))?,
        Format::Json => write_json(&ctx.output_dir, "features.json", &records)?,
    };
    write_json(&ctx.output_dir, "outliers.json", &report)?;
    write_atomic(&ctx.output_dir, "diagrams.csv", |w| {
        write_diagrams(analyses.iter().map(|a| (a.record.selector.as_str(), &a.diagram)), w)
    })?;
    for s in &report.flagged {
        println!("flagged\t{s}");
    }
    Ok(!report.flagged.is_empty())
}

pub fn detect(ctx: &Context, args: &DetectArgs) -> CliResult<u8> {
    let config = args.pipeline.config()?;
    let analyses = if let Some(path) = &args.quasi_matrix {
        let table = parse_dense_table(open_input(path)?, args.schema.delimiter)?;
        let m = quasi_symmetrize(&table)?;
        let selector = path.file_stem().map_or("matrix".into(), |s| s.to_string_lossy().into_owned());
        vec![analyze_matrix(&selector, &m, config.cap)]
    } else {
        let input = args.input.as_deref().expect("clap requires input or --quasi-matrix");
        let tracks = load_tracks(ctx, input, &args.schema.schema(), config.rest_gap_secs)?;
        tracks
            .par_iter()
            .map(|t| analyze_track(t, &config))
            .collect::<looptrace::Result<Vec<_>>>()?
    };
    let flagged = write_records(ctx, &analyses, config.outliers)?;
    Ok(if flagged { EXIT_FLAGGED } else { 0 })
}

fn write_labeled(ctx: &Context, dataset: &[LabeledTrack], schema: &Schema) -> CliResult<()> {
    let tracks: Vec<ProjectedTrack> = dataset.iter().map(|t| t.track.clone()).collect();
    write_atomic(&ctx.output_dir, "augmented.csv", |w| write_dataset(&tracks, schema, w))?;
    let rows: Vec<LabelRow> = dataset.iter().map(LabelRow::from).collect();
    write_atomic(&ctx.output_dir, "labels.csv", |w| write_labels(&rows, w))?;
    Ok(())
}

fn augment_fraction(fraction: f64) -> CliResult<f64> {
    if fraction > 0.0 && fraction < 1.0 {
        Ok(fraction)
    } else {
        Err(Failure::usage(format!("--augment must be in (0, 1), got {fraction}")))
    }
}

pub fn augment(ctx: &Context, args: &AugmentArgs) -> CliResult<u8> {
    let sampler = args.anomalies.sampler()?;
    let fraction = augment_fraction(args.augment)?;
    if !(args.rest_gap > 0.0) {
        return Err(Failure::usage("--rest-gap must be positive"));
    }
    let schema = args.schema.schema();
    let tracks = load_tracks(ctx, &args.input, &schema, args.rest_gap * 60.0)?;
    let dataset = build_benchmark(&tracks, fraction, &sampler, ctx.seed)?;
    write_labeled(ctx, &dataset, &schema)?;
    Ok(0)
}

/// Rebuilds labeled tracks from a labels file. The file records only shape,
/// radius and seed, so the other anomaly fields take circle defaults.
fn join_labels(tracks: Vec<ProjectedTrack>, labels: &Path) -> CliResult<Vec<LabeledTrack>> {
    let rows = parse_labels(open_input(labels)?)?;
    let by_selector: HashMap<&str, &LabelRow> = rows.iter().map(|r| (r.selector.as_str(), r)).collect();
    tracks
        .into_iter()
        .map(|track| {
            let row = by_selector
                .get(track.selector.as_str())
                .ok_or_else(|| Failure::input(format!("selector `{}` has no label", track.selector)))?;
            Ok(match row.label {
                Label::Clean => LabeledTrack::clean(track),
                Label::Augmented => {
                    let radius = row.radius_km.unwrap_or(f64::NAN);
                    let shape = row.shape.expect("augmented rows carry a shape");
                    LabeledTrack {
                        label: Label::Augmented,
                        spec: Some(AnomalySpec { shape, ..AnomalySpec::circle(radius) }),
                        seed: row.seed.unwrap_or(0),
                        ..LabeledTrack::clean(track)
                    }
                }
            })
        })
        .collect()
}

fn write_sweep(ctx: &Context, result: &SweepResult) -> CliResult<()> {
    match ctx.format {
        Format::Csv => write_atomic(&ctx.output_dir, "sweep.csv", |w| Ok(result.write_csv(w)?))?,
        Format::Json => write_json(&ctx.output_dir, "sweep_rows.json", &result.per_k)?,
    };
    write_json(&ctx.output_dir, "sweep.json", result)?;
    let svg = auc_curve(result);
    write_atomic(&ctx.output_dir, "auc.svg", |w| Ok(w.write_all(svg.as_bytes())?))?;
    for e in &result.per_k {
        println!("k={}\tauc={:.4}\tgap={:.4}", e.k, e.auc, e.gap);
    }
    println!("chosen_k={}", result.chosen_k);
    Ok(())
}

fn run_sweep(ctx: &Context, dataset: &[LabeledTrack], grid: &Grid, config: &PipelineConfig) -> CliResult<u8> {
    let result = sweep_k(dataset, &grid.0, config)?;
    write_sweep(ctx, &result)?;
    Ok(0)
}

pub fn sweep(ctx: &Context, args: &SweepArgs) -> CliResult<u8> {
    let config = args.pipeline.config()?;
    let tracks = load_tracks(ctx, &args.input, &args.schema.schema(), config.rest_gap_secs)?;
    let dataset = join_labels(tracks, &args.labels)?;
    run_sweep(ctx, &dataset, &args.grid, &config)
}

pub fn calibrate(ctx: &Context, args: &CalibrateArgs) -> CliResult<u8> {
    let config = args.pipeline.config()?;
    let schema = args.schema.schema();
    let dataset = match (&args.labels, args.augment) {
        (Some(labels), _) => {
            let tracks = load_tracks(ctx, &args.input, &schema, config.rest_gap_secs)?;
            join_labels(tracks, labels)?
        }
        (None, Some(fraction)) => {
            let sampler = args.anomalies.sampler()?;
            let fraction = augment_fraction(fraction)?;
            let tracks = load_tracks(ctx, &args.input, &schema, config.rest_gap_secs)?;
            let dataset = build_benchmark(&tracks, fraction, &sampler, ctx.seed)?;
            write_labeled(ctx, &dataset, &schema)?;
            dataset
        }
        (None, None) => unreachable!("clap requires --labels or --augment"),
    };
    run_sweep(ctx, &dataset, &args.grid, &config)
}

pub fn plot(ctx: &Context, args: &PlotArgs) -> CliResult<u8> {
    let svg = if let Some(path) = &args.sweep {
        let result: SweepResult = serde_json::from_reader(open_input(path)?)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        auc_curve(&result)
    } else {
        let path = args.features.as_deref().expect("clap requires a features file or --sweep");
        let records = parse_features(open_input(path)?)?;
        let method = match args.outlier_method {
            Method::Absolute => OutlierMethod::Absolute { threshold_km: args.threshold },
            Method::Mad => OutlierMethod::Mad { c: args.mad_c, floor_km: DEFAULT_MAD_FLOOR_KM },
        };
        let flagged = if records.is_empty() { Vec::new() } else { score_outliers(&records, method)?.flagged };
        feature_scatter(&records, &flagged)
    };
    let name = if args.sweep.is_some() { "auc.svg" } else { "scatter.svg" };
    let path = write_atomic(&ctx.output_dir, name, |w| Ok(w.write_all(svg.as_bytes())?))?;
    println!("{}", path.display());
    Ok(0)
}

pub fn generate(ctx: &Context, args: &GenerateArgs) -> CliResult<u8> {
    let tracks = synthesize_clean_tracks(&args.params(ctx.seed))?;
    write_atomic(&ctx.output_dir, "clean.csv", |w| write_dataset(&tracks, &args.schema.schema(), w))?;
    Ok(0)
}
