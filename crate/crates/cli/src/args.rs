use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use looptrace::embedding::EmbeddingConfig;
use looptrace::features::{OutlierMethod, DEFAULT_MAD_FLOOR_KM};
use looptrace::homology::CapMode;
use looptrace::ingest::Schema;
use looptrace::metric::MetricConfig;
use looptrace::pipeline::PipelineConfig;
use looptrace::synth::{CleanTrackParams, Shape, SpecSampler};

/// Loop ("crop circle") anomaly detection in trajectory data.
#[derive(Debug, Parser)]
#[command(name = "looptrace", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,

    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every selector and flag loop anomalies. Exits 1 when any
    /// selector is flagged.
    Detect(DetectArgs),
    /// Sweep the velocity parameter, optionally augmenting clean input first.
    Calibrate(CalibrateArgs),
    /// Insert loop anomalies into a fraction of the input tracks.
    Augment(AugmentArgs),
    /// Sweep the velocity parameter over a labeled dataset.
    Sweep(SweepArgs),
    /// Render a features file (or a sweep result) as SVG.
    Plot(PlotArgs),
    /// Write synthetic clean tracks in the input schema.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct SchemaArgs {
    #[arg(long, default_value = "selector")]
    pub col_selector: String,
    #[arg(long, default_value = "lat")]
    pub col_lat: String,
    #[arg(long, default_value = "lon")]
    pub col_lon: String,
    #[arg(long, default_value = "time")]
    pub col_time: String,
    /// Field delimiter, a single byte; `\t` for tab.
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
}

impl SchemaArgs {
    pub fn schema(&self) -> Schema {
        Schema {
            selector: self.col_selector.clone(),
            lat: self.col_lat.clone(),
            lon: self.col_lon.clone(),
            time: self.col_time.clone(),
            delimiter: self.delimiter,
        }
    }
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be one ASCII character, got `{s}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Absolute,
    Mad,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Velocity parameter k, km/hr.
    #[arg(long, default_value_t = 10.0)]
    pub velocity_k: f64,
    /// Rest gap that splits a track, minutes.
    #[arg(long, default_value_t = 45.0)]
    pub rest_gap: f64,
    #[arg(long, default_value_t = 3)]
    pub takens_dim: usize,
    #[arg(long, default_value_t = 3)]
    pub takens_stride: usize,
    #[arg(long, default_value_t = 1)]
    pub takens_delay: usize,
    /// Filtration cap: `enclosing` or a fixed scale in km.
    #[arg(long, default_value = "enclosing", value_parser = parse_cap)]
    pub cap: CapMode,
    #[arg(long, value_enum, default_value_t = Method::Absolute)]
    pub outlier_method: Method,
    /// Flag threshold of the absolute method, km.
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    /// MAD multiplier of the mad method.
    #[arg(long, default_value_t = 10.0)]
    pub mad_c: f64,
    /// Tracks with more points are downsampled to this many.
    #[arg(long, default_value_t = 5000)]
    pub max_points: usize,
}

fn parse_cap(s: &str) -> Result<CapMode, String> {
    if s == "enclosing" {
        return Ok(CapMode::EnclosingRadius);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(CapMode::Fixed(v)),
        _ => Err(format!("cap must be `enclosing` or a positive number of km, got `{s}`")),
    }
}

impl PipelineArgs {
    pub fn config(&self) -> looptrace::Result<PipelineConfig> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(looptrace::Error::InvalidParameter(format!("--{name} must be positive, got {v}")))
            }
        };
        let outliers = match self.outlier_method {
            Method::Absolute => OutlierMethod::Absolute { threshold_km: positive("threshold", self.threshold)? },
            Method::Mad => OutlierMethod::Mad { c: positive("mad-c", self.mad_c)?, floor_km: DEFAULT_MAD_FLOOR_KM },
        };
        if self.max_points < 2 {
            return Err(looptrace::Error::InvalidParameter("--max-points must be at least 2".into()));
        }
        Ok(PipelineConfig {
            metric: MetricConfig::new(self.velocity_k)?,
            rest_gap_secs: positive("rest-gap", self.rest_gap)? * 60.0,
            embedding: EmbeddingConfig::new(self.takens_dim, self.takens_stride, self.takens_delay)?,
            cap: self.cap,
            outliers,
            max_points: self.max_points,
        })
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Delimited track file; `-` reads standard input.
    #[arg(required_unless_present = "quasi_matrix")]
    pub input: Option<PathBuf>,
    /// Dense directional distance table scored as a single selector instead
    /// of track input.
    #[arg(long, conflicts_with = "input")]
    pub quasi_matrix: Option<PathBuf>,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct AnomalyArgs {
    /// Anomaly shapes to draw from.
    #[arg(long, value_delimiter = ',', default_value = "circle,square,ellipse", value_parser = parse_shape)]
    pub shapes: Vec<Shape>,
    #[arg(long, default_value_t = 1.0)]
    pub radius_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub radius_max: f64,
    #[arg(long, default_value_t = 0.8)]
    pub eccentricity_max: f64,
    #[arg(long, default_value_t = 3)]
    pub loops: u32,
    #[arg(long, default_value_t = 10)]
    pub points_per_loop: u32,
}

fn parse_shape(s: &str) -> Result<Shape, String> {
    Shape::parse(s).ok_or_else(|| format!("unknown shape `{s}` (expected circle, square or ellipse)"))
}

impl AnomalyArgs {
    pub fn sampler(&self) -> looptrace::Result<SpecSampler> {
        let bad = |m: String| Err(looptrace::Error::InvalidParameter(m));
        if !(self.radius_min > 0.0 && self.radius_max >= self.radius_min && self.radius_max.is_finite()) {
            return bad(format!("radius range {}..{} is not a positive interval", self.radius_min, self.radius_max));
        }
        if !(0.0..1.0).contains(&self.eccentricity_max) {
            return bad(format!("--eccentricity-max must be in [0, 1), got {}", self.eccentricity_max));
        }
        if self.loops == 0 || self.points_per_loop < 8 {
            return bad("--loops must be >= 1 and --points-per-loop >= 8".into());
        }
        Ok(SpecSampler {
            shapes: self.shapes.clone(),
            radius_km: (self.radius_min, self.radius_max),
            eccentricity: (0.0, self.eccentricity_max),
            n_loops: (self.loops, self.loops),
            n_points_per_loop: self.points_per_loop,
        })
    }
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    pub input: PathBuf,
    /// Fraction of eligible tracks to augment.
    #[arg(long, default_value_t = 0.1)]
    pub augment: f64,
    #[command(flatten)]
    pub anomalies: AnomalyArgs,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long, default_value_t = 45.0)]
    pub rest_gap: f64,
}

/// Comma-separated velocity grid.
#[derive(Debug, Clone)]
pub struct Grid(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    if s.trim().is_empty() {
        return Err("grid is empty".into());
    }
    s.split(',')
        .map(|v| match v.trim().parse::<f64>() {
            Ok(k) if k > 0.0 && k.is_finite() => Ok(k),
            _ => Err(format!("grid value `{v}` is not a positive number")),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Grid)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub input: PathBuf,
    /// Labels file with `selector,label,shape,radius_km,seed` rows.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value = "0.5,1,2,5,10,15,20,30,50", value_parser = parse_grid)]
    pub grid: Grid,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    pub input: PathBuf,
    /// Augment this fraction of the (clean) input before sweeping.
    #[arg(long, conflicts_with = "labels")]
    pub augment: Option<f64>,
    /// Labels for an already augmented input.
    #[arg(long, required_unless_present = "augment")]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value = "0.5,1,2,5,10,15,20,30,50", value_parser = parse_grid)]
    pub grid: Grid,
    #[command(flatten)]
    pub anomalies: AnomalyArgs,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Features file (CSV) to plot.
    #[arg(required_unless_present = "sweep")]
    pub features: Option<PathBuf>,
    /// Sweep result JSON to plot as AUC against k instead.
    #[arg(long, conflicts_with = "features")]
    pub sweep: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Absolute)]
    pub outlier_method: Method,
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    #[arg(long, default_value_t = 10.0)]
    pub mad_c: f64,
}

/// Generator settings; unset values take the library defaults.
#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub tracks: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Square region side, km.
    #[arg(long)]
    pub region: Option<f64>,
    /// Sampling interval, seconds.
    #[arg(long)]
    pub interval: Option<f64>,
    /// Leg speed bounds, km/hr.
    #[arg(long)]
    pub speed_min: Option<f64>,
    #[arg(long)]
    pub speed_max: Option<f64>,
    #[command(flatten)]
    pub schema: SchemaArgs,
}

impl GenerateArgs {
    pub fn params(&self, seed: u64) -> CleanTrackParams {
        let d = CleanTrackParams::default();
        CleanTrackParams {
            n_tracks: self.tracks.unwrap_or(d.n_tracks),
            n_points: self.points.unwrap_or(d.n_points),
            region_km: self.region.map_or(d.region_km, |r| (r, r)),
            sample_interval_secs: self.interval.unwrap_or(d.sample_interval_secs),
            speed_kmh: (self.speed_min.unwrap_or(d.speed_kmh.0), self.speed_max.unwrap_or(d.speed_kmh.1)),
            origin: d.origin,
            seed,
        }
    }
}
