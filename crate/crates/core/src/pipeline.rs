//! Per-track pipeline: embed, distance matrix, persistence, features.

use crate::embedding::{embed_track, EmbeddingConfig};
use crate::features::{FeatureRecord, OutlierMethod};
use crate::homology::{compute_persistence, CapMode, PersistenceDiagram};
use crate::ingest::{project_local, segment_track, ProjectedTrack, RecordError, Track, DEFAULT_REST_GAP_SECS};
use crate::metric::{distance_matrix, DistanceMatrix, MetricConfig};
use crate::Result;

pub const DEFAULT_MAX_POINTS: usize = 5_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub metric: MetricConfig,
    pub rest_gap_secs: f64,
    pub embedding: EmbeddingConfig,
    pub cap: CapMode,
    pub outliers: OutlierMethod,
    /// Tracks longer than this are downsampled before the matrix is built.
    pub max_points: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            metric: MetricConfig::default(),
            rest_gap_secs: DEFAULT_REST_GAP_SECS,
            embedding: EmbeddingConfig::default(),
            cap: CapMode::EnclosingRadius,
            outliers: OutlierMethod::default(),
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

impl PipelineConfig {
    pub fn with_k(&self, k: f64) -> Result<Self> {
        Ok(Self { metric: MetricConfig::new(k)?, ..self.clone() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackAnalysis {
    pub diagram: PersistenceDiagram,
    pub record: FeatureRecord,
}

/// Keeps `max` points at evenly spaced indices, always including both ends.
pub fn downsample(track: &ProjectedTrack, max: usize) -> ProjectedTrack {
    let n = track.points.len();
    if n <= max || max < 2 {
        return track.clone();
    }
    let points = (0..max)
        .map(|i| track.points[((i * (n - 1)) as f64 / (max - 1) as f64).round() as usize])
        .collect();
    ProjectedTrack { selector: track.selector.clone(), points, origin: track.origin }
}

pub fn analyze_track(track: &ProjectedTrack, config: &PipelineConfig) -> Result<TrackAnalysis> {
    let track = downsample(track, config.max_points);
    let cloud = embed_track(&track, config.metric.k(), &config.embedding)?;
    let m = distance_matrix(&cloud)?;
    let diagram = compute_persistence(&m, config.cap.resolve(&m));
    let mut record = FeatureRecord::from_diagram(track.selector.clone(), &diagram);
    record.n_points = track.points.len();
    Ok(TrackAnalysis { diagram, record })
}

/// Persistence and features of a precomputed distance matrix.
pub fn analyze_matrix(selector: &str, m: &DistanceMatrix, cap: CapMode) -> TrackAnalysis {
    let diagram = compute_persistence(m, cap.resolve(m));
    let record = FeatureRecord::from_diagram(selector, &diagram);
    TrackAnalysis { diagram, record }
}

/// Splits tracks at rest gaps and projects each segment. Segments that
/// cannot be projected are reported instead.
pub fn prepare_tracks(tracks: &[Track], rest_gap_secs: f64) -> (Vec<ProjectedTrack>, Vec<RecordError>) {
    let mut projected = Vec::new();
    let mut errors = Vec::new();
    for segment in tracks.iter().flat_map(|t| segment_track(t, rest_gap_secs)) {
        match project_local(&segment) {
            Ok(p) => projected.push(p),
            Err(e) => errors.push(RecordError { line: 0, selector: Some(segment.selector), message: e.to_string() }),
        }
    }
    (projected, errors)
}
