//! Takens (time-delay) embedding of scalar and vector time series.

use crate::ingest::ProjectedTrack;
use crate::{Error, Result};

/// Window length, stride and delay of a sliding-window embedding.
///
/// The default `(3, 3, 1)` reproduces `(x, y, k·t)` triples unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingConfig {
    pub window_length: usize,
    pub stride: usize,
    pub delay: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self { window_length: 3, stride: 3, delay: 1 }
    }
}

impl EmbeddingConfig {
    pub fn new(window_length: usize, stride: usize, delay: usize) -> Result<Self> {
        if window_length == 0 || stride == 0 || delay == 0 {
            return Err(Error::InvalidParameter(format!(
                "window length, stride and delay must be >= 1 (got {window_length}, {stride}, {delay})"
            )));
        }
        Ok(Self { window_length, stride, delay })
    }

    /// Shortest series that fits one window.
    pub fn min_series_len(&self) -> usize {
        (self.window_length - 1) * self.delay + 1
    }

    /// Number of windows over a series of length `n`.
    pub fn window_count(&self, n: usize) -> usize {
        let min = self.min_series_len();
        if n < min {
            0
        } else {
            (n - min) / self.stride + 1
        }
    }

    /// Whether windows over an `m`-component vector series start at
    /// different components, giving axes mixed coordinate roles.
    pub fn mixes_coordinates(&self, m: usize) -> bool {
        self.stride % m != 0
    }
}

/// Points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be >= 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "{} coordinates do not divide into points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("point list"))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * points.len());
        for (index, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::Ragged { index, expected: dim, found: p.len() });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }
}

/// Flattens a vector series into its scalar auxiliary series.
pub fn auxiliary_series<P: AsRef<[f64]>>(series: &[P]) -> Result<Vec<f64>> {
    let first = series.first().ok_or(Error::Empty("vector series"))?;
    let m = first.as_ref().len();
    let mut out = Vec::with_capacity(m * series.len());
    for (index, v) in series.iter().enumerate() {
        let v = v.as_ref();
        if v.len() != m {
            return Err(Error::Ragged { index, expected: m, found: v.len() });
        }
        out.extend_from_slice(v);
    }
    Ok(out)
}

/// Sliding windows `(s[i], s[i+τ], …, s[i+(L-1)τ])` for `i = 0, stride, …`.
pub fn takens_embed(series: &[f64], config: &EmbeddingConfig) -> Result<PointCloud> {
    let count = config.window_count(series.len());
    if count == 0 {
        return Err(Error::SeriesTooShort { len: series.len(), min: config.min_series_len() });
    }
    let l = config.window_length;
    let mut coords = Vec::with_capacity(count * l);
    for w in 0..count {
        let start = w * config.stride;
        coords.extend((0..l).map(|j| series[start + j * config.delay]));
    }
    PointCloud::new(l, coords)
}

/// Lifts a projected track to `(x, y, k·t)` and embeds its auxiliary series.
pub fn embed_track(track: &ProjectedTrack, k: f64, config: &EmbeddingConfig) -> Result<PointCloud> {
    if track.points.is_empty() {
        return Err(Error::Empty("track has no points"));
    }
    if config.mixes_coordinates(3) {
        log::warn!(
            "embedding {} with {:?} mixes x, y and k·t across axes",
            track.selector,
            config
        );
    }
    let scaled: Vec<[f64; 3]> = track.points.iter().map(|p| [p.x, p.y, k * p.t]).collect();
    takens_embed(&auxiliary_series(&scaled)?, config)
}
