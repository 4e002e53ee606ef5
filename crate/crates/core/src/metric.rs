//! Pairwise distances for embedded clouds.

use std::io::Read;

use crate::embedding::PointCloud;
use crate::{Error, Result};

/// Default velocity parameter, km/hr.
pub const DEFAULT_K: f64 = 10.0;

/// Velocity parameter equating one hour with `k` kilometers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    k: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self { k: DEFAULT_K }
    }
}

impl MetricConfig {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("velocity k must be positive, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Euclidean distance on `(x, y, k·t)` for points given as `(x km, y km, t hr)`.
pub fn scaled_distance(p: [f64; 3], q: [f64; 3], config: &MetricConfig) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dt = config.k * (p[2] - q[2]);
    (dx * dx + dy * dy + dt * dt).sqrt()
}

/// Symmetric distances stored as a strict lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    debug_assert!(i > j);
    i * (i - 1) / 2 + j
}

impl DistanceMatrix {
    /// Fills entry `(i, j)`, `i > j`, from `f(i, j)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..n {
            for j in 0..i {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    /// Validates and takes a strict lower triangle in row order.
    pub fn from_lower(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidTable(format!(
                "{} entries do not form the lower triangle of a {n}x{n} matrix",
                entries.len()
            )));
        }
        if let Some(v) = entries.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidTable(format!("entry {v} is not a finite non-negative distance")));
        }
        Ok(Self { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => self.entries[tri_index(i, j)],
            std::cmp::Ordering::Less => self.entries[tri_index(j, i)],
        }
    }

    /// The strict lower triangle in row order.
    pub fn lower(&self) -> &[f64] {
        &self.entries
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|v| v * c).collect() }
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// Euclidean distance matrix of a cloud.
pub fn distance_matrix(cloud: &PointCloud) -> Result<DistanceMatrix> {
    if cloud.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    Ok(DistanceMatrix::from_fn(cloud.len(), |i, j| {
        cloud
            .point(i)
            .iter()
            .zip(cloud.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }))
}

/// Symmetrizes a directional table by the pairwise minimum.
pub fn quasi_symmetrize<R: AsRef<[f64]>>(directional: &[R]) -> Result<DistanceMatrix> {
    let n = directional.len();
    if n == 0 {
        return Err(Error::Empty("directional table"));
    }
    for (i, row) in directional.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != n {
            return Err(Error::InvalidTable(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidTable(format!("entry ({i}, {j}) = {v} is not a finite non-negative distance")));
            }
        }
        if row[i] != 0.0 {
            return Err(Error::InvalidTable(format!("diagonal entry ({i}, {i}) is {}", row[i])));
        }
    }
    Ok(DistanceMatrix::from_fn(n, |i, j| {
        directional[i].as_ref()[j].min(directional[j].as_ref()[i])
    }))
}

/// Reads a dense numeric table, one row per line.
pub fn parse_dense_table<R: Read>(source: R, delimiter: u8) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Format { line, message: format!("`{f}` is not a number") })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// `min_i max_j d(i, j)`: beyond this scale the Rips complex is a cone.
pub fn enclosing_radius(m: &DistanceMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    (0..m.len())
        .map(|i| (0..m.len()).map(|j| m.get(i, j)).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}
