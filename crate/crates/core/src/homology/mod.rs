//! 0- and 1-dimensional Vietoris-Rips persistent homology over Z/2.
//!
//! Edges enter at `ε = d(i, j)` and triangles at the largest of their three
//! edges. [`compute_persistence`] is the production path; [`naive_reduce`]
//! materializes the full boundary matrix and serves as its oracle.

mod filtration;
mod naive;
mod reduce;
mod union_find;

use std::cmp::Ordering;
use std::io::Write;

pub use filtration::{build_filtration, Filtration, Simplex};
pub use naive::{naive_reduce, NAIVE_MAX_POINTS};
pub use reduce::compute_persistence;
pub use union_find::UnionFind;

use crate::metric::{enclosing_radius, DistanceMatrix};
use crate::{Error, Result};

/// One (birth, death) feature. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: u8,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn lifespan(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_finite(&self) -> bool {
        self.death.is_finite()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// Where the filtration stops.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CapMode {
    /// Stop at the enclosing radius; no finite H1 class is lost.
    #[default]
    EnclosingRadius,
    /// Stop at a fixed scale in km.
    Fixed(f64),
}

impl CapMode {
    pub fn resolve(&self, m: &DistanceMatrix) -> f64 {
        match *self {
            CapMode::EnclosingRadius => enclosing_radius(m),
            CapMode::Fixed(cap) => cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    /// Sorted by (dim, birth, death).
    pub pairs: Vec<PersistencePair>,
    pub n_points: usize,
    pub cap: f64,
}

impl PersistenceDiagram {
    pub(crate) fn new(mut pairs: Vec<PersistencePair>, n_points: usize, cap: f64) -> Self {
        pairs.sort_by(PersistencePair::total_cmp);
        Self { pairs, n_points, cap }
    }

    pub fn dimension(&self, dim: u8) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Finite deaths of a dimension, ascending.
    pub fn finite_deaths(&self, dim: u8) -> Vec<f64> {
        let mut d: Vec<f64> = self.dimension(dim).filter(|p| p.is_finite()).map(|p| p.death).collect();
        d.sort_by(f64::total_cmp);
        d
    }

    /// Betti numbers `(b0, b1)` of the complex at scale `r`.
    pub fn betti_numbers(&self, r: f64) -> Result<(usize, usize)> {
        if r < 0.0 || r > self.cap || r.is_nan() {
            return Err(Error::BeyondCap { r, cap: self.cap });
        }
        let alive = |dim| self.dimension(dim).filter(|p| p.birth <= r && r < p.death).count();
        Ok((alive(0), alive(1)))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(
            self.pairs
                .iter()
                .map(|p| PersistencePair { dim: p.dim, birth: p.birth * c, death: p.death * c })
                .collect(),
            self.n_points,
            self.cap * c,
        )
    }

    /// Writes `selector,dim,birth,death` rows, `inf` for essential classes.
    pub fn write_rows<W: Write>(&self, selector: &str, out: &mut W) -> std::io::Result<()> {
        for p in &self.pairs {
            if p.is_finite() {
                writeln!(out, "{selector},{},{},{}", p.dim, p.birth, p.death)?;
            } else {
                writeln!(out, "{selector},{},{},inf", p.dim, p.birth)?;
            }
        }
        Ok(())
    }
}

/// Free-function form of [`PersistenceDiagram::betti_numbers`].
pub fn betti_numbers(diagram: &PersistenceDiagram, r: f64) -> Result<(usize, usize)> {
    diagram.betti_numbers(r)
}

/// Persistence with the default enclosing-radius cap.
pub fn persistence(m: &DistanceMatrix) -> PersistenceDiagram {
    compute_persistence(m, enclosing_radius(m))
}
