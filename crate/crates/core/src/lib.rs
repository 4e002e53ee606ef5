//! Detection of loop-shaped anomalies ("crop circles") in trajectory data.
//!
//! Each selector's track is segmented at long reporting gaps, projected to
//! local planar kilometers, lifted into `(x, y, k·t)` with a velocity
//! parameter `k`, and summarized by the longest-lived 1-dimensional class
//! of its Vietoris-Rips persistent homology. Ordinary trajectories do not
//! return to the same place at nearby times, so a long-lived loop marks the
//! track as anomalous.

pub mod embedding;
pub mod error;
pub mod features;
pub mod homology;
pub mod ingest;
pub mod io;
pub mod metric;
pub mod pipeline;
pub mod plot;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};
