//! Sweep of the velocity parameter `k`, scoring how well the longest H1
//! lifespan separates augmented from clean tracks.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pipeline::{analyze_track, PipelineConfig};
use crate::synth::{Label, LabeledTrack};
use crate::{Error, Result};

pub const DEFAULT_GRID: [f64; 9] = [0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 50.0];
/// AUC slack of the plateau rule.
pub const PLATEAU_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub count: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl LabelSummary {
    pub fn of(values: &[f64]) -> Self {
        Self {
            count: values.len(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            median: crate::features::median(values),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEvaluation {
    pub k: f64,
    pub clean: LabelSummary,
    pub augmented: LabelSummary,
    /// Smallest augmented m1 minus largest clean m1.
    pub gap: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub per_k: Vec<KEvaluation>,
    pub chosen_k: f64,
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half (Mann-Whitney U over mid-ranks).
pub fn auc(positives: &[f64], negatives: &[f64]) -> f64 {
    let (np, nn) = (positives.len(), negatives.len());
    if np == 0 || nn == 0 {
        return f64::NAN;
    }
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&v| (v, true))
        .chain(negatives.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        // Mid-rank of the tie block, ranks starting at 1.
        let rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += rank * all[i..=j].iter().filter(|x| x.1).count() as f64;
        i = j + 1;
    }
    let u = rank_sum - (np * (np + 1)) as f64 / 2.0;
    u / (np * nn) as f64
}

/// Runs the pipeline on every track at velocity `k`.
pub fn evaluate_k(dataset: &[LabeledTrack], k: f64, config: &PipelineConfig) -> Result<KEvaluation> {
    let (aug, clean) = m1_by_label(dataset, k, config)?;
    Ok(KEvaluation {
        k,
        gap: aug.iter().copied().fold(f64::INFINITY, f64::min)
            - clean.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        auc: auc(&aug, &clean),
        clean: LabelSummary::of(&clean),
        augmented: LabelSummary::of(&aug),
    })
}

/// `(augmented m1, clean m1)` at velocity `k`, in dataset order.
pub fn m1_by_label(dataset: &[LabeledTrack], k: f64, config: &PipelineConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let has = |l| dataset.iter().any(|t| t.label == l);
    if !has(Label::Clean) || !has(Label::Augmented) {
        return Err(Error::SingleLabel);
    }
    let config = config.with_k(k)?;
    let m1: Vec<(Label, f64)> = dataset
        .par_iter()
        .map(|t| analyze_track(&t.track, &config).map(|a| (t.label, a.record.m1)))
        .collect::<Result<_>>()?;
    let pick = |l| m1.iter().filter(|(x, _)| *x == l).map(|(_, v)| *v).collect::<Vec<_>>();
    Ok((pick(Label::Augmented), pick(Label::Clean)))
}

/// Smallest `k` whose AUC is within [`PLATEAU_TOLERANCE`] of the best.
pub fn choose_k(per_k: &[KEvaluation]) -> Option<f64> {
    let best = per_k.iter().map(|e| e.auc).fold(f64::NEG_INFINITY, f64::max);
    per_k
        .iter()
        .filter(|e| e.auc >= best - PLATEAU_TOLERANCE - 1e-12)
        .map(|e| e.k)
        .min_by(f64::total_cmp)
}

pub fn sweep_k(dataset: &[LabeledTrack], grid: &[f64], config: &PipelineConfig) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Empty("k grid"));
    }
    if let Some(k) = grid.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
        return Err(Error::InvalidParameter(format!("grid value {k} is not a positive velocity")));
    }
    let per_k = grid.iter().map(|&k| evaluate_k(dataset, k, config)).collect::<Result<Vec<_>>>()?;
    let chosen_k = choose_k(&per_k).expect("grid is non-empty");
    Ok(SweepResult { grid: grid.to_vec(), per_k, chosen_k })
}

impl SweepResult {
    /// One row per (k, label): `k,label,count,min,median,max,gap,auc`.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "k,label,count,min,median,max,gap,auc")?;
        for e in &self.per_k {
            for (label, s) in [("augmented", &e.augmented), ("clean", &e.clean)] {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    e.k, label, s.count, s.min, s.median, s.max, e.gap, e.auc
                )?;
            }
        }
        Ok(())
    }
}
