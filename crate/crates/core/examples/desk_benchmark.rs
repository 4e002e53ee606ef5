//! Runs the desk calibration benchmark and prints per-k separation.
//!
//! Usage: `desk_benchmark [circle|square|ellipse] [seed]`

use looptrace::pipeline::PipelineConfig;
use looptrace::sweep::sweep_k;
use looptrace::synth::{build_benchmark, synthesize_clean_tracks, CleanTrackParams, Shape, SpecSampler};

fn main() -> looptrace::Result<()> {
    let shape = std::env::args().nth(1).and_then(|s| Shape::parse(&s)).unwrap_or(Shape::Circle);
    let seed = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let clean = synthesize_clean_tracks(&CleanTrackParams { seed, ..CleanTrackParams::default() })?;
    let sampler = SpecSampler { shapes: vec![shape], ..SpecSampler::default() };
    let dataset = build_benchmark(&clean, 0.1, &sampler, seed)?;
    let start = std::time::Instant::now();
    let result = sweep_k(&dataset, &[0.5, 1.0, 5.0, 10.0, 20.0, 30.0], &PipelineConfig::default())?;
    for e in &result.per_k {
        println!(
            "k={:>4} auc={:.4} gap={:+.3} clean[max {:.3} med {:.3}] augmented[min {:.3} med {:.3}]",
            e.k, e.auc, e.gap, e.clean.max, e.clean.median, e.augmented.min, e.augmented.median
        );
    }
    println!("chosen_k={} in {:.1?}", result.chosen_k, start.elapsed());
    Ok(())
}
