use std::time::{Duration, Instant};

use looptrace::pipeline::{analyze_track, PipelineConfig};
use looptrace::synth::{augment_track, synthesize_clean_tracks, AnomalySpec, CleanTrackParams};

const BUDGET: Duration = Duration::from_secs(5);

#[test]
fn thousand_point_tracks_within_budget() {
    let params = CleanTrackParams { n_tracks: 1, n_points: 1000, seed: 1, ..CleanTrackParams::default() };
    let track = synthesize_clean_tracks(&params).unwrap().remove(0);
    let looped = augment_track(&track, &AnomalySpec { n_loops: 30, ..AnomalySpec::circle(1.0) }, 1).unwrap();
    let config = PipelineConfig::default();
    for t in [&track, &looped.track] {
        let start = Instant::now();
        let a = analyze_track(t, &config).unwrap();
        let elapsed = start.elapsed();
        eprintln!("{} points: {elapsed:?}, m1 {:.3}", a.record.n_points, a.record.m1);
        assert_eq!(a.record.n_points, 1000);
        assert!(elapsed < BUDGET, "{elapsed:?}");
    }
}
