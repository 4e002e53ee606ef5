#![no_main]

use libfuzzer_sys::fuzz_target;
use looptrace::ingest::{parse_tracks, Schema};
use looptrace::pipeline::{analyze_track, prepare_tracks, PipelineConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(report) = parse_tracks(data, &Schema::default()) else { return };
    let (tracks, _) = prepare_tracks(&report.tracks, 2700.0);
    let config = PipelineConfig { max_points: 40, ..PipelineConfig::default() };
    for t in &tracks {
        let _ = analyze_track(t, &config);
    }
});
