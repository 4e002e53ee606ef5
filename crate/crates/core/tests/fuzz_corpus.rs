//! Replays the fuzz corpus seeds, and seeded mutations of them, through the
//! parser entry points the fuzz targets cover.

use std::path::PathBuf;

use looptrace::homology::{compute_persistence, naive_reduce, NAIVE_MAX_POINTS};
use looptrace::ingest::{detect_time_format, parse_time, parse_tracks, Schema};
use looptrace::io::{parse_features, parse_labels, write_features, write_labels};
use looptrace::metric::{enclosing_radius, parse_dense_table, quasi_symmetrize};
use looptrace::pipeline::{analyze_track, prepare_tracks, PipelineConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds for {target}");
    paths.iter().map(|p| std::fs::read(p).unwrap()).collect()
}

/// Seeds plus byte-level mutations: flips, insertions of delimiter-ish
/// bytes, truncations and splices.
fn inputs(target: &str) -> Vec<Vec<u8>> {
    let seeds = corpus(target);
    let mut rng = ChaCha8Rng::seed_from_u64(0xf0f0);
    let mut out = seeds.clone();
    const NOISE: &[u8] = b",\n\r\"#-.0123456789eE+:TZ \t\xff\x00";
    for _ in 0..400 {
        let mut v = seeds[rng.gen_range(0..seeds.len())].clone();
        for _ in 0..rng.gen_range(1..6) {
            match rng.gen_range(0..4) {
                0 if !v.is_empty() => {
                    let i = rng.gen_range(0..v.len());
                    v[i] = rng.gen();
                }
                1 => {
                    let i = rng.gen_range(0..=v.len());
                    v.insert(i, NOISE[rng.gen_range(0..NOISE.len())]);
                }
                2 if !v.is_empty() => v.truncate(rng.gen_range(0..v.len())),
                _ => {
                    let other = &seeds[rng.gen_range(0..seeds.len())];
                    let cut = rng.gen_range(0..=other.len());
                    v.extend_from_slice(&other[cut..]);
                }
            }
        }
        out.push(v);
    }
    out
}

#[test]
fn parse_tracks_never_panics() {
    let config = PipelineConfig { max_points: 40, ..PipelineConfig::default() };
    for data in inputs("parse_tracks") {
        let Ok(report) = parse_tracks(data.as_slice(), &Schema::default()) else { continue };
        let (tracks, _) = prepare_tracks(&report.tracks, 2700.0);
        for t in &tracks {
            let _ = analyze_track(t, &config);
        }
    }
}

#[test]
fn dense_matrix_never_panics() {
    for data in inputs("dense_matrix") {
        let Ok(table) = parse_dense_table(data.as_slice(), b',') else { continue };
        let Ok(m) = quasi_symmetrize(&table) else { continue };
        if m.len() <= NAIVE_MAX_POINTS {
            let cap = enclosing_radius(&m);
            assert_eq!(compute_persistence(&m, cap).pairs, naive_reduce(&m, cap).unwrap().pairs);
        }
    }
}

#[test]
fn features_round_trip_when_accepted() {
    for data in inputs("parse_features") {
        if let Ok(records) = parse_features(data.as_slice()) {
            let mut out = Vec::new();
            write_features(&records, &mut out).unwrap();
            assert_eq!(parse_features(out.as_slice()).unwrap(), records);
        }
    }
}

#[test]
fn labels_round_trip_when_accepted() {
    for data in inputs("parse_labels") {
        if let Ok(rows) = parse_labels(data.as_slice()) {
            let mut out = Vec::new();
            write_labels(&rows, &mut out).unwrap();
            assert_eq!(parse_labels(out.as_slice()).unwrap(), rows);
        }
    }
}

#[test]
fn parse_time_is_finite_or_none() {
    for data in inputs("parse_time") {
        let Ok(s) = std::str::from_utf8(&data) else { continue };
        if let Some(t) = parse_time(s, detect_time_format(s)) {
            assert!(t.is_finite(), "{s:?}");
        }
    }
}
