//! Labeled calibration data: smooth clean tracks and loop anomalies spliced
//! into their middle third.

use std::f64::consts::{PI, TAU};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::{Origin, ProjectedPoint, ProjectedTrack};
use crate::{Error, Result};

/// Minimum track length accepted by [`augment_track`].
pub const MIN_AUGMENT_POINTS: usize = 9;
/// Largest anomaly radius as a fraction of the track's path length.
pub const MAX_RADIUS_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Square,
    Ellipse,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Circle, Shape::Square, Shape::Ellipse];

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Circle => "circle",
            Shape::Square => "square",
            Shape::Ellipse => "ellipse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|shape| shape.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Cw,
    Ccw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalySpec {
    pub shape: Shape,
    /// Circle radius, half side of a square, or semi-major axis, km.
    pub radius_km: f64,
    /// Ellipse only, in `[0, 1)`.
    pub eccentricity: f64,
    pub n_loops: u32,
    /// Samples per loop; the shape is resampled to fill the middle third
    /// when `n_loops × n_points_per_loop` does not match it.
    pub n_points_per_loop: u32,
    pub direction: Direction,
}

impl AnomalySpec {
    pub fn circle(radius_km: f64) -> Self {
        Self {
            shape: Shape::Circle,
            radius_km,
            eccentricity: 0.0,
            n_loops: 1,
            n_points_per_loop: 30,
            direction: Direction::Ccw,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParameter(m));
        if !(self.radius_km > 0.0 && self.radius_km.is_finite()) {
            return fail(format!("anomaly radius must be positive, got {}", self.radius_km));
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return fail(format!("eccentricity must be in [0, 1), got {}", self.eccentricity));
        }
        if self.n_loops == 0 {
            return fail("n_loops must be >= 1".into());
        }
        if self.n_points_per_loop < 8 {
            return fail(format!("n_points_per_loop must be >= 8, got {}", self.n_points_per_loop));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Clean,
    Augmented,
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::Clean => "clean",
            Label::Augmented => "augmented",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTrack {
    pub track: ProjectedTrack,
    pub label: Label,
    pub spec: Option<AnomalySpec>,
    pub seed: u64,
}

impl LabeledTrack {
    pub fn clean(track: ProjectedTrack) -> Self {
        Self { track, label: Label::Clean, spec: None, seed: 0 }
    }
}

/// Index range `[⌊n/3⌋, ⌊2n/3⌋)` replaced by an anomaly.
pub fn middle_third(n: usize) -> std::ops::Range<usize> {
    n / 3..2 * n / 3
}

/// Point on the unit-parameter outline of `spec`, `u ∈ [0, 1)` one lap.
fn outline(spec: &AnomalySpec, u: f64, phase: f64, orientation: f64) -> (f64, f64) {
    let r = spec.radius_km;
    match spec.shape {
        Shape::Circle => {
            let a = TAU * u + phase;
            (r * a.cos(), r * a.sin())
        }
        Shape::Ellipse => {
            let a = TAU * u + phase;
            let b = r * (1.0 - spec.eccentricity * spec.eccentricity).sqrt();
            let (x, y) = (r * a.cos(), b * a.sin());
            let (s, c) = orientation.sin_cos();
            (x * c - y * s, x * s + y * c)
        }
        Shape::Square => {
            // Counter-clockwise from (r, -r), arclength parametrized.
            let s = (u + phase / TAU).rem_euclid(1.0) * 8.0;
            let side = s.floor().min(7.0) as u32 / 2;
            let f = s - 2.0 * f64::from(side) - 1.0;
            match side {
                0 => (r, f * r),
                1 => (-f * r, r),
                2 => (-r, -f * r),
                _ => (f * r, -r),
            }
        }
    }
}

/// Replaces the middle third of `track` with the anomaly outline centered on
/// the replaced points' centroid. Timestamps and the outer thirds are kept.
pub fn augment_track(track: &ProjectedTrack, spec: &AnomalySpec, seed: u64) -> Result<LabeledTrack> {
    spec.validate()?;
    let fail = |reason: String| Error::Augmentation { selector: track.selector.clone(), reason };
    let n = track.points.len();
    if n < MIN_AUGMENT_POINTS {
        return Err(fail(format!("{n} points, need at least {MIN_AUGMENT_POINTS}")));
    }
    let limit = MAX_RADIUS_FRACTION * track.path_length();
    if spec.radius_km > limit {
        return Err(fail(format!(
            "radius {} km exceeds {} of the {:.3} km path length",
            spec.radius_km,
            MAX_RADIUS_FRACTION,
            track.path_length()
        )));
    }

    let mid = middle_third(n);
    let m = mid.len();
    let (cx, cy) = track.points[mid.clone()]
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x / m as f64, sy + p.y / m as f64));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = rng.gen::<f64>() * TAU;
    let orientation = rng.gen::<f64>() * PI;
    let sign = match spec.direction {
        Direction::Ccw => 1.0,
        Direction::Cw => -1.0,
    };

    let mut points = track.points.clone();
    let laps = f64::from(spec.n_loops);
    for (i, p) in points[mid].iter_mut().enumerate() {
        let u = (sign * laps * i as f64 / m as f64).rem_euclid(1.0);
        let (dx, dy) = outline(spec, u, phase, orientation);
        p.x = cx + dx;
        p.y = cy + dy;
    }

    Ok(LabeledTrack {
        track: ProjectedTrack { selector: track.selector.clone(), points, origin: track.origin },
        label: Label::Augmented,
        spec: Some(*spec),
        seed,
    })
}

/// Distribution over anomaly specs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecSampler {
    pub shapes: Vec<Shape>,
    pub radius_km: (f64, f64),
    pub eccentricity: (f64, f64),
    pub n_loops: (u32, u32),
    pub n_points_per_loop: u32,
}

impl Default for SpecSampler {
    fn default() -> Self {
        Self {
            shapes: Shape::ALL.to_vec(),
            radius_km: (1.0, 5.0),
            eccentricity: (0.0, 0.8),
            n_loops: (3, 3),
            n_points_per_loop: 10,
        }
    }
}

impl SpecSampler {
    pub fn circles(radius_km: (f64, f64)) -> Self {
        Self { shapes: vec![Shape::Circle], radius_km, ..Self::default() }
    }

    /// Draws a spec whose radius does not exceed `max_radius`.
    pub fn sample<R: Rng>(&self, rng: &mut R, max_radius: f64) -> AnomalySpec {
        let shape = self.shapes[rng.gen_range(0..self.shapes.len())];
        let hi = self.radius_km.1.min(max_radius);
        let radius_km = if hi > self.radius_km.0 { rng.gen_range(self.radius_km.0..=hi) } else { hi };
        let eccentricity = match shape {
            Shape::Ellipse if self.eccentricity.1 > self.eccentricity.0 => {
                rng.gen_range(self.eccentricity.0..=self.eccentricity.1)
            }
            Shape::Ellipse => self.eccentricity.0,
            _ => 0.0,
        };
        let n_loops = rng.gen_range(self.n_loops.0..=self.n_loops.1.max(self.n_loops.0));
        let direction = if rng.gen::<bool>() { Direction::Ccw } else { Direction::Cw };
        AnomalySpec {
            shape,
            radius_km,
            eccentricity,
            n_loops,
            n_points_per_loop: self.n_points_per_loop,
            direction,
        }
    }
}

/// Per-track seed, independent of processing order.
pub fn track_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

/// Augments `⌈fraction × eligible⌉` tracks chosen uniformly at random.
///
/// A track is eligible when it has enough points and its path is long enough
/// for the sampler's smallest radius.
pub fn build_benchmark(
    tracks: &[ProjectedTrack],
    augment_fraction: f64,
    sampler: &SpecSampler,
    seed: u64,
) -> Result<Vec<LabeledTrack>> {
    if !(augment_fraction > 0.0 && augment_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "augment fraction must be in (0, 1), got {augment_fraction}"
        )));
    }
    let eligible: Vec<usize> = tracks
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            t.len() >= MIN_AUGMENT_POINTS && MAX_RADIUS_FRACTION * t.path_length() >= sampler.radius_km.0
        })
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return Err(Error::NoEligibleTracks);
    }
    let count = ((augment_fraction * eligible.len() as f64) - 1e-9).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; tracks.len()];
    for pick in sample(&mut rng, eligible.len(), count.min(eligible.len())) {
        chosen[eligible[pick]] = true;
    }

    tracks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if !chosen[i] {
                return Ok(LabeledTrack::clean(t.clone()));
            }
            let s = track_seed(seed, i);
            let mut spec_rng = ChaCha8Rng::seed_from_u64(s.rotate_left(17));
            let spec = sampler.sample(&mut spec_rng, MAX_RADIUS_FRACTION * t.path_length());
            augment_track(t, &spec, s)
        })
        .collect()
}

/// Parameters of the random-waypoint generator.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanTrackParams {
    pub n_tracks: usize,
    pub n_points: usize,
    /// Width and height of the region, km.
    pub region_km: (f64, f64),
    pub sample_interval_secs: f64,
    /// Per-leg speed range, km/hr.
    pub speed_kmh: (f64, f64),
    pub origin: Origin,
    pub seed: u64,
}

impl Default for CleanTrackParams {
    fn default() -> Self {
        Self {
            n_tracks: 200,
            n_points: 90,
            region_km: (6.0, 6.0),
            sample_interval_secs: 30.0,
            speed_kmh: (20.0, 36.0),
            // Rio de Janeiro, 2013-09-26T00:00:00Z.
            origin: Origin { lon: -43.2, lat: -22.9, t: 1_380_153_600.0 },
            seed: 0,
        }
    }
}

/// Random-waypoint trajectories with bounded speed and constant-rate
/// sampling. Each leg runs straight to a waypoint at a speed drawn for that
/// leg.
pub fn synthesize_clean_tracks(params: &CleanTrackParams) -> Result<Vec<ProjectedTrack>> {
    if params.n_points < MIN_AUGMENT_POINTS {
        return Err(Error::InvalidParameter(format!(
            "n_points must be >= {MIN_AUGMENT_POINTS}, got {}",
            params.n_points
        )));
    }
    let (vmin, vmax) = params.speed_kmh;
    if !(vmin > 0.0 && vmax >= vmin && params.sample_interval_secs > 0.0) {
        return Err(Error::InvalidParameter("speed range and sample interval must be positive".into()));
    }
    let (w, h) = params.region_km;
    let dt = params.sample_interval_secs / 3600.0;

    Ok((0..params.n_tracks)
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(track_seed(params.seed, index));
            let waypoint = |rng: &mut ChaCha8Rng| (rng.gen_range(-w / 2.0..w / 2.0), rng.gen_range(-h / 2.0..h / 2.0));
            let (mut x, mut y) = waypoint(&mut rng);
            let mut target = waypoint(&mut rng);
            let mut speed = rng.gen_range(vmin..=vmax);
            let mut points = Vec::with_capacity(params.n_points);
            for i in 0..params.n_points {
                points.push(ProjectedPoint { x, y, t: i as f64 * dt });
                let mut remaining = dt;
                loop {
                    let (dx, dy) = (target.0 - x, target.1 - y);
                    let dist = dx.hypot(dy);
                    let reach = speed * remaining;
                    if dist > reach {
                        x += dx / dist * reach;
                        y += dy / dist * reach;
                        break;
                    }
                    // Arrive, then spend the rest of the interval on the next leg.
                    x = target.0;
                    y = target.1;
                    remaining -= dist / speed;
                    target = waypoint(&mut rng);
                    speed = rng.gen_range(vmin..=vmax);
                    if remaining <= 0.0 {
                        break;
                    }
                }
            }
            ProjectedTrack { selector: format!("synth-{index:05}"), points, origin: params.origin }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(n: usize) -> ProjectedTrack {
        let points = (0..n).map(|i| ProjectedPoint { x: 0.5 * i as f64, y: 0.0, t: i as f64 / 180.0 }).collect();
        ProjectedTrack { selector: "L".into(), points, origin: Origin { lon: 0.0, lat: 0.0, t: 0.0 } }
    }

    #[test]
    fn circle_points_on_radius() {
        let t = line(90);
        let a = augment_track(&t, &AnomalySpec::circle(1.0), 3).unwrap();
        let mid = middle_third(90);
        let m = mid.len() as f64;
        let (cx, cy) = t.points[mid.clone()].iter().fold((0.0, 0.0), |s, p| (s.0 + p.x / m, s.1 + p.y / m));
        for p in &a.track.points[mid] {
            assert!(((p.x - cx).hypot(p.y - cy) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn square_on_its_boundary() {
        let spec = AnomalySpec { shape: Shape::Square, ..AnomalySpec::circle(2.0) };
        for i in 0..64 {
            let (x, y) = outline(&spec, i as f64 / 64.0, 0.3, 0.0);
            assert!((x.abs().max(y.abs()) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipse_axes() {
        let spec = AnomalySpec { shape: Shape::Ellipse, eccentricity: 0.8, ..AnomalySpec::circle(5.0) };
        let b = 5.0 * (1.0 - 0.64f64).sqrt();
        for i in 0..64 {
            let (x, y) = outline(&spec, i as f64 / 64.0, 0.0, 0.0);
            assert!(((x / 5.0).powi(2) + (y / b).powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outer_thirds_and_times_kept() {
        let t = line(91);
        let spec = AnomalySpec { n_loops: 3, direction: Direction::Cw, ..AnomalySpec::circle(2.0) };
        let a = augment_track(&t, &spec, 9).unwrap();
        let mid = middle_third(91);
        for (i, (p, q)) in t.points.iter().zip(&a.track.points).enumerate() {
            assert_eq!(p.t.to_bits(), q.t.to_bits());
            if !mid.contains(&i) {
                assert_eq!((p.x.to_bits(), p.y.to_bits()), (q.x.to_bits(), q.y.to_bits()));
            }
        }
        assert_eq!(a, augment_track(&t, &spec, 9).unwrap());
        assert_ne!(a, augment_track(&t, &spec, 10).unwrap());
    }

    #[test]
    fn rejects_short_or_small_tracks() {
        assert!(matches!(augment_track(&line(8), &AnomalySpec::circle(0.1), 0), Err(Error::Augmentation { .. })));
        // 20 points span 9.5 km, so radius 5 is too large.
        assert!(augment_track(&line(20), &AnomalySpec::circle(5.0), 0).is_err());
        assert!(augment_track(&line(20), &AnomalySpec::circle(-1.0), 0).is_err());
    }

    #[test]
    fn benchmark_counts() {
        let tracks: Vec<_> = (0..10).map(|_| line(30)).collect();
        let b = build_benchmark(&tracks, 0.1, &SpecSampler::default(), 1).unwrap();
        assert_eq!(b.iter().filter(|t| t.label == Label::Augmented).count(), 1);
        assert!(build_benchmark(&tracks, 0.0, &SpecSampler::default(), 1).is_err());
        assert!(matches!(build_benchmark(&[line(5)], 0.5, &SpecSampler::default(), 1), Err(Error::NoEligibleTracks)));
    }

    #[test]
    fn benchmark_fraction_of_4400() {
        let t = line(12);
        let tracks = vec![t; 4400];
        let b = build_benchmark(&tracks, 0.1, &SpecSampler::circles((1.0, 2.0)), 5).unwrap();
        assert_eq!(b.iter().filter(|t| t.label == Label::Augmented).count(), 440);
    }

    #[test]
    fn clean_tracks_shape_and_speed() {
        let params = CleanTrackParams::default();
        let tracks = synthesize_clean_tracks(&params).unwrap();
        assert_eq!(tracks.len(), 200);
        for t in &tracks {
            assert_eq!(t.len(), 90);
            for w in t.points.windows(2) {
                let v = (w[1].x - w[0].x).hypot(w[1].y - w[0].y) / (w[1].t - w[0].t);
                assert!(v <= params.speed_kmh.1 + 1e-9, "{v} km/h");
            }
        }
        assert_eq!(tracks, synthesize_clean_tracks(&params).unwrap());
    }

    proptest! {
        #[test]
        fn sampled_specs_valid(seed in any::<u64>(), max_radius in 1.0f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = SpecSampler::default().sample(&mut rng, max_radius);
            prop_assert!(spec.validate().is_ok());
            prop_assert!(spec.radius_km <= max_radius && spec.radius_km >= 1.0);
            prop_assert!(spec.eccentricity <= 0.8);
        }
    }
}
