//! Trajectory ingest: delimited-text parsing, rest-gap segmentation and
//! local planar projection.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::{DateTime, NaiveDateTime};
use serde::Serialize;

use crate::{Error, Result};

/// Kilometers per degree of longitude at the equator.
pub const KM_PER_DEG_LON: f64 = 111.320;
/// Kilometers per degree of latitude.
pub const KM_PER_DEG_LAT: f64 = 110.574;
/// Default rest gap, in seconds, after which a track is split.
pub const DEFAULT_REST_GAP_SECS: f64 = 45.0 * 60.0;
/// Longitude span (degrees) at or beyond which local projection is refused.
pub const MAX_LON_SPAN_DEG: f64 = 90.0;

/// One raw position report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub lon: f64,
    pub lat: f64,
    /// Seconds since the Unix epoch (UTC).
    pub t: f64,
}

impl TrackPoint {
    pub fn new(lon: f64, lat: f64, t: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidParameter(format!("latitude {lat} outside [-90, 90]")));
        }
        if !(-180.0..180.0).contains(&lon) {
            return Err(Error::InvalidParameter(format!("longitude {lon} outside [-180, 180)")));
        }
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time {t} is not finite")));
        }
        Ok(Self { lon, lat, t })
    }
}

/// All reports of one selector, sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub selector: String,
    pub points: Vec<TrackPoint>,
}

impl Track {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Reference point of a local projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Origin {
    pub lon: f64,
    pub lat: f64,
    /// Epoch seconds of the first point; projected times count hours from here.
    pub t: f64,
}

/// A projected sample: kilometers east/north of the origin, hours after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedTrack {
    pub selector: String,
    pub points: Vec<ProjectedPoint>,
    pub origin: Origin,
}

impl ProjectedTrack {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cumulative planar path length in km.
    pub fn path_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y))
            .sum()
    }

    /// Maps the projected samples back to geographic reports.
    pub fn unproject(&self) -> Vec<TrackPoint> {
        self.points
            .iter()
            .map(|p| unproject_point(p, &self.origin))
            .collect()
    }
}

/// Column mapping for delimited input.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub selector: String,
    pub lat: String,
    pub lon: String,
    pub time: String,
    pub delimiter: u8,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            selector: "selector".into(),
            lat: "lat".into(),
            lon: "lon".into(),
            time: "time".into(),
            delimiter: b',',
        }
    }
}

impl Schema {
    /// MarineCadastre / AccessAIS broadcast points.
    pub fn marine_cadastre() -> Self {
        Self {
            selector: "MMSI".into(),
            lat: "LAT".into(),
            lon: "LON".into(),
            time: "BaseDateTime".into(),
            delimiter: b',',
        }
    }

    /// Rio de Janeiro bus GPS feed.
    pub fn rio_bus() -> Self {
        Self {
            selector: "bus_id".into(),
            lat: "latitude".into(),
            lon: "longitude".into(),
            time: "timestamp".into(),
            delimiter: b',',
        }
    }
}

/// A rejected input row, or a whole track when `line` is 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordError {
    pub line: u64,
    pub selector: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    pub tracks: Vec<Track>,
    pub errors: Vec<RecordError>,
    /// Exact duplicate records that were dropped.
    pub duplicates: usize,
}

impl ParseReport {
    pub fn point_count(&self) -> usize {
        self.tracks.iter().map(Track::len).sum()
    }

    /// Writes the rejected rows as JSON lines.
    pub fn write_errors<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for e in &self.errors {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeFormat {
    EpochSeconds,
    Iso8601,
}

/// Guesses the time format from one sample value.
pub fn detect_time_format(sample: &str) -> TimeFormat {
    if sample.trim().parse::<f64>().is_ok() {
        TimeFormat::EpochSeconds
    } else {
        TimeFormat::Iso8601
    }
}

/// Parses a timestamp to epoch seconds. Zone-less ISO values are taken as UTC.
pub fn parse_time(value: &str, format: TimeFormat) -> Option<f64> {
    let value = value.trim();
    match format {
        TimeFormat::EpochSeconds => value.parse::<f64>().ok().filter(|t| t.is_finite()),
        TimeFormat::Iso8601 => {
            if let Ok(dt) = DateTime::parse_from_rfc3339(value) {
                return Some(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9);
            }
            const FORMATS: [&str; 4] = [
                "%Y-%m-%dT%H:%M:%S%.f",
                "%Y-%m-%d %H:%M:%S%.f",
                "%Y-%m-%dT%H:%M",
                "%Y-%m-%d %H:%M",
            ];
            FORMATS.iter().find_map(|f| {
                NaiveDateTime::parse_from_str(value, f).ok().map(|dt| {
                    let utc = dt.and_utc();
                    utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9
                })
            })
        }
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

/// Parses delimited text into one time-sorted [`Track`] per selector.
///
/// Bad rows are collected in the report and skipped. A missing mapped
/// column is fatal; input without any header yields an empty report.
pub fn parse_tracks<R: Read>(source: R, schema: &Schema) -> Result<ParseReport> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .has_headers(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.is_empty() && reader.is_done() {
        return Ok(ParseReport::default());
    }
    let sel_col = column(&headers, &schema.selector)?;
    let lat_col = column(&headers, &schema.lat)?;
    let lon_col = column(&headers, &schema.lon)?;
    let time_col = column(&headers, &schema.time)?;

    let mut groups: BTreeMap<String, Vec<TrackPoint>> = BTreeMap::new();
    let mut errors = Vec::new();
    let mut time_format = None;
    let mut record = csv::StringRecord::new();

    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                // Invalid UTF-8 and similar are row-level; I/O failures are not.
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(e.into());
                }
                errors.push(RecordError { line, selector: None, message: e.to_string() });
                continue;
            }
        }
        let field = |i: usize| record.get(i).map(str::trim);
        let selector = field(sel_col).filter(|s| !s.is_empty()).map(str::to_string);
        let fail = |message: String| RecordError { line, selector: selector.clone(), message };

        let (Some(sel), Some(lat), Some(lon), Some(time)) =
            (selector.clone(), field(lat_col), field(lon_col), field(time_col))
        else {
            errors.push(fail(format!(
                "row has {} fields or an empty selector",
                record.len()
            )));
            continue;
        };
        let Ok(lat) = lat.parse::<f64>() else {
            errors.push(fail(format!("unparseable latitude `{lat}`")));
            continue;
        };
        let Ok(lon) = lon.parse::<f64>() else {
            errors.push(fail(format!("unparseable longitude `{lon}`")));
            continue;
        };
        let format = *time_format.get_or_insert_with(|| detect_time_format(time));
        let Some(t) = parse_time(time, format) else {
            errors.push(fail(format!("unparseable time `{time}`")));
            continue;
        };
        match TrackPoint::new(lon, lat, t) {
            Ok(p) => groups.entry(sel).or_default().push(p),
            Err(e) => errors.push(fail(e.to_string())),
        }
    }

    let mut duplicates = 0;
    let tracks = groups
        .into_iter()
        .map(|(selector, mut points)| {
            points.sort_by(|a, b| {
                a.t.total_cmp(&b.t)
                    .then(a.lat.total_cmp(&b.lat))
                    .then(a.lon.total_cmp(&b.lon))
            });
            let before = points.len();
            points.dedup_by(|a, b| a == b);
            duplicates += before - points.len();
            Track { selector, points }
        })
        .collect();

    Ok(ParseReport { tracks, errors, duplicates })
}

/// Splits a track after every point whose successor arrives more than
/// `rest_gap_secs` later.
///
/// An unsplit track is returned as is; otherwise segment `i` is named
/// `<selector>#<i>`.
pub fn segment_track(track: &Track, rest_gap_secs: f64) -> Vec<Track> {
    let mut cuts = vec![0];
    for (i, w) in track.points.windows(2).enumerate() {
        if w[1].t - w[0].t > rest_gap_secs {
            cuts.push(i + 1);
        }
    }
    if cuts.len() == 1 {
        return vec![track.clone()];
    }
    cuts.push(track.points.len());
    cuts.windows(2)
        .enumerate()
        .map(|(i, w)| Track {
            selector: format!("{}#{}", track.selector, i),
            points: track.points[w[0]..w[1]].to_vec(),
        })
        .collect()
}

/// Removes jumps larger than 180 degrees between consecutive longitudes.
pub fn unwrap_longitudes(lons: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(lons.len());
    let mut offset = 0.0;
    for (i, &lon) in lons.iter().enumerate() {
        if i > 0 {
            let prev = lons[i - 1];
            let gap = lon - prev;
            if gap > 180.0 {
                offset -= 360.0;
            } else if gap < -180.0 {
                offset += 360.0;
            }
        }
        out.push(lon + offset);
    }
    out
}

/// Equirectangular projection about the track's centroid, times in hours
/// from the first point.
pub fn project_local(track: &Track) -> Result<ProjectedTrack> {
    if track.points.is_empty() {
        return Err(Error::Empty("track has no points"));
    }
    let lons = unwrap_longitudes(&track.points.iter().map(|p| p.lon).collect::<Vec<_>>());
    let (min, max) = lons
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
    if max - min >= MAX_LON_SPAN_DEG {
        return Err(Error::LongitudeSpan { selector: track.selector.clone(), span: max - min });
    }
    let n = track.points.len() as f64;
    let lon0 = lons.iter().sum::<f64>() / n;
    let lat0 = track.points.iter().map(|p| p.lat).sum::<f64>() / n;
    let t0 = track.points[0].t;
    let kx = KM_PER_DEG_LON * lat0.to_radians().cos();

    let points = track
        .points
        .iter()
        .zip(&lons)
        .map(|(p, &lon)| ProjectedPoint {
            x: (lon - lon0) * kx,
            y: (p.lat - lat0) * KM_PER_DEG_LAT,
            t: (p.t - t0) / 3600.0,
        })
        .collect();

    Ok(ProjectedTrack {
        selector: track.selector.clone(),
        points,
        origin: Origin { lon: normalize_lon(lon0), lat: lat0, t: t0 },
    })
}

fn normalize_lon(lon: f64) -> f64 {
    let l = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if l >= 180.0 {
        l - 360.0
    } else {
        l
    }
}

/// Inverse of [`project_local`] for one point.
pub fn unproject_point(p: &ProjectedPoint, origin: &Origin) -> TrackPoint {
    let kx = KM_PER_DEG_LON * origin.lat.to_radians().cos();
    TrackPoint {
        lon: normalize_lon(origin.lon + p.x / kx),
        lat: origin.lat + p.y / KM_PER_DEG_LAT,
        t: origin.t + p.t * 3600.0,
    }
}
