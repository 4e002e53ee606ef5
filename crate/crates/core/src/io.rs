//! Readers and writers for the tool's delimited file formats.

use std::io::{Read, Write};

use crate::features::FeatureRecord;
use crate::homology::PersistenceDiagram;
use crate::ingest::{ProjectedTrack, Schema};
use crate::synth::{Label, LabeledTrack, Shape};
use crate::{Error, Result};

pub const FEATURE_COLUMNS: [&str; 5] = ["selector", "n_points", "n_h1", "m1_km", "m1_birth_km"];
pub const LABEL_COLUMNS: [&str; 5] = ["selector", "label", "shape", "radius_km", "seed"];
pub const DIAGRAM_HEADER: &str = "selector,dim,birth,death";

/// Writes tracks as geographic reports in `schema`'s columns, times in epoch
/// seconds, so the output can be read back by [`crate::ingest::parse_tracks`].
pub fn write_dataset<W: Write>(tracks: &[ProjectedTrack], schema: &Schema, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(schema.delimiter).from_writer(out);
    w.write_record([&schema.selector, &schema.lat, &schema.lon, &schema.time])?;
    for track in tracks {
        for p in track.unproject() {
            w.write_record([
                track.selector.clone(),
                p.lat.to_string(),
                p.lon.to_string(),
                p.t.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of a labels file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRow {
    pub selector: String,
    pub label: Label,
    pub shape: Option<Shape>,
    pub radius_km: Option<f64>,
    pub seed: Option<u64>,
}

impl From<&LabeledTrack> for LabelRow {
    fn from(t: &LabeledTrack) -> Self {
        Self {
            selector: t.track.selector.clone(),
            label: t.label,
            shape: t.spec.map(|s| s.shape),
            radius_km: t.spec.map(|s| s.radius_km),
            seed: t.spec.map(|_| t.seed),
        }
    }
}

/// Clean rows leave the anomaly columns empty.
pub fn write_labels<W: Write>(rows: &[LabelRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LABEL_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.selector.clone(),
            r.label.name().to_string(),
            r.shape.map(|s| s.name().to_string()).unwrap_or_default(),
            r.radius_km.map(|v| v.to_string()).unwrap_or_default(),
            r.seed.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_features<W: Write>(records: &[FeatureRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FEATURE_COLUMNS)?;
    for r in records {
        w.write_record([
            r.selector.clone(),
            r.n_points.to_string(),
            r.n_h1.to_string(),
            r.m1.to_string(),
            r.m1_birth.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every diagram under one `selector,dim,birth,death` header.
pub fn write_diagrams<'a, W: Write>(
    diagrams: impl IntoIterator<Item = (&'a str, &'a PersistenceDiagram)>,
    mut out: W,
) -> Result<()> {
    writeln!(out, "{DIAGRAM_HEADER}")?;
    for (selector, d) in diagrams {
        d.write_rows(selector, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

/// Reader over a headed table whose required columns are looked up by name.
struct Table<R: Read> {
    reader: csv::Reader<R>,
    index: Vec<usize>,
}

impl<R: Read> Table<R> {
    fn open(source: R, columns: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
        let headers = reader.headers()?.clone();
        let missing: Vec<&str> = columns
            .iter()
            .copied()
            .filter(|c| !headers.iter().any(|h| h.trim() == *c))
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingColumn(missing.join(", ")));
        }
        let index = columns
            .iter()
            .map(|c| headers.iter().position(|h| h.trim() == *c).expect("checked above"))
            .collect();
        Ok(Self { reader, index })
    }

    /// Calls `f` with the required fields of every row, in column order.
    fn rows<T>(mut self, mut f: impl FnMut(&[&str]) -> std::result::Result<T, String>) -> Result<Vec<T>> {
        let mut out = Vec::new();
        let mut record = csv::StringRecord::new();
        loop {
            let line = self.reader.position().line();
            if !self.reader.read_record(&mut record)? {
                return Ok(out);
            }
            let fields: Option<Vec<&str>> = self.index.iter().map(|&i| record.get(i).map(str::trim)).collect();
            let fields = fields.ok_or_else(|| Error::Format {
                line,
                message: format!("row has {} fields", record.len()),
            })?;
            out.push(f(&fields).map_err(|message| Error::Format { line, message })?);
        }
    }
}

fn number<T: std::str::FromStr>(name: &str, value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid {name} `{value}`"))
}

fn finite(name: &str, value: &str) -> std::result::Result<f64, String> {
    number::<f64>(name, value).and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("{name} is not finite")) })
}

pub fn parse_features<R: Read>(source: R) -> Result<Vec<FeatureRecord>> {
    Table::open(source, &FEATURE_COLUMNS)?.rows(|f| {
        if f[0].is_empty() {
            return Err("empty selector".into());
        }
        Ok(FeatureRecord {
            selector: f[0].to_string(),
            n_points: number("n_points", f[1])?,
            n_h1: number("n_h1", f[2])?,
            m1: finite("m1_km", f[3])?,
            m1_birth: finite("m1_birth_km", f[4])?,
        })
    })
}

pub fn parse_labels<R: Read>(source: R) -> Result<Vec<LabelRow>> {
    Table::open(source, &LABEL_COLUMNS)?.rows(|f| {
        let label = match f[1] {
            "clean" => Label::Clean,
            "augmented" => Label::Augmented,
            other => return Err(format!("unknown label `{other}`")),
        };
        let opt = |s: &str| (!s.is_empty()).then_some(s.to_string());
        let shape = opt(f[2]).map(|s| Shape::parse(&s).ok_or(format!("unknown shape `{s}`"))).transpose()?;
        let radius_km = opt(f[3]).map(|s| finite("radius_km", &s)).transpose()?;
        let seed = opt(f[4]).map(|s| number("seed", &s)).transpose()?;
        if (label == Label::Augmented) != shape.is_some() {
            return Err("shape must be present exactly for augmented rows".into());
        }
        Ok(LabelRow { selector: f[0].to_string(), label, shape, radius_km, seed })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_tracks, project_local, Origin, ProjectedPoint};
    use crate::synth::AnomalySpec;

    fn record(selector: &str, m1: f64) -> FeatureRecord {
        FeatureRecord { selector: selector.into(), n_points: 90, n_h1: 2, m1, m1_birth: 0.25 }
    }

    #[test]
    fn features_round_trip() {
        let records = vec![record("a", 0.0), record("b,quoted", 1.0 / 3.0)];
        let mut buf = Vec::new();
        write_features(&records, &mut buf).unwrap();
        assert!(buf.starts_with(b"selector,n_points,n_h1,m1_km,m1_birth_km\n"));
        assert_eq!(parse_features(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn features_missing_columns_named() {
        let err = parse_features("selector,n_points,m1_km\na,3,0.5\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "missing column `n_h1, m1_birth_km` in header");
    }

    #[test]
    fn features_bad_value_has_line() {
        let text = "selector,n_points,n_h1,m1_km,m1_birth_km\na,3,0,0.5,0\nb,3,0,NaN,0\n";
        assert!(matches!(parse_features(text.as_bytes()), Err(Error::Format { line: 3, .. })));
    }

    #[test]
    fn labels_round_trip() {
        let track = ProjectedTrack {
            selector: "s1".into(),
            points: vec![],
            origin: Origin { lon: 0.0, lat: 0.0, t: 0.0 },
        };
        let aug = LabeledTrack {
            spec: Some(AnomalySpec::circle(2.5)),
            label: Label::Augmented,
            seed: 42,
            ..LabeledTrack::clean(track.clone())
        };
        let rows = vec![LabelRow::from(&LabeledTrack::clean(track)), LabelRow::from(&aug)];
        let mut buf = Vec::new();
        write_labels(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "selector,label,shape,radius_km,seed\ns1,clean,,,\ns1,augmented,circle,2.5,42\n");
        assert_eq!(parse_labels(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn labels_reject_inconsistent_rows() {
        let text = "selector,label,shape,radius_km,seed\na,clean,circle,1,1\n";
        assert!(parse_labels(text.as_bytes()).is_err());
        let text = "selector,label,shape,radius_km,seed\na,odd,,,\n";
        assert!(parse_labels(text.as_bytes()).is_err());
    }

    #[test]
    fn dataset_reads_back() {
        let points = (0..10)
            .map(|i| ProjectedPoint { x: 0.3 * i as f64, y: -0.1 * i as f64, t: i as f64 / 60.0 })
            .collect();
        let track = ProjectedTrack {
            selector: "bus-7".into(),
            points,
            origin: Origin { lon: -43.2, lat: -22.9, t: 1.0e9 },
        };
        let mut buf = Vec::new();
        write_dataset(std::slice::from_ref(&track), &Schema::rio_bus(), &mut buf).unwrap();
        let report = parse_tracks(buf.as_slice(), &Schema::rio_bus()).unwrap();
        assert!(report.errors.is_empty());
        let back = project_local(&report.tracks[0]).unwrap();
        assert_eq!(back.len(), 10);
        // Reprojection recenters on the centroid, so compare displacements.
        for (a, b) in track.points.windows(2).zip(back.points.windows(2)) {
            assert!(((a[1].x - a[0].x) - (b[1].x - b[0].x)).abs() < 1e-3);
            assert!(((a[1].y - a[0].y) - (b[1].y - b[0].y)).abs() < 1e-6);
            assert!(((a[1].t - a[0].t) - (b[1].t - b[0].t)).abs() < 1e-9);
        }
    }

    #[test]
    fn diagrams_header() {
        let mut buf = Vec::new();
        write_diagrams(std::iter::empty(), &mut buf).unwrap();
        assert_eq!(buf, b"selector,dim,birth,death\n");
    }
}
