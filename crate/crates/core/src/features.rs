//! Per-track summaries of persistence diagrams and outlier scoring.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::homology::PersistenceDiagram;
use crate::{Error, Result};

pub const DEFAULT_ABSOLUTE_THRESHOLD_KM: f64 = 1.0;
pub const DEFAULT_MAD_C: f64 = 10.0;
/// Threshold offset used by the MAD rule when the MAD is zero.
pub const DEFAULT_MAD_FLOOR_KM: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub selector: String,
    pub n_points: usize,
    /// Number of finite H1 pairs.
    pub n_h1: usize,
    /// Longest finite H1 lifespan, km.
    pub m1: f64,
    /// Birth of that pair, km.
    pub m1_birth: f64,
}

impl FeatureRecord {
    pub fn from_diagram(selector: impl Into<String>, diagram: &PersistenceDiagram) -> Self {
        let (m1, m1_birth) = max_lifespan(diagram, 1);
        Self {
            selector: selector.into(),
            n_points: diagram.n_points,
            n_h1: diagram.dimension(1).filter(|p| p.is_finite()).count(),
            m1,
            m1_birth,
        }
    }
}

/// `(death − birth, birth)` of the longest finite pair of `dim`; ties go to
/// the smaller birth. `(0, 0)` when there is none.
pub fn max_lifespan(diagram: &PersistenceDiagram, dim: u8) -> (f64, f64) {
    diagram
        .dimension(dim)
        .filter(|p| p.is_finite())
        .map(|p| (p.lifespan(), p.birth))
        .fold((0.0, 0.0), |best, cur| {
            if cur.0 > best.0 || (cur.0 == best.0 && cur.0 > 0.0 && cur.1 < best.1) {
                cur
            } else {
                best
            }
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum OutlierMethod {
    /// Flag `m1 > threshold_km`.
    Absolute { threshold_km: f64 },
    /// Flag `m1 > median + c·MAD`, or `m1 > median + floor_km` when MAD is 0.
    Mad { c: f64, floor_km: f64 },
}

impl Default for OutlierMethod {
    fn default() -> Self {
        OutlierMethod::Absolute { threshold_km: DEFAULT_ABSOLUTE_THRESHOLD_KM }
    }
}

impl OutlierMethod {
    pub fn label(&self) -> &'static str {
        match self {
            OutlierMethod::Absolute { .. } => "absolute",
            OutlierMethod::Mad { .. } => "mad",
        }
    }
}

impl FromStr for OutlierMethod {
    type Err = Error;

    /// Parses a method label with its default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(OutlierMethod::default()),
            "mad" => Ok(OutlierMethod::Mad { c: DEFAULT_MAD_C, floor_km: DEFAULT_MAD_FLOOR_KM }),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub method: String,
    pub params: OutlierMethod,
    pub threshold: f64,
    pub flagged: Vec<String>,
    pub records: Vec<FeatureRecord>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Median absolute deviation from the median.
pub fn mad(values: &[f64]) -> f64 {
    let m = median(values);
    median(&values.iter().map(|v| (v - m).abs()).collect::<Vec<_>>())
}

pub fn score_outliers(records: &[FeatureRecord], method: OutlierMethod) -> Result<OutlierReport> {
    if records.is_empty() {
        return Err(Error::Empty("feature records"));
    }
    let threshold = match method {
        OutlierMethod::Absolute { threshold_km } => threshold_km,
        OutlierMethod::Mad { c, floor_km } => {
            let values: Vec<f64> = records.iter().map(|r| r.m1).collect();
            let (med, dev) = (median(&values), mad(&values));
            if dev > 0.0 {
                med + c * dev
            } else {
                med + floor_km
            }
        }
    };
    let flagged = records.iter().filter(|r| r.m1 > threshold).map(|r| r.selector.clone()).collect();
    Ok(OutlierReport {
        method: method.label().to_string(),
        params: method,
        threshold,
        flagged,
        records: records.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::PersistencePair;
    use proptest::prelude::*;

    fn diagram(h1: &[(f64, f64)]) -> PersistenceDiagram {
        let mut pairs = vec![PersistencePair { dim: 0, birth: 0.0, death: f64::INFINITY }];
        pairs.extend(h1.iter().map(|&(birth, death)| PersistencePair { dim: 1, birth, death }));
        PersistenceDiagram::new(pairs, 10, 100.0)
    }

    fn records(values: &[f64]) -> Vec<FeatureRecord> {
        values
            .iter()
            .enumerate()
            .map(|(i, &m1)| FeatureRecord {
                selector: format!("s{i:03}"),
                n_points: 90,
                n_h1: usize::from(m1 > 0.0),
                m1,
                m1_birth: 0.0,
            })
            .collect()
    }

    #[test]
    fn square_lifespan() {
        let (l, b) = max_lifespan(&diagram(&[(1.0, 2f64.sqrt())]), 1);
        assert!((l - 0.4142).abs() < 1e-4);
        assert_eq!(b, 1.0);
    }

    #[test]
    fn empty_and_simple() {
        assert_eq!(max_lifespan(&diagram(&[]), 1), (0.0, 0.0));
        assert_eq!(max_lifespan(&diagram(&[(1.0, 2.0), (3.0, 7.0)]), 1), (4.0, 3.0));
        assert_eq!(max_lifespan(&diagram(&[(3.0, 4.0), (1.0, 2.0)]), 1), (1.0, 1.0));
    }

    #[test]
    fn essential_pairs_ignored() {
        assert_eq!(max_lifespan(&diagram(&[]), 0), (0.0, 0.0));
    }

    #[test]
    fn absolute_threshold() {
        let r = score_outliers(&records(&[0.0, 0.0, 0.01, 9.3]), OutlierMethod::default()).unwrap();
        assert_eq!(r.flagged, vec!["s003"]);
        assert_eq!(r.method, "absolute");
    }

    #[test]
    fn mad_all_zero_flags_nothing() {
        let r = score_outliers(&records(&[0.0; 20]), "mad".parse().unwrap()).unwrap();
        assert!(r.flagged.is_empty());
    }

    #[test]
    fn mad_falls_back_to_floor() {
        let mut v = vec![0.0; 97];
        v.extend([0.02, 0.03, 5.0]);
        let r = score_outliers(&records(&v), "mad".parse().unwrap()).unwrap();
        assert_eq!(r.threshold, DEFAULT_MAD_FLOOR_KM);
        assert_eq!(r.flagged, vec!["s099"]);
    }

    #[test]
    fn unknown_method_and_empty_records() {
        assert!(matches!("zscore".parse::<OutlierMethod>(), Err(Error::UnknownMethod(_))));
        assert!(score_outliers(&[], OutlierMethod::default()).is_err());
    }

    #[test]
    fn record_from_diagram() {
        let rec = FeatureRecord::from_diagram("A", &diagram(&[(1.0, 2.0), (3.0, 7.0)]));
        assert_eq!((rec.n_h1, rec.m1, rec.m1_birth, rec.n_points), (2, 4.0, 3.0, 10));
    }

    proptest! {
        #[test]
        fn lifespan_ignores_pair_order(mut h1 in proptest::collection::vec((0.0f64..5.0, 0.0f64..5.0), 0..12)) {
            for p in &mut h1 { p.1 += p.0 + 1e-3; }
            let a = max_lifespan(&diagram(&h1), 1);
            h1.reverse();
            prop_assert_eq!(a, max_lifespan(&diagram(&h1), 1));
        }

        #[test]
        fn lifespan_scales(h1 in proptest::collection::vec((0.0f64..5.0, 0.001f64..5.0), 1..12), c in 0.1f64..10.0) {
            let h1: Vec<_> = h1.iter().map(|&(b, l)| (b, b + l)).collect();
            let (l, _) = max_lifespan(&diagram(&h1), 1);
            let (ls, _) = max_lifespan(&diagram(&h1).scaled(c), 1);
            prop_assert!((ls - c * l).abs() <= 1e-12 * ls.max(1.0));
        }

        #[test]
        fn adding_longer_pair_increases(h1 in proptest::collection::vec((0.0f64..5.0, 0.001f64..5.0), 0..12), extra in 0.001f64..1.0) {
            let mut h1: Vec<_> = h1.iter().map(|&(b, l)| (b, b + l)).collect();
            let (l, _) = max_lifespan(&diagram(&h1), 1);
            h1.push((2.0, 2.0 + l + extra));
            prop_assert!(max_lifespan(&diagram(&h1), 1).0 > l);
        }

        #[test]
        fn mad_flags_scale_invariant(values in proptest::collection::vec(0.0f64..10.0, 5..60), c in 0.1f64..10.0) {
            let method = OutlierMethod::Mad { c: DEFAULT_MAD_C, floor_km: DEFAULT_MAD_FLOOR_KM };
            prop_assume!(mad(&values) > 0.0);
            let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
            let a = score_outliers(&records(&values), method).unwrap();
            let b = score_outliers(&records(&scaled), method).unwrap();
            prop_assert_eq!(a.flagged, b.flagged);
        }
    }
}
