use std::collections::HashMap;

use super::{build_filtration, PersistenceDiagram, PersistencePair};
use crate::metric::DistanceMatrix;
use crate::{Error, Result};

pub const NAIVE_MAX_POINTS: usize = 25;

/// Left-to-right reduction of the full boundary matrix, no optimizations.
pub fn naive_reduce(m: &DistanceMatrix, cap: f64) -> Result<PersistenceDiagram> {
    if m.len() > NAIVE_MAX_POINTS {
        return Err(Error::TooManyPoints { n: m.len(), max: NAIVE_MAX_POINTS });
    }
    let filtration = build_filtration(m, cap);
    let simplices = &filtration.simplices;
    let index: HashMap<&[usize], usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.vertices.as_slice(), i)).collect();

    // Columns hold row indices in ascending order.
    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|s| {
            let mut col: Vec<usize> = s.facets().map(|f| index[f.as_slice()]).collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut owner_of_low: HashMap<usize, usize> = HashMap::new();
    let mut paired = vec![false; simplices.len()];
    let mut pairs = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            let Some(&other) = owner_of_low.get(&low) else { break };
            let sum = symmetric_difference(&columns[j], &columns[other]);
            columns[j] = sum;
        }
        if let Some(&low) = columns[j].last() {
            owner_of_low.insert(low, j);
            paired[low] = true;
            paired[j] = true;
            let (birth, death) = (simplices[low].value, simplices[j].value);
            if death > birth {
                pairs.push(PersistencePair { dim: simplices[low].dim() as u8, birth, death });
            }
        }
    }
    for (j, s) in simplices.iter().enumerate() {
        if !paired[j] && columns[j].is_empty() && s.dim() < 2 {
            pairs.push(PersistencePair { dim: s.dim() as u8, birth: s.value, death: f64::INFINITY });
        }
    }
    Ok(PersistenceDiagram::new(pairs, m.len(), cap))
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
