use std::cmp::Ordering;

use crate::metric::DistanceMatrix;

/// A vertex, edge or triangle with its clique-rule filtration value.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// Strictly increasing point indices.
    pub vertices: Vec<usize>,
    pub value: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Filtration order: value, then dimension, then lexicographic vertices.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.vertices.len().cmp(&other.vertices.len()))
            .then_with(|| self.vertices.cmp(&other.vertices))
    }

    /// Codimension-1 faces, in vertex-removal order.
    pub fn facets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = if self.vertices.len() > 1 { self.vertices.len() } else { 0 };
        (0..n).map(move |skip| {
            self.vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
    }
}

/// The Rips 2-skeleton up to `cap`, in filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    pub simplices: Vec<Simplex>,
    pub cap: f64,
}

impl Filtration {
    pub fn count(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }
}

/// Materializes every vertex, every edge with `d ≤ cap` and every triangle
/// whose edges are all `≤ cap`.
pub fn build_filtration(m: &DistanceMatrix, cap: f64) -> Filtration {
    let n = m.len();
    let mut simplices: Vec<Simplex> = (0..n).map(|i| Simplex { vertices: vec![i], value: 0.0 }).collect();
    for i in 0..n {
        for j in i + 1..n {
            let dij = m.get(i, j);
            if dij > cap {
                continue;
            }
            simplices.push(Simplex { vertices: vec![i, j], value: dij });
            for k in j + 1..n {
                let (dik, djk) = (m.get(i, k), m.get(j, k));
                if dik <= cap && djk <= cap {
                    simplices.push(Simplex { vertices: vec![i, j, k], value: dij.max(dik).max(djk) });
                }
            }
        }
    }
    simplices.sort_by(Simplex::filtration_cmp);
    Filtration { simplices, cap }
}
