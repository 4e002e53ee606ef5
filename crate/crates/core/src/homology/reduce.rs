//! Persistent cohomology with implicit coboundaries.
//!
//! H0 comes from a union-find pass over edges in filtration order. Edges
//! that merge components are pivots of the dimension-0 reduction, so their
//! dimension-1 columns are cleared. The remaining edges are reduced in
//! reverse filtration order; each column's coboundary (its triangles) is
//! enumerated on demand and only materialized when its pivot collides with
//! an earlier column.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use super::{PersistenceDiagram, PersistencePair, UnionFind};
use crate::metric::DistanceMatrix;

#[derive(Debug, Clone, Copy)]
struct Edge {
    value: f64,
    i: u32,
    j: u32,
}

/// A triangle keyed by filtration order.
#[derive(Debug, Clone, Copy)]
struct Triangle {
    value: f64,
    v: [u32; 3],
}

impl Triangle {
    fn key(&self) -> u128 {
        u128::from(self.v[0]) | (u128::from(self.v[1]) << 32) | (u128::from(self.v[2]) << 64)
    }
}

impl PartialEq for Triangle {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Triangle {}

impl PartialOrd for Triangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Triangle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then(self.v.cmp(&other.v))
    }
}

/// Column that owns a pivot: its edge plus the edges added during reduction.
#[derive(Debug, Clone, Copy)]
struct Owner {
    edge: u32,
    added_start: u32,
    added_len: u32,
}

struct Reducer<'a> {
    m: &'a DistanceMatrix,
    cap: f64,
    edges: Vec<Edge>,
}

impl Reducer<'_> {
    /// Calls `f` for every triangle on edge `e`, in ascending lexicographic
    /// vertex order.
    #[inline]
    fn for_each_coface(&self, e: usize, mut f: impl FnMut(Triangle) -> bool) {
        let Edge { value, i, j } = self.edges[e];
        let (iu, ju) = (i as usize, j as usize);
        for k in 0..self.m.len() {
            if k == iu || k == ju {
                continue;
            }
            let a = self.m.get(iu, k);
            if a > self.cap {
                continue;
            }
            let b = self.m.get(ju, k);
            if b > self.cap {
                continue;
            }
            let k = k as u32;
            let v = if k < i {
                [k, i, j]
            } else if k < j {
                [i, k, j]
            } else {
                [i, j, k]
            };
            if !f(Triangle { value: value.max(a).max(b), v }) {
                return;
            }
        }
    }

    /// Smallest triangle on edge `e`. Stops early at the first triangle with
    /// the edge's own value, which is minimal since scan order is
    /// lexicographic.
    fn min_coface(&self, e: usize) -> Option<Triangle> {
        let floor = self.edges[e].value;
        let mut best: Option<Triangle> = None;
        self.for_each_coface(e, |t| {
            if best.map_or(true, |b| t < b) {
                best = Some(t);
            }
            t.value != floor
        });
        best
    }

    fn push_coboundary(&self, e: usize, heap: &mut BinaryHeap<Reverse<Triangle>>) {
        self.for_each_coface(e, |t| {
            heap.push(Reverse(t));
            true
        });
    }
}

/// Smallest surviving entry of a Z/2 column held as a heap of terms.
fn pivot(heap: &mut BinaryHeap<Reverse<Triangle>>) -> Option<Triangle> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek().is_some_and(|Reverse(next)| *next == top) {
            heap.pop();
        } else {
            heap.push(Reverse(top));
            return Some(top);
        }
    }
    None
}

/// Removes entries that appear an even number of times.
fn cancel_pairs(list: &mut Vec<u32>) {
    list.sort_unstable();
    let mut out = Vec::with_capacity(list.len());
    for &x in list.iter() {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    *list = out;
}

/// H0 and H1 persistence of the Rips filtration of `m` truncated at `cap`.
///
/// Zero-persistence pairs are dropped. With `cap` at least the enclosing
/// radius, every H1 class is finite.
pub fn compute_persistence(m: &DistanceMatrix, cap: f64) -> PersistenceDiagram {
    let n = m.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let value = m.get(i, j);
            if value <= cap {
                edges.push(Edge { value, i: i as u32, j: j as u32 });
            }
        }
    }
    edges.sort_unstable_by(|a, b| a.value.total_cmp(&b.value).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));

    let mut pairs = Vec::new();
    let mut uf = UnionFind::new(n);
    let mut cleared = vec![false; edges.len()];
    for (idx, e) in edges.iter().enumerate() {
        if uf.union(e.i as usize, e.j as usize) {
            cleared[idx] = true;
            if e.value > 0.0 {
                pairs.push(PersistencePair { dim: 0, birth: 0.0, death: e.value });
            }
        }
    }
    pairs.extend(
        (0..uf.components()).map(|_| PersistencePair { dim: 0, birth: 0.0, death: f64::INFINITY }),
    );

    let reducer = Reducer { m, cap, edges };
    let mut owners: FxHashMap<u128, Owner> = FxHashMap::default();
    let mut added_arena: Vec<u32> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut added = Vec::new();

    for e in (0..reducer.edges.len()).rev() {
        if cleared[e] {
            continue;
        }
        let birth = reducer.edges[e].value;
        let pivot_found = match reducer.min_coface(e) {
            Some(t) if !owners.contains_key(&t.key()) => {
                owners.insert(t.key(), Owner { edge: e as u32, added_start: 0, added_len: 0 });
                Some(t)
            }
            None => None,
            Some(_) => {
                heap.clear();
                added.clear();
                reducer.push_coboundary(e, &mut heap);
                loop {
                    let Some(t) = pivot(&mut heap) else { break None };
                    let Some(&owner) = owners.get(&t.key()) else {
                        cancel_pairs(&mut added);
                        let start = added_arena.len() as u32;
                        added_arena.extend_from_slice(&added);
                        owners.insert(
                            t.key(),
                            Owner { edge: e as u32, added_start: start, added_len: added.len() as u32 },
                        );
                        break Some(t);
                    };
                    let range = owner.added_start as usize..(owner.added_start + owner.added_len) as usize;
                    added.push(owner.edge);
                    added.extend_from_slice(&added_arena[range.clone()]);
                    reducer.push_coboundary(owner.edge as usize, &mut heap);
                    for &extra in &added_arena[range] {
                        reducer.push_coboundary(extra as usize, &mut heap);
                    }
                }
            }
        };
        match pivot_found {
            Some(t) if t.value > birth => pairs.push(PersistencePair { dim: 1, birth, death: t.value }),
            Some(_) => {}
            None => pairs.push(PersistencePair { dim: 1, birth, death: f64::INFINITY }),
        }
    }

    PersistenceDiagram::new(pairs, n, cap)
}
