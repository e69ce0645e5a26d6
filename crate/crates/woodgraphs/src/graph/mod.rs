//! Immutable simple graphs with bit-packed adjacency rows, plus the fiber
//! partitions used by the antipodal-cover checks.
//!
//! Vertices are `0..order`; each row is `ceil(order/64)` words of `u64` with
//! bit v of row u set iff u ~ v. All verifiers in the sibling modules work
//! directly on these rows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod distreg;
pub mod io;
pub mod naive;
pub mod verify;

/// Hard cap on graph order: 2^16 vertices keeps the packed adjacency at
/// 512 MiB worst case, the edge of desk scale.
pub const MAX_ORDER: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph order {order} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge { order: usize },
    #[error("vertex {v} out of range for order {order}")]
    VertexOutOfRange { v: usize, order: usize },
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("adjacency is not symmetric at ({u}, {v})")]
    Asymmetric { u: usize, v: usize },
    #[error("fiber partition is empty")]
    EmptyPartition,
    #[error("fiber {index} has size {got}, expected {expected}")]
    UnevenFiber { index: usize, expected: usize, got: usize },
    #[error("vertex {v} appears in more than one fiber")]
    OverlappingFibers { v: usize },
    #[error("partition covers {covered} vertices but the graph has order {order}")]
    PartitionOrderMismatch { covered: usize, order: usize },
    #[error("malformed edge list: {0}")]
    Parse(String),
}

/// Immutable order-n graph: bit-packed symmetric adjacency with a clear
/// diagonal, plus optional per-vertex labels for witness readability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    order: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl Graph {
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Words per adjacency row.
    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 != 0
    }

    #[inline]
    pub fn degree(&self, u: usize) -> u32 {
        self.row(u).iter().map(|w| w.count_ones()).sum()
    }

    /// Total edge count by handshake: half the sum of degrees.
    pub fn edge_count(&self) -> u64 {
        let twice: u64 = (0..self.order).map(|u| self.degree(u) as u64).sum();
        debug_assert_eq!(twice % 2, 0);
        twice / 2
    }

    /// Neighbors of u in ascending order.
    pub fn neighbors(&self, u: usize) -> BitIter<'_> {
        BitIter::new(self.row(u))
    }

    /// All edges as (u, v) with u < v, ascending lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.order).flat_map(move |u| {
            self.neighbors(u)
                .skip_while(move |&v| v <= u)
                .map(move |v| (u as u32, v as u32))
        })
    }

    pub fn label(&self, u: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[u].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Constructs a graph from an explicit edge list, validating ranges and
    /// rejecting self-loops. Duplicate edges collapse silently.
    pub fn from_edges(order: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(order)?;
        for &(u, v) in edges {
            let (u, v) = (u as usize, v as usize);
            if u >= order || v >= order {
                return Err(GraphError::VertexOutOfRange { v: u.max(v), order });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            b.add_edge(u, v);
        }
        Ok(b.build())
    }

    /// Exact symmetry / clear-diagonal validation; used by tests and builders.
    pub fn validate(&self) -> Result<(), GraphError> {
        for u in 0..self.order {
            if self.has_edge(u, u) {
                return Err(GraphError::SelfLoop(u));
            }
            for v in self.neighbors(u) {
                if !self.has_edge(v, u) {
                    return Err(GraphError::Asymmetric { u, v });
                }
            }
        }
        Ok(())
    }
}

/// Mutable construction buffer; `build` freezes it into a [`Graph`].
pub struct GraphBuilder {
    order: usize,
    words: usize,
    bits: Vec<u64>,
}

impl GraphBuilder {
    pub fn new(order: usize) -> Result<GraphBuilder, GraphError> {
        if order > MAX_ORDER {
            return Err(GraphError::OrderTooLarge { order });
        }
        let words = (order + 63) / 64;
        Ok(GraphBuilder { order, words, bits: vec![0; order * words] })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Sets both directions of an undirected edge.
    ///
    /// Panics on out-of-range vertices or self-loops; builders are trusted
    /// internal code paths, import goes through [`Graph::from_edges`].
    #[inline]
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.order && v < self.order && u != v);
        self.bits[u * self.words + v / 64] |= 1u64 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1u64 << (u % 64);
    }

    /// Sets only u's row bit for v. For builders whose adjacency relation is
    /// symmetric by construction and which visit every ordered pair once.
    #[inline]
    pub fn add_arc(&mut self, u: usize, v: usize) {
        debug_assert!(u < self.order && v < self.order && u != v);
        self.bits[u * self.words + v / 64] |= 1u64 << (v % 64);
    }

    pub fn build(self) -> Graph {
        Graph { order: self.order, words: self.words, bits: self.bits, labels: None }
    }

    pub fn build_labeled(self, labels: Vec<String>) -> Graph {
        assert_eq!(labels.len(), self.order);
        Graph {
            order: self.order,
            words: self.words,
            bits: self.bits,
            labels: Some(labels),
        }
    }
}

/// Iterator over set bit positions of a packed row.
pub struct BitIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl<'a> BitIter<'a> {
    pub fn new(words: &'a [u64]) -> BitIter<'a> {
        BitIter { words, word_idx: 0, current: words.first().copied().unwrap_or(0) }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_idx * 64 + bit);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
    }
}

/// A partition of the vertex set into equal-size classes ("fibers").
///
/// Structural validity (equal sizes, disjointness, full cover of `0..order`)
/// is enforced at construction; whether the classes actually form an
/// antipodal cover of a given graph is decided by
/// [`distreg::cover_violation`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberPartition {
    fibers: Vec<Vec<u32>>,
    fiber_of: Vec<u32>,
    fiber_size: usize,
}

impl FiberPartition {
    /// Validates and canonicalizes (sorts each fiber ascending).
    pub fn new(mut fibers: Vec<Vec<u32>>) -> Result<FiberPartition, GraphError> {
        if fibers.is_empty() || fibers[0].is_empty() {
            return Err(GraphError::EmptyPartition);
        }
        let fiber_size = fibers[0].len();
        for (index, f) in fibers.iter().enumerate() {
            if f.len() != fiber_size {
                return Err(GraphError::UnevenFiber {
                    index,
                    expected: fiber_size,
                    got: f.len(),
                });
            }
        }
        let order = fibers.len() * fiber_size;
        let mut fiber_of = vec![u32::MAX; order];
        for (j, f) in fibers.iter_mut().enumerate() {
            f.sort_unstable();
            for &v in f.iter() {
                let v = v as usize;
                if v >= order {
                    return Err(GraphError::PartitionOrderMismatch { covered: v + 1, order });
                }
                if fiber_of[v] != u32::MAX {
                    return Err(GraphError::OverlappingFibers { v: v as usize });
                }
                fiber_of[v] = j as u32;
            }
        }
        // Disjoint, in range, and the counts add up, so every vertex is hit.
        Ok(FiberPartition { fibers, fiber_of, fiber_size })
    }

    /// Number of vertices covered (fiber count times fiber size).
    #[inline]
    pub fn order(&self) -> usize {
        self.fiber_of.len()
    }

    #[inline]
    pub fn fiber_count(&self) -> usize {
        self.fibers.len()
    }

    #[inline]
    pub fn fiber_size(&self) -> usize {
        self.fiber_size
    }

    #[inline]
    pub fn fiber(&self, j: usize) -> &[u32] {
        &self.fibers[j]
    }

    pub fn fibers(&self) -> &[Vec<u32>] {
        &self.fibers
    }

    /// Index of the fiber containing v.
    #[inline]
    pub fn fiber_of(&self, v: usize) -> usize {
        self.fiber_of[v] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_sets_both_directions() {
        let mut b = GraphBuilder::new(4).unwrap();
        b.add_edge(0, 2);
        b.add_edge(2, 3);
        let g = b.build();
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0));
        assert!(g.has_edge(2, 3) && g.has_edge(3, 2));
        assert!(!g.has_edge(0, 1));
        assert_eq!(g.degree(2), 2);
        assert_eq!(g.edge_count(), 2);
        g.validate().unwrap();
    }

    #[test]
    fn builder_rejects_oversized_orders() {
        assert!(GraphBuilder::new(MAX_ORDER).is_ok());
        assert_eq!(
            GraphBuilder::new(MAX_ORDER + 1).err(),
            Some(GraphError::OrderTooLarge { order: MAX_ORDER + 1 })
        );
    }

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(3, &[(0, 1), (1, 2)]).is_ok());
        assert_eq!(
            Graph::from_edges(3, &[(0, 3)]).err(),
            Some(GraphError::VertexOutOfRange { v: 3, order: 3 })
        );
        assert_eq!(
            Graph::from_edges(3, &[(1, 1)]).err(),
            Some(GraphError::SelfLoop(1))
        );
    }

    #[test]
    fn edges_iterate_sorted() {
        let g = Graph::from_edges(4, &[(2, 3), (0, 2), (0, 1)]).unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (2, 3)]);
    }

    #[test]
    fn neighbors_cross_word_boundaries() {
        let mut b = GraphBuilder::new(130).unwrap();
        b.add_edge(0, 63);
        b.add_edge(0, 64);
        b.add_edge(0, 129);
        let g = b.build();
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![63, 64, 129]);
        assert_eq!(g.degree(0), 3);
    }

    #[test]
    fn fiber_partition_validates() {
        let p = FiberPartition::new(vec![vec![1, 0], vec![2, 3]]).unwrap();
        assert_eq!(p.fiber(0), &[0, 1]);
        assert_eq!(p.fiber_of(3), 1);
        assert_eq!(p.order(), 4);

        assert_eq!(
            FiberPartition::new(vec![vec![0, 1], vec![2]]).err(),
            Some(GraphError::UnevenFiber { index: 1, expected: 2, got: 1 })
        );
        assert_eq!(
            FiberPartition::new(vec![vec![0, 1], vec![1, 2]]).err(),
            Some(GraphError::OverlappingFibers { v: 1 })
        );
        assert!(FiberPartition::new(vec![]).is_err());
        // Out-of-range element: covers the right count but points past order.
        assert!(FiberPartition::new(vec![vec![0, 5], vec![1, 2]]).is_err());
    }
}
