//! Graphs, hypergraphs and tessellations.
//!
//! Vertices are dense indices `0..n`. Edges (and hyperedges) are identified by
//! their position in the edge list, which fixes every basis ordering derived
//! from them.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple graph without self-loops.
///
/// Undirected edges are stored as `(min, max)` and appear once. Walk
/// constructions use the symmetric adjacency, so a directed edge `(i, j)`
/// contributes both arcs `i -> j` and `j -> i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    directed: bool,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>, directed: bool) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        let mut neighbors = vec![Vec::new(); vertex_count];
        for (a, b) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(Error::IndexOutOfRange { index: v, bound: vertex_count });
                }
            }
            if a == b {
                return Err(Error::Malformed(format!("self-loop at vertex {a}")));
            }
            let key = if directed { (a, b) } else { (a.min(b), a.max(b)) };
            if !seen.insert(key) {
                continue;
            }
            stored.push(key);
            if !neighbors[a].contains(&b) {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self { vertex_count, edges: stored, directed, neighbors })
    }

    pub fn undirected(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(vertex_count, edges.iter().copied(), false)
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)), false)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)), false)
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))), false)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// `i ~ j` in the symmetric adjacency.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i < self.vertex_count && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Every ordered pair `(v, w)` with `v ~ w`, vertex-major then neighbour-ascending.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.vertex_count)
            .flat_map(|v| self.neighbors[v].iter().map(move |&w| (v, w)))
            .collect()
    }

    pub fn is_regular(&self) -> bool {
        self.neighbors.windows(2).all(|w| w[0].len() == w[1].len())
    }

    pub fn to_doc(&self) -> StructureDoc {
        StructureDoc {
            vertices: self.vertex_count,
            labels: None,
            edges: self.edges.iter().map(|&(a, b)| vec![a, b]).collect(),
            directed: self.directed,
        }
    }

    pub fn from_doc(doc: &StructureDoc) -> Result<Self> {
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            match e.as_slice() {
                [a, b] => edges.push((*a, *b)),
                _ => return Err(Error::Malformed(format!("graph edge must have two endpoints, got {e:?}"))),
            }
        }
        Self::new(doc.vertices, edges, doc.directed)
    }
}

/// Hypergraph whose edges are vertex subsets, or ordered vertex sequences
/// when `directed` is set.
///
/// Undirected edges are stored with ascending vertices. Edge `e` is labelled by
/// its index; equal vertex sets under different labels are distinct edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    edges: Vec<Vec<usize>>,
    directed: bool,
    labels: Option<Vec<String>>,
    incident: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(vertex_count: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::build(vertex_count, edges, false, None)
    }

    /// Hypergraph with ordered (cyclically traversed) edges.
    pub fn directed(vertex_count: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::build(vertex_count, edges, true, None)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(Error::DimensionMismatch {
                context: "vertex labels".into(),
                expected: self.vertex_count,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    fn build(vertex_count: usize, mut edges: Vec<Vec<usize>>, directed: bool, labels: Option<Vec<String>>) -> Result<Self> {
        let mut incident = vec![Vec::new(); vertex_count];
        for (e, edge) in edges.iter_mut().enumerate() {
            if edge.is_empty() {
                return Err(Error::Malformed(format!("hyperedge {e} is empty")));
            }
            if let Some(&v) = edge.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::IndexOutOfRange { index: v, bound: vertex_count });
            }
            let mut sorted = edge.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("hyperedge {e} repeats a vertex")));
            }
            if !directed {
                *edge = sorted.clone();
            }
            for v in sorted {
                incident[v].push(e);
            }
        }
        Ok(Self { vertex_count, edges, directed, labels, incident })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Vertices of edge `e` in stored order (ascending unless directed).
    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    /// Vertices of edge `e` in ascending order.
    pub fn edge_members(&self, e: usize) -> Vec<usize> {
        let mut m = self.edges[e].clone();
        if self.directed {
            m.sort_unstable();
        }
        m
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Number of hyperedges containing `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    /// Edges containing `v`, ascending.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn is_k_regular(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    /// All `(vertex, edge)` pairs with `vertex ∈ edge`, edge-major then
    /// vertex-ascending.
    pub fn incidence_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.edges.len())
            .flat_map(|e| self.edge_members(e).into_iter().map(move |v| (v, e)))
            .collect()
    }

    /// Reinterpret a 2-regular undirected hypergraph as a graph.
    pub fn to_graph(&self) -> Result<Graph> {
        if self.directed || !self.is_k_regular(2) {
            return Err(Error::Malformed("only undirected 2-regular hypergraphs are graphs".into()));
        }
        let g = Graph::new(self.vertex_count, self.edges.iter().map(|e| (e[0], e[1])), false)?;
        if g.edges().len() != self.edges.len() {
            return Err(Error::Malformed("hypergraph repeats an edge; graph would lose it".into()));
        }
        Ok(g)
    }

    pub fn from_graph(g: &Graph) -> Self {
        Self::build(g.vertex_count(), g.edges().iter().map(|&(a, b)| vec![a, b]).collect(), g.is_directed(), None)
            .expect("graph edges are valid hyperedges")
    }

    pub fn to_doc(&self) -> StructureDoc {
        StructureDoc {
            vertices: self.vertex_count,
            labels: self.labels.clone(),
            edges: self.edges.clone(),
            directed: self.directed,
        }
    }

    pub fn from_doc(doc: &StructureDoc) -> Result<Self> {
        let h = Self::build(doc.vertices, doc.edges.clone(), doc.directed, None)?;
        match &doc.labels {
            Some(l) => h.with_labels(l.clone()),
            None => Ok(h),
        }
    }
}

/// Partition of `0..covered_set_size` into polygons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tessellation {
    polygons: Vec<Vec<usize>>,
    covered_set_size: usize,
}

impl Tessellation {
    /// Wraps polygons without checking them; see [`validate_tessellation`].
    pub fn from_polygons(polygons: Vec<Vec<usize>>, covered_set_size: usize) -> Self {
        let polygons = polygons
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        Self { polygons, covered_set_size }
    }

    /// Builds a tessellation, rejecting anything that is not a partition.
    pub fn new(polygons: Vec<Vec<usize>>, covered_set_size: usize) -> Result<Self> {
        let t = Self::from_polygons(polygons, covered_set_size);
        partition_violations(&t).into_result()?;
        Ok(t)
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_polygons((0..n).map(|v| vec![v]).collect(), n)
    }

    pub fn polygons(&self) -> &[Vec<usize>] {
        &self.polygons
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn covered_set_size(&self) -> usize {
        self.covered_set_size
    }

    /// Polygon index of every element; only meaningful for a valid partition.
    pub fn membership(&self) -> Vec<usize> {
        let mut m = vec![usize::MAX; self.covered_set_size];
        for (k, p) in self.polygons.iter().enumerate() {
            for &v in p {
                if v < m.len() {
                    m[v] = k;
                }
            }
        }
        m
    }

    pub fn to_doc(&self) -> TessellationDoc {
        TessellationDoc { polygons: self.polygons.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TessellationViolation {
    EmptyPolygon { polygon: usize },
    OutOfRange { polygon: usize, vertex: usize },
    Overlap { polygon: usize, vertex: usize },
    Uncovered { vertex: usize },
    NotClique { polygon: usize, missing: (usize, usize) },
}

impl fmt::Display for TessellationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyPolygon { polygon } => write!(f, "polygon {polygon} is empty"),
            Self::OutOfRange { polygon, vertex } => write!(f, "polygon {polygon} references vertex {vertex} out of range"),
            Self::Overlap { polygon, vertex } => write!(f, "polygon {polygon} repeats vertex {vertex}"),
            Self::Uncovered { vertex } => write!(f, "vertex {vertex} is not covered"),
            Self::NotClique { polygon, missing } => {
                write!(f, "polygon {polygon} is not a clique ({} and {} not adjacent)", missing.0, missing.1)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TessellationReport {
    pub violations: Vec<TessellationViolation>,
}

impl TessellationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Polygons named by at least one violation, ascending.
    pub fn violating_polygons(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .violations
            .iter()
            .filter_map(|v| match v {
                TessellationViolation::EmptyPolygon { polygon }
                | TessellationViolation::OutOfRange { polygon, .. }
                | TessellationViolation::Overlap { polygon, .. }
                | TessellationViolation::NotClique { polygon, .. } => Some(*polygon),
                TessellationViolation::Uncovered { .. } => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Maps the most severe violation to an error: out-of-range indices are
    /// malformed input, overlaps and gaps break the partition, and non-clique
    /// polygons make the tessellation invalid for the graph.
    pub fn into_result(self) -> Result<()> {
        use TessellationViolation::*;
        if let Some(OutOfRange { vertex, .. }) = self.violations.iter().find(|v| matches!(v, OutOfRange { .. })) {
            return Err(Error::IndexOutOfRange { index: *vertex, bound: usize::MAX });
        }
        if let Some(v) = self
            .violations
            .iter()
            .find(|v| matches!(v, EmptyPolygon { .. } | Overlap { .. } | Uncovered { .. }))
        {
            return Err(Error::NotAPartition(v.to_string()));
        }
        if let Some(v) = self.violations.first() {
            return Err(Error::InvalidTessellation(v.to_string()));
        }
        Ok(())
    }
}

fn partition_violations(t: &Tessellation) -> TessellationReport {
    let n = t.covered_set_size;
    let mut covered = vec![false; n];
    let mut report = TessellationReport::default();
    for (k, p) in t.polygons.iter().enumerate() {
        if p.is_empty() {
            report.violations.push(TessellationViolation::EmptyPolygon { polygon: k });
        }
        for &v in p {
            if v >= n {
                report.violations.push(TessellationViolation::OutOfRange { polygon: k, vertex: v });
            } else if covered[v] {
                report.violations.push(TessellationViolation::Overlap { polygon: k, vertex: v });
            } else {
                covered[v] = true;
            }
        }
    }
    for (v, c) in covered.iter().enumerate() {
        if !c {
            report.violations.push(TessellationViolation::Uncovered { vertex: v });
        }
    }
    report
}

/// Checks that `t` partitions the vertices of `g` into cliques and singletons.
pub fn validate_tessellation(t: &Tessellation, g: &Graph) -> Result<TessellationReport> {
    if t.covered_set_size != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            context: "tessellation vs graph vertex count".into(),
            expected: g.vertex_count(),
            found: t.covered_set_size,
        });
    }
    let mut report = partition_violations(t);
    for (k, p) in t.polygons.iter().enumerate() {
        if p.iter().any(|&v| v >= g.vertex_count()) {
            continue;
        }
        if let Some(missing) = first_missing_pair(g, p) {
            report.violations.push(TessellationViolation::NotClique { polygon: k, missing });
        }
    }
    Ok(report)
}

fn first_missing_pair(g: &Graph, subset: &[usize]) -> Option<(usize, usize)> {
    for (i, &a) in subset.iter().enumerate() {
        for &b in &subset[i + 1..] {
            if a != b && !g.adjacent(a, b) {
                return Some((a, b));
            }
        }
    }
    None
}

/// True iff every pair of distinct vertices in `subset` is adjacent.
pub fn clique_check(g: &Graph, subset: &[usize]) -> Result<bool> {
    if let Some(&v) = subset.iter().find(|&&v| v >= g.vertex_count()) {
        return Err(Error::IndexOutOfRange { index: v, bound: g.vertex_count() });
    }
    Ok(first_missing_pair(g, subset).is_none())
}

/// JSON form shared by graphs and hypergraphs:
/// `{"vertices": N, "labels": [...], "edges": [[0,1,2],[0,1]], "directed": false}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub edges: Vec<Vec<usize>>,
    #[serde(default)]
    pub directed: bool,
}

/// `{"polygons": [[0,1],[2]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TessellationDoc {
    pub polygons: Vec<Vec<usize>>,
}
