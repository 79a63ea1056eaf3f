//! Seeded random structures, unitaries, states and walks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{BasisMap, CMatrix, CVector, StateVector, C64};
use crate::structures::{Graph, Hypergraph, Tessellation};
use crate::walks::presets::reflection;
use crate::walks::{
    build_generalized_coined, build_generalized_hyperwalk, build_szegedy, build_szegedy_with_reflections,
    coin_from_blocks, ModelKind, ModelParts, SzegedyAmplitudes, WalkInstance,
};
use std::sync::Arc;

/// Upper limits for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Longest coin / stage / step schedule.
    pub max_schedule: usize,
}

impl Default for SizeBounds {
    fn default() -> Self {
        Self { max_vertices: 6, max_edges: 6, max_schedule: 3 }
    }
}

impl SizeBounds {
    pub fn new(max_vertices: usize, max_edges: usize, max_schedule: usize) -> Self {
        Self { max_vertices, max_edges, max_schedule }
    }

    /// Fails when no instance of `model` fits.
    pub fn check(&self, model: ModelKind) -> Result<()> {
        let min_vertices = match model {
            ModelKind::Hyperwalk | ModelKind::Staggered => 1,
            _ => 2,
        };
        let need_edges = !matches!(model, ModelKind::CoinedLine | ModelKind::Staggered);
        if self.max_vertices < min_vertices {
            return Err(Error::UnsatisfiableBounds(format!("{model} needs at least {min_vertices} vertices")));
        }
        if need_edges && self.max_edges == 0 {
            return Err(Error::UnsatisfiableBounds(format!("{model} needs at least one edge")));
        }
        if self.max_schedule == 0 {
            return Err(Error::UnsatisfiableBounds("schedule length must be at least one".into()));
        }
        Ok(())
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed `d x d` unitary: QR of a complex Gaussian matrix with
/// the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    if d == 0 {
        return CMatrix::zeros(0, 0);
    }
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / C64::new(n, 0.0);
        }
    }
}

pub fn random_state<R: Rng + ?Sized>(basis: Arc<BasisMap>, rng: &mut R) -> StateVector {
    let v = random_unit_vector(basis.len(), rng);
    StateVector::new(basis, v).expect("dimension matches")
}

/// Simple undirected graph with `2..=max_vertices` vertices and
/// `1..=max_edges` distinct edges.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Result<Graph> {
    if max_vertices < 2 || max_edges == 0 {
        return Err(Error::UnsatisfiableBounds("a graph needs two vertices and one edge".into()));
    }
    let n = rng.random_range(2..=max_vertices);
    let mut all: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    all.shuffle(rng);
    let m = rng.random_range(1..=max_edges.min(all.len()));
    all.truncate(m);
    Graph::new(n, all, false)
}

/// Graph in which every vertex has degree at least one.
pub fn random_covered_graph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Result<Graph> {
    loop {
        let g = random_graph(rng, max_vertices, max_edges)?;
        if (0..g.vertex_count()).all(|v| g.degree(v) > 0) {
            return Ok(g);
        }
    }
}

/// Hypergraph with `1..=max_vertices` vertices and `1..=max_edges` nonempty
/// edges of random size.
pub fn random_hypergraph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Result<Hypergraph> {
    if max_vertices == 0 || max_edges == 0 {
        return Err(Error::UnsatisfiableBounds("a hypergraph needs a vertex and an edge".into()));
    }
    let n = rng.random_range(1..=max_vertices);
    let m = rng.random_range(1..=max_edges);
    let mut vertices: Vec<usize> = (0..n).collect();
    let edges = (0..m)
        .map(|_| {
            vertices.shuffle(rng);
            let size = rng.random_range(1..=n);
            vertices[..size].to_vec()
        })
        .collect();
    Hypergraph::new(n, edges)
}

/// Hypergraph whose edges all have exactly two members (a graph).
pub fn random_two_regular_hypergraph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_edges: usize) -> Result<Hypergraph> {
    Ok(Hypergraph::from_graph(&random_graph(rng, max_vertices, max_edges)?))
}

/// Partition of `graph`'s vertices into cliques, grown greedily from a
/// random order; a vertex stays a singleton with probability 1/4.
pub fn random_tessellation<R: Rng + ?Sized>(graph: &Graph, rng: &mut R) -> Tessellation {
    let n = graph.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut covered = vec![false; n];
    let mut polygons = Vec::new();
    for &v in &order {
        if covered[v] {
            continue;
        }
        covered[v] = true;
        let mut polygon = vec![v];
        if !rng.random_bool(0.25) {
            let mut candidates: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&w| !covered[w]).collect();
            candidates.shuffle(rng);
            for w in candidates {
                if polygon.iter().all(|&p| graph.adjacent(p, w)) {
                    covered[w] = true;
                    polygon.push(w);
                }
            }
        }
        polygons.push(polygon);
    }
    Tessellation::from_polygons(polygons, n)
}

/// Random partition of `0..n` into groups of at most `max_group` vertices.
fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize, max_group: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut groups = Vec::new();
    let mut rest = &order[..];
    while !rest.is_empty() {
        let size = rng.random_range(1..=max_group.min(rest.len()));
        groups.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    groups
}

fn random_blocks<R: Rng + ?Sized>(sizes: impl IntoIterator<Item = usize>, rng: &mut R) -> Vec<CMatrix> {
    sizes.into_iter().map(|d| random_unitary(d, rng)).collect()
}

/// Either a random unitary or a reflection about a random unit vector.
fn random_local<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    if d > 0 && rng.random_bool(0.3) {
        reflection(&random_unit_vector(d, rng)).expect("unit vector")
    } else {
        random_unitary(d, rng)
    }
}

pub fn random_line_walk<R: Rng + ?Sized>(rng: &mut R, bounds: &SizeBounds) -> Result<WalkInstance> {
    bounds.check(ModelKind::CoinedLine)?;
    let positions = rng.random_range(2..=bounds.max_vertices);
    WalkInstance::from_parts(ModelParts::CoinedLine { positions, coin: random_unitary(2, rng) })
}

/// Coined walk with `1..=max_schedule` random coins.
pub fn random_coined_walk<R: Rng + ?Sized>(rng: &mut R, bounds: &SizeBounds) -> Result<WalkInstance> {
    let k = rng.random_range(1..=bounds.max_schedule.max(1));
    random_coined_walk_with(rng, bounds, k)
}

pub fn random_coined_walk_with<R: Rng + ?Sized>(rng: &mut R, bounds: &SizeBounds, coins: usize) -> Result<WalkInstance> {
    bounds.check(ModelKind::ScatteringCoined)?;
    let g = random_graph(rng, bounds.max_vertices, bounds.max_edges)?;
    let schedule: Vec<Vec<CMatrix>> = (0..coins)
        .map(|_| (0..g.vertex_count()).map(|v| random_local(g.degree(v), rng)).collect())
        .collect();
    build_generalized_coined(&g, &schedule)
}

/// Szegedy walk: half the time from random arc amplitudes, otherwise with
/// independent random unitaries in place of both reflections.
pub fn random_szegedy_walk<R: Rng + ?Sized>(rng: &mut R, bounds: &SizeBounds) -> Result<WalkInstance> {
    bounds.check(ModelKind::Szegedy)?;
    let g = random_graph(rng, bounds.max_vertices, bounds.max_edges)?;
    if rng.random_bool(0.5) {
        let mut amps = SzegedyAmplitudes::new();
        for v in (0..g.vertex_count()).filter(|&v| g.degree(v) > 0) {
            let d = random_unit_vector(g.degree(v), rng);
            for (i, &w) in g.neighbors(v).iter().enumerate() {
                amps.insert((v, w), d[i]);
            }
        }
        build_szegedy(&g, &amps)
    } else {
        let sizes: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
        let u1 = coin_from_blocks(&g, &random_blocks(sizes.iter().copied(), rng))?;
        // second-index blocks: conjugate a first-index coin by the swap
        let c = coin_from_blocks(&g, &random_blocks(sizes.iter().copied(), rng))?;
        let basis = crate::walks::bipartite_basis(&g)?;
        let swap = crate::walks::swap_permutation(&basis);
        let u2 = crate::walks::conjugate_by_involution(&swap, &c);
        build_szegedy_with_reflections(&g, u1, u2)
    }
}

/// Staggered walk on a union of random clique partitions. The graph is built
/// from the tessellations, so every edge is covered. `max_edges` caps the
/// total edge count by shrinking groups.
pub fn random_staggered_walk<R: Rng + ?Sized>(rng: &mut R, bounds: &SizeBounds) -> Result<WalkInstance> {
    bounds.check(ModelKind::Staggered)?;
    let n = rng.random_range(1..=bounds.max_vertices);
    let k = rng.random_range(1..=bounds.max_schedule);
    let mut edges = std::collections::BTreeSet::new();
    let mut tessellations = Vec::with_capacity(k);
    for _ in 0..k {
        let mut polygons = Vec::new();
        for group in random_partition(rng, n, 4) {
            let new: Vec<(usize, usize)> = group
                .iter()
                .enumerate()
                .flat_map(|(a, &x)| group[a + 1..].iter().map(move |&y| (x.min(y), x.max(y))))
                .filter(|e| !edges.contains(e))
                .collect();
            if edges.len() + new.len() <= bounds.max_edges {
                edges.extend(new);
                polygons.push(group);
            } else {
                polygons.extend(group.into_iter().map(|v| vec![v]));
            }
        }
        tessellations.push(Tessellation::new(polygons, n)?);
    }
    let graph = Graph::new(n, edges, false)?;
    let stages = tessellations
        .iter()
        .map(|t| {
            let blocks: Vec<CMatrix> = t.polygons().iter().map(|p| random_local(p.len(), rng)).collect();
            crate::walks::presets::embed_blocks(n, t.polygons().iter().map(Vec::as_slice).zip(&blocks))
        })
        .collect();
    WalkInstance::from_parts(ModelParts::Staggered { graph, tessellations, stages })
}

/// Generalized hyperwalk with `1..=max_schedule` steps of random coins and shifts.
pub fn random_hyperwalk<R: Rng + ?Sized>(rng: &mut R, bounds: &SizeBounds) -> Result<WalkInstance> {
    bounds.check(ModelKind::Hyperwalk)?;
    let h = random_hypergraph(rng, bounds.max_vertices, bounds.max_edges)?;
    let k = rng.random_range(1..=bounds.max_schedule);
    let schedule: Vec<crate::walks::HyperwalkStep> = (0..k)
        .map(|_| crate::walks::HyperwalkStep {
            coins: (0..h.vertex_count()).map(|v| random_local(h.degree(v), rng)).collect(),
            shifts: (0..h.edge_count()).map(|e| random_local(h.edge(e).len(), rng)).collect(),
        })
        .collect();
    build_generalized_hyperwalk(&h, &schedule)
}

pub fn random_walk<R: Rng + ?Sized>(model: ModelKind, rng: &mut R, bounds: &SizeBounds) -> Result<WalkInstance> {
    match model {
        ModelKind::CoinedLine => random_line_walk(rng, bounds),
        ModelKind::ScatteringCoined => random_coined_walk(rng, bounds),
        ModelKind::Szegedy => random_szegedy_walk(rng, bounds),
        ModelKind::Staggered => random_staggered_walk(rng, bounds),
        ModelKind::Hyperwalk => random_hyperwalk(rng, bounds),
    }
}
