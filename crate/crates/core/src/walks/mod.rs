//! Evolution operators for the coined, Szegedy, staggered and hypergraph walk
//! models, and the multi-step runner.
//!
//! Every model compiles to a [`WalkInstance`]: one basis, a cyclic list of
//! certified stage operators, and the vertex measurement. A *step* is
//! `stages_per_step` consecutive stage applications (two for hyperwalks, where
//! a step is `U^E U^V`, one otherwise). A *cycle* is one pass over all stages.

mod build;
pub mod presets;
pub mod spec;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use build::*;

use crate::error::{Error, Result};
use crate::state::{
    measure_vertices, same_basis, BasisLabel, BasisMap, CMatrix, MeasurementMap, StateVector, UnitaryOperator,
};
use crate::structures::{validate_tessellation, Graph, Hypergraph, Tessellation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    CoinedLine,
    /// Coined walk on an arbitrary graph (scattering form); generalized when
    /// it has more than one coin.
    #[serde(alias = "coined")]
    ScatteringCoined,
    Szegedy,
    Staggered,
    Hyperwalk,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::CoinedLine => "coined-line",
            Self::ScatteringCoined => "scattering-coined",
            Self::Szegedy => "szegedy",
            Self::Staggered => "staggered",
            Self::Hyperwalk => "hyperwalk",
        };
        f.write_str(s)
    }
}

/// Model-level description of a walk. All matrices are expressed on the full
/// basis that [`WalkInstance::from_parts`] derives for the model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParts {
    /// `S (C ⊗ I_N)` on a cycle of `positions` sites.
    CoinedLine { positions: usize, coin: CMatrix },
    /// Stage `i` is `S · coins[i]`, with `S|v,w> = |w,v>`.
    Coined { graph: Graph, coins: Vec<CMatrix> },
    /// Alternating reflections `U_1`, `U_2` on the bipartite double.
    Szegedy { graph: Graph, reflections: [CMatrix; 2] },
    /// Stage `k` is block diagonal over `tessellations[k]`.
    Staggered { graph: Graph, tessellations: Vec<Tessellation>, stages: Vec<CMatrix> },
    /// Step `k` applies `U^V_k` then `U^E_k`.
    Hyperwalk { hypergraph: Hypergraph, steps: Vec<(CMatrix, CMatrix)> },
}

impl ModelParts {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::CoinedLine { .. } => ModelKind::CoinedLine,
            Self::Coined { .. } => ModelKind::ScatteringCoined,
            Self::Szegedy { .. } => ModelKind::Szegedy,
            Self::Staggered { .. } => ModelKind::Staggered,
            Self::Hyperwalk { .. } => ModelKind::Hyperwalk,
        }
    }
}

/// Vertex count, basis size and operator count of one walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub model: ModelKind,
    /// Vertices of the underlying structure (both copies for Szegedy).
    pub vertices: usize,
    pub basis_size: usize,
    /// Length of the operator cycle (coins for coined walks, stages otherwise).
    pub operators: usize,
}

/// Compiled walk: basis, stage operators and measurement.
#[derive(Debug, Clone)]
pub struct WalkInstance {
    parts: ModelParts,
    basis: Arc<BasisMap>,
    stages: Vec<UnitaryOperator>,
    stages_per_step: usize,
    measurements: Vec<MeasurementMap>,
}

/// Arc basis of a coined walk, vertex-major.
pub fn arc_basis(graph: &Graph) -> Result<Arc<BasisMap>> {
    BasisMap::shared(graph.arcs().into_iter().map(|(from, to)| BasisLabel::Arc { from, to }).collect())
}

pub fn bipartite_basis(graph: &Graph) -> Result<Arc<BasisMap>> {
    BasisMap::shared(graph.arcs().into_iter().map(|(x, y)| BasisLabel::Bipartite { x, y }).collect())
}

pub fn vertex_basis(n: usize) -> Result<Arc<BasisMap>> {
    BasisMap::shared((0..n).map(|vertex| BasisLabel::Vertex { vertex }).collect())
}

pub fn incidence_basis(h: &Hypergraph) -> Result<Arc<BasisMap>> {
    BasisMap::shared(
        h.incidence_pairs()
            .into_iter()
            .map(|(vertex, edge)| BasisLabel::Incidence { vertex, edge })
            .collect(),
    )
}

pub fn line_basis(positions: usize) -> Result<Arc<BasisMap>> {
    BasisMap::shared(
        (0..2)
            .flat_map(|coin| (0..positions).map(move |position| BasisLabel::Line { coin, position }))
            .collect(),
    )
}

/// Indices of `|v,w>` for each vertex `v`, in neighbour order.
pub(crate) fn arc_blocks(graph: &Graph, basis: &BasisMap, first: bool) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); graph.vertex_count()];
    for (i, label) in basis.labels().iter().enumerate() {
        let (a, b) = match *label {
            BasisLabel::Arc { from, to } => (from, to),
            BasisLabel::Bipartite { x, y } => (x, y),
            _ => unreachable!("arc basis"),
        };
        blocks[if first { a } else { b }].push(i);
    }
    blocks
}

pub(crate) fn incidence_blocks(h: &Hypergraph, basis: &BasisMap) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut by_vertex = vec![Vec::new(); h.vertex_count()];
    let mut by_edge = vec![Vec::new(); h.edge_count()];
    for (i, label) in basis.labels().iter().enumerate() {
        if let BasisLabel::Incidence { vertex, edge } = *label {
            by_vertex[vertex].push(i);
            by_edge[edge].push(i);
        }
    }
    // vertex blocks are ordered by incident edge, which the edge-major basis already gives
    (by_vertex, by_edge)
}

/// Permutation `S|v,w> = |w,v>` on an arc basis.
pub(crate) fn swap_permutation(basis: &BasisMap) -> Vec<usize> {
    basis
        .labels()
        .iter()
        .map(|l| match *l {
            BasisLabel::Arc { from, to } => basis.index_of(&BasisLabel::Arc { from: to, to: from }),
            BasisLabel::Bipartite { x, y } => basis.index_of(&BasisLabel::Bipartite { x: y, y: x }),
            _ => None,
        })
        .map(|i| i.expect("arc basis is closed under reversal"))
        .collect()
}

/// `P · m` where `P` maps basis index `i` to `image[i]`.
pub(crate) fn permute_rows(image: &[usize], m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for (i, &j) in image.iter().enumerate() {
        out.set_row(j, &m.row(i));
    }
    out
}

/// `P · m · P^T` for a symmetric permutation (involution).
pub(crate) fn conjugate_by_involution(image: &[usize], m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(image[i], image[j])])
}

fn certify_blocks(matrix: CMatrix, basis: &Arc<BasisMap>, blocks: Vec<Vec<usize>>, what: &str) -> Result<UnitaryOperator> {
    let op = UnitaryOperator::certify(matrix, basis.clone()).map_err(|e| annotate(e, what))?;
    op.with_blocks(blocks).map_err(|e| annotate(e, what))
}

fn annotate(e: Error, what: &str) -> Error {
    match e {
        Error::BlockViolation { row, col } => {
            Error::Malformed(format!("{what} couples basis states {row} and {col} across blocks"))
        }
        other => other,
    }
}

fn first_index_vertex(label: &BasisLabel) -> Option<usize> {
    match *label {
        BasisLabel::Arc { from, .. } => Some(from),
        BasisLabel::Bipartite { x, .. } => Some(x),
        BasisLabel::Incidence { vertex, .. } | BasisLabel::Vertex { vertex } => Some(vertex),
        BasisLabel::Line { position, .. } => Some(position),
    }
}

fn second_index_vertex(label: &BasisLabel) -> Option<usize> {
    match *label {
        BasisLabel::Bipartite { y, .. } => Some(y),
        BasisLabel::Arc { to, .. } => Some(to),
        _ => None,
    }
}

impl WalkInstance {
    /// Derives basis, stages and measurement from model parts, certifying
    /// every operator and its block structure.
    pub fn from_parts(parts: ModelParts) -> Result<Self> {
        match &parts {
            ModelParts::CoinedLine { positions, coin } => {
                let n = *positions;
                if n < 2 {
                    return Err(Error::Malformed("line walk needs at least two positions".into()));
                }
                if coin.nrows() != 2 || coin.ncols() != 2 {
                    return Err(Error::DimensionMismatch { context: "line coin".into(), expected: 2, found: coin.nrows() });
                }
                let basis = line_basis(n)?;
                UnitaryOperator::certify(coin.clone(), BasisMap::shared(vec![
                    BasisLabel::Vertex { vertex: 0 },
                    BasisLabel::Vertex { vertex: 1 },
                ])?)?;
                // |0,n> -> |0,n-1>, |1,n> -> |1,n+1>
                let image: Vec<usize> = (0..2 * n)
                    .map(|i| {
                        let (c, p) = (i / n, i % n);
                        let q = if c == 0 { (p + n - 1) % n } else { (p + 1) % n };
                        c * n + q
                    })
                    .collect();
                let coin_full = coin.kronecker(&CMatrix::identity(n, n));
                let stage = UnitaryOperator::certify(permute_rows(&image, &coin_full), basis.clone())?;
                let measurement = MeasurementMap::from_labels(&basis, n, first_index_vertex)?;
                Ok(Self { basis, stages: vec![stage], stages_per_step: 1, measurements: vec![measurement], parts })
            }
            ModelParts::Coined { graph, coins } => {
                if coins.is_empty() {
                    return Err(Error::Malformed("coined walk needs at least one coin".into()));
                }
                let basis = arc_basis(graph)?;
                if basis.is_empty() {
                    return Err(Error::Malformed("coined walk needs at least one edge".into()));
                }
                let blocks = arc_blocks(graph, &basis, true);
                let swap = swap_permutation(&basis);
                let mut stages = Vec::with_capacity(coins.len());
                for (i, c) in coins.iter().enumerate() {
                    let coin = certify_blocks(c.clone(), &basis, blocks.clone(), &format!("coin {i}"))?;
                    stages.push(UnitaryOperator::certify(permute_rows(&swap, coin.matrix()), basis.clone())?);
                }
                let measurement = MeasurementMap::from_labels(&basis, graph.vertex_count(), first_index_vertex)?;
                Ok(Self { basis, stages, stages_per_step: 1, measurements: vec![measurement], parts })
            }
            ModelParts::Szegedy { graph, reflections } => {
                let basis = bipartite_basis(graph)?;
                if basis.is_empty() {
                    return Err(Error::Malformed("Szegedy walk needs at least one edge".into()));
                }
                let u1 = certify_blocks(reflections[0].clone(), &basis, arc_blocks(graph, &basis, true), "U_1")?;
                let u2 = certify_blocks(reflections[1].clone(), &basis, arc_blocks(graph, &basis, false), "U_2")?;
                let n = graph.vertex_count();
                // even step counts sit on V, odd ones on V'
                let measurements = vec![
                    MeasurementMap::from_labels(&basis, n, first_index_vertex)?,
                    MeasurementMap::from_labels(&basis, n, second_index_vertex)?,
                ];
                Ok(Self { basis, stages: vec![u1, u2], stages_per_step: 1, measurements, parts })
            }
            ModelParts::Staggered { graph, tessellations, stages } => {
                if stages.is_empty() {
                    return Err(Error::Malformed("staggered walk needs at least one tessellation".into()));
                }
                if tessellations.len() != stages.len() {
                    return Err(Error::DimensionMismatch {
                        context: "staggered tessellations vs stages".into(),
                        expected: stages.len(),
                        found: tessellations.len(),
                    });
                }
                let basis = vertex_basis(graph.vertex_count())?;
                let mut ops = Vec::with_capacity(stages.len());
                for (k, (t, m)) in tessellations.iter().zip(stages).enumerate() {
                    validate_tessellation(t, graph)?.into_result()?;
                    ops.push(certify_blocks(m.clone(), &basis, t.polygons().to_vec(), &format!("U_{}", k + 1))?);
                }
                let measurement = MeasurementMap::from_labels(&basis, graph.vertex_count(), first_index_vertex)?;
                Ok(Self { basis, stages: ops, stages_per_step: 1, measurements: vec![measurement], parts })
            }
            ModelParts::Hyperwalk { hypergraph, steps } => {
                if steps.is_empty() {
                    return Err(Error::Malformed("hyperwalk needs at least one step".into()));
                }
                let basis = incidence_basis(hypergraph)?;
                if basis.is_empty() {
                    return Err(Error::Malformed("hyperwalk needs at least one incidence".into()));
                }
                let (by_vertex, by_edge) = incidence_blocks(hypergraph, &basis);
                let mut ops = Vec::with_capacity(2 * steps.len());
                for (k, (uv, ue)) in steps.iter().enumerate() {
                    ops.push(certify_blocks(uv.clone(), &basis, by_vertex.clone(), &format!("U^V_{}", k + 1))?);
                    ops.push(certify_blocks(ue.clone(), &basis, by_edge.clone(), &format!("U^E_{}", k + 1))?);
                }
                let measurement = MeasurementMap::from_labels(&basis, hypergraph.vertex_count(), first_index_vertex)?;
                Ok(Self { basis, stages: ops, stages_per_step: 2, measurements: vec![measurement], parts })
            }
        }
    }

    pub fn model(&self) -> ModelKind {
        self.parts.kind()
    }

    pub fn parts(&self) -> &ModelParts {
        &self.parts
    }

    pub fn basis(&self) -> &Arc<BasisMap> {
        &self.basis
    }

    pub fn stages(&self) -> &[UnitaryOperator] {
        &self.stages
    }

    pub fn stages_per_step(&self) -> usize {
        self.stages_per_step
    }

    /// Steps in one full pass over the schedule.
    pub fn cycle_length(&self) -> usize {
        self.stages.len() / self.stages_per_step
    }

    /// Stages applied (in order) during step `step` (0-based).
    pub fn step_stages(&self, step: usize) -> &[UnitaryOperator] {
        let k = step % self.cycle_length();
        &self.stages[k * self.stages_per_step..(k + 1) * self.stages_per_step]
    }

    /// Measurement used after `step` steps.
    pub fn measurement_at(&self, step: usize) -> &MeasurementMap {
        &self.measurements[step % self.measurements.len()]
    }

    pub fn measurements(&self) -> &[MeasurementMap] {
        &self.measurements
    }

    /// Number of vertices the measurement reports on.
    pub fn measured_vertices(&self) -> usize {
        self.measurements[0].vertex_count()
    }

    pub fn size_report(&self) -> SizeReport {
        let (vertices, operators) = match &self.parts {
            ModelParts::CoinedLine { positions, .. } => (*positions, 1),
            ModelParts::Coined { graph, coins } => (graph.vertex_count(), coins.len()),
            ModelParts::Szegedy { graph, .. } => (2 * graph.vertex_count(), 2),
            ModelParts::Staggered { graph, stages, .. } => (graph.vertex_count(), stages.len()),
            ModelParts::Hyperwalk { hypergraph, steps } => (hypergraph.vertex_count(), 2 * steps.len()),
        };
        SizeReport { model: self.model(), vertices, basis_size: self.basis.len(), operators }
    }

    pub fn basis_state(&self, label: &BasisLabel) -> Result<StateVector> {
        StateVector::basis_state(self.basis.clone(), label)
    }

    /// Applies step `step` (0-based) to `state`.
    pub fn apply_step(&self, state: &StateVector, step: usize) -> Result<StateVector> {
        let mut s = state.clone();
        for op in self.step_stages(step) {
            s = op.apply(&s)?;
        }
        Ok(s)
    }

    pub fn distribution(&self, state: &StateVector, step: usize) -> Result<Vec<f64>> {
        measure_vertices(state, self.measurement_at(step))
    }
}

/// States `psi_0, ..., psi_n` of a run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<StateVector>,
    /// `cycle_boundaries[n]` is true when `n` steps complete whole cycles.
    pub cycle_boundaries: Vec<bool>,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Vertex distribution after every step.
    pub fn distributions(&self, walk: &WalkInstance) -> Result<Vec<Vec<f64>>> {
        self.states
            .iter()
            .enumerate()
            .map(|(n, s)| walk.distribution(s, n))
            .collect()
    }
}

/// Runs `steps` steps from `initial`, following the cyclic schedule.
pub fn run(walk: &WalkInstance, initial: &StateVector, steps: usize) -> Result<Trajectory> {
    if !same_basis(walk.basis(), initial.basis()) {
        return Err(Error::BasisMismatch("initial state is not on the walk's basis".into()));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    for n in 0..steps {
        let next = walk.apply_step(&states[n], n)?;
        states.push(next);
    }
    let cycle = walk.cycle_length();
    let cycle_boundaries = (0..=steps).map(|n| n % cycle == 0).collect();
    Ok(Trajectory { states, cycle_boundaries })
}
