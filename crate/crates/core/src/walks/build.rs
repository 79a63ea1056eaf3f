use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::state::{unitarity_deviation, unitarity_tolerance, BasisLabel, CMatrix, CVector, C64};
use crate::structures::{Graph, Hypergraph, Tessellation};

use super::presets::{cyclic_shift, embed_blocks, grover, reflection, scattering_block};
use super::{arc_basis, arc_blocks, bipartite_basis, incidence_basis, incidence_blocks, ModelParts, WalkInstance};

fn check_local(m: &CMatrix, dim: usize, what: &str) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { context: what.to_string(), expected: dim, found: m.nrows() });
    }
    let max_deviation = unitarity_deviation(m);
    if !(max_deviation <= unitarity_tolerance()) {
        return Err(Error::NotUnitary { max_deviation });
    }
    Ok(())
}

/// Coined walk on a cycle of `positions` sites with a 2x2 coin.
pub fn build_coined_line(coin: CMatrix, positions: usize) -> Result<WalkInstance> {
    WalkInstance::from_parts(ModelParts::CoinedLine { positions, coin })
}

/// Full coin on the arc basis from per-vertex blocks (block `v` is indexed by
/// the neighbours of `v` in ascending order).
pub fn coin_from_blocks(graph: &Graph, blocks: &[CMatrix]) -> Result<CMatrix> {
    if blocks.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            context: "one coin per vertex".into(),
            expected: graph.vertex_count(),
            found: blocks.len(),
        });
    }
    let basis = arc_basis(graph)?;
    let idx = arc_blocks(graph, &basis, true);
    for (v, b) in blocks.iter().enumerate() {
        check_local(b, graph.degree(v), &format!("coin at vertex {v}"))?;
    }
    Ok(embed_blocks(basis.len(), idx.iter().map(Vec::as_slice).zip(blocks)))
}

/// Scattering walk `U = S C` with one coin per vertex.
pub fn build_scattering(graph: &Graph, coins: &[CMatrix]) -> Result<WalkInstance> {
    build_generalized_coined(graph, std::slice::from_ref(&coins.to_vec()))
}

/// Coined walk whose coin changes cyclically: step `i` applies `S C_{i mod k}`.
pub fn build_generalized_coined(graph: &Graph, schedule: &[Vec<CMatrix>]) -> Result<WalkInstance> {
    let coins = schedule.iter().map(|blocks| coin_from_blocks(graph, blocks)).collect::<Result<Vec<_>>>()?;
    WalkInstance::from_parts(ModelParts::Coined { graph: graph.clone(), coins })
}

/// Scattering walk from per-vertex reflection/transmission amplitudes `(r, t)`.
/// Each induced block must be unitary, which is stronger than
/// `|r|^2 + (deg - 1)|t|^2 = 1` once the degree exceeds two.
pub fn build_scattering_rt(graph: &Graph, coefficients: &[(C64, C64)]) -> Result<WalkInstance> {
    if coefficients.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            context: "scattering coefficients".into(),
            expected: graph.vertex_count(),
            found: coefficients.len(),
        });
    }
    let blocks: Vec<CMatrix> = coefficients
        .iter()
        .enumerate()
        .map(|(v, &(r, t))| scattering_block(r, t, graph.degree(v)))
        .collect();
    build_scattering(graph, &blocks)
}

/// Szegedy amplitudes `a_{v,w}` keyed by arc.
pub type SzegedyAmplitudes = BTreeMap<(usize, usize), C64>;

pub fn uniform_szegedy_amplitudes(graph: &Graph) -> SzegedyAmplitudes {
    graph
        .arcs()
        .into_iter()
        .map(|(v, w)| ((v, w), C64::new(1.0 / (graph.degree(v) as f64).sqrt(), 0.0)))
        .collect()
}

/// Szegedy walk with `U_1 = 2 sum |d_v><d_v| - I` and
/// `U_2 = 2 sum |d̄_v><d̄_v| - I`.
pub fn build_szegedy(graph: &Graph, amplitudes: &SzegedyAmplitudes) -> Result<WalkInstance> {
    for &(v, w) in amplitudes.keys() {
        if !graph.adjacent(v, w) {
            return Err(Error::NotAdjacent(v, w));
        }
    }
    let basis = bipartite_basis(graph)?;
    let mut blocks = Vec::new();
    for v in 0..graph.vertex_count() {
        if graph.degree(v) == 0 {
            continue;
        }
        let d = CVector::from_iterator(
            graph.degree(v),
            graph.neighbors(v).iter().map(|&w| amplitudes.get(&(v, w)).copied().unwrap_or_default()),
        );
        blocks.push(reflection(&d)?);
    }
    let first = arc_blocks(graph, &basis, true);
    let second = arc_blocks(graph, &basis, false);
    let nonempty = |b: &Vec<Vec<usize>>| b.iter().filter(|x| !x.is_empty()).cloned().collect::<Vec<_>>();
    let (first, second) = (nonempty(&first), nonempty(&second));
    let u1 = embed_blocks(basis.len(), first.iter().map(Vec::as_slice).zip(&blocks));
    // |d̄_v> = sum_w a_{v,w} |w,v'>: the second-index block of v, in neighbour order.
    let u2 = embed_blocks(basis.len(), second.iter().map(Vec::as_slice).zip(&blocks));
    WalkInstance::from_parts(ModelParts::Szegedy { graph: graph.clone(), reflections: [u1, u2] })
}

/// Szegedy walk with arbitrary reflections that respect the graph:
/// `U_1` acts within each `{|v,w'>}_w`, `U_2` within each `{|w,v'>}_w`.
pub fn build_szegedy_with_reflections(graph: &Graph, u1: CMatrix, u2: CMatrix) -> Result<WalkInstance> {
    WalkInstance::from_parts(ModelParts::Szegedy { graph: graph.clone(), reflections: [u1, u2] })
}

/// Local operator of one staggered stage.
#[derive(Debug, Clone, PartialEq)]
pub enum PolygonOperator {
    /// `2 sum_i |d_i><d_i| - I` with `|d_i> = sum_{j in p_i} a_j |j>`; one
    /// amplitude per vertex.
    Reflection(Vec<C64>),
    /// Arbitrary unitary per polygon, indexed by the polygon's sorted vertices.
    Blocks(Vec<CMatrix>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredStage {
    pub tessellation: Tessellation,
    pub operator: PolygonOperator,
}

impl StaggeredStage {
    pub fn uniform(tessellation: Tessellation) -> Self {
        let mut a = vec![C64::default(); tessellation.covered_set_size()];
        for p in tessellation.polygons() {
            for &v in p {
                if v < a.len() {
                    a[v] = C64::new(1.0 / (p.len() as f64).sqrt(), 0.0);
                }
            }
        }
        Self { tessellation, operator: PolygonOperator::Reflection(a) }
    }
}

/// Full matrix of a staggered stage on the vertex basis.
pub fn staggered_stage_matrix(stage: &StaggeredStage, n: usize) -> Result<CMatrix> {
    let polygons = stage.tessellation.polygons();
    let blocks: Vec<CMatrix> = match &stage.operator {
        PolygonOperator::Reflection(a) => {
            if a.len() != n {
                return Err(Error::DimensionMismatch { context: "staggered amplitudes".into(), expected: n, found: a.len() });
            }
            polygons
                .iter()
                .map(|p| {
                    let d = CVector::from_iterator(p.len(), p.iter().map(|&j| a.get(j).copied().unwrap_or_default()));
                    reflection(&d)
                })
                .collect::<Result<_>>()?
        }
        PolygonOperator::Blocks(b) => {
            if b.len() != polygons.len() {
                return Err(Error::DimensionMismatch {
                    context: "one block per polygon".into(),
                    expected: polygons.len(),
                    found: b.len(),
                });
            }
            for (i, (m, p)) in b.iter().zip(polygons).enumerate() {
                check_local(m, p.len(), &format!("polygon {i} block"))?;
            }
            b.clone()
        }
    };
    if let Some(&v) = polygons.iter().flatten().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange { index: v, bound: n });
    }
    Ok(embed_blocks(n, polygons.iter().map(Vec::as_slice).zip(&blocks)))
}

/// Staggered walk `U = U_n ... U_1`, one stage per tessellation.
pub fn build_staggered(graph: &Graph, stages: &[StaggeredStage]) -> Result<WalkInstance> {
    let n = graph.vertex_count();
    for s in stages {
        crate::structures::validate_tessellation(&s.tessellation, graph)?.into_result()?;
    }
    let matrices = stages.iter().map(|s| staggered_stage_matrix(s, n)).collect::<Result<Vec<_>>>()?;
    WalkInstance::from_parts(ModelParts::Staggered {
        graph: graph.clone(),
        tessellations: stages.iter().map(|s| s.tessellation.clone()).collect(),
        stages: matrices,
    })
}

/// Per-vertex coins and per-edge shifts of one hyperwalk step.
///
/// `coins[v]` acts on `{|v,e>}` ordered by ascending edge, `shifts[e]` on
/// `{|v,e>}` ordered by ascending vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperwalkStep {
    pub coins: Vec<CMatrix>,
    pub shifts: Vec<CMatrix>,
}

impl HyperwalkStep {
    /// `C_v = I - 2|psi_v><psi_v|`, `S_e = I - 2|psi_e><psi_e|` with uniform `psi`.
    pub fn grover(h: &Hypergraph) -> Self {
        Self {
            coins: (0..h.vertex_count()).map(|v| grover(h.degree(v))).collect(),
            shifts: h.edges().iter().map(|e| grover(e.len())).collect(),
        }
    }
}

pub fn hyperwalk_step_matrices(h: &Hypergraph, step: &HyperwalkStep) -> Result<(CMatrix, CMatrix)> {
    if step.coins.len() != h.vertex_count() {
        return Err(Error::DimensionMismatch { context: "one coin per vertex".into(), expected: h.vertex_count(), found: step.coins.len() });
    }
    if step.shifts.len() != h.edge_count() {
        return Err(Error::DimensionMismatch { context: "one shift per edge".into(), expected: h.edge_count(), found: step.shifts.len() });
    }
    for (v, c) in step.coins.iter().enumerate() {
        check_local(c, h.degree(v), &format!("coin at vertex {v}"))?;
    }
    for (e, s) in step.shifts.iter().enumerate() {
        check_local(s, h.edge(e).len(), &format!("shift on edge {e}"))?;
    }
    let basis = incidence_basis(h)?;
    let (by_vertex, by_edge) = incidence_blocks(h, &basis);
    let uv = embed_blocks(basis.len(), by_vertex.iter().map(Vec::as_slice).zip(&step.coins));
    let ue = embed_blocks(basis.len(), by_edge.iter().map(Vec::as_slice).zip(&step.shifts));
    Ok((uv, ue))
}

/// Hyperwalk `U^E U^V`.
pub fn build_hyperwalk(h: &Hypergraph, coins: Vec<CMatrix>, shifts: Vec<CMatrix>) -> Result<WalkInstance> {
    build_generalized_hyperwalk(h, &[HyperwalkStep { coins, shifts }])
}

/// Hyperwalk whose step `k` uses `schedule[k mod K]`.
pub fn build_generalized_hyperwalk(h: &Hypergraph, schedule: &[HyperwalkStep]) -> Result<WalkInstance> {
    let steps = schedule.iter().map(|s| hyperwalk_step_matrices(h, s)).collect::<Result<Vec<_>>>()?;
    WalkInstance::from_parts(ModelParts::Hyperwalk { hypergraph: h.clone(), steps })
}

pub fn build_grover_hyperwalk(h: &Hypergraph) -> Result<WalkInstance> {
    build_generalized_hyperwalk(h, &[HyperwalkStep::grover(h)])
}

/// Per-edge shifts `sum_i |v_{i+1},e><v_i,e|` for ordered edges, expressed on
/// each edge's ascending-vertex block.
pub fn build_directed_shift(h: &Hypergraph) -> Result<Vec<CMatrix>> {
    (0..h.edge_count())
        .map(|e| {
            let order = h.edge(e);
            let members = h.edge_members(e);
            if members.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("ordered edge {e} repeats a vertex")));
            }
            let pos = |v: usize| members.binary_search(&v).expect("member");
            let l = order.len();
            let cycle = cyclic_shift(l);
            // conjugate the cycle on sequence positions into ascending-member positions
            let mut m = CMatrix::zeros(l, l);
            for i in 0..l {
                for j in 0..l {
                    m[(pos(order[i]), pos(order[j]))] = cycle[(i, j)];
                }
            }
            Ok(m)
        })
        .collect()
}

/// Uniform superposition of all basis states of `walk`.
pub fn uniform_state(walk: &WalkInstance) -> crate::state::StateVector {
    let n = walk.basis().len();
    crate::state::StateVector::new(walk.basis().clone(), CVector::from_element(n, C64::new(1.0 / (n as f64).sqrt(), 0.0)))
        .expect("dimension matches")
}

/// Label helper for staggered walks.
pub fn vertex_label(vertex: usize) -> BasisLabel {
    BasisLabel::Vertex { vertex }
}
