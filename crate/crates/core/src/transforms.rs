//! Conversions between walk models.
//!
//! Each conversion produces a fully materialized target walk together with
//! the three maps needed to compare it against the source: where source
//! basis states go, how target basis states are read out as source vertices,
//! and how many target steps correspond to `n` source steps.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{BasisLabel, BasisMap, CMatrix, MeasurementMap, StateVector, C64};
use crate::structures::{Graph, Hypergraph, Tessellation};
use crate::walks::spec::{CompiledWalkDoc, WalkSpec};
use crate::walks::{
    arc_basis, conjugate_by_involution, swap_permutation, ModelKind, ModelParts, SizeReport,
    WalkInstance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    CoinedToSzegedy,
    SzegedyToCoined,
    HyperwalkToCoined,
    HyperwalkToStaggered,
    StaggeredToGeneralizedCoined,
    GeneralizedCoinedToCoined,
    StaggeredToHyperwalk,
}

impl TransformKind {
    pub const ALL: [TransformKind; 7] = [
        Self::CoinedToSzegedy,
        Self::SzegedyToCoined,
        Self::HyperwalkToCoined,
        Self::HyperwalkToStaggered,
        Self::StaggeredToGeneralizedCoined,
        Self::GeneralizedCoinedToCoined,
        Self::StaggeredToHyperwalk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::CoinedToSzegedy => "coined-to-szegedy",
            Self::SzegedyToCoined => "szegedy-to-coined",
            Self::HyperwalkToCoined => "hyperwalk-to-coined",
            Self::HyperwalkToStaggered => "hyperwalk-to-staggered",
            Self::StaggeredToGeneralizedCoined => "staggered-to-generalized-coined",
            Self::GeneralizedCoinedToCoined => "generalized-coined-to-coined",
            Self::StaggeredToHyperwalk => "staggered-to-hyperwalk",
        }
    }

    pub fn source_model(self) -> ModelKind {
        match self {
            Self::CoinedToSzegedy | Self::GeneralizedCoinedToCoined => ModelKind::ScatteringCoined,
            Self::SzegedyToCoined => ModelKind::Szegedy,
            Self::HyperwalkToCoined | Self::HyperwalkToStaggered => ModelKind::Hyperwalk,
            Self::StaggeredToGeneralizedCoined | Self::StaggeredToHyperwalk => ModelKind::Staggered,
        }
    }

    pub fn target_model(self) -> ModelKind {
        match self {
            Self::CoinedToSzegedy => ModelKind::Szegedy,
            Self::SzegedyToCoined
            | Self::HyperwalkToCoined
            | Self::StaggeredToGeneralizedCoined
            | Self::GeneralizedCoinedToCoined => ModelKind::ScatteringCoined,
            Self::HyperwalkToStaggered => ModelKind::Staggered,
            Self::StaggeredToHyperwalk => ModelKind::Hyperwalk,
        }
    }

    /// Target basis never exceeds the source basis and steps correspond one to one.
    pub fn is_strong(self) -> bool {
        matches!(self, Self::StaggeredToHyperwalk)
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let alias = match key.as_str() {
            "szegedy-from-coined" => Some(Self::CoinedToSzegedy),
            "coined-from-szegedy" => Some(Self::SzegedyToCoined),
            "coined-from-hyperwalk" => Some(Self::HyperwalkToCoined),
            "staggered-from-generalized-hyperwalk" | "staggered-from-hyperwalk" => Some(Self::HyperwalkToStaggered),
            "generalized-coined-from-staggered" => Some(Self::StaggeredToGeneralizedCoined),
            "coined-from-generalized-coined" => Some(Self::GeneralizedCoinedToCoined),
            "generalized-hyperwalk-from-staggered" | "hyperwalk-from-staggered" => Some(Self::StaggeredToHyperwalk),
            // shorthand used in chains: name the target model only
            "szegedy" => Some(Self::CoinedToSzegedy),
            "staggered" => Some(Self::HyperwalkToStaggered),
            "generalized-coined" => Some(Self::StaggeredToGeneralizedCoined),
            "coined" => Some(Self::GeneralizedCoinedToCoined),
            _ => None,
        };
        alias
            .or_else(|| Self::ALL.into_iter().find(|k| k.name() == key))
            .ok_or_else(|| Error::InapplicableTransform(format!("unknown transform {s:?}")))
    }
}

/// Parses a comma-separated chain such as `staggered,generalized-coined,coined,szegedy`.
pub fn parse_chain(s: &str) -> Result<Vec<TransformKind>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

/// `n_target = a * n_source + b`, counted in walk steps of each model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMap {
    pub a: usize,
    pub b: usize,
}

impl StepMap {
    pub const IDENTITY: StepMap = StepMap { a: 1, b: 0 };

    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 {
            return Err(Error::Malformed("step map must be strictly increasing".into()));
        }
        Ok(Self { a, b })
    }

    pub fn apply(&self, n: usize) -> usize {
        self.a * n + self.b
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

/// Injection of source basis states into the target basis.
#[derive(Debug, Clone)]
pub struct StateMap {
    source: Arc<BasisMap>,
    target: Arc<BasisMap>,
    image: Vec<usize>,
}

impl StateMap {
    pub fn new(source: Arc<BasisMap>, target: Arc<BasisMap>, image: Vec<usize>) -> Result<Self> {
        if image.len() != source.len() {
            return Err(Error::DimensionMismatch { context: "state map".into(), expected: source.len(), found: image.len() });
        }
        let mut seen = vec![false; target.len()];
        for &j in &image {
            if j >= target.len() {
                return Err(Error::IndexOutOfRange { index: j, bound: target.len() });
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::Malformed(format!("state map is not injective at target index {j}")));
            }
        }
        Ok(Self { source, target, image })
    }

    fn from_labels(source: &Arc<BasisMap>, target: &Arc<BasisMap>, f: impl Fn(&BasisLabel) -> BasisLabel) -> Result<Self> {
        let image = source.labels().iter().map(|l| target.require(&f(l))).collect::<Result<_>>()?;
        Self::new(source.clone(), target.clone(), image)
    }

    pub fn identity(basis: Arc<BasisMap>) -> Self {
        let image = (0..basis.len()).collect();
        Self { source: basis.clone(), target: basis, image }
    }

    pub fn source(&self) -> &Arc<BasisMap> {
        &self.source
    }

    pub fn target(&self) -> &Arc<BasisMap> {
        &self.target
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `(source label, target label)` pairs.
    pub fn pairs(&self) -> Vec<(BasisLabel, BasisLabel)> {
        self.image.iter().enumerate().map(|(i, &j)| (self.source.label(i), self.target.label(j))).collect()
    }

    pub fn map_state(&self, state: &StateVector) -> Result<StateVector> {
        if !crate::state::same_basis(state.basis(), &self.source) {
            return Err(Error::BasisMismatch("state is not on the transform's source basis".into()));
        }
        let mut amps = crate::state::CVector::zeros(self.target.len());
        for (i, &j) in self.image.iter().enumerate() {
            amps[j] = state.amplitudes()[i];
        }
        StateVector::new(self.target.clone(), amps)
    }
}

/// Output of one conversion.
#[derive(Debug, Clone)]
pub struct TransformResult {
    /// `None` for the identity transform.
    pub kind: Option<TransformKind>,
    pub target: WalkInstance,
    pub state_map: StateMap,
    /// Read-out of target states as source vertices; entry `n mod len` is
    /// used after `n` target steps.
    pub measurements: Vec<MeasurementMap>,
    pub step_map: StepMap,
}

impl TransformResult {
    pub fn identity(walk: &WalkInstance) -> Self {
        Self {
            kind: None,
            target: walk.clone(),
            state_map: StateMap::identity(walk.basis().clone()),
            measurements: walk.measurements().to_vec(),
            step_map: StepMap::IDENTITY,
        }
    }

    pub fn measurement_at(&self, target_step: usize) -> &MeasurementMap {
        &self.measurements[target_step % self.measurements.len()]
    }

    pub fn size_report(&self) -> SizeReport {
        self.target.size_report()
    }

    pub fn to_doc(&self) -> TransformDoc {
        TransformDoc {
            transform: self.kind.map(|k| k.name().to_string()),
            target: CompiledWalkDoc::from(self.target.parts()),
            state_map: self.state_map.pairs(),
            measurement: self.measurements.iter().map(|m| m.assignment().to_vec()).collect(),
            source_vertices: self.measurements[0].vertex_count(),
            step_map: self.step_map,
            sizes: self.size_report(),
        }
    }
}

/// JSON form of a [`TransformResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<String>,
    pub target: CompiledWalkDoc,
    pub state_map: Vec<(BasisLabel, BasisLabel)>,
    pub measurement: Vec<Vec<Option<usize>>>,
    pub source_vertices: usize,
    pub step_map: StepMap,
    pub sizes: SizeReport,
}

impl TransformDoc {
    /// Rebuilds (and recertifies) the result against the source walk it was
    /// produced from.
    pub fn into_result(self, source: &WalkInstance) -> Result<TransformResult> {
        let kind = self.transform.as_deref().map(str::parse).transpose()?;
        let target = self.target.build()?;
        if self.state_map.len() != source.basis().len() {
            return Err(Error::DimensionMismatch {
                context: "state map vs source basis".into(),
                expected: source.basis().len(),
                found: self.state_map.len(),
            });
        }
        let mut image = vec![0; self.state_map.len()];
        for (s, t) in &self.state_map {
            image[source.basis().require(s)?] = target.basis().require(t)?;
        }
        let state_map = StateMap::new(source.basis().clone(), target.basis().clone(), image)?;
        if self.measurement.is_empty() {
            return Err(Error::Malformed("transform document has no measurement".into()));
        }
        let measurements = self
            .measurement
            .into_iter()
            .map(|a| {
                if a.len() != target.basis().len() {
                    return Err(Error::DimensionMismatch {
                        context: "measurement vs target basis".into(),
                        expected: target.basis().len(),
                        found: a.len(),
                    });
                }
                MeasurementMap::new(a, self.source_vertices)
            })
            .collect::<Result<_>>()?;
        let step_map = StepMap::new(self.step_map.a, self.step_map.b)?;
        Ok(TransformResult { kind, target, state_map, measurements, step_map })
    }
}

pub fn apply_transform(kind: TransformKind, walk: &WalkInstance) -> Result<TransformResult> {
    match kind {
        TransformKind::CoinedToSzegedy => szegedy_from_coined(walk),
        TransformKind::SzegedyToCoined => coined_from_szegedy(walk),
        TransformKind::HyperwalkToCoined => coined_from_hyperwalk(walk),
        TransformKind::HyperwalkToStaggered => staggered_from_generalized_hyperwalk(walk),
        TransformKind::StaggeredToGeneralizedCoined => generalized_coined_from_staggered(walk),
        TransformKind::GeneralizedCoinedToCoined => coined_from_generalized_coined(walk),
        TransformKind::StaggeredToHyperwalk => generalized_hyperwalk_from_staggered(walk),
    }
}

/// Applies a chain of transforms; each result's source is the previous target.
pub fn apply_chain(walk: &WalkInstance, chain: &[TransformKind]) -> Result<Vec<TransformResult>> {
    let mut out: Vec<TransformResult> = Vec::with_capacity(chain.len());
    for &kind in chain {
        let src = out.last().map_or(walk, |r| &r.target);
        out.push(apply_transform(kind, src)?);
    }
    Ok(out)
}

fn inapplicable(kind: TransformKind, walk: &WalkInstance) -> Error {
    Error::InapplicableTransform(format!("{kind} needs a {} walk, got {}", kind.source_model(), walk.model()))
}

fn one(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Same coins, reinterpreted on the bipartite double: `U_1 = C_0`,
/// `U_2 = S C_1 S` (with `C_1 = C_0` for a single coin).
pub fn szegedy_from_coined(w: &WalkInstance) -> Result<TransformResult> {
    let kind = TransformKind::CoinedToSzegedy;
    let ModelParts::Coined { graph, coins } = w.parts() else {
        return Err(inapplicable(kind, w));
    };
    if coins.len() > 2 {
        return Err(Error::InapplicableTransform(format!(
            "{kind} needs at most two alternating coins, got {}",
            coins.len()
        )));
    }
    let swap = swap_permutation(w.basis());
    let u1 = coins[0].clone();
    let u2 = conjugate_by_involution(&swap, coins.last().expect("nonempty"));
    let target = WalkInstance::from_parts(ModelParts::Szegedy { graph: graph.clone(), reflections: [u1, u2] })?;
    let state_map = StateMap::from_labels(w.basis(), target.basis(), |l| match *l {
        BasisLabel::Arc { from, to } => BasisLabel::Bipartite { x: from, y: to },
        other => other,
    })?;
    Ok(TransformResult {
        kind: Some(kind),
        measurements: target.measurements().to_vec(),
        target,
        state_map,
        step_map: StepMap::IDENTITY,
    })
}

/// `C_0 = U_1`, `C_1 = S U_2 S`; a single coin when the two agree.
pub fn coined_from_szegedy(w: &WalkInstance) -> Result<TransformResult> {
    let kind = TransformKind::SzegedyToCoined;
    let ModelParts::Szegedy { graph, reflections } = w.parts() else {
        return Err(inapplicable(kind, w));
    };
    let swap = swap_permutation(w.basis());
    let c0 = reflections[0].clone();
    let c1 = conjugate_by_involution(&swap, &reflections[1]);
    let coins = if c1 == c0 { vec![c0] } else { vec![c0, c1] };
    let target = WalkInstance::from_parts(ModelParts::Coined { graph: graph.clone(), coins })?;
    let state_map = StateMap::from_labels(w.basis(), target.basis(), |l| match *l {
        BasisLabel::Bipartite { x, y } => BasisLabel::Arc { from: x, to: y },
        other => other,
    })?;
    Ok(TransformResult {
        kind: Some(kind),
        measurements: target.measurements().to_vec(),
        target,
        state_map,
        step_map: StepMap::IDENTITY,
    })
}

/// Coined walk on the vertex/edge incidence graph with coin `U^V ⊕ U^E`.
/// Vertex `N + e` stands for hyperedge `e`; one hyperwalk step is two coined steps.
pub fn coined_from_hyperwalk(w: &WalkInstance) -> Result<TransformResult> {
    let kind = TransformKind::HyperwalkToCoined;
    let ModelParts::Hyperwalk { hypergraph: h, steps } = w.parts() else {
        return Err(inapplicable(kind, w));
    };
    let n = h.vertex_count();
    let pairs = h.incidence_pairs();
    let graph = Graph::new(n + h.edge_count(), pairs.iter().map(|&(v, e)| (v, n + e)), false)?;
    let basis = arc_basis(&graph)?;
    let fwd: Vec<usize> = pairs.iter().map(|&(v, e)| basis.require(&BasisLabel::Arc { from: v, to: n + e })).collect::<Result<_>>()?;
    let back: Vec<usize> = pairs.iter().map(|&(v, e)| basis.require(&BasisLabel::Arc { from: n + e, to: v })).collect::<Result<_>>()?;
    let coin_of = |uv: &CMatrix, ue: &CMatrix| {
        let mut c = CMatrix::zeros(basis.len(), basis.len());
        for i in 0..pairs.len() {
            for j in 0..pairs.len() {
                c[(fwd[i], fwd[j])] = uv[(i, j)];
                c[(back[i], back[j])] = ue[(i, j)];
            }
        }
        c
    };
    let coins: Vec<CMatrix> = if steps.len() == 1 {
        vec![coin_of(&steps[0].0, &steps[0].1)]
    } else {
        steps.iter().flat_map(|(uv, ue)| {
            let c = coin_of(uv, ue);
            [c.clone(), c]
        }).collect()
    };
    let target = WalkInstance::from_parts(ModelParts::Coined { graph, coins })?;
    let state_map = StateMap::new(w.basis().clone(), target.basis().clone(), fwd)?;
    let measurement = MeasurementMap::from_labels(target.basis(), n, |l| match *l {
        BasisLabel::Arc { from, to } if from < n && to >= n => Some(from),
        _ => None,
    })?;
    Ok(TransformResult {
        kind: Some(kind),
        target,
        state_map,
        measurements: vec![measurement],
        step_map: StepMap { a: 2, b: 0 },
    })
}

/// Staggered walk on the incidence pairs: vertex-grouping and edge-grouping
/// tessellations alternate, carrying `U^V_k` and `U^E_k` unchanged.
pub fn staggered_from_generalized_hyperwalk(w: &WalkInstance) -> Result<TransformResult> {
    let kind = TransformKind::HyperwalkToStaggered;
    let ModelParts::Hyperwalk { hypergraph: h, steps } = w.parts() else {
        return Err(inapplicable(kind, w));
    };
    let pairs = h.incidence_pairs();
    let m = pairs.len();
    let mut by_vertex = vec![Vec::new(); h.vertex_count()];
    let mut by_edge = vec![Vec::new(); h.edge_count()];
    for (i, &(v, e)) in pairs.iter().enumerate() {
        by_vertex[v].push(i);
        by_edge[e].push(i);
    }
    by_vertex.retain(|p| !p.is_empty());
    let mut edges = Vec::new();
    for group in by_vertex.iter().chain(&by_edge) {
        for (a, &x) in group.iter().enumerate() {
            edges.extend(group[a + 1..].iter().map(|&y| (x, y)));
        }
    }
    let graph = Graph::new(m, edges, false)?;
    let tv = Tessellation::new(by_vertex, m)?;
    let te = Tessellation::new(by_edge, m)?;
    let mut tessellations = Vec::with_capacity(2 * steps.len());
    let mut stages = Vec::with_capacity(2 * steps.len());
    for (uv, ue) in steps {
        tessellations.extend([tv.clone(), te.clone()]);
        stages.extend([uv.clone(), ue.clone()]);
    }
    let target = WalkInstance::from_parts(ModelParts::Staggered { graph, tessellations, stages })?;
    let state_map = StateMap::new(w.basis().clone(), target.basis().clone(), (0..m).collect())?;
    let measurement = MeasurementMap::new(pairs.iter().map(|&(v, _)| Some(v)).collect(), h.vertex_count())?;
    Ok(TransformResult {
        kind: Some(kind),
        target,
        state_map,
        measurements: vec![measurement],
        step_map: StepMap { a: 2, b: 0 },
    })
}

/// Adds one vertex per polygon per tessellation. The cycling coin moves
/// `|v,t_i>` to `|v,t_{i+1}>`; coin `C_i` applies `U_{i+1}` inside polygon
/// vertex `t_i`. Each staggered step becomes two coined steps.
pub fn generalized_coined_from_staggered(w: &WalkInstance) -> Result<TransformResult> {
    let kind = TransformKind::StaggeredToGeneralizedCoined;
    let ModelParts::Staggered { graph, tessellations, stages } = w.parts() else {
        return Err(inapplicable(kind, w));
    };
    let n = graph.vertex_count();
    let k = tessellations.len();
    let mut offsets = Vec::with_capacity(k);
    let mut total = n;
    for t in tessellations {
        offsets.push(total);
        total += t.len();
    }
    let membership: Vec<Vec<usize>> = tessellations.iter().map(Tessellation::membership).collect();
    if membership.iter().any(|m| m.len() != n) {
        return Err(Error::InvalidTessellation("tessellation does not cover the walk's vertices".into()));
    }
    // t-vertex of v in tessellation i
    let t_of = |i: usize, v: usize| offsets[i] + membership[i][v];
    let new_graph = Graph::new(total, (0..k).flat_map(|i| (0..n).map(move |v| (v, i))).map(|(v, i)| (v, t_of(i, v))), false)?;
    let basis = arc_basis(&new_graph)?;
    let dim = basis.len();
    let idx = |from: usize, to: usize| basis.require(&BasisLabel::Arc { from, to });

    let mut cycle = CMatrix::zeros(dim, dim);
    for (col, label) in basis.labels().iter().enumerate() {
        let BasisLabel::Arc { from, to } = *label else { unreachable!() };
        let row = if from < n {
            let i = tessellation_of(&offsets, to);
            idx(from, t_of((i + 1) % k, from))?
        } else {
            col
        };
        cycle[(row, col)] = one(1.0);
    }
    let mut coins = Vec::with_capacity(2 * k);
    for (i, u) in stages.iter().enumerate() {
        let mut c = CMatrix::identity(dim, dim);
        for polygon_index in 0..tessellations[i].len() {
            let t = offsets[i] + polygon_index;
            let members = &tessellations[i].polygons()[polygon_index];
            let cols: Vec<usize> = members.iter().map(|&v| idx(t, v)).collect::<Result<_>>()?;
            for (a, &v) in members.iter().enumerate() {
                for (b, &x) in members.iter().enumerate() {
                    c[(cols[b], cols[a])] = u[(x, v)];
                }
            }
        }
        coins.push(c);
        coins.push(cycle.clone());
    }
    let target = WalkInstance::from_parts(ModelParts::Coined { graph: new_graph, coins })?;
    let image = (0..n).map(|v| idx(t_of(0, v), v)).collect::<Result<_>>()?;
    let state_map = StateMap::new(w.basis().clone(), target.basis().clone(), image)?;
    let measurement = MeasurementMap::from_labels(target.basis(), n, |l| match *l {
        BasisLabel::Arc { from, to } if from >= n => Some(to),
        _ => None,
    })?;
    Ok(TransformResult {
        kind: Some(kind),
        target,
        state_map,
        measurements: vec![measurement],
        step_map: StepMap { a: 2, b: 0 },
    })
}

fn tessellation_of(offsets: &[usize], t: usize) -> usize {
    offsets.partition_point(|&o| o <= t) - 1
}

/// Layered graph with `k` copies of every vertex; the arc `|v^(i), w^(i-1)>`
/// remembers that the walker arrived from `w` at layer `i`, so a single static
/// coin can apply `C_i` there.
pub fn coined_from_generalized_coined(w: &WalkInstance) -> Result<TransformResult> {
    let kind = TransformKind::GeneralizedCoinedToCoined;
    let ModelParts::Coined { graph, coins } = w.parts() else {
        return Err(inapplicable(kind, w));
    };
    let k = coins.len();
    if k == 1 {
        return Ok(TransformResult { kind: Some(kind), ..TransformResult::identity(w) });
    }
    let n = graph.vertex_count();
    let arcs = graph.arcs();
    let layer = |i: usize, v: usize| (i % k) * n + v;
    let layered = Graph::new(
        k * n,
        (0..k).flat_map(|i| arcs.iter().map(move |&(v, u)| (layer(i, v), layer(i + 1, u)))),
        false,
    )?;
    let basis = arc_basis(&layered)?;
    let dim = basis.len();
    let idx = |from: usize, to: usize| basis.require(&BasisLabel::Arc { from, to });
    let mut c = CMatrix::zeros(dim, dim);
    for i in 0..k {
        let (prev, next) = ((i + k - 1) % k, (i + 1) % k);
        for v in 0..n {
            for &wv in graph.neighbors(v) {
                let back = idx(layer(i, v), layer(prev, wv))?;
                let src = w.basis().require(&BasisLabel::Arc { from: v, to: wv })?;
                for &z in graph.neighbors(v) {
                    let fwd = idx(layer(i, v), layer(next, z))?;
                    let dst = w.basis().require(&BasisLabel::Arc { from: v, to: z })?;
                    c[(fwd, back)] = coins[i][(dst, src)];
                }
                if k > 2 {
                    let fwd = idx(layer(i, v), layer(next, wv))?;
                    c[(back, fwd)] = one(1.0);
                }
            }
        }
    }
    let target = WalkInstance::from_parts(ModelParts::Coined { graph: layered, coins: vec![c] })?;
    let state_map = StateMap::from_labels(w.basis(), target.basis(), |l| match *l {
        BasisLabel::Arc { from, to } => BasisLabel::Arc { from: layer(0, from), to: layer(k - 1, to) },
        other => other,
    })?;
    let measurement = MeasurementMap::from_labels(target.basis(), n, |l| match *l {
        BasisLabel::Arc { from, to } if (from / n + k - 1) % k == to / n => Some(from % n),
        _ => None,
    })?;
    Ok(TransformResult {
        kind: Some(kind),
        target,
        state_map,
        measurements: vec![measurement],
        step_map: StepMap::IDENTITY,
    })
}

/// One hyperedge holding every vertex, identity coins, and the staggered
/// stages as time-dependent edge shifts. Same basis size, same step count.
pub fn generalized_hyperwalk_from_staggered(w: &WalkInstance) -> Result<TransformResult> {
    let kind = TransformKind::StaggeredToHyperwalk;
    let ModelParts::Staggered { graph, stages, .. } = w.parts() else {
        return Err(inapplicable(kind, w));
    };
    let n = graph.vertex_count();
    let h = Hypergraph::new(n, vec![(0..n).collect()])?;
    let id = CMatrix::identity(n, n);
    let steps = stages.iter().map(|u| (id.clone(), u.clone())).collect();
    let target = WalkInstance::from_parts(ModelParts::Hyperwalk { hypergraph: h, steps })?;
    let state_map = StateMap::from_labels(w.basis(), target.basis(), |l| match *l {
        BasisLabel::Vertex { vertex } => BasisLabel::Incidence { vertex, edge: 0 },
        other => other,
    })?;
    Ok(TransformResult {
        kind: Some(kind),
        measurements: target.measurements().to_vec(),
        target,
        state_map,
        step_map: StepMap::IDENTITY,
    })
}

/// Size-relevant shape of a walk, enough to evaluate each conversion's
/// counting formula without building matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkShape {
    Line { positions: usize },
    Coined { vertices: usize, arcs: usize, coins: usize },
    /// `symmetric`: the second reflection is the swap-conjugate of the first.
    Szegedy { vertices: usize, arcs: usize, symmetric: bool },
    Staggered { vertices: usize, polygons: Vec<usize> },
    Hyperwalk { vertices: usize, active_vertices: usize, edge_sizes: Vec<usize>, steps: usize },
}

impl WalkShape {
    pub fn of(w: &WalkInstance) -> Self {
        match w.parts() {
            ModelParts::CoinedLine { positions, .. } => Self::Line { positions: *positions },
            ModelParts::Coined { graph, coins } => {
                Self::Coined { vertices: graph.vertex_count(), arcs: w.basis().len(), coins: coins.len() }
            }
            ModelParts::Szegedy { graph, reflections } => {
                let swap = swap_permutation(w.basis());
                Self::Szegedy {
                    vertices: graph.vertex_count(),
                    arcs: w.basis().len(),
                    symmetric: conjugate_by_involution(&swap, &reflections[1]) == reflections[0],
                }
            }
            ModelParts::Staggered { graph, tessellations, .. } => Self::Staggered {
                vertices: graph.vertex_count(),
                polygons: tessellations.iter().map(Tessellation::len).collect(),
            },
            ModelParts::Hyperwalk { hypergraph, steps } => Self::Hyperwalk {
                vertices: hypergraph.vertex_count(),
                active_vertices: (0..hypergraph.vertex_count()).filter(|&v| hypergraph.degree(v) > 0).count(),
                edge_sizes: hypergraph.edges().iter().map(Vec::len).collect(),
                steps: steps.len(),
            },
        }
    }

    pub fn model(&self) -> ModelKind {
        match self {
            Self::Line { .. } => ModelKind::CoinedLine,
            Self::Coined { .. } => ModelKind::ScatteringCoined,
            Self::Szegedy { .. } => ModelKind::Szegedy,
            Self::Staggered { .. } => ModelKind::Staggered,
            Self::Hyperwalk { .. } => ModelKind::Hyperwalk,
        }
    }

    pub fn size_report(&self) -> SizeReport {
        let (vertices, basis_size, operators) = match self {
            Self::Line { positions } => (*positions, 2 * positions, 1),
            Self::Coined { vertices, arcs, coins } => (*vertices, *arcs, *coins),
            Self::Szegedy { vertices, arcs, .. } => (2 * vertices, *arcs, 2),
            Self::Staggered { vertices, polygons } => (*vertices, *vertices, polygons.len()),
            Self::Hyperwalk { vertices, edge_sizes, steps, .. } => (*vertices, edge_sizes.iter().sum(), 2 * steps),
        };
        SizeReport { model: self.model(), vertices, basis_size, operators }
    }

    /// Shape of `kind`'s target.
    pub fn after(&self, kind: TransformKind) -> Result<WalkShape> {
        let bad = || {
            Error::InapplicableTransform(format!("{kind} needs a {} walk, got {}", kind.source_model(), self.model()))
        };
        Ok(match (kind, self) {
            (TransformKind::CoinedToSzegedy, Self::Coined { vertices, arcs, coins }) => {
                if *coins > 2 {
                    return Err(Error::InapplicableTransform(format!(
                        "{kind} needs at most two alternating coins, got {coins}"
                    )));
                }
                Self::Szegedy { vertices: *vertices, arcs: *arcs, symmetric: *coins == 1 }
            }
            (TransformKind::SzegedyToCoined, Self::Szegedy { vertices, arcs, symmetric }) => {
                Self::Coined { vertices: *vertices, arcs: *arcs, coins: if *symmetric { 1 } else { 2 } }
            }
            (TransformKind::HyperwalkToCoined, Self::Hyperwalk { vertices, edge_sizes, steps, .. }) => {
                let incidences: usize = edge_sizes.iter().sum();
                Self::Coined {
                    vertices: vertices + edge_sizes.len(),
                    arcs: 2 * incidences,
                    coins: if *steps == 1 { 1 } else { 2 * steps },
                }
            }
            (TransformKind::HyperwalkToStaggered, Self::Hyperwalk { active_vertices, edge_sizes, steps, .. }) => {
                Self::Staggered {
                    vertices: edge_sizes.iter().sum(),
                    polygons: (0..*steps).flat_map(|_| [*active_vertices, edge_sizes.len()]).collect(),
                }
            }
            (TransformKind::StaggeredToGeneralizedCoined, Self::Staggered { vertices, polygons }) => {
                let k = polygons.len();
                Self::Coined { vertices: vertices + polygons.iter().sum::<usize>(), arcs: 2 * k * vertices, coins: 2 * k }
            }
            (TransformKind::GeneralizedCoinedToCoined, Self::Coined { vertices, arcs, coins }) => match *coins {
                1 => self.clone(),
                2 => Self::Coined { vertices: 2 * vertices, arcs: 2 * arcs, coins: 1 },
                k => Self::Coined { vertices: k * vertices, arcs: 2 * k * arcs, coins: 1 },
            },
            (TransformKind::StaggeredToHyperwalk, Self::Staggered { vertices, polygons }) => Self::Hyperwalk {
                vertices: *vertices,
                active_vertices: *vertices,
                edge_sizes: vec![*vertices],
                steps: polygons.len(),
            },
            _ => return Err(bad()),
        })
    }
}

/// Sizes after each link of a chain, starting with the source itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformKind>,
    pub sizes: SizeReport,
}

pub fn chain_sizes(walk: &WalkInstance, chain: &[TransformKind]) -> Result<Vec<ChainLink>> {
    let mut shape = WalkShape::of(walk);
    let mut out = vec![ChainLink { transform: None, sizes: shape.size_report() }];
    for &kind in chain {
        shape = shape.after(kind)?;
        out.push(ChainLink { transform: Some(kind), sizes: shape.size_report() });
    }
    Ok(out)
}

pub fn transform_chain_size(source: &WalkSpec, chain: &[TransformKind]) -> Result<Vec<ChainLink>> {
    chain_sizes(&source.build()?, chain)
}

/// The four-link chain from a generalized hyperwalk down to a Szegedy walk.
pub const HYPERWALK_TO_SZEGEDY_CHAIN: [TransformKind; 4] = [
    TransformKind::HyperwalkToStaggered,
    TransformKind::StaggeredToGeneralizedCoined,
    TransformKind::GeneralizedCoinedToCoined,
    TransformKind::CoinedToSzegedy,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::{build_grover_hyperwalk, build_scattering, presets};

    fn three_edge() -> Hypergraph {
        Hypergraph::new(4, vec![vec![0, 1, 2], vec![0, 1], vec![2, 3]]).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for k in TransformKind::ALL {
            assert_eq!(k.name().parse::<TransformKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("sideways".parse::<TransformKind>().is_err());
        assert_eq!(
            parse_chain("staggered, generalized-coined,coined,szegedy").unwrap(),
            HYPERWALK_TO_SZEGEDY_CHAIN.to_vec()
        );
    }

    #[test]
    fn incidence_graph_sizes() {
        let w = build_grover_hyperwalk(&three_edge()).unwrap();
        let r = coined_from_hyperwalk(&w).unwrap();
        assert_eq!(r.size_report().vertices, 7);
        assert_eq!(r.size_report().basis_size, 14);
        assert_eq!(r.step_map, StepMap { a: 2, b: 0 });
    }

    #[test]
    fn incidence_staggered_tessellations() {
        let w = build_grover_hyperwalk(&three_edge()).unwrap();
        let r = staggered_from_generalized_hyperwalk(&w).unwrap();
        let ModelParts::Staggered { tessellations, .. } = r.target.parts() else { panic!() };
        assert_eq!(tessellations[0].len(), 4);
        assert_eq!(tessellations[1].len(), 3);
        assert_eq!(r.size_report().vertices, 7);
    }

    #[test]
    fn shapes_match_materialized_targets() {
        let w = build_grover_hyperwalk(&three_edge()).unwrap();
        let mut src = w.clone();
        for kind in HYPERWALK_TO_SZEGEDY_CHAIN.iter().take(3) {
            let predicted = WalkShape::of(&src).after(*kind).unwrap();
            let r = apply_transform(*kind, &src).unwrap();
            assert_eq!(predicted.size_report(), r.size_report(), "{kind}");
            assert_eq!(predicted, WalkShape::of(&r.target), "{kind}");
            src = r.target;
        }
    }

    #[test]
    fn inapplicable_sources_are_rejected() {
        let w = build_grover_hyperwalk(&three_edge()).unwrap();
        assert!(matches!(szegedy_from_coined(&w), Err(Error::InapplicableTransform(_))));
        assert!(matches!(chain_sizes(&w, &[TransformKind::CoinedToSzegedy]), Err(Error::InapplicableTransform(_))));
        let g = Graph::cycle(4).unwrap();
        let c = presets::grover(2);
        let coined = build_scattering(&g, &vec![c; 4]).unwrap();
        assert!(matches!(coined_from_hyperwalk(&coined), Err(Error::InapplicableTransform(_))));
    }

    #[test]
    fn doc_round_trip() {
        let w = build_grover_hyperwalk(&three_edge()).unwrap();
        let r = coined_from_hyperwalk(&w).unwrap();
        let json = serde_json::to_string(&r.to_doc()).unwrap();
        let doc: TransformDoc = serde_json::from_str(&json).unwrap();
        let back = doc.into_result(&w).unwrap();
        assert_eq!(back.step_map, r.step_map);
        assert_eq!(back.state_map.image(), r.state_map.image());
        assert_eq!(back.measurements, r.measurements);
        assert!(json.contains("\"step_map\":{\"a\":2,\"b\":0}"));
    }
}
