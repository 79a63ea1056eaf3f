//! JSON documents: walk specifications, compiled walks and initial states.
//!
//! A walk specification names operators by preset or gives explicit matrices:
//!
//! ```json
//! {"model": "hyperwalk",
//!  "structure": {"vertices": 4, "edges": [[0,1,2],[0,1],[2,3]]},
//!  "coins": {"default": "grover"},
//!  "shifts": {"default": "grover", "e2": [[[0,0],[1,0]],[[1,0],[0,0]]]}}
//! ```
//!
//! Vertex tables accept the keys `default`, `3` or `v3`; edge tables accept
//! `default`, `2` or `e2`. A `schedule` lists one stage document per step of a
//! generalized walk, and `repetitions` repeats the whole schedule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::json::{complex_from_doc, matrix_from_doc, matrix_to_doc, vector_from_doc, ComplexDoc, MatrixDoc};
use crate::state::{BasisLabel, CMatrix, StateVector, C64};
use crate::structures::{Graph, Hypergraph, StructureDoc, Tessellation, TessellationDoc};

use super::presets::{grover_coefficients, scattering_block, Preset};
use super::{
    build_coined_line, build_directed_shift, build_generalized_coined, build_generalized_hyperwalk, build_staggered,
    build_szegedy, uniform_szegedy_amplitudes, HyperwalkStep, ModelKind, ModelParts, PolygonOperator, StaggeredStage,
    SzegedyAmplitudes, WalkInstance,
};

/// A named preset or an explicit matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorDoc {
    Preset(String),
    Matrix(MatrixDoc),
}

pub type OperatorTable = BTreeMap<String, OperatorDoc>;

/// Scattering amplitudes: `"grover"` or one `[r, t]` pair per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScatteringDoc {
    Preset(String),
    PerVertex(Vec<[ComplexDoc; 2]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcAmplitude {
    pub from: usize,
    pub to: usize,
    pub value: ComplexDoc,
}

/// `"uniform"`, one amplitude per vertex (staggered) or per arc (Szegedy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeDoc {
    Preset(String),
    PerVertex(Vec<ComplexDoc>),
    PerArc(Vec<ArcAmplitude>),
}

/// One entry of a generalized schedule.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coins: Option<OperatorTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<OperatorTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scattering: Option<ScatteringDoc>,
    /// Index into the spec's `tessellations` (staggered walks).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tessellation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<AmplitudeDoc>,
    /// One matrix per polygon (staggered walks).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<MatrixDoc>>,
}

fn one() -> usize {
    1
}

fn is_one(n: &usize) -> bool {
    *n == 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coin: Option<OperatorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coins: Option<OperatorTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<OperatorTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scattering: Option<ScatteringDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<AmplitudeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tessellations: Option<Vec<TessellationDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<StageDoc>>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub repetitions: usize,
}

impl WalkSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn structure(&self) -> Result<&StructureDoc> {
        self.structure
            .as_ref()
            .ok_or_else(|| Error::Malformed(format!("{} walk needs a structure", self.model)))
    }

    /// Explicit schedule, or a single stage made of the top-level fields.
    fn stages(&self) -> Vec<StageDoc> {
        let base = self.schedule.clone().unwrap_or_else(|| {
            vec![StageDoc {
                coins: self.coins.clone(),
                shifts: self.shifts.clone(),
                scattering: self.scattering.clone(),
                amplitudes: self.amplitudes.clone(),
                ..StageDoc::default()
            }]
        });
        let reps = self.repetitions.max(1);
        base.iter().cycle().take(base.len() * reps).cloned().collect()
    }

    pub fn build(&self) -> Result<WalkInstance> {
        match self.model {
            ModelKind::CoinedLine => {
                let positions = self.positions.ok_or_else(|| Error::Malformed("line walk needs positions".into()))?;
                let coin = self.coin.clone().unwrap_or(OperatorDoc::Preset("hadamard".into()));
                build_coined_line(resolve_operator(&coin, 2, None)?, positions)
            }
            ModelKind::ScatteringCoined => {
                let graph = Graph::from_doc(self.structure()?)?;
                let schedule = self
                    .stages()
                    .iter()
                    .map(|s| coined_stage(&graph, s))
                    .collect::<Result<Vec<_>>>()?;
                build_generalized_coined(&graph, &schedule)
            }
            ModelKind::Szegedy => {
                let graph = Graph::from_doc(self.structure()?)?;
                let amplitudes = match &self.amplitudes {
                    None => uniform_szegedy_amplitudes(&graph),
                    Some(AmplitudeDoc::Preset(p)) if p == "uniform" => uniform_szegedy_amplitudes(&graph),
                    Some(AmplitudeDoc::PerArc(list)) => list
                        .iter()
                        .map(|a| ((a.from, a.to), complex_from_doc(a.value)))
                        .collect::<SzegedyAmplitudes>(),
                    Some(other) => return Err(Error::Malformed(format!("unsupported Szegedy amplitudes {other:?}"))),
                };
                build_szegedy(&graph, &amplitudes)
            }
            ModelKind::Staggered => {
                let graph = Graph::from_doc(self.structure()?)?;
                let n = graph.vertex_count();
                let tessellations: Vec<Tessellation> = self
                    .tessellations
                    .as_ref()
                    .ok_or_else(|| Error::Malformed("staggered walk needs tessellations".into()))?
                    .iter()
                    .map(|t| Tessellation::from_polygons(t.polygons.clone(), n))
                    .collect();
                let docs = match &self.schedule {
                    Some(_) => self.stages(),
                    None => {
                        let base: Vec<StageDoc> = (0..tessellations.len())
                            .map(|k| StageDoc { tessellation: Some(k), amplitudes: self.amplitudes.clone(), ..StageDoc::default() })
                            .collect();
                        base.iter().cycle().take(base.len() * self.repetitions.max(1)).cloned().collect()
                    }
                };
                let stages = docs
                    .iter()
                    .map(|d| staggered_stage(&tessellations, d, n))
                    .collect::<Result<Vec<_>>>()?;
                build_staggered(&graph, &stages)
            }
            ModelKind::Hyperwalk => {
                let h = Hypergraph::from_doc(self.structure()?)?;
                let schedule = self
                    .stages()
                    .iter()
                    .map(|s| hyperwalk_stage(&h, s))
                    .collect::<Result<Vec<_>>>()?;
                build_generalized_hyperwalk(&h, &schedule)
            }
        }
    }
}

fn resolve_operator(doc: &OperatorDoc, dim: usize, directed: Option<&CMatrix>) -> Result<CMatrix> {
    let m = match doc {
        OperatorDoc::Preset(name) if matches!(name.as_str(), "directed" | "cyclic") => directed
            .cloned()
            .ok_or_else(|| Error::Malformed(format!("preset {name:?} only applies to hyperedge shifts")))?,
        OperatorDoc::Preset(name) => name.parse::<Preset>()?.matrix(dim)?,
        OperatorDoc::Matrix(m) => matrix_from_doc(m)?,
    };
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { context: "operator".into(), expected: dim, found: m.nrows() });
    }
    Ok(m)
}

fn table_lookup<'a>(table: &'a OperatorTable, prefix: char, index: usize, fallback: &'a OperatorDoc) -> &'a OperatorDoc {
    table
        .get(&format!("{prefix}{index}"))
        .or_else(|| table.get(&index.to_string()))
        .or_else(|| table.get("default"))
        .unwrap_or(fallback)
}

fn check_table_keys(table: &OperatorTable, prefix: char, bound: usize) -> Result<()> {
    for key in table.keys() {
        if key == "default" {
            continue;
        }
        let digits = key.strip_prefix(prefix).unwrap_or(key);
        let i: usize = digits
            .parse()
            .map_err(|_| Error::Malformed(format!("unrecognised operator table key {key:?}")))?;
        if i >= bound {
            return Err(Error::IndexOutOfRange { index: i, bound });
        }
    }
    Ok(())
}

fn grover_doc() -> OperatorDoc {
    OperatorDoc::Preset("grover".into())
}

fn coined_stage(graph: &Graph, stage: &StageDoc) -> Result<Vec<CMatrix>> {
    let n = graph.vertex_count();
    if let Some(sc) = &stage.scattering {
        let coefficients: Vec<(C64, C64)> = match sc {
            ScatteringDoc::Preset(p) if p == "grover" => (0..n).map(|v| grover_coefficients(graph.degree(v).max(1))).collect(),
            ScatteringDoc::Preset(p) => return Err(Error::UnknownPreset(p.clone())),
            ScatteringDoc::PerVertex(list) => list.iter().map(|[r, t]| (complex_from_doc(*r), complex_from_doc(*t))).collect(),
        };
        if coefficients.len() != n {
            return Err(Error::DimensionMismatch { context: "scattering coefficients".into(), expected: n, found: coefficients.len() });
        }
        return Ok(coefficients
            .iter()
            .enumerate()
            .map(|(v, &(r, t))| scattering_block(r, t, graph.degree(v)))
            .collect());
    }
    let table = stage.coins.clone().unwrap_or_default();
    check_table_keys(&table, 'v', n)?;
    let fallback = grover_doc();
    (0..n)
        .map(|v| resolve_operator(table_lookup(&table, 'v', v, &fallback), graph.degree(v), None))
        .collect()
}

fn staggered_stage(tessellations: &[Tessellation], stage: &StageDoc, n: usize) -> Result<StaggeredStage> {
    let k = stage
        .tessellation
        .ok_or_else(|| Error::Malformed("staggered stage needs a tessellation index".into()))?;
    let tessellation = tessellations
        .get(k)
        .cloned()
        .ok_or(Error::IndexOutOfRange { index: k, bound: tessellations.len() })?;
    if let Some(blocks) = &stage.blocks {
        let blocks = blocks.iter().map(matrix_from_doc).collect::<Result<Vec<_>>>()?;
        return Ok(StaggeredStage { tessellation, operator: PolygonOperator::Blocks(blocks) });
    }
    match &stage.amplitudes {
        None => Ok(StaggeredStage::uniform(tessellation)),
        Some(AmplitudeDoc::Preset(p)) if p == "uniform" => Ok(StaggeredStage::uniform(tessellation)),
        Some(AmplitudeDoc::PerVertex(a)) if a.len() == n => Ok(StaggeredStage {
            tessellation,
            operator: PolygonOperator::Reflection(vector_from_doc(a).iter().copied().collect()),
        }),
        Some(other) => Err(Error::Malformed(format!("unsupported staggered amplitudes {other:?}"))),
    }
}

fn hyperwalk_stage(h: &Hypergraph, stage: &StageDoc) -> Result<HyperwalkStep> {
    let fallback = grover_doc();
    let coins_table = stage.coins.clone().unwrap_or_default();
    let shifts_table = stage.shifts.clone().unwrap_or_default();
    check_table_keys(&coins_table, 'v', h.vertex_count())?;
    check_table_keys(&shifts_table, 'e', h.edge_count())?;
    let coins = (0..h.vertex_count())
        .map(|v| resolve_operator(table_lookup(&coins_table, 'v', v, &fallback), h.degree(v), None))
        .collect::<Result<Vec<_>>>()?;
    let directed = build_directed_shift(h)?;
    let shifts = (0..h.edge_count())
        .map(|e| resolve_operator(table_lookup(&shifts_table, 'e', e, &fallback), h.edge(e).len(), Some(&directed[e])))
        .collect::<Result<Vec<_>>>()?;
    Ok(HyperwalkStep { coins, shifts })
}

/// Fully materialized walk, as emitted by transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum CompiledWalkDoc {
    CoinedLine { positions: usize, coin: MatrixDoc },
    ScatteringCoined { structure: StructureDoc, coins: Vec<MatrixDoc> },
    Szegedy { structure: StructureDoc, reflections: [MatrixDoc; 2] },
    Staggered { structure: StructureDoc, tessellations: Vec<TessellationDoc>, stages: Vec<MatrixDoc> },
    Hyperwalk { structure: StructureDoc, steps: Vec<[MatrixDoc; 2]> },
}

impl From<&ModelParts> for CompiledWalkDoc {
    fn from(parts: &ModelParts) -> Self {
        match parts {
            ModelParts::CoinedLine { positions, coin } => Self::CoinedLine { positions: *positions, coin: matrix_to_doc(coin) },
            ModelParts::Coined { graph, coins } => Self::ScatteringCoined {
                structure: graph.to_doc(),
                coins: coins.iter().map(matrix_to_doc).collect(),
            },
            ModelParts::Szegedy { graph, reflections } => Self::Szegedy {
                structure: graph.to_doc(),
                reflections: [matrix_to_doc(&reflections[0]), matrix_to_doc(&reflections[1])],
            },
            ModelParts::Staggered { graph, tessellations, stages } => Self::Staggered {
                structure: graph.to_doc(),
                tessellations: tessellations.iter().map(Tessellation::to_doc).collect(),
                stages: stages.iter().map(matrix_to_doc).collect(),
            },
            ModelParts::Hyperwalk { hypergraph, steps } => Self::Hyperwalk {
                structure: hypergraph.to_doc(),
                steps: steps.iter().map(|(v, e)| [matrix_to_doc(v), matrix_to_doc(e)]).collect(),
            },
        }
    }
}

impl CompiledWalkDoc {
    pub fn to_parts(&self) -> Result<ModelParts> {
        Ok(match self {
            Self::CoinedLine { positions, coin } => ModelParts::CoinedLine { positions: *positions, coin: matrix_from_doc(coin)? },
            Self::ScatteringCoined { structure, coins } => ModelParts::Coined {
                graph: Graph::from_doc(structure)?,
                coins: coins.iter().map(matrix_from_doc).collect::<Result<_>>()?,
            },
            Self::Szegedy { structure, reflections } => ModelParts::Szegedy {
                graph: Graph::from_doc(structure)?,
                reflections: [matrix_from_doc(&reflections[0])?, matrix_from_doc(&reflections[1])?],
            },
            Self::Staggered { structure, tessellations, stages } => {
                let graph = Graph::from_doc(structure)?;
                let n = graph.vertex_count();
                ModelParts::Staggered {
                    tessellations: tessellations.iter().map(|t| Tessellation::from_polygons(t.polygons.clone(), n)).collect(),
                    stages: stages.iter().map(matrix_from_doc).collect::<Result<_>>()?,
                    graph,
                }
            }
            Self::Hyperwalk { structure, steps } => ModelParts::Hyperwalk {
                hypergraph: Hypergraph::from_doc(structure)?,
                steps: steps
                    .iter()
                    .map(|[v, e]| Ok((matrix_from_doc(v)?, matrix_from_doc(e)?)))
                    .collect::<Result<_>>()?,
            },
        })
    }

    pub fn build(&self) -> Result<WalkInstance> {
        WalkInstance::from_parts(self.to_parts()?)
    }
}

/// Initial state: explicit amplitudes or a single basis label such as
/// `{"vertex": 0, "edge": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateDoc {
    Amplitudes { amplitudes: Vec<ComplexDoc> },
    Label(BasisLabel),
}

impl InitialStateDoc {
    pub fn resolve(&self, walk: &WalkInstance) -> Result<StateVector> {
        match self {
            Self::Label(l) => walk.basis_state(l),
            Self::Amplitudes { amplitudes } => {
                let s = StateVector::new(walk.basis().clone(), vector_from_doc(amplitudes))?;
                if !s.is_normalized(1e-9) {
                    return Err(Error::NotNormalized { norm: s.norm() });
                }
                Ok(s)
            }
        }
    }
}

/// Default initial state: the first basis state of the walk.
pub fn default_initial_state(walk: &WalkInstance) -> StateVector {
    StateVector::from_index(walk.basis().clone(), 0)
}
