//! Basis bookkeeping, state vectors, certified unitaries and vertex measurement.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default bound on `max |U^dagger U - I|` for certified operators.
pub const DEFAULT_UNITARITY_TOLERANCE: f64 = 1e-10;

/// Tolerance used when composing already-certified operators.
pub const COMPOSITION_TOLERANCE: f64 = 1e-9;

static UNITARITY_TOLERANCE: AtomicU64 = AtomicU64::new(DEFAULT_UNITARITY_TOLERANCE.to_bits());

pub fn unitarity_tolerance() -> f64 {
    f64::from_bits(UNITARITY_TOLERANCE.load(Ordering::Relaxed))
}

/// Process-wide override of the certification tolerance.
pub fn set_unitarity_tolerance(tol: f64) {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    UNITARITY_TOLERANCE.store(tol.to_bits(), Ordering::Relaxed);
}

/// Label of one basis state. Which variant appears depends on the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisLabel {
    /// `|c> ⊗ |n>` on the line.
    Line { coin: usize, position: usize },
    /// `|i,j>` for an arc `i -> j` of a coined walk.
    Arc { from: usize, to: usize },
    /// `|x,y'>` in the bipartite double of a Szegedy walk.
    Bipartite { x: usize, y: usize },
    /// `|v,e>` with `v ∈ e`.
    Incidence { vertex: usize, edge: usize },
    /// `|v>` of a staggered walk.
    Vertex { vertex: usize },
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Line { coin, position } => write!(f, "|{coin}>|{position}>"),
            Self::Arc { from, to } => write!(f, "|{from},{to}>"),
            Self::Bipartite { x, y } => write!(f, "|{x},{y}'>"),
            Self::Incidence { vertex, edge } => write!(f, "|{vertex},e{edge}>"),
            Self::Vertex { vertex } => write!(f, "|{vertex}>"),
        }
    }
}

/// Bijection between basis labels and dense indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMap {
    labels: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
}

impl BasisMap {
    pub fn new(labels: Vec<BasisLabel>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            if index.insert(l, i).is_some() {
                return Err(Error::Malformed(format!("basis label {l} appears twice")));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn shared(labels: Vec<BasisLabel>) -> Result<Arc<Self>> {
        Self::new(labels).map(Arc::new)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> BasisLabel {
        self.labels[i]
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &BasisLabel) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::BasisMismatch(format!("label {label} is not in the basis")))
    }
}

pub fn same_basis(a: &Arc<BasisMap>, b: &Arc<BasisMap>) -> bool {
    Arc::ptr_eq(a, b) || a.labels == b.labels
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    basis: Arc<BasisMap>,
}

impl StateVector {
    pub fn new(basis: Arc<BasisMap>, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                context: "state vector".into(),
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, basis })
    }

    pub fn basis_state(basis: Arc<BasisMap>, label: &BasisLabel) -> Result<Self> {
        let i = basis.require(label)?;
        Ok(Self::from_index(basis, i))
    }

    pub fn from_index(basis: Arc<BasisMap>, i: usize) -> Self {
        let mut amplitudes = CVector::zeros(basis.len());
        amplitudes[i] = C64::new(1.0, 0.0);
        Self { amplitudes, basis }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn basis(&self) -> &Arc<BasisMap> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        self.amplitudes.unscale_mut(n);
        Ok(self)
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Option<C64> {
        self.basis.index_of(label).map(|i| self.amplitudes[i])
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(mut self, phase: f64) -> Self {
        self.amplitudes *= C64::from_polar(1.0, phase);
        self
    }
}

/// Largest entry modulus of `U^dagger U - I`.
///
/// The Gram matrix is accumulated row by row over nonzero entries, so the
/// sparse permutation-and-block operators built by the transforms cost far
/// less than a dense product.
pub fn unitarity_deviation(matrix: &CMatrix) -> f64 {
    let n = matrix.ncols();
    let zero = C64::new(0.0, 0.0);
    let mut gram = CMatrix::zeros(n, n);
    let mut row = Vec::with_capacity(n);
    for k in 0..matrix.nrows() {
        row.clear();
        row.extend((0..n).filter_map(|j| {
            let z = matrix[(k, j)];
            (z != zero).then_some((j, z))
        }));
        for &(i, a) in &row {
            let a = a.conj();
            for &(j, b) in &row {
                gram[(i, j)] += a * b;
            }
        }
    }
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            let d = (gram[(i, j)] - C64::new(expected, 0.0)).norm();
            if d.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Dense unitary acting on a fixed basis, with optional block structure.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
    basis: Arc<BasisMap>,
    blocks: Option<Vec<Vec<usize>>>,
}

impl UnitaryOperator {
    /// Certifies `matrix` at the global tolerance.
    pub fn certify(matrix: CMatrix, basis: Arc<BasisMap>) -> Result<Self> {
        Self::certify_with_tolerance(matrix, basis, unitarity_tolerance())
    }

    pub fn certify_with_tolerance(matrix: CMatrix, basis: Arc<BasisMap>, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if matrix.nrows() != basis.len() {
            return Err(Error::DimensionMismatch {
                context: "operator vs basis".into(),
                expected: basis.len(),
                found: matrix.nrows(),
            });
        }
        let max_deviation = unitarity_deviation(&matrix);
        if !(max_deviation <= tol) {
            return Err(Error::NotUnitary { max_deviation });
        }
        Ok(Self { matrix, basis, blocks: None })
    }

    pub fn identity(basis: Arc<BasisMap>) -> Self {
        let n = basis.len();
        Self { matrix: CMatrix::identity(n, n), basis, blocks: None }
    }

    /// Attaches block metadata after checking that every entry coupling two
    /// different blocks is exactly zero.
    pub fn with_blocks(mut self, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = self.dim();
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, bound: n });
                }
                if owner[i] != usize::MAX {
                    return Err(Error::NotAPartition(format!("basis index {i} in two blocks")));
                }
                owner[i] = b;
            }
        }
        if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::NotAPartition(format!("basis index {i} in no block")));
        }
        for col in 0..n {
            for row in 0..n {
                if owner[row] != owner[col] && self.matrix[(row, col)] != C64::new(0.0, 0.0) {
                    return Err(Error::BlockViolation { row, col });
                }
            }
        }
        self.blocks = Some(blocks);
        Ok(self)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn basis(&self) -> &Arc<BasisMap> {
        &self.basis
    }

    pub fn blocks(&self) -> Option<&[Vec<usize>]> {
        self.blocks.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    /// `self · other`, recertified at [`COMPOSITION_TOLERANCE`].
    pub fn compose(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(Error::BasisMismatch("composing operators on different bases".into()));
        }
        Self::certify_with_tolerance(&self.matrix * &other.matrix, self.basis.clone(), COMPOSITION_TOLERANCE)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if !same_basis(&self.basis, &state.basis) {
            return Err(Error::BasisMismatch("operator and state live on different bases".into()));
        }
        Ok(StateVector { amplitudes: &self.matrix * &state.amplitudes, basis: state.basis.clone() })
    }
}

pub fn certify_unitary(matrix: CMatrix, basis: Arc<BasisMap>) -> Result<UnitaryOperator> {
    UnitaryOperator::certify(matrix, basis)
}

pub fn apply(u: &UnitaryOperator, s: &StateVector) -> Result<StateVector> {
    u.apply(s)
}

/// Assignment of basis indices to vertices; unassigned indices are not
/// observed by the measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementMap {
    assignment: Vec<Option<usize>>,
    vertex_count: usize,
}

impl MeasurementMap {
    pub fn new(assignment: Vec<Option<usize>>, vertex_count: usize) -> Result<Self> {
        if let Some(v) = assignment.iter().flatten().find(|&&v| v >= vertex_count) {
            return Err(Error::IndexOutOfRange { index: *v, bound: vertex_count });
        }
        Ok(Self { assignment, vertex_count })
    }

    /// Builds the map by asking `f` for the vertex of every label.
    pub fn from_labels(basis: &BasisMap, vertex_count: usize, f: impl Fn(&BasisLabel) -> Option<usize>) -> Result<Self> {
        Self::new(basis.labels().iter().map(f).collect(), vertex_count)
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn basis_len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }
}

/// Vertex probabilities `P(v) = sum_{i -> v} |psi_i|^2`.
pub fn measure_vertices(s: &StateVector, m: &MeasurementMap) -> Result<Vec<f64>> {
    if m.assignment.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            context: "measurement map vs state".into(),
            expected: s.dim(),
            found: m.assignment.len(),
        });
    }
    let mut p = vec![0.0; m.vertex_count];
    for (amp, v) in s.amplitudes.iter().zip(&m.assignment) {
        if let Some(v) = v {
            p[*v] += amp.norm_sqr();
        }
    }
    Ok(p)
}

/// As [`measure_vertices`], but rejects states whose norm is off by more than `tol`.
pub fn measure_vertices_strict(s: &StateVector, m: &MeasurementMap, tol: f64) -> Result<Vec<f64>> {
    if !s.is_normalized(tol) {
        return Err(Error::NotNormalized { norm: s.norm() });
    }
    measure_vertices(s, m)
}

/// JSON encoding of complex data as `[re, im]` pairs.
pub mod json {
    use super::*;

    pub type ComplexDoc = [f64; 2];
    pub type MatrixDoc = Vec<Vec<ComplexDoc>>;

    pub fn complex_to_doc(z: C64) -> ComplexDoc {
        [z.re, z.im]
    }

    pub fn complex_from_doc(d: ComplexDoc) -> C64 {
        C64::new(d[0], d[1])
    }

    pub fn matrix_to_doc(m: &CMatrix) -> MatrixDoc {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| complex_to_doc(m[(i, j)])).collect())
            .collect()
    }

    pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<CMatrix> {
        let rows = doc.len();
        let cols = doc.first().map_or(0, Vec::len);
        if let Some(bad) = doc.iter().find(|r| r.len() != cols) {
            return Err(Error::Malformed(format!("ragged matrix row of length {} (expected {cols})", bad.len())));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| complex_from_doc(doc[i][j])))
    }

    pub fn vector_to_doc(v: &CVector) -> Vec<ComplexDoc> {
        v.iter().map(|&z| complex_to_doc(z)).collect()
    }

    pub fn vector_from_doc(doc: &[ComplexDoc]) -> CVector {
        CVector::from_iterator(doc.len(), doc.iter().map(|&d| complex_from_doc(d)))
    }
}
