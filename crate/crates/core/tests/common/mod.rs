//! Brute-force reference evaluation shared by the integration tests. Stage
//! matrices are rebuilt from model parts and basis labels without going
//! through the library's stage operators.
#![allow(dead_code)]

use hyperwalk::{BasisLabel, BasisMap, CMatrix, CVector, ModelParts, StateVector, WalkInstance, C64};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Permutation matrix reversing every arc label.
pub fn swap_matrix(basis: &BasisMap) -> CMatrix {
    let d = basis.len();
    let mut s = CMatrix::zeros(d, d);
    for (j, l) in basis.labels().iter().enumerate() {
        let rev = match *l {
            BasisLabel::Arc { from, to } => BasisLabel::Arc { from: to, to: from },
            BasisLabel::Bipartite { x, y } => BasisLabel::Bipartite { x: y, y: x },
            _ => panic!("not an arc basis"),
        };
        s[(basis.index_of(&rev).unwrap(), j)] = c(1.0);
    }
    s
}

/// Stage matrices in schedule order and the number of stages per step.
pub fn reference_stages(w: &WalkInstance) -> (Vec<CMatrix>, usize) {
    let basis = w.basis();
    match w.parts() {
        ModelParts::CoinedLine { positions, coin } => {
            let n = *positions;
            let d = 2 * n;
            let mut u = CMatrix::zeros(d, d);
            for (j, l) in basis.labels().iter().enumerate() {
                let BasisLabel::Line { coin: cj, position } = *l else { panic!() };
                for ci in 0..2 {
                    let to = if ci == 0 { (position + n - 1) % n } else { (position + 1) % n };
                    let i = basis.index_of(&BasisLabel::Line { coin: ci, position: to }).unwrap();
                    u[(i, j)] += coin[(ci, cj)];
                }
            }
            (vec![u], 1)
        }
        ModelParts::Coined { coins, .. } => {
            let s = swap_matrix(basis);
            (coins.iter().map(|c| &s * c).collect(), 1)
        }
        ModelParts::Szegedy { reflections, .. } => (reflections.to_vec(), 1),
        ModelParts::Staggered { stages, .. } => (stages.clone(), 1),
        ModelParts::Hyperwalk { steps, .. } => (steps.iter().flat_map(|(v, e)| [v.clone(), e.clone()]).collect(), 2),
    }
}

/// Amplitude vectors after 0..=n steps.
pub fn reference_run(w: &WalkInstance, psi: &StateVector, n: usize) -> Vec<CVector> {
    let (stages, per_step) = reference_stages(w);
    let mut out = vec![psi.amplitudes().clone()];
    let mut k = 0;
    for _ in 0..n {
        let mut v = out.last().unwrap().clone();
        for _ in 0..per_step {
            v = &stages[k % stages.len()] * v;
            k += 1;
        }
        out.push(v);
    }
    out
}

/// Vertex probabilities by summing `|amplitude|^2` over labels that `vertex_of` assigns.
pub fn group_probabilities(
    basis: &BasisMap,
    amps: &CVector,
    vertices: usize,
    vertex_of: impl Fn(&BasisLabel) -> Option<usize>,
) -> Vec<f64> {
    let mut p = vec![0.0; vertices];
    for (i, l) in basis.labels().iter().enumerate() {
        if let Some(v) = vertex_of(l) {
            p[v] += amps[i].norm_sqr();
        }
    }
    p
}

pub fn first_index(l: &BasisLabel) -> Option<usize> {
    Some(match *l {
        BasisLabel::Arc { from, .. } => from,
        BasisLabel::Bipartite { x, .. } => x,
        BasisLabel::Incidence { vertex, .. } | BasisLabel::Vertex { vertex } => vertex,
        BasisLabel::Line { position, .. } => position,
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
