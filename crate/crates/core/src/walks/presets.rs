//! Named local operators and small matrix helpers.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::state::{CMatrix, CVector, C64};

/// Operators that can be referred to by name in walk specifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `I - 2|u><u|` with `u` uniform.
    Grover,
    /// 2x2 Hadamard.
    Hadamard,
    /// Discrete Fourier transform.
    Dft,
    Identity,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grover" => Ok(Self::Grover),
            "hadamard" => Ok(Self::Hadamard),
            "dft" | "fourier" => Ok(Self::Dft),
            "identity" | "id" => Ok(Self::Identity),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl Preset {
    pub fn matrix(self, dim: usize) -> Result<CMatrix> {
        match self {
            Self::Grover => Ok(grover(dim)),
            Self::Hadamard if dim == 2 => Ok(hadamard()),
            Self::Hadamard => Err(Error::DimensionMismatch { context: "hadamard preset".into(), expected: 2, found: dim }),
            Self::Dft => Ok(dft(dim)),
            Self::Identity => Ok(CMatrix::identity(dim, dim)),
        }
    }
}

/// `I - 2|u><u|`, `u = (1, ..., 1)/sqrt(d)`.
pub fn grover(d: usize) -> CMatrix {
    let off = C64::new(-2.0 / d as f64, 0.0);
    CMatrix::from_fn(d, d, |i, j| if i == j { off + C64::new(1.0, 0.0) } else { off })
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)])
}

pub fn dft(d: usize) -> CMatrix {
    let scale = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| C64::from_polar(scale, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
}

pub fn pauli_x() -> CMatrix {
    permutation(&[1, 0])
}

/// Matrix sending `|i>` to `|image[i]>`.
pub fn permutation(image: &[usize]) -> CMatrix {
    let n = image.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &j) in image.iter().enumerate() {
        m[(j, i)] = C64::new(1.0, 0.0);
    }
    m
}

/// Cyclic shift `|i> -> |i+1 mod n>`.
pub fn cyclic_shift(n: usize) -> CMatrix {
    permutation(&(0..n).map(|i| (i + 1) % n).collect::<Vec<_>>())
}

/// `2|d><d| - I` for a unit vector `d`.
pub fn reflection(d: &CVector) -> Result<CMatrix> {
    let norm = d.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let n = d.len();
    Ok(d * d.adjoint() * C64::new(2.0, 0.0) - CMatrix::identity(n, n))
}

/// Scattering block with reflection amplitude `r` on the diagonal and
/// transmission `t` everywhere else.
pub fn scattering_block(r: C64, t: C64, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == j { r } else { t })
}

/// Grover scattering coefficients `(2/d - 1, 2/d)`.
pub fn grover_coefficients(d: usize) -> (C64, C64) {
    let t = 2.0 / d as f64;
    (C64::new(t - 1.0, 0.0), C64::new(t, 0.0))
}

/// Writes square blocks into an `n x n` zero matrix; `indices[k]` lists the
/// global indices of block `k`'s rows and columns.
pub fn embed_blocks<'a>(n: usize, blocks: impl IntoIterator<Item = (&'a [usize], &'a CMatrix)>) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for (idx, block) in blocks {
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(i, j)] = block[(a, b)];
            }
        }
    }
    m
}

/// Restriction of `m` to the given rows and columns.
pub fn extract_block(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}
