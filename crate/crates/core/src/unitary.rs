//! Dense square complex matrices checked for unitarity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for column norms and pairwise orthogonality.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Row-major `N×N` unitary. Column `j` is the `j`-th basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        let m = UnitaryMatrix { dim, data };
        let dev = m.unitarity_deviation();
        if dev.is_nan() || dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(m)
    }

    /// Build from column vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let dim = columns.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * dim + j] = v;
            }
        }
        UnitaryMatrix::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        UnitaryMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    /// Max over `|⟨c_i|c_j⟩ − δ_ij|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let ip: Complex64 = (0..n).map(|k| self.get(k, i).conj() * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((ip - target).norm());
            }
        }
        dev
    }

    /// `U† v`
    pub fn adjoint_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|k| self.get(k, i).conj() * v[k]).sum())
            .collect()
    }

    /// `⟨c_i|V†U|c_j⟩`-style overlap matrix entry `(V† U)_{ij}`.
    pub fn adjoint_times(&self, other: &UnitaryMatrix) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n)
                    .map(|k| self.get(k, i).conj() * other.get(k, j))
                    .sum();
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct UnitaryRepr {
    dim: usize,
    /// rows of `[re, im]` pairs
    entries: Vec<Vec<[f64; 2]>>,
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let z = self.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        UnitaryRepr {
            dim: self.dim,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = UnitaryRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.dim || repr.entries.iter().any(|r| r.len() != repr.dim) {
            return Err(serde::de::Error::custom("matrix shape does not match dim"));
        }
        let data = repr
            .entries
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        UnitaryMatrix::new(repr.dim, data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_unitary() {
        let bad = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            UnitaryMatrix::new(2, bad),
            Err(Error::NotUnitary(_))
        ));
        assert!(UnitaryMatrix::new(2, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn adjoint_apply_hadamard() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u =
            UnitaryMatrix::from_columns(&[vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]])
                .unwrap();
        let out = u.adjoint_apply(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((out[0].re - h).abs() < 1e-15 && (out[1].re - h).abs() < 1e-15);
        let json = serde_json::to_string(&u).unwrap();
        let back: UnitaryMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, u);
    }
}
