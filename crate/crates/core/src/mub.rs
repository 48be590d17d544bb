//! Complete sets of mutually unbiased bases.
//!
//! Prime dimensions use the quadratic-phase construction (with the Pauli
//! eigenbases for `N = 2`); `N = 4` ships as a fixed table. Everything else
//! is reported as unsupported.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::unitary::UnitaryMatrix;

pub const MUB_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubBasis {
    pub label: String,
    pub matrix: UnitaryMatrix,
}

impl MubBasis {
    pub fn new(label: impl Into<String>, matrix: UnitaryMatrix) -> Result<Self> {
        if matrix.dim() < 2 {
            return Err(Error::OutOfRange {
                what: "MUB dimension",
                value: matrix.dim(),
                min: 2,
                max: usize::MAX,
            });
        }
        Ok(MubBasis {
            label: label.into(),
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MubSet {
    pub dimension: usize,
    pub bases: Vec<MubBasis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MubCheck {
    pub unbiased: bool,
    pub max_deviation: f64,
}

/// `max_{i,j} | |⟨i|V†U|j⟩|² − 1/N |` against [`MUB_TOLERANCE`].
pub fn check_mub(u: &MubBasis, v: &MubBasis) -> Result<MubCheck> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: v.dim(),
        });
    }
    let target = 1.0 / u.dim() as f64;
    let max_deviation = v
        .matrix
        .adjoint_times(&u.matrix)
        .iter()
        .map(|z| (z.norm_sqr() - target).abs())
        .fold(0.0, f64::max);
    Ok(MubCheck {
        unbiased: max_deviation <= MUB_TOLERANCE,
        max_deviation,
    })
}

impl MubSet {
    /// Largest pairwise deviation over all distinct pairs.
    pub fn max_deviation(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, u) in self.bases.iter().enumerate() {
            for v in &self.bases[a + 1..] {
                worst = worst.max(check_mub(u, v)?.max_deviation);
            }
        }
        Ok(worst)
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mub_complete_set(n: usize) -> Result<MubSet> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "MUB dimension",
            value: n,
            min: 2,
            max: usize::MAX,
        });
    }
    let mut bases = vec![MubBasis::new("computational", UnitaryMatrix::identity(n))?];
    match n {
        2 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let x = UnitaryMatrix::from_columns(&[
                vec![c(h, 0.0), c(h, 0.0)],
                vec![c(h, 0.0), c(-h, 0.0)],
            ])?;
            let y = UnitaryMatrix::from_columns(&[
                vec![c(h, 0.0), c(0.0, h)],
                vec![c(h, 0.0), c(0.0, -h)],
            ])?;
            bases.push(MubBasis::new("x", x)?);
            bases.push(MubBasis::new("y", y)?);
        }
        4 => {
            for (r, rows) in TWO_QUBIT_TABLE.iter().enumerate() {
                let columns: Vec<Vec<Complex64>> = rows
                    .split(' ')
                    .map(|col| col.chars().map(phase).map(|z| z * 0.5).collect())
                    .collect();
                bases.push(MubBasis::new(
                    format!("table-{}", r + 1),
                    UnitaryMatrix::from_columns(&columns)?,
                )?);
            }
        }
        p if is_prime(p) => {
            // column a of basis r: ω^{r j² + a j} / √p
            let norm = 1.0 / (p as f64).sqrt();
            for r in 0..p {
                let columns: Vec<Vec<Complex64>> = (0..p)
                    .map(|a| {
                        (0..p)
                            .map(|j| {
                                let e = (r * j * j + a * j) % p;
                                Complex64::from_polar(norm, 2.0 * PI * e as f64 / p as f64)
                            })
                            .collect()
                    })
                    .collect();
                bases.push(MubBasis::new(
                    format!("quadratic-{r}"),
                    UnitaryMatrix::from_columns(&columns)?,
                )?);
            }
        }
        _ => return Err(Error::UnsupportedMubDimension(n)),
    }
    Ok(MubSet {
        dimension: n,
        bases,
    })
}

// Columns as phase strings over {+, -, i, j = −i}, each scaled by 1/2.
const TWO_QUBIT_TABLE: [&str; 4] = [
    "++++ ++-- +-+- +--+",
    "++ij ++ji +-ii +-jj",
    "+i+j +i-i +j+i +j-j",
    "+ii- +ij+ +ji+ +jj-",
];

fn phase(ch: char) -> Complex64 {
    match ch {
        '+' => c(1.0, 0.0),
        '-' => c(-1.0, 0.0),
        'i' => c(0.0, 1.0),
        'j' => c(0.0, -1.0),
        _ => unreachable!("invalid phase symbol"),
    }
}
