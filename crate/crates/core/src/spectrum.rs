//! Observables represented by their spectra.
//!
//! Every Haar statistic of `⟨ψ|O|ψ⟩` depends only on the distinct eigenvalues
//! and their multiplicities, so an observable is never stored as a matrix.
//! [`EigenAssignment`] fixes which basis state carries which eigenvalue and is
//! what permutations act on.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::binomial;
use crate::stats::compensated_sum;

/// Largest supported Hilbert-space dimension (dense arrays).
pub const MAX_DIMENSION: usize = 1 << 20;
/// Largest supported qubit count.
pub const MAX_QUBITS: u32 = 20;

/// Distinct non-negative eigenvalues with positive multiplicities, kept in
/// ascending eigenvalue order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<u64>,
    dimension: usize,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<u64>,
}

impl TryFrom<SpectrumRepr> for Spectrum {
    type Error = Error;

    fn try_from(r: SpectrumRepr) -> Result<Self> {
        Spectrum::new(&r.eigenvalues, &r.multiplicities)
    }
}

impl From<Spectrum> for SpectrumRepr {
    fn from(s: Spectrum) -> Self {
        SpectrumRepr {
            eigenvalues: s.eigenvalues,
            multiplicities: s.multiplicities,
        }
    }
}

impl Spectrum {
    pub fn new(eigenvalues: &[f64], multiplicities: &[u64]) -> Result<Self> {
        if eigenvalues.is_empty() && multiplicities.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if eigenvalues.len() != multiplicities.len() {
            return Err(Error::LengthMismatch {
                eigenvalues: eigenvalues.len(),
                multiplicities: multiplicities.len(),
            });
        }
        if let Some(&bad) = eigenvalues.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidEigenvalue(bad));
        }
        if let Some(pos) = multiplicities.iter().position(|&m| m == 0) {
            return Err(Error::NonPositiveMultiplicity(pos));
        }
        let mut pairs: Vec<(f64, u64)> = eigenvalues
            .iter()
            .copied()
            .zip(multiplicities.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateEigenvalue(w[0].0));
        }
        let total: u128 = multiplicities.iter().map(|&m| m as u128).sum();
        if total > MAX_DIMENSION as u128 {
            return Err(Error::DimensionTooLarge(
                total.min(usize::MAX as u128) as usize
            ));
        }
        let dimension = total as usize;
        let (eigenvalues, multiplicities) = pairs.into_iter().unzip();
        Ok(Spectrum {
            eigenvalues,
            multiplicities,
            dimension,
        })
    }

    /// Spectrum of `Σ_k (1 − Z_k)/2` on `n` qubits: eigenvalue `k` (the
    /// Hamming weight) with multiplicity `C(n, k)`.
    pub fn number_operator(n: u32) -> Result<Self> {
        check_qubits(n)?;
        let eigenvalues: Vec<f64> = (0..=n).map(f64::from).collect();
        let multiplicities: Vec<u64> = (0..=n)
            .map(|k| binomial(n as u64, k as u64) as u64)
            .collect();
        Spectrum::new(&eigenvalues, &multiplicities)
    }

    /// Scalar observable `c·I` on dimension `n`.
    pub fn constant(c: f64, n: u64) -> Result<Self> {
        Spectrum::new(&[c], &[n])
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    /// Number of distinct eigenvalues (G).
    pub fn distinct(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Hilbert-space dimension (N).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn min_multiplicity(&self) -> u64 {
        self.multiplicities.iter().copied().min().unwrap_or(1)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is non-empty")
    }

    /// `Tr O = Σ λ_i m_i`
    pub fn trace(&self) -> f64 {
        compensated_sum(
            self.eigenvalues
                .iter()
                .zip(&self.multiplicities)
                .map(|(&l, &m)| l * m as f64),
        )
    }

    /// Canonical diagonal form: each eigenvalue repeated by its multiplicity,
    /// ascending.
    pub fn expand(&self) -> EigenAssignment {
        let values = self
            .eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&l, &m)| std::iter::repeat_n(l, m as usize))
            .collect();
        EigenAssignment { values }
    }
}

fn check_qubits(n: u32) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::OutOfRange {
            what: "qubit count",
            value: n as usize,
            min: 1,
            max: MAX_QUBITS as usize,
        });
    }
    Ok(())
}

/// Eigenvalue carried by each basis state `|i⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EigenAssignment {
    values: Vec<f64>,
}

impl EigenAssignment {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if values.len() > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge(values.len()));
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidEigenvalue(bad));
        }
        Ok(EigenAssignment { values })
    }

    /// The number operator in the computational basis: `|i⟩` carries the
    /// Hamming weight of `i`.
    pub fn number_operator(n: u32) -> Result<Self> {
        check_qubits(n)?;
        let values = (0..1usize << n).map(|i| i.count_ones() as f64).collect();
        Ok(EigenAssignment { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Collapse to distinct values and their counts.
    pub fn collapse(&self) -> Spectrum {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<u64> = Vec::new();
        for v in sorted {
            match eigenvalues.last() {
                Some(&last) if last == v => *multiplicities.last_mut().unwrap() += 1,
                _ => {
                    eigenvalues.push(v);
                    multiplicities.push(1);
                }
            }
        }
        Spectrum::new(&eigenvalues, &multiplicities).expect("collapsed assignment is valid")
    }

    /// `Π O Π`: entry `i` of the result is entry `p(i)` of `self`.
    pub fn permute(&self, p: &Permutation) -> Result<EigenAssignment> {
        if p.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: p.len(),
            });
        }
        let values = p.mapping.iter().map(|&j| self.values[j]).collect();
        Ok(EigenAssignment { values })
    }

    /// Diagonal of `O − Π(i↔j) O Π(i↔j)`. Only entries `i` and `j` can be
    /// nonzero: `a_i − a_j` at `i` and `a_j − a_i` at `j`.
    pub fn projector_difference(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        let n = self.dimension();
        let swap = Permutation::transposition(n, i, j)?;
        let swapped = self.permute(&swap)?;
        Ok(self
            .values
            .iter()
            .zip(swapped.values())
            .map(|(a, b)| a - b)
            .collect())
    }
}

/// Bijection on `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(mapping: Vec<usize>) -> Result<Self> {
        Permutation::new(mapping)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.mapping
    }
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &j in &mapping {
            if j >= n {
                return Err(Error::InvalidPermutation(format!("entry {j} ≥ length {n}")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPermutation(format!("entry {j} repeated")));
            }
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, dim: n });
            }
        }
        if i == j {
            return Err(Error::DegenerateTransposition(i));
        }
        let mut p = Permutation::identity(n);
        p.mapping.swap(i, j);
        Ok(p)
    }

    /// Uniformly random permutation (Fisher–Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = Permutation::identity(n);
        p.mapping.shuffle(rng);
        p
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }
}
