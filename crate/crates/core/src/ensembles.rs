//! State ensembles and expectation values.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::DirichletParams;
use crate::error::{Error, Result};
use crate::seed::{self, domain};
use crate::special::binomial;
use crate::spectrum::{EigenAssignment, Spectrum, MAX_DIMENSION, MAX_QUBITS};
use crate::unitary::UnitaryMatrix;

pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Amplitudes {
    Dense(Vec<Complex64>),
    Sparse {
        dim: usize,
        entries: Vec<(usize, Complex64)>,
    },
}

/// Normalised pure state. Sparse storage is used when only a handful of
/// amplitudes can be nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Amplitudes,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector {
            amps: Amplitudes::Dense(amplitudes),
        })
    }

    pub fn sparse(dim: usize, entries: Vec<(usize, Complex64)>) -> Result<Self> {
        if let Some(&(index, _)) = entries.iter().find(|(i, _)| *i >= dim) {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let norm: f64 = entries.iter().map(|(_, z)| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector {
            amps: Amplitudes::Sparse { dim, entries },
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        StateVector::sparse(dim, vec![(index, Complex64::new(1.0, 0.0))])
    }

    pub fn dimension(&self) -> usize {
        match &self.amps {
            Amplitudes::Dense(v) => v.len(),
            Amplitudes::Sparse { dim, .. } => *dim,
        }
    }

    /// Dense amplitude vector.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        match &self.amps {
            Amplitudes::Dense(v) => v.clone(),
            Amplitudes::Sparse { dim, entries } => {
                let mut v = vec![Complex64::new(0.0, 0.0); *dim];
                for &(i, z) in entries {
                    v[i] += z;
                }
                v
            }
        }
    }

    /// Nonzero-capable `(index, amplitude)` pairs.
    pub fn support(&self) -> Vec<(usize, Complex64)> {
        match &self.amps {
            Amplitudes::Dense(v) => v.iter().copied().enumerate().collect(),
            Amplitudes::Sparse { entries, .. } => entries.clone(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.support().iter().map(|(_, z)| z.norm_sqr()).sum()
    }

    /// Squared amplitudes `|⟨i|ψ⟩|²` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes().iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn scale_phase(&self, phase: Complex64) -> StateVector {
        let amps = match &self.amps {
            Amplitudes::Dense(v) => Amplitudes::Dense(v.iter().map(|z| z * phase).collect()),
            Amplitudes::Sparse { dim, entries } => Amplitudes::Sparse {
                dim: *dim,
                entries: entries.iter().map(|&(i, z)| (i, z * phase)).collect(),
            },
        };
        StateVector { amps }
    }

    fn probability_iter(&self) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match &self.amps {
            Amplitudes::Dense(v) => Box::new(v.iter().map(|z| z.norm_sqr()).enumerate()),
            Amplitudes::Sparse { entries, .. } => {
                Box::new(entries.iter().map(|&(i, z)| (i, z.norm_sqr())))
            }
        }
    }
}

fn check_dimension(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

fn offset_expectation(values: &[f64], probs: impl Iterator<Item = (usize, f64)>) -> f64 {
    // Measured relative to the smallest eigenvalue so a constant observable
    // returns its value exactly and the result never drops below min a.
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, p) in probs {
        num += (values[i] - lo) * p;
        den += p;
    }
    if num == 0.0 {
        return lo;
    }
    (lo + num / den).min(hi)
}

/// `⟨ψ|O|ψ⟩ = Σ_i a_i |⟨i|ψ⟩|²`
pub fn expectation(psi: &StateVector, a: &EigenAssignment) -> Result<f64> {
    check_dimension(a.dimension(), psi.dimension())?;
    Ok(offset_expectation(a.values(), psi.probability_iter()))
}

/// `⟨ψ|U O U†|ψ⟩`: the expectation of `a` after expressing `ψ` in the
/// columns of `basis`, i.e. `Σ_i a_i |⟨u_i|ψ⟩|²`.
pub fn expectation_rotated(
    psi: &StateVector,
    a: &EigenAssignment,
    basis: &UnitaryMatrix,
) -> Result<f64> {
    check_dimension(a.dimension(), psi.dimension())?;
    check_dimension(basis.dim(), psi.dimension())?;
    let rotated = basis.adjoint_apply(&psi.amplitudes());
    Ok(offset_expectation(
        a.values(),
        rotated.iter().map(|z| z.norm_sqr()).enumerate(),
    ))
}

/// Reference random state: a uniform point on the unit sphere of `R^N`,
/// embedded in `C^N`. Its squared amplitudes are exactly `Dir(1/2·1)`, the
/// distribution every Haar moment in this crate is computed from.
///
/// Independent complex Gaussians would instead give `Dir(1·1)`.
pub fn sample_haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    if !(2..=MAX_DIMENSION).contains(&n) {
        return Err(Error::OutOfRange {
            what: "dimension",
            value: n,
            min: 2,
            max: MAX_DIMENSION,
        });
    }
    loop {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            v.iter_mut().for_each(|z| *z *= inv);
            return Ok(StateVector {
                amps: Amplitudes::Dense(v),
            });
        }
    }
}

/// Dirichlet parameters `C(n,k)/2`, `k = 0..=n`, of the counterexample.
pub fn counterexample_params(n: u32) -> Result<DirichletParams> {
    check_qubits(n)?;
    DirichletParams::new(
        (0..=n)
            .map(|k| binomial(n as u64, k as u64) as f64 / 2.0)
            .collect(),
    )
}

/// Basis index of `|0⟩^{⊗k} |1⟩^{⊗(n−k)}`: the low `n − k` bits set.
pub fn counterexample_index(n: u32, k: u32) -> usize {
    (1usize << (n - k)) - 1
}

/// `|ψ⟩ = Σ_k √p_k |0⟩^{⊗k}|1⟩^{⊗(n−k)}` with `p ~ Dir(C(n,k)/2)`.
///
/// The eigenspace weights seen by the computational-basis number operator
/// match the Haar prediction exactly, although the state lives on only
/// `n + 1` basis vectors.
pub fn counterexample_state<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<StateVector> {
    let params = counterexample_params(n)?;
    let p = params.sample(rng);
    let entries = p
        .coords()
        .iter()
        .enumerate()
        .map(|(k, &pk)| {
            (
                counterexample_index(n, k as u32),
                Complex64::new(pk.sqrt(), 0.0),
            )
        })
        .collect();
    Ok(StateVector {
        amps: Amplitudes::Sparse {
            dim: 1 << n,
            entries,
        },
    })
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

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleKind {
    Haar,
    Counterexample {
        n: u32,
    },
    FixedBasisState {
        index: usize,
    },
    /// Real amplitudes `√x` with `x ~ Dir(alpha)`.
    DirichletAmplitudes {
        alpha: DirichletParams,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    kind: EnsembleKind,
    dimension: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn haar(dimension: usize, seed: u64) -> Result<Self> {
        EnsembleSpec::new(EnsembleKind::Haar, dimension, seed)
    }

    pub fn counterexample(n: u32, seed: u64) -> Result<Self> {
        check_qubits(n)?;
        EnsembleSpec::new(EnsembleKind::Counterexample { n }, 1 << n, seed)
    }

    pub fn fixed_basis_state(dimension: usize, index: usize, seed: u64) -> Result<Self> {
        EnsembleSpec::new(EnsembleKind::FixedBasisState { index }, dimension, seed)
    }

    pub fn dirichlet_amplitudes(alpha: DirichletParams, seed: u64) -> Result<Self> {
        let dimension = alpha.len();
        EnsembleSpec::new(EnsembleKind::DirichletAmplitudes { alpha }, dimension, seed)
    }

    pub fn new(kind: EnsembleKind, dimension: usize, seed: u64) -> Result<Self> {
        let range_err = || Error::OutOfRange {
            what: "dimension",
            value: dimension,
            min: 2,
            max: MAX_DIMENSION,
        };
        if !(2..=MAX_DIMENSION).contains(&dimension) {
            return Err(range_err());
        }
        match &kind {
            EnsembleKind::Counterexample { n } => {
                check_qubits(*n)?;
                if dimension != 1usize << n {
                    return Err(Error::InvalidEnsemble(format!(
                        "counterexample on {n} qubits needs N = {}, got {dimension}",
                        1usize << n
                    )));
                }
            }
            EnsembleKind::FixedBasisState { index } if *index >= dimension => {
                return Err(Error::IndexOutOfRange {
                    index: *index,
                    dim: dimension,
                });
            }
            EnsembleKind::DirichletAmplitudes { alpha } if alpha.len() != dimension => {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    actual: alpha.len(),
                });
            }
            _ => {}
        }
        Ok(EnsembleSpec {
            kind,
            dimension,
            seed,
        })
    }

    pub fn kind(&self) -> &EnsembleKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            EnsembleKind::Haar => "haar",
            EnsembleKind::Counterexample { .. } => "counterexample",
            EnsembleKind::FixedBasisState { .. } => "fixed_basis_state",
            EnsembleKind::DirichletAmplitudes { .. } => "dirichlet_amplitudes",
        }
    }

    /// Same ensemble, different root seed.
    pub fn with_seed(&self, seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            seed,
            ..self.clone()
        }
    }

    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<StateVector> {
        match &self.kind {
            EnsembleKind::Haar => sample_haar_state(self.dimension, rng),
            EnsembleKind::Counterexample { n } => counterexample_state(*n, rng),
            EnsembleKind::FixedBasisState { index } => StateVector::basis(self.dimension, *index),
            EnsembleKind::DirichletAmplitudes { alpha } => {
                let x = alpha.sample(rng);
                let entries = x
                    .coords()
                    .iter()
                    .map(|&p| Complex64::new(p.sqrt(), 0.0))
                    .collect();
                Ok(StateVector {
                    amps: Amplitudes::Dense(entries),
                })
            }
        }
    }

    /// State number `index` of the ensemble's deterministic stream.
    pub fn state_at(&self, index: u64) -> Result<StateVector> {
        let mut rng = seed::stream(seed::derive_path(self.seed, &[domain::STATES, index]));
        self.sample_state(&mut rng)
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    big_n: Option<usize>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    params: serde_json::Map<String, serde_json::Value>,
    seed: u64,
}

impl TryFrom<EnsembleRepr> for EnsembleSpec {
    type Error = Error;

    fn try_from(r: EnsembleRepr) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidEnsemble(msg);
        let dimension = match (r.n, r.big_n) {
            (_, Some(big)) => big,
            (Some(n), None) => {
                check_qubits(n)?;
                1usize << n
            }
            (None, None) => return Err(invalid("one of \"n\" or \"N\" is required".into())),
        };
        if let (Some(n), Some(big)) = (r.n, r.big_n) {
            if n > MAX_QUBITS || 1usize << n != big {
                return Err(invalid(format!("n = {n} inconsistent with N = {big}")));
            }
        }
        let kind = match r.kind.as_str() {
            "haar" => EnsembleKind::Haar,
            "counterexample" => {
                let n = r.n.or_else(|| {
                    r.big_n
                        .filter(|d| d.is_power_of_two())
                        .map(|d| d.trailing_zeros())
                });
                EnsembleKind::Counterexample {
                    n: n.ok_or_else(|| invalid("counterexample needs N = 2^n".into()))?,
                }
            }
            "fixed_basis_state" => {
                let index = r
                    .params
                    .get("index")
                    .map(|v| {
                        v.as_u64()
                            .ok_or_else(|| invalid("params.index must be an integer".into()))
                    })
                    .transpose()?
                    .unwrap_or(0) as usize;
                EnsembleKind::FixedBasisState { index }
            }
            "dirichlet_amplitudes" => {
                let alpha = match r.params.get("alpha") {
                    Some(serde_json::Value::Number(c)) => {
                        let c = c.as_f64().unwrap_or(f64::NAN);
                        DirichletParams::symmetric(c, dimension)?
                    }
                    Some(serde_json::Value::Array(xs)) => DirichletParams::new(
                        xs.iter()
                            .map(|x| {
                                x.as_f64()
                                    .ok_or_else(|| invalid("alpha must be numeric".into()))
                            })
                            .collect::<Result<Vec<f64>>>()?,
                    )?,
                    _ => return Err(invalid("dirichlet_amplitudes needs params.alpha".into())),
                };
                EnsembleKind::DirichletAmplitudes { alpha }
            }
            other => return Err(invalid(format!("unknown ensemble kind {other:?}"))),
        };
        EnsembleSpec::new(kind, dimension, r.seed)
    }
}

impl From<&EnsembleSpec> for EnsembleRepr {
    fn from(s: &EnsembleSpec) -> Self {
        let mut params = serde_json::Map::new();
        let (n, big_n) = match &s.kind {
            EnsembleKind::Counterexample { n } => (Some(*n), None),
            EnsembleKind::FixedBasisState { index } => {
                params.insert("index".into(), (*index).into());
                (None, Some(s.dimension))
            }
            EnsembleKind::DirichletAmplitudes { alpha } => {
                params.insert("alpha".into(), alpha.alpha().to_vec().into());
                (None, Some(s.dimension))
            }
            EnsembleKind::Haar => (None, Some(s.dimension)),
        };
        EnsembleRepr {
            kind: s.kind_name().to_string(),
            n,
            big_n,
            params,
            seed: s.seed,
        }
    }
}

impl Serialize for EnsembleSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        EnsembleRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EnsembleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = EnsembleRepr::deserialize(deserializer)?;
        EnsembleSpec::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// `M` expectation values of `a` (optionally in the rotated frame `basis`).
///
/// Sample `i` draws its state from a stream derived from `(spec.seed, i)`,
/// so the output depends only on the arguments, never on thread count.
pub fn generate_expectation_samples(
    spec: &EnsembleSpec,
    a: &EigenAssignment,
    basis: Option<&UnitaryMatrix>,
    m: usize,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::TooFewSamples {
            what: "samples",
            needed: 1,
            got: 0,
        });
    }
    check_dimension(spec.dimension(), a.dimension())?;
    if let Some(u) = basis {
        check_dimension(spec.dimension(), u.dim())?;
    }
    (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let psi = spec.state_at(i)?;
            match basis {
                Some(u) => expectation_rotated(&psi, a, u),
                None => expectation(&psi, a),
            }
        })
        .collect()
}

/// Squared-amplitude mass of `psi` in each eigenspace of `s`, where `a`
/// places the eigenvalues on basis states. Ordered like `s.eigenvalues()`.
pub fn eigenspace_masses(psi: &StateVector, a: &EigenAssignment, s: &Spectrum) -> Result<Vec<f64>> {
    check_dimension(a.dimension(), psi.dimension())?;
    check_dimension(s.dimension(), a.dimension())?;
    let mut masses = vec![0.0; s.distinct()];
    for (i, z) in psi.support() {
        let v = a.values()[i];
        let g = s
            .eigenvalues()
            .iter()
            .position(|&l| l == v)
            .ok_or_else(|| Error::InvalidArgument(format!("eigenvalue {v} not in spectrum")))?;
        masses[g] += z.norm_sqr();
    }
    Ok(masses)
}

/// Ensemble mean of [`eigenspace_masses`] over `m` states.
pub fn mean_eigenspace_masses(
    spec: &EnsembleSpec,
    a: &EigenAssignment,
    s: &Spectrum,
    m: usize,
) -> Result<Vec<f64>> {
    let per_state: Vec<Vec<f64>> = (0..m as u64)
        .into_par_iter()
        .map(|i| eigenspace_masses(&spec.state_at(i)?, a, s))
        .collect::<Result<_>>()?;
    let mut mean = vec![0.0; s.distinct()];
    for masses in &per_state {
        for (acc, x) in mean.iter_mut().zip(masses) {
            *acc += x;
        }
    }
    mean.iter_mut().for_each(|x| *x /= m as f64);
    Ok(mean)
}
