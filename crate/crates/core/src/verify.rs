//! Verification tiers over sampled expectation values.
//!
//! * observable: `R_t = μ̄_t(O, S) − μ_t(O)`
//! * permutation: `R_t = E_Π[μ̄_t(ΠOΠ, S)] − μ_t(O)` over `M_Π` random
//!   permutations of the eigenbasis
//! * mub: additionally averages over `M_U` bases drawn from a complete set of
//!   mutually unbiased bases
//!
//! Every tier compares `|R_t|` against
//! `δ = (Tr O/N)^t · 2t/√(M_U·M_Π·M) · √(1 + (3/8)·G/(min m)²)`
//! (with `M_U = M_Π = 1` for the lower tiers).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{generate_expectation_samples, EnsembleSpec};
use crate::error::{Error, Result};
use crate::moments::{self, MomentBounds, DEFAULT_TERM_BUDGET};
use crate::mub::{mub_complete_set, MubSet};
use crate::seed::{self, domain};
use crate::spectrum::{EigenAssignment, Permutation, Spectrum};
use crate::stats::compensated_sum;

/// A spectrum together with the basis placement of its eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    spectrum: Spectrum,
    assignment: EigenAssignment,
}

impl Observable {
    /// Eigenvalues placed in ascending order on `|0⟩, |1⟩, …`.
    pub fn canonical(spectrum: Spectrum) -> Self {
        let assignment = spectrum.expand();
        Observable {
            spectrum,
            assignment,
        }
    }

    pub fn from_assignment(assignment: EigenAssignment) -> Self {
        Observable {
            spectrum: assignment.collapse(),
            assignment,
        }
    }

    /// `Σ_k (1 − Z_k)/2` in the computational basis.
    pub fn number_operator(n: u32) -> Result<Self> {
        Ok(Observable::from_assignment(
            EigenAssignment::number_operator(n)?,
        ))
    }

    pub fn new(spectrum: Spectrum, assignment: EigenAssignment) -> Result<Self> {
        if assignment.collapse() != spectrum {
            return Err(Error::InvalidArgument(
                "assignment does not realise the spectrum".into(),
            ));
        }
        Ok(Observable {
            spectrum,
            assignment,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn assignment(&self) -> &EigenAssignment {
        &self.assignment
    }

    pub fn dimension(&self) -> usize {
        self.assignment.dimension()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub t: u32,
    pub mean: f64,
    pub variance: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub stderr: f64,
}

/// `μ̄_t = (1/M) Σ s_i^t` with the `M − 1` variance estimator and
/// `stderr = √(variance/M)`.
pub fn estimate_moment(samples: &[f64], t: u32) -> Result<MomentEstimate> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "samples",
            needed: 2,
            got: samples.len(),
        });
    }
    let m = samples.len();
    let powers: Vec<f64> = samples.iter().map(|s| s.powi(t as i32)).collect();
    let mean = compensated_sum(powers.iter().copied()) / m as f64;
    let variance = compensated_sum(powers.iter().map(|p| (p - mean) * (p - mean))) / (m - 1) as f64;
    Ok(MomentEstimate {
        t,
        mean,
        variance,
        m,
        stderr: (variance / m as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Observable,
    Permutation,
    Mub,
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Tier::Observable => "observable",
            Tier::Permutation => "permutation",
            Tier::Mub => "mub",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Compatible,
    Incompatible,
    Inconclusive,
}

impl Verdict {
    /// `|R| ≤ δ` is compatible; beyond both `δ` and `ε` is incompatible.
    pub fn classify(r: f64, delta: f64, epsilon: f64) -> Verdict {
        let a = r.abs();
        if a <= delta {
            Verdict::Compatible
        } else if a > epsilon {
            Verdict::Incompatible
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaarMomentSource {
    Exact,
    /// Term budget exceeded: bounds midpoint, δ widened by half the width.
    BoundsMidpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "M_perm")]
    pub m_perm: usize,
    #[serde(rename = "M_u")]
    pub m_u: usize,
    pub ensemble: Option<String>,
    pub moment_source: HaarMomentSource,
    pub required_samples: u64,
    /// Empirical standard error of the estimate (for reference; δ does not
    /// use it).
    pub empirical_stderr: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub permutation_seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_permutation_means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomnessReport {
    pub tier: Tier,
    pub t: u32,
    #[serde(rename = "R")]
    pub r: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub mu_haar: f64,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

/// `(Tr O/N)^t · 2t/√(M_U·M_Π·M) · √(1 + (3/8)·G/(min m)²)`
pub fn threshold(s: &Spectrum, t: u32, m: usize, m_perm: usize, m_u: usize) -> f64 {
    let base = (s.trace() / s.dimension() as f64).powi(t as i32);
    let draws = m as f64 * m_perm as f64 * m_u as f64;
    base * 2.0 * t as f64 / draws.sqrt() * moments::spectral_factor(s).sqrt()
}

struct HaarReference {
    mu: f64,
    widening: f64,
    source: HaarMomentSource,
}

fn haar_reference(s: &Spectrum, t: u32, budget: u64) -> Result<HaarReference> {
    match moments::exact_moment_with_budget(s, t, budget) {
        Ok(v) => Ok(HaarReference {
            mu: v.value,
            widening: 0.0,
            source: HaarMomentSource::Exact,
        }),
        Err(Error::TermBudgetExceeded { .. }) => {
            let b: MomentBounds = moments::moment_bounds(s, t);
            Ok(HaarReference {
                mu: b.midpoint(),
                widening: b.half_width(),
                source: HaarMomentSource::BoundsMidpoint,
            })
        }
        Err(e) => Err(e),
    }
}

/// Settings shared by the sampling tiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierOptions {
    pub epsilon: f64,
    pub term_budget: u64,
}

impl TierOptions {
    pub fn new(epsilon: f64) -> Self {
        TierOptions {
            epsilon,
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

fn check_order(t: u32) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidArgument("moment order t must be ≥ 1".into()));
    }
    Ok(())
}

/// Observable tier from raw expectation-value samples.
pub fn average_randomness(
    samples: &[f64],
    s: &Spectrum,
    t: u32,
    epsilon: f64,
) -> Result<RandomnessReport> {
    average_randomness_with(samples, s, t, TierOptions::new(epsilon))
}

pub fn average_randomness_with(
    samples: &[f64],
    s: &Spectrum,
    t: u32,
    opts: TierOptions,
) -> Result<RandomnessReport> {
    check_order(t)?;
    check_epsilon(opts.epsilon)?;
    let est = estimate_moment(samples, t)?;
    let reference = haar_reference(s, t, opts.term_budget)?;
    let r = est.mean - reference.mu;
    let delta = threshold(s, t, est.m, 1, 1) + reference.widening;
    Ok(RandomnessReport {
        tier: Tier::Observable,
        t,
        r,
        delta,
        epsilon: opts.epsilon,
        mu_haar: reference.mu,
        verdict: Verdict::classify(r, delta, opts.epsilon),
        provenance: Provenance {
            seed: None,
            m: est.m,
            m_perm: 1,
            m_u: 1,
            ensemble: None,
            moment_source: reference.source,
            required_samples: moments::required_samples(s, t, opts.epsilon)?,
            empirical_stderr: est.stderr,
            permutation_seeds: Vec::new(),
            basis_labels: Vec::new(),
            per_permutation_means: Vec::new(),
        },
    })
}

/// Observable tier with states drawn from `spec`.
pub fn observable_randomness(
    spec: &EnsembleSpec,
    obs: &Observable,
    t: u32,
    m: usize,
    opts: TierOptions,
) -> Result<RandomnessReport> {
    let samples = generate_expectation_samples(spec, obs.assignment(), None, m)?;
    let mut report = average_randomness_with(&samples, obs.spectrum(), t, opts)?;
    report.provenance.seed = Some(spec.seed);
    report.provenance.ensemble = Some(spec.kind_name().to_string());
    Ok(report)
}

/// One cell of a sampling campaign: a basis (optional), a permuted observable
/// and the moment estimated from its `M` samples.
#[derive(Debug, Clone)]
pub struct CellEstimate {
    pub basis_label: Option<String>,
    pub permutation_seed: Option<u64>,
    pub estimate: MomentEstimate,
}

/// Moment estimates for explicit permutations of `obs`. Cell `p` draws its
/// states from the ensemble reseeded at `(spec.seed, 0, p)`.
pub fn permutation_estimates(
    spec: &EnsembleSpec,
    obs: &Observable,
    permutations: &[Permutation],
    t: u32,
    m: usize,
) -> Result<Vec<MomentEstimate>> {
    permutations
        .iter()
        .enumerate()
        .map(|(p, perm)| {
            let cell = spec.with_seed(seed::derive_path(spec.seed, &[0, p as u64]));
            let a = obs.assignment().permute(perm)?;
            estimate_moment(&generate_expectation_samples(&cell, &a, None, m)?, t)
        })
        .collect()
}

fn random_permutation(n: usize, protocol_seed: u64, basis: u64, p: u64) -> (u64, Permutation) {
    let s = seed::derive_path(protocol_seed, &[domain::PERMUTATIONS, basis, p]);
    (s, Permutation::random(n, &mut seed::stream(s)))
}

#[allow(clippy::too_many_arguments)]
fn combine_cells(
    tier: Tier,
    cells: Vec<CellEstimate>,
    spec: &EnsembleSpec,
    s: &Spectrum,
    t: u32,
    (m, m_perm, m_u): (usize, usize, usize),
    protocol_seed: u64,
    opts: TierOptions,
) -> Result<RandomnessReport> {
    let reference = haar_reference(s, t, opts.term_budget)?;
    let means: Vec<f64> = cells.iter().map(|c| c.estimate.mean).collect();
    let grand = compensated_sum(means.iter().copied()) / means.len() as f64;
    let r = grand - reference.mu;
    let delta = threshold(s, t, m, m_perm, m_u) + reference.widening;
    let empirical_stderr = if means.len() >= 2 {
        let v = compensated_sum(means.iter().map(|x| (x - grand) * (x - grand)))
            / (means.len() - 1) as f64;
        (v / means.len() as f64).sqrt()
    } else {
        cells[0].estimate.stderr
    };
    Ok(RandomnessReport {
        tier,
        t,
        r,
        delta,
        epsilon: opts.epsilon,
        mu_haar: reference.mu,
        verdict: Verdict::classify(r, delta, opts.epsilon),
        provenance: Provenance {
            seed: Some(protocol_seed),
            m,
            m_perm,
            m_u,
            ensemble: Some(spec.kind_name().to_string()),
            moment_source: reference.source,
            required_samples: moments::required_samples(s, t, opts.epsilon)?,
            empirical_stderr,
            permutation_seeds: cells.iter().filter_map(|c| c.permutation_seed).collect(),
            basis_labels: cells.iter().filter_map(|c| c.basis_label.clone()).collect(),
            per_permutation_means: means,
        },
    })
}

fn check_budgets(m: usize, m_perm: usize, m_u: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::TooFewSamples {
            what: "samples per cell",
            needed: 2,
            got: m,
        });
    }
    if m_perm == 0 || m_u == 0 {
        return Err(Error::InvalidArgument("M_perm and M_u must be ≥ 1".into()));
    }
    Ok(())
}

/// Permutation tier with `M_Π` uniformly random permutations drawn from
/// `protocol_seed`.
pub fn permutation_randomness(
    spec: &EnsembleSpec,
    obs: &Observable,
    t: u32,
    m_perm: usize,
    m: usize,
    protocol_seed: u64,
    opts: TierOptions,
) -> Result<RandomnessReport> {
    check_budgets(m, m_perm, 1)?;
    let n = obs.dimension();
    let (seeds, perms): (Vec<u64>, Vec<Permutation>) = (0..m_perm as u64)
        .map(|p| random_permutation(n, protocol_seed, 0, p))
        .unzip();
    let mut report = permutation_randomness_with(spec, obs, &perms, t, m, opts)?;
    report.provenance.seed = Some(protocol_seed);
    report.provenance.permutation_seeds = seeds;
    Ok(report)
}

/// Permutation tier over an explicit permutation list.
pub fn permutation_randomness_with(
    spec: &EnsembleSpec,
    obs: &Observable,
    permutations: &[Permutation],
    t: u32,
    m: usize,
    opts: TierOptions,
) -> Result<RandomnessReport> {
    check_order(t)?;
    check_epsilon(opts.epsilon)?;
    check_budgets(m, permutations.len(), 1)?;
    let estimates = permutation_estimates(spec, obs, permutations, t, m)?;
    let cells = estimates
        .into_iter()
        .map(|estimate| CellEstimate {
            basis_label: None,
            permutation_seed: None,
            estimate,
        })
        .collect();
    combine_cells(
        Tier::Permutation,
        cells,
        spec,
        obs.spectrum(),
        t,
        (m, permutations.len(), 1),
        spec.seed,
        opts,
    )
}

/// MUB tier: `M_U` bases drawn uniformly (with replacement) from the complete
/// set, `M_Π` permutations per basis, `M` states per cell.
#[allow(clippy::too_many_arguments)]
pub fn mub_randomness(
    spec: &EnsembleSpec,
    obs: &Observable,
    t: u32,
    m_u: usize,
    m_perm: usize,
    m: usize,
    protocol_seed: u64,
    opts: TierOptions,
) -> Result<RandomnessReport> {
    check_order(t)?;
    check_epsilon(opts.epsilon)?;
    check_budgets(m, m_perm, m_u)?;
    let n = obs.dimension();
    let set: MubSet = mub_complete_set(n)?;
    let mut cells = Vec::with_capacity(m_u * m_perm);
    for b in 0..m_u as u64 {
        let choice = seed::stream(seed::derive_path(protocol_seed, &[domain::BASES, b]))
            .random_range(0..set.len());
        let basis = &set.bases[choice];
        for p in 0..m_perm as u64 {
            let (perm_seed, perm) = random_permutation(n, protocol_seed, b, p);
            let a = obs.assignment().permute(&perm)?;
            let cell = spec.with_seed(seed::derive_path(spec.seed, &[b, p]));
            let samples = generate_expectation_samples(&cell, &a, Some(&basis.matrix), m)?;
            cells.push(CellEstimate {
                basis_label: Some(basis.label.clone()),
                permutation_seed: Some(perm_seed),
                estimate: estimate_moment(&samples, t)?,
            });
        }
    }
    combine_cells(
        Tier::Mub,
        cells,
        spec,
        obs.spectrum(),
        t,
        (m, m_perm, m_u),
        protocol_seed,
        opts,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationDispersion {
    pub t: u32,
    pub per_perm_moments: Vec<f64>,
    pub dispersion: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Sample variance across permutations of `μ̄_t(ΠOΠ,S) − μ̄_t(O,S)`,
/// compared against `2ε / Tr(O)^{2t}`.
pub fn permutation_dispersion(
    per_perm: &[MomentEstimate],
    baseline: &MomentEstimate,
    s: &Spectrum,
    t: u32,
    epsilon: f64,
) -> Result<PermutationDispersion> {
    if per_perm.len() < 2 {
        return Err(Error::TooFewSamples {
            what: "permutation estimates",
            needed: 2,
            got: per_perm.len(),
        });
    }
    let diffs: Vec<f64> = per_perm.iter().map(|e| e.mean - baseline.mean).collect();
    let k = diffs.len() as f64;
    let mean = compensated_sum(diffs.iter().copied()) / k;
    let dispersion = compensated_sum(diffs.iter().map(|d| (d - mean) * (d - mean))) / (k - 1.0);
    let bound = 2.0 * epsilon / s.trace().powi(2 * t as i32);
    Ok(PermutationDispersion {
        t,
        per_perm_moments: per_perm.iter().map(|e| e.mean).collect(),
        dispersion,
        bound,
        within_bound: dispersion <= bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseCheck {
    /// Inferred parameters, scaled so they sum to `N/2`.
    pub alpha_hat: Vec<f64>,
    pub statistic: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Infers `α̂_i ∝` mean eigenspace mass (normalised to `‖α̂‖₁ = N/2`) and
/// returns `E_{i<j}[(α̂_i − α̂_j − (m_i − m_j)/2)²] / ‖α̂‖₁²`, the pairwise
/// deviation from the Haar prediction `α = m/2`, against `2ε / Tr(O)²`.
pub fn alpha_pairwise_check(
    group_masses: &[f64],
    s: &Spectrum,
    epsilon: f64,
) -> Result<PairwiseCheck> {
    if s.distinct() < 2 {
        return Err(Error::SingleEigenspace);
    }
    if group_masses.len() != s.distinct() {
        return Err(Error::DimensionMismatch {
            expected: s.distinct(),
            actual: group_masses.len(),
        });
    }
    let total: f64 = group_masses.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidArgument(
            "eigenspace masses sum to zero".into(),
        ));
    }
    let half_n = s.dimension() as f64 / 2.0;
    let alpha_hat: Vec<f64> = group_masses.iter().map(|w| w / total * half_n).collect();
    let m = s.multiplicities();
    let g = alpha_hat.len();
    let mut acc = 0.0;
    let mut pairs = 0usize;
    for i in 0..g {
        for j in i + 1..g {
            let d = alpha_hat[i] - alpha_hat[j] - (m[i] as f64 - m[j] as f64) / 2.0;
            acc += d * d;
            pairs += 1;
        }
    }
    let statistic = acc / pairs as f64 / (half_n * half_n);
    let bound = 2.0 * epsilon / s.trace().powi(2);
    Ok(PairwiseCheck {
        alpha_hat,
        statistic,
        bound,
        within_bound: statistic <= bound,
    })
}
