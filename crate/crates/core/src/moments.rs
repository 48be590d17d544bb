//! Closed-form Haar moments of `⟨ψ|O|ψ⟩`.
//!
//! Under the Haar measure the eigenspace weights of `|ψ⟩` follow
//! `Dir(m/2)`, so `μ_t(O) = E[(λ·x)^t]` expands by the multinomial theorem
//! into a sum of Dirichlet mixed moments over all compositions `k` of `t`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{binomial, ln_factorial, ln_rising};
use crate::spectrum::Spectrum;
use crate::stats::CompensatedSum;

/// Default cap on the number of multinomial terms in [`exact_moment`].
pub const DEFAULT_TERM_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub t: u32,
    pub value: f64,
    pub method: MomentMethod,
}

/// Stirling-type bounds around `base = (Tr O / N)^t`.
///
/// `lower` is reported as `base`; the unquantified `O(t/N)` correction of
/// the lower bound is exposed separately as `lower_slack = 10 t / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBounds {
    pub t: u32,
    pub lower: f64,
    pub upper: f64,
    pub base: f64,
    pub lower_slack: f64,
}

impl MomentBounds {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    /// `lower · (1 − lower_slack)`, the loosest lower bound used in checks.
    pub fn slackened_lower(&self) -> f64 {
        self.lower * (1.0 - self.lower_slack)
    }
}

/// All `k ∈ ℕ^G` with `Σ k = t` and `k_i = 0` wherever the mask is false,
/// in reverse lexicographic order over the active positions.
pub struct Compositions {
    active: Vec<usize>,
    width: usize,
    parts: Vec<u64>,
    done: bool,
}

pub fn compositions(t: u64, support_mask: &[bool]) -> Compositions {
    let active: Vec<usize> = support_mask
        .iter()
        .enumerate()
        .filter_map(|(i, &on)| on.then_some(i))
        .collect();
    let mut parts = vec![0; active.len()];
    let done = if let Some(first) = parts.first_mut() {
        *first = t;
        false
    } else {
        t != 0
    };
    Compositions {
        active,
        width: support_mask.len(),
        parts,
        done,
    }
}

/// Number of compositions of `t` into `g` non-negative parts,
/// `C(t + g − 1, g − 1)`.
pub fn composition_count(t: u64, g: usize) -> u128 {
    match g {
        0 => u128::from(t == 0),
        _ => binomial(t + g as u64 - 1, g as u64 - 1),
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let mut out = vec![0; self.width];
        for (&slot, &k) in self.active.iter().zip(&self.parts) {
            out[slot] = k;
        }
        let g = self.parts.len();
        match (0..g.saturating_sub(1)).rev().find(|&i| self.parts[i] > 0) {
            Some(i) => {
                let tail = std::mem::take(&mut self.parts[g - 1]);
                self.parts[i] -= 1;
                self.parts[i + 1] = tail + 1;
            }
            None => self.done = true,
        }
        Some(out)
    }
}

/// Exact `μ_t(O)` with the default term budget.
pub fn exact_moment(s: &Spectrum, t: u32) -> Result<MomentValue> {
    exact_moment_with_budget(s, t, DEFAULT_TERM_BUDGET)
}

/// Exact `μ_t(O)`:
///
/// `Σ_{|k|=t} t!/Π k_i! · Π λ_i^{k_i} · Γ(N/2)/Γ(N/2+t) · Π Γ(m_i/2+k_i)/Γ(m_i/2)`
///
/// Zero eigenvalues are pruned from the composition support. Each term is
/// assembled in log space and exponentiated once; the terms are accumulated
/// with compensated summation, split by the value of the first active part so
/// the partial sums can run in parallel and still combine deterministically.
pub fn exact_moment_with_budget(s: &Spectrum, t: u32, budget: u64) -> Result<MomentValue> {
    let mask: Vec<bool> = s.eigenvalues().iter().map(|&l| l != 0.0).collect();
    let active: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    let terms = composition_count(t as u64, active.len());
    if terms > budget as u128 {
        return Err(Error::TermBudgetExceeded { terms, budget });
    }
    if t == 0 {
        return Ok(MomentValue {
            t,
            value: 1.0,
            method: MomentMethod::Exact,
        });
    }
    if active.is_empty() {
        return Ok(MomentValue {
            t,
            value: 0.0,
            method: MomentMethod::Exact,
        });
    }

    let tk = t as usize;
    let half_n = s.dimension() as f64 / 2.0;
    let common = ln_factorial(t as u64) - ln_rising(half_n, t as u64);
    // table[a][k] = k ln λ + ln (m/2)_k − ln k!   for active position a
    let table: Vec<Vec<f64>> = active
        .iter()
        .map(|&i| {
            let ln_l = s.eigenvalues()[i].ln();
            let half_m = s.multiplicities()[i] as f64 / 2.0;
            (0..=tk)
                .map(|k| {
                    let k = k as u64;
                    k as f64 * ln_l + ln_rising(half_m, k) - ln_factorial(k)
                })
                .collect()
        })
        .collect();

    let rest_mask = vec![true; active.len() - 1];
    let partials: Vec<CompensatedSum> = (0..=t as u64)
        .into_par_iter()
        .map(|first| {
            let mut acc = CompensatedSum::new();
            let head = common + table[0][first as usize];
            for k in compositions(t as u64 - first, &rest_mask) {
                let ln_term = head
                    + k.iter()
                        .enumerate()
                        .map(|(a, &ki)| table[a + 1][ki as usize])
                        .sum::<f64>();
                acc.add(ln_term.exp());
            }
            acc
        })
        .collect();
    let mut total = CompensatedSum::new();
    for p in &partials {
        total.merge(p);
    }
    Ok(MomentValue {
        t,
        value: total.value(),
        method: MomentMethod::Exact,
    })
}

/// `1 + (3/8)·G / (min m)²`, the spectral factor shared by the bounds and the
/// sample-complexity formulas.
pub fn spectral_factor(s: &Spectrum) -> f64 {
    let min_m = s.min_multiplicity() as f64;
    1.0 + 0.375 * s.distinct() as f64 / (min_m * min_m)
}

pub fn moment_bounds(s: &Spectrum, t: u32) -> MomentBounds {
    let base = (s.trace() / s.dimension() as f64).powi(t as i32);
    let min_m = s.min_multiplicity() as f64;
    let tt = (t as f64) * (t as f64);
    let upper = base * (1.0 + tt + 0.375 * tt * s.distinct() as f64 / (min_m * min_m));
    MomentBounds {
        t,
        lower: base,
        upper,
        base,
        lower_slack: 10.0 * t as f64 / s.dimension() as f64,
    }
}

/// Haar variance of `⟨ψ|O|ψ⟩^t`: `μ_{2t} − μ_t²`, clamped at zero.
pub fn haar_variance(s: &Spectrum, t: u32) -> Result<f64> {
    haar_variance_with_budget(s, t, DEFAULT_TERM_BUDGET)
}

pub fn haar_variance_with_budget(s: &Spectrum, t: u32, budget: u64) -> Result<f64> {
    let hi = exact_moment_with_budget(s, 2 * t, budget)?.value;
    let lo = exact_moment_with_budget(s, t, budget)?.value;
    Ok((hi - lo * lo).max(0.0))
}

/// Monte Carlo sample count needed to resolve `R_t` to tolerance `epsilon`:
///
/// `M ≥ (2t/ε · (Tr O/N)^t)² · (1 + (3/8) G / (min m)²)`
///
/// Saturates at `u64::MAX`.
pub fn required_samples(s: &Spectrum, t: u32, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let base = (s.trace() / s.dimension() as f64).powi(t as i32);
    let scale = 2.0 * t as f64 * base;
    let x = scale * scale * spectral_factor(s) / (epsilon * epsilon);
    // an exact integer must not be pushed up by one ulp of rounding
    let nearest = x.round();
    let m = if (x - nearest).abs() <= 1e-12 * x.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    Ok(if m >= u64::MAX as f64 {
        u64::MAX
    } else {
        m as u64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit() -> Spectrum {
        Spectrum::new(&[0.0, 1.0], &[1, 1]).unwrap()
    }

    #[test]
    fn composition_examples() {
        let all: Vec<Vec<u64>> = compositions(2, &[true, true]).collect();
        assert_eq!(all, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let zero: Vec<Vec<u64>> = compositions(0, &[true; 5]).collect();
        assert_eq!(zero, vec![vec![0; 5]]);
        let masked: Vec<Vec<u64>> = compositions(3, &[true, false, true]).collect();
        assert_eq!(masked.len(), 4);
        assert!(masked
            .iter()
            .all(|k| k[1] == 0 && k.iter().sum::<u64>() == 3));
        assert_eq!(compositions(2, &[false, false]).count(), 0);
        assert_eq!(compositions(0, &[false]).count(), 1);
        assert_eq!(compositions(4, &[true]).collect::<Vec<_>>(), vec![vec![4]]);
    }

    #[test]
    fn composition_counts_match_stars_and_bars() {
        for t in 0..7u64 {
            for g in 1..6usize {
                let n = compositions(t, &vec![true; g]).count() as u128;
                assert_eq!(n, composition_count(t, g), "t={t} g={g}");
            }
        }
    }

    #[test]
    fn qubit_moments() {
        let s = qubit();
        let m = |t| exact_moment(&s, t).unwrap().value;
        assert!((m(1) - 0.5).abs() < 1e-15);
        assert!((m(2) - 0.375).abs() < 1e-15);
        assert!((m(3) - 0.3125).abs() < 1e-15);
        assert_eq!(exact_moment(&s, 2).unwrap().method, MomentMethod::Exact);
    }

    #[test]
    fn term_budget_is_enforced() {
        let s = Spectrum::number_operator(10).unwrap();
        let err = exact_moment_with_budget(&s, 6, 100).unwrap_err();
        // zero eigenvalue pruned: 10 active levels, C(15, 9) = 5005 terms
        assert_eq!(
            err,
            Error::TermBudgetExceeded {
                terms: 5005,
                budget: 100
            }
        );
        assert!(exact_moment_with_budget(&s, 6, 5005).is_ok());
    }

    #[test]
    fn zero_observable() {
        let s = Spectrum::constant(0.0, 4).unwrap();
        assert_eq!(exact_moment(&s, 3).unwrap().value, 0.0);
        assert_eq!(exact_moment(&s, 0).unwrap().value, 1.0);
    }

    #[test]
    fn bounds_examples() {
        let s = Spectrum::number_operator(3).unwrap();
        let b = moment_bounds(&s, 2);
        assert_eq!(b.base, 2.25);
        assert_eq!(b.upper, 24.75);
        assert_eq!(b.lower, b.base);
        let c = Spectrum::constant(1.7, 12).unwrap();
        for t in 1..5 {
            let b = moment_bounds(&c, t);
            let e = exact_moment(&c, t).unwrap().value;
            assert!((b.base - 1.7f64.powi(t as i32)).abs() < 1e-12);
            assert!(b.slackened_lower() <= e && e <= b.upper);
        }
        let q = moment_bounds(&qubit(), 1);
        assert_eq!(q.base, 0.5);
        assert!(q.lower <= 0.5 && 0.5 <= q.upper);
    }

    #[test]
    fn variance_examples() {
        let s = qubit();
        assert!((haar_variance(&s, 1).unwrap() - 0.125).abs() < 1e-15);
        let mu4 = 35.0 / 128.0;
        assert!((haar_variance(&s, 2).unwrap() - (mu4 - 0.375 * 0.375)).abs() < 1e-15);
        let c = Spectrum::constant(3.0, 5).unwrap();
        assert!(haar_variance(&c, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sample_count_examples() {
        let s = Spectrum::number_operator(3).unwrap();
        assert_eq!(required_samples(&s, 1, 0.01).unwrap(), 225_000);
        let one = Spectrum::constant(1.0, 7).unwrap();
        // G = 1, min m = 7: (2/1)² · (1 + 3/8/49), rounded up
        assert_eq!(required_samples(&one, 1, 1.0).unwrap(), 5);
        let one_dim = Spectrum::constant(1.0, 1).unwrap();
        assert_eq!(
            required_samples(&one_dim, 1, 1.0).unwrap(),
            (4.0f64 * 1.375).ceil() as u64
        );
        assert!(required_samples(&s, 1, 0.0).is_err());
        for eps in [0.01, 0.05, 0.3] {
            let m = required_samples(&s, 1, eps).unwrap();
            assert_eq!(required_samples(&s, 1, eps / 10.0).unwrap(), 100 * m);
        }
    }

    /// The upper bound is a leading-order statement, not a universal one:
    /// a single dominant eigenvalue with multiplicity one breaks it at t = 4.
    #[test]
    fn upper_bound_fails_for_isolated_spike() {
        let s = Spectrum::new(&[0.0, 1.0], &[199, 1]).unwrap();
        let b = moment_bounds(&s, 4);
        let e = exact_moment(&s, 4).unwrap().value;
        assert!(e > b.upper);
        assert!(e / b.base > 90.0);
        assert!((b.upper / b.base - 29.0).abs() < 1e-12);
    }
}
