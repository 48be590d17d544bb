//! Dirichlet distribution: sampling, exact mixed moments, aggregation.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::special::{ln_gamma_pos, ln_rising};
use crate::stats::compensated_sum;

/// Concentration parameters `α` with cached `α_0 = Σ α_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
    alpha0: f64,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidArgument(
                "Dirichlet needs at least one component".into(),
            ));
        }
        if let Some(&bad) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidAlpha(bad));
        }
        let alpha0 = compensated_sum(alpha.iter().copied());
        Ok(DirichletParams { alpha, alpha0 })
    }

    /// `Dir(c·1_d)`
    pub fn symmetric(c: f64, d: usize) -> Result<Self> {
        DirichletParams::new(vec![c; d])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Draw a point on the simplex by normalising independent `Gamma(α_i, 1)`
    /// variates. Components may underflow to exactly zero for small `α_i`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SimplexPoint {
        let gammas: Vec<Gamma<f64>> = self
            .alpha
            .iter()
            .map(|&a| Gamma::new(a, 1.0).expect("alpha validated at construction"))
            .collect();
        loop {
            let mut x: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
            let total: f64 = x.iter().sum();
            // every component underflowed: vanishingly rare, redraw
            if !(total > 0.0 && total.is_finite()) {
                continue;
            }
            let inv = 1.0 / total;
            x.iter_mut().for_each(|v| *v *= inv);
            return SimplexPoint { x };
        }
    }

    /// `E[Π x_i^{k_i}] = Γ(α_0)/Γ(α_0 + k_0) · Π Γ(α_i + k_i)/Γ(α_i)`,
    /// accumulated in log space and exponentiated once.
    pub fn mixed_moment(&self, k: &[u64]) -> Result<f64> {
        if k.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                actual: k.len(),
            });
        }
        let k0: u64 = k.iter().sum();
        let ln = self
            .alpha
            .iter()
            .zip(k)
            .map(|(&a, &ki)| ln_rising(a, ki))
            .sum::<f64>()
            - ln_rising(self.alpha0, k0);
        Ok(ln.exp())
    }

    /// Sum the parameters within each group of `partition`.
    pub fn aggregate(&self, partition: &[Vec<usize>]) -> Result<DirichletParams> {
        let d = self.alpha.len();
        let mut seen = vec![false; d];
        for &i in partition.iter().flatten() {
            if i >= d || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPartition(d));
            }
        }
        if seen.iter().any(|s| !s) || partition.iter().any(|g| g.is_empty()) {
            return Err(Error::InvalidPartition(d));
        }
        let alpha = partition
            .iter()
            .map(|g| compensated_sum(g.iter().map(|&i| self.alpha[i])))
            .collect();
        DirichletParams::new(alpha)
    }

    /// Log-density on the simplex interior.
    pub fn ln_pdf(&self, x: &SimplexPoint) -> Result<f64> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: x.len(),
            });
        }
        let norm =
            ln_gamma_pos(self.alpha0) - self.alpha.iter().map(|&a| ln_gamma_pos(a)).sum::<f64>();
        Ok(norm
            + self
                .alpha
                .iter()
                .zip(x.coords())
                .map(|(&a, &xi)| (a - 1.0) * xi.ln())
                .sum::<f64>())
    }
}

/// Probability vector: non-negative, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    x: Vec<f64>,
}

impl SimplexPoint {
    pub const SUM_TOLERANCE: f64 = 1e-10;

    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSimplexPoint(
                "negative or non-finite entry".into(),
            ));
        }
        let total: f64 = compensated_sum(x.iter().copied());
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidSimplexPoint(format!("sum is {total}")));
        }
        Ok(SimplexPoint { x })
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.x
    }

    /// Sum coordinates within each group.
    pub fn aggregate(&self, partition: &[Vec<usize>]) -> Vec<f64> {
        partition
            .iter()
            .map(|g| g.iter().map(|&i| self.x[i]).sum())
            .collect()
    }
}
