//! Log-space gamma helpers used by the moment formulas.

use statrs::function::gamma::ln_gamma;

/// Integer increments up to this size go through an explicit sum of logs.
const RISING_DIRECT_LIMIT: u64 = 256;

/// `ln Γ(a + k) − ln Γ(a)`, the log of the rising factorial `(a)_k`.
///
/// Small `k` is summed term by term, which keeps full relative precision even
/// when `ln Γ(a)` itself is large (for `a ≈ 500` the two gamma logs are each
/// around 2.6e3 and their difference would lose three digits).
pub fn ln_rising(a: f64, k: u64) -> f64 {
    debug_assert!(a > 0.0);
    if k == 0 {
        return 0.0;
    }
    if k <= RISING_DIRECT_LIMIT {
        (0..k).map(|j| (a + j as f64).ln()).sum()
    } else {
        ln_gamma(a + k as f64) - ln_gamma(a)
    }
}

/// `ln k!`
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else if k <= RISING_DIRECT_LIMIT {
        (2..=k).map(|j| (j as f64).ln()).sum()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma_pos(x: f64) -> f64 {
    ln_gamma(x)
}

/// Binomial coefficient as `u128`, saturating on overflow.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rising_matches_gamma_ratio() {
        for &a in &[0.5, 1.5, 4.0, 37.5] {
            for k in [0u64, 1, 3, 10] {
                let direct = ln_rising(a, k);
                let via_gamma = ln_gamma(a + k as f64) - ln_gamma(a);
                assert!((direct - via_gamma).abs() < 1e-10, "a={a} k={k}");
            }
        }
        // (1/2)_3 = 1/2 · 3/2 · 5/2
        assert!((ln_rising(0.5, 3).exp() - 1.875).abs() < 1e-14);
    }

    #[test]
    fn rising_switches_branch_smoothly() {
        let a = 2.5;
        let below = ln_rising(a, RISING_DIRECT_LIMIT);
        let above = ln_rising(a, RISING_DIRECT_LIMIT + 1);
        let step = (a + RISING_DIRECT_LIMIT as f64).ln();
        assert!(((above - below) - step).abs() < 1e-9);
    }

    #[test]
    fn factorials() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5).exp() - 120.0).abs() < 1e-11);
        assert!((ln_factorial(300) - ln_gamma(301.0)).abs() < 1e-9);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 1), 4);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u128::MAX);
    }
}
