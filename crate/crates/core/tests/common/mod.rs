#![allow(dead_code)]

use haar_sentinel::Spectrum;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar moment via the power series of `Π_i (1 − λ_i z)^{−m_i/2}`.
///
/// With `p_j = Σ_i (m_i/2) λ_i^{j+1}`, the coefficients obey
/// `(k+1) c_{k+1} = Σ_{j≤k} p_j c_{k−j}` and `μ_t = t!·c_t / (N/2)_t`.
/// Shares no code with the composition sum in the library.
pub fn series_moment(eigenvalues: &[f64], multiplicities: &[u64], t: u32) -> f64 {
    let t = t as usize;
    let n: f64 = multiplicities.iter().map(|&m| m as f64).sum();
    let p: Vec<f64> = (0..t)
        .map(|j| {
            eigenvalues
                .iter()
                .zip(multiplicities)
                .map(|(&l, &m)| m as f64 / 2.0 * l.powi(j as i32 + 1))
                .sum()
        })
        .collect();
    let mut c = vec![1.0f64];
    for k in 0..t {
        let s: f64 = (0..=k).map(|j| p[j] * c[k - j]).sum();
        c.push(s / (k + 1) as f64);
    }
    let mut out = c[t];
    for j in 0..t {
        out *= (j + 1) as f64 / (n / 2.0 + j as f64);
    }
    out
}

/// `(2/π)∫_0^{π/2} sin^{2t}θ dθ` by the periodic trapezoid rule, which is
/// exact for trigonometric polynomials of degree below the node count.
pub fn qubit_moment_quadrature(t: u32) -> f64 {
    let nodes = 4096;
    let h = 2.0 * std::f64::consts::PI / nodes as f64;
    let s: f64 = (0..nodes)
        .map(|k| (k as f64 * h).sin().powi(2 * t as i32))
        .sum();
    s / nodes as f64
}

/// Random spectrum: `G ∈ 1..=6` distinct values in `[0, 10)` on a random
/// composition of `N ∈ [max(G, min_n), 1024]`.
pub fn random_spectrum<R: Rng>(rng: &mut R, min_n: usize) -> Spectrum {
    let g = rng.random_range(1..=6usize);
    let n = rng.random_range(min_n.max(g)..=1024usize);
    let mut cuts: Vec<usize> = sample(rng, n - 1, g - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(g);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        parts.push((c - prev) as u64);
        prev = c;
    }
    let values: Vec<f64> = sample(rng, 1000, g)
        .into_iter()
        .map(|v| v as f64 / 100.0)
        .collect();
    Spectrum::new(&values, &parts).expect("valid random spectrum")
}
