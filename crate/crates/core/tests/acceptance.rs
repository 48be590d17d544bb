//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

mod common;

use std::time::Instant;

use clap::Parser;
use haar_sentinel::cli::{run, Cli};
use haar_sentinel::ensembles::{generate_expectation_samples, sample_haar_state};
use haar_sentinel::moments::{exact_moment, moment_bounds, required_samples};
use haar_sentinel::mub::{mub_complete_set, MUB_TOLERANCE};
use haar_sentinel::seed;
use haar_sentinel::stats::{ks_one_sample, ks_two_sample};
use haar_sentinel::verify::{
    estimate_moment, observable_randomness, permutation_randomness, Observable, TierOptions,
};
use haar_sentinel::{DirichletParams, EnsembleSpec, Spectrum, Verdict};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{Beta, ContinuousCDF};

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn criterion_1() -> Outcome {
    let s = Spectrum::number_operator(3).unwrap();
    let obs = Observable::number_operator(3).unwrap();
    let spec = EnsembleSpec::haar(8, 0xA11CE).unwrap();
    let samples = generate_expectation_samples(&spec, obs.assignment(), None, 1_000_000).unwrap();
    let mut worst: f64 = 0.0;
    for t in 1..=4 {
        let est = estimate_moment(&samples, t).unwrap();
        let exact = exact_moment(&s, t).unwrap().value;
        worst = worst.max((est.mean - exact).abs() / est.stderr);
    }
    outcome(
        worst <= 5.0,
        format!("max |MC - exact| = {worst:.2} stderr (limit 5)"),
    )
}

fn criterion_2() -> Outcome {
    let s = Spectrum::new(&[0.0, 1.0], &[1, 1]).unwrap();
    let golden = [0.5, 3.0 / 8.0, 5.0 / 16.0, 35.0 / 128.0];
    let mut worst: f64 = 0.0;
    for (i, &g) in golden.iter().enumerate() {
        let t = i as u32 + 1;
        let v = exact_moment(&s, t).unwrap().value;
        let q = common::qubit_moment_quadrature(t);
        worst = worst.max((v - g).abs()).max((q - g).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max deviation from golden/quadrature {worst:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = common::rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = common::random_spectrum(&mut rng, 1);
        let v = exact_moment(&s, 1).unwrap().value;
        let expected = s.trace() / s.dimension() as f64;
        worst = worst.max((v - expected).abs() / expected.abs().max(1.0));
    }
    outcome(
        worst <= 1e-12,
        format!("max relative deviation from Tr/N {worst:.2e} over 100 spectra"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = common::rng(3);
    let mut checked = 0;
    let mut violations = 0;
    for _ in 0..100 {
        let s = common::random_spectrum(&mut rng, 20);
        for t in 1..=4u32 {
            if t as f64 / s.dimension() as f64 > 0.05 {
                continue;
            }
            let b = moment_bounds(&s, t);
            let e = exact_moment(&s, t).unwrap().value;
            checked += 1;
            if !(b.slackened_lower() <= e && e <= b.upper) {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0 && checked > 0,
        format!("{violations} violations in {checked} (spectrum, t) pairs"),
    )
}

fn criterion_5() -> Outcome {
    let s = Spectrum::number_operator(3).unwrap();
    let m = required_samples(&s, 1, 0.01).unwrap();
    let mut scaling = true;
    for eps in [0.5, 0.1, 0.03, 0.01, 0.004] {
        let a = required_samples(&s, 1, eps).unwrap();
        let b = required_samples(&s, 1, eps / 10.0).unwrap();
        scaling &= b == 100 * a;
    }
    outcome(
        m == 225_000 && scaling,
        format!("M(0.01) = {m}, x100 scaling holds: {scaling}"),
    )
}

fn criterion_6() -> Outcome {
    let obs = Observable::number_operator(6).unwrap();
    let opts = TierOptions::new(0.01);
    let mut observable_ok = 0;
    let mut permutation_hits = 0;
    for trial in 0..100u64 {
        let spec = EnsembleSpec::counterexample(6, trial).unwrap();
        let r = observable_randomness(&spec, &obs, 1, 10_000, opts).unwrap();
        if r.verdict == Verdict::Compatible {
            observable_ok += 1;
        }
        let r = permutation_randomness(&spec, &obs, 1, 20, 10_000, trial, opts).unwrap();
        if r.verdict == Verdict::Incompatible {
            permutation_hits += 1;
        }
    }
    outcome(
        observable_ok >= 95 && permutation_hits >= 95,
        format!("observable compatible {observable_ok}/100, permutation incompatible {permutation_hits}/100 (need 95 each)"),
    )
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut counts = true;
    for n in [2usize, 3, 4, 5, 7] {
        let set = mub_complete_set(n).unwrap();
        counts &= set.len() == n + 1;
        // Direct |<u_i|v_j>|^2 = 1/N over every pair of bases and vectors,
        // plus orthonormality inside each basis.
        for (a, u) in set.bases.iter().enumerate() {
            for (b, v) in set.bases.iter().enumerate() {
                for i in 0..n {
                    for j in 0..n {
                        let ip: Complex64 = (0..n)
                            .map(|k| u.matrix.get(k, i).conj() * v.matrix.get(k, j))
                            .sum();
                        let target = if a == b {
                            if i == j {
                                1.0
                            } else {
                                0.0
                            }
                        } else {
                            1.0 / n as f64
                        };
                        worst = worst.max((ip.norm_sqr() - target).abs());
                    }
                }
            }
        }
        worst = worst.max(set.max_deviation().unwrap());
    }
    outcome(
        counts && worst <= MUB_TOLERANCE,
        format!("N+1 bases each: {counts}, max overlap deviation {worst:.2e}"),
    )
}

fn random_partition<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<usize>> {
    let groups = rng.random_range(2..=5usize);
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    let mut parts = vec![Vec::new(); groups];
    for (k, &i) in idx.iter().enumerate() {
        // first `groups` indices seed distinct groups so none is empty
        let g = if k < groups {
            k
        } else {
            rng.random_range(0..groups)
        };
        parts[g].push(i);
    }
    parts
}

fn criterion_8() -> Outcome {
    let params = DirichletParams::symmetric(0.5, 8).unwrap();
    let mut rng = common::rng(8);
    let samples = 100_000;
    let mut passed = 0;
    let mut min_p: f64 = 1.0;
    for k in 0..10u64 {
        let partition = random_partition(&mut rng, 8);
        let aggregated = params.aggregate(&partition).unwrap();
        let mut grouped = vec![Vec::with_capacity(samples); partition.len()];
        let mut direct = vec![Vec::with_capacity(samples); partition.len()];
        let mut a = seed::stream(seed::derive_path(8, &[k, 0]));
        let mut b = seed::stream(seed::derive_path(8, &[k, 1]));
        for _ in 0..samples {
            for (g, v) in params
                .sample(&mut a)
                .aggregate(&partition)
                .into_iter()
                .enumerate()
            {
                grouped[g].push(v);
            }
            for (g, &v) in aggregated.sample(&mut b).coords().iter().enumerate() {
                direct[g].push(v);
            }
        }
        // family-wise 0.01 per partition (Bonferroni over groups)
        let level = 0.01 / partition.len() as f64;
        let mut ok = true;
        for g in 0..partition.len() {
            let ks = ks_two_sample(&grouped[g], &direct[g]);
            min_p = min_p.min((ks.p_value * partition.len() as f64).min(1.0));
            ok &= ks.passes(level);
        }
        passed += ok as usize;
    }
    outcome(
        passed == 10,
        format!("{passed}/10 partitions pass, min adjusted p = {min_p:.3}"),
    )
}

fn criterion_9() -> Outcome {
    let samples = 100_000;
    let mut all = true;
    let mut details = Vec::new();
    for n in [2usize, 4, 8] {
        let beta = Beta::new(0.5, (n as f64 - 1.0) / 2.0).unwrap();
        let mut columns = vec![Vec::with_capacity(samples); n];
        for i in 0..samples as u64 {
            let mut rng = seed::stream(seed::derive_path(9, &[n as u64, i]));
            let psi = sample_haar_state(n, &mut rng).unwrap();
            for (c, p) in psi.probabilities().into_iter().enumerate() {
                columns[c].push(p);
            }
        }
        // family-wise 0.01 per dimension (Bonferroni over coordinates)
        let level = 0.01 / n as f64;
        let mut min_p: f64 = 1.0;
        for col in &columns {
            let ks = ks_one_sample(col, |x| beta.cdf(x));
            min_p = min_p.min((ks.p_value * n as f64).min(1.0));
            all &= ks.passes(level);
        }
        details.push(format!("N={n} min adjusted p {min_p:.3}"));
    }
    outcome(all, details.join(", "))
}

fn run_verify(
    dir: &std::path::Path,
    config: &std::path::Path,
    threads: usize,
    tag: &str,
) -> String {
    let out = dir.join(format!("report-{tag}.json"));
    let cli = Cli::try_parse_from([
        "haar-sentinel",
        "--threads",
        &threads.to_string(),
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    run(cli).unwrap();
    std::fs::read_to_string(out).unwrap()
}

fn without_meta(report: &str) -> String {
    let v: serde_json::Value = serde_json::from_str(report).unwrap();
    assert!(v.get("meta").is_some());
    let raw = report.split("\"meta\"").next().unwrap().to_string();
    raw + &serde_json::to_string(&v["reports"]).unwrap()
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("campaign.json");
    std::fs::write(
        &config,
        r#"{
  "spectrum": {"eigenvalues": [0, 1, 2], "multiplicities": [1, 2, 1]},
  "ensemble": {"kind": "haar", "N": 4, "seed": 1},
  "tiers": ["observable", "permutation", "mub"],
  "t": "1..2",
  "epsilon": 0.05,
  "M": 2000,
  "M_perm": 3,
  "M_u": 3,
  "seed": 20261017,
  "assignment": "popcount"
}"#,
    )
    .unwrap();
    let runs = [
        run_verify(dir.path(), &config, 1, "a1"),
        run_verify(dir.path(), &config, 1, "b1"),
        run_verify(dir.path(), &config, 8, "a8"),
        run_verify(dir.path(), &config, 8, "b8"),
    ];
    let stripped: Vec<String> = runs.iter().map(|r| without_meta(r)).collect();
    let identical = stripped.windows(2).all(|w| w[0] == w[1]);
    outcome(
        identical,
        format!("4 runs (threads 1,1,8,8) byte-identical outside meta: {identical}"),
    )
}

fn main() {
    let criteria: [(u32, &str, Check); 10] = [
        (1, "exact moment vs 1e6 Haar samples", criterion_1),
        (2, "qubit golden values", criterion_2),
        (3, "first-moment identity", criterion_3),
        (4, "bound sandwich", criterion_4),
        (5, "sample-complexity arithmetic", criterion_5),
        (6, "counterexample separation", criterion_6),
        (7, "MUB validity", criterion_7),
        (8, "Dirichlet aggregation KS", criterion_8),
        (9, "Haar marginals KS", criterion_9),
        (10, "verify determinism", criterion_10),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        println!(
            "{} criterion {id:>2} ({name}): {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
