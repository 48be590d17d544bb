//! Command-line front end.
//!
//! Exit codes: 0 success / all compatible, 1 I/O failure, 2 invalid input,
//! 3 term budget exceeded, 4 unsupported MUB dimension, 10 some report
//! incompatible, 11 some report inconclusive (none incompatible).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ensembles::{generate_expectation_samples, EnsembleSpec};
use crate::error::Error;
use crate::moments::{self, DEFAULT_TERM_BUDGET};
use crate::mub::mub_complete_set;
use crate::spectrum::{EigenAssignment, Spectrum};
use crate::verify::{self, Observable, RandomnessReport, Tier, TierOptions, Verdict};

pub const TERM_BUDGET_ENV: &str = "HAAR_SENTINEL_TERM_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_UNSUPPORTED_MUB: i32 = 4;
pub const EXIT_INCOMPATIBLE: i32 = 10;
pub const EXIT_INCONCLUSIVE: i32 = 11;

#[derive(Debug, Parser)]
#[command(
    name = "haar-sentinel",
    version,
    about = "Haar-randomness checks from observable expectation values"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Haar moments of ⟨ψ|O|ψ⟩ for a spectrum.
    Moments(MomentsArgs),
    /// Sample expectation values from an ensemble into a CSV file.
    Generate(GenerateArgs),
    /// Run a verification campaign.
    Verify(VerifyArgs),
    /// Dump or check a complete set of mutually unbiased bases.
    Mub(MubArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MomentMode {
    Exact,
    Bounds,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Spectrum JSON file, or inline JSON.
    #[arg(long)]
    pub spectrum: String,
    /// Orders: `3`, `1..4` (inclusive) or `1,2,5`.
    #[arg(long, value_parser = parse_orders)]
    pub t: Orders,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: MomentMode,
    /// Also write the rows as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Ensemble JSON file, or inline JSON.
    #[arg(long)]
    pub ensemble: String,
    /// Spectrum JSON file, or inline JSON.
    #[arg(long)]
    pub spectrum: String,
    #[arg(short = 'M', long = "samples")]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the ensemble's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `canonical`, `popcount` or a JSON array of per-basis-state eigenvalues.
    #[arg(long)]
    pub assignment: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Campaign JSON file.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_parser = parse_orders)]
    pub t: Option<Orders>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(short = 'M', long = "samples")]
    pub samples: Option<usize>,
    #[arg(long)]
    pub perms: Option<usize>,
    #[arg(long)]
    pub bases: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MubArgs {
    /// Hilbert-space dimension.
    #[arg(long = "N", short = 'N')]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check pairwise unbiasedness and report the worst deviation.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Orders(pub Vec<u32>);

pub fn parse_orders(s: &str) -> std::result::Result<Orders, String> {
    let s = s.trim();
    let bad = || format!("invalid moment orders `{s}`");
    let orders: Vec<u32> = if let Some((lo, hi)) = s.split_once("..") {
        // `a..b` and `a..=b` are both inclusive
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi
            .trim_start_matches('=')
            .trim()
            .parse()
            .map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<std::result::Result<_, _>>()?
    };
    if orders.is_empty() || orders.contains(&0) {
        return Err(bad());
    }
    Ok(Orders(orders))
}

impl<'de> Deserialize<'de> for Orders {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            One(u32),
            List(Vec<u32>),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::One(t) => parse_orders(&t.to_string()),
            Repr::List(v) => {
                parse_orders(&v.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            }
            Repr::Text(s) => parse_orders(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Failure carrying the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TermBudgetExceeded { .. } => EXIT_BUDGET,
            Error::UnsupportedMubDimension(_) => EXIT_UNSUPPORTED_MUB,
            _ => EXIT_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Output of a successful command: exit code plus text for stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.threads {
        Some(0) => Err(CliError::input("--threads must be ≥ 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::input(e.to_string()))?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Moments(a) => cmd_moments(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Mub(a) => cmd_mub(&a),
    }
}

/// Parses `source` as inline JSON when it looks like JSON, otherwise reads it
/// as a path relative to `base`.
fn load_json<T: DeserializeOwned>(source: &str, base: Option<&Path>, what: &str) -> CliResult<T> {
    let trimmed = source.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        source.to_string()
    } else {
        let path = resolve(source, base);
        fs::read_to_string(&path)
            .map_err(|e| CliError::input(format!("{what} {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("invalid {what}: {e}")))
}

fn resolve(path: &str, base: Option<&Path>) -> PathBuf {
    let p = PathBuf::from(path);
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn term_budget() -> CliResult<u64> {
    match std::env::var(TERM_BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::input(format!(
                "{TERM_BUDGET_ENV} must be a non-negative integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_TERM_BUDGET),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub t: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub method: String,
}

pub fn cmd_moments(args: &MomentsArgs) -> CliResult<Outcome> {
    let s: Spectrum = load_json(&args.spectrum, None, "spectrum")?;
    let budget = term_budget()?;
    let mut rows = Vec::with_capacity(args.t.0.len());
    for &t in &args.t.0 {
        rows.push(match args.mode {
            MomentMode::Exact => {
                let v = moments::exact_moment_with_budget(&s, t, budget)?;
                MomentRow {
                    t,
                    value: Some(v.value),
                    lower: None,
                    upper: None,
                    method: "exact".into(),
                }
            }
            MomentMode::Bounds => {
                let b = moments::moment_bounds(&s, t);
                MomentRow {
                    t,
                    value: None,
                    lower: Some(b.lower),
                    upper: Some(b.upper),
                    method: "bounds".into(),
                }
            }
        });
    }
    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&rows).expect("rows serialize");
        write_file(out, &(json + "\n"))?;
    }
    let mut table = String::new();
    match args.mode {
        MomentMode::Exact => {
            let _ = writeln!(table, "{:>4}  {:>24}  method", "t", "value");
            for r in &rows {
                let _ = writeln!(
                    table,
                    "{:>4}  {:>24.17e}  {}",
                    r.t,
                    r.value.unwrap_or(f64::NAN),
                    r.method
                );
            }
        }
        MomentMode::Bounds => {
            let _ = writeln!(
                table,
                "{:>4}  {:>24}  {:>24}  method",
                "t", "lower", "upper"
            );
            for r in &rows {
                let _ = writeln!(
                    table,
                    "{:>4}  {:>24.17e}  {:>24.17e}  {}",
                    r.t,
                    r.lower.unwrap_or(f64::NAN),
                    r.upper.unwrap_or(f64::NAN),
                    r.method
                );
            }
        }
    }
    Ok(Outcome {
        code: EXIT_OK,
        stdout: table,
    })
}

/// How the spectrum's eigenvalues are laid out on the computational basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AssignmentChoice {
    /// `canonical` (ascending) or `popcount` (number operator).
    Named(String),
    Explicit(Vec<f64>),
}

impl Default for AssignmentChoice {
    fn default() -> Self {
        AssignmentChoice::Named("canonical".into())
    }
}

impl AssignmentChoice {
    pub fn parse_arg(s: &str) -> CliResult<Self> {
        if s.trim_start().starts_with('[') {
            serde_json::from_str(s)
                .map(AssignmentChoice::Explicit)
                .map_err(|e| CliError::input(format!("invalid assignment: {e}")))
        } else {
            Ok(AssignmentChoice::Named(s.trim().to_string()))
        }
    }

    pub fn observable(&self, s: &Spectrum) -> CliResult<Observable> {
        let assignment = match self {
            AssignmentChoice::Named(n) if n == "canonical" => s.expand(),
            AssignmentChoice::Named(n) if n == "popcount" => {
                let n_dim = s.dimension();
                if !n_dim.is_power_of_two() {
                    return Err(CliError::input("popcount assignment needs N = 2^n"));
                }
                EigenAssignment::number_operator(n_dim.trailing_zeros())?
            }
            AssignmentChoice::Named(n) => {
                return Err(CliError::input(format!(
                    "unknown assignment `{n}` (expected canonical, popcount or an array)"
                )))
            }
            AssignmentChoice::Explicit(v) => EigenAssignment::new(v.clone())?,
        };
        Ok(Observable::new(s.clone(), assignment)?)
    }
}

fn check_dimensions(spec: &EnsembleSpec, s: &Spectrum) -> CliResult<()> {
    if spec.dimension() != s.dimension() {
        return Err(CliError::input(format!(
            "ensemble dimension {} does not match spectrum dimension {}",
            spec.dimension(),
            s.dimension()
        )));
    }
    Ok(())
}

pub fn cmd_generate(args: &GenerateArgs) -> CliResult<Outcome> {
    let mut spec: EnsembleSpec = load_json(&args.ensemble, None, "ensemble")?;
    let s: Spectrum = load_json(&args.spectrum, None, "spectrum")?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    check_dimensions(&spec, &s)?;
    let choice = match &args.assignment {
        Some(a) => AssignmentChoice::parse_arg(a)?,
        None => AssignmentChoice::default(),
    };
    let obs = choice.observable(&s)?;
    let samples = generate_expectation_samples(&spec, obs.assignment(), None, args.samples)?;
    write_samples(&args.out, &samples)?;
    Ok(Outcome {
        code: EXIT_OK,
        stdout: format!(
            "wrote {} samples to {}\n",
            samples.len(),
            args.out.display()
        ),
    })
}

#[derive(Serialize, Deserialize)]
struct SampleRow {
    sample: f64,
}

pub fn write_samples(path: &Path, samples: &[f64]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for &sample in samples {
        w.serialize(SampleRow { sample })
            .map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a CSV file with a `sample` column, or JSON lines of numbers.
pub fn read_samples(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.trim().parse::<f64>().is_ok() && !first.contains(',') {
        return text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                serde_json::from_str::<f64>(l.trim())
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
            })
            .collect();
    }
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize::<SampleRow>()
        .map(|row| {
            row.map(|r| r.sample)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Either an inline value or a path to a JSON file holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(String),
    Inline(T),
}

impl<T: DeserializeOwned + Clone> Source<T> {
    fn load(&self, base: Option<&Path>, what: &str) -> CliResult<T> {
        match self {
            Source::Inline(v) => Ok(v.clone()),
            Source::Path(p) => {
                let path = resolve(p, base);
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError::input(format!("{what} {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::input(format!("invalid {what}: {e}")))
            }
        }
    }
}

fn default_tiers() -> Vec<Tier> {
    vec![Tier::Observable]
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub spectrum: Source<Spectrum>,
    pub ensemble: Source<EnsembleSpec>,
    #[serde(default = "default_tiers")]
    pub tiers: Vec<Tier>,
    pub t: Orders,
    pub epsilon: f64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "M_perm", default = "one")]
    pub m_perm: usize,
    #[serde(rename = "M_u", default = "one")]
    pub m_u: usize,
    /// Root seed for states, permutations and bases; defaults to the
    /// ensemble's own seed.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub assignment: AssignmentChoice,
    /// Pre-recorded samples for the observable tier (CSV or JSON lines).
    #[serde(default)]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub timestamp: String,
    pub host: String,
    pub threads: usize,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignOutput {
    pub reports: Vec<RandomnessReport>,
    pub meta: RunMeta,
}

fn host_name() -> String {
    std::env::var("HOSTNAME")
        .ok()
        .or_else(|| fs::read_to_string("/etc/hostname").ok())
        .map(|h| h.trim().to_string())
        .filter(|h| !h.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

/// Exit code as a function of the verdicts alone.
pub fn exit_code_for(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    let mut inconclusive = false;
    for v in verdicts {
        match v {
            Verdict::Incompatible => return EXIT_INCOMPATIBLE,
            Verdict::Inconclusive => inconclusive = true,
            Verdict::Compatible => {}
        }
    }
    if inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

/// Loads a campaign file and applies command-line overrides.
pub fn load_campaign(args: &VerifyArgs) -> CliResult<(CampaignConfig, Option<PathBuf>)> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::input(format!("config {}: {e}", args.config.display())))?;
    let mut cfg: CampaignConfig =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("invalid config: {e}")))?;
    if let Some(t) = &args.t {
        cfg.t = t.clone();
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if let Some(m) = args.samples {
        cfg.m = m;
    }
    if let Some(p) = args.perms {
        cfg.m_perm = p;
    }
    if let Some(b) = args.bases {
        cfg.m_u = b;
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    let base = args.config.parent().map(Path::to_path_buf);
    Ok((cfg, base))
}

/// Runs every (tier, t) pair of a campaign in order.
pub fn run_campaign(cfg: &CampaignConfig, base: Option<&Path>) -> CliResult<Vec<RandomnessReport>> {
    let s = cfg.spectrum.load(base, "spectrum")?;
    let mut spec = cfg.ensemble.load(base, "ensemble")?;
    check_dimensions(&spec, &s)?;
    if cfg.tiers.is_empty() {
        return Err(CliError::input("no tiers requested"));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(CliError::input("epsilon must be positive"));
    }
    if cfg.m < 2 || cfg.m_perm == 0 || cfg.m_u == 0 {
        return Err(CliError::input("budgets need M ≥ 2, M_perm ≥ 1, M_u ≥ 1"));
    }
    if cfg.tiers.contains(&Tier::Mub) {
        mub_complete_set(s.dimension())?;
    }
    let seed = cfg.seed.unwrap_or(spec.seed);
    spec.seed = seed;
    let obs = cfg.assignment.observable(&s)?;
    let opts = TierOptions {
        epsilon: cfg.epsilon,
        term_budget: term_budget()?,
    };
    let recorded = match &cfg.samples {
        Some(p) => Some(read_samples(&resolve(&p.to_string_lossy(), base))?),
        None => None,
    };
    let mut reports = Vec::new();
    for &tier in &cfg.tiers {
        for &t in &cfg.t.0 {
            let report = match tier {
                Tier::Observable => match &recorded {
                    Some(samples) => {
                        let mut r = verify::average_randomness_with(samples, &s, t, opts)?;
                        r.provenance.seed = Some(seed);
                        r.provenance.ensemble = Some("recorded".into());
                        r
                    }
                    None => verify::observable_randomness(&spec, &obs, t, cfg.m, opts)?,
                },
                Tier::Permutation => {
                    verify::permutation_randomness(&spec, &obs, t, cfg.m_perm, cfg.m, seed, opts)?
                }
                Tier::Mub => {
                    verify::mub_randomness(&spec, &obs, t, cfg.m_u, cfg.m_perm, cfg.m, seed, opts)?
                }
            };
            reports.push(report);
        }
    }
    Ok(reports)
}

pub fn summary_line(r: &RandomnessReport) -> String {
    let verdict = match r.verdict {
        Verdict::Compatible => "compatible",
        Verdict::Incompatible => "incompatible",
        Verdict::Inconclusive => "inconclusive",
    };
    format!(
        "{:<12} t={:<2} R={:+.6e} delta={:.6e} eps={:.3e} -> {verdict}",
        r.tier, r.t, r.r, r.delta, r.epsilon
    )
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<Outcome> {
    let (cfg, base) = load_campaign(args)?;
    let reports = run_campaign(&cfg, base.as_deref())?;
    let code = exit_code_for(reports.iter().map(|r| r.verdict));
    let output = CampaignOutput {
        reports,
        meta: RunMeta {
            timestamp: chrono::Utc::now().to_rfc3339(),
            host: host_name(),
            threads: rayon::current_num_threads(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
    };
    let json = serde_json::to_string_pretty(&output).expect("reports serialize") + "\n";
    let mut stdout = String::new();
    for r in &output.reports {
        stdout.push_str(&summary_line(r));
        stdout.push('\n');
    }
    match &cfg.out {
        Some(path) => {
            write_file(path, &json)?;
            let _ = writeln!(stdout, "report written to {}", path.display());
        }
        None => stdout.push_str(&json),
    }
    Ok(Outcome { code, stdout })
}

pub fn cmd_mub(args: &MubArgs) -> CliResult<Outcome> {
    let set = mub_complete_set(args.n)?;
    let mut stdout = String::new();
    if args.check {
        let dev = set.max_deviation()?;
        let _ = writeln!(
            stdout,
            "N={} bases={} max_deviation={dev:.3e} {}",
            set.dimension,
            set.len(),
            if dev <= crate::mub::MUB_TOLERANCE {
                "ok"
            } else {
                "FAILED"
            }
        );
        if dev > crate::mub::MUB_TOLERANCE {
            return Err(CliError {
                code: EXIT_INPUT,
                message: stdout,
            });
        }
    }
    let json = serde_json::to_string_pretty(&set).expect("mub set serializes") + "\n";
    match &args.out {
        Some(path) => write_file(path, &json)?,
        None if !args.check => stdout.push_str(&json),
        None => {}
    }
    Ok(Outcome {
        code: EXIT_OK,
        stdout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_syntax() {
        assert_eq!(parse_orders("3").unwrap().0, vec![3]);
        assert_eq!(parse_orders("1..3").unwrap().0, vec![1, 2, 3]);
        assert_eq!(parse_orders("1..=2").unwrap().0, vec![1, 2]);
        assert_eq!(parse_orders("1,4").unwrap().0, vec![1, 4]);
        assert!(parse_orders("0..2").is_err());
        assert!(parse_orders("a").is_err());
        let o: Orders = serde_json::from_str("[1,2]").unwrap();
        assert_eq!(o.0, vec![1, 2]);
        let o: Orders = serde_json::from_str("\"2..3\"").unwrap();
        assert_eq!(o.0, vec![2, 3]);
    }

    #[test]
    fn exit_codes_follow_verdicts() {
        use Verdict::*;
        assert_eq!(exit_code_for([]), 0);
        assert_eq!(exit_code_for([Compatible, Compatible]), 0);
        assert_eq!(exit_code_for([Compatible, Inconclusive]), 11);
        assert_eq!(exit_code_for([Inconclusive, Incompatible]), 10);
        assert_eq!(exit_code_for([Incompatible, Inconclusive]), 10);
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::UnsupportedMubDimension(6)).code, 4);
        assert_eq!(
            CliError::from(Error::TermBudgetExceeded {
                terms: 9,
                budget: 1
            })
            .code,
            3
        );
        assert_eq!(CliError::from(Error::EmptySpectrum).code, 2);
    }

    #[test]
    fn assignment_choices() {
        let s = Spectrum::number_operator(2).unwrap();
        let pop = AssignmentChoice::Named("popcount".into())
            .observable(&s)
            .unwrap();
        assert_eq!(pop.assignment().values(), &[0.0, 1.0, 1.0, 2.0]);
        let can = AssignmentChoice::default().observable(&s).unwrap();
        assert_eq!(can.assignment().values(), &[0.0, 1.0, 1.0, 2.0]);
        assert!(AssignmentChoice::Named("nope".into())
            .observable(&s)
            .is_err());
        let arr = AssignmentChoice::parse_arg("[1, 0, 2, 1]").unwrap();
        assert!(arr.observable(&s).is_ok());
    }
}
