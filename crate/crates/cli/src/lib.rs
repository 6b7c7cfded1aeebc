//! Command implementations behind the `bellkit` binary. Every command
//! prints exactly one UTF-8 document to stdout (JSON unless CSV is
//! requested where supported), is deterministic given its flags and seed,
//! and embeds the full invocation for provenance. Exit codes: 0 success,
//! 1 failed assertion or computation, 2 usage error.

pub mod formats;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bellkit_core::bell::{seesaw_vector_bound, violation_threshold, BellCorrelationInequality};
use bellkit_core::inn22;
use bellkit_core::krivine::{
    circle_embedding, grothendieck_ledger, rounding_model, sphere_embedding, taylor_embedding,
    werner_threshold_ledger, FeatureEmbedding,
};
use bellkit_core::lhv::{counts_to_report, sample_counts, werner_model, LhvModel, OutcomeCounts};
use bellkit_core::linalg::UnitVector;
use bellkit_core::rng::RandomSource;
use bellkit_core::Error as CoreError;

/// Samples are addressed as substreams below one pair's stream base, so
/// one run supports at most 2^40 samples per setting pair.
pub const MAX_SAMPLES: u64 = 1 << 40;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or malformed input; exit code 2.
    Usage(String),
    /// A requested assertion failed or a computation broke; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(message) => write!(f, "usage error: {message}"),
            CliError::Failure(message) => write!(f, "{message}"),
        }
    }
}

/// Core errors triggered by user-supplied values.
fn usage(e: CoreError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Core errors from internal computations the user cannot influence.
fn failure(e: CoreError) -> CliError {
    CliError::Failure(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "bellkit",
    version,
    about = "Correlation Bell inequalities, local hidden-variable models, and sign-rounding embeddings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the critical-visibility ledger for the singlet-plus-noise family.
    Thresholds(ThresholdsArgs),
    /// Monte Carlo estimates of a local model over setting pairs from a file.
    Simulate(SimulateArgs),
    /// See-saw vector bound for a coefficient matrix at a fixed dimension.
    Bound(BoundArgs),
    /// Scale roots and truncated feature embeddings.
    Krivine(KrivineArgs),
    /// The n-setting inequality family: counts, decomposition, random checks.
    Inn22(Inn22Args),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Debug)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Debug)]
pub enum StateFamily {
    /// Singlet with white noise; five named thresholds.
    Werner,
    /// General noisy entangled states; a two-sided visibility window.
    General,
}

#[derive(Args, Debug)]
pub struct ThresholdsArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long, value_enum, default_value = "werner")]
    pub state: StateFamily,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Debug)]
pub enum ModelName {
    /// Sphere model for the noisy singlet at visibility 1/2.
    #[value(name = "werner")]
    Werner,
    /// Spherical-harmonic sign-rounding model (3D settings, visibility ~0.6595).
    #[value(name = "krivine3d")]
    Krivine3d,
    /// Circular-harmonic sign-rounding model (planar settings, visibility ~0.7056).
    #[value(name = "krivine2d")]
    Krivine2d,
    /// Tensor-power sign-rounding model (any setting dimension, visibility ~0.5611).
    #[value(name = "taylor")]
    Taylor,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// JSON list of {"a": [...], "b": [...]} setting pairs.
    #[arg(long)]
    pub settings: PathBuf,
    /// Sample count; scientific notation accepted (e.g. 1e6).
    #[arg(long, default_value = "1e5", value_parser = parse_samples)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; estimates are bit-identical for any thread count.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Truncation tail tolerance for embedding-backed models.
    #[arg(long, default_value_t = 1e-3)]
    pub tail_tol: f64,
    /// Assert each joint estimate against the model's own prediction.
    #[arg(long)]
    pub check: bool,
    /// Assert against -v*(a.b) for this visibility instead (implies --check).
    #[arg(long)]
    pub expect_visibility: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// CSV coefficient matrix: one row per line, comma-separated reals.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Vector dimension the see-saw optimizes over.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Debug)]
pub enum EmbeddingOrder {
    #[value(name = "2")]
    Planar,
    #[value(name = "3")]
    Spherical,
    #[value(name = "taylor")]
    Taylor,
}

#[derive(Args, Debug)]
pub struct KrivineArgs {
    #[arg(long, value_enum)]
    pub order: EmbeddingOrder,
    #[arg(long, default_value_t = 1e-6)]
    pub tail_tol: f64,
    /// Setting dimension; only meaningful for --order taylor (default 3).
    #[arg(long)]
    pub source_dim: Option<usize>,
}

#[derive(Args, Debug)]
pub struct Inn22Args {
    /// Number of settings per side, 2 to 16.
    #[arg(long)]
    pub n: usize,
    /// Verify the two-setting decomposition identity in exact arithmetic.
    #[arg(long)]
    pub verify_decomposition: bool,
    /// Random trials for the violation-implication check.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_samples(raw: &str) -> Result<u64, String> {
    let n = if let Ok(n) = raw.parse::<u64>() {
        n
    } else {
        let x: f64 = raw
            .parse()
            .map_err(|_| format!("'{raw}' is not a sample count"))?;
        if !x.is_finite() || x < 0.0 || x.fract() != 0.0 || x > MAX_SAMPLES as f64 {
            return Err(format!(
                "'{raw}' must be a nonnegative integer up to 2^40"
            ));
        }
        x as u64
    };
    if n < 2 {
        return Err("at least 2 samples are required".to_string());
    }
    if n > MAX_SAMPLES {
        return Err(format!("sample count {n} exceeds the 2^40 cap"));
    }
    Ok(n)
}

/// Runs one parsed command; `invocation` is echoed into the output for
/// provenance and should be the raw argv.
pub fn run(cli: Cli, invocation: Vec<String>) -> Result<(), CliError> {
    match cli.command {
        Command::Thresholds(args) => cmd_thresholds(args, invocation),
        Command::Simulate(args) => cmd_simulate(args, invocation),
        Command::Bound(args) => cmd_bound(args, invocation),
        Command::Krivine(args) => cmd_krivine(args, invocation),
        Command::Inn22(args) => cmd_inn22(args, invocation),
    }
}

fn print_json<T: Serialize>(doc: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Failure(format!("serialization: {e}")))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct ThresholdRow {
    name: String,
    visibility: f64,
    computed: bool,
    note: String,
}

#[derive(Serialize)]
struct VisibilityWindow {
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct ThresholdReport {
    invocation: Vec<String>,
    state: String,
    thresholds: Vec<ThresholdRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    window: Option<VisibilityWindow>,
}

fn cmd_thresholds(args: ThresholdsArgs, invocation: Vec<String>) -> Result<(), CliError> {
    let (state, rows, window) = match args.state {
        StateFamily::Werner => {
            let rows: Vec<ThresholdRow> = werner_threshold_ledger()
                .map_err(failure)?
                .into_iter()
                .map(|e| ThresholdRow {
                    name: e.name.to_string(),
                    visibility: e.visibility,
                    computed: e.computed,
                    note: e.note.to_string(),
                })
                .collect();
            ("werner", rows, None)
        }
        StateFamily::General => {
            let ledger = grothendieck_ledger().map_err(failure)?;
            let endpoint = |name: &str| -> Result<(f64, String), CliError> {
                let entry = ledger
                    .iter()
                    .find(|e| e.name == name)
                    .ok_or_else(|| CliError::Failure(format!("ledger entry '{name}' missing")))?;
                let visibility = entry.visibility.ok_or_else(|| {
                    CliError::Failure(format!("ledger entry '{name}' has no visibility"))
                })?;
                Ok((visibility, entry.note.to_string()))
            };
            // The model-side endpoint is the reciprocal of the best upper
            // constant bound; the violation-side endpoint the reciprocal
            // of the best lower bound.
            let (lower, lower_note) = endpoint("K upper (4-digit)")?;
            let (upper, upper_note) = endpoint("K lower (4-digit)")?;
            let rows = vec![
                ThresholdRow {
                    name: "window-lower".to_string(),
                    visibility: lower,
                    computed: false,
                    note: lower_note,
                },
                ThresholdRow {
                    name: "window-upper".to_string(),
                    visibility: upper,
                    computed: false,
                    note: upper_note,
                },
            ];
            ("general", rows, Some(VisibilityWindow { lower, upper }))
        }
    };
    for pair in rows.windows(2) {
        if pair[0].visibility >= pair[1].visibility {
            return Err(CliError::Failure(format!(
                "threshold ledger is not strictly increasing: {} = {} >= {} = {}",
                pair[0].name, pair[0].visibility, pair[1].name, pair[1].visibility
            )));
        }
    }
    match args.format {
        OutputFormat::Json => print_json(&ThresholdReport {
            invocation,
            state: state.to_string(),
            thresholds: rows,
            window,
        }),
        OutputFormat::Csv => {
            for row in rows {
                println!("{},{}", row.name, row.visibility);
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Stat {
    mean: f64,
    stderr: f64,
}

impl From<bellkit_core::lhv::McEstimate> for Stat {
    fn from(e: bellkit_core::lhv::McEstimate) -> Stat {
        Stat {
            mean: e.mean,
            stderr: e.stderr,
        }
    }
}

#[derive(Serialize)]
struct PairEstimate {
    a: Vec<f64>,
    b: Vec<f64>,
    joint: Stat,
    #[serde(rename = "margA")]
    marginal_a: Stat,
    #[serde(rename = "margB")]
    marginal_b: Stat,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
}

#[derive(Serialize)]
struct SimulateReport {
    invocation: Vec<String>,
    model: String,
    meta: BTreeMap<String, f64>,
    samples: u64,
    seed: u64,
    threads: usize,
    estimates: Vec<PairEstimate>,
}

fn build_model(
    name: ModelName,
    setting_dim: usize,
    tail_tol: f64,
) -> Result<(LhvModel, Option<usize>), CliError> {
    // Returns the model plus the setting dimension it demands (None means
    // the model adapts to the settings file).
    match name {
        ModelName::Werner => Ok((werner_model(), Some(3))),
        ModelName::Krivine3d => {
            let embedding = sphere_embedding(tail_tol).map_err(usage)?;
            Ok((rounding_model(embedding, true).map_err(failure)?, Some(3)))
        }
        ModelName::Krivine2d => {
            let embedding = circle_embedding(tail_tol).map_err(usage)?;
            Ok((rounding_model(embedding, true).map_err(failure)?, Some(2)))
        }
        ModelName::Taylor => {
            let embedding = taylor_embedding(setting_dim, tail_tol).map_err(usage)?;
            Ok((rounding_model(embedding, true).map_err(failure)?, None))
        }
    }
}

fn sharded_counts(
    model: &LhvModel,
    a: &UnitVector,
    b: &UnitVector,
    samples: u64,
    source: RandomSource,
    threads: usize,
) -> Result<OutcomeCounts, CliError> {
    if threads <= 1 {
        return sample_counts(model, a, b, 0..samples, source).map_err(failure);
    }
    let shard = samples.div_ceil(threads as u64);
    let ranges: Vec<_> = (0..threads as u64)
        .map(|t| (t * shard).min(samples)..((t + 1) * shard).min(samples))
        .filter(|r| !r.is_empty())
        .collect();
    let counts = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| scope.spawn(move || sample_counts(model, a, b, range, source)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("estimation worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(failure)?;
    Ok(counts
        .into_iter()
        .fold(OutcomeCounts::default(), OutcomeCounts::merge))
}

fn cmd_simulate(args: SimulateArgs, invocation: Vec<String>) -> Result<(), CliError> {
    if args.threads == 0 {
        return Err(CliError::Usage("at least one thread is required".to_string()));
    }
    let expected_dim = match args.model {
        ModelName::Werner | ModelName::Krivine3d => Some(3),
        ModelName::Krivine2d => Some(2),
        ModelName::Taylor => None,
    };
    let (pairs, warnings) = formats::read_settings(&args.settings, expected_dim)?;
    for w in &warnings {
        eprintln!(
            "warning: settings pair {} side {} deviated from unit norm by {:.3e}; normalized",
            w.pair, w.side, w.deviation
        );
    }
    let (model, _) = build_model(args.model, pairs[0].0.dim(), args.tail_tol)?;

    let checking = args.check || args.expect_visibility.is_some();
    let visibility = if checking {
        Some(match args.expect_visibility {
            Some(v) => v,
            None => model.meta_value("visibility").ok_or_else(|| {
                CliError::Failure("model carries no visibility metadata to check".to_string())
            })?,
        })
    } else {
        None
    };
    let prediction_slack = model.meta_value("correlation_error_bound").unwrap_or(0.0);

    let mut estimates = Vec::with_capacity(pairs.len());
    let mut check_failures = Vec::new();
    for (k, (a, b)) in pairs.iter().enumerate() {
        let base = RandomSource::with_stream(args.seed, (k as u64) << 40);
        let counts = sharded_counts(&model, a, b, args.samples, base, args.threads)?;
        let report = counts_to_report(&counts).map_err(failure)?;
        let (target, pass) = match visibility {
            Some(v) => {
                let dot = a.dot(b).map_err(failure)?;
                let target = -v * dot;
                let tolerance = 4.0 * report.joint.stderr + prediction_slack + 1e-9;
                let ok = (report.joint.mean - target).abs() <= tolerance;
                if !ok {
                    check_failures.push(format!(
                        "pair {k}: joint {} differs from {target} by more than {tolerance:.3e}",
                        report.joint.mean
                    ));
                }
                (Some(target), Some(ok))
            }
            None => (None, None),
        };
        estimates.push(PairEstimate {
            a: a.components().to_vec(),
            b: b.components().to_vec(),
            joint: report.joint.into(),
            marginal_a: report.marginal_a.into(),
            marginal_b: report.marginal_b.into(),
            target,
            pass,
        });
    }
    print_json(&SimulateReport {
        invocation,
        model: model.label().to_string(),
        meta: model.meta().iter().cloned().collect(),
        samples: args.samples,
        seed: args.seed,
        threads: args.threads,
        estimates,
    })?;
    if check_failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(check_failures.join("; ")))
    }
}

#[derive(Serialize)]
struct BoundReportDoc {
    invocation: Vec<String>,
    m: usize,
    cols: usize,
    dim: usize,
    local: f64,
    value: f64,
    ratio: f64,
    threshold: f64,
    violation: bool,
    a_vectors: Vec<Vec<f64>>,
    b_vectors: Vec<Vec<f64>>,
    restarts: usize,
    iterations: usize,
    capped: bool,
}

fn cmd_bound(args: BoundArgs, invocation: Vec<String>) -> Result<(), CliError> {
    let matrix = formats::read_matrix_csv(&args.matrix)?;
    let inequality = BellCorrelationInequality::from_matrix(matrix).map_err(usage)?;
    let raw_bound = inequality.local_bound();
    let normalized = inequality.normalize().map_err(usage)?;
    let report = seesaw_vector_bound(
        &normalized,
        args.dim,
        args.restarts,
        RandomSource::new(args.seed),
    )
    .map_err(usage)?;
    let threshold = violation_threshold(&report);
    print_json(&BoundReportDoc {
        invocation,
        m: report.alice_vectors.len(),
        cols: report.bob_vectors.len(),
        dim: report.dim,
        local: raw_bound,
        value: report.value * raw_bound,
        ratio: report.ratio,
        threshold: threshold.visibility,
        violation: threshold.violation,
        a_vectors: report
            .alice_vectors
            .iter()
            .map(|v| v.components().to_vec())
            .collect(),
        b_vectors: report
            .bob_vectors
            .iter()
            .map(|v| v.components().to_vec())
            .collect(),
        restarts: report.restarts,
        iterations: report.iterations,
        capped: report.capped,
    })
}

#[derive(Serialize)]
struct KrivineReport {
    invocation: Vec<String>,
    order: String,
    c: f64,
    residual: f64,
    upper_bound: f64,
    model_visibility: f64,
    truncation_order: usize,
    tail_bound: f64,
    source_dim: usize,
    target_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_to_inv_sqrt2: Option<f64>,
}

fn cmd_krivine(args: KrivineArgs, invocation: Vec<String>) -> Result<(), CliError> {
    if args.source_dim.is_some() && args.order != EmbeddingOrder::Taylor {
        return Err(CliError::Usage(
            "--source-dim applies only to --order taylor; orders 2 and 3 fix it".to_string(),
        ));
    }
    let (order, embedding): (&str, FeatureEmbedding) = match args.order {
        EmbeddingOrder::Planar => ("2", circle_embedding(args.tail_tol).map_err(usage)?),
        EmbeddingOrder::Spherical => ("3", sphere_embedding(args.tail_tol).map_err(usage)?),
        EmbeddingOrder::Taylor => (
            "taylor",
            taylor_embedding(args.source_dim.unwrap_or(3), args.tail_tol).map_err(usage)?,
        ),
    };
    let scale = embedding.scale();
    let gap = match args.order {
        EmbeddingOrder::Planar => Some(std::f64::consts::FRAC_1_SQRT_2 - scale.visibility()),
        _ => None,
    };
    print_json(&KrivineReport {
        invocation,
        order: order.to_string(),
        c: scale.c,
        residual: scale.residual,
        upper_bound: scale.upper_bound(),
        model_visibility: scale.visibility(),
        truncation_order: embedding.truncation_order(),
        tail_bound: embedding.tail_bound(),
        source_dim: embedding.source_dim(),
        target_dim: embedding.target_dim(),
        gap_to_inv_sqrt2: gap,
    })
}

#[derive(Serialize)]
struct Inn22Report {
    invocation: Vec<String>,
    n: usize,
    s1: usize,
    s2: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity_exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexamples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn cmd_inn22(args: Inn22Args, invocation: Vec<String>) -> Result<(), CliError> {
    if !(2..=16).contains(&args.n) {
        return Err(CliError::Usage(format!(
            "n = {} outside the supported range 2..=16",
            args.n
        )));
    }
    let n = args.n;
    let wants_certificate = args.verify_decomposition || args.trials.is_some();
    if wants_certificate && !(3..=12).contains(&n) {
        return Err(CliError::Usage(format!(
            "decomposition checks need 3 <= n <= 12, got {n}"
        )));
    }
    // Term counts of the two-setting decomposition; for n = 2 the (n - 2)
    // factor zeroes the second count, so the saturating subtraction is exact.
    let s1 = n * (n * n - 1) / 6;
    let s2 = (n - 1) * (n - 2) * n.saturating_sub(3) / 6;

    let mut report = Inn22Report {
        invocation,
        n,
        s1,
        s2,
        identity_exact: None,
        trials: None,
        violations: None,
        counterexamples: None,
        seed: None,
        note: None,
    };
    if n == 2 {
        report.note = Some(
            "n = 2 is the two-setting (CHSH) correlation inequality itself; value = (S - 2)/4 \
             for the raw two-setting value S, so nothing is decomposed"
                .to_string(),
        );
    }

    let mut outcome = Ok(());
    if args.verify_decomposition {
        let certificate = inn22::decompose(n).map_err(usage)?;
        if certificate.chsh_terms().len() != s1 || certificate.negative_terms().len() != s2 {
            return Err(CliError::Failure(format!(
                "certificate counts {} / {} differ from formulas {s1} / {s2}",
                certificate.chsh_terms().len(),
                certificate.negative_terms().len()
            )));
        }
        match certificate.verify_exact() {
            Ok(()) => report.identity_exact = Some(true),
            Err(e) => {
                report.identity_exact = Some(false);
                outcome = Err(CliError::Failure(format!("identity check failed: {e}")));
            }
        }
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err(CliError::Usage("at least one trial is required".to_string()));
        }
        let check = inn22::check_violation_implication(n, trials, RandomSource::new(args.seed))
            .map_err(failure)?;
        report.trials = Some(check.trials);
        report.violations = Some(check.violations);
        report.counterexamples = Some(check.counterexamples);
        report.seed = Some(args.seed);
        if check.counterexamples > 0 && outcome.is_ok() {
            outcome = Err(CliError::Failure(format!(
                "{} violated instances had no violated two-setting member",
                check.counterexamples
            )));
        }
    }
    print_json(&report)?;
    outcome
}
