//! Local hidden-variable models and Monte Carlo estimation.
//!
//! A model draws a hidden variable `lambda` per round, then each party
//! answers +/-1 from its own setting and `lambda` alone. Models compose:
//! a base [`LhvModel::response`] can be wrapped to symmetrize marginals or
//! to dilute its correlations to a lower visibility.
//!
//! Sampling is deterministic and shard-stable. Sample `k` of an estimate
//! draws from `source.substream(k)`, and within one sample the deviate
//! order is fixed: hidden draws, one uniform for Alice's response, one for
//! Bob's, then one uniform per wrapper (outermost last). Two models that
//! share an inner model therefore see identical inner randomness sample
//! by sample under the same source, and outcome counts over any partition
//! of a sample range merge to exactly the counts of the whole range.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{dot, UnitVector};
use crate::rng::{next_uniform, sample_sphere, RandomSource};

/// Distribution of the hidden variable.
pub trait HiddenSampler: Send + Sync {
    /// Length of the drawn vector.
    fn dim(&self) -> usize;
    fn draw(&self, rng: &mut dyn RngCore) -> Vec<f64>;
}

/// Uniform point on the unit sphere in `R^dim`.
pub struct SphereSampler {
    pub dim: usize,
}

impl HiddenSampler for SphereSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        sample_sphere(rng, self.dim)
            .expect("sampler dimension validated at model construction")
            .components()
            .to_vec()
    }
}

/// Independent standard normals in `R^dim`.
pub struct GaussianSampler {
    pub dim: usize,
}

impl HiddenSampler for GaussianSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        crate::rng::normal_vector(rng, self.dim)
    }
}

/// One party's response: a setting is first mapped to a prepared vector
/// (once per setting, not per sample), then each round yields +1 with
/// probability `prob_plus(lambda, prepared)`. `prepare` receives the
/// model's hidden dimension so rules can reject settings they cannot
/// consume.
pub trait ResponseRule: Send + Sync {
    fn prepare(&self, setting: &UnitVector, hidden_dim: usize) -> Result<Vec<f64>>;
    fn prob_plus(&self, hidden: &[f64], prepared: &[f64]) -> f64;
}

fn require_setting_dim(setting: &UnitVector, hidden_dim: usize) -> Result<()> {
    if setting.dim() != hidden_dim {
        return Err(Error::InvalidArgument(format!(
            "setting dimension {} does not match hidden dimension {hidden_dim}",
            setting.dim()
        )));
    }
    Ok(())
}

/// Deterministic response `sign(lambda . prepared)`, optionally negated.
/// A zero inner product counts as +1. The prepared vector is the setting
/// itself, so settings must live in the hidden-variable space.
pub struct SignRule {
    pub negate: bool,
}

impl ResponseRule for SignRule {
    fn prepare(&self, setting: &UnitVector, hidden_dim: usize) -> Result<Vec<f64>> {
        require_setting_dim(setting, hidden_dim)?;
        Ok(setting.components().to_vec())
    }

    fn prob_plus(&self, hidden: &[f64], prepared: &[f64]) -> f64 {
        let plus = dot(hidden, prepared) >= 0.0;
        if plus != self.negate {
            1.0
        } else {
            0.0
        }
    }
}

/// Biased coin `P(+1) = (1 + lambda . setting) / 2`; requires the inner
/// product to stay in `[-1, 1]`, e.g. hidden on the sphere of the setting
/// space.
pub struct LinearRule;

impl ResponseRule for LinearRule {
    fn prepare(&self, setting: &UnitVector, hidden_dim: usize) -> Result<Vec<f64>> {
        require_setting_dim(setting, hidden_dim)?;
        Ok(setting.components().to_vec())
    }

    fn prob_plus(&self, hidden: &[f64], prepared: &[f64]) -> f64 {
        (1.0 + dot(hidden, prepared)) / 2.0
    }
}

/// Setting- and hidden-independent coin; useful for test models with
/// prescribed marginals.
pub struct FixedProbabilityRule {
    pub prob_plus: f64,
}

impl ResponseRule for FixedProbabilityRule {
    fn prepare(&self, _setting: &UnitVector, _hidden_dim: usize) -> Result<Vec<f64>> {
        Ok(Vec::new())
    }

    fn prob_plus(&self, _hidden: &[f64], _prepared: &[f64]) -> f64 {
        self.prob_plus
    }
}

enum ModelKind {
    Response {
        hidden: Box<dyn HiddenSampler>,
        alice: Box<dyn ResponseRule>,
        bob: Box<dyn ResponseRule>,
    },
    /// Flips both outcomes on a fair coin: joint correlation unchanged,
    /// marginals exactly zero.
    RandomizedMarginals { inner: Box<LhvModel> },
    /// Runs the inner model with probability `accept`, else outputs two
    /// independent fair coins.
    VisibilityMix { inner: Box<LhvModel>, accept: f64 },
}

/// A samplable local hidden-variable model.
pub struct LhvModel {
    label: String,
    meta: Vec<(String, f64)>,
    kind: ModelKind,
}

/// Prepared per-setting data; mirrors the model's wrapper nesting.
pub struct PreparedPair(PreparedLayer);

enum PreparedLayer {
    Response { alice: Vec<f64>, bob: Vec<f64> },
    Nested(Box<PreparedLayer>),
}

impl LhvModel {
    /// Base model from a hidden-variable distribution and two response
    /// rules.
    pub fn response(
        label: impl Into<String>,
        hidden: Box<dyn HiddenSampler>,
        alice: Box<dyn ResponseRule>,
        bob: Box<dyn ResponseRule>,
    ) -> Result<Self> {
        if hidden.dim() == 0 {
            return Err(Error::InvalidArgument(
                "hidden variable dimension must be positive".to_string(),
            ));
        }
        Ok(LhvModel {
            label: label.into(),
            meta: Vec::new(),
            kind: ModelKind::Response { hidden, alice, bob },
        })
    }

    /// Attaches a named numeric fact (visibility, scale constant, error
    /// bound) to the model. Replaces an existing value under the same key.
    pub fn with_meta(mut self, key: impl Into<String>, value: f64) -> Self {
        let key = key.into();
        self.meta.retain(|(k, _)| *k != key);
        self.meta.push((key, value));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn meta(&self) -> &[(String, f64)] {
        &self.meta
    }

    pub fn meta_value(&self, key: &str) -> Option<f64> {
        self.meta
            .iter()
            .find_map(|(k, v)| (k == key).then_some(*v))
    }

    /// Dimension of the hidden variable, counting one extra shared bit
    /// per wrapper layer.
    pub fn hidden_dim(&self) -> usize {
        match &self.kind {
            ModelKind::Response { hidden, .. } => hidden.dim(),
            ModelKind::RandomizedMarginals { inner } | ModelKind::VisibilityMix { inner, .. } => {
                inner.hidden_dim() + 1
            }
        }
    }

    /// Maps one setting pair through every layer's response preparation.
    pub fn prepare(&self, a: &UnitVector, b: &UnitVector) -> Result<PreparedPair> {
        fn layer(model: &LhvModel, a: &UnitVector, b: &UnitVector) -> Result<PreparedLayer> {
            match &model.kind {
                ModelKind::Response { hidden, alice, bob } => Ok(PreparedLayer::Response {
                    alice: alice.prepare(a, hidden.dim())?,
                    bob: bob.prepare(b, hidden.dim())?,
                }),
                ModelKind::RandomizedMarginals { inner }
                | ModelKind::VisibilityMix { inner, .. } => {
                    Ok(PreparedLayer::Nested(Box::new(layer(inner, a, b)?)))
                }
            }
        }
        Ok(PreparedPair(layer(self, a, b)?))
    }

    /// Draws one outcome pair. The deviate order per call is: hidden
    /// draws, Alice's response uniform, Bob's response uniform, then one
    /// uniform per wrapper from innermost to outermost (plus two coin
    /// deviates when a visibility mix rejects).
    pub fn sample(&self, prepared: &PreparedPair, rng: &mut dyn RngCore) -> (i8, i8) {
        fn layer(model: &LhvModel, prepared: &PreparedLayer, rng: &mut dyn RngCore) -> (i8, i8) {
            match (&model.kind, prepared) {
                (
                    ModelKind::Response { hidden, alice, bob },
                    PreparedLayer::Response {
                        alice: pa,
                        bob: pb,
                    },
                ) => {
                    let lambda = hidden.draw(rng);
                    let pa_plus = alice.prob_plus(&lambda, pa);
                    let alpha = if next_uniform(rng) < pa_plus { 1 } else { -1 };
                    let pb_plus = bob.prob_plus(&lambda, pb);
                    let beta = if next_uniform(rng) < pb_plus { 1 } else { -1 };
                    (alpha, beta)
                }
                (ModelKind::RandomizedMarginals { inner }, PreparedLayer::Nested(p)) => {
                    let (alpha, beta) = layer(inner, p, rng);
                    if next_uniform(rng) < 0.5 {
                        (-alpha, -beta)
                    } else {
                        (alpha, beta)
                    }
                }
                (ModelKind::VisibilityMix { inner, accept }, PreparedLayer::Nested(p)) => {
                    let outcome = layer(inner, p, rng);
                    if next_uniform(rng) < *accept {
                        outcome
                    } else {
                        let alpha = if next_uniform(rng) < 0.5 { 1 } else { -1 };
                        let beta = if next_uniform(rng) < 0.5 { 1 } else { -1 };
                        (alpha, beta)
                    }
                }
                _ => unreachable!("prepared data built by prepare() matches the model"),
            }
        }
        layer(self, &prepared.0, rng)
    }
}

/// The sphere model for the noisy singlet at visibility 1/2: `lambda`
/// uniform on the unit sphere in `R^3`, Alice answers `-sign(a . lambda)`,
/// Bob answers +1 with probability `(1 + b . lambda)/2`. Joint correlation
/// `-(a . b)/2`; Alice's marginal is zero by symmetry, Bob's exactly zero.
pub fn werner_model() -> LhvModel {
    LhvModel::response(
        "werner-sphere",
        Box::new(SphereSampler { dim: 3 }),
        Box::new(SignRule { negate: true }),
        Box::new(LinearRule),
    )
    .expect("static model is well-formed")
    .with_meta("visibility", 0.5)
}

/// Wraps a model so both outcomes are flipped on a shared fair coin,
/// forcing exactly symmetric outcomes (zero marginals) while leaving the
/// joint correlation untouched.
pub fn randomize_marginals(inner: LhvModel) -> LhvModel {
    let label = format!("{}+sym", inner.label);
    let meta = inner.meta.clone();
    LhvModel {
        label,
        meta,
        kind: ModelKind::RandomizedMarginals {
            inner: Box::new(inner),
        },
    }
}

/// Dilutes a model that simulates visibility `model_visibility` down to
/// `target`: each round keeps the inner outcome with probability
/// `target / model_visibility` and otherwise outputs independent fair
/// coins. Joint correlations scale by exactly that factor.
pub fn simulate_visibility(
    inner: LhvModel,
    model_visibility: f64,
    target: f64,
) -> Result<LhvModel> {
    if model_visibility.is_nan() || model_visibility <= 0.0 || model_visibility > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "model visibility {model_visibility} outside (0, 1]"
        )));
    }
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::InvalidArgument(format!(
            "target visibility {target} outside [0, 1]"
        )));
    }
    if target > model_visibility {
        return Err(Error::OutOfRange(format!(
            "target visibility {target} exceeds the model's {model_visibility}"
        )));
    }
    let label = format!("{}+mix", inner.label);
    let meta = inner.meta.clone();
    Ok(LhvModel {
        label,
        meta,
        kind: ModelKind::VisibilityMix {
            inner: Box::new(inner),
            accept: target / model_visibility,
        },
    }
    .with_meta("visibility", target))
}

/// Mean and standard error of a +/-1 observable, derived from the count
/// of +1 outcomes so shard merges reproduce single-run results exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    /// From the number of +1 outcomes among `samples` (at least 2) +/-1
    /// draws. The sample variance of +/-1 data is `n(1 - mean^2)/(n-1)`.
    pub fn from_plus_count(plus: u64, samples: u64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidArgument(
                "at least 2 samples are required for a standard error".to_string(),
            ));
        }
        if plus > samples {
            return Err(Error::InvalidArgument(format!(
                "count {plus} exceeds sample size {samples}"
            )));
        }
        let n = samples as f64;
        let mean = (2.0 * plus as f64 - n) / n;
        let stderr = libm::sqrt((1.0 - mean * mean).max(0.0) / (n - 1.0));
        Ok(McEstimate {
            mean,
            stderr,
            samples,
        })
    }
}

/// Raw outcome counts over a sample range; the mergeable unit of
/// parallel estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutcomeCounts {
    pub samples: u64,
    pub joint_plus: u64,
    pub alice_plus: u64,
    pub bob_plus: u64,
}

impl OutcomeCounts {
    pub fn merge(self, other: OutcomeCounts) -> OutcomeCounts {
        OutcomeCounts {
            samples: self.samples + other.samples,
            joint_plus: self.joint_plus + other.joint_plus,
            alice_plus: self.alice_plus + other.alice_plus,
            bob_plus: self.bob_plus + other.bob_plus,
        }
    }
}

/// Joint and marginal estimates for one setting pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub joint: McEstimate,
    pub marginal_a: McEstimate,
    pub marginal_b: McEstimate,
    pub samples: u64,
}

/// Counts outcomes for samples `range` of the estimate defined by
/// `(model, a, b, source)`. Sample `k` always draws from
/// `source.substream(k)`, so counts over `0..n` equal the merge of counts
/// over any partition of `0..n`.
pub fn sample_counts(
    model: &LhvModel,
    a: &UnitVector,
    b: &UnitVector,
    range: core::ops::Range<u64>,
    source: RandomSource,
) -> Result<OutcomeCounts> {
    let prepared = model.prepare(a, b)?;
    let mut counts = OutcomeCounts::default();
    for k in range {
        let mut rng = source.substream(k).rng();
        let (alpha, beta) = model.sample(&prepared, &mut rng);
        counts.samples += 1;
        counts.joint_plus += (alpha == beta) as u64;
        counts.alice_plus += (alpha == 1) as u64;
        counts.bob_plus += (beta == 1) as u64;
    }
    Ok(counts)
}

/// Converts merged counts into mean/stderr estimates.
pub fn counts_to_report(counts: &OutcomeCounts) -> Result<EstimateReport> {
    Ok(EstimateReport {
        joint: McEstimate::from_plus_count(counts.joint_plus, counts.samples)?,
        marginal_a: McEstimate::from_plus_count(counts.alice_plus, counts.samples)?,
        marginal_b: McEstimate::from_plus_count(counts.bob_plus, counts.samples)?,
        samples: counts.samples,
    })
}

/// Monte Carlo estimate of joint and marginal correlations for one
/// setting pair using `samples` rounds (at least 2).
pub fn estimate(
    model: &LhvModel,
    a: &UnitVector,
    b: &UnitVector,
    samples: u64,
    source: RandomSource,
) -> Result<EstimateReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "at least 2 samples are required".to_string(),
        ));
    }
    counts_to_report(&sample_counts(model, a, b, 0..samples, source)?)
}
