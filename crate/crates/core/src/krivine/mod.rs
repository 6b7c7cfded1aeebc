//! Sign-rounding embeddings and the scale constants behind them.
//!
//! The construction: map settings `a, b` (unit vectors) to unit vectors
//! `F(a), G(b)` in a larger space such that `F(a) . G(b) = sin(c (a . b))`
//! for a scale constant `c`, then answer with the signs of `lambda . F(a)`
//! and `lambda . G(b)` for a shared Gaussian `lambda`. Since
//! `E[sign(lambda . u) sign(lambda . v)] = (2/pi) arcsin(u . v)` for unit
//! `u, v`, the model reproduces correlations `(2c/pi) (a . b)` exactly,
//! which both bounds Grothendieck-type constants (`K <= pi/(2c)`) and
//! yields local models at visibility `2c/pi`.
//!
//! Three expansions of `sin(c t)` are implemented, differing in where the
//! settings may live and how large `c` can be made:
//!
//! * [`taylor_embedding`]: odd powers `t^(2k+1)` realized by tensor
//!   powers; any setting dimension; `c = asinh(1) = ln(1 + sqrt 2)`.
//! * [`sphere_embedding`]: odd Legendre polynomials `P_l(t)` realized by
//!   spherical-harmonic blocks; settings in `R^3`; `c` solves
//!   `sum_(l odd) (2l+1) j_l(c) = 1`, equivalently
//!   `(sqrt c / 2) * integral_0^c sin(t) t^(-3/2) dt = 1`.
//! * [`circle_embedding`]: odd circular harmonics `cos((2k+1) gamma)`;
//!   settings in `R^2`; `c` solves `integral_0^c J_0(t) dt = 1`.
//!
//! Each series has positive weights summing to 1 at its root, so
//! truncation keeps unit norms by absorbing the discarded mass into the
//! last kept block, at a rigorously bounded cost to the inner product.

pub mod quad;
pub mod special;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::lhv::{GaussianSampler, LhvModel, ResponseRule};
use crate::linalg::{dot, UnitVector};
use crate::tolerances;

/// A solved scale constant together with the residual of its defining
/// equation at the returned value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRoot {
    pub c: f64,
    pub residual: f64,
}

impl ScaleRoot {
    /// The constant bound `pi / (2c)` certified by the construction.
    pub fn upper_bound(&self) -> f64 {
        PI / (2.0 * self.c)
    }

    /// The visibility `2c / pi` the rounding model simulates.
    pub fn visibility(&self) -> f64 {
        2.0 * self.c / PI
    }
}

/// `sin(u^2)/u^2` with its removable singularity filled in.
fn sin_sq_over_sq(u: f64) -> f64 {
    let t = u * u;
    if t < 1e-8 {
        // sin(t)/t = 1 - t^2/6 + O(t^4); at t < 1e-8 the next term is
        // below 1e-33.
        1.0 - t * t / 6.0
    } else {
        libm::sin(t) / t
    }
}

/// Solves `(sqrt c / 2) * integral_0^c sin(t) t^(-3/2) dt = 1` for the
/// three-dimensional scale constant.
///
/// The substitution `t = u^2` turns the integral into
/// `sqrt(c) * integral_0^sqrt(c) sin(u^2)/u^2 du` with a smooth
/// integrand, so adaptive quadrature converges without special endpoint
/// treatment. The root lies near 1.036, giving the bound near 1.5162 and
/// visibility near 0.6595.
pub fn solve_c3() -> Result<ScaleRoot> {
    let h = |c: f64| -> Result<f64> {
        let s = libm::sqrt(c);
        Ok(s * quad::integrate(&sin_sq_over_sq, 0.0, s, tolerances::QUADRATURE)? - 1.0)
    };
    let c = quad::bisect(h, 0.5, 2.0, tolerances::ROOT_RESIDUAL)?;
    Ok(ScaleRoot {
        c,
        residual: h(c)?.abs(),
    })
}

/// The dimension-free scale constant `asinh(1) = ln(1 + sqrt 2)`, the
/// closed-form root of `sinh(c) = 1`.
pub fn taylor_scale() -> ScaleRoot {
    let c = libm::asinh(1.0);
    ScaleRoot {
        c,
        residual: (libm::sinh(c) - 1.0).abs(),
    }
}

/// Degrees beyond this contribute below 1e-25 to the weight sums at the
/// arguments used here (c <= 2).
const SERIES_L_MAX: usize = 31;

/// Solves `sum_(l odd) (2l+1) j_l(c) = 1`; the same constant as
/// [`solve_c3`] reached through the spherical-harmonic expansion instead
/// of the integral form.
pub fn sphere_scale() -> Result<ScaleRoot> {
    let g = |c: f64| -> Result<f64> {
        let j = special::spherical_bessel(SERIES_L_MAX, c)?;
        let mut sum = 0.0;
        let mut l = 1;
        while l <= SERIES_L_MAX {
            sum += (2 * l + 1) as f64 * j[l];
            l += 2;
        }
        Ok(sum - 1.0)
    };
    let c = quad::bisect(g, 0.5, 2.0, tolerances::ROOT_RESIDUAL)?;
    Ok(ScaleRoot {
        c,
        residual: g(c)?.abs(),
    })
}

/// Solves `integral_0^c J_0(t) dt = 1` for the planar scale constant,
/// near 1.108. Its visibility `2c/pi` is about 0.7056, a documented
/// 1.5e-3 short of the planar optimum `1/sqrt(2)`.
pub fn circle_scale() -> Result<ScaleRoot> {
    let g = |c: f64| -> Result<f64> {
        Ok(quad::integrate(&|t| special::bessel_j(0, t), 0.0, c, tolerances::QUADRATURE)? - 1.0)
    };
    let c = quad::bisect(g, 0.5, 2.0, tolerances::ROOT_RESIDUAL)?;
    Ok(ScaleRoot {
        c,
        residual: g(c)?.abs(),
    })
}

/// Which expansion an embedding uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingKind {
    Taylor,
    Sphere,
    Circle,
}

/// The basis realizing one series term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockBasis {
    /// `v (x) v (x) ... (x) v`, an odd number of factors.
    TensorPower(usize),
    /// Normalized real spherical-harmonic block of odd degree `l`.
    SphericalHarmonic(usize),
    /// `(cos(q theta), sin(q theta))` for odd harmonic `q`.
    CircularHarmonic(usize),
}

impl BlockBasis {
    pub fn order(&self) -> usize {
        match self {
            BlockBasis::TensorPower(p) => *p,
            BlockBasis::SphericalHarmonic(l) => *l,
            BlockBasis::CircularHarmonic(q) => *q,
        }
    }
}

/// One kept series term: a basis block, its positive weight and the sign
/// applied on Bob's side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingBlock {
    pub basis: BlockBasis,
    pub weight: f64,
    pub bob_sign: f64,
    pub dim: usize,
}

/// A truncated expansion of `sin(c t)` realized as a pair of maps
/// `F, G : S^(source_dim - 1) -> S^(target_dim - 1)` with
/// `F(a) . G(b) = sin(c (a . b))` up to `tail_bound`.
///
/// Weights are positive and sum to exactly 1 (the discarded series mass
/// is absorbed into the last block), so mapped vectors have unit norm up
/// to rounding and the sign-rounding identity applies directly.
#[derive(Debug, Clone)]
pub struct FeatureEmbedding {
    kind: EmbeddingKind,
    source_dim: usize,
    target_dim: usize,
    scale: ScaleRoot,
    blocks: Vec<EmbeddingBlock>,
    tail_bound: f64,
}

impl FeatureEmbedding {
    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn scale(&self) -> ScaleRoot {
        self.scale
    }

    pub fn blocks(&self) -> &[EmbeddingBlock] {
        &self.blocks
    }

    /// Highest series order kept.
    pub fn truncation_order(&self) -> usize {
        self.blocks.last().map(|b| b.basis.order()).unwrap_or(0)
    }

    /// Rigorous bound on `|F(a) . G(b) - sin(c (a . b))|`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn map_alice(&self, v: &UnitVector) -> Result<Vec<f64>> {
        self.map(v, false)
    }

    pub fn map_bob(&self, v: &UnitVector) -> Result<Vec<f64>> {
        self.map(v, true)
    }

    /// `F(a) . G(b)`; approximately `sin(c (a . b))`.
    pub fn inner_product(&self, a: &UnitVector, b: &UnitVector) -> Result<f64> {
        Ok(dot(&self.map_alice(a)?, &self.map_bob(b)?))
    }

    fn map(&self, v: &UnitVector, bob: bool) -> Result<Vec<f64>> {
        if v.dim() != self.source_dim {
            return Err(Error::InvalidArgument(format!(
                "setting dimension {} does not match the embedding's {}",
                v.dim(),
                self.source_dim
            )));
        }
        let harmonics = match self.kind {
            EmbeddingKind::Sphere => Some(special::SphericalHarmonics::evaluate(
                self.truncation_order(),
                v.components(),
            )?),
            _ => None,
        };
        let mut out = Vec::with_capacity(self.target_dim);
        for block in &self.blocks {
            let scale = libm::sqrt(block.weight) * if bob { block.bob_sign } else { 1.0 };
            match block.basis {
                BlockBasis::TensorPower(p) => {
                    let mut power = vec![1.0];
                    for _ in 0..p {
                        let mut next = Vec::with_capacity(power.len() * v.dim());
                        for x in &power {
                            for y in v.components() {
                                next.push(x * y);
                            }
                        }
                        power = next;
                    }
                    out.extend(power.into_iter().map(|x| scale * x));
                }
                BlockBasis::SphericalHarmonic(l) => {
                    let b = harmonics
                        .as_ref()
                        .expect("sphere embeddings carry harmonic blocks only")
                        .degree_block(l)?;
                    out.extend(b.into_iter().map(|x| scale * x));
                }
                BlockBasis::CircularHarmonic(q) => {
                    let theta = libm::atan2(v.components()[1], v.components()[0]);
                    let qt = q as f64 * theta;
                    out.push(scale * libm::cos(qt));
                    out.push(scale * libm::sin(qt));
                }
            }
        }
        debug_assert_eq!(out.len(), self.target_dim);
        Ok(out)
    }
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    if !(1e-9..1.0).contains(&tail_tol) {
        return Err(Error::InvalidArgument(format!(
            "tail tolerance {tail_tol} outside [1e-9, 1)"
        )));
    }
    Ok(())
}

/// Assembles blocks from a weight series until the remaining mass drops
/// to `tail_tol / 2`, then absorbs that remainder into the last weight.
/// The series must have positive weights summing to 1 at the solved root
/// (up to its residual), which is what makes the remaining mass
/// computable as `1 - partial sum`.
fn build_embedding(
    kind: EmbeddingKind,
    source_dim: usize,
    scale: ScaleRoot,
    tail_tol: f64,
    dim_cap: usize,
    mut term: impl FnMut(usize) -> Result<(BlockBasis, f64, f64, Option<usize>)>,
) -> Result<FeatureEmbedding> {
    check_tail_tol(tail_tol)?;
    let mut blocks: Vec<EmbeddingBlock> = Vec::new();
    let mut target_dim = 0usize;
    let mut mass = 0.0;
    for k in 0..60 {
        let (basis, weight, bob_sign, dim) = term(k)?;
        let dim = dim.ok_or_else(|| {
            Error::ResourceLimit(format!(
                "embedding block of order {} overflows the dimension cap {dim_cap}",
                basis.order()
            ))
        })?;
        target_dim = target_dim.saturating_add(dim);
        if target_dim > dim_cap {
            return Err(Error::ResourceLimit(format!(
                "embedding dimension {target_dim} exceeds the cap {dim_cap}; \
                 loosen the tail tolerance or raise the cap"
            )));
        }
        if weight <= 0.0 {
            return Err(Error::Internal(format!(
                "series weight of order {} is not positive: {weight}",
                basis.order()
            )));
        }
        blocks.push(EmbeddingBlock {
            basis,
            weight,
            bob_sign,
            dim,
        });
        mass += weight;
        let tail = (1.0 - mass).max(0.0);
        if tail <= tail_tol / 2.0 {
            blocks.last_mut().expect("nonempty").weight += tail;
            return Ok(FeatureEmbedding {
                kind,
                source_dim,
                target_dim,
                scale,
                blocks,
                tail_bound: 2.0 * tail + scale.residual,
            });
        }
    }
    Err(Error::Internal(
        "weight series failed to reach the requested tail within 60 terms".to_string(),
    ))
}

/// Taylor-series embedding for settings in `R^source_dim`; block `k` is
/// the tensor power `2k+1` with weight `c^(2k+1)/(2k+1)!`, so the target
/// dimension grows like `source_dim^order`. Uses the default dimension
/// cap.
pub fn taylor_embedding(source_dim: usize, tail_tol: f64) -> Result<FeatureEmbedding> {
    taylor_embedding_with_cap(source_dim, tail_tol, tolerances::EMBEDDING_DIM_CAP)
}

/// [`taylor_embedding`] with an explicit target-dimension cap.
pub fn taylor_embedding_with_cap(
    source_dim: usize,
    tail_tol: f64,
    dim_cap: usize,
) -> Result<FeatureEmbedding> {
    if source_dim == 0 {
        return Err(Error::InvalidArgument(
            "setting dimension must be positive".to_string(),
        ));
    }
    let scale = taylor_scale();
    let c = scale.c;
    let mut weight = c;
    build_embedding(
        EmbeddingKind::Taylor,
        source_dim,
        scale,
        tail_tol,
        dim_cap,
        move |k| {
            let power = 2 * k + 1;
            if k > 0 {
                weight *= c * c / ((power - 1) as f64 * power as f64);
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let dim = checked_power(source_dim, power as u32);
            Ok((BlockBasis::TensorPower(power), weight, sign, dim))
        },
    )
}

fn checked_power(base: usize, exp: u32) -> Option<usize> {
    base.checked_pow(exp)
}

/// Spherical-harmonic embedding for settings in `R^3`; block `k` is the
/// degree `l = 2k+1` harmonic block with weight `(2l+1) j_l(c)`.
pub fn sphere_embedding(tail_tol: f64) -> Result<FeatureEmbedding> {
    sphere_embedding_with_cap(tail_tol, tolerances::EMBEDDING_DIM_CAP)
}

/// [`sphere_embedding`] with an explicit target-dimension cap.
pub fn sphere_embedding_with_cap(tail_tol: f64, dim_cap: usize) -> Result<FeatureEmbedding> {
    let scale = sphere_scale()?;
    let j = special::spherical_bessel(SERIES_L_MAX, scale.c)?;
    build_embedding(
        EmbeddingKind::Sphere,
        3,
        scale,
        tail_tol,
        dim_cap,
        move |k| {
            let l = 2 * k + 1;
            if l > SERIES_L_MAX {
                return Err(Error::Internal(
                    "spherical series evaluated beyond its precomputed degrees".to_string(),
                ));
            }
            let weight = (2 * l + 1) as f64 * j[l];
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Ok((BlockBasis::SphericalHarmonic(l), weight, sign, Some(2 * l + 1)))
        },
    )
}

/// Circular-harmonic embedding for settings in `R^2`; block `k` is
/// `(cos((2k+1) theta), sin((2k+1) theta))` with weight `2 J_(2k+1)(c)`.
pub fn circle_embedding(tail_tol: f64) -> Result<FeatureEmbedding> {
    circle_embedding_with_cap(tail_tol, tolerances::EMBEDDING_DIM_CAP)
}

/// [`circle_embedding`] with an explicit target-dimension cap.
pub fn circle_embedding_with_cap(tail_tol: f64, dim_cap: usize) -> Result<FeatureEmbedding> {
    let scale = circle_scale()?;
    let c = scale.c;
    build_embedding(
        EmbeddingKind::Circle,
        2,
        scale,
        tail_tol,
        dim_cap,
        move |k| {
            let q = 2 * k + 1;
            let weight = 2.0 * special::bessel_j(q, c);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Ok((BlockBasis::CircularHarmonic(q), weight, sign, Some(2)))
        },
    )
}

/// Responds with the sign of `lambda . F(setting)` (or `G` on Bob's
/// side), optionally negated.
struct EmbeddingSignRule {
    embedding: Arc<FeatureEmbedding>,
    bob_side: bool,
    negate: bool,
}

impl ResponseRule for EmbeddingSignRule {
    fn prepare(&self, setting: &UnitVector, hidden_dim: usize) -> Result<Vec<f64>> {
        if hidden_dim != self.embedding.target_dim() {
            return Err(Error::InvalidArgument(format!(
                "hidden dimension {hidden_dim} does not match the embedding's {}",
                self.embedding.target_dim()
            )));
        }
        if self.bob_side {
            self.embedding.map_bob(setting)
        } else {
            self.embedding.map_alice(setting)
        }
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

/// The sign-rounding local model of an embedding: a shared Gaussian
/// hidden vector, both parties answering with signs of inner products
/// against their mapped settings.
///
/// Joint correlation: `(2/pi) arcsin(F(a) . G(b))`, which is
/// `(2c/pi) (a . b)` up to the metadata's `correlation_error_bound`
/// (propagated from the embedding's tail bound). With `anticorrelated`
/// Alice's sign is flipped, matching singlet-type correlations
/// `-(2c/pi) (a . b)`. Marginals are exactly zero by the symmetry of the
/// Gaussian.
///
/// Metadata keys: `c`, `visibility` (`2c/pi`), `tail_bound`,
/// `correlation_error_bound`, `hidden_dim`, and for circle embeddings
/// `gap_to_inv_sqrt2`.
pub fn rounding_model(embedding: FeatureEmbedding, anticorrelated: bool) -> Result<LhvModel> {
    let scale = embedding.scale();
    let tail = embedding.tail_bound();
    let s = libm::sin(scale.c);
    let denom = (1.0 - (s + tail) * (s + tail)).max(1e-9);
    let correlation_error = FRAC_2_PI * tail / libm::sqrt(denom);
    let label = match embedding.kind() {
        EmbeddingKind::Taylor => "krivine-taylor",
        EmbeddingKind::Sphere => "krivine-sphere",
        EmbeddingKind::Circle => "krivine-circle",
    };
    let gap = match embedding.kind() {
        EmbeddingKind::Circle => Some(FRAC_1_SQRT_2 - scale.visibility()),
        _ => None,
    };
    let target_dim = embedding.target_dim();
    let shared = Arc::new(embedding);
    let model = LhvModel::response(
        label,
        Box::new(GaussianSampler { dim: target_dim }),
        Box::new(EmbeddingSignRule {
            embedding: Arc::clone(&shared),
            bob_side: false,
            negate: anticorrelated,
        }),
        Box::new(EmbeddingSignRule {
            embedding: shared,
            bob_side: true,
            negate: false,
        }),
    )?
    .with_meta("c", scale.c)
    .with_meta("visibility", scale.visibility())
    .with_meta("tail_bound", tail)
    .with_meta("correlation_error_bound", correlation_error)
    .with_meta("hidden_dim", target_dim as f64);
    Ok(match gap {
        Some(g) => model.with_meta("gap_to_inv_sqrt2", g),
        None => model,
    })
}

/// One recorded constant: a bound on a Grothendieck-type constant and,
/// where meaningful, the critical visibility `1/value` it corresponds to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEntry {
    pub name: &'static str,
    pub value: f64,
    /// Critical-visibility counterpart recorded alongside the constant;
    /// consistency with `1/value` is checked by
    /// [`ledger_reciprocal_defect`].
    pub visibility: Option<f64>,
    /// False for published four-digit values carried as cross-checks.
    pub computed: bool,
    pub note: &'static str,
}

/// Bounds on the constants governing how far quantum vector strategies
/// can exceed sign strategies, with computed values where this crate can
/// produce them and published four-digit values as cross-checks.
pub fn grothendieck_ledger() -> Result<Vec<ConstantEntry>> {
    let k3 = solve_c3()?;
    let dim_free = taylor_scale();
    Ok(vec![
        ConstantEntry {
            name: "K(2)",
            value: SQRT_2,
            visibility: Some(FRAC_1_SQRT_2),
            computed: true,
            note: "planar constant, attained by two-setting strategies",
        },
        ConstantEntry {
            name: "K(3) upper",
            value: k3.upper_bound(),
            visibility: Some(k3.visibility()),
            computed: true,
            note: "spherical sign-rounding construction",
        },
        ConstantEntry {
            name: "K upper",
            value: dim_free.upper_bound(),
            visibility: Some(dim_free.visibility()),
            computed: true,
            note: "dimension-free Taylor construction, pi/(2 asinh 1)",
        },
        ConstantEntry {
            name: "K upper (4-digit)",
            value: 1.7822,
            visibility: Some(0.5611),
            computed: false,
            note: "published rounding of the dimension-free upper bound",
        },
        ConstantEntry {
            name: "K lower (4-digit)",
            value: 1.6770,
            visibility: Some(0.5963),
            computed: false,
            note: "best published lower bound",
        },
        ConstantEntry {
            name: "K(8) upper (4-digit)",
            value: 1.6641,
            visibility: None,
            computed: false,
            note: "published eight-dimensional bound",
        },
    ])
}

/// Largest inconsistency `|1/value - visibility|` across ledger entries
/// that record both; published four-digit pairs sit near 4e-6.
pub fn ledger_reciprocal_defect(entries: &[ConstantEntry]) -> f64 {
    entries
        .iter()
        .filter_map(|e| e.visibility.map(|v| (1.0 / e.value - v).abs()))
        .fold(0.0, f64::max)
}

/// One critical visibility for the singlet-plus-noise family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdEntry {
    pub name: &'static str,
    pub visibility: f64,
    /// False for values quoted from the literature rather than computed
    /// here.
    pub computed: bool,
    pub note: &'static str,
}

/// The visibility ledger for the singlet-plus-noise family, ordered from
/// separability up to the two-setting violation onset.
pub fn werner_threshold_ledger() -> Result<Vec<ThresholdEntry>> {
    let k3 = solve_c3()?;
    Ok(vec![
        ThresholdEntry {
            name: "separable",
            visibility: 1.0 / 3.0,
            computed: true,
            note: "entangled strictly above this visibility",
        },
        ThresholdEntry {
            name: "lhv-general-measurements",
            visibility: 5.0 / 12.0,
            computed: false,
            note: "local model covering generalized measurements",
        },
        ThresholdEntry {
            name: "lhv-projective-sphere",
            visibility: 0.5,
            computed: true,
            note: "sphere response model for projective measurements",
        },
        ThresholdEntry {
            name: "lhv-projective-rounding",
            visibility: k3.visibility(),
            computed: true,
            note: "three-dimensional sign-rounding model",
        },
        ThresholdEntry {
            name: "chsh-violation",
            visibility: FRAC_1_SQRT_2,
            computed: true,
            note: "violation onset for two-setting correlation inequalities",
        },
    ])
}
