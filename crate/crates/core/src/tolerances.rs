//! Central numeric tolerances.
//!
//! Every tolerance used for validation or convergence lives here so the
//! trade-offs stay visible in one place. Values fall into three tiers:
//!
//! * `1e-12`: construction-time invariants (norms, hermiticity, trace).
//!   Inputs are built from machine-precision arithmetic, so anything worse
//!   indicates a real defect rather than rounding.
//! * `1e-10`: derived algebraic identities (operators squaring to the
//!   identity, reproduced correlations, root residuals). These accumulate
//!   a few hundred rounding steps.
//! * Looser, purpose-specific bounds (Monte Carlo, truncation) are carried
//!   by the value that owns them, not listed here.

/// Norm / trace / hermiticity defect accepted at construction time.
pub const CONSTRUCTION: f64 = 1e-12;

/// Accepted defect for derived identities such as `O^2 = I` or a
/// correlation reproduced through two different formulas.
pub const IDENTITY: f64 = 1e-10;

/// Eigenvalue floor for positive semidefiniteness checks. A density
/// matrix may have tiny negative eigenvalues from rounding; anything
/// below `-PSD_FLOOR` is rejected.
pub const PSD_FLOOR: f64 = 1e-10;

/// Probabilities this far below zero are treated as inconsistent input
/// rather than rounding noise.
pub const PROBABILITY_FLOOR: f64 = 1e-10;

/// Required residual for scale-constant root solves.
pub const ROOT_RESIDUAL: f64 = 1e-10;

/// Target absolute error for adaptive quadrature.
pub const QUADRATURE: f64 = 1e-12;

/// See-saw stops once an iteration improves the objective by less than
/// this.
pub const SEESAW_GAIN: f64 = 1e-12;

/// Resultant vectors shorter than this are not normalized during see-saw;
/// the previous iterate is kept instead.
pub const SEESAW_DEGENERATE: f64 = 1e-14;

/// See-saw iteration cap per restart. Hitting it flags the report instead
/// of erroring.
pub const SEESAW_MAX_ITERATIONS: usize = 10_000;

/// Settings-per-side cap for exact local bound enumeration (`O(2^m)`).
pub const LOCAL_BOUND_MAX_SETTINGS: usize = 24;

/// Largest embedding dimension the default constructors will produce.
pub const EMBEDDING_DIM_CAP: usize = 65_536;
