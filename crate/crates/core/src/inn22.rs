//! The symmetric n-setting two-outcome inequality family and its exact
//! reduction to two-setting subinequalities.
//!
//! The family is given in joint-probability form: with `p_ij` the
//! probability of both parties answering +1 at settings `(i, j)` and
//! `p(a_i), p(b_j)` the one-sided probabilities,
//!
//! ```text
//! I_n = sum_ij J_ij p_ij - sum_i (n-i) p(a_i) - p(b_1) <= 0
//! J_ij = +1 for i+j <= n+1,  -1 for i+j = n+2,  0 otherwise
//! ```
//!
//! (indices 1-based here; the API is 0-based). `n = 2` is the
//! Clauser-Horne form, related to the familiar correlation expression
//! `S` by `I_2 = (S - 2)/4` when marginals vanish.
//!
//! For states with vanishing marginals (`p(a_i) = p(b_j) = 1/2`) the
//! whole family reduces exactly to its two-setting members:
//!
//! ```text
//! (n-1) I_n = sum_quadruples I_2(a_i, a_r; b_k, b_c)
//!             + sum_band m_rc (p_rc - 1/2)
//! ```
//!
//! where the quadruples run over `r + c = n + 2`, `i < r`, `k < c`, the
//! band multiplicities are `m_rc = (r-1)(c-1) - (n-1) >= 0`, and
//! `p_rc - 1/2 <= 0` always. Hence a violation `I_n > 0` forces some
//! two-setting member to be violated: on this state family the extra
//! settings buy nothing. [`Decomposition::verify_exact`] checks the
//! identity coefficient by coefficient in integer arithmetic;
//! [`check_violation_implication`] probes the conclusion on random
//! states and settings.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{RealMatrix, UnitVector};
use crate::quantum::BellDiagonalState;
use crate::rng::{sample_sphere, RandomSource};

/// One member of the n-setting family, with joint coefficients and
/// marginal coefficients spelled out.
#[derive(Debug, Clone)]
pub struct Inn22Inequality {
    n: usize,
    joint: RealMatrix,
    alice_marginal: Vec<f64>,
    bob_marginal: Vec<f64>,
}

/// Builds the n-setting member; `2 <= n <= 16`.
pub fn generate(n: usize) -> Result<Inn22Inequality> {
    if !(2..=16).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "supported setting counts are 2..=16, got {n}"
        )));
    }
    let mut joint = RealMatrix::zeros(n, n)?;
    for i in 0..n {
        for j in 0..n {
            // 0-based: +1 band is i+j < n, the -1 band i+j = n.
            joint[(i, j)] = if i + j < n {
                1.0
            } else if i + j == n {
                -1.0
            } else {
                0.0
            };
        }
    }
    let alice_marginal: Vec<f64> = (0..n).map(|i| -((n - 1 - i) as f64)).collect();
    let mut bob_marginal = alloc::vec![0.0; n];
    bob_marginal[0] = -1.0;
    Ok(Inn22Inequality {
        n,
        joint,
        alice_marginal,
        bob_marginal,
    })
}

impl Inn22Inequality {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn joint(&self) -> &RealMatrix {
        &self.joint
    }

    pub fn alice_marginal(&self) -> &[f64] {
        &self.alice_marginal
    }

    pub fn bob_marginal(&self) -> &[f64] {
        &self.bob_marginal
    }

    /// Evaluates the inequality on a Bell-diagonal two-qubit state with
    /// spin measurements along the given directions.
    ///
    /// Bell-diagonal states have unbiased marginals, so the marginal
    /// terms contribute the constant `-(n(n-1) + 2)/4` and the joint
    /// terms use `p_ij = (1 + E_ij)/4`. Positive return values witness
    /// nonlocality.
    pub fn evaluate_bell_diagonal(
        &self,
        state: &BellDiagonalState,
        alice: &[UnitVector],
        bob: &[UnitVector],
    ) -> Result<f64> {
        if alice.len() != self.n || bob.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "need {} settings per side, got {} and {}",
                self.n,
                alice.len(),
                bob.len()
            )));
        }
        let mut value = 0.0;
        for (i, a) in alice.iter().enumerate() {
            for (j, b) in bob.iter().enumerate() {
                let coeff = self.joint[(i, j)];
                if coeff != 0.0 {
                    let p = state.correlation(a, b)?.outcome_probability(1, 1)?;
                    value += coeff * p;
                }
            }
        }
        let marginal_sum: f64 =
            self.alice_marginal.iter().sum::<f64>() + self.bob_marginal.iter().sum::<f64>();
        Ok(value + marginal_sum / 2.0)
    }
}

/// Index quadruple selecting a two-setting subinequality
/// `I_2(a_first, a_second; b_first, b_second)`; the negative joint cell
/// is `(second, second)` and the marginal terms use the `first` indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChQuadruple {
    pub alice: (usize, usize),
    pub bob: (usize, usize),
}

/// The exact reduction of the n-setting member to two-setting members:
///
/// ```text
/// I_n = [sum chsh_terms + sum_(i,j) in negative_terms (p_ij - 1/2)] / (n-1)
/// ```
///
/// Negative-term pairs repeat when a cell enters with multiplicity.
#[derive(Debug, Clone)]
pub struct DecompositionCertificate {
    n: usize,
    chsh_terms: Vec<ChQuadruple>,
    negative_terms: Vec<(usize, usize)>,
}

/// Constructs the reduction certificate for the n-setting member;
/// `3 <= n <= 12`.
///
/// Two-setting terms are ordered by second alice index, then first
/// alice index, then first bob index; their count is `n (n^2 - 1) / 6`
/// and the negative terms number `(n-1)(n-2)(n-3)/6`.
pub fn decompose(n: usize) -> Result<DecompositionCertificate> {
    if !(3..=12).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "certificates are built for 3..=12 settings, got {n}"
        )));
    }
    let mut chsh_terms = Vec::new();
    let mut negative_terms = Vec::new();
    // 0-based: the negative band is r + c = n with r, c in 1..n.
    for r in 1..n {
        let c = n - r;
        for i in 0..r {
            for k in 0..c {
                chsh_terms.push(ChQuadruple {
                    alice: (i, r),
                    bob: (k, c),
                });
            }
        }
        // The quadruple family over-counts the cell (r, c) by exactly
        // this much relative to (n-1) J; the surplus enters as
        // nonpositive (p - 1/2) terms.
        let multiplicity = (r * c) as i64 - (n as i64 - 1);
        for _ in 0..multiplicity {
            negative_terms.push((r, c));
        }
    }
    Ok(DecompositionCertificate {
        n,
        chsh_terms,
        negative_terms,
    })
}

impl DecompositionCertificate {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chsh_terms(&self) -> &[ChQuadruple] {
        &self.chsh_terms
    }

    pub fn negative_terms(&self) -> &[(usize, usize)] {
        &self.negative_terms
    }

    /// The prefactor `1/(n-1)` applied to the bracketed sum.
    pub fn scale(&self) -> f64 {
        1.0 / (self.n as f64 - 1.0)
    }

    /// Verifies the reduction as a polynomial identity in the joint
    /// probabilities, in exact integer arithmetic.
    ///
    /// Working over states with unbiased marginals, each joint
    /// coefficient is an integer and each constant a multiple of 1/4:
    /// a two-setting term contributes `+1, +1, +1, -1` on its cells and
    /// `-4` quarters, a negative term `+1` on its cell and `-2`
    /// quarters. The totals must equal `(n-1) J_ij` and
    /// `(n-1) (-n(n-1) - 2)` quarters.
    pub fn verify_exact(&self) -> Result<()> {
        let n = self.n;
        let mut joint = alloc::vec![0i64; n * n];
        let mut constant_quarters: i64 = 0;
        for q in &self.chsh_terms {
            let (i, r) = q.alice;
            let (k, c) = q.bob;
            joint[i * n + k] += 1;
            joint[i * n + c] += 1;
            joint[r * n + k] += 1;
            joint[r * n + c] -= 1;
            constant_quarters -= 4;
        }
        for &(i, j) in &self.negative_terms {
            joint[i * n + j] += 1;
            constant_quarters -= 2;
        }
        let scale = self.n as i64 - 1;
        for i in 0..n {
            for j in 0..n {
                let target = if i + j < n {
                    scale
                } else if i + j == n {
                    -scale
                } else {
                    0
                };
                if joint[i * n + j] != target {
                    return Err(Error::Internal(format!(
                        "joint coefficient at ({i}, {j}) is {}, expected {target}",
                        joint[i * n + j]
                    )));
                }
            }
        }
        let target_constant = scale * (-(n as i64) * (n as i64 - 1) - 2);
        if constant_quarters != target_constant {
            return Err(Error::Internal(format!(
                "constant is {constant_quarters} quarters, expected {target_constant}"
            )));
        }
        Ok(())
    }
}

/// Outcome of probing the reduction's consequence on random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImplicationCheck {
    pub trials: u64,
    /// Instances where the n-setting member was violated.
    pub violations: u64,
    /// Violating instances where no two-setting member was violated;
    /// the reduction says this must stay zero.
    pub counterexamples: u64,
}

/// Samples random Bell-diagonal states (exponential simplex draws) with
/// random measurement directions and checks that every violation of the
/// n-setting member is accompanied by a violated two-setting member
/// from its reduction. Trial `t` uses `source.substream(t)`, so shards
/// can be merged or reproduced independently.
pub fn check_violation_implication(
    n: usize,
    trials: u64,
    source: RandomSource,
) -> Result<ImplicationCheck> {
    let inequality = generate(n)?;
    let ch = generate(2)?;
    let decomposition = decompose(n)?;
    let mut violations = 0;
    let mut counterexamples = 0;
    for t in 0..trials {
        let mut rng = source.substream(t).rng();
        let mut q = [0.0f64; 4];
        for p in &mut q {
            // Exponential draws normalized to the simplex; log(1 - u)
            // is safe since u < 1.
            *p = -libm::log(1.0 - crate::rng::next_uniform(&mut rng));
        }
        let total: f64 = q.iter().sum();
        for p in &mut q {
            *p /= total;
        }
        let state = BellDiagonalState::from_probabilities(q)?;
        let alice: Vec<UnitVector> = (0..n)
            .map(|_| sample_sphere(&mut rng, 3))
            .collect::<Result<_>>()?;
        let bob: Vec<UnitVector> = (0..n)
            .map(|_| sample_sphere(&mut rng, 3))
            .collect::<Result<_>>()?;
        // The negative terms must never help: with unbiased marginals
        // every joint probability is capped at 1/2.
        for &(i, j) in decomposition.negative_terms() {
            let p = state
                .correlation(&alice[i], &bob[j])?
                .outcome_probability(1, 1)?;
            if p > 0.5 + 1e-12 {
                return Err(Error::Internal(format!(
                    "joint probability {p} exceeds 1/2 despite unbiased marginals"
                )));
            }
        }
        let value = inequality.evaluate_bell_diagonal(&state, &alice, &bob)?;
        if value > 1e-12 {
            violations += 1;
            let mut witnessed = false;
            for quad in decomposition.chsh_terms() {
                let sub_a = [alice[quad.alice.0].clone(), alice[quad.alice.1].clone()];
                let sub_b = [bob[quad.bob.0].clone(), bob[quad.bob.1].clone()];
                if ch.evaluate_bell_diagonal(&state, &sub_a, &sub_b)? > 0.0 {
                    witnessed = true;
                    break;
                }
            }
            if !witnessed {
                counterexamples += 1;
            }
        }
    }
    Ok(ImplicationCheck {
        trials,
        violations,
        counterexamples,
    })
}
