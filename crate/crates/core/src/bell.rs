//! Bell correlation inequalities: exact local bounds and see-saw vector
//! bounds.
//!
//! An inequality is a real coefficient matrix `M`; a deterministic local
//! strategy assigns signs `a_i, b_j = +/-1` and scores `sum M_ij a_i b_j`.
//! The local bound maximizes over all sign choices. The vector bound
//! relaxes signs to unit vectors in `R^dim` and is maximized by
//! alternating closed-form updates (see-saw); with the Gram vectors it
//! certifies what quantum measurements on a maximally entangled state can
//! reach at that dimension.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, RealMatrix, UnitVector};
use crate::rng::{sample_sphere, RandomSource};
use crate::tolerances;

/// An optimal deterministic strategy together with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStrategy {
    pub value: f64,
    pub alice_signs: Vec<i8>,
    pub bob_signs: Vec<i8>,
}

/// Exact maximum of `sum M_ij a_i b_j` over sign assignments.
///
/// Enumerates the smaller side with a Gray code (one sign flip per step,
/// `O(2^m . m)` total) after fixing its first sign by the global sign
/// symmetry; the other side is optimal by taking signs of column sums. The
/// reported value and signs are recomputed by fresh summation at the
/// winning assignment, so no incremental rounding is carried.
pub fn local_bound(coefficients: &RealMatrix) -> Result<f64> {
    Ok(local_bound_strategy(coefficients)?.value)
}

/// [`local_bound`] with the maximizing sign assignment. Ties are broken by
/// enumeration order.
pub fn local_bound_strategy(coefficients: &RealMatrix) -> Result<LocalStrategy> {
    if coefficients.rows() <= coefficients.cols() {
        enumerate_rows(coefficients)
    } else {
        let s = enumerate_rows(&coefficients.transpose())?;
        Ok(LocalStrategy {
            value: s.value,
            alice_signs: s.bob_signs,
            bob_signs: s.alice_signs,
        })
    }
}

fn enumerate_rows(m: &RealMatrix) -> Result<LocalStrategy> {
    let rows = m.rows();
    if rows > tolerances::LOCAL_BOUND_MAX_SETTINGS {
        return Err(Error::ResourceLimit(format!(
            "{rows} settings exceed the exact enumeration cap of {}",
            tolerances::LOCAL_BOUND_MAX_SETTINGS
        )));
    }
    let cols = m.cols();
    let mut signs = vec![1i8; rows];
    // Column sums for the all-plus assignment.
    let mut col_sums = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            col_sums[j] += m[(i, j)];
        }
    }
    let score = |sums: &[f64]| sums.iter().map(|s| s.abs()).sum::<f64>();
    let mut best = score(&col_sums);
    let mut best_signs = signs.clone();
    // Gray-code walk over the 2^(rows-1) assignments with signs[0] fixed.
    let steps = 1u64 << (rows - 1);
    for k in 1..steps {
        let flip = k.trailing_zeros() as usize + 1;
        signs[flip] = -signs[flip];
        let delta = 2.0 * signs[flip] as f64;
        for j in 0..cols {
            col_sums[j] += delta * m[(flip, j)];
        }
        let v = score(&col_sums);
        if v > best {
            best = v;
            best_signs.copy_from_slice(&signs);
        }
    }
    // Fresh evaluation at the winner.
    let mut final_sums = vec![0.0; cols];
    for i in 0..rows {
        for j in 0..cols {
            final_sums[j] += best_signs[i] as f64 * m[(i, j)];
        }
    }
    let bob_signs: Vec<i8> = final_sums
        .iter()
        .map(|s| if *s < 0.0 { -1 } else { 1 })
        .collect();
    Ok(LocalStrategy {
        value: score(&final_sums),
        alice_signs: best_signs,
        bob_signs,
    })
}

/// Coefficient matrix with its cached local bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BellCorrelationInequality {
    coefficients: RealMatrix,
    local_bound: f64,
    normalized: bool,
}

impl BellCorrelationInequality {
    /// Wraps a coefficient matrix, computing its local bound once.
    pub fn from_matrix(coefficients: RealMatrix) -> Result<Self> {
        let bound = local_bound(&coefficients)?;
        Ok(BellCorrelationInequality {
            coefficients,
            local_bound: bound,
            normalized: false,
        })
    }

    /// The CHSH inequality `[[1, 1], [1, -1]]` (local bound 2), already
    /// normalized.
    pub fn chsh() -> Self {
        BellCorrelationInequality::from_matrix(
            RealMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap(),
        )
        .unwrap()
        .normalize()
        .unwrap()
    }

    /// Rescales so the local bound is 1 by construction.
    pub fn normalize(&self) -> Result<Self> {
        if self.normalized {
            return Ok(self.clone());
        }
        if self.local_bound <= 0.0 {
            return Err(Error::DegenerateInequality);
        }
        Ok(BellCorrelationInequality {
            coefficients: self.coefficients.scaled(1.0 / self.local_bound),
            local_bound: 1.0,
            normalized: true,
        })
    }

    pub fn coefficients(&self) -> &RealMatrix {
        &self.coefficients
    }

    pub fn local_bound(&self) -> f64 {
        self.local_bound
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn alice_settings(&self) -> usize {
        self.coefficients.rows()
    }

    pub fn bob_settings(&self) -> usize {
        self.coefficients.cols()
    }

    /// `sum M_ij (a_i . b_j)` for explicit vector strategies.
    pub fn evaluate_vectors(&self, a: &[UnitVector], b: &[UnitVector]) -> Result<f64> {
        if a.len() != self.alice_settings() || b.len() != self.bob_settings() {
            return Err(Error::InvalidArgument(format!(
                "expected {} x {} strategy vectors, got {} x {}",
                self.alice_settings(),
                self.bob_settings(),
                a.len(),
                b.len()
            )));
        }
        let mut value = 0.0;
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                value += self.coefficients[(i, j)] * ai.dot(bj)?;
            }
        }
        Ok(value)
    }
}

/// Result of a see-saw vector-bound search.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Local bound of the inequality searched (1 for normalized input).
    pub local: f64,
    /// Best objective value found.
    pub value: f64,
    /// `value / local`.
    pub ratio: f64,
    /// Vector dimension searched.
    pub dim: usize,
    /// Restarts performed (including the deterministic one).
    pub restarts: usize,
    /// Sweeps used by the winning restart.
    pub iterations: usize,
    /// True when the winning restart stopped at the iteration cap rather
    /// than at the gain tolerance.
    pub capped: bool,
    /// Maximizing unit vectors.
    pub alice_vectors: Vec<UnitVector>,
    pub bob_vectors: Vec<UnitVector>,
}

/// Critical visibility derived from a bound report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViolationThreshold {
    /// `local / value`; the inequality is violated by the strategy above
    /// this visibility.
    pub visibility: f64,
    /// False when the search found no value above the local bound, in
    /// which case the visibility is not a violation threshold.
    pub violation: bool,
}

/// Critical visibility `local / value` with a no-violation flag.
pub fn violation_threshold(report: &BoundReport) -> ViolationThreshold {
    ViolationThreshold {
        visibility: report.local / report.value,
        violation: report.value > report.local,
    }
}

/// Maximizes `sum M_ij (a_i . b_j)` over unit vectors in `R^dim` by
/// alternating closed-form updates.
///
/// Given fixed `a`, the optimal `b_j` is the normalized resultant
/// `sum_i M_ij a_i`, and symmetrically; each sweep is monotone in the
/// objective. Restart 0 starts from an optimal deterministic strategy
/// embedded along the first axis, so the result never falls below the
/// local bound. Restarts `1..` start from independent uniform random
/// vectors drawn from `source.substream(r)`. The best restart wins; ties
/// keep the earliest.
pub fn seesaw_vector_bound(
    inequality: &BellCorrelationInequality,
    dim: usize,
    restarts: usize,
    source: RandomSource,
) -> Result<BoundReport> {
    if !inequality.is_normalized() {
        return Err(Error::InvalidArgument(
            "see-saw expects a normalized inequality; call normalize() first".to_string(),
        ));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "vector dimension must be at least 1".to_string(),
        ));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one restart is required".to_string(),
        ));
    }
    let m = inequality.coefficients();
    let (ra, cb) = (m.rows(), m.cols());
    let deterministic = local_bound_strategy(m)?;

    // (value, restart, iterations, capped, alice, bob) of the best restart.
    type Best = (f64, usize, usize, bool, Vec<Vec<f64>>, Vec<Vec<f64>>);
    let mut best: Option<Best> = None;
    for restart in 0..restarts {
        let (mut a, mut b) = if restart == 0 {
            let embed = |signs: &[i8]| -> Vec<Vec<f64>> {
                signs
                    .iter()
                    .map(|s| {
                        let mut v = vec![0.0; dim];
                        v[0] = *s as f64;
                        v
                    })
                    .collect()
            };
            (
                embed(&deterministic.alice_signs),
                embed(&deterministic.bob_signs),
            )
        } else {
            let mut rng = source.substream(restart as u64).rng();
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, count: usize| -> Result<Vec<Vec<f64>>> {
                (0..count)
                    .map(|_| Ok(sample_sphere(rng, dim)?.components().to_vec()))
                    .collect()
            };
            let a = draw(&mut rng, ra)?;
            let b = draw(&mut rng, cb)?;
            (a, b)
        };

        let mut previous = f64::NEG_INFINITY;
        let mut iterations = 0;
        let mut capped = true;
        while iterations < tolerances::SEESAW_MAX_ITERATIONS {
            // b_j <- normalized resultant of the a side. A sub-tolerance
            // resultant would not determine a direction; the previous
            // iterate is kept instead.
            for j in 0..cb {
                let mut r = vec![0.0; dim];
                for (i, ai) in a.iter().enumerate() {
                    let w = m[(i, j)];
                    if w != 0.0 {
                        for (rk, ak) in r.iter_mut().zip(ai) {
                            *rk += w * ak;
                        }
                    }
                }
                let n = norm(&r);
                if n >= tolerances::SEESAW_DEGENERATE {
                    for x in &mut r {
                        *x /= n;
                    }
                    b[j] = r;
                }
            }
            // a_i <- normalized resultant of the b side; the objective
            // after this half-sweep is the sum of resultant norms.
            let mut value = 0.0;
            for i in 0..ra {
                let mut s = vec![0.0; dim];
                for (j, bj) in b.iter().enumerate() {
                    let w = m[(i, j)];
                    if w != 0.0 {
                        for (sk, bk) in s.iter_mut().zip(bj) {
                            *sk += w * bk;
                        }
                    }
                }
                let n = norm(&s);
                if n >= tolerances::SEESAW_DEGENERATE {
                    for x in &mut s {
                        *x /= n;
                    }
                    a[i] = s;
                    value += n;
                } else {
                    value += dot(&s, &a[i]);
                }
            }
            iterations += 1;
            if value - previous <= tolerances::SEESAW_GAIN {
                capped = false;
                break;
            }
            previous = value;
        }

        // Fresh objective at the final iterate.
        let mut value = 0.0;
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                value += m[(i, j)] * dot(ai, bj);
            }
        }
        let better = match &best {
            None => true,
            Some((bv, ..)) => value > *bv,
        };
        if better {
            best = Some((value, restart, iterations, capped, a, b));
        }
    }

    let (value, _, iterations, capped, a, b) = best.expect("at least one restart ran");
    let alice_vectors = a
        .into_iter()
        .map(UnitVector::new)
        .collect::<Result<Vec<_>>>()?;
    let bob_vectors = b
        .into_iter()
        .map(UnitVector::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        local: inequality.local_bound(),
        value,
        ratio: value / inequality.local_bound(),
        dim,
        restarts,
        iterations,
        capped,
        alice_vectors,
        bob_vectors,
    })
}
