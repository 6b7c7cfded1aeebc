//! Quantum states, dichotomic observables and correlation functions.
//!
//! Covers exactly what two-party correlation experiments need: density
//! matrices with validated positivity, +/-1-valued (dichotomic)
//! observables, the Bell-diagonal two-qubit family with its correlation
//! triple, isotropic-noise mixing, and the joint/marginal correlation
//! data that feeds outcome probabilities.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, UnitVector};
use crate::rng::RandomSource;
use crate::tolerances;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap()
}

/// Normalized pure state on `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes the amplitude vector; rejects (near-)zero input.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".to_string()));
        }
        let norm = libm::sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>());
        if !norm.is_finite() || norm < tolerances::CONSTRUCTION {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero or non-finite state vector".to_string(),
            ));
        }
        Ok(StateVector {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// The two-qubit singlet `(|01> - |10>)/sqrt(2)`.
    pub fn singlet() -> StateVector {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        StateVector {
            amplitudes: vec![c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)],
        }
    }

    /// `sum_i |ii> / sqrt(d)` on `C^d (x) C^d`.
    pub fn maximally_entangled(d: usize) -> Result<StateVector> {
        if d == 0 {
            return Err(Error::InvalidArgument(
                "local dimension must be positive".to_string(),
            ));
        }
        let mut amplitudes = vec![c(0., 0.); d * d];
        let w = 1.0 / libm::sqrt(d as f64);
        for i in 0..d {
            amplitudes[i * d + i] = c(w, 0.);
        }
        Ok(StateVector { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<psi| M |psi>`.
    pub fn expectation(&self, m: &ComplexMatrix) -> Result<Complex64> {
        let mv = m.mul_vec(&self.amplitudes)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&mv)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// The projector `|psi><psi|` as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix { matrix: m }
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite
/// up to the `PSD_FLOOR` tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tolerances::CONSTRUCTION {
            return Err(Error::InvalidArgument(format!(
                "density matrix is not Hermitian (defect {defect:.2e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tolerances::CONSTRUCTION || tr.im.abs() > tolerances::CONSTRUCTION
        {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        if !matrix.is_positive_semidefinite(tolerances::PSD_FLOOR) {
            return Err(Error::InvalidArgument(
                "density matrix is not positive semidefinite".to_string(),
            ));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be positive".to_string(),
            ));
        }
        Ok(DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scaled_re(1.0 / dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(rho M)`.
    pub fn expectation(&self, m: &ComplexMatrix) -> Result<Complex64> {
        self.matrix.trace_product(m)
    }
}

/// Mixes a state with isotropic noise: `p * rho + (1-p) * I/dim`.
pub fn noisy_state(rho: &DensityMatrix, visibility: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidArgument(format!(
            "visibility {visibility} outside [0, 1]"
        )));
    }
    let dim = rho.dim();
    let noise = ComplexMatrix::identity(dim).scaled_re((1.0 - visibility) / dim as f64);
    Ok(DensityMatrix {
        matrix: rho.matrix.scaled_re(visibility).add(&noise)?,
    })
}

/// Singlet mixed with isotropic noise at the given visibility.
pub fn werner_state(visibility: f64) -> Result<DensityMatrix> {
    noisy_state(&StateVector::singlet().density(), visibility)
}

/// The four Bell states, in the basis order used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiMinus,
        BellState::PhiPlus,
    ];

    pub fn vector(self) -> StateVector {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let amplitudes = match self {
            BellState::PsiMinus => vec![c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)],
            BellState::PsiPlus => vec![c(0., 0.), c(s, 0.), c(s, 0.), c(0., 0.)],
            BellState::PhiMinus => vec![c(s, 0.), c(0., 0.), c(0., 0.), c(-s, 0.)],
            BellState::PhiPlus => vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)],
        };
        StateVector { amplitudes }
    }

    /// The diagonal correlation triple `(<xx>, <yy>, <zz>)` of this state.
    fn correlation_triple(self) -> [f64; 3] {
        match self {
            BellState::PsiMinus => [-1.0, -1.0, -1.0],
            BellState::PsiPlus => [1.0, 1.0, -1.0],
            BellState::PhiMinus => [-1.0, 1.0, 1.0],
            BellState::PhiPlus => [1.0, -1.0, 1.0],
        }
    }
}

/// Two-qubit state diagonal in the Bell basis.
///
/// Stored as the four Bell weights `[psi-, psi+, phi-, phi+]`. The joint
/// correlation for spin observables along unit vectors `a`, `b` is the
/// diagonal form `sum_k t_k a_k b_k` where `t` is the correlation triple.
#[derive(Debug, Clone, PartialEq)]
pub struct BellDiagonalState {
    probabilities: [f64; 4],
}

impl BellDiagonalState {
    /// Builds from Bell weights, which must be a probability vector.
    pub fn from_probabilities(probabilities: [f64; 4]) -> Result<Self> {
        let sum: f64 = probabilities.iter().sum();
        if probabilities
            .iter()
            .any(|q| *q < -tolerances::CONSTRUCTION || !q.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "Bell weights must be nonnegative, got {probabilities:?}"
            )));
        }
        if (sum - 1.0).abs() > tolerances::CONSTRUCTION {
            return Err(Error::InvalidArgument(format!(
                "Bell weights sum to {sum}, expected 1"
            )));
        }
        Ok(BellDiagonalState { probabilities })
    }

    /// Builds from a correlation triple `t = (<xx>, <yy>, <zz>)`. The
    /// triple must lie in the tetrahedron of physical states, i.e. all four
    /// derived Bell weights must be nonnegative.
    pub fn from_correlation_triple(t: [f64; 3]) -> Result<Self> {
        let q = [
            (1.0 - t[0] - t[1] - t[2]) / 4.0,
            (1.0 + t[0] + t[1] - t[2]) / 4.0,
            (1.0 - t[0] + t[1] + t[2]) / 4.0,
            (1.0 + t[0] - t[1] + t[2]) / 4.0,
        ];
        BellDiagonalState::from_probabilities(q).map_err(|_| {
            Error::InvalidArgument(format!(
                "correlation triple {t:?} lies outside the physical tetrahedron"
            ))
        })
    }

    /// Singlet mixed with isotropic noise, `t = (-p, -p, -p)`.
    pub fn werner(visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::InvalidArgument(format!(
                "visibility {visibility} outside [0, 1]"
            )));
        }
        BellDiagonalState::from_correlation_triple([-visibility; 3])
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.probabilities
    }

    /// The diagonal of the correlation matrix, `t_k = <sigma_k sigma_k>`.
    pub fn correlation_triple(&self) -> [f64; 3] {
        let mut t = [0.0; 3];
        for (q, state) in self.probabilities.iter().zip(BellState::ALL) {
            let triple = state.correlation_triple();
            for k in 0..3 {
                t[k] += q * triple[k];
            }
        }
        t
    }

    /// Full 4x4 density matrix.
    pub fn densify(&self) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for (q, state) in self.probabilities.iter().zip(BellState::ALL) {
            m = m
                .add(&state.vector().density().matrix().scaled_re(*q))
                .expect("4x4 add");
        }
        DensityMatrix { matrix: m }
    }

    /// Correlation data for spin measurements along `a` and `b`. Marginals
    /// vanish for every Bell-diagonal state.
    pub fn correlation(&self, a: &UnitVector, b: &UnitVector) -> Result<CorrelationData> {
        if a.dim() != 3 || b.dim() != 3 {
            return Err(Error::InvalidArgument(
                "spin settings must be unit vectors in R^3".to_string(),
            ));
        }
        let t = self.correlation_triple();
        let joint = (0..3)
            .map(|k| t[k] * a.components()[k] * b.components()[k])
            .sum();
        CorrelationData::new(joint, 0.0, 0.0)
    }
}

/// Hermitian operator squaring to the identity (+/-1 outcomes).
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomicObservable {
    matrix: ComplexMatrix,
    traceless: bool,
}

impl DichotomicObservable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tolerances::CONSTRUCTION {
            return Err(Error::InvalidArgument(format!(
                "observable is not Hermitian (defect {defect:.2e})"
            )));
        }
        let square_defect = matrix
            .matmul(&matrix)?
            .sub(&ComplexMatrix::identity(matrix.dim()))?
            .max_abs();
        if square_defect > tolerances::IDENTITY {
            return Err(Error::InvalidArgument(format!(
                "observable does not square to the identity (defect {square_defect:.2e})"
            )));
        }
        let traceless = matrix.trace().norm() <= tolerances::IDENTITY;
        Ok(DichotomicObservable { matrix, traceless })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// True when the operator trace vanishes (balanced +/-1 spectrum).
    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    pub fn transposed(&self) -> DichotomicObservable {
        DichotomicObservable {
            matrix: self.matrix.transpose(),
            traceless: self.traceless,
        }
    }
}

/// Random dichotomic observable `U diag(+1 x plus_count, -1 x rest) U*`
/// with `U` drawn Haar-style (Gram-Schmidt on Gaussian columns).
///
/// The eigenvalue signature is the caller's choice: equal counts give a
/// traceless observable (possible only in even dimension), anything else
/// a biased one.
pub fn random_dichotomic_observable(
    dim: usize,
    plus_count: usize,
    source: RandomSource,
) -> Result<DichotomicObservable> {
    if dim == 0 || plus_count > dim {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= plus_count <= dim, got {plus_count} of {dim}"
        )));
    }
    let mut rng = source.rng();
    let columns = random_unitary_columns(dim, &mut rng)?;
    let mut entries = vec![c(0., 0.); dim * dim];
    for (k, col) in columns.iter().enumerate() {
        let sign = if k < plus_count { 1.0 } else { -1.0 };
        for p in 0..dim {
            for q in 0..dim {
                entries[p * dim + q] += sign * col[p] * col[q].conj();
            }
        }
    }
    DichotomicObservable::new(ComplexMatrix::new(dim, entries)?)
}

/// Orthonormal columns from Gram-Schmidt on complex Gaussian draws.
fn random_unitary_columns(dim: usize, rng: &mut dyn rand_core::RngCore) -> Result<Vec<Vec<Complex64>>> {
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut attempts = 0;
        loop {
            let raw = crate::rng::normal_vector(rng, 2 * dim);
            let mut v: Vec<Complex64> = raw.chunks_exact(2).map(|p| c(p[0], p[1])).collect();
            for u in &columns {
                let overlap: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
            let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
            if norm > 1e-6 {
                for x in &mut v {
                    *x /= norm;
                }
                columns.push(v);
                break;
            }
            attempts += 1;
            if attempts > 100 {
                return Err(Error::Internal(
                    "Gram-Schmidt kept drawing degenerate columns".to_string(),
                ));
            }
        }
    }
    Ok(columns)
}

/// Spin observable `n . sigma` for a unit vector `n` in `R^3`.
pub fn projective_qubit_observable(n: &UnitVector) -> Result<DichotomicObservable> {
    if n.dim() != 3 {
        return Err(Error::InvalidArgument(
            "spin direction must be a unit vector in R^3".to_string(),
        ));
    }
    let [x, y, z] = [n.components()[0], n.components()[1], n.components()[2]];
    let matrix = ComplexMatrix::new(
        2,
        vec![c(z, 0.), c(x, -y), c(x, y), c(-z, 0.)],
    )?;
    DichotomicObservable::new(matrix)
}

/// The joint and marginal expectations of one +/-1 x +/-1 measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationData {
    joint: f64,
    marginal_a: f64,
    marginal_b: f64,
}

impl CorrelationData {
    pub fn new(joint: f64, marginal_a: f64, marginal_b: f64) -> Result<Self> {
        for (name, v) in [("joint", joint), ("marginal_a", marginal_a), ("marginal_b", marginal_b)]
        {
            if !v.is_finite() || v.abs() > 1.0 + tolerances::IDENTITY {
                return Err(Error::InvalidArgument(format!(
                    "{name} expectation {v} outside [-1, 1]"
                )));
            }
        }
        Ok(CorrelationData {
            joint,
            marginal_a,
            marginal_b,
        })
    }

    pub fn joint(&self) -> f64 {
        self.joint
    }

    pub fn marginal_a(&self) -> f64 {
        self.marginal_a
    }

    pub fn marginal_b(&self) -> f64 {
        self.marginal_b
    }

    /// Probability of the outcome pair `(alpha, beta)`, each +/-1:
    /// `(1 + alpha <A> + beta <B> + alpha beta <AB>) / 4`.
    ///
    /// A result below `-PROBABILITY_FLOOR` means the expectations cannot
    /// come from a joint distribution and is reported as an error; small
    /// negative rounding noise is returned as-is.
    pub fn outcome_probability(&self, alpha: i8, beta: i8) -> Result<f64> {
        if alpha.abs() != 1 || beta.abs() != 1 {
            return Err(Error::InvalidArgument(format!(
                "outcomes must be +/-1, got ({alpha}, {beta})"
            )));
        }
        let (a, b) = (alpha as f64, beta as f64);
        let p = (1.0 + a * self.marginal_a + b * self.marginal_b + a * b * self.joint) / 4.0;
        if p < -tolerances::PROBABILITY_FLOOR {
            return Err(Error::InconsistentCorrelation(format!(
                "outcome ({alpha}, {beta}) has probability {p:.3e}"
            )));
        }
        Ok(p)
    }
}

/// Correlation data `tr(rho (A (x) B))` for a bipartite state.
///
/// The state must live on `C^(dim A) (x) C^(dim B)`. Expectations of
/// Hermitian operators are provably real; an imaginary residue above
/// tolerance is reported as an internal error.
pub fn joint_correlation(
    rho: &DensityMatrix,
    a: &DichotomicObservable,
    b: &DichotomicObservable,
) -> Result<CorrelationData> {
    let (da, db) = (a.dim(), b.dim());
    if rho.dim() != da * db {
        return Err(Error::InvalidArgument(format!(
            "state dimension {} does not factor as {da} x {db}",
            rho.dim()
        )));
    }
    let ia = ComplexMatrix::identity(da);
    let ib = ComplexMatrix::identity(db);
    let joint = real_expectation(rho, &a.matrix().kron(b.matrix()))?;
    let marginal_a = real_expectation(rho, &a.matrix().kron(&ib))?;
    let marginal_b = real_expectation(rho, &ia.kron(b.matrix()))?;
    CorrelationData::new(joint, marginal_a, marginal_b)
}

fn real_expectation(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<f64> {
    let e = rho.expectation(m)?;
    if e.im.abs() > tolerances::IDENTITY {
        return Err(Error::Internal(format!(
            "expectation of a Hermitian operator has imaginary part {:.3e}",
            e.im
        )));
    }
    Ok(e.re)
}
