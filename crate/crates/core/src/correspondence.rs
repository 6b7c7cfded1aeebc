//! Two-way correspondence between quantum correlation experiments and
//! unit-vector strategies.
//!
//! Forward direction: a shared pure state with dichotomic observables
//! `A_i, B_j` yields unit vectors whose real inner products reproduce
//! the full correlation table `<psi| A_i (x) B_j |psi>`. Two
//! constructions are provided:
//!
//! * [`state_vectors`]: `a_i = realify((A_i (x) I) |psi>)` and
//!   `b_j = realify((I (x) B_j) |psi>)`, valid for any state and any
//!   dichotomic observables, in `2 d_A d_B` real dimensions.
//! * [`maximally_entangled_vectors`]: expansion coefficients of the
//!   observables over a traceless operator basis, valid on the
//!   maximally entangled state for traceless observables only, in
//!   `d^2 - 1` real dimensions. Dichotomic traceless observables need
//!   balanced eigenvalue counts, so odd local dimensions are rejected.
//!
//! Reverse direction ([`vectors_to_observables`]): any unit vectors
//! `a_i, b_j` in `R^n` are realized exactly by anticommuting-generator
//! observables on the maximally entangled state of local dimension
//! `2^floor(n/2)`, with correlation table equal to the Gram matrix
//! `a_i . b_j` and vanishing marginals.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, RealMatrix, UnitVector};
use crate::quantum::{pauli_x, pauli_y, pauli_z, DichotomicObservable, StateVector};
use crate::tolerances;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(Re x_1, Im x_1, Re x_2, ...)`: the standard real dot of two such
/// vectors is the real part of the complex inner product.
fn realify(v: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * v.len());
    for z in v {
        out.push(z.re);
        out.push(z.im);
    }
    out
}

/// Checks the squared norm lands on 1 (guaranteed analytically for the
/// constructions here) and wraps without renormalizing the direction.
fn unit_from_construction(components: Vec<f64>, what: &str) -> Result<UnitVector> {
    let norm_sq: f64 = components.iter().map(|x| x * x).sum();
    if (norm_sq - 1.0).abs() > tolerances::IDENTITY {
        return Err(Error::Internal(format!(
            "{what} should be unit by construction, got squared norm {norm_sq}"
        )));
    }
    UnitVector::new(components)
}

/// Hermitian basis of the traceless operators on `C^dim`, orthogonal
/// with `tr(g_k g_l) = dim * delta_kl`.
///
/// With that normalization the expansion coefficients of a traceless
/// dichotomic observable, `tr(A g_k)/dim`, form a unit vector. At
/// `dim = 2` the basis is exactly `X, Y, Z`.
#[derive(Debug, Clone)]
pub struct TracelessOperatorBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl TracelessOperatorBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "traceless operator basis needs dimension >= 2, got {dim}"
            )));
        }
        // Pairwise generators have tr(g^2) = 2; rescale to dim.
        let scale = libm::sqrt(dim as f64 / 2.0);
        let mut elements = Vec::with_capacity(dim * dim - 1);
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut sym = ComplexMatrix::zeros(dim);
                sym[(j, k)] = c(scale, 0.);
                sym[(k, j)] = c(scale, 0.);
                elements.push(sym);
                let mut asym = ComplexMatrix::zeros(dim);
                asym[(j, k)] = c(0., -scale);
                asym[(k, j)] = c(0., scale);
                elements.push(asym);
            }
        }
        for l in 1..dim {
            // diag(1, ..., 1, -l, 0, ..., 0) / sqrt(l (l+1) / 2), again
            // normalized to tr(g^2) = 2 before rescaling.
            let f = scale * libm::sqrt(2.0 / (l as f64 * (l + 1) as f64));
            let mut diag = ComplexMatrix::zeros(dim);
            for m in 0..l {
                diag[(m, m)] = c(f, 0.);
            }
            diag[(l, l)] = c(-(l as f64) * f, 0.);
            elements.push(diag);
        }
        Ok(TracelessOperatorBasis { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Expansion coefficients `tr(A g_k)/dim` of a Hermitian matrix over
    /// the basis; the identity component is not representable and is
    /// simply dropped.
    pub fn coefficients(&self, matrix: &ComplexMatrix) -> Result<Vec<f64>> {
        self.elements
            .iter()
            .map(|g| {
                let t = matrix.trace_product(g)?;
                if t.im.abs() > tolerances::IDENTITY {
                    return Err(Error::InvalidArgument(format!(
                        "expansion trace has imaginary part {}; matrix not Hermitian?",
                        t.im
                    )));
                }
                Ok(t.re / self.dim as f64)
            })
            .collect()
    }
}

/// Unit-vector strategy extracted from a quantum one, with the table of
/// pairwise inner products (equal to the quantum correlation table).
#[derive(Debug, Clone)]
pub struct VectorCorrespondence {
    alice: Vec<UnitVector>,
    bob: Vec<UnitVector>,
    table: RealMatrix,
    vector_dim: usize,
}

impl VectorCorrespondence {
    pub fn alice(&self) -> &[UnitVector] {
        &self.alice
    }

    pub fn bob(&self) -> &[UnitVector] {
        &self.bob
    }

    pub fn table(&self) -> &RealMatrix {
        &self.table
    }

    pub fn vector_dim(&self) -> usize {
        self.vector_dim
    }
}

fn common_dim(observables: &[DichotomicObservable], side: &str) -> Result<usize> {
    let first = observables
        .first()
        .ok_or_else(|| Error::InvalidArgument(format!("no observables for {side}")))?
        .dim();
    for o in observables {
        if o.dim() != first {
            return Err(Error::InvalidArgument(format!(
                "{side} observables mix dimensions {first} and {}",
                o.dim()
            )));
        }
    }
    Ok(first)
}

fn gram_table(alice: &[UnitVector], bob: &[UnitVector]) -> Result<RealMatrix> {
    let mut entries = Vec::with_capacity(alice.len() * bob.len());
    for a in alice {
        for b in bob {
            entries.push(a.dot(b)?);
        }
    }
    RealMatrix::new(alice.len(), bob.len(), entries)
}

/// Unit vectors `realify((A_i (x) I)|psi>)`, `realify((I (x) B_j)|psi>)`
/// for an arbitrary shared pure state on `C^(d_A) (x) C^(d_B)`.
///
/// Their dots reproduce `<psi| A_i (x) B_j |psi>` exactly because the
/// operators on the two factors commute and the product expectation is
/// real; dichotomy (`A^2 = I`) makes each vector unit. The vectors live
/// in `R^(2 d_A d_B)`.
pub fn state_vectors(
    state: &StateVector,
    alice: &[DichotomicObservable],
    bob: &[DichotomicObservable],
) -> Result<VectorCorrespondence> {
    let da = common_dim(alice, "alice")?;
    let db = common_dim(bob, "bob")?;
    if state.dim() != da * db {
        return Err(Error::InvalidArgument(format!(
            "state dimension {} is not the product of local dimensions {da} x {db}",
            state.dim()
        )));
    }
    let ia = ComplexMatrix::identity(da);
    let ib = ComplexMatrix::identity(db);
    let map_side = |obs: &[DichotomicObservable], on_alice: bool| -> Result<Vec<UnitVector>> {
        obs.iter()
            .map(|o| {
                let big = if on_alice {
                    o.matrix().kron(&ib)
                } else {
                    ia.kron(o.matrix())
                };
                let image = big.mul_vec(state.amplitudes())?;
                unit_from_construction(realify(&image), "state image of a dichotomic observable")
            })
            .collect()
    };
    let a_vecs = map_side(alice, true)?;
    let b_vecs = map_side(bob, false)?;
    let table = gram_table(&a_vecs, &b_vecs)?;
    Ok(VectorCorrespondence {
        vector_dim: 2 * da * db,
        alice: a_vecs,
        bob: b_vecs,
        table,
    })
}

/// Expansion-coefficient vectors over a traceless operator basis; the
/// compact variant of [`state_vectors`] for the maximally entangled
/// state, in `d^2 - 1` real dimensions instead of `2 d^2`.
///
/// On `sum_k |kk> / sqrt(d)` the correlations are `tr(A_i B_j^T)/d`,
/// which equals the dot of the coefficient vectors of `A_i` and `B_j^T`
/// provided both are traceless. Non-traceless observables are rejected;
/// in odd dimensions no dichotomic observable is traceless, so those
/// always land on the error path.
pub fn maximally_entangled_vectors(
    alice: &[DichotomicObservable],
    bob: &[DichotomicObservable],
) -> Result<VectorCorrespondence> {
    let da = common_dim(alice, "alice")?;
    let db = common_dim(bob, "bob")?;
    if da != db {
        return Err(Error::InvalidArgument(format!(
            "both parties must share the local dimension, got {da} and {db}"
        )));
    }
    for o in alice.iter().chain(bob) {
        if !o.is_traceless() {
            return Err(Error::InvalidArgument(format!(
                "observable with trace {:.3} is not traceless; the coefficient construction \
                 needs balanced +1/-1 eigenvalue counts (impossible in odd dimensions)",
                o.matrix().trace().re
            )));
        }
    }
    let basis = TracelessOperatorBasis::new(da)?;
    let a_vecs: Vec<UnitVector> = alice
        .iter()
        .map(|o| {
            unit_from_construction(
                basis.coefficients(o.matrix())?,
                "coefficient vector of a traceless dichotomic observable",
            )
        })
        .collect::<Result<_>>()?;
    let b_vecs: Vec<UnitVector> = bob
        .iter()
        .map(|o| {
            unit_from_construction(
                basis.coefficients(o.transposed().matrix())?,
                "coefficient vector of a traceless dichotomic observable",
            )
        })
        .collect::<Result<_>>()?;
    let table = gram_table(&a_vecs, &b_vecs)?;
    Ok(VectorCorrespondence {
        vector_dim: da * da - 1,
        alice: a_vecs,
        bob: b_vecs,
        table,
    })
}

/// Pairwise anticommuting Hermitian involutions on `C^local_dim`,
/// `local_dim = 2^floor(count/2)`: the alternating X/Y construction with
/// Z strings in front, plus an all-Z element when `count` is odd.
#[derive(Debug, Clone)]
pub struct CliffordGenerators {
    local_dim: usize,
    elements: Vec<ComplexMatrix>,
}

/// Largest generator count accepted; `2^(14/2) = 128`-dimensional
/// matrices are where dense kron products stop being reasonable here.
pub const CLIFFORD_MAX_GENERATORS: usize = 12;

pub fn clifford_generators(count: usize) -> Result<CliffordGenerators> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "need at least one generator".to_string(),
        ));
    }
    if count > CLIFFORD_MAX_GENERATORS {
        return Err(Error::ResourceLimit(format!(
            "{count} generators exceed the supported {CLIFFORD_MAX_GENERATORS}"
        )));
    }
    let qubits = count / 2;
    let local_dim = 1usize << qubits;
    // count = 1 degenerates to the 1 x 1 identity: a valid involution,
    // though without tracelessness.
    let mut elements = Vec::with_capacity(count);
    let string = |head: usize, mid: Option<ComplexMatrix>| -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(1);
        for _ in 0..head {
            m = m.kron(&pauli_z());
        }
        if let Some(op) = mid {
            m = m.kron(&op);
        }
        while m.dim() < local_dim {
            m = m.kron(&ComplexMatrix::identity(2));
        }
        m
    };
    for j in 0..qubits {
        elements.push(string(j, Some(pauli_x())));
        elements.push(string(j, Some(pauli_y())));
    }
    if count % 2 == 1 {
        elements.push(string(qubits, None));
    }
    Ok(CliffordGenerators {
        local_dim,
        elements,
    })
}

impl CliffordGenerators {
    pub fn count(&self) -> usize {
        self.elements.len()
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// Quantum realization of a unit-vector strategy: observables, the
/// maximally entangled state they act on, and the correlation table
/// (equal to the input Gram matrix).
#[derive(Debug, Clone)]
pub struct ObservableRealization {
    alice: Vec<DichotomicObservable>,
    bob: Vec<DichotomicObservable>,
    state: StateVector,
    table: RealMatrix,
    local_dim: usize,
}

impl ObservableRealization {
    pub fn alice(&self) -> &[DichotomicObservable] {
        &self.alice
    }

    pub fn bob(&self) -> &[DichotomicObservable] {
        &self.bob
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn table(&self) -> &RealMatrix {
        &self.table
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }
}

/// Realizes unit vectors in `R^n` (`2 <= n <= 12`) as a quantum
/// strategy: `A_i = sum_k a_ik g_k` and `B_j = (sum_k b_jk g_k)^T` over
/// anticommuting generators, measured on the maximally entangled state
/// of local dimension `2^floor(n/2)`.
///
/// Anticommutation squares the combinations back to the identity, so
/// the observables are dichotomic; generator orthogonality
/// (`tr(g_k g_l) = d delta_kl`) makes the correlation table equal the
/// Gram matrix `a_i . b_j`, and tracelessness kills both marginals.
/// These identities are verified on the constructed operators before
/// returning.
pub fn vectors_to_observables(
    a: &[UnitVector],
    b: &[UnitVector],
) -> Result<ObservableRealization> {
    let first = a
        .iter()
        .chain(b)
        .next()
        .ok_or_else(|| Error::InvalidArgument("no vectors given".to_string()))?
        .dim();
    if first < 2 {
        return Err(Error::InvalidArgument(
            "vector realization needs dimension >= 2".to_string(),
        ));
    }
    for v in a.iter().chain(b) {
        if v.dim() != first {
            return Err(Error::InvalidArgument(format!(
                "vectors mix dimensions {first} and {}",
                v.dim()
            )));
        }
    }
    let gens = clifford_generators(first)?;
    let d = gens.local_dim();
    let combine = |v: &UnitVector| -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d);
        for (coeff, g) in v.components().iter().zip(gens.elements()) {
            m = m.add(&g.scaled_re(*coeff)).expect("same dimension");
        }
        m
    };
    let alice_ops: Vec<ComplexMatrix> = a.iter().map(combine).collect();
    let bob_ops: Vec<ComplexMatrix> = b.iter().map(combine).collect();
    for op in alice_ops.iter().chain(&bob_ops) {
        if op.trace().norm() / d as f64 > tolerances::IDENTITY {
            return Err(Error::Internal(
                "generator combination should be traceless".to_string(),
            ));
        }
    }
    let mut table = RealMatrix::zeros(a.len(), b.len())?;
    for (i, m) in alice_ops.iter().enumerate() {
        for (j, n) in bob_ops.iter().enumerate() {
            let t = m.trace_product(n)?;
            let gram = a[i].dot(&b[j])?;
            if (t.re / d as f64 - gram).abs() > tolerances::IDENTITY || t.im.abs() > tolerances::IDENTITY {
                return Err(Error::Internal(format!(
                    "correlation {} deviates from the Gram entry {gram}",
                    t.re / d as f64
                )));
            }
            table[(i, j)] = t.re / d as f64;
        }
    }
    let alice: Vec<DichotomicObservable> = alice_ops
        .into_iter()
        .map(DichotomicObservable::new)
        .collect::<Result<_>>()?;
    let bob: Vec<DichotomicObservable> = bob_ops
        .into_iter()
        .map(|m| DichotomicObservable::new(m.transpose()))
        .collect::<Result<_>>()?;
    Ok(ObservableRealization {
        alice,
        bob,
        state: StateVector::maximally_entangled(d)?,
        table,
        local_dim: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    use alloc::vec;
    use crate::quantum::{
        joint_correlation, projective_qubit_observable, random_dichotomic_observable,
    };
    use crate::rng::{sample_sphere, RandomSource};

    #[test]
    fn traceless_basis_is_orthogonal_and_reduces_to_paulis() {
        let basis = TracelessOperatorBasis::new(2).unwrap();
        assert_eq!(basis.len(), 3);
        assert_eq!(basis.elements()[0].entries(), pauli_x().entries());
        assert_eq!(basis.elements()[1].entries(), pauli_y().entries());
        assert_eq!(basis.elements()[2].entries(), pauli_z().entries());
        for dim in [2usize, 3, 4] {
            let basis = TracelessOperatorBasis::new(dim).unwrap();
            assert_eq!(basis.len(), dim * dim - 1);
            for (i, g) in basis.elements().iter().enumerate() {
                assert!(g.trace().norm() < 1e-14);
                assert!(g.hermiticity_defect() < 1e-14);
                for (j, h) in basis.elements().iter().enumerate() {
                    let t = g.trace_product(h).unwrap();
                    let expected = if i == j { dim as f64 } else { 0.0 };
                    assert_relative_eq!(t.re, expected, epsilon = 1e-12);
                    assert!(t.im.abs() < 1e-12);
                }
            }
        }
        assert!(TracelessOperatorBasis::new(1).is_err());
    }

    #[test]
    fn clifford_generators_anticommute() {
        for n in 1..=7 {
            let gens = clifford_generators(n).unwrap();
            assert_eq!(gens.count(), n);
            assert_eq!(gens.local_dim(), 1 << (n / 2));
            let d = gens.local_dim();
            let id = ComplexMatrix::identity(d);
            for (i, g) in gens.elements().iter().enumerate() {
                for (j, h) in gens.elements().iter().enumerate() {
                    let anti = g.matmul(h).unwrap().add(&h.matmul(g).unwrap()).unwrap();
                    let expected = if i == j { id.scaled_re(2.0) } else { ComplexMatrix::zeros(d) };
                    assert!(anti.sub(&expected).unwrap().max_abs() < 1e-14);
                }
                if n >= 2 {
                    assert!(g.trace().norm() < 1e-14);
                }
            }
        }
        assert!(clifford_generators(0).is_err());
        assert!(matches!(
            clifford_generators(13),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn singlet_vectors_reproduce_spin_correlations() {
        let singlet = StateVector::singlet();
        let mut rng = RandomSource::new(41).rng();
        let a_dirs: Vec<UnitVector> = (0..3).map(|_| sample_sphere(&mut rng, 3).unwrap()).collect();
        let b_dirs: Vec<UnitVector> = (0..2).map(|_| sample_sphere(&mut rng, 3).unwrap()).collect();
        let alice: Vec<DichotomicObservable> = a_dirs
            .iter()
            .map(|n| projective_qubit_observable(n).unwrap())
            .collect();
        let bob: Vec<DichotomicObservable> = b_dirs
            .iter()
            .map(|n| projective_qubit_observable(n).unwrap())
            .collect();
        let corr = state_vectors(&singlet, &alice, &bob).unwrap();
        assert_eq!(corr.vector_dim(), 8);
        assert_eq!(corr.table().rows(), 3);
        for (i, na) in a_dirs.iter().enumerate() {
            for (j, nb) in b_dirs.iter().enumerate() {
                assert_relative_eq!(
                    corr.table()[(i, j)],
                    -na.dot(nb).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn state_vectors_match_general_quantum_correlations() {
        // Random (not necessarily traceless) observables on unequal
        // local dimensions, against the direct expectation oracle.
        let alice: Vec<DichotomicObservable> = (0..2)
            .map(|k| random_dichotomic_observable(2, 1, RandomSource::new(100 + k)).unwrap())
            .collect();
        let bob: Vec<DichotomicObservable> = (0..2)
            .map(|k| random_dichotomic_observable(3, 2, RandomSource::new(200 + k)).unwrap())
            .collect();
        let mut amplitudes = Vec::new();
        let mut rng = RandomSource::new(7).rng();
        let raw = crate::rng::normal_vector(&mut rng, 12);
        for p in raw.chunks_exact(2) {
            amplitudes.push(Complex64::new(p[0], p[1]));
        }
        let state = StateVector::new(amplitudes).unwrap();
        let corr = state_vectors(&state, &alice, &bob).unwrap();
        assert_eq!(corr.vector_dim(), 12);
        let rho = state.density();
        for (i, oa) in alice.iter().enumerate() {
            for (j, ob) in bob.iter().enumerate() {
                let oracle = joint_correlation(&rho, oa, ob).unwrap().joint();
                assert_relative_eq!(corr.table()[(i, j)], oracle, epsilon = 1e-12);
            }
        }
        // Dimension mismatch between state and observables.
        assert!(state_vectors(&StateVector::singlet(), &alice, &bob).is_err());
    }

    #[test]
    fn coefficient_vectors_of_qubit_spins_are_the_directions() {
        let n = UnitVector::new(vec![0.6, 0.0, 0.8]).unwrap();
        let m = UnitVector::new(vec![0.0, 1.0, 0.0]).unwrap();
        let alice = vec![projective_qubit_observable(&n).unwrap()];
        let bob = vec![projective_qubit_observable(&m).unwrap()];
        let corr = maximally_entangled_vectors(&alice, &bob).unwrap();
        assert_eq!(corr.vector_dim(), 3);
        let a = corr.alice()[0].components();
        assert_relative_eq!(a[0], 0.6, epsilon = 1e-14);
        assert_relative_eq!(a[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(a[2], 0.8, epsilon = 1e-14);
        // Bob's side expands the transpose: Y flips sign.
        let b = corr.bob()[0].components();
        assert_relative_eq!(b[1], -1.0, epsilon = 1e-14);
        // Table agrees with the direct expectation on |phi+>.
        let rho = StateVector::maximally_entangled(2).unwrap().density();
        let oracle = joint_correlation(&rho, &alice[0], &bob[0]).unwrap().joint();
        assert_relative_eq!(corr.table()[(0, 0)], oracle, epsilon = 1e-12);
    }

    #[test]
    fn coefficient_construction_handles_ququarts_and_rejects_bias() {
        let alice: Vec<DichotomicObservable> = (0..2)
            .map(|k| random_dichotomic_observable(4, 2, RandomSource::new(300 + k)).unwrap())
            .collect();
        let bob: Vec<DichotomicObservable> = (0..3)
            .map(|k| random_dichotomic_observable(4, 2, RandomSource::new(400 + k)).unwrap())
            .collect();
        let corr = maximally_entangled_vectors(&alice, &bob).unwrap();
        assert_eq!(corr.vector_dim(), 15);
        let rho = StateVector::maximally_entangled(4).unwrap().density();
        for (i, oa) in alice.iter().enumerate() {
            for (j, ob) in bob.iter().enumerate() {
                let oracle = joint_correlation(&rho, oa, ob).unwrap().joint();
                assert_relative_eq!(corr.table()[(i, j)], oracle, epsilon = 1e-12);
            }
        }
        // Biased eigenvalue counts are rejected even in even dimensions.
        let biased = vec![random_dichotomic_observable(4, 3, RandomSource::new(5)).unwrap()];
        assert!(maximally_entangled_vectors(&biased, &bob).is_err());
        // Odd local dimension: every dichotomic observable is biased.
        let qutrit = vec![random_dichotomic_observable(3, 2, RandomSource::new(6)).unwrap()];
        assert!(!qutrit[0].is_traceless());
        assert!(maximally_entangled_vectors(&qutrit, &qutrit).is_err());
    }

    #[test]
    fn vector_realization_reproduces_gram_table() {
        let mut rng = RandomSource::new(77).rng();
        for n in [2usize, 3, 5] {
            let a: Vec<UnitVector> = (0..3).map(|_| sample_sphere(&mut rng, n).unwrap()).collect();
            let b: Vec<UnitVector> = (0..2).map(|_| sample_sphere(&mut rng, n).unwrap()).collect();
            let real = vectors_to_observables(&a, &b).unwrap();
            assert_eq!(real.local_dim(), 1 << (n / 2));
            // The in-construction check already compares against Gram;
            // cross-check via the full tensor-product expectation.
            let rho = real.state().density();
            for (i, av) in a.iter().enumerate() {
                for (j, bv) in b.iter().enumerate() {
                    let oracle = joint_correlation(&rho, &real.alice()[i], &real.bob()[j]).unwrap().joint();
                    assert_relative_eq!(real.table()[(i, j)], oracle, epsilon = 1e-12);
                    assert_relative_eq!(real.table()[(i, j)], av.dot(bv).unwrap(), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn realized_strategies_roundtrip_through_both_extractions() {
        let mut rng = RandomSource::new(78).rng();
        let n = 4;
        let a: Vec<UnitVector> = (0..2).map(|_| sample_sphere(&mut rng, n).unwrap()).collect();
        let b: Vec<UnitVector> = (0..2).map(|_| sample_sphere(&mut rng, n).unwrap()).collect();
        let real = vectors_to_observables(&a, &b).unwrap();
        let via_state = state_vectors(real.state(), real.alice(), real.bob()).unwrap();
        let via_coeffs = maximally_entangled_vectors(real.alice(), real.bob()).unwrap();
        for (i, av) in a.iter().enumerate() {
            for (j, bv) in b.iter().enumerate() {
                let gram = av.dot(bv).unwrap();
                assert_relative_eq!(via_state.table()[(i, j)], gram, epsilon = 1e-10);
                assert_relative_eq!(via_coeffs.table()[(i, j)], gram, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn vector_realization_input_validation() {
        let e1 = UnitVector::axis(1, 0).unwrap();
        assert!(vectors_to_observables(core::slice::from_ref(&e1), core::slice::from_ref(&e1)).is_err());
        assert!(vectors_to_observables(&[], &[]).is_err());
        let v2 = UnitVector::axis(2, 0).unwrap();
        let v3 = UnitVector::axis(3, 0).unwrap();
        assert!(vectors_to_observables(&[v2], &[v3]).is_err());
        let v13: Vec<UnitVector> = vec![UnitVector::axis(13, 0).unwrap()];
        assert!(matches!(
            vectors_to_observables(&v13, &v13),
            Err(Error::ResourceLimit(_))
        ));
    }
}
