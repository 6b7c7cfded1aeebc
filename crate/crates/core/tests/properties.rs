//! Property-based invariants. Inputs are generated by proptest; each
//! property states something that must hold for every valid input, not a
//! checked example.

use proptest::prelude::*;

use bellkit_core::bell::{local_bound, seesaw_vector_bound, BellCorrelationInequality};
use bellkit_core::krivine::sphere_embedding;
use bellkit_core::lhv::{counts_to_report, sample_counts, werner_model};
use bellkit_core::linalg::{RealMatrix, UnitVector};
use bellkit_core::quantum::{BellDiagonalState, CorrelationData};
use bellkit_core::rng::RandomSource;

fn nonzero_vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, dim).prop_filter("needs usable norm", |v| {
        v.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-3
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RealMatrix> {
    prop::collection::vec(-5.0..5.0f64, rows * cols)
        .prop_map(move |entries| RealMatrix::new(rows, cols, entries).unwrap())
}

proptest! {
    #[test]
    fn unit_vector_normalization_is_idempotent(dim in 1usize..6, raw in nonzero_vector(5)) {
        let v = UnitVector::new(raw[..dim].to_vec()).unwrap();
        let norm: f64 = v.components().iter().map(|x| x * x).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        let again = UnitVector::new(v.components().to_vec()).unwrap();
        for (x, y) in v.components().iter().zip(again.components()) {
            prop_assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn local_bound_respects_matrix_symmetries(m in matrix(3, 4), scale in 0.1..4.0f64) {
        let bound = local_bound(&m).unwrap();
        prop_assert!(bound >= 0.0);

        // Transposing swaps the roles of the two parties.
        let transposed = local_bound(&m.transpose()).unwrap();
        prop_assert!((bound - transposed).abs() <= 1e-9 * bound.max(1.0));

        // Flipping the sign of one row is absorbed by that setting's sign.
        let mut flipped = m.clone();
        for j in 0..flipped.cols() {
            flipped[(1, j)] = -flipped[(1, j)];
        }
        let flipped_bound = local_bound(&flipped).unwrap();
        prop_assert!((bound - flipped_bound).abs() <= 1e-9 * bound.max(1.0));

        // Positive scaling is linear.
        let scaled = local_bound(&m.scaled(scale)).unwrap();
        prop_assert!((scaled - scale * bound).abs() <= 1e-9 * (scale * bound).max(1.0));
    }

    #[test]
    fn outcome_probabilities_form_a_distribution_or_flag_inconsistency(
        joint in -1.0..1.0f64,
        ma in -1.0..1.0f64,
        mb in -1.0..1.0f64,
    ) {
        let data = CorrelationData::new(joint, ma, mb).unwrap();
        let outcomes: Vec<_> = [(-1i8, -1i8), (-1, 1), (1, -1), (1, 1)]
            .iter()
            .map(|(a, b)| data.outcome_probability(*a, *b))
            .collect();
        if outcomes.iter().all(|p| p.is_ok()) {
            // Consistent triple: the four outcomes are a distribution.
            let probabilities: Vec<f64> = outcomes.into_iter().map(|p| p.unwrap()).collect();
            let total: f64 = probabilities.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            for p in probabilities {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
            }
        } else {
            // Inconsistent triple: the failure must be reported as such,
            // not as some other error kind.
            let failure = outcomes.into_iter().find(|p| p.is_err()).unwrap();
            prop_assert!(matches!(
                failure.unwrap_err(),
                bellkit_core::Error::InconsistentCorrelation(_)
            ));
        }
    }

    #[test]
    fn bell_diagonal_state_roundtrips_through_its_correlation_triple(
        raw in prop::collection::vec(0.01..1.0f64, 4),
    ) {
        let total: f64 = raw.iter().sum();
        let probabilities = [raw[0] / total, raw[1] / total, raw[2] / total, raw[3] / total];
        let state = BellDiagonalState::from_probabilities(probabilities).unwrap();
        let rebuilt = BellDiagonalState::from_correlation_triple(state.correlation_triple()).unwrap();
        for (p, q) in state.probabilities().iter().zip(rebuilt.probabilities()) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn sample_counts_merge_exactly_at_any_split(
        split in 1u64..399,
        seed in 0u64..1000,
    ) {
        let model = werner_model();
        let a = UnitVector::axis(3, 0).unwrap();
        let b = UnitVector::axis(3, 2).unwrap();
        let source = RandomSource::new(seed);
        let total = 400u64;
        let whole = sample_counts(&model, &a, &b, 0..total, source).unwrap();
        let left = sample_counts(&model, &a, &b, 0..split, source).unwrap();
        let right = sample_counts(&model, &a, &b, split..total, source).unwrap();
        prop_assert_eq!(whole, left.merge(right));
        let report = counts_to_report(&whole).unwrap();
        prop_assert!(report.joint.mean.abs() <= 1.0);
        prop_assert!(report.joint.stderr > 0.0);
    }
}

proptest! {
    // The cases below run heavier numerics; keep the case count small.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn seesaw_never_loses_to_the_deterministic_bound(m in matrix(3, 3)) {
        prop_assume!(local_bound(&m).unwrap() > 1e-6);
        let inequality = BellCorrelationInequality::from_matrix(m)
            .unwrap()
            .normalize()
            .unwrap();
        let report = seesaw_vector_bound(&inequality, 2, 2, RandomSource::new(7)).unwrap();
        prop_assert!(report.ratio >= 1.0 - 1e-9);
        let replay = inequality
            .evaluate_vectors(&report.alice_vectors, &report.bob_vectors)
            .unwrap();
        prop_assert!((replay - report.value).abs() <= 1e-9);
    }

    #[test]
    fn embedding_inner_products_stay_within_the_advertised_tail(
        left in nonzero_vector(3),
        right in nonzero_vector(3),
    ) {
        let embedding = sphere_embedding(1e-4).unwrap();
        let a = UnitVector::new(left).unwrap();
        let b = UnitVector::new(right).unwrap();
        let inner = embedding.inner_product(&a, &b).unwrap();
        let target = (embedding.scale().c * a.dot(&b).unwrap()).sin();
        prop_assert!((inner - target).abs() <= embedding.tail_bound() + 1e-12);
        prop_assert!(inner.abs() <= 1.0 + 1e-12);
    }
}
