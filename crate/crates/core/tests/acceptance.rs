//! The acceptance gate. Ten numbered criteria run strictly in order, each
//! printing exactly one PASS/FAIL line with its headline numbers and wall
//! time; the process exits nonzero if any criterion fails or overruns its
//! budget. Monte Carlo criteria allow at most one retried instance with
//! the next seed (a 4-sigma check at N = 10^6 has a ~6e-5 false-failure
//! rate, so a zero-retry policy would make the suite flaky by design).

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::time::{Duration, Instant};

use bellkit_core::bell::{
    local_bound, seesaw_vector_bound, violation_threshold, BellCorrelationInequality,
};
use bellkit_core::correspondence::{
    maximally_entangled_vectors, state_vectors, vectors_to_observables,
};
use bellkit_core::inn22;
use bellkit_core::krivine::{
    circle_scale, grothendieck_ledger, ledger_reciprocal_defect, rounding_model, solve_c3,
    sphere_embedding, taylor_scale,
};
use bellkit_core::lhv::{estimate, werner_model, GaussianSampler, LhvModel, SignRule};
use bellkit_core::linalg::{ComplexMatrix, RealMatrix, UnitVector};
use bellkit_core::quantum::{joint_correlation, random_dichotomic_observable, StateVector};
use bellkit_core::rng::{normal_vector, sample_sphere, RandomSource};
use bellkit_core::Error;
use num_complex::Complex64;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion {
            name: "three-dimensional scale root",
            budget: Some(Duration::from_secs(1)),
            run: criterion_01_scale_root,
        },
        Criterion {
            name: "dimension-free construction",
            budget: None,
            run: criterion_02_dimension_free,
        },
        Criterion {
            name: "two-setting bound and threshold",
            budget: Some(Duration::from_secs(1)),
            run: criterion_03_two_setting,
        },
        Criterion {
            name: "sphere model Monte Carlo",
            budget: Some(Duration::from_secs(30)),
            run: criterion_04_sphere_model,
        },
        Criterion {
            name: "rounding model in three dimensions",
            budget: None,
            run: criterion_05_rounding_model_3d,
        },
        Criterion {
            name: "planar rounding model",
            budget: None,
            run: criterion_06_planar_model,
        },
        Criterion {
            name: "observable-vector correspondence",
            budget: Some(Duration::from_secs(10)),
            run: criterion_07_correspondence,
        },
        Criterion {
            name: "multi-setting family decomposition",
            budget: Some(Duration::from_secs(60)),
            run: criterion_08_family_decomposition,
        },
        Criterion {
            name: "sign-rounding identity",
            budget: None,
            run: criterion_09_rounding_identity,
        },
        Criterion {
            name: "dimension-three envelope",
            budget: None,
            run: criterion_10_envelope,
        },
    ];

    let mut failures = 0usize;
    for (index, criterion) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = (criterion.run)();
        let elapsed = start.elapsed();
        let stamp = format!("{} ms", elapsed.as_millis());
        match result {
            Ok(detail) => {
                if criterion.budget.is_some_and(|budget| elapsed > budget) {
                    failures += 1;
                    println!(
                        "acceptance {:02} {}: FAIL (exceeded {} s budget: {stamp})",
                        index + 1,
                        criterion.name,
                        criterion.budget.unwrap().as_secs(),
                    );
                } else {
                    println!(
                        "acceptance {:02} {}: PASS ({detail}; {stamp})",
                        index + 1,
                        criterion.name,
                    );
                }
            }
            Err(message) => {
                failures += 1;
                println!(
                    "acceptance {:02} {}: FAIL ({message}; {stamp})",
                    index + 1,
                    criterion.name,
                );
            }
        }
    }
    if failures > 0 {
        eprintln!("acceptance: {failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all {} criteria passed", criteria.len());
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn in_window(label: &str, value: f64, lo: f64, hi: f64) -> Result<(), String> {
    ensure((lo..=hi).contains(&value), || {
        format!("{label} = {value} outside [{lo}, {hi}]")
    })
}

fn close(label: &str, value: f64, target: f64, tol: f64) -> Result<(), String> {
    ensure((value - target).abs() <= tol, || {
        format!("{label} = {value} not within {tol:.1e} of {target}")
    })
}

fn lift<T>(result: Result<T, Error>, context: &str) -> Result<T, String> {
    result.map_err(|e| format!("{context}: {e}"))
}

fn criterion_01_scale_root() -> Outcome {
    let root = lift(solve_c3(), "root solve")?;
    in_window("c", root.c, 1.0350, 1.0370)?;
    in_window("upper bound", root.upper_bound(), 1.5153, 1.5173)?;
    in_window("visibility", root.visibility(), 0.6585, 0.6605)?;
    ensure(root.residual <= 1e-10, || {
        format!("residual {} above 1e-10", root.residual)
    })?;
    Ok(format!(
        "c = {:.6}, bound = {:.6}, visibility = {:.6}, residual = {:.1e}",
        root.c,
        root.upper_bound(),
        root.visibility(),
        root.residual
    ))
}

fn criterion_02_dimension_free() -> Outcome {
    let root = taylor_scale();
    let log_form = (1.0 + SQRT_2).ln();
    close("c", root.c, log_form, 1e-10)?;
    close("upper bound", root.upper_bound(), 1.7822, 1e-4)?;
    close("visibility", root.visibility(), 0.5611, 1e-4)?;
    let ledger = lift(grothendieck_ledger(), "ledger")?;
    let defect = ledger_reciprocal_defect(&ledger);
    ensure(defect <= 5e-5, || {
        format!("ledger reciprocal defect {defect} above 5e-5")
    })?;
    Ok(format!(
        "c = ln(1+sqrt 2) to {:.1e}, bound = {:.6}, visibility = {:.6}, ledger defect = {:.1e}",
        (root.c - log_form).abs(),
        root.upper_bound(),
        root.visibility(),
        defect
    ))
}

fn criterion_03_two_setting() -> Outcome {
    let raw_matrix =
        lift(RealMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]), "matrix")?;
    let raw = lift(local_bound(&raw_matrix), "local bound")?;
    ensure(raw == 2.0, || format!("raw local bound {raw} != 2"))?;
    let normalized = BellCorrelationInequality::chsh();
    let report = lift(
        seesaw_vector_bound(&normalized, 2, 10, RandomSource::new(31)),
        "see-saw",
    )?;
    close("see-saw value", report.value, SQRT_2, 1e-6)?;
    let threshold = violation_threshold(&report);
    ensure(threshold.violation, || "no violation flagged".to_string())?;
    // The window is centered on the five-digit pinned value, not 1/sqrt(2).
    #[allow(clippy::approx_constant)]
    close("threshold", threshold.visibility, 0.70711, 1e-5)?;
    Ok(format!(
        "raw bound = 2 exactly, see-saw value = {:.8}, threshold = {:.6}",
        report.value, threshold.visibility
    ))
}

/// Runs `check` on seeds `base` and, if it fails, once more on `base + 1`;
/// returns whether a retry was spent.
fn with_one_retry(
    base: u64,
    check: impl Fn(u64) -> Result<(), String>,
) -> Result<bool, String> {
    match check(base) {
        Ok(()) => Ok(false),
        Err(first) => match check(base + 1) {
            Ok(()) => Ok(true),
            Err(second) => Err(format!("{first}; retry also failed: {second}")),
        },
    }
}

fn criterion_04_sphere_model() -> Outcome {
    let model = werner_model();
    let samples = 1_000_000u64;
    let mut retries = 0usize;
    for pair in 0..20u64 {
        let retried = with_one_retry(4_000 + pair * 2, |seed| {
            let mut rng = RandomSource::new(seed).rng();
            let a = lift(sample_sphere(&mut rng, 3), "direction")?;
            let b = lift(sample_sphere(&mut rng, 3), "direction")?;
            let dot = lift(a.dot(&b), "dot")?;
            let report = lift(
                estimate(&model, &a, &b, samples, RandomSource::new(seed ^ 0x57AA)),
                "estimate",
            )?;
            let target = -0.5 * dot;
            ensure(
                (report.joint.mean - target).abs() <= 4.0 * report.joint.stderr,
                || {
                    format!(
                        "pair {pair}: joint {} vs {target} (stderr {:.1e})",
                        report.joint.mean, report.joint.stderr
                    )
                },
            )?;
            ensure(
                report.marginal_a.mean.abs() <= 4.0 * report.marginal_a.stderr,
                || format!("pair {pair}: alice marginal {}", report.marginal_a.mean),
            )?;
            ensure(
                report.marginal_b.mean.abs() <= 4.0 * report.marginal_b.stderr,
                || format!("pair {pair}: bob marginal {}", report.marginal_b.mean),
            )?;
            Ok(())
        })?;
        retries += retried as usize;
    }
    ensure(retries <= 1, || {
        format!("{retries} pairs needed retries, budget is 1")
    })?;
    Ok(format!(
        "20 pairs x 10^6 samples within 4 sigma of -(a.b)/2, retries = {retries}"
    ))
}

fn criterion_05_rounding_model_3d() -> Outcome {
    let embedding = lift(sphere_embedding(1e-6), "embedding")?;
    ensure(embedding.tail_bound() <= 1e-6, || {
        format!("tail bound {} above 1e-6", embedding.tail_bound())
    })?;
    let quadrature_root = lift(solve_c3(), "root")?;
    let gap = (embedding.scale().c - quadrature_root.c).abs();
    ensure(gap <= 1e-6, || {
        format!("embedding root differs from quadrature root by {gap}")
    })?;
    let visibility = embedding.scale().visibility();
    let hidden_dim = embedding.target_dim();
    let tail_bound = embedding.tail_bound();
    let model = lift(rounding_model(embedding, true), "model")?;
    let samples = 1_000_000u64;
    let mut retries = 0usize;
    for pair in 0..10u64 {
        let retried = with_one_retry(5_000 + pair * 2, |seed| {
            let mut rng = RandomSource::new(seed).rng();
            let a = lift(sample_sphere(&mut rng, 3), "direction")?;
            let b = lift(sample_sphere(&mut rng, 3), "direction")?;
            let dot = lift(a.dot(&b), "dot")?;
            let report = lift(
                estimate(&model, &a, &b, samples, RandomSource::new(seed ^ 0x3D)),
                "estimate",
            )?;
            let target = -visibility * dot;
            ensure(
                (report.joint.mean - target).abs() <= 4.0 * report.joint.stderr + 1e-5,
                || {
                    format!(
                        "pair {pair}: joint {} vs {target} (stderr {:.1e})",
                        report.joint.mean, report.joint.stderr
                    )
                },
            )?;
            Ok(())
        })?;
        retries += retried as usize;
    }
    ensure(retries <= 1, || {
        format!("{retries} pairs needed retries, budget is 1")
    })?;
    Ok(format!(
        "tail bound {tail_bound:.1e}, hidden dim {hidden_dim}, root agreement {gap:.1e}, \
         10 pairs x 10^6 samples within 4 sigma + 1e-5 of -{visibility:.4}(a.b), retries = {retries}"
    ))
}

fn criterion_06_planar_model() -> Outcome {
    let root = lift(circle_scale(), "root")?;
    ensure(root.residual <= 1e-10, || {
        format!("residual {} above 1e-10", root.residual)
    })?;
    ensure(root.visibility() >= 0.70, || {
        format!("visibility {} below 0.70", root.visibility())
    })?;
    let embedding = lift(bellkit_core::krivine::circle_embedding(1e-6), "embedding")?;
    let model = lift(rounding_model(embedding, true), "model")?;
    let gap = model
        .meta_value("gap_to_inv_sqrt2")
        .ok_or_else(|| "gap metadata missing".to_string())?;
    ensure(gap > 0.0, || format!("gap {gap} not positive"))?;
    close(
        "gap consistency",
        root.visibility() + gap,
        FRAC_1_SQRT_2,
        1e-12,
    )?;
    Ok(format!(
        "residual = {:.1e}, visibility = {:.6} >= 0.70, metadata gap to 1/sqrt2 = {:.6e}",
        root.residual,
        root.visibility(),
        gap
    ))
}

fn random_pure_state(dim: usize, source: RandomSource) -> Result<StateVector, String> {
    let mut rng = source.rng();
    let amplitudes: Vec<Complex64> = normal_vector(&mut rng, 2 * dim)
        .chunks(2)
        .map(|pair| Complex64::new(pair[0], pair[1]))
        .collect();
    let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    lift(
        StateVector::new(amplitudes.into_iter().map(|z| z / norm).collect()),
        "state",
    )
}

fn criterion_07_correspondence() -> Outcome {
    // Round trips: vectors -> observables -> vectors for each source
    // dimension, with the table checked against the Gram matrix and the
    // maximally entangled marginals at zero.
    let source = RandomSource::new(700);
    for n in 2..=6usize {
        let mut rng = source.substream(n as u64).rng();
        let a: Vec<UnitVector> = (0..4)
            .map(|_| sample_sphere(&mut rng, n))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("vectors: {e}"))?;
        let b: Vec<UnitVector> = (0..4)
            .map(|_| sample_sphere(&mut rng, n))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("vectors: {e}"))?;
        let realization = lift(vectors_to_observables(&a, &b), "realization")?;
        let eye = ComplexMatrix::identity(realization.local_dim());
        for (i, av) in a.iter().enumerate() {
            let marginal = lift(
                realization
                    .state()
                    .expectation(&realization.alice()[i].matrix().kron(&eye)),
                "marginal",
            )?;
            ensure(marginal.norm() <= 1e-10, || {
                format!("n={n}: alice marginal {marginal}")
            })?;
            for (j, bv) in b.iter().enumerate() {
                let gram = lift(av.dot(bv), "gram")?;
                let got = realization.table()[(i, j)];
                ensure((got - gram).abs() <= 1e-10, || {
                    format!("n={n}: table ({i},{j}) = {got} vs gram {gram}")
                })?;
            }
        }
        // Extract vectors back out of the realization and compare tables.
        let recovered = lift(
            maximally_entangled_vectors(realization.alice(), realization.bob()),
            "re-extraction",
        )?;
        for (i, av) in a.iter().enumerate() {
            for (j, bv) in b.iter().enumerate() {
                let gram = lift(av.dot(bv), "gram")?;
                let got = recovered.table()[(i, j)];
                ensure((got - gram).abs() <= 1e-9, || {
                    format!("n={n}: roundtrip table ({i},{j}) = {got} vs {gram}")
                })?;
            }
        }
    }

    // General-state extraction on two-qubit and two-qutrit instances,
    // checked against the density-matrix correlation route.
    for instance in 0..50u64 {
        let d = if instance % 2 == 0 { 2 } else { 3 };
        let state = random_pure_state(d * d, source.substream(100 + instance))?;
        let plus = 1 + (instance as usize % (d - 1));
        let a = lift(
            random_dichotomic_observable(d, plus, source.substream(200 + instance)),
            "observable",
        )?;
        let b = lift(
            random_dichotomic_observable(d, d - plus, source.substream(300 + instance)),
            "observable",
        )?;
        let alice = [a.clone()];
        let bob = [b.clone()];
        let correspondence = lift(state_vectors(&state, &alice, &bob), "extraction")?;
        let expected = lift(joint_correlation(&state.density(), &a, &b), "correlation")?;
        let got = correspondence.table()[(0, 0)];
        ensure((got - expected.joint()).abs() <= 1e-10, || {
            format!(
                "instance {instance} (d={d}): dot {got} vs correlation {}",
                expected.joint()
            )
        })?;
    }

    // Traceless extraction on two-qubit and two-ququart instances. The
    // traceless variant cannot exist in odd local dimension (a +/-1
    // spectrum cannot sum to zero there), so qutrits are checked for the
    // rejection path instead.
    for instance in 0..50u64 {
        let d = if instance % 2 == 0 { 2 } else { 4 };
        let a = lift(
            random_dichotomic_observable(d, d / 2, source.substream(400 + instance)),
            "observable",
        )?;
        let b = lift(
            random_dichotomic_observable(d, d / 2, source.substream(500 + instance)),
            "observable",
        )?;
        let alice = [a.clone()];
        let bob = [b.clone()];
        let correspondence = lift(maximally_entangled_vectors(&alice, &bob), "extraction")?;
        let state = lift(StateVector::maximally_entangled(d), "state");
        let rho = state?.density();
        let expected = lift(joint_correlation(&rho, &a, &b), "correlation")?;
        let got = correspondence.table()[(0, 0)];
        ensure((got - expected.joint()).abs() <= 1e-10, || {
            format!(
                "instance {instance} (d={d}): dot {got} vs correlation {}",
                expected.joint()
            )
        })?;
    }
    let mut rejections = 0usize;
    for instance in 0..50u64 {
        let a = lift(
            random_dichotomic_observable(3, 1 + (instance as usize % 2), source.substream(600 + instance)),
            "observable",
        )?;
        let b = lift(
            random_dichotomic_observable(3, 1 + (instance as usize / 2 % 2), source.substream(700 + instance)),
            "observable",
        )?;
        match maximally_entangled_vectors(&[a], &[b]) {
            Err(Error::InvalidArgument(_)) => rejections += 1,
            Err(other) => return Err(format!("qutrit rejection raised {other}")),
            Ok(_) => return Err("qutrit traceless extraction unexpectedly succeeded".to_string()),
        }
    }
    ensure(rejections == 50, || {
        format!("only {rejections}/50 qutrit rejections")
    })?;
    Ok(
        "round trips n = 2..6 within 1e-10, 50 + 50 extraction instances within 1e-10, \
         50/50 odd-dimension rejections"
            .to_string(),
    )
}

fn criterion_08_family_decomposition() -> Outcome {
    for n in 3..=12usize {
        let certificate = lift(inn22::decompose(n), "decompose")?;
        let s1 = n * (n * n - 1) / 6;
        let s2 = (n - 1) * (n - 2) * (n - 3) / 6;
        ensure(certificate.chsh_terms().len() == s1, || {
            format!(
                "n={n}: {} two-setting members, expected {s1}",
                certificate.chsh_terms().len()
            )
        })?;
        ensure(certificate.negative_terms().len() == s2, || {
            format!(
                "n={n}: {} negative terms, expected {s2}",
                certificate.negative_terms().len()
            )
        })?;
        lift(certificate.verify_exact(), "exact identity")?;
    }
    let trials = 10_000u64;
    let mut violations = 0u64;
    for n in [3usize, 4, 5] {
        let check = lift(
            inn22::check_violation_implication(n, trials, RandomSource::new(800 + n as u64)),
            "implication check",
        )?;
        ensure(check.counterexamples == 0, || {
            format!("n={n}: {} counterexamples", check.counterexamples)
        })?;
        violations += check.violations;
    }
    Ok(format!(
        "counts and exact identity for n = 3..12, 3 x 10^4 trials with 0 counterexamples \
         ({violations} random violations observed)"
    ))
}

fn criterion_09_rounding_identity() -> Outcome {
    let dim = 4usize;
    let model = lift(
        LhvModel::response(
            "gaussian-sign",
            Box::new(GaussianSampler { dim }),
            Box::new(SignRule { negate: false }),
            Box::new(SignRule { negate: false }),
        ),
        "model",
    )?;
    let samples = 100_000u64;
    let mut retries = 0usize;
    for pair in 0..50u64 {
        let retried = with_one_retry(9_000 + pair * 2, |seed| {
            let mut rng = RandomSource::new(seed).rng();
            let u = lift(sample_sphere(&mut rng, dim), "vector")?;
            let v = lift(sample_sphere(&mut rng, dim), "vector")?;
            let dot = lift(u.dot(&v), "dot")?;
            let target = (2.0 / PI) * dot.asin();
            let report = lift(
                estimate(&model, &u, &v, samples, RandomSource::new(seed ^ 0x91D)),
                "estimate",
            )?;
            ensure(
                (report.joint.mean - target).abs() <= 4.0 * report.joint.stderr,
                || {
                    format!(
                        "pair {pair}: mean {} vs (2/pi)asin({dot:.4}) = {target}",
                        report.joint.mean
                    )
                },
            )?;
            Ok(())
        })?;
        retries += retried as usize;
    }
    ensure(retries <= 1, || {
        format!("{retries} pairs needed retries, budget is 1")
    })?;

    // The closed-form anchor: u.v = 1/2 maps to exactly 1/3.
    let anchor = (2.0 / PI) * 0.5f64.asin();
    close("closed-form anchor", anchor, 1.0 / 3.0, 1e-15)?;
    let u = lift(UnitVector::axis(dim, 0), "axis")?;
    let v = lift(
        UnitVector::new(vec![0.5, 0.75f64.sqrt(), 0.0, 0.0]),
        "half-dot vector",
    )?;
    let report = lift(
        estimate(&model, &u, &v, samples, RandomSource::new(9_999)),
        "estimate",
    )?;
    ensure(
        (report.joint.mean - 1.0 / 3.0).abs() <= 4.0 * report.joint.stderr,
        || format!("anchor mean {} vs 1/3", report.joint.mean),
    )?;
    Ok(format!(
        "50 pairs x 10^5 samples within 4 sigma of (2/pi)arcsin(u.v), \
         anchor (2/pi)arcsin(1/2) = 1/3 to {:.1e}, retries = {retries}",
        (anchor - 1.0 / 3.0).abs()
    ))
}

fn criterion_10_envelope() -> Outcome {
    let source = RandomSource::new(1_000);
    let mut max_ratio = f64::NEG_INFINITY;
    let mut min_ratio = f64::INFINITY;
    for instance in 0..200u64 {
        let mut rng = source.substream(instance).rng();
        let rows = 2 + (instance as usize % 5);
        let cols = 2 + ((instance as usize / 5) % 5);
        let entries = normal_vector(&mut rng, rows * cols);
        let matrix = lift(RealMatrix::new(rows, cols, entries), "matrix")?;
        let inequality = lift(
            lift(BellCorrelationInequality::from_matrix(matrix), "inequality")?.normalize(),
            "normalize",
        )?;
        let report = lift(
            seesaw_vector_bound(&inequality, 3, 3, source.substream(10_000 + instance)),
            "see-saw",
        )?;
        max_ratio = max_ratio.max(report.ratio);
        min_ratio = min_ratio.min(report.ratio);
        ensure(report.ratio >= 1.0 - 1e-9, || {
            format!("instance {instance}: ratio {} below 1", report.ratio)
        })?;
        ensure(report.ratio <= 1.5163 + 1e-6, || {
            format!(
                "instance {instance}: ratio {} above the dimension-three bound",
                report.ratio
            )
        })?;
    }
    Ok(format!(
        "200 matrices (2..6 settings each side): ratios in [{min_ratio:.9}, {max_ratio:.9}] \
         within [1 - 1e-9, 1.5163 + 1e-6]"
    ))
}
