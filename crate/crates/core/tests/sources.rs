use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uqc_core::channel::KrausChannel;
use uqc_core::linalg::random::{random_density, random_hermitian};
use uqc_core::linalg::{hermitian_eig, tensor_product};
use uqc_core::process::ClassicalProcess;
use uqc_core::source::{
    abelian_restriction, check_consistency, check_stationarity, conditional_expectation,
    ergodicity_gap, MarginalFamily, QuantumAlphabet, QuantumSource,
};
use uqc_core::{info, ComplexMatrix, DensityOperator, Result, C64};

fn markov_cc() -> QuantumSource {
    let p = ClassicalProcess::markov(vec![0.9, 0.1, 0.2, 0.8]).unwrap();
    QuantumSource::classically_correlated(p, QuantumAlphabet::computational(2)).unwrap()
}

fn plus_alphabet() -> QuantumAlphabet {
    let s = 0.5f64.sqrt();
    QuantumAlphabet::new(vec![
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(s, 0.0), C64::new(s, 0.0)],
    ])
    .unwrap()
}

// ρ_1 = diag(0.5, 0.5) but ρ_2 = |00⟩⟨00|: its one-site reduction is |0⟩⟨0|.
struct Corrupted;

impl MarginalFamily for Corrupted {
    fn site_dim(&self) -> usize {
        2
    }

    fn marginal(&self, n: usize) -> Result<DensityOperator> {
        if n == 1 {
            return DensityOperator::diagonal(&[0.5, 0.5]);
        }
        let mut p = vec![0.0; 1 << n];
        p[0] = 1.0;
        DensityOperator::diagonal(&p)
    }
}

#[test]
fn corrupted_family_is_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dev = check_consistency(&Corrupted, 1, 1, 20, &mut rng).unwrap();
    assert!(dev > 0.01, "deviation {dev}");
}

#[test]
fn non_stationary_gap_matches_direct_traces() {
    let p = ClassicalProcess::markov_with_initial(vec![0.9, 0.1, 0.2, 0.8], vec![1.0, 0.0]).unwrap();
    let s = QuantumSource::classically_correlated(p, QuantumAlphabet::computational(2)).unwrap();
    // ρ_1 = diag(1, 0); the second site carries diag(0.9, 0.1). For any
    // Hermitian a the gap is 0.1·|a_00 − a_11| ≤ 0.2‖a‖.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let dev = check_stationarity(&s, 1, 1, 50, &mut rng).unwrap();
    assert!(dev > 0.0 && dev <= 0.2 + 1e-12, "deviation {dev}");
}

#[test]
fn markov_ergodicity_matches_autocovariance() {
    let s = markov_cc();
    let a = ComplexMatrix::diagonal(&[1.0, 0.0]);
    let big_n = 2000;
    let r = ergodicity_gap(&s, &a, &a, 1, big_n).unwrap();
    // Two-state chain: Cov(1[x₀=0], 1[x_i=0]) = π₀π₁λ^i with λ = 1 − 0.1 − 0.2.
    let (p0, p1, lambda) = (2.0 / 3.0, 1.0 / 3.0, 0.7f64);
    let oracle: f64 = (1..=big_n).map(|i| p0 * p1 * lambda.powi(i as i32)).sum::<f64>() / big_n as f64;
    assert!((r.gap() - oracle).abs() < 1e-12);
    assert!((r.product - p0 * p0).abs() < 1e-12);
    assert!(r.gap().abs() <= 0.01);
    assert!(r.tail.abs() < 1e-12);
    assert!(r.decay_slope.unwrap() < 0.0);
}

#[test]
fn classical_gap_equals_process_gap() {
    // Period-2 cycle 0101…: lag-i correlation of 1[x=0] is ½ for even i, 0 for odd.
    let p = ClassicalProcess::periodic(2, vec![0, 1]).unwrap();
    let s = QuantumSource::classically_correlated(p, QuantumAlphabet::computational(2)).unwrap();
    let a = ComplexMatrix::diagonal(&[1.0, 0.0]);
    let r = ergodicity_gap(&s, &a, &a, 1, 100).unwrap();
    let oracle = (1..=100).map(|i| if i % 2 == 0 { 0.5 } else { 0.0 }).sum::<f64>() / 100.0;
    assert!((r.cesaro - oracle).abs() < 1e-12);
    assert!((r.product - 0.25).abs() < 1e-12);
    assert!(r.weak_mixing > 0.2);
}

#[test]
fn channel_image_gap_uses_duals() {
    let s = QuantumSource::channel_transformed(markov_cc(), KrausChannel::depolarizing(0.3).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_hermitian(&mut rng, 2);
    let b = random_hermitian(&mut rng, 2);
    let r = ergodicity_gap(&s, &a, &b, 1, 3).unwrap();
    let mut sum = 0.0;
    for i in 1..=3 {
        let rho = s.marginal(1 + i).unwrap();
        let mut op = a.clone();
        for _ in 0..i - 1 {
            op = tensor_product(&op, &ComplexMatrix::identity(2)).unwrap();
        }
        op = tensor_product(&op, &b).unwrap();
        sum += rho.expectation(&op).unwrap().re;
    }
    assert!((r.cesaro - sum / 3.0).abs() < 1e-12);
}

#[test]
fn pinching_preserves_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let basis = hermitian_eig(&random_hermitian(&mut rng, 4)).unwrap().vectors;
    for _ in 0..100 {
        let a = uqc_core::linalg::random::ginibre(&mut rng, 4, 4);
        let b = conditional_expectation(&a, &basis).unwrap();
        // Property (d): tr(E(a) c) = tr(a c) for every c in the commutative algebra.
        let c = conditional_expectation(&random_hermitian(&mut rng, 4), &basis).unwrap();
        let lhs = b.trace_product(&c).unwrap();
        let rhs = a.trace_product(&c).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((b.trace() - a.trace()).norm() < 1e-12);
    }
}

#[test]
fn abelian_entropy_equality_all_kinds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sources = [
        QuantumSource::iid(random_density(&mut rng, 2)),
        QuantumSource::classically_correlated(
            ClassicalProcess::markov(vec![0.6, 0.4, 0.3, 0.7]).unwrap(),
            plus_alphabet(),
        )
        .unwrap(),
        QuantumSource::channel_transformed(markov_cc(), KrausChannel::amplitude_damping(0.2).unwrap()).unwrap(),
    ];
    for s in &sources {
        for l in 1..=3 {
            let ar = abelian_restriction(s, l).unwrap();
            let h = ar.measure(1).unwrap().entropy();
            let sv = info::von_neumann_entropy(&s.marginal(l).unwrap()).unwrap();
            assert!((h - sv).abs() < 1e-10);
        }
    }
}

#[test]
fn abelian_view_of_markov_is_stationary() {
    let ar = abelian_restriction(&markov_cc(), 1).unwrap();
    let mu3 = ar.measure(3).unwrap();
    let mu2 = ar.measure(2).unwrap();
    assert!(mu3.sum_out_first(1).unwrap().max_abs_diff(&mu2) < 1e-10);
    assert!(mu3.sum_out_last(1).unwrap().max_abs_diff(&mu2) < 1e-10);
    let view = ar.process().unwrap();
    assert!(view.is_stationary() && view.is_ergodic());
}

#[test]
fn diagonal_bridge_over_all_projectors() {
    let ar = abelian_restriction(&markov_cc(), 1).unwrap();
    let n = 3;
    let mu = ar.measure(n).unwrap();
    let rho = markov_cc().marginal(n).unwrap();
    for mask in 0u32..(1 << 8) {
        let set: Vec<u64> = (0..8).filter(|w| mask >> w & 1 == 1).collect();
        let p = ar.projector(&set, n).unwrap();
        let phi = p.trace_with(rho.matrix()).unwrap().re;
        let sum: f64 = set.iter().map(|&w| mu.probs()[w as usize]).sum();
        assert!((phi - sum).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cc_marginals_are_consistent_and_stationary(
        t00 in 0.05f64..0.95, t11 in 0.05f64..0.95, seed in 0u64..1000
    ) {
        let p = ClassicalProcess::markov(vec![t00, 1.0 - t00, 1.0 - t11, t11]).unwrap();
        let s = QuantumSource::classically_correlated(p, plus_alphabet()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(check_consistency(&s, 2, 1, 3, &mut rng).unwrap() <= 1e-10);
        prop_assert!(check_stationarity(&s, 2, 1, 3, &mut rng).unwrap() <= 1e-10);
        let r = s.marginal(3).unwrap().report().unwrap();
        prop_assert!(r.is_valid());
    }

    #[test]
    fn channel_images_stay_consistent(p in 0.0f64..1.0, seed in 0u64..1000) {
        let s = QuantumSource::channel_transformed(markov_cc(), KrausChannel::depolarizing(p).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(check_consistency(&s, 1, 2, 3, &mut rng).unwrap() <= 1e-10);
        prop_assert!(check_stationarity(&s, 1, 2, 3, &mut rng).unwrap() <= 1e-10);
    }
}
