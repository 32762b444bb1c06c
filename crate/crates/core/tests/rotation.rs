use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use star_core::rotation::{
    pec_gamma, pec_mitigate, rus_error_exact, rus_error_partial, rus_error_terms, rus_mean_steps,
    rus_statistics, sampling_overhead, simulate_rus, PecPlan, RusModel, RUS_SERIES_TERMS,
};
use star_core::StarError;

/// Independent series for the RUS error: sum over attempts n of 2^-n times the odd-flip
/// probability (1 - (1 - 2x)^n) / 2.
fn rus_error_closed(x: f64) -> f64 {
    // sum_n 2^-n (1 - r^n)/2 with r = 1 - 2x equals (1 - r/(2 - r)) / 2 = 2x / (1 + 2x).
    2.0 * x / (1.0 + 2.0 * x)
}

#[test]
fn mean_steps_is_two() {
    assert_eq!(rus_mean_steps(), 2.0);
    let s = rus_statistics(&RusModel::new(0.0).unwrap(), 1_000_000, 1, None);
    assert!(
        (s.mean_steps - 2.0).abs() <= 3.0 * s.sigma_mean_steps,
        "{s:?}"
    );
    assert_eq!(s.flip_rate, 0.0);
}

#[test]
fn flip_rate_is_twice_the_step_rate() {
    let s = rus_statistics(&RusModel::new(1e-3).unwrap(), 1_000_000, 2, None);
    let want = rus_error_exact(1e-3);
    assert!((want / 2e-3 - 1.0).abs() < 2e-3);
    assert!(
        (s.flip_rate - want).abs() <= 3.0 * s.sigma_flip_rate,
        "{s:?}"
    );
}

#[test]
fn no_flip_without_noise() {
    let m = RusModel::new(0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    assert!((0..10_000).all(|_| !simulate_rus(&m, &mut rng).z_flip));
}

#[test]
fn model_rejects_half() {
    assert!(matches!(RusModel::new(0.5), Err(StarError::Config(_))));
    assert!(RusModel::new(-1e-3).is_err());
}

#[test]
fn binomial_terms() {
    for x in [0.0, 1e-4, 0.01, 0.3] {
        assert_eq!(rus_error_terms(x, 1), x);
        assert!((rus_error_terms(x, 2) - 2.0 * x * (1.0 - x)).abs() < 1e-15);
        assert!((rus_error_terms(x, 3) - (3.0 * x * (1.0 - x).powi(2) + x.powi(3))).abs() < 1e-15);
    }
    assert_eq!(rus_error_terms(0.2, 0), 0.0);
}

#[test]
fn small_rate_limit() {
    for x in [1e-9, 1e-7, 1e-5] {
        // P = 2x - 4x^2 + O(x^3).
        assert!((rus_error_exact(x) / x - 2.0).abs() <= 5.0 * x);
    }
}

#[test]
fn series_is_truncated_safely() {
    const _: () = assert!(RUS_SERIES_TERMS >= 64);
    for x in [1e-6, 1e-3, 0.1, 0.4] {
        let head = rus_error_partial(x, 64);
        let full = rus_error_exact(x);
        assert!((full - head).abs() <= 1e-18 * full, "{x}");
    }
}

proptest! {
    #[test]
    fn exact_series_matches_closed_form(x in 0.0f64..0.49) {
        let a = rus_error_exact(x);
        let b = rus_error_closed(x);
        prop_assert!((a - b).abs() <= 1e-14 * b.max(1e-300) + 1e-300);
    }

    #[test]
    fn gamma_and_overhead(p in 0.0f64..0.3, n in 0u64..500) {
        let plan = PecPlan::new(p, n).unwrap();
        prop_assert!(plan.gamma >= 1.0);
        let log_want = 2.0 * n as f64 * plan.gamma.ln();
        prop_assume!(log_want < 700.0);
        prop_assert!((plan.overhead().ln() - log_want).abs() <= 1e-9 * log_want.max(1.0));
    }
}

#[test]
fn overhead_examples() {
    let (exact, approx) = sampling_overhead(2e-4 / 15.0, 37_500).unwrap();
    assert!((exact - 54.6).abs() <= 0.1, "{exact}");
    assert!((approx - 54.6).abs() <= 0.1, "{approx}");
    assert_eq!(sampling_overhead(1e-3, 0).unwrap(), (1.0, 1.0));
    for (x, n) in [(1e-5, 1000u64), (1e-4, 10_000), (2e-5, 50_000)] {
        let (e, a) = sampling_overhead(x, n).unwrap();
        assert!((e / a - 1.0).abs() < 0.01, "{x} {n}: {e} vs {a}");
    }
}

#[test]
fn gamma_rejects_half() {
    assert!(matches!(pec_gamma(0.5), Err(StarError::Config(_))));
}

/// `±1` outcomes of an X measurement on a state with `<X> = ideal`, after a phase flip of
/// strength `p`, with an optional extra Z.
fn phase_flip_sampler(ideal: f64, p: f64) -> impl FnMut(&mut ChaCha8Rng, bool) -> f64 {
    move |rng, extra| {
        let mut v = if rng.gen::<f64>() < (1.0 + ideal) / 2.0 {
            1.0
        } else {
            -1.0
        };
        if rng.gen::<f64>() < p {
            v = -v;
        }
        if extra {
            v = -v;
        }
        v
    }
}

#[test]
fn mitigation_recovers_ideal_value() {
    let (ideal, p) = (0.8, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 1_000_000;
    let noisy = pec_mitigate(phase_flip_sampler(ideal, p), 0.0, n, &mut rng).unwrap();
    assert!((noisy.mean - 0.64).abs() <= 3.0 * noisy.sigma);
    let est = pec_mitigate(phase_flip_sampler(ideal, p), p, n, &mut rng).unwrap();
    assert!((est.mean - ideal).abs() <= 3.0 * est.sigma, "{est:?}");
    let ratio = est.variance / noisy.variance;
    let g2 = est.gamma * est.gamma;
    assert!((ratio / g2 - 1.0).abs() < 0.2, "{ratio} vs {g2}");
}

#[test]
fn zero_strength_is_plain_average() {
    let mut a = ChaCha8Rng::seed_from_u64(4);
    let mut b = ChaCha8Rng::seed_from_u64(4);
    let est = pec_mitigate(phase_flip_sampler(0.5, 0.2), 0.0, 10_000, &mut a).unwrap();
    // With P = 0 the sign coin always lands on the unflipped branch but is still drawn.
    let mut s = phase_flip_sampler(0.5, 0.2);
    let mut sum = 0.0;
    for _ in 0..10_000 {
        let _: f64 = b.gen();
        sum += s(&mut b, false);
    }
    assert_eq!(est.mean, sum / 10_000.0);
    assert_eq!(est.gamma, 1.0);
}

#[test]
fn mitigation_is_unbiased_over_repetitions() {
    let (ideal, p) = (0.8, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let reps = 100;
    let mut means = Vec::with_capacity(reps);
    let mut var_sum = 0.0;
    for _ in 0..reps {
        let e = pec_mitigate(phase_flip_sampler(ideal, p), p, 10_000, &mut rng).unwrap();
        means.push(e.mean);
        var_sum += e.sigma * e.sigma;
    }
    let grand = means.iter().sum::<f64>() / reps as f64;
    let combined = var_sum.sqrt() / reps as f64;
    assert!(
        (grand - ideal).abs() < 4.0 * combined,
        "{grand} +- {combined}"
    );
}

#[test]
fn mitigation_rejects_bad_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(pec_mitigate(phase_flip_sampler(0.8, 0.1), 0.5, 10, &mut rng).is_err());
    assert!(pec_mitigate(phase_flip_sampler(0.8, 0.1), 0.1, 0, &mut rng).is_err());
}
