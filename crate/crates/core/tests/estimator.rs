use proptest::prelude::*;
use star_core::estimator::{
    application_sizing, clifford_budget, effective_injection_failure, fit_scaling, fit_single,
    ftqc_comparison, hubbard_rotations_per_step, injection_repeats, max_logical_qubits,
    quantum_volume, resource_report, rotation_budget, rotation_error, round_sig, t_count,
    DeviceSpec, FitResult, LayoutScheme, ScalingParams, ScalingPoint,
};
use star_core::StarError;

const DEVICE: DeviceSpec = DeviceSpec {
    n_phys: 10_000,
    p: 1e-4,
};
const C_DIRECT: f64 = 2.0 / 15.0;

fn synthetic(params: ScalingParams, ds: &[usize], ps: &[f64]) -> Vec<ScalingPoint> {
    ds.iter()
        .flat_map(|&d| {
            ps.iter().map(move |&p| {
                let p_l = params.logical_error(d, p);
                ScalingPoint {
                    d,
                    p,
                    p_l,
                    sigma: 0.05 * p_l,
                }
            })
        })
        .collect()
}

#[test]
fn fit_round_trip() {
    let reference = FitResult::reference();
    let ps = [1e-3, 1.5e-3, 2e-3, 3e-3];
    let fit = fit_scaling(
        &synthetic(reference.z, &[3, 5], &ps),
        &synthetic(reference.x, &[3, 5, 7], &ps),
    )
    .unwrap();
    for (got, want) in [(fit.z, reference.z), (fit.x, reference.x)] {
        assert!((got.c / want.c - 1.0).abs() < 1e-10);
        assert!((got.p_th / want.p_th - 1.0).abs() < 1e-10);
        assert!(got.sigma_c > 0.0 && got.sigma_p_th > 0.0);
    }
}

#[test]
fn reference_fit_values() {
    let r = FitResult::reference();
    assert_eq!(
        (r.z.c, r.z.sigma_c, r.z.p_th, r.z.sigma_p_th),
        (0.0679, 0.0076, 0.00385, 0.00010)
    );
    assert_eq!(
        (r.x.c, r.x.sigma_c, r.x.p_th, r.x.sigma_p_th),
        (0.0819, 0.0097, 0.00416, 0.00012)
    );
    assert!(r.x.p_th > r.z.p_th);
}

#[test]
fn single_distance_is_degenerate() {
    let pts = synthetic(FitResult::reference().z, &[5], &[1e-3, 2e-3, 3e-3]);
    assert!(matches!(fit_single(&pts), Err(StarError::DegenerateFit(_))));
}

#[test]
fn clifford_budget_examples() {
    let fit = FitResult::reference();
    let b7 = clifford_budget(&fit, 7, 1e-4, 1.0);
    assert!((b7.p_round - 5.82e-8).abs() <= 0.01e-8, "{}", b7.p_round);
    assert_eq!(round_sig(b7.n_clifford, 3), 1.72e7);
    let b9 = clifford_budget(&fit, 9, 1e-4, 1.0);
    assert!((b9.p_round - 1.46e-9).abs() <= 0.01e-9, "{}", b9.p_round);
    assert_eq!(round_sig(b9.n_clifford, 3), 6.85e8);
    assert_eq!(
        clifford_budget(&fit, 7, 1e-4, 2.0).n_clifford,
        b7.n_clifford / 2.0
    );
}

#[test]
fn clifford_budget_at_threshold() {
    let unit = ScalingParams {
        c: 1.0,
        sigma_c: 0.0,
        p_th: 1e-2,
        sigma_p_th: 0.0,
    };
    let fit = FitResult { z: unit, x: unit };
    for d in [3, 5, 9] {
        assert_eq!(clifford_budget(&fit, d, 1e-2, 1.0).p_round, 2.0);
    }
}

proptest! {
    #[test]
    fn clifford_budget_is_monotone(h in 1usize..8, p in 1e-4f64..1e-3) {
        let fit = FitResult::reference();
        let d = 2 * h + 1;
        let n = clifford_budget(&fit, d, p, 1.0).n_clifford;
        prop_assert!(clifford_budget(&fit, d + 2, p, 1.0).n_clifford > n);
        prop_assert!(clifford_budget(&fit, d, p * 1.01, 1.0).n_clifford < n);
    }
}

#[test]
fn logical_qubit_counts() {
    assert_eq!(max_logical_qubits(&DEVICE, 7, LayoutScheme::Compact), 64);
    assert_eq!(max_logical_qubits(&DEVICE, 9, LayoutScheme::Compact), 37);
    assert_eq!(max_logical_qubits(&DEVICE, 7, LayoutScheme::SchemeI2n), 51);
    assert_eq!(max_logical_qubits(&DEVICE, 9, LayoutScheme::SchemeI2n), 30);
    assert_eq!(max_logical_qubits(&DEVICE, 7, LayoutScheme::SchemeI4n), 25);
    assert_eq!(max_logical_qubits(&DEVICE, 7, LayoutScheme::SchemeI3n), 34);
    assert_eq!(
        max_logical_qubits(&DEVICE, 7, LayoutScheme::Intermediate),
        48
    );
    for s in LayoutScheme::ALL {
        assert_eq!(s.name().parse::<LayoutScheme>().unwrap(), s);
    }
    assert!("5n".parse::<LayoutScheme>().is_err());
}

#[test]
fn rotation_budget_examples() {
    let b = rotation_budget(1e-4, C_DIRECT).unwrap();
    assert_eq!(b.n_rotation, Some(37_500));
    assert!((b.pec_overhead.unwrap() - 54.6).abs() <= 0.1);
    assert_eq!(
        rotation_budget(1e-4, 9.0 / 15.0).unwrap().n_rotation,
        Some(8333)
    );
    let none = rotation_budget(1e-4, 0.0).unwrap();
    assert_eq!((none.n_rotation, none.pec_overhead), (None, None));
}

#[test]
fn quantum_volume_examples() {
    let eps = rotation_error(C_DIRECT, 1e-4);
    assert!((eps - 2.6e-5).abs() < 1e-20);
    let qv = quantum_volume(1e-4, eps, 64);
    assert_eq!(qv.m_nisq, Some(37));
    assert_eq!(qv.m_star, Some(71));
    assert_eq!(qv.log2_vq_star, Some(64));
    assert_eq!(qv.log2_vq_nisq, Some(37));
    assert_eq!(quantum_volume(0.0, eps, 64).m_nisq, None);
}

#[test]
fn t_count_examples() {
    assert_eq!(t_count(0.125), 9);
    assert_eq!(t_count(0.5), 3);
    assert_eq!(t_count(rotation_error(C_DIRECT, 1e-4)), 46);
}

#[test]
fn ftqc_table() {
    let cmp = ftqc_comparison(&DEVICE, 7, rotation_error(C_DIRECT, 1e-4));
    assert!((cmp.injected_magic_error - 46e-4 / 15.0).abs() < 1e-18);
    assert!((round_sig(cmp.distilled_magic_error, 2) - 1.0e-9).abs() < 1e-24);
    let rows: Vec<(&str, u64, u64)> = cmp
        .rows
        .iter()
        .map(|r| {
            (
                r.architecture.as_str(),
                r.logical_qubits,
                r.clocks_per_non_clifford,
            )
        })
        .collect();
    assert_eq!(
        rows,
        vec![
            ("STAR (Compact)", 64, 18),
            ("FTQC (Fast)", 0, 46),
            ("FTQC (Intermediate)", 32, 230),
            ("FTQC (Compact)", 51, 414),
        ]
    );
}

#[test]
fn application_examples() {
    let a7 = application_sizing(64, 37_500);
    assert_eq!(
        (
            a7.hubbard.sites,
            a7.hubbard.rotations_per_step,
            a7.hubbard.trotter_steps
        ),
        (32, 158, 237)
    );
    assert_eq!((a7.qaoa.nodes, a7.qaoa.depth), (64, 18));
    let a9 = application_sizing(37, 37_500);
    assert_eq!(
        (
            a9.hubbard.sites,
            a9.hubbard.rotations_per_step,
            a9.hubbard.trotter_steps
        ),
        (18, 88, 426)
    );
    assert_eq!((a9.qaoa.nodes, a9.qaoa.depth), (37, 53));
    assert_eq!(hubbard_rotations_per_step(1), 3);
}

#[test]
fn injection_repetition() {
    assert!((effective_injection_failure(0.10, 4) - 1e-4).abs() < 1e-16);
    assert_eq!(effective_injection_failure(0.3, 1), 0.3);
    assert_eq!(effective_injection_failure(0.0, 3), 0.0);
    assert_eq!(injection_repeats(7), 3);
    assert_eq!(injection_repeats(9), 4);
}

#[test]
fn full_report() {
    let fit = FitResult::reference();
    let r7 = resource_report(&DEVICE, 7, LayoutScheme::Compact, &fit, C_DIRECT, 1.0).unwrap();
    assert_eq!(r7.n_logical, 64);
    assert_eq!(r7.n_rotation, Some(37_500));
    assert_eq!(
        (r7.qv.log2_vq_nisq, r7.qv.log2_vq_star),
        (Some(37), Some(64))
    );
    let apps = r7.applications.unwrap();
    assert_eq!(apps.hubbard.trotter_steps, 237);
    let r9 = resource_report(&DEVICE, 9, LayoutScheme::Compact, &fit, C_DIRECT, 1.0).unwrap();
    assert_eq!(r9.n_logical, 37);
    assert!(resource_report(&DEVICE, 8, LayoutScheme::Compact, &fit, C_DIRECT, 1.0).is_err());
    assert!(resource_report(&DEVICE, 7, LayoutScheme::Compact, &fit, C_DIRECT, 0.0).is_err());
    let json = serde_json::to_value(&r7).unwrap();
    assert_eq!(json["ftqc"]["rows"].as_array().unwrap().len(), 4);
}
