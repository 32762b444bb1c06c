use num_rational::Ratio;
use star_core::circuit::FaultKind;
use star_core::frame::{propagate, ShotScratch};
use star_core::injection::{
    apply_stage1_postselection, build_stage1_circuit, build_stage2_circuit,
    oracle_leading_coefficients, run_injection_experiment, Expansion, FourTwoTwoCode,
    InjectionExperiment, Stage1Verdict, StageReached, VariantKind,
};
use star_core::pauli::{Pauli, PauliString};
use star_core::surface_code::PlaquetteType;

fn r(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

#[test]
fn four_two_two_algebra() {
    let c = FourTwoTwoCode::new();
    for s in [&c.stabilizer_x, &c.stabilizer_z] {
        for o in [
            &c.logical_x,
            &c.logical_z,
            &c.gauge_x,
            &c.gauge_z,
            &c.stabilizer_x,
            &c.stabilizer_z,
        ] {
            assert!(s.commutes_with(o));
        }
    }
    assert!(!c.logical_x.commutes_with(&c.logical_z));
    assert!(!c.gauge_x.commutes_with(&c.gauge_z));
    for g in [&c.gauge_x, &c.gauge_z] {
        assert!(g.commutes_with(&c.logical_x));
        assert!(g.commutes_with(&c.logical_z));
    }
    let z23 = c.gauge_z.compose(&c.stabilizer_z);
    assert!(z23.same_pauli(&PauliString::on(4, &[2, 3], Pauli::Z)));
    assert_eq!(z23.sign(), Some(1));
}

#[test]
fn direct_oracle_coefficients() {
    let c = oracle_leading_coefficients(VariantKind::Direct, 3).unwrap();
    assert_eq!(c.c_z, r(2, 15));
    assert_eq!(c.c_x, r(0, 1));
}

#[test]
fn variant_oracle_coefficients() {
    let upper = oracle_leading_coefficients(VariantKind::IndirectTwoCnot, 3).unwrap();
    assert_eq!(upper.c_z, r(9, 15));
    let lower = oracle_leading_coefficients(VariantKind::IndirectAncilla, 3).unwrap();
    assert_eq!(lower.c_z, r(7, 15));
}

#[test]
fn coefficients_do_not_depend_on_distance() {
    for v in VariantKind::ALL {
        let c3 = oracle_leading_coefficients(v, 3).unwrap();
        for d in [5, 7] {
            let c = oracle_leading_coefficients(v, d).unwrap();
            assert_eq!(c.c_z, c3.c_z, "{v} at d = {d}");
            assert_eq!(c.c_x, c3.c_x, "{v} at d = {d}");
        }
    }
}

#[test]
fn table_and_replay_oracles_agree() {
    for v in VariantKind::ALL {
        let exp = InjectionExperiment::new(3, v).unwrap();
        assert_eq!(
            exp.leading_coefficients(),
            exp.leading_coefficients_by_replay()
        );
    }
}

#[test]
fn direct_protocol_depth_meets_pipelining_bound() {
    let exp = InjectionExperiment::new(5, VariantKind::Direct).unwrap();
    assert_eq!(exp.circuit.depth(), 2 + 7 + 6 + 2 * 8);
}

#[test]
fn gauge_fault_is_absorbed() {
    // Z on data 0 and on M1 right after the first Z-gauge CNOT of round one.
    let exp = InjectionExperiment::new(3, VariantKind::Direct).unwrap();
    // Qubit 18 is M1 at d = 3 (9 data, 8 plaquette ancillas, then M0..M3).
    let site = exp
        .circuit
        .sites()
        .iter()
        .position(|s| s.kind == FaultKind::Depolarize2(0, 18))
        .expect("first gauge CNOT on data 0");
    let zz = (Pauli::Z.index() << 2 | Pauli::Z.index()) - 1;
    let rec = propagate(&exp.circuit, &[(site, zz)]);
    let o = exp.classify(&exp.model.fired(&rec));
    assert_eq!(o.stage_reached, StageReached::Accepted);
    assert!(!o.logical_z_error && !o.logical_x_error);
}

#[test]
fn single_z_on_data_before_gauge_cnot_is_detected() {
    let s1 = build_stage1_circuit(VariantKind::Direct).unwrap();
    // Z on data 0 from the idle/gate site immediately before M0's first CNOT.
    let first_cnot_layer = s1
        .circuit
        .layers()
        .iter()
        .position(|l| {
            l.gates.iter().any(|g| {
                matches!(
                    g,
                    star_core::circuit::GateKind::Cnot {
                        control: 4,
                        target: 0
                    }
                )
            })
        })
        .unwrap();
    let site = s1
        .circuit
        .layer_sites(first_cnot_layer - 1)
        .find(|&i| match s1.circuit.sites()[i].kind {
            FaultKind::Depolarize1(q) => q == 0,
            FaultKind::Depolarize2(a, b) => a == 0 || b == 0,
            _ => false,
        })
        .expect("site on data 0");
    let alt = match s1.circuit.sites()[site].kind {
        FaultKind::Depolarize1(_) => Pauli::Z.index() - 1,
        FaultKind::Depolarize2(0, _) => (Pauli::Z.index() << 2) - 1,
        _ => Pauli::Z.index() - 1,
    };
    let rec = propagate(&s1.circuit, &[(site, alt)]);
    let fired = s1.model.fired(&rec);
    assert!(fired
        .iter()
        .any(|&o| (o as usize) < s1.model.detectors.len()));
}

#[test]
fn stage1_postselection_rules() {
    let ok = [[false; 4]; 2];
    assert_eq!(apply_stage1_postselection(ok), Stage1Verdict::Accept);
    // Individual gauge outcomes are random; only products matter.
    assert_eq!(
        apply_stage1_postselection([[true, true, true, true], [false, true, true, false]]),
        Stage1Verdict::Accept
    );
    assert_eq!(
        apply_stage1_postselection([[true, false, false, false], [true, false, false, false]]),
        Stage1Verdict::RejectFirstRound
    );
    assert_eq!(
        apply_stage1_postselection([[false, false, false, false], [false, true, false, false]]),
        Stage1Verdict::RejectRepeat
    );
}

#[test]
fn stage1_noiseless_checks_are_silent() {
    for v in VariantKind::ALL {
        let s1 = build_stage1_circuit(v).unwrap();
        let rec = propagate(&s1.circuit, &[]);
        assert!(s1.model.fired(&rec).is_empty());
    }
}

#[test]
fn expansion_determined_plaquettes_d3() {
    let e = Expansion::new(3).unwrap();
    let mut det: Vec<((i32, i32), PlaquetteType)> = e
        .layout
        .plaquettes
        .iter()
        .enumerate()
        .filter(|(k, _)| e.is_determined(*k))
        .map(|(_, p)| (p.anchor, p.kind))
        .collect();
    det.sort_by_key(|x| x.0);
    assert_eq!(
        det,
        vec![
            ((-1, 0), PlaquetteType::Z),
            ((0, 0), PlaquetteType::X),
            ((0, 2), PlaquetteType::X),
            ((1, 0), PlaquetteType::Z),
            ((2, 1), PlaquetteType::Z),
        ]
    );
}

#[test]
fn expansion_determined_plaquettes_d5() {
    // Plaquettes inside the |0> region or the |+> strip are fixed, as are the ones built
    // from the block's stabilizer and gauges.
    let e = Expansion::new(5).unwrap();
    for (k, pl) in e.layout.plaquettes.iter().enumerate() {
        let rows: Vec<usize> = pl.support().iter().map(|q| q / 5).collect();
        let cols: Vec<usize> = pl.support().iter().map(|q| q % 5).collect();
        let expect = match pl.kind {
            PlaquetteType::Z => rows.iter().all(|&r| r >= 2) || cols.iter().all(|&c| c < 2),
            PlaquetteType::X => {
                rows.iter().all(|&r| r < 2)
                    && (cols.iter().all(|&c| c >= 2) || cols.iter().all(|&c| c < 2))
            }
        };
        assert_eq!(e.is_determined(k), expect, "plaquette {:?}", pl.anchor);
    }
}

#[test]
fn stage2_noiseless_is_silent() {
    for d in [3, 5] {
        let s2 = build_stage2_circuit(d).unwrap();
        assert!(s2.model.fired(&propagate(&s2.circuit, &[])).is_empty());
    }
}

#[test]
fn zero_noise_accepts_everything() {
    let s = run_injection_experiment(3, 0.0, 1000, VariantKind::Direct, 1, Some(1)).unwrap();
    assert_eq!(s.acceptance_rate, 1.0);
    assert_eq!(s.p_z, 0.0);
}

#[test]
fn rotation_flips_are_harmless_or_detected() {
    for v in VariantKind::ALL {
        let exp = InjectionExperiment::new(3, v).unwrap();
        let mut flips = 0;
        for row in 0..exp.table.num_rows() {
            if !exp.table.flips_rotation(row) {
                continue;
            }
            flips += 1;
            let o = exp.classify(exp.table.row(row));
            assert!(
                o.stage_reached != StageReached::Accepted || !o.logical_x_error,
                "{v}: accepted angle flip in row {row}"
            );
        }
        assert!(
            flips > 0,
            "{v}: no fault reaches the rotation with an X component"
        );
    }
}

#[test]
fn monte_carlo_matches_oracle_at_low_noise() {
    let exp = InjectionExperiment::new(3, VariantKind::Direct).unwrap();
    let c = exp.leading_coefficients();
    let cz = *c.c_z.numer() as f64 / *c.c_z.denom() as f64;
    for (i, p) in [1e-5, 3e-5, 1e-4].into_iter().enumerate() {
        let counts = exp.run(p, 400_000, 100 + i as u64, None);
        let s = exp.stats(p, counts);
        let expected = cz * p;
        let sigma = (expected / counts.accepted as f64).sqrt();
        assert!(
            (s.p_z - expected).abs() <= 3.0 * sigma,
            "p = {p}: P_Z = {} vs {expected} (sigma {sigma})",
            s.p_z
        );
    }
}

#[test]
fn sampling_scratch_reports_faults() {
    let exp = InjectionExperiment::new(3, VariantKind::Direct).unwrap();
    let mut scratch = ShotScratch::default();
    exp.table.combine(&[], &mut scratch);
    assert_eq!(scratch.num_faults(), 0);
    assert!(scratch.fired().is_empty());
}
