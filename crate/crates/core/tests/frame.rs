use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use star_core::circuit::{
    sample_fault, Basis, CircuitBuilder, FaultEffect, FaultKind, GateKind, TimedCircuit,
};
use star_core::frame::{
    enumerate_single_faults, propagate, shot_rng, simulate_shot, ShotScratch, SparseFaultTable,
};
use star_core::injection::{build_stage1_circuit, VariantKind};
use star_core::montecarlo::{run_shots, Tally};
use star_core::pauli::{Pauli, PauliString};
use star_core::surface_code::MemoryExperiment;

fn one_gate(n: usize, g: GateKind) -> TimedCircuit {
    let mut b = CircuitBuilder::new(n);
    b.gate(0, g);
    b.finish().unwrap()
}

fn within(count: u64, n: u64, p: f64, k: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (count as f64 / n as f64 - p).abs() <= k * sigma
}

#[test]
fn two_qubit_alternatives_are_uniform() {
    let c = one_gate(
        2,
        GateKind::Cnot {
            control: 0,
            target: 1,
        },
    );
    let site = c.sites()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut counts = [0u64; 16];
    let draws = 1_000_000;
    for _ in 0..draws {
        if let Some(FaultEffect::Pauli2(_, a, _, b)) = sample_fault(&site, 0.15, &mut rng) {
            counts[a.index() << 2 | b.index()] += 1;
        }
    }
    assert_eq!(counts[0], 0);
    for (i, &k) in counts.iter().enumerate().skip(1) {
        assert!(within(k, draws, 1e-2, 3.0), "Pauli {i}: {k}");
    }
}

#[test]
fn measure_flip_frequency() {
    let mut b = CircuitBuilder::new(1);
    b.gate(0, GateKind::MeasureZ(0));
    let c = b.finish().unwrap();
    let site = c.sites()[0];
    assert!(matches!(site.kind, FaultKind::MeasureFlip { .. }));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let draws = 1_000_000;
    let flips = (0..draws)
        .filter(|_| sample_fault(&site, 0.5, &mut rng).is_some())
        .count();
    assert!(within(flips as u64, draws, 0.5, 3.0));
}

#[test]
fn zero_noise_never_fires() {
    let c = one_gate(1, GateKind::H(0));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    assert!((0..10_000).all(|_| sample_fault(&c.sites()[0], 0.0, &mut rng).is_none()));

    let exp = MemoryExperiment::new(3).unwrap();
    for s in 0..100 {
        let rec = simulate_shot(&exp.circuit, 0.0, &mut shot_rng(9, s));
        assert!(rec.measurement_flips.iter().all(|&f| !f));
        assert!(rec.final_frame.is_identity());
    }
}

#[test]
fn x_fault_flips_z_measurement() {
    let mut b = CircuitBuilder::new(1);
    b.gate(0, GateKind::InitZ(0));
    b.set_noisy(1, true);
    b.gate(2, GateKind::MeasureZ(0));
    let c = b.finish().unwrap();
    let site = c
        .sites()
        .iter()
        .position(|s| s.layer == 1 && s.kind == FaultKind::Depolarize1(0))
        .unwrap();
    assert_eq!(
        c.sites()[site].alternative(0),
        FaultEffect::Pauli1(0, Pauli::X)
    );
    let rec = propagate(&c, &[(site, 0)]);
    assert_eq!(rec.measurement_flips, vec![true]);
    // Z commutes with the measurement.
    assert_eq!(propagate(&c, &[(site, 2)]).measurement_flips, vec![false]);
}

#[test]
fn init_resets_the_frame() {
    let mut b = CircuitBuilder::new(1);
    b.initially_active([0]);
    b.set_noisy(0, true);
    b.gate(1, GateKind::InitZ(0));
    b.set_noisy(1, false);
    b.gate(2, GateKind::MeasureZ(0));
    b.set_noisy(2, false);
    let c = b.finish().unwrap();
    assert_eq!(c.sites().len(), 1);
    for a in 0..3 {
        assert_eq!(propagate(&c, &[(0, a)]).measurement_flips, vec![false]);
    }
}

#[test]
fn enumeration_examples() {
    assert!(enumerate_single_faults(&CircuitBuilder::new(3).finish().unwrap()).is_empty());

    let cx = enumerate_single_faults(&one_gate(
        2,
        GateKind::Cnot {
            control: 0,
            target: 1,
        },
    ));
    assert_eq!(cx.len(), 15);
    assert!(cx.iter().all(|f| f.coefficient == Ratio::new(1, 15)));

    let h = enumerate_single_faults(&one_gate(1, GateKind::H(0)));
    assert_eq!(h.len(), 3);
    assert!(h.iter().all(|f| f.coefficient == Ratio::new(1, 3)));
    let frames: Vec<Pauli> = h.iter().map(|f| f.record.final_frame.get(0)).collect();
    assert_eq!(frames, vec![Pauli::X, Pauli::Y, Pauli::Z]);
}

#[test]
fn alternative_weights_sum_to_one() {
    let exp = MemoryExperiment::new(3).unwrap();
    for s in exp.circuit.sites() {
        let total: Ratio<i64> = (0..s.num_alternatives()).map(|_| s.coefficient()).sum();
        assert_eq!(total, Ratio::from_integer(1));
    }
}

#[test]
fn schedule_conflicts_are_rejected() {
    let mut b = CircuitBuilder::new(2);
    b.gate(0, GateKind::H(0));
    b.gate(
        0,
        GateKind::Cnot {
            control: 0,
            target: 1,
        },
    );
    assert!(b.finish().is_err());
    let mut b = CircuitBuilder::new(2);
    b.gate(0, GateKind::H(2));
    assert!(b.finish().is_err());
}

/// Random layered Clifford circuit on `n` qubits followed by an ideal mixed-basis readout.
fn random_clifford(n: usize, depth: usize, seed: u64) -> TimedCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = CircuitBuilder::new(n);
    b.initially_active(0..n);
    for l in 0..depth {
        b.set_noisy(l, true);
        let mut free: Vec<usize> = (0..n).collect();
        while !free.is_empty() {
            let a = free.swap_remove(rng.gen_range(0..free.len()));
            match rng.gen_range(0..3) {
                0 => {
                    b.gate(l, GateKind::H(a));
                }
                1 if !free.is_empty() => {
                    let t = free.swap_remove(rng.gen_range(0..free.len()));
                    b.gate(
                        l,
                        GateKind::Cnot {
                            control: a,
                            target: t,
                        },
                    );
                }
                _ => {}
            }
        }
    }
    for q in 0..n {
        b.gate(
            depth,
            if q % 2 == 0 {
                GateKind::MeasureZ(q)
            } else {
                GateKind::MeasureX(q)
            },
        );
    }
    b.set_noisy(depth, false);
    b.finish().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn propagation_equals_conjugation(n in 1usize..=6, depth in 1usize..10, seed in any::<u64>(), pick in any::<u64>()) {
        let c = random_clifford(n, depth, seed);
        let sites = c.sites();
        prop_assume!(!sites.is_empty());
        let s = (pick as usize) % sites.len();
        let alt = (pick as usize / sites.len()) % sites[s].num_alternatives();
        let p = sites[s].alternative(alt).pauli(n).unwrap();
        let before_readout = c.conjugate_layers(&p, sites[s].layer + 1, depth).unwrap();
        let rec = propagate(&c, &[(s, alt)]);
        for (e, m) in c.measurements().iter().enumerate() {
            let want = match m.basis {
                Basis::Z => before_readout.x_bit(m.qubit),
                Basis::X => before_readout.z_bit(m.qubit),
            };
            prop_assert_eq!(rec.measurement_flips[e], want);
        }
    }

    #[test]
    fn table_is_linear(faults in proptest::collection::btree_map(0usize..10_000, 0usize..15, 0..6)) {
        let exp = MemoryExperiment::new(3).unwrap();
        let table = SparseFaultTable::build(&exp.circuit, &exp.model);
        let set: Vec<(usize, usize)> = faults
            .into_iter()
            .map(|(s, a)| {
                let s = s % table.num_sites();
                (s, a % table.num_alternatives(s))
            })
            .collect::<std::collections::BTreeMap<_, _>>()
            .into_iter()
            .collect();
        let mut scratch = ShotScratch::default();
        table.combine(&set, &mut scratch);
        let direct = exp.model.fired(&propagate(&exp.circuit, &set));
        prop_assert_eq!(scratch.fired(), direct.as_slice());
    }
}

#[test]
fn shots_are_reproducible() {
    let exp = MemoryExperiment::new(3).unwrap();
    for s in 0..50 {
        let a = simulate_shot(&exp.circuit, 5e-3, &mut shot_rng(77, s));
        let b = simulate_shot(&exp.circuit, 5e-3, &mut shot_rng(77, s));
        assert_eq!(a, b);
    }
    let differ = (0..50).any(|s| {
        simulate_shot(&exp.circuit, 5e-3, &mut shot_rng(77, s))
            != simulate_shot(&exp.circuit, 5e-3, &mut shot_rng(78, s))
    });
    assert!(differ);
}

#[derive(Default, Debug, PartialEq, Eq)]
struct Hist(u64, u64);

impl Tally for Hist {
    fn merge(&mut self, o: Self) {
        self.0 += o.0;
        self.1 += o.1;
    }
}

#[test]
fn run_shots_ignores_thread_count() {
    let f = |_: &mut (), rng: &mut ChaCha8Rng| Hist(1, rng.gen_range(0..1000));
    let a: Hist = run_shots(10_000, 5, Some(1), || (), f);
    let b: Hist = run_shots(10_000, 5, Some(3), || (), f);
    let c: Hist = run_shots(10_000, 5, None, || (), f);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a.0, 10_000);
}

/// First-order probability that some detector fires, from the enumerated faults.
fn first_order_rejection(
    c: &TimedCircuit,
    num_detectors: usize,
    fired: impl Fn(&star_core::frame::ShotRecord) -> Vec<u32>,
) -> f64 {
    enumerate_single_faults(c)
        .iter()
        .filter(|f| {
            fired(&f.record)
                .iter()
                .any(|&o| (o as usize) < num_detectors)
        })
        .map(|f| *f.coefficient.numer() as f64 / *f.coefficient.denom() as f64)
        .sum()
}

#[test]
fn stage1_rejection_follows_first_order() {
    let s1 = build_stage1_circuit(VariantKind::Direct).unwrap();
    let nd = s1.model.detectors.len();
    let c1 = first_order_rejection(&s1.circuit, nd, |r| s1.model.fired(r));
    let p = 1e-3;
    let shots = 100_000u64;
    let rejected = (0..shots)
        .filter(|&s| {
            let rec = simulate_shot(&s1.circuit, p, &mut shot_rng(21, s));
            s1.model.fired(&rec).iter().any(|&o| (o as usize) < nd)
        })
        .count();
    let got = rejected as f64 / shots as f64;
    let want = c1 * p;
    assert!(
        (got - want).abs() <= 0.2 * want,
        "rejection {got} vs first order {want}"
    );
}

#[test]
fn signature_frequencies_follow_first_order() {
    // Each single-fault signature at low p occurs with probability p times its summed weight.
    let s1 = build_stage1_circuit(VariantKind::IndirectAncilla).unwrap();
    let table = SparseFaultTable::build(&s1.circuit, &s1.model);
    let mut weight: std::collections::BTreeMap<Vec<u32>, f64> = Default::default();
    for row in 0..table.num_rows() {
        let c = table.coefficient(row);
        *weight.entry(table.row(row).to_vec()).or_default() +=
            *c.numer() as f64 / *c.denom() as f64;
    }
    let p = 1e-4;
    let shots = 2_000_000u64;
    let mut seen: std::collections::BTreeMap<Vec<u32>, u64> = Default::default();
    let mut scratch = ShotScratch::default();
    for s in 0..shots {
        table.sample(p, &mut shot_rng(4, s), &mut scratch);
        if scratch.num_faults() > 0 {
            *seen.entry(scratch.fired().to_vec()).or_default() += 1;
        }
    }
    let top: Vec<_> = {
        let mut v: Vec<_> = weight.iter().filter(|(k, _)| !k.is_empty()).collect();
        v.sort_by(|a, b| b.1.total_cmp(a.1));
        v.into_iter().take(5).collect()
    };
    for (sig, w) in top {
        let want = w * p;
        let k = seen.get(sig).copied().unwrap_or(0);
        assert!(
            within(k, shots, want, 3.0),
            "signature {sig:?}: {k} vs {}",
            want * shots as f64
        );
    }
}

#[test]
fn rotation_flip_is_recorded() {
    let s1 = build_stage1_circuit(VariantKind::Direct).unwrap();
    let c = &s1.circuit;
    let n = c.num_qubits();
    let rot = &c.rotations()[0];
    let x0 = PauliString::single(n, 0, Pauli::X);
    let (site, alt) = c
        .layer_sites(rot.layer - 1)
        .flat_map(|s| (0..c.sites()[s].num_alternatives()).map(move |a| (s, a)))
        .find(|&(s, a)| {
            c.sites()[s]
                .alternative(a)
                .pauli(n)
                .is_some_and(|p| p.same_pauli(&x0))
        })
        .expect("X on data 0 before the rotation");
    let rec = propagate(c, &[(site, alt)]);
    assert_eq!(rec.rotation_flips, vec![true]);
    assert!(!rot.absorber.commutes_with(&rot.generator));
    let z = PauliString::single(n, 0, Pauli::Z);
    assert!(z.commutes_with(&rot.generator));
}
