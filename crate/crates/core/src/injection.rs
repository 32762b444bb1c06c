//! Low-error ancilla-state injection through the [[4,1,1,2]] subsystem code.
//!
//! Stage 1 encodes `|+>_L` on four data qubits, applies the logical `Z` rotation (simulated at
//! zero angle) and measures the gauge operators twice. Stage 2 embeds the four qubits in the
//! upper-left corner of a distance-`d` patch, initializes the rest and measures every
//! plaquette twice, the second time noiselessly. Both stages post-select on their syndromes.
//!
//! Qubit labels: data `0..4` are the 2×2 block in row-major order, `M0`/`M3` measure the
//! X gauges `X0X2`/`X1X3` and `M1`/`M2` the Z gauges `Z0Z1`/`Z2Z3`. Individual gauge outcomes
//! are random, so post-selection uses their products `S_X = X0X1X2X3` and `S_Z = Z0Z1Z2Z3`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::circuit::{CircuitBuilder, GateKind, TimedCircuit};
use crate::decoder::binomial_rate;
use crate::error::{Result, StarError};
use crate::frame::{enumerate_single_faults, DetectorModel, ShotScratch, SparseFaultTable};
use crate::montecarlo::{run_shots, Tally};
use crate::pauli::{Pauli, PauliString};
use crate::surface_code::{PlaquetteType, RotatedSurfaceLayout, ROUND_LAYERS};

/// How the logical `Z0Z2` rotation is realised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    /// Native two-qubit `ZZ` rotation.
    Direct,
    /// `CNOT(0,2) · RZ(2) · CNOT(0,2)`.
    IndirectTwoCnot,
    /// Parity collected on an extra ancilla, rotated there, uncomputed and checked.
    IndirectAncilla,
}

impl VariantKind {
    pub const ALL: [VariantKind; 3] = [
        VariantKind::Direct,
        VariantKind::IndirectTwoCnot,
        VariantKind::IndirectAncilla,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Direct => "direct",
            VariantKind::IndirectTwoCnot => "indirect_two_cnot",
            VariantKind::IndirectAncilla => "indirect_ancilla",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantKind {
    type Err = StarError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(VariantKind::Direct),
            "indirect_two_cnot" | "upper" => Ok(VariantKind::IndirectTwoCnot),
            "indirect_ancilla" | "lower" => Ok(VariantKind::IndirectAncilla),
            other => Err(StarError::Config(format!(
                "unknown variant {other:?}; expected direct, indirect_two_cnot or indirect_ancilla"
            ))),
        }
    }
}

/// Operators of the [[4,1,1,2]] code on qubits `0..4`.
#[derive(Clone, Debug)]
pub struct FourTwoTwoCode {
    pub stabilizer_x: PauliString,
    pub stabilizer_z: PauliString,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    pub gauge_x: PauliString,
    pub gauge_z: PauliString,
}

impl Default for FourTwoTwoCode {
    fn default() -> Self {
        Self::new()
    }
}

impl FourTwoTwoCode {
    pub fn new() -> Self {
        Self {
            stabilizer_x: PauliString::on(4, &[0, 1, 2, 3], Pauli::X),
            stabilizer_z: PauliString::on(4, &[0, 1, 2, 3], Pauli::Z),
            logical_x: PauliString::on(4, &[0, 1], Pauli::X),
            logical_z: PauliString::on(4, &[0, 2], Pauli::Z),
            gauge_x: PauliString::on(4, &[0, 2], Pauli::X),
            gauge_z: PauliString::on(4, &[0, 1], Pauli::Z),
        }
    }
}

/// Physical indices of the stage-1 qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stage1Qubits {
    pub data: [usize; 4],
    /// `M0..M3`.
    pub meas: [usize; 4],
    /// Extra ancilla of the indirect-ancilla variant.
    pub m4: usize,
}

/// Layer bookkeeping of a pushed stage 1.
#[derive(Clone, Copy, Debug)]
struct Stage1Layers {
    /// Measurement layer of `M0..M3` in each round.
    meas: [[usize; 4]; 2],
    m4_meas: Option<usize>,
    /// Layer in which stage 2 may start initializing its qubits.
    stage2_start: usize,
}

fn push_stage1(b: &mut CircuitBuilder, q: Stage1Qubits, variant: VariantKind) -> Stage1Layers {
    let [d0, d1, d2, d3] = q.data;
    let [m0, m1, m2, m3] = q.meas;
    let cnot = |control, target| GateKind::Cnot { control, target };
    for &d in &q.data {
        b.gate(0, GateKind::InitZ(d));
    }
    b.gate(1, GateKind::H(d1)).gate(1, GateKind::H(d3));
    b.gate(2, cnot(d1, d0)).gate(2, cnot(d3, d2));
    let mut m4_meas = None;
    let rot_end = match variant {
        VariantKind::Direct => {
            b.gate(3, GateKind::RotZZ(d0, d2));
            3
        }
        VariantKind::IndirectTwoCnot => {
            b.gate(3, cnot(d0, d2));
            b.gate(4, GateKind::RotZ(d2));
            b.gate(5, cnot(d0, d2));
            5
        }
        VariantKind::IndirectAncilla => {
            b.gate(2, GateKind::InitZ(q.m4));
            b.gate(3, cnot(d0, q.m4));
            b.gate(4, cnot(d2, q.m4));
            b.gate(5, GateKind::RotZ(q.m4));
            b.gate(6, cnot(d2, q.m4));
            b.gate(7, cnot(d0, q.m4));
            b.gate(8, GateKind::MeasureZ(q.m4));
            m4_meas = Some(8);
            7
        }
    };
    let mut meas = [[0; 4]; 2];
    for (r, layers) in meas.iter_mut().enumerate() {
        let s = rot_end - 1 + 7 * r;
        b.gate(s, GateKind::InitZ(m0)).gate(s, GateKind::InitZ(m3));
        b.gate(s + 1, GateKind::H(m0)).gate(s + 1, GateKind::H(m3));
        b.gate(s + 2, cnot(m0, d0));
        b.gate(s + 3, cnot(m3, d1))
            .gate(s + 3, cnot(m0, d2))
            .gate(s + 3, GateKind::InitZ(m1))
            .gate(s + 3, GateKind::InitZ(m2));
        b.gate(s + 4, cnot(m3, d3)).gate(s + 4, cnot(d0, m1));
        b.gate(s + 5, GateKind::H(m0))
            .gate(s + 5, GateKind::H(m3))
            .gate(s + 5, cnot(d2, m2))
            .gate(s + 5, cnot(d1, m1));
        b.gate(s + 6, GateKind::MeasureZ(m0))
            .gate(s + 6, GateKind::MeasureZ(m3))
            .gate(s + 6, cnot(d3, m2));
        b.gate(s + 7, GateKind::MeasureZ(m1))
            .gate(s + 7, GateKind::MeasureZ(m2));
        *layers = [s + 6, s + 7, s + 7, s + 6];
    }
    Stage1Layers {
        meas,
        m4_meas,
        stage2_start: rot_end + 12,
    }
}

fn stage1_reference(n: usize, q: Stage1Qubits) -> PauliString {
    PauliString::on(n, &[q.data[0], q.data[1]], Pauli::X)
}

/// Stage-1 checks expressed as measurement-event parities.
fn stage1_checks(
    circuit: &TimedCircuit,
    q: Stage1Qubits,
    layers: &Stage1Layers,
) -> Vec<Vec<usize>> {
    let ev = |r: usize, i: usize| {
        circuit
            .event_at(layers.meas[r][i], q.meas[i])
            .expect("gauge measurement missing")
    };
    let mut checks = vec![
        vec![ev(0, 0), ev(0, 3), ev(1, 0), ev(1, 3)],
        vec![ev(0, 1), ev(0, 2), ev(1, 1), ev(1, 2)],
        vec![ev(0, 0), ev(0, 3)],
        vec![ev(0, 1), ev(0, 2)],
    ];
    if let Some(l) = layers.m4_meas {
        checks.push(vec![circuit
            .event_at(l, q.m4)
            .expect("ancilla check missing")]);
    }
    checks
}

/// Stage 1 on its own: `0..4` data, `4..8` gauge ancillas, `8` the variant ancilla.
#[derive(Clone, Debug)]
pub struct Stage1Circuit {
    pub variant: VariantKind,
    pub circuit: TimedCircuit,
    /// Checks (stage-1 post-selection) and the 422 logical observables.
    pub model: DetectorModel,
}

pub fn build_stage1_circuit(variant: VariantKind) -> Result<Stage1Circuit> {
    let q = Stage1Qubits {
        data: [0, 1, 2, 3],
        meas: [4, 5, 6, 7],
        m4: 8,
    };
    let n = 9;
    let mut b = CircuitBuilder::new(n);
    let layers = push_stage1(&mut b, q, variant);
    b.stabilizer_before(3, stage1_reference(n, q));
    let circuit = b.finish()?;
    let detectors = stage1_checks(&circuit, q, &layers);
    let model = DetectorModel {
        detectors,
        observables: vec![
            PauliString::on(n, &[0, 1], Pauli::X),
            PauliString::on(n, &[0, 2], Pauli::Z),
        ],
    };
    Ok(Stage1Circuit {
        variant,
        circuit,
        model,
    })
}

/// Verdict of the stage-1 post-selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage1Verdict {
    Accept,
    /// The two rounds disagree on a stabilizer.
    RejectRepeat,
    /// The rounds agree but the first round shows an unexpected stabilizer value.
    RejectFirstRound,
}

/// Post-selection on two rounds of gauge outcomes; `true` means outcome `-1`.
///
/// `rounds[r] = [M0, M1, M2, M3]`. Only the stabilizer products `M0·M3` and `M1·M2` are
/// deterministic, and both are expected to be `+1`.
pub fn apply_stage1_postselection(rounds: [[bool; 4]; 2]) -> Stage1Verdict {
    let sx = |r: usize| rounds[r][0] ^ rounds[r][3];
    let sz = |r: usize| rounds[r][1] ^ rounds[r][2];
    if sx(0) != sx(1) || sz(0) != sz(1) {
        Stage1Verdict::RejectRepeat
    } else if sx(0) || sz(0) {
        Stage1Verdict::RejectFirstRound
    } else {
        Stage1Verdict::Accept
    }
}

/// Initial state of each data qubit of the expanded patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExpansionInit {
    /// Part of the injected 2×2 block.
    Block,
    Plus,
    Zero,
}

/// Stabilizers that fix the value of a plaquette before expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockGenerator {
    StabilizerX,
    GaugeZTop,
    GaugeZBottom,
}

/// Expansion layout for a distance-`d` patch.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub layout: RotatedSurfaceLayout,
    pub init: Vec<ExpansionInit>,
    /// Patch indices of the 2×2 block, in the order `0, 1, 2, 3`.
    pub block: [usize; 4],
    /// For each plaquette, `Some(generators)` if its value is fixed by the initial state.
    pub determined: Vec<Option<Vec<BlockGenerator>>>,
}

impl Expansion {
    pub fn new(d: usize) -> Result<Self> {
        let layout = RotatedSurfaceLayout::new(d)?;
        let block = [0, 1, d, d + 1];
        let init: Vec<ExpansionInit> = (0..d * d)
            .map(|i| {
                let (r, c) = (i / d, i % d);
                if r < 2 && c < 2 {
                    ExpansionInit::Block
                } else if r < 2 {
                    ExpansionInit::Plus
                } else {
                    ExpansionInit::Zero
                }
            })
            .collect();
        let sx = vec![0, 1, d, d + 1];
        let z_top = vec![0, 1];
        let z_bottom = vec![d, d + 1];
        let determined = layout
            .plaquettes
            .iter()
            .map(|pl| {
                let single = match pl.kind {
                    PlaquetteType::X => ExpansionInit::Plus,
                    PlaquetteType::Z => ExpansionInit::Zero,
                };
                let rest: Vec<usize> = pl
                    .support()
                    .into_iter()
                    .filter(|&q| init[q] != single)
                    .collect();
                if rest.iter().any(|&q| init[q] != ExpansionInit::Block) {
                    return None;
                }
                let options: Vec<(BlockGenerator, &Vec<usize>)> = match pl.kind {
                    PlaquetteType::X => vec![(BlockGenerator::StabilizerX, &sx)],
                    PlaquetteType::Z => vec![
                        (BlockGenerator::GaugeZTop, &z_top),
                        (BlockGenerator::GaugeZBottom, &z_bottom),
                    ],
                };
                let mut used = Vec::new();
                let mut covered = Vec::new();
                for (g, set) in options {
                    if set.iter().all(|q| rest.contains(q)) {
                        used.push(g);
                        covered.extend(set.iter().copied());
                    } else if set.iter().any(|q| rest.contains(q)) {
                        return None;
                    }
                }
                (covered.len() == rest.len()).then_some(used)
            })
            .collect();
        Ok(Self {
            layout,
            init,
            block,
            determined,
        })
    }

    pub fn is_determined(&self, k: usize) -> bool {
        self.determined[k].is_some()
    }

    /// Pushes the stage-2 initialization and two rounds (the second noiseless) starting at
    /// `start`. Returns the measurement layer of each round.
    fn push(&self, b: &mut CircuitBuilder, start: usize, meas: &[usize]) -> [usize; 2] {
        for (q, init) in self.init.iter().enumerate() {
            match init {
                ExpansionInit::Block => {}
                ExpansionInit::Plus => {
                    b.gate(start, GateKind::InitX(q));
                }
                ExpansionInit::Zero => {
                    b.gate(start, GateKind::InitZ(q));
                }
            }
        }
        let r1 = self.layout.push_round(b, start, meas, true);
        let r2 = self.layout.push_round(b, start + ROUND_LAYERS, meas, false);
        [r1, r2]
    }

    fn stage2_checks(
        &self,
        circuit: &TimedCircuit,
        meas: &[usize],
        rounds: [usize; 2],
        gauge_refs: Option<[usize; 2]>,
    ) -> Vec<Vec<usize>> {
        let ev = |k: usize, r: usize| {
            circuit
                .event_at(rounds[r], meas[k])
                .expect("plaquette measurement missing")
        };
        let mut checks = Vec::new();
        for k in 0..self.layout.plaquettes.len() {
            checks.push(vec![ev(k, 0), ev(k, 1)]);
        }
        for (k, det) in self.determined.iter().enumerate() {
            if let Some(gens) = det {
                let mut check = vec![ev(k, 0)];
                if let Some([top, bottom]) = gauge_refs {
                    for g in gens {
                        match g {
                            BlockGenerator::GaugeZTop => check.push(top),
                            BlockGenerator::GaugeZBottom => check.push(bottom),
                            BlockGenerator::StabilizerX => {}
                        }
                    }
                }
                checks.push(check);
            }
        }
        checks
    }
}

/// Stage 2 on its own, starting from the ideal post-selected 2×2 state at layer 0.
#[derive(Clone, Debug)]
pub struct Stage2Circuit {
    pub expansion: Expansion,
    pub circuit: TimedCircuit,
    pub model: DetectorModel,
}

pub fn build_stage2_circuit(d: usize) -> Result<Stage2Circuit> {
    let expansion = Expansion::new(d)?;
    let layout = &expansion.layout;
    let n = layout.num_qubits();
    let meas: Vec<usize> = (layout.num_data()..n).collect();
    let mut b = CircuitBuilder::new(n);
    b.initially_active(expansion.block);
    let rounds = expansion.push(&mut b, 0, &meas);
    let circuit = b.finish()?;
    let detectors = expansion.stage2_checks(&circuit, &meas, rounds, None);
    let model = DetectorModel {
        detectors,
        observables: vec![layout.logical_x_operator(n), layout.logical_z_operator(n)],
    };
    Ok(Stage2Circuit {
        expansion,
        circuit,
        model,
    })
}

/// The complete protocol: stage 1 followed by the overlapping expansion.
#[derive(Clone, Debug)]
pub struct InjectionExperiment {
    pub d: usize,
    pub variant: VariantKind,
    pub expansion: Expansion,
    pub circuit: TimedCircuit,
    /// Stage-1 checks, then stage-2 checks; observables are logical X (row 0) and Z (column 0).
    pub model: DetectorModel,
    pub num_stage1_checks: usize,
    pub table: SparseFaultTable,
}

/// Observable index flagging a logical Z error.
pub const INJ_OBS_Z_ERROR: usize = 0;
/// Observable index flagging a logical X error.
pub const INJ_OBS_X_ERROR: usize = 1;

/// Result of one injection attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StageReached {
    RejectedStage1,
    RejectedStage2,
    Accepted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InjectionOutcome {
    pub stage_reached: StageReached,
    pub logical_z_error: bool,
    pub logical_x_error: bool,
    pub rounds_used: usize,
}

impl InjectionExperiment {
    pub fn new(d: usize, variant: VariantKind) -> Result<Self> {
        let expansion = Expansion::new(d)?;
        let layout = &expansion.layout;
        let nd = layout.num_data();
        let np = layout.plaquettes.len();
        let base = nd + np;
        let q = Stage1Qubits {
            data: expansion.block,
            meas: [base, base + 1, base + 2, base + 3],
            m4: base + 4,
        };
        let n = base + 5;
        let patch_meas: Vec<usize> = (nd..base).collect();
        let mut b = CircuitBuilder::new(n);
        let layers = push_stage1(&mut b, q, variant);
        b.stabilizer_before(3, stage1_reference(n, q));
        let rounds = expansion.push(&mut b, layers.stage2_start, &patch_meas);
        let circuit = b.finish()?;

        let mut detectors = stage1_checks(&circuit, q, &layers);
        let num_stage1_checks = detectors.len();
        let gauge_refs = [
            circuit
                .event_at(layers.meas[1][1], q.meas[1])
                .expect("gauge event"),
            circuit
                .event_at(layers.meas[1][2], q.meas[2])
                .expect("gauge event"),
        ];
        detectors.extend(expansion.stage2_checks(&circuit, &patch_meas, rounds, Some(gauge_refs)));
        let model = DetectorModel {
            detectors,
            observables: vec![layout.logical_x_operator(n), layout.logical_z_operator(n)],
        };
        let table = SparseFaultTable::build(&circuit, &model);
        Ok(Self {
            d,
            variant,
            expansion,
            circuit,
            model,
            num_stage1_checks,
            table,
        })
    }

    /// Classifies the sorted list of fired outputs.
    pub fn classify(&self, fired: &[u32]) -> InjectionOutcome {
        let s1 = self.num_stage1_checks as u32;
        let nd = self.model.detectors.len() as u32;
        let stage = match fired.first() {
            Some(&o) if o < s1 => StageReached::RejectedStage1,
            Some(&o) if o < nd => StageReached::RejectedStage2,
            _ => StageReached::Accepted,
        };
        let accepted = stage == StageReached::Accepted;
        InjectionOutcome {
            stage_reached: stage,
            logical_z_error: accepted && fired.contains(&(nd + INJ_OBS_Z_ERROR as u32)),
            logical_x_error: accepted && fired.contains(&(nd + INJ_OBS_X_ERROR as u32)),
            rounds_used: if stage == StageReached::RejectedStage1 {
                2
            } else {
                4
            },
        }
    }
}

/// Exact first-order coefficients of the accepted logical error rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeadingCoefficients {
    pub c_z: Ratio<i64>,
    pub c_x: Ratio<i64>,
    /// Coefficient of the stage-1 rejection probability.
    pub reject_stage1: Ratio<i64>,
    pub reject_stage2: Ratio<i64>,
}

/// Replays every single fault of the full protocol and sums the coefficients of those that are
/// accepted with a logical error.
pub fn oracle_leading_coefficients(variant: VariantKind, d: usize) -> Result<LeadingCoefficients> {
    let exp = InjectionExperiment::new(d, variant)?;
    Ok(exp.leading_coefficients())
}

impl InjectionExperiment {
    pub fn leading_coefficients(&self) -> LeadingCoefficients {
        let zero = Ratio::from_integer(0);
        let mut out = LeadingCoefficients {
            c_z: zero,
            c_x: zero,
            reject_stage1: zero,
            reject_stage2: zero,
        };
        for row in 0..self.table.num_rows() {
            let o = self.classify(self.table.row(row));
            let c = self.table.coefficient(row);
            match o.stage_reached {
                StageReached::RejectedStage1 => out.reject_stage1 += c,
                StageReached::RejectedStage2 => out.reject_stage2 += c,
                StageReached::Accepted => {
                    if o.logical_z_error {
                        out.c_z += c;
                    }
                    if o.logical_x_error {
                        out.c_x += c;
                    }
                }
            }
        }
        out
    }

    /// Same as [`leading_coefficients`](Self::leading_coefficients) but by direct replay of
    /// each fault rather than through the fault table.
    pub fn leading_coefficients_by_replay(&self) -> LeadingCoefficients {
        let zero = Ratio::from_integer(0);
        let mut out = LeadingCoefficients {
            c_z: zero,
            c_x: zero,
            reject_stage1: zero,
            reject_stage2: zero,
        };
        for f in enumerate_single_faults(&self.circuit) {
            let o = self.classify(&self.model.fired(&f.record));
            match o.stage_reached {
                StageReached::RejectedStage1 => out.reject_stage1 += f.coefficient,
                StageReached::RejectedStage2 => out.reject_stage2 += f.coefficient,
                StageReached::Accepted => {
                    if o.logical_z_error {
                        out.c_z += f.coefficient;
                    }
                    if o.logical_x_error {
                        out.c_x += f.coefficient;
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InjectionCounts {
    pub shots: u64,
    pub accepted: u64,
    pub rejected_stage1: u64,
    pub rejected_stage2: u64,
    pub logical_z_errors: u64,
}

impl Tally for InjectionCounts {
    fn merge(&mut self, o: Self) {
        self.shots += o.shots;
        self.accepted += o.accepted;
        self.rejected_stage1 += o.rejected_stage1;
        self.rejected_stage2 += o.rejected_stage2;
        self.logical_z_errors += o.logical_z_errors;
    }
}

/// Monte-Carlo summary of an injection campaign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InjectionStats {
    pub d: usize,
    pub p: f64,
    pub variant: VariantKind,
    pub counts: InjectionCounts,
    pub acceptance_rate: f64,
    pub sigma_acceptance: f64,
    /// Logical Z error rate among accepted shots.
    pub p_z: f64,
    pub sigma_z: f64,
}

impl InjectionStats {
    pub fn failure_rate(&self) -> f64 {
        1.0 - self.acceptance_rate
    }
}

impl InjectionExperiment {
    pub fn run(&self, p: f64, shots: u64, seed: u64, threads: Option<usize>) -> InjectionCounts {
        if p <= 0.0 {
            return InjectionCounts {
                shots,
                accepted: shots,
                ..Default::default()
            };
        }
        run_shots(
            shots,
            seed,
            threads,
            ShotScratch::default,
            |scratch, rng| {
                self.table.sample(p, rng, scratch);
                let o = self.classify(scratch.fired());
                InjectionCounts {
                    shots: 1,
                    accepted: (o.stage_reached == StageReached::Accepted) as u64,
                    rejected_stage1: (o.stage_reached == StageReached::RejectedStage1) as u64,
                    rejected_stage2: (o.stage_reached == StageReached::RejectedStage2) as u64,
                    logical_z_errors: o.logical_z_error as u64,
                }
            },
        )
    }

    pub fn stats(&self, p: f64, counts: InjectionCounts) -> InjectionStats {
        let (acceptance_rate, sigma_acceptance) = binomial_rate(counts.accepted, counts.shots);
        let (p_z, sigma_z) = binomial_rate(counts.logical_z_errors, counts.accepted);
        InjectionStats {
            d: self.d,
            p,
            variant: self.variant,
            counts,
            acceptance_rate,
            sigma_acceptance,
            p_z,
            sigma_z,
        }
    }
}

/// Runs the full protocol `shots` times at noise `p`.
pub fn run_injection_experiment(
    d: usize,
    p: f64,
    shots: u64,
    variant: VariantKind,
    seed: u64,
    threads: Option<usize>,
) -> Result<InjectionStats> {
    if shots == 0 {
        return Err(StarError::Config("shots must be at least 1".into()));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(StarError::Config(format!(
            "p must lie in [0, 0.5], got {p}"
        )));
    }
    let exp = InjectionExperiment::new(d, variant)?;
    let counts = exp.run(p, shots, seed, threads);
    Ok(exp.stats(p, counts))
}
