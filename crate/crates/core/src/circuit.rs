//! Layered circuits with an explicit fault-site list.
//!
//! A [`TimedCircuit`] is a sequence of layers; each qubit is touched by at most one gate per
//! layer. When the circuit is finalised every active qubit that is not acted on in a layer
//! receives an explicit `Idle` gate, measurement events are numbered in time order and one
//! [`FaultSite`] is created per noisy gate. Sites are ordered by layer, then by the first qubit
//! of their gate; alternatives within a site are ordered by Pauli index.

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Result, StarError};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    InitZ(usize),
    InitX(usize),
    MeasureZ(usize),
    MeasureX(usize),
    Idle(usize),
    /// Single-qubit `exp(-i θ Z / 2)`; the angle is irrelevant to the frame.
    RotZ(usize),
    /// Two-qubit `exp(-i θ Z⊗Z / 2)`.
    RotZZ(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

impl GateKind {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            GateKind::H(q)
            | GateKind::InitZ(q)
            | GateKind::InitX(q)
            | GateKind::MeasureZ(q)
            | GateKind::MeasureX(q)
            | GateKind::Idle(q)
            | GateKind::RotZ(q) => ([q, q], 1),
            GateKind::Cnot { control, target } => ([control, target], 2),
            GateKind::RotZZ(a, b) => ([a, b], 2),
        }
    }

    pub fn qubit_list(&self) -> Vec<usize> {
        let (qs, n) = self.qubits();
        qs[..n].to_vec()
    }

    fn first_qubit(&self) -> usize {
        self.qubits().0[0]
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(
            self,
            GateKind::InitZ(_) | GateKind::InitX(_) | GateKind::MeasureZ(_) | GateKind::MeasureX(_)
        )
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, GateKind::RotZ(_) | GateKind::RotZZ(..))
    }

    /// Conjugates `p` by this gate, `U p U†`, tracking the sign.
    ///
    /// Rotations are treated as the identity, which is their action at zero angle.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        let (qs, k) = self.qubits();
        if let Some(&q) = qs[..k].iter().find(|&&q| q >= p.num_qubits()) {
            return Err(StarError::Config(format!(
                "qubit {q} out of range for a {}-qubit Pauli",
                p.num_qubits()
            )));
        }
        let mut out = p.clone();
        match *self {
            GateKind::H(q) => out.apply_h(q),
            GateKind::Cnot { control, target } => out.apply_cnot(control, target),
            GateKind::Idle(_) | GateKind::RotZ(_) | GateKind::RotZZ(..) => {}
            _ => return Err(StarError::NonUnitary(format!("{self:?}"))),
        }
        Ok(out)
    }
}

/// One measurement in the circuit, numbered in time order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementEvent {
    pub layer: usize,
    pub qubit: usize,
    pub basis: Basis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub gates: Vec<GateKind>,
    pub noisy: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultKind {
    /// Uniform X/Y/Z after a one-qubit gate or idle.
    Depolarize1(usize),
    /// Uniform non-identity two-qubit Pauli after a two-qubit gate.
    Depolarize2(usize, usize),
    /// Preparation of the orthogonal state.
    InitFlip { qubit: usize, basis: Basis },
    /// Reported outcome flipped.
    MeasureFlip { event: usize },
}

/// Concrete effect of one fault alternative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultEffect {
    Pauli1(usize, Pauli),
    Pauli2(usize, Pauli, usize, Pauli),
    MeasureFlip(usize),
}

impl FaultEffect {
    /// Frame Pauli for gate-like faults, `None` for a measurement flip.
    pub fn pauli(&self, n: usize) -> Option<PauliString> {
        match *self {
            FaultEffect::Pauli1(q, p) => Some(PauliString::single(n, q, p)),
            FaultEffect::Pauli2(a, pa, b, pb) => {
                let mut s = PauliString::identity(n);
                s.set(a, pa);
                s.set(b, pb);
                Some(s)
            }
            FaultEffect::MeasureFlip(_) => None,
        }
    }
}

/// A location that fails with total probability `p`, choosing uniformly among its alternatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaultSite {
    pub layer: usize,
    pub kind: FaultKind,
}

impl FaultSite {
    pub fn num_alternatives(&self) -> usize {
        match self.kind {
            FaultKind::Depolarize1(_) => 3,
            FaultKind::Depolarize2(..) => 15,
            FaultKind::InitFlip { .. } | FaultKind::MeasureFlip { .. } => 1,
        }
    }

    /// Probability of each alternative divided by `p`.
    pub fn coefficient(&self) -> Ratio<i64> {
        Ratio::new(1, self.num_alternatives() as i64)
    }

    pub fn alternative(&self, a: usize) -> FaultEffect {
        assert!(a < self.num_alternatives(), "alternative {a} out of range");
        match self.kind {
            FaultKind::Depolarize1(q) => FaultEffect::Pauli1(q, Pauli::from_index(a + 1)),
            FaultKind::Depolarize2(q0, q1) => {
                let idx = a + 1;
                FaultEffect::Pauli2(
                    q0,
                    Pauli::from_index(idx >> 2),
                    q1,
                    Pauli::from_index(idx & 3),
                )
            }
            FaultKind::InitFlip { qubit, basis } => FaultEffect::Pauli1(
                qubit,
                match basis {
                    Basis::Z => Pauli::X,
                    Basis::X => Pauli::Z,
                },
            ),
            FaultKind::MeasureFlip { event } => FaultEffect::MeasureFlip(event),
        }
    }

    /// Draws this site once: `Some(alternative)` with probability `p`, uniform among alternatives.
    pub fn sample<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Option<usize> {
        if rng.gen::<f64>() < p {
            Some(rng.gen_range(0..self.num_alternatives()))
        } else {
            None
        }
    }
}

/// Draws `site` once. Convenience wrapper around [`FaultSite::sample`].
pub fn sample_fault<R: Rng + ?Sized>(site: &FaultSite, p: f64, rng: &mut R) -> Option<FaultEffect> {
    site.sample(p, rng).map(|a| site.alternative(a))
}

/// A noiseless rotation at zero angle together with the stabilizer used to undo sign flips.
///
/// When the incoming frame anticommutes with `generator`, the frame is multiplied by
/// `absorber`, a stabilizer of the pre-rotation state that also anticommutes with `generator`.
/// This maps the faulty state onto the equivalent state in which the rotation sees no X-type
/// error, so rotation-angle flips show up only through whatever the absorber leaves behind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationPoint {
    pub layer: usize,
    pub generator: PauliString,
    pub absorber: PauliString,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimedCircuit {
    num_qubits: usize,
    layers: Vec<Layer>,
    measurements: Vec<MeasurementEvent>,
    /// Measurement event index for each gate, parallel to `layers[l].gates`.
    gate_events: Vec<Vec<Option<usize>>>,
    sites: Vec<FaultSite>,
    /// First site index of each layer, with a trailing sentinel.
    layer_site_start: Vec<usize>,
    rotations: Vec<RotationPoint>,
}

impl TimedCircuit {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn measurements(&self) -> &[MeasurementEvent] {
        &self.measurements
    }

    pub fn sites(&self) -> &[FaultSite] {
        &self.sites
    }

    pub fn rotations(&self) -> &[RotationPoint] {
        &self.rotations
    }

    pub(crate) fn gate_event(&self, layer: usize, gate: usize) -> Option<usize> {
        self.gate_events[layer][gate]
    }

    /// Site indices belonging to `layer`.
    pub fn layer_sites(&self, layer: usize) -> std::ops::Range<usize> {
        self.layer_site_start[layer]..self.layer_site_start[layer + 1]
    }

    /// Measurement event produced by the gate `MeasureZ(q)`/`MeasureX(q)` in `layer`.
    pub fn event_at(&self, layer: usize, qubit: usize) -> Option<usize> {
        self.measurements
            .iter()
            .position(|m| m.layer == layer && m.qubit == qubit)
    }

    /// All measurement events on `qubit`, in time order.
    pub fn events_on(&self, qubit: usize) -> Vec<usize> {
        self.measurements
            .iter()
            .enumerate()
            .filter(|(_, m)| m.qubit == qubit)
            .map(|(i, _)| i)
            .collect()
    }

    /// Conjugates `p` through layers `from..to`, failing if a non-unitary gate touches its support.
    pub fn conjugate_layers(&self, p: &PauliString, from: usize, to: usize) -> Result<PauliString> {
        let mut out = p.clone();
        for layer in &self.layers[from..to] {
            for g in layer.gates.iter() {
                if g.is_unitary() {
                    out = g.conjugate(&out)?;
                } else {
                    let q = g.first_qubit();
                    if out.x_bit(q) || out.z_bit(q) {
                        return Err(StarError::NonUnitary(format!("{g:?}")));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Incremental construction of a [`TimedCircuit`].
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    num_qubits: usize,
    layers: Vec<Layer>,
    initially_active: Vec<bool>,
    stabilizer_refs: Vec<(usize, PauliString)>,
}

impl CircuitBuilder {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            layers: Vec::new(),
            initially_active: vec![false; num_qubits],
            stabilizer_refs: Vec::new(),
        }
    }

    /// Marks qubits that hold state before the first layer (and so receive idle noise).
    pub fn initially_active(&mut self, qubits: impl IntoIterator<Item = usize>) -> &mut Self {
        for q in qubits {
            self.initially_active[q] = true;
        }
        self
    }

    fn ensure_layer(&mut self, layer: usize) {
        while self.layers.len() <= layer {
            self.layers.push(Layer {
                gates: Vec::new(),
                noisy: true,
            });
        }
    }

    pub fn gate(&mut self, layer: usize, g: GateKind) -> &mut Self {
        self.ensure_layer(layer);
        self.layers[layer].gates.push(g);
        self
    }

    pub fn set_noisy(&mut self, layer: usize, noisy: bool) -> &mut Self {
        self.ensure_layer(layer);
        self.layers[layer].noisy = noisy;
        self
    }

    /// Declares that `stabilizer` holds on the state entering `layer`. Every rotation after
    /// `layer` takes its absorber from this stabilizer conjugated forward.
    pub fn stabilizer_before(&mut self, layer: usize, stabilizer: PauliString) -> &mut Self {
        self.stabilizer_refs.push((layer, stabilizer));
        self
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn finish(mut self) -> Result<TimedCircuit> {
        let n = self.num_qubits;
        let mut active = self.initially_active.clone();
        let mut measurements = Vec::new();
        let mut gate_events = Vec::with_capacity(self.layers.len());
        let mut sites = Vec::new();
        let mut layer_site_start = Vec::with_capacity(self.layers.len() + 1);

        for (l, layer) in self.layers.iter_mut().enumerate() {
            let mut used = vec![false; n];
            for g in &layer.gates {
                let (qs, k) = g.qubits();
                if k == 2 && qs[0] == qs[1] {
                    return Err(StarError::ScheduleInvalid(format!(
                        "layer {l}: {g:?} acts twice on one qubit"
                    )));
                }
                for &q in &qs[..k] {
                    if q >= n {
                        return Err(StarError::ScheduleInvalid(format!(
                            "layer {l}: qubit {q} out of range"
                        )));
                    }
                    if used[q] {
                        return Err(StarError::ScheduleInvalid(format!(
                            "layer {l}: qubit {q} used by more than one gate"
                        )));
                    }
                    used[q] = true;
                }
            }
            for (q, &u) in used.iter().enumerate() {
                if !u && active[q] {
                    layer.gates.push(GateKind::Idle(q));
                }
            }
            layer.gates.sort_by_key(|g| g.first_qubit());

            layer_site_start.push(sites.len());
            let mut events = Vec::with_capacity(layer.gates.len());
            for g in &layer.gates {
                let mut event = None;
                let site = match *g {
                    GateKind::H(q) | GateKind::Idle(q) | GateKind::RotZ(q) => {
                        Some(FaultKind::Depolarize1(q))
                    }
                    GateKind::Cnot { control, target } => {
                        Some(FaultKind::Depolarize2(control, target))
                    }
                    GateKind::RotZZ(a, b) => Some(FaultKind::Depolarize2(a, b)),
                    GateKind::InitZ(q) => {
                        active[q] = true;
                        Some(FaultKind::InitFlip {
                            qubit: q,
                            basis: Basis::Z,
                        })
                    }
                    GateKind::InitX(q) => {
                        active[q] = true;
                        Some(FaultKind::InitFlip {
                            qubit: q,
                            basis: Basis::X,
                        })
                    }
                    GateKind::MeasureZ(q) | GateKind::MeasureX(q) => {
                        let basis = if matches!(g, GateKind::MeasureZ(_)) {
                            Basis::Z
                        } else {
                            Basis::X
                        };
                        active[q] = false;
                        let e = measurements.len();
                        measurements.push(MeasurementEvent {
                            layer: l,
                            qubit: q,
                            basis,
                        });
                        event = Some(e);
                        Some(FaultKind::MeasureFlip { event: e })
                    }
                };
                events.push(event);
                if layer.noisy {
                    if let Some(kind) = site {
                        sites.push(FaultSite { layer: l, kind });
                    }
                }
            }
            gate_events.push(events);
        }
        layer_site_start.push(sites.len());

        let mut circuit = TimedCircuit {
            num_qubits: n,
            layers: self.layers,
            measurements,
            gate_events,
            sites,
            layer_site_start,
            rotations: Vec::new(),
        };

        let mut rotations = Vec::new();
        for (l, layer) in circuit.layers.iter().enumerate() {
            for g in layer.gates.iter().filter(|g| g.is_rotation()) {
                let generator = PauliString::on(n, &g.qubit_list(), Pauli::Z);
                let reference = self
                    .stabilizer_refs
                    .iter()
                    .filter(|(rl, _)| *rl <= l)
                    .max_by_key(|(rl, _)| *rl)
                    .ok_or_else(|| {
                        StarError::ScheduleInvalid(format!(
                            "rotation {g:?} in layer {l} has no reference stabilizer"
                        ))
                    })?;
                let absorber = circuit.conjugate_layers(&reference.1, reference.0, l)?;
                if absorber.commutes_with(&generator) {
                    return Err(StarError::ScheduleInvalid(format!(
                        "reference stabilizer commutes with rotation {g:?} in layer {l}"
                    )));
                }
                rotations.push(RotationPoint {
                    layer: l,
                    generator,
                    absorber,
                });
            }
        }
        circuit.rotations = rotations;
        Ok(circuit)
    }
}
