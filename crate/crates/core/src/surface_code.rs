//! Rotated surface-code layout, syndrome-extraction schedule and the memory experiment.
//!
//! Data qubit `(r, c)` with `r, c < d` has index `r * d + c` and grid coordinate
//! `(2r + 1, 2c + 1)`. A plaquette anchored at `(r, c)` covers the data qubits
//! `(r, c), (r, c+1), (r+1, c), (r+1, c+1)` that exist, and its measurement qubit sits at
//! `(2r + 2, 2c + 2)`. Bulk anchors have `0 <= r, c < d-1` and are X-type when `r + c` is
//! even. Weight-two Z plaquettes close the top and bottom edges, weight-two X plaquettes the
//! left and right edges. The logical X operator runs along row 0 and the logical Z operator
//! down column 0.

use serde::Serialize;

use crate::circuit::{Basis, CircuitBuilder, GateKind, TimedCircuit};
use crate::error::{Result, StarError};
use crate::frame::DetectorModel;
use crate::pauli::{Pauli, PauliString};

/// Layers per syndrome-extraction round.
pub const ROUND_LAYERS: usize = 8;

/// Corner offsets in CNOT order for X-type plaquettes.
const X_ORDER: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
/// Corner offsets in CNOT order for Z-type plaquettes.
const Z_ORDER: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlaquetteType {
    X,
    Z,
}

impl PlaquetteType {
    pub fn pauli(self) -> Pauli {
        match self {
            PlaquetteType::X => Pauli::X,
            PlaquetteType::Z => Pauli::Z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Plaquette {
    pub kind: PlaquetteType,
    /// Top-left anchor in data-qubit units; may be `-1` on the top or left edge.
    pub anchor: (i32, i32),
    /// Grid coordinate of the measurement qubit.
    pub coord: (i32, i32),
    /// Data qubit touched at each of the four CNOT steps, `None` where the corner is absent.
    pub schedule: [Option<usize>; 4],
}

impl Plaquette {
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.schedule.iter().flatten().copied().collect();
        s.sort_unstable();
        s
    }

    pub fn weight(&self) -> usize {
        self.schedule.iter().flatten().count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotatedSurfaceLayout {
    pub d: usize,
    /// Grid coordinate of each data qubit.
    pub data: Vec<(i32, i32)>,
    pub plaquettes: Vec<Plaquette>,
    /// Data qubits of the logical X operator (row 0).
    pub logical_x: Vec<usize>,
    /// Data qubits of the logical Z operator (column 0).
    pub logical_z: Vec<usize>,
}

impl RotatedSurfaceLayout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 || d % 2 == 0 {
            return Err(StarError::Config(format!(
                "code distance must be odd and at least 3, got {d}"
            )));
        }
        let di = d as i32;
        let data = (0..di)
            .flat_map(|r| (0..di).map(move |c| (2 * r + 1, 2 * c + 1)))
            .collect();
        let mut anchors = Vec::new();
        for r in -1..di {
            for c in -1..di {
                let bulk = r >= 0 && c >= 0 && r < di - 1 && c < di - 1;
                let kind = if bulk {
                    Some(if (r + c) % 2 == 0 {
                        PlaquetteType::X
                    } else {
                        PlaquetteType::Z
                    })
                } else if (r == -1 || r == di - 1) && (0..di - 1).contains(&c) {
                    let top = r == -1;
                    ((top && c % 2 == 0) || (!top && c % 2 == 1)).then_some(PlaquetteType::Z)
                } else if (c == -1 || c == di - 1) && (0..di - 1).contains(&r) {
                    let left = c == -1;
                    ((left && r % 2 == 1) || (!left && r % 2 == 0)).then_some(PlaquetteType::X)
                } else {
                    None
                };
                if let Some(k) = kind {
                    anchors.push((r, c, k));
                }
            }
        }
        let plaquettes = anchors
            .into_iter()
            .map(|(r, c, kind)| {
                let order = match kind {
                    PlaquetteType::X => X_ORDER,
                    PlaquetteType::Z => Z_ORDER,
                };
                let mut schedule = [None; 4];
                for (step, (dr, dc)) in order.iter().enumerate() {
                    let (rr, cc) = (r + *dr as i32, c + *dc as i32);
                    if (0..di).contains(&rr) && (0..di).contains(&cc) {
                        schedule[step] = Some((rr * di + cc) as usize);
                    }
                }
                Plaquette {
                    kind,
                    anchor: (r, c),
                    coord: (2 * r + 2, 2 * c + 2),
                    schedule,
                }
            })
            .collect();
        Ok(Self {
            d,
            data,
            plaquettes,
            logical_x: (0..d).collect(),
            logical_z: (0..d).map(|r| r * d).collect(),
        })
    }

    pub fn num_data(&self) -> usize {
        self.d * self.d
    }

    pub fn data_index(&self, r: usize, c: usize) -> usize {
        r * self.d + c
    }

    /// Total qubits: data followed by one measurement qubit per plaquette.
    pub fn num_qubits(&self) -> usize {
        self.num_data() + self.plaquettes.len()
    }

    /// Logical X as a Pauli on `n` qubits (data indices unchanged).
    pub fn logical_x_operator(&self, n: usize) -> PauliString {
        PauliString::on(n, &self.logical_x, Pauli::X)
    }

    pub fn logical_z_operator(&self, n: usize) -> PauliString {
        PauliString::on(n, &self.logical_z, Pauli::Z)
    }

    pub fn stabilizer(&self, k: usize, n: usize) -> PauliString {
        let pl = &self.plaquettes[k];
        PauliString::on(n, &pl.support(), pl.kind.pauli())
    }

    /// Appends one syndrome round starting at `start`. `meas[k]` is the measurement qubit of
    /// plaquette `k`. Returns the layer of the measurement step.
    pub fn push_round(
        &self,
        b: &mut CircuitBuilder,
        start: usize,
        meas: &[usize],
        noisy: bool,
    ) -> usize {
        for l in start..start + ROUND_LAYERS {
            b.set_noisy(l, noisy);
        }
        for (k, pl) in self.plaquettes.iter().enumerate() {
            let m = meas[k];
            b.gate(start, GateKind::InitZ(m));
            if pl.kind == PlaquetteType::X {
                b.gate(start + 1, GateKind::H(m));
                b.gate(start + 6, GateKind::H(m));
            }
            for (step, q) in pl.schedule.iter().enumerate() {
                if let Some(q) = *q {
                    let g = match pl.kind {
                        PlaquetteType::X => GateKind::Cnot {
                            control: m,
                            target: q,
                        },
                        PlaquetteType::Z => GateKind::Cnot {
                            control: q,
                            target: m,
                        },
                    };
                    b.gate(start + 2 + step, g);
                }
            }
            b.gate(start + 7, GateKind::MeasureZ(m));
        }
        start + 7
    }
}

/// Logical memory: a perfect code state, `d` noisy rounds and one final noiseless round.
#[derive(Clone, Debug)]
pub struct MemoryExperiment {
    pub layout: RotatedSurfaceLayout,
    pub circuit: TimedCircuit,
    pub model: DetectorModel,
    /// Basis of each detector's plaquette.
    pub detector_basis: Vec<Basis>,
    pub rounds: usize,
}

/// Observable index of the logical Z-error flag (frame anticommutes with logical X).
pub const OBS_Z_ERROR: usize = 0;
/// Observable index of the logical X-error flag (frame anticommutes with logical Z).
pub const OBS_X_ERROR: usize = 1;

impl MemoryExperiment {
    pub fn new(d: usize) -> Result<Self> {
        Self::with_rounds(d, d)
    }

    pub fn with_rounds(d: usize, noisy_rounds: usize) -> Result<Self> {
        let layout = RotatedSurfaceLayout::new(d)?;
        let nd = layout.num_data();
        let n = layout.num_qubits();
        let meas: Vec<usize> = (nd..n).collect();
        let mut b = CircuitBuilder::new(n);
        b.initially_active(0..nd);
        let rounds = noisy_rounds + 1;
        let mut meas_layers = Vec::with_capacity(rounds);
        for r in 0..rounds {
            meas_layers.push(layout.push_round(&mut b, r * ROUND_LAYERS, &meas, r < noisy_rounds));
        }
        let circuit = b.finish()?;

        let np = layout.plaquettes.len();
        let event = |k: usize, r: usize| {
            circuit
                .event_at(meas_layers[r], meas[k])
                .expect("plaquette measurement missing")
        };
        let mut detectors = Vec::with_capacity(rounds * np);
        let mut detector_basis = Vec::with_capacity(rounds * np);
        for r in 0..rounds {
            for (k, pl) in layout.plaquettes.iter().enumerate() {
                let mut det = vec![event(k, r)];
                if r > 0 {
                    det.push(event(k, r - 1));
                }
                detectors.push(det);
                detector_basis.push(match pl.kind {
                    PlaquetteType::X => Basis::X,
                    PlaquetteType::Z => Basis::Z,
                });
            }
        }
        let model = DetectorModel {
            detectors,
            observables: vec![layout.logical_x_operator(n), layout.logical_z_operator(n)],
        };
        Ok(Self {
            layout,
            circuit,
            model,
            detector_basis,
            rounds,
        })
    }
}
