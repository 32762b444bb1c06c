//! Pauli-frame propagation, single-fault enumeration and the sparse fault table.
//!
//! The frame is the Pauli difference between the noisy and the ideal run. Signs are not
//! tracked: a measurement outcome is flipped exactly when the frame anticommutes with the
//! measured observable at that point.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{FaultEffect, GateKind, TimedCircuit};
use crate::pauli::{flip_bit, get_bit, set_bit, words_for, Pauli, PauliString};

/// Per-shot random stream, independent of how shots are distributed over threads.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Outcome of propagating a set of faults through a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    /// One entry per measurement event, `true` if the outcome is flipped.
    pub measurement_flips: Vec<bool>,
    /// Frame after the last layer.
    pub final_frame: PauliString,
    /// One entry per rotation point, `true` if the absorber was applied.
    pub rotation_flips: Vec<bool>,
}

impl ShotRecord {
    /// Combines two records by linearity.
    pub fn xor(&self, other: &Self) -> Self {
        let mut final_frame = self.final_frame.clone();
        final_frame.xor_assign(&other.final_frame);
        Self {
            measurement_flips: xor_bools(&self.measurement_flips, &other.measurement_flips),
            final_frame,
            rotation_flips: xor_bools(&self.rotation_flips, &other.rotation_flips),
        }
    }
}

fn xor_bools(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Working state for a propagation.
struct Frame {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl Frame {
    fn new(n: usize) -> Self {
        let w = words_for(n);
        Self {
            x: vec![0; w],
            z: vec![0; w],
        }
    }

    fn anticommutes(&self, p: &PauliString) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & p.z_words()[i]) ^ (self.z[i] & p.x_words()[i])).count_ones();
        }
        parity & 1 == 1
    }

    fn xor_pauli(&mut self, p: &PauliString) {
        for i in 0..self.x.len() {
            self.x[i] ^= p.x_words()[i];
            self.z[i] ^= p.z_words()[i];
        }
    }

    fn apply_single(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        if x {
            flip_bit(&mut self.x, q);
        }
        if z {
            flip_bit(&mut self.z, q);
        }
    }
}

struct Propagation<'a> {
    circuit: &'a TimedCircuit,
    frame: Frame,
    flips: Vec<bool>,
    rotation_flips: Vec<bool>,
}

impl<'a> Propagation<'a> {
    fn new(circuit: &'a TimedCircuit) -> Self {
        Self {
            circuit,
            frame: Frame::new(circuit.num_qubits()),
            flips: vec![false; circuit.measurements().len()],
            rotation_flips: vec![false; circuit.rotations().len()],
        }
    }

    fn apply_effect(&mut self, effect: FaultEffect) {
        match effect {
            FaultEffect::Pauli1(q, p) => self.frame.apply_single(q, p),
            FaultEffect::Pauli2(a, pa, b, pb) => {
                self.frame.apply_single(a, pa);
                self.frame.apply_single(b, pb);
            }
            FaultEffect::MeasureFlip(e) => self.flips[e] ^= true,
        }
    }

    fn run_layer(&mut self, l: usize) {
        let circuit = self.circuit;
        for (r, rot) in circuit.rotations().iter().enumerate() {
            if rot.layer == l && self.frame.anticommutes(&rot.generator) {
                self.frame.xor_pauli(&rot.absorber);
                self.rotation_flips[r] ^= true;
            }
        }
        let f = &mut self.frame;
        for (gi, g) in circuit.layers()[l].gates.iter().enumerate() {
            match *g {
                GateKind::H(q) => {
                    let (x, z) = (get_bit(&f.x, q), get_bit(&f.z, q));
                    set_bit(&mut f.x, q, z);
                    set_bit(&mut f.z, q, x);
                }
                GateKind::Cnot { control, target } => {
                    if get_bit(&f.x, control) {
                        flip_bit(&mut f.x, target);
                    }
                    if get_bit(&f.z, target) {
                        flip_bit(&mut f.z, control);
                    }
                }
                GateKind::InitZ(q) | GateKind::InitX(q) => {
                    set_bit(&mut f.x, q, false);
                    set_bit(&mut f.z, q, false);
                }
                GateKind::MeasureZ(q) => {
                    let e = circuit
                        .gate_event(l, gi)
                        .expect("measurement without event");
                    self.flips[e] ^= get_bit(&f.x, q);
                }
                GateKind::MeasureX(q) => {
                    let e = circuit
                        .gate_event(l, gi)
                        .expect("measurement without event");
                    self.flips[e] ^= get_bit(&f.z, q);
                }
                GateKind::Idle(_) | GateKind::RotZ(_) | GateKind::RotZZ(..) => {}
            }
        }
    }

    fn finish(self) -> ShotRecord {
        let n = self.circuit.num_qubits();
        ShotRecord {
            measurement_flips: self.flips,
            final_frame: PauliString::from_words(n, self.frame.x, self.frame.z),
            rotation_flips: self.rotation_flips,
        }
    }
}

/// Propagates the given faults through `circuit`.
///
/// `faults` lists `(site index, alternative)` pairs; order does not matter.
pub fn propagate(circuit: &TimedCircuit, faults: &[(usize, usize)]) -> ShotRecord {
    let mut sorted = faults.to_vec();
    sorted.sort_unstable();
    let sites = circuit.sites();
    let mut prop = Propagation::new(circuit);
    let mut next = 0;
    for l in 0..circuit.depth() {
        prop.run_layer(l);
        while next < sorted.len() && sites[sorted[next].0].layer == l {
            let (s, a) = sorted[next];
            prop.apply_effect(sites[s].alternative(a));
            next += 1;
        }
    }
    prop.finish()
}

/// Propagation of a single fault, starting after the layer in which it occurs.
fn propagate_single(circuit: &TimedCircuit, site: usize, alt: usize) -> ShotRecord {
    let s = circuit.sites()[site];
    let mut prop = Propagation::new(circuit);
    prop.apply_effect(s.alternative(alt));
    for l in s.layer + 1..circuit.depth() {
        prop.run_layer(l);
    }
    prop.finish()
}

/// One single-fault alternative and its record.
#[derive(Clone, Debug)]
pub struct SingleFault {
    pub site: usize,
    pub alternative: usize,
    /// Probability of this alternative divided by `p`.
    pub coefficient: Ratio<i64>,
    pub record: ShotRecord,
}

/// Every non-identity single fault in canonical order.
pub fn enumerate_single_faults(circuit: &TimedCircuit) -> Vec<SingleFault> {
    let mut out = Vec::new();
    for (si, site) in circuit.sites().iter().enumerate() {
        for a in 0..site.num_alternatives() {
            out.push(SingleFault {
                site: si,
                alternative: a,
                coefficient: site.coefficient(),
                record: propagate_single(circuit, si, a),
            });
        }
    }
    out
}

/// Appends the faults sampled for one shot to `out`.
pub fn sample_faults<R: Rng + ?Sized>(
    circuit: &TimedCircuit,
    p: f64,
    rng: &mut R,
    out: &mut Vec<(usize, usize)>,
) {
    let sites = circuit.sites();
    GeometricSampler::new(p, sites.len()).sample(rng, |s, rng| {
        out.push((s, rng.gen_range(0..sites[s].num_alternatives())));
    });
}

/// Samples faults independently at every site and propagates them.
pub fn simulate_shot<R: Rng + ?Sized>(circuit: &TimedCircuit, p: f64, rng: &mut R) -> ShotRecord {
    let mut faults = Vec::new();
    sample_faults(circuit, p, rng, &mut faults);
    propagate(circuit, &faults)
}

/// Visits each of `n` independent Bernoulli(`p`) trials that succeed, by geometric skipping.
#[derive(Clone, Copy, Debug)]
pub struct GeometricSampler {
    p: f64,
    inv_log_q: f64,
    n: usize,
}

impl GeometricSampler {
    pub fn new(p: f64, n: usize) -> Self {
        let inv_log_q = if p > 0.0 && p < 1.0 {
            1.0 / (-p).ln_1p()
        } else {
            0.0
        };
        Self { p, inv_log_q, n }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, mut visit: impl FnMut(usize, &mut R)) {
        if self.p <= 0.0 || self.n == 0 {
            return;
        }
        if self.p >= 1.0 {
            for i in 0..self.n {
                visit(i, rng);
            }
            return;
        }
        let mut i = 0usize;
        loop {
            let u = 1.0 - rng.gen::<f64>();
            let skip = (u.ln() * self.inv_log_q).floor();
            if skip >= (self.n - i) as f64 {
                return;
            }
            i += skip as usize;
            visit(i, rng);
            i += 1;
            if i >= self.n {
                return;
            }
        }
    }
}

/// Maps measurement records to detector and observable bits.
///
/// A detector is the parity of a set of measurement events; an observable fires when the final
/// frame anticommutes with the given Pauli.
#[derive(Clone, Debug)]
pub struct DetectorModel {
    pub detectors: Vec<Vec<usize>>,
    pub observables: Vec<PauliString>,
}

impl DetectorModel {
    pub fn num_outputs(&self) -> usize {
        self.detectors.len() + self.observables.len()
    }

    /// Detector bits followed by observable bits.
    pub fn outputs(&self, record: &ShotRecord) -> Vec<bool> {
        let mut out: Vec<bool> = self
            .detectors
            .iter()
            .map(|d| {
                d.iter()
                    .fold(false, |acc, &e| acc ^ record.measurement_flips[e])
            })
            .collect();
        out.extend(
            self.observables
                .iter()
                .map(|o| !record.final_frame.commutes_with(o)),
        );
        out
    }

    /// Indices of the outputs that fire.
    pub fn fired(&self, record: &ShotRecord) -> Vec<u32> {
        self.outputs(record)
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32)
            .collect()
    }
}

/// For every single-fault alternative, the sorted list of outputs it flips.
///
/// Because the frame is linear in the faults, the outputs of any fault set are the XOR of the
/// rows of its members.
#[derive(Clone, Debug)]
pub struct SparseFaultTable {
    num_detectors: usize,
    num_observables: usize,
    site_offsets: Vec<usize>,
    row_offsets: Vec<usize>,
    outputs: Vec<u32>,
    coefficients: Vec<Ratio<i64>>,
    rotation_flip_rows: Vec<bool>,
}

impl SparseFaultTable {
    pub fn build(circuit: &TimedCircuit, model: &DetectorModel) -> Self {
        let mut site_offsets = Vec::with_capacity(circuit.sites().len() + 1);
        let mut row_offsets = vec![0];
        let mut outputs = Vec::new();
        let mut coefficients = Vec::new();
        let mut rotation_flip_rows = Vec::new();
        let mut rows = 0;
        for (si, site) in circuit.sites().iter().enumerate() {
            site_offsets.push(rows);
            for a in 0..site.num_alternatives() {
                let record = propagate_single(circuit, si, a);
                outputs.extend(model.fired(&record));
                row_offsets.push(outputs.len());
                coefficients.push(site.coefficient());
                rotation_flip_rows.push(record.rotation_flips.iter().any(|&b| b));
                rows += 1;
            }
        }
        site_offsets.push(rows);
        Self {
            num_detectors: model.detectors.len(),
            num_observables: model.observables.len(),
            site_offsets,
            row_offsets,
            outputs,
            coefficients,
            rotation_flip_rows,
        }
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn num_outputs(&self) -> usize {
        self.num_detectors + self.num_observables
    }

    pub fn num_sites(&self) -> usize {
        self.site_offsets.len() - 1
    }

    pub fn num_rows(&self) -> usize {
        self.coefficients.len()
    }

    pub fn num_alternatives(&self, site: usize) -> usize {
        self.site_offsets[site + 1] - self.site_offsets[site]
    }

    pub fn row_index(&self, site: usize, alt: usize) -> usize {
        self.site_offsets[site] + alt
    }

    /// Rows of `site`.
    pub fn site_rows(&self, site: usize) -> std::ops::Range<usize> {
        self.site_offsets[site]..self.site_offsets[site + 1]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.outputs[self.row_offsets[row]..self.row_offsets[row + 1]]
    }

    pub fn coefficient(&self, row: usize) -> Ratio<i64> {
        self.coefficients[row]
    }

    /// Whether the fault in `row` triggers at least one rotation absorber.
    pub fn flips_rotation(&self, row: usize) -> bool {
        self.rotation_flip_rows[row]
    }

    /// Samples one shot and writes the fired outputs (sorted) into `scratch`.
    pub fn sample<R: Rng + ?Sized>(&self, p: f64, rng: &mut R, scratch: &mut ShotScratch) {
        scratch.clear(self.num_outputs());
        let sampler = GeometricSampler::new(p, self.num_sites());
        sampler.sample(rng, |s, rng| {
            let alts = self.num_alternatives(s);
            let a = if alts == 1 { 0 } else { rng.gen_range(0..alts) };
            scratch.faults += 1;
            for &o in self.row(self.site_offsets[s] + a) {
                scratch.toggle(o);
            }
        });
        scratch.collect();
    }

    /// Outputs flipped by the given `(site, alternative)` set.
    pub fn combine(&self, faults: &[(usize, usize)], scratch: &mut ShotScratch) {
        scratch.clear(self.num_outputs());
        for &(s, a) in faults {
            scratch.faults += 1;
            for &o in self.row(self.row_index(s, a)) {
                scratch.toggle(o);
            }
        }
        scratch.collect();
    }
}

/// Reusable per-thread buffers for table sampling.
#[derive(Clone, Debug, Default)]
pub struct ShotScratch {
    words: Vec<u64>,
    touched: Vec<u32>,
    fired: Vec<u32>,
    faults: usize,
}

impl ShotScratch {
    fn clear(&mut self, n: usize) {
        let w = words_for(n);
        if self.words.len() != w {
            self.words = vec![0; w];
        }
        self.touched.clear();
        self.fired.clear();
        self.faults = 0;
    }

    fn toggle(&mut self, o: u32) {
        let w = (o >> 6) as usize;
        if self.words[w] == 0 {
            self.touched.push(w as u32);
        }
        self.words[w] ^= 1u64 << (o & 63);
    }

    fn collect(&mut self) {
        self.touched.sort_unstable();
        self.touched.dedup();
        for &w in &self.touched {
            let mut bits = self.words[w as usize];
            while bits != 0 {
                let b = bits.trailing_zeros();
                self.fired.push(w * 64 + b);
                bits &= bits - 1;
            }
            self.words[w as usize] = 0;
        }
    }

    /// Sorted indices of the outputs that fired in the last shot.
    pub fn fired(&self) -> &[u32] {
        &self.fired
    }

    /// Number of faults that occurred in the last shot.
    pub fn num_faults(&self) -> usize {
        self.faults
    }
}
