//! Detector-graph construction and minimum-weight perfect matching decoding.

mod blossom;
mod graph;

use std::collections::BTreeMap;

use serde::Serialize;

pub use blossom::max_weight_matching;
pub use graph::{GraphEdge, MatchingGraph};

use graph::EdgeAcc;

use crate::circuit::Basis;
use crate::error::{Result, StarError};
use crate::frame::{ShotScratch, SparseFaultTable};
use crate::montecarlo::{run_shots, Tally};
use crate::surface_code::{MemoryExperiment, OBS_X_ERROR, OBS_Z_ERROR};

/// Fixed-point scale applied to path weights before integer matching.
const WEIGHT_SCALE: f64 = 1.0e6;

/// The two decoding graphs of a memory experiment.
///
/// The X graph holds X-plaquette detectors and tracks the logical Z-error flag; the Z graph
/// holds Z-plaquette detectors and tracks the logical X-error flag.
#[derive(Clone, Debug)]
pub struct DetectorGraph {
    pub x_graph: MatchingGraph,
    pub z_graph: MatchingGraph,
    /// `(basis, index within that graph)` for every detector.
    local: Vec<(Basis, usize)>,
    x_detectors: Vec<usize>,
    z_detectors: Vec<usize>,
}

/// Matching of one defect set.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MatchingResult {
    /// Matched detector pairs; `None` marks a match to the boundary.
    pub pairs: Vec<(usize, Option<usize>)>,
    pub total_weight: f64,
    /// Predicted flips of the observables, indexed like the experiment's observables.
    pub logical_correction: [bool; 2],
}

impl DetectorGraph {
    /// Enumerates single faults of `experiment` and merges them into weighted edges at noise
    /// strength `p`.
    pub fn build(experiment: &MemoryExperiment, p: f64) -> Result<Self> {
        let table = SparseFaultTable::build(&experiment.circuit, &experiment.model);
        Self::from_table(experiment, &table, p)
    }

    pub fn from_table(
        experiment: &MemoryExperiment,
        table: &SparseFaultTable,
        p: f64,
    ) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(StarError::Config(format!(
                "edge weights need 0 < p < 1, got {p}"
            )));
        }
        let nd = table.num_detectors();
        let mut local = Vec::with_capacity(nd);
        let (mut x_detectors, mut z_detectors) = (Vec::new(), Vec::new());
        for (i, &b) in experiment.detector_basis.iter().enumerate() {
            match b {
                Basis::X => {
                    local.push((Basis::X, x_detectors.len()));
                    x_detectors.push(i);
                }
                Basis::Z => {
                    local.push((Basis::Z, z_detectors.len()));
                    z_detectors.push(i);
                }
            }
        }
        let sizes = [x_detectors.len(), z_detectors.len()];
        let obs_of = [nd + OBS_Z_ERROR, nd + OBS_X_ERROR];

        let mut merged: [BTreeMap<(usize, usize), EdgeAcc>; 2] = [BTreeMap::new(), BTreeMap::new()];
        for site in 0..table.num_sites() {
            let mut per_site: BTreeMap<(usize, usize, usize, bool), f64> = BTreeMap::new();
            for row in table.site_rows(site) {
                let outputs = table.row(row);
                let weight = p * *table.coefficient(row).numer() as f64
                    / *table.coefficient(row).denom() as f64;
                for g in 0..2 {
                    let basis = if g == 0 { Basis::X } else { Basis::Z };
                    let dets: Vec<usize> = outputs
                        .iter()
                        .filter(|&&o| (o as usize) < nd && local[o as usize].0 == basis)
                        .map(|&o| local[o as usize].1)
                        .collect();
                    let logical = outputs.contains(&(obs_of[g] as u32));
                    let key = match dets.as_slice() {
                        [] if logical => {
                            return Err(StarError::ScheduleInvalid(format!(
                                "fault at site {site} flips a logical without firing a detector"
                            )))
                        }
                        [] => continue,
                        [a] => (*a, sizes[g]),
                        [a, b] => (*a.min(b), *a.max(b)),
                        _ => {
                            return Err(StarError::ScheduleInvalid(format!(
                                "fault at site {site} fires {} detectors of one basis",
                                dets.len()
                            )))
                        }
                    };
                    *per_site.entry((g, key.0, key.1, logical)).or_insert(0.0) += weight;
                }
            }
            for ((g, a, b, logical), q2) in per_site {
                match merged[g].get_mut(&(a, b)) {
                    Some(acc) => {
                        if acc.logical != logical {
                            return Err(StarError::ScheduleInvalid(format!(
                                "faults with identical detectors ({a}, {b}) disagree on the logical flag"
                            )));
                        }
                        let q1 = acc.probability;
                        acc.probability = q1 * (1.0 - q2) + q2 * (1.0 - q1);
                    }
                    None => {
                        merged[g].insert(
                            (a, b),
                            EdgeAcc {
                                probability: q2,
                                logical,
                            },
                        );
                    }
                }
            }
        }
        let [mx, mz] = merged;
        Ok(Self {
            x_graph: MatchingGraph::from_merged(sizes[0], mx)?,
            z_graph: MatchingGraph::from_merged(sizes[1], mz)?,
            local,
            x_detectors,
            z_detectors,
        })
    }

    pub fn num_detectors(&self) -> usize {
        self.local.len()
    }

    /// Decodes a set of fired detectors (global indices).
    pub fn decode(&self, defects: &[usize]) -> MatchingResult {
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for &d in defects {
            match self.local[d] {
                (Basis::X, i) => xs.push(i),
                (Basis::Z, i) => zs.push(i),
            }
        }
        let mut result = MatchingResult::default();
        let (px, wx, cx) = match_defects(&self.x_graph, &xs);
        let (pz, wz, cz) = match_defects(&self.z_graph, &zs);
        let gx = |i: usize| self.x_detectors[i];
        let gz = |i: usize| self.z_detectors[i];
        result
            .pairs
            .extend(px.into_iter().map(|(a, b)| (gx(a), b.map(gx))));
        result
            .pairs
            .extend(pz.into_iter().map(|(a, b)| (gz(a), b.map(gz))));
        result.total_weight = wx + wz;
        result.logical_correction[OBS_Z_ERROR] = cx;
        result.logical_correction[OBS_X_ERROR] = cz;
        result
    }
}

type LocalMatching = (Vec<(usize, Option<usize>)>, f64, bool);

/// Minimum-weight perfect matching of `defects` (local indices) in `graph`, allowing any
/// defect to pair with the boundary.
pub fn match_defects(graph: &MatchingGraph, defects: &[usize]) -> LocalMatching {
    let n = defects.len();
    match n {
        0 => return (Vec::new(), 0.0, false),
        1 => {
            let a = defects[0];
            return (
                vec![(a, None)],
                graph.boundary_distance(a),
                graph.boundary_parity(a),
            );
        }
        2 => {
            let (a, b) = (defects[0], defects[1]);
            let pair = graph.distance(a, b);
            let split = graph.boundary_distance(a) + graph.boundary_distance(b);
            return if pair <= split {
                (vec![(a, Some(b))], pair, graph.path_parity(a, b))
            } else {
                (
                    vec![(a, None), (b, None)],
                    split,
                    graph.boundary_parity(a) ^ graph.boundary_parity(b),
                )
            };
        }
        _ => {}
    }

    let scaled = |w: f64| (w * WEIGHT_SCALE).round() as i64;
    let mut max_w = 0i64;
    let mut raw = Vec::with_capacity(n * n + n);
    for i in 0..n {
        for j in i + 1..n {
            let d = graph.distance(defects[i], defects[j]);
            if d.is_finite() {
                let s = scaled(d);
                max_w = max_w.max(s);
                raw.push((i, j, s));
            }
        }
        let b = graph.boundary_distance(defects[i]);
        if b.is_finite() {
            let s = scaled(b);
            max_w = max_w.max(s);
            raw.push((i, n + i, s));
        }
        for j in i + 1..n {
            raw.push((n + i, n + j, 0));
        }
    }
    let big = max_w + 1;
    let edges: Vec<(usize, usize, i64)> =
        raw.into_iter().map(|(a, b, w)| (a, b, big - w)).collect();
    let mate = max_weight_matching(2 * n, &edges, true);

    let mut pairs = Vec::with_capacity(n);
    let mut total = 0.0;
    let mut parity = false;
    for i in 0..n {
        match mate[i] {
            Some(j) if j < n => {
                if i < j {
                    let (a, b) = (defects[i], defects[j]);
                    pairs.push((a, Some(b)));
                    total += graph.distance(a, b);
                    parity ^= graph.path_parity(a, b);
                }
            }
            Some(_) => {
                let a = defects[i];
                pairs.push((a, None));
                total += graph.boundary_distance(a);
                parity ^= graph.boundary_parity(a);
            }
            None => panic!("defect {i} left unmatched; graph is disconnected from the boundary"),
        }
    }
    (pairs, total, parity)
}

/// Logical failure counts of a memory run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MemoryCounts {
    pub shots: u64,
    pub failures_z: u64,
    pub failures_x: u64,
}

impl Tally for MemoryCounts {
    fn merge(&mut self, other: Self) {
        self.shots += other.shots;
        self.failures_z += other.failures_z;
        self.failures_x += other.failures_x;
    }
}

/// Logical error rates with binomial standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogicalErrorRates {
    pub d: usize,
    pub p: f64,
    pub shots: u64,
    pub failures_z: u64,
    pub failures_x: u64,
    pub p_lz: f64,
    pub sigma_z: f64,
    pub p_lx: f64,
    pub sigma_x: f64,
}

/// Binomial rate and its standard error.
pub fn binomial_rate(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let r = k as f64 / n as f64;
    (r, (r * (1.0 - r) / n as f64).sqrt())
}

impl LogicalErrorRates {
    pub fn from_counts(d: usize, p: f64, c: MemoryCounts) -> Self {
        let (p_lz, sigma_z) = binomial_rate(c.failures_z, c.shots);
        let (p_lx, sigma_x) = binomial_rate(c.failures_x, c.shots);
        Self {
            d,
            p,
            shots: c.shots,
            failures_z: c.failures_z,
            failures_x: c.failures_x,
            p_lz,
            sigma_z,
            p_lx,
            sigma_x,
        }
    }
}

/// A memory experiment with its fault table and decoder, ready for sampling.
#[derive(Clone, Debug)]
pub struct MemoryDecoder {
    pub experiment: MemoryExperiment,
    pub table: SparseFaultTable,
    pub graph: DetectorGraph,
}

impl MemoryDecoder {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        let experiment = MemoryExperiment::new(d)?;
        let table = SparseFaultTable::build(&experiment.circuit, &experiment.model);
        // The graph topology does not depend on p; a zero-noise run still needs weights.
        let wp = if p > 0.0 { p } else { 1.0e-3 };
        let graph = DetectorGraph::from_table(&experiment, &table, wp)?;
        Ok(Self {
            experiment,
            table,
            graph,
        })
    }

    /// Decodes one sampled output set; returns `(logical Z failure, logical X failure)`.
    pub fn judge(&self, fired: &[u32], defects: &mut Vec<usize>) -> (bool, bool) {
        let nd = self.table.num_detectors() as u32;
        defects.clear();
        let mut obs = [false; 2];
        for &o in fired {
            if o < nd {
                defects.push(o as usize);
            } else {
                obs[(o - nd) as usize] = true;
            }
        }
        let m = self.graph.decode(defects);
        (
            obs[OBS_Z_ERROR] ^ m.logical_correction[OBS_Z_ERROR],
            obs[OBS_X_ERROR] ^ m.logical_correction[OBS_X_ERROR],
        )
    }

    pub fn run(&self, p: f64, shots: u64, seed: u64, threads: Option<usize>) -> MemoryCounts {
        if p <= 0.0 {
            return MemoryCounts {
                shots,
                ..Default::default()
            };
        }
        run_shots(
            shots,
            seed,
            threads,
            || (ShotScratch::default(), Vec::new()),
            |(scratch, defects), rng| {
                self.table.sample(p, rng, scratch);
                let (fz, fx) = self.judge(scratch.fired(), defects);
                MemoryCounts {
                    shots: 1,
                    failures_z: fz as u64,
                    failures_x: fx as u64,
                }
            },
        )
    }
}

/// Monte-Carlo logical error rates of the distance-`d` memory experiment at noise `p`.
pub fn estimate_logical_error_rate(
    d: usize,
    p: f64,
    shots: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<LogicalErrorRates> {
    if shots == 0 {
        return Err(StarError::Config("shots must be at least 1".into()));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(StarError::Config(format!(
            "p must lie in [0, 0.5], got {p}"
        )));
    }
    let dec = MemoryDecoder::new(d, p)?;
    Ok(LogicalErrorRates::from_counts(
        d,
        p,
        dec.run(p, shots, seed, threads),
    ))
}
