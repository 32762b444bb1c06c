//! Closed-form resource estimates: scaling-law fits, Clifford and rotation budgets, quantum
//! volume, comparison with distillation-based architectures and application sizing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, StarError};
use crate::rotation::sampling_overhead;

/// Fitted parameters of `P_L = C (p / p_th)^((d+1)/2)` for one error type.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub c: f64,
    pub sigma_c: f64,
    pub p_th: f64,
    pub sigma_p_th: f64,
}

impl ScalingParams {
    pub fn logical_error(&self, d: usize, p: f64) -> f64 {
        self.c * (p / self.p_th).powf((d as f64 + 1.0) / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub z: ScalingParams,
    pub x: ScalingParams,
}

impl FitResult {
    /// Reference fit of the rotated surface code under circuit-level depolarizing noise.
    pub fn reference() -> Self {
        Self {
            z: ScalingParams {
                c: 0.0679,
                sigma_c: 0.0076,
                p_th: 0.00385,
                sigma_p_th: 0.00010,
            },
            x: ScalingParams {
                c: 0.0819,
                sigma_c: 0.0097,
                p_th: 0.00416,
                sigma_p_th: 0.00012,
            },
        }
    }
}

/// One measured point of a scaling campaign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub d: usize,
    pub p: f64,
    pub p_l: f64,
    pub sigma: f64,
}

/// Weighted least squares of `ln P - k ln p = ln C - k ln p_th` with `k = (d+1)/2`.
///
/// Points with `P_L = 0` carry no logarithm and are skipped. Weights are `(P/σ)^2`, the inverse
/// variance of `ln P`; if any point has `σ = 0` all points are weighted equally. Uncertainties
/// are taken from the inverse normal matrix.
pub fn fit_single(points: &[ScalingPoint]) -> Result<ScalingParams> {
    let usable: Vec<&ScalingPoint> = points
        .iter()
        .filter(|pt| pt.p_l > 0.0 && pt.p > 0.0)
        .collect();
    let mut ds: Vec<usize> = usable.iter().map(|pt| pt.d).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 2 {
        return Err(StarError::DegenerateFit(
            "at least two distinct code distances with nonzero error rates are required".into(),
        ));
    }
    let uniform = usable.iter().any(|pt| pt.sigma <= 0.0);
    let (mut s0, mut s1, mut s2, mut sy, mut sky) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for pt in &usable {
        let k = (pt.d as f64 + 1.0) / 2.0;
        let w = if uniform {
            1.0
        } else {
            (pt.p_l / pt.sigma).powi(2)
        };
        let y = pt.p_l.ln() - k * pt.p.ln();
        s0 += w;
        s1 += w * k;
        s2 += w * k * k;
        sy += w * y;
        sky += w * k * y;
    }
    // Normal equations for (a, b) with model y = a - k b.
    let det = s0 * s2 - s1 * s1;
    if det.abs() <= 1e-12 * s0 * s2 {
        return Err(StarError::DegenerateFit("design matrix is singular".into()));
    }
    let a = (s2 * sy - s1 * sky) / det;
    let b = (s1 * sy - s0 * sky) / det;
    let var_a = s2 / det;
    let var_b = s0 / det;
    let c = a.exp();
    let p_th = b.exp();
    Ok(ScalingParams {
        c,
        sigma_c: c * var_a.sqrt(),
        p_th,
        sigma_p_th: p_th * var_b.sqrt(),
    })
}

/// Fits both error types.
pub fn fit_scaling(z: &[ScalingPoint], x: &[ScalingPoint]) -> Result<FitResult> {
    Ok(FitResult {
        z: fit_single(z)?,
        x: fit_single(x)?,
    })
}

/// Device size and physical error rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub n_phys: u64,
    pub p: f64,
}

impl DeviceSpec {
    /// Surface-code patches of distance `d` (about `2d^2` physical qubits each).
    pub fn patches(&self, d: usize) -> u64 {
        self.n_phys / (2 * (d * d) as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CliffordBudget {
    pub p_round: f64,
    pub n_clifford: f64,
}

/// Logical error per round (both types) and the number of Clifford operations it allows.
/// `divisor` accounts for operations lasting several rounds and defaults to 1.
pub fn clifford_budget(fit: &FitResult, d: usize, p: f64, divisor: f64) -> CliffordBudget {
    let p_round = fit.z.logical_error(d, p) + fit.x.logical_error(d, p);
    CliffordBudget {
        p_round,
        n_clifford: 1.0 / p_round / divisor,
    }
}

/// Logical-data-qubit layouts, with their patch counts as a function of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutScheme {
    SchemeI4n,
    SchemeI3n,
    SchemeI2n,
    Compact,
    Intermediate,
}

impl LayoutScheme {
    pub const ALL: [LayoutScheme; 5] = [
        LayoutScheme::SchemeI4n,
        LayoutScheme::SchemeI3n,
        LayoutScheme::SchemeI2n,
        LayoutScheme::Compact,
        LayoutScheme::Intermediate,
    ];

    /// Patches needed for `n` logical data qubits.
    pub fn patches(self, n: u64) -> f64 {
        let n = n as f64;
        match self {
            LayoutScheme::SchemeI4n => 4.0 * n,
            LayoutScheme::SchemeI3n => 3.0 * n,
            LayoutScheme::SchemeI2n => 2.0 * n,
            LayoutScheme::Compact => 1.5 * n + 5.0,
            LayoutScheme::Intermediate => 2.0 * n + 6.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LayoutScheme::SchemeI4n => "4n",
            LayoutScheme::SchemeI3n => "3n",
            LayoutScheme::SchemeI2n => "2n",
            LayoutScheme::Compact => "compact",
            LayoutScheme::Intermediate => "intermediate",
        }
    }
}

impl fmt::Display for LayoutScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LayoutScheme {
    type Err = StarError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4n" => Ok(LayoutScheme::SchemeI4n),
            "3n" => Ok(LayoutScheme::SchemeI3n),
            "2n" => Ok(LayoutScheme::SchemeI2n),
            "compact" | "1.5n+5" => Ok(LayoutScheme::Compact),
            "intermediate" | "2n+6" => Ok(LayoutScheme::Intermediate),
            other => Err(StarError::Config(format!(
                "unknown scheme {other:?}; expected 4n, 3n, 2n, compact or intermediate"
            ))),
        }
    }
}

/// Largest `n` whose layout fits in `patches`.
pub fn max_n_for(patches: u64, cost: impl Fn(u64) -> f64) -> u64 {
    let mut n = 0;
    while cost(n + 1) <= patches as f64 {
        n += 1;
    }
    if cost(n) <= patches as f64 {
        n
    } else {
        0
    }
}

pub fn max_logical_qubits(spec: &DeviceSpec, d: usize, scheme: LayoutScheme) -> u64 {
    max_n_for(spec.patches(d), |n| scheme.patches(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RotationBudget {
    /// Logical phase-flip probability of one injected ancilla state, `c_Z p`.
    pub p_rotation: f64,
    /// `None` when the rotation error vanishes.
    pub n_rotation: Option<u64>,
    pub pec_overhead: Option<f64>,
}

/// Floor that tolerates representation error just below an integer.
fn floor_tol(x: f64) -> u64 {
    (x * (1.0 + 1e-12)).floor() as u64
}

pub fn rotation_budget(p: f64, c_z: f64) -> Result<RotationBudget> {
    let p_rotation = c_z * p;
    if p_rotation <= 0.0 {
        return Ok(RotationBudget {
            p_rotation: 0.0,
            n_rotation: None,
            pec_overhead: None,
        });
    }
    let n = floor_tol(1.0 / (2.0 * p_rotation));
    let (overhead, _) = sampling_overhead(p_rotation, n)?;
    Ok(RotationBudget {
        p_rotation,
        n_rotation: Some(n),
        pec_overhead: Some(overhead),
    })
}

/// Rounds to `digits` significant figures.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// Error of one complete analog rotation: twice the per-attempt rate, the latter quoted to two
/// significant figures.
pub fn rotation_error(c_z: f64, p: f64) -> f64 {
    2.0 * round_sig(c_z * p, 2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuantumVolume {
    /// Largest square circuit on a noisy square-grid device; `None` if unbounded.
    pub m_nisq: Option<u64>,
    /// Largest square circuit with analog SU(4) layers; `None` if unbounded.
    pub m_star: Option<u64>,
    pub log2_vq_star: Option<u64>,
    pub log2_vq_nisq: Option<u64>,
}

/// Largest `m >= 1` with `f(m) < 1`, or `None` if `f` never reaches 1 below `cap`.
fn max_m(f: impl Fn(f64) -> f64, cap: u64) -> Option<u64> {
    let mut m = 0;
    while m < cap {
        if f((m + 1) as f64) >= 1.0 {
            return Some(m);
        }
        m += 1;
    }
    None
}

const QV_CAP: u64 = 100_000_000;

/// Quantum volume of a NISQ device and of the analog-rotation architecture.
///
/// One SU(4) block is 15 rotations and a square circuit of size `m` has `m/2` blocks per layer.
pub fn quantum_volume(p: f64, epsilon: f64, n_logical: u64) -> QuantumVolume {
    let m_nisq = if p > 0.0 {
        max_m(|m| m * m * (1.29 * m.sqrt() - 0.78) * p, QV_CAP)
    } else {
        None
    };
    let m_star = if epsilon > 0.0 {
        max_m(|m| m * m * 7.5 * epsilon, QV_CAP)
    } else {
        None
    };
    QuantumVolume {
        m_nisq,
        m_star,
        log2_vq_star: Some(m_star.map_or(n_logical, |m| m.min(n_logical))),
        log2_vq_nisq: m_nisq,
    }
}

/// Lattice-surgery blocks of a distillation-based architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FtqcBlock {
    Fast,
    Intermediate,
    Compact,
}

impl FtqcBlock {
    pub const ALL: [FtqcBlock; 3] = [FtqcBlock::Fast, FtqcBlock::Intermediate, FtqcBlock::Compact];

    /// Clocks to consume one magic state.
    pub fn clocks_per_t(self) -> u64 {
        match self {
            FtqcBlock::Fast => 1,
            FtqcBlock::Intermediate => 5,
            FtqcBlock::Compact => 9,
        }
    }

    pub fn patches(self, n: u64) -> f64 {
        let n = n as f64;
        match self {
            FtqcBlock::Fast => 2.0 * n + (8.0 * n).sqrt() + 1.0,
            FtqcBlock::Intermediate => 2.0 * n + 4.0,
            FtqcBlock::Compact => 1.5 * n + 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FtqcBlock::Fast => "FTQC (Fast)",
            FtqcBlock::Intermediate => "FTQC (Intermediate)",
            FtqcBlock::Compact => "FTQC (Compact)",
        }
    }
}

/// Patches and clocks of one 15-to-1 distillation factory.
pub const FACTORY_PATCHES: u64 = 11;
pub const FACTORY_CLOCKS: u64 = 11;
/// Clocks for one analog rotation: two attempts on average, nine clocks each.
pub const STAR_CLOCKS_PER_ROTATION: u64 = 18;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub architecture: String,
    pub logical_qubits: u64,
    pub clocks_per_non_clifford: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FtqcComparison {
    /// Error of one analog rotation, also the synthesis target.
    pub epsilon: f64,
    pub injected_magic_error: f64,
    pub distilled_magic_error: f64,
    pub t_count: u64,
    pub rows: Vec<ComparisonRow>,
}

/// T gates needed to synthesise a rotation to accuracy `delta`.
pub fn t_count(delta: f64) -> u64 {
    (3.0 * (1.0 / delta).log2() - 1e-9).ceil() as u64
}

pub fn ftqc_comparison(spec: &DeviceSpec, d: usize, epsilon: f64) -> FtqcComparison {
    let injected = 46.0 * spec.p / 15.0;
    let distilled = 35.0 * injected.powi(3);
    let n_t = t_count(epsilon);
    let patches = spec.patches(d);
    let mut rows = vec![ComparisonRow {
        architecture: "STAR (Compact)".into(),
        logical_qubits: max_logical_qubits(spec, d, LayoutScheme::Compact),
        clocks_per_non_clifford: STAR_CLOCKS_PER_ROTATION,
    }];
    for block in FtqcBlock::ALL {
        let factories = FACTORY_CLOCKS.div_ceil(block.clocks_per_t());
        let remaining = patches.saturating_sub(factories * FACTORY_PATCHES);
        rows.push(ComparisonRow {
            architecture: block.name().into(),
            logical_qubits: max_n_for(remaining, |n| block.patches(n)),
            clocks_per_non_clifford: n_t * block.clocks_per_t(),
        });
    }
    FtqcComparison {
        epsilon,
        injected_magic_error: injected,
        distilled_magic_error: distilled,
        t_count: n_t,
        rows,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HubbardSizing {
    pub sites: u64,
    pub rotations_per_step: u64,
    pub trotter_steps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QaoaSizing {
    pub nodes: u64,
    pub depth: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ApplicationSizing {
    pub hubbard: HubbardSizing,
    pub qaoa: QaoaSizing,
}

/// Rotations in one Trotter step of a 1D Hubbard chain with `sites` sites.
pub fn hubbard_rotations_per_step(sites: u64) -> u64 {
    (5 * sites).saturating_sub(2)
}

/// Rotations in one QAOA layer on a complete graph.
pub fn qaoa_rotations_per_layer(nodes: u64) -> u64 {
    nodes + nodes * nodes.saturating_sub(1) / 2
}

/// Largest problem sizes that fit in `n_logical` qubits and `n_rotation` rotations.
pub fn application_sizing(n_logical: u64, n_rotation: u64) -> ApplicationSizing {
    let sites = n_logical / 2;
    let per_step = hubbard_rotations_per_step(sites);
    let per_layer = qaoa_rotations_per_layer(n_logical);
    ApplicationSizing {
        hubbard: HubbardSizing {
            sites,
            rotations_per_step: per_step,
            trotter_steps: n_rotation.checked_div(per_step).unwrap_or(0),
        },
        qaoa: QaoaSizing {
            nodes: n_logical,
            depth: n_rotation.checked_div(per_layer).unwrap_or(0),
        },
    }
}

/// Injections attempted in parallel during one RUS step of a distance-`d` patch.
pub fn injection_repeats(d: usize) -> u32 {
    (2 * d / 4) as u32
}

/// Probability that every one of `repeats` independent injections fails.
pub fn effective_injection_failure(f_single: f64, repeats: u32) -> f64 {
    f_single.powi(repeats as i32)
}

/// Every estimate for one device, distance and layout.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub device: DeviceSpec,
    pub d: usize,
    pub scheme: LayoutScheme,
    pub c_z: f64,
    pub n_logical: u64,
    pub p_round: f64,
    pub n_clifford: f64,
    pub p_rotation: f64,
    pub n_rotation: Option<u64>,
    pub pec_overhead: Option<f64>,
    pub epsilon: f64,
    pub qv: QuantumVolume,
    pub ftqc: FtqcComparison,
    pub applications: Option<ApplicationSizing>,
}

/// Assembles a [`ResourceReport`].
pub fn resource_report(
    spec: &DeviceSpec,
    d: usize,
    scheme: LayoutScheme,
    fit: &FitResult,
    c_z: f64,
    clifford_divisor: f64,
) -> Result<ResourceReport> {
    if spec.p < 0.0 || spec.p >= 0.5 {
        return Err(StarError::Config(format!(
            "p must lie in [0, 0.5), got {}",
            spec.p
        )));
    }
    if d < 3 || d % 2 == 0 {
        return Err(StarError::Config(format!(
            "code distance must be odd and at least 3, got {d}"
        )));
    }
    if clifford_divisor <= 0.0 {
        return Err(StarError::Config(
            "Clifford divisor must be positive".into(),
        ));
    }
    let n_logical = max_logical_qubits(spec, d, scheme);
    let cb = clifford_budget(fit, d, spec.p, clifford_divisor);
    let rb = rotation_budget(spec.p, c_z)?;
    let epsilon = rotation_error(c_z, spec.p);
    let qv = quantum_volume(spec.p, epsilon, n_logical);
    let ftqc = ftqc_comparison(spec, d, epsilon);
    let applications = rb.n_rotation.map(|n| application_sizing(n_logical, n));
    Ok(ResourceReport {
        device: *spec,
        d,
        scheme,
        c_z,
        n_logical,
        p_round: cb.p_round,
        n_clifford: cb.n_clifford,
        p_rotation: rb.p_rotation,
        n_rotation: rb.n_rotation,
        pec_overhead: rb.pec_overhead,
        epsilon,
        qv,
        ftqc,
        applications,
    })
}
