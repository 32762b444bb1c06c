use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use star_core::decoder::{LogicalErrorRates, MemoryDecoder};
use star_core::estimator::{
    application_sizing, fit_scaling, ftqc_comparison, max_logical_qubits, resource_report,
    rotation_budget, rotation_error, DeviceSpec, FitResult, LayoutScheme, ResourceReport,
    ScalingPoint,
};
use star_core::injection::{InjectionExperiment, VariantKind};
use star_core::rotation::{rus_error_exact, rus_statistics, RusModel};
use star_core::surface_code::RotatedSurfaceLayout;
use star_core::{Result, StarError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryRow {
    pub d: usize,
    pub p: f64,
    pub shots: u64,
    #[serde(rename = "failures_Z")]
    pub failures_z: u64,
    #[serde(rename = "failures_X")]
    pub failures_x: u64,
    #[serde(rename = "P_LZ")]
    pub p_lz: f64,
    #[serde(rename = "sigma_Z")]
    pub sigma_z: f64,
    #[serde(rename = "P_LX")]
    pub p_lx: f64,
    #[serde(rename = "sigma_X")]
    pub sigma_x: f64,
}

impl From<LogicalErrorRates> for MemoryRow {
    fn from(r: LogicalErrorRates) -> Self {
        Self {
            d: r.d,
            p: r.p,
            shots: r.shots,
            failures_z: r.failures_z,
            failures_x: r.failures_x,
            p_lz: r.p_lz,
            sigma_z: r.sigma_z,
            p_lx: r.p_lx,
            sigma_x: r.sigma_x,
        }
    }
}

/// Seed of grid point `i`; distinct points draw from unrelated streams.
pub fn point_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(StarError::Config("--shots must be at least 1".into()));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&p) {
        return Err(StarError::Config(format!(
            "p must lie in [0, 0.5], got {p}"
        )));
    }
    Ok(())
}

pub fn memory(
    ds: &[usize],
    ps: &[f64],
    shots: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<MemoryRow>> {
    check_shots(shots)?;
    ps.iter().try_for_each(|&p| check_p(p))?;
    let mut rows = Vec::with_capacity(ds.len() * ps.len());
    let mut i = 0;
    for &d in ds {
        for &p in ps {
            // Edge weights follow the simulated noise strength.
            let dec = MemoryDecoder::new(d, p)?;
            let counts = dec.run(p, shots, point_seed(seed, i), threads);
            rows.push(LogicalErrorRates::from_counts(d, p, counts).into());
            i += 1;
        }
    }
    Ok(rows)
}

fn ratio_string(r: Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub variant: String,
    pub d: usize,
    #[serde(rename = "c_Z")]
    pub c_z: String,
    #[serde(rename = "c_X")]
    pub c_x: String,
    pub reject_stage1: String,
    pub reject_stage2: String,
    #[serde(rename = "c_Z_float")]
    pub c_z_float: f64,
}

pub fn inject_oracle(ds: &[usize], variants: &[VariantKind]) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for &d in ds {
        for &v in variants {
            let c = InjectionExperiment::new(d, v)?.leading_coefficients();
            rows.push(OracleRow {
                variant: v.name().into(),
                d,
                c_z: ratio_string(c.c_z),
                c_x: ratio_string(c.c_x),
                reject_stage1: ratio_string(c.reject_stage1),
                reject_stage2: ratio_string(c.reject_stage2),
                c_z_float: ratio_f64(c.c_z),
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectRow {
    pub variant: String,
    pub d: usize,
    pub p: f64,
    pub shots: u64,
    pub accepted: u64,
    pub rejected_stage1: u64,
    pub rejected_stage2: u64,
    pub acceptance_rate: f64,
    pub sigma_acceptance: f64,
    pub failure_rate: f64,
    #[serde(rename = "failures_Z")]
    pub failures_z: u64,
    #[serde(rename = "P_Z")]
    pub p_z: f64,
    #[serde(rename = "sigma_Z")]
    pub sigma_z: f64,
    /// Leading-order prediction `c_Z p` from the exact oracle.
    #[serde(rename = "c_Z_p")]
    pub c_z_p: f64,
}

pub fn inject(
    ds: &[usize],
    ps: &[f64],
    variants: &[VariantKind],
    shots: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<InjectRow>> {
    check_shots(shots)?;
    ps.iter().try_for_each(|&p| check_p(p))?;
    let mut rows = Vec::new();
    let mut i = 0;
    for &v in variants {
        for &d in ds {
            let exp = InjectionExperiment::new(d, v)?;
            let c_z = ratio_f64(exp.leading_coefficients().c_z);
            for &p in ps {
                let counts = exp.run(p, shots, point_seed(seed, i), threads);
                let s = exp.stats(p, counts);
                rows.push(InjectRow {
                    variant: v.name().into(),
                    d,
                    p,
                    shots: counts.shots,
                    accepted: counts.accepted,
                    rejected_stage1: counts.rejected_stage1,
                    rejected_stage2: counts.rejected_stage2,
                    acceptance_rate: s.acceptance_rate,
                    sigma_acceptance: s.sigma_acceptance,
                    failure_rate: s.failure_rate(),
                    failures_z: counts.logical_z_errors,
                    p_z: s.p_z,
                    sigma_z: s.sigma_z,
                    c_z_p: c_z * p,
                });
                i += 1;
            }
        }
    }
    Ok(rows)
}

/// Reads a `memory` CSV (comment lines allowed) and fits both error types, keeping points with
/// `p` inside `[p_min, p_max]`.
pub fn fit(input: &Path, p_min: f64, p_max: f64) -> Result<(FitResult, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(input)
        .map_err(|e| StarError::Config(format!("cannot read {}: {e}", input.display())))?;
    let mut z = Vec::new();
    let mut x = Vec::new();
    for rec in reader.deserialize::<MemoryRow>() {
        let r =
            rec.map_err(|e| StarError::Config(format!("bad row in {}: {e}", input.display())))?;
        if r.p < p_min || r.p > p_max {
            continue;
        }
        z.push(ScalingPoint {
            d: r.d,
            p: r.p,
            p_l: r.p_lz,
            sigma: r.sigma_z,
        });
        x.push(ScalingPoint {
            d: r.d,
            p: r.p,
            p_l: r.p_lx,
            sigma: r.sigma_x,
        });
    }
    let n = z.len();
    Ok((fit_scaling(&z, &x)?, n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRow {
    pub error_type: &'static str,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "sigma_C")]
    pub sigma_c: f64,
    pub p_th: f64,
    pub sigma_p_th: f64,
}

pub fn fit_rows(f: &FitResult) -> Vec<FitRow> {
    [("Z", f.z), ("X", f.x)]
        .into_iter()
        .map(|(t, s)| FitRow {
            error_type: t,
            c: s.c,
            sigma_c: s.sigma_c,
            p_th: s.p_th,
            sigma_p_th: s.sigma_p_th,
        })
        .collect()
}

pub fn load_fit(path: Option<&Path>) -> Result<FitResult> {
    let Some(path) = path else {
        return Ok(FitResult::reference());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| StarError::Config(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| StarError::Config(format!("bad fit JSON: {e}")))?;
    // Accept either a bare fit or the document written by `star fit --format json`.
    let body = v.get("result").unwrap_or(&v);
    let body = body.get("fit").unwrap_or(body);
    serde_json::from_value(body.clone())
        .map_err(|e| StarError::Config(format!("bad fit JSON: {e}")))
}

/// Parses `2/15`, `0.1333` or a variant name into a rotation coefficient.
pub fn parse_coefficient(s: &str) -> Result<f64> {
    if let Ok(v) = s.parse::<VariantKind>() {
        return Ok(ratio_f64(
            InjectionExperiment::new(3, v)?.leading_coefficients().c_z,
        ));
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a
            .trim()
            .parse()
            .map_err(|_| StarError::Config(format!("bad coefficient {s:?}")))?;
        let b: i64 = b
            .trim()
            .parse()
            .map_err(|_| StarError::Config(format!("bad coefficient {s:?}")))?;
        if b == 0 {
            return Err(StarError::Config(format!("bad coefficient {s:?}")));
        }
        return Ok(a as f64 / b as f64);
    }
    s.parse::<f64>()
        .ok()
        .filter(|c| *c >= 0.0)
        .ok_or_else(|| StarError::Config(format!("bad coefficient {s:?}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRow {
    pub n_phys: u64,
    pub p: f64,
    pub d: usize,
    pub scheme: String,
    #[serde(rename = "c_Z")]
    pub c_z: f64,
    pub n_logical: u64,
    pub p_round: f64,
    pub n_clifford: f64,
    pub p_rotation: f64,
    pub n_rotation: Option<u64>,
    pub pec_overhead: Option<f64>,
    pub epsilon: f64,
    pub m_nisq: Option<u64>,
    pub m_star: Option<u64>,
    pub log2_vq_star: Option<u64>,
}

impl From<&ResourceReport> for EstimateRow {
    fn from(r: &ResourceReport) -> Self {
        Self {
            n_phys: r.device.n_phys,
            p: r.device.p,
            d: r.d,
            scheme: r.scheme.name().into(),
            c_z: r.c_z,
            n_logical: r.n_logical,
            p_round: r.p_round,
            n_clifford: r.n_clifford,
            p_rotation: r.p_rotation,
            n_rotation: r.n_rotation,
            pec_overhead: r.pec_overhead,
            epsilon: r.epsilon,
            m_nisq: r.qv.m_nisq,
            m_star: r.qv.m_star,
            log2_vq_star: r.qv.log2_vq_star,
        }
    }
}

pub fn estimate(
    spec: &DeviceSpec,
    ds: &[usize],
    scheme: LayoutScheme,
    fit: &FitResult,
    c_z: f64,
    divisor: f64,
) -> Result<Vec<ResourceReport>> {
    ds.iter()
        .map(|&d| resource_report(spec, d, scheme, fit, c_z, divisor))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub d: usize,
    pub architecture: String,
    pub logical_qubits: u64,
    pub clocks_per_non_clifford: u64,
}

pub fn compare(spec: &DeviceSpec, ds: &[usize], c_z: f64) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for &d in ds {
        RotatedSurfaceLayout::new(d)?;
        let cmp = ftqc_comparison(spec, d, rotation_error(c_z, spec.p));
        rows.extend(cmp.rows.into_iter().map(|r| CompareRow {
            d,
            architecture: r.architecture,
            logical_qubits: r.logical_qubits,
            clocks_per_non_clifford: r.clocks_per_non_clifford,
        }));
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppsRow {
    pub d: usize,
    pub n_logical: u64,
    pub n_rotation: u64,
    pub hubbard_sites: u64,
    pub hubbard_rotations_per_step: u64,
    pub hubbard_trotter_steps: u64,
    pub qaoa_nodes: u64,
    pub qaoa_depth: u64,
}

pub fn apps(
    spec: &DeviceSpec,
    ds: &[usize],
    scheme: LayoutScheme,
    c_z: f64,
) -> Result<Vec<AppsRow>> {
    let budget = rotation_budget(spec.p, c_z)?;
    let n_rotation = budget.n_rotation.ok_or_else(|| {
        StarError::Config("rotation error is zero; the rotation budget is unbounded".into())
    })?;
    let mut rows = Vec::new();
    for &d in ds {
        RotatedSurfaceLayout::new(d)?;
        let n = max_logical_qubits(spec, d, scheme);
        let a = application_sizing(n, n_rotation);
        rows.push(AppsRow {
            d,
            n_logical: n,
            n_rotation,
            hubbard_sites: a.hubbard.sites,
            hubbard_rotations_per_step: a.hubbard.rotations_per_step,
            hubbard_trotter_steps: a.hubbard.trotter_steps,
            qaoa_nodes: a.qaoa.nodes,
            qaoa_depth: a.qaoa.depth,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RusRow {
    pub p_z1: f64,
    pub runs: u64,
    pub mean_steps: f64,
    pub sigma_mean_steps: f64,
    pub flip_rate: f64,
    pub sigma_flip_rate: f64,
    pub exact_flip_rate: f64,
}

pub fn rus(p_z1s: &[f64], runs: u64, seed: u64, threads: Option<usize>) -> Result<Vec<RusRow>> {
    check_shots(runs)?;
    let mut rows = Vec::new();
    for (i, &x) in p_z1s.iter().enumerate() {
        let model = RusModel::new(x)?;
        let s = rus_statistics(&model, runs, point_seed(seed, i), threads);
        rows.push(RusRow {
            p_z1: x,
            runs: s.runs,
            mean_steps: s.mean_steps,
            sigma_mean_steps: s.sigma_mean_steps,
            flip_rate: s.flip_rate,
            sigma_flip_rate: s.sigma_flip_rate,
            exact_flip_rate: rus_error_exact(x),
        });
    }
    Ok(rows)
}
