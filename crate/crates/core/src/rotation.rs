//! Repeat-until-success rotations and probabilistic error cancellation.
//!
//! A teleported rotation succeeds with probability 1/2 per attempt; on failure the angle is
//! doubled and the attempt repeated. Each attempt consumes one ancilla state whose residual
//! phase-flip probability is `P_Z1`, so the whole process behaves as a single phase-flip
//! channel that is then inverted on average by quasi-probability sampling.

use rand::Rng;
use serde::Serialize;

use crate::error::{Result, StarError};
use crate::montecarlo::{run_shots, Tally};

/// Per-attempt phase-flip model of the repeat-until-success rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RusModel {
    pub p_success_per_step: f64,
    pub p_z1: f64,
}

impl RusModel {
    pub fn new(p_z1: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&p_z1) {
            return Err(StarError::Config(format!(
                "per-step phase-flip probability must lie in [0, 1/2), got {p_z1}"
            )));
        }
        Ok(Self {
            p_success_per_step: 0.5,
            p_z1,
        })
    }
}

/// Expected number of attempts, `sum n 2^-n`.
pub fn rus_mean_steps() -> f64 {
    2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RusOutcome {
    pub steps: u32,
    pub z_flip: bool,
}

pub fn simulate_rus<R: Rng + ?Sized>(model: &RusModel, rng: &mut R) -> RusOutcome {
    let mut steps = 0;
    let mut z_flip = false;
    loop {
        steps += 1;
        z_flip ^= rng.gen::<f64>() < model.p_z1;
        if rng.gen::<f64>() < model.p_success_per_step {
            return RusOutcome { steps, z_flip };
        }
    }
}

/// Probability of an odd number of flips in `n` attempts.
pub fn rus_error_terms(p_z1: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if p_z1 == 0.0 {
        return 0.0;
    }
    if p_z1 >= 1.0 {
        return (n % 2) as f64;
    }
    let ratio = p_z1 / (1.0 - p_z1);
    let mut term = (1.0 - p_z1).powi(n as i32);
    let mut odd = 0.0;
    for k in 0..n {
        term *= (n - k) as f64 / (k + 1) as f64 * ratio;
        if k % 2 == 0 {
            odd += term;
        }
    }
    odd
}

/// Terms of the attempt series kept by [`rus_error_exact`].
pub const RUS_SERIES_TERMS: u32 = 96;

/// Phase-flip probability of the complete process, `sum_n 2^-n P_{Z,n}`.
pub fn rus_error_exact(p_z1: f64) -> f64 {
    rus_error_partial(p_z1, RUS_SERIES_TERMS)
}

/// The attempt series truncated after `n_max` terms.
pub fn rus_error_partial(p_z1: f64, n_max: u32) -> f64 {
    (1..=n_max)
        .map(|n| 0.5f64.powi(n as i32) * rus_error_terms(p_z1, n))
        .sum()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct RusTally {
    runs: u64,
    steps: u64,
    steps_sq: u64,
    flips: u64,
}

impl Tally for RusTally {
    fn merge(&mut self, o: Self) {
        self.runs += o.runs;
        self.steps += o.steps;
        self.steps_sq += o.steps_sq;
        self.flips += o.flips;
    }
}

/// Empirical statistics of repeated RUS runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RusStats {
    pub runs: u64,
    pub mean_steps: f64,
    pub sigma_mean_steps: f64,
    pub flip_rate: f64,
    pub sigma_flip_rate: f64,
}

pub fn rus_statistics(model: &RusModel, runs: u64, seed: u64, threads: Option<usize>) -> RusStats {
    let t: RusTally = run_shots(
        runs,
        seed,
        threads,
        || (),
        |_, rng| {
            let o = simulate_rus(model, rng);
            let s = o.steps as u64;
            RusTally {
                runs: 1,
                steps: s,
                steps_sq: s * s,
                flips: o.z_flip as u64,
            }
        },
    );
    let n = t.runs.max(1) as f64;
    let mean = t.steps as f64 / n;
    let var = (t.steps_sq as f64 / n - mean * mean).max(0.0);
    let (flip_rate, sigma_flip_rate) = crate::decoder::binomial_rate(t.flips, t.runs);
    RusStats {
        runs: t.runs,
        mean_steps: mean,
        sigma_mean_steps: (var / n).sqrt(),
        flip_rate,
        sigma_flip_rate,
    }
}

/// Quasi-probability inversion of `N` phase-flip channels of strength `P`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PecPlan {
    pub p: f64,
    pub gamma: f64,
    pub n: u64,
}

impl PecPlan {
    pub fn new(p: f64, n: u64) -> Result<Self> {
        Ok(Self {
            p,
            gamma: pec_gamma(p)?,
            n,
        })
    }

    /// Variance amplification `gamma^(2N)`.
    pub fn overhead(&self) -> f64 {
        (2.0 * self.n as f64 * self.gamma.ln()).exp()
    }
}

/// `1 / (1 - 2P)`.
pub fn pec_gamma(p: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p) {
        return Err(StarError::Config(format!(
            "phase-flip probability must lie in [0, 1/2), got {p}"
        )));
    }
    Ok(1.0 / (1.0 - 2.0 * p))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PecEstimate {
    pub mean: f64,
    pub sigma: f64,
    /// Sample variance of the weighted outcomes.
    pub variance: f64,
    pub gamma: f64,
    pub samples: u64,
}

/// Sign-sampling estimate of the noiseless expectation value.
///
/// `sampler(rng, flipped)` returns a `±1` outcome from the noisy circuit, with an extra `Z`
/// after the noise when `flipped` is true. With probability `1 - P` the unflipped circuit is
/// sampled with weight `+gamma`, otherwise the flipped one with weight `-gamma`.
pub fn pec_mitigate<R, F>(mut sampler: F, p: f64, samples: u64, rng: &mut R) -> Result<PecEstimate>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R, bool) -> f64,
{
    let gamma = pec_gamma(p)?;
    if samples == 0 {
        return Err(StarError::Config("at least one sample is required".into()));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let flipped = rng.gen::<f64>() < p;
        let w = if flipped { -gamma } else { gamma };
        let v = w * sampler(rng, flipped);
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(PecEstimate {
        mean,
        sigma: (variance / n).sqrt(),
        variance,
        gamma,
        samples,
    })
}

/// Sampling overhead of mitigating `n` rotations: exact `gamma^(2N)` with the full series,
/// and the approximation `exp(8 P_Z1 N)`.
pub fn sampling_overhead(p_z1: f64, n: u64) -> Result<(f64, f64)> {
    let exact = PecPlan::new(rus_error_exact(p_z1), n)?.overhead();
    let approx = (8.0 * p_z1 * n as f64).exp();
    Ok((exact, approx))
}
