//! Scaled random walks against Brownian motion: exit-time laws and
//! exit-time profiles.

use super::stats::{binomial_3sigma, dkw_3sigma, ks_statistic, Ecdf};
use super::substream;
use crate::barrier::{BarrierField, BoundaryFn};
use crate::error::{domain, Error, Result};
use crate::first_passage::{exit_profile, exit_time};
use crate::path::CadlagPath;
use crate::skorokhod::{m1_upper_bound, MonotonePath};
use crate::time::TimeValue;
use rand::distr::{Distribution, Uniform};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;
use std::fmt;
use std::str::FromStr;

/// Salt shared by every walk so that sample `i` of any experiment is the
/// same path for a given seed.
const WALK_SALT: u64 = 0x5741_4c4b;

/// Default fine-grid cell count for Brownian reference paths.
pub const FINE_CELLS: usize = 1 << 14;

/// Standardized increment law (mean 0, variance 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepLaw {
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    Uniform,
    StandardNormal,
}

impl FromStr for StepLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "rademacher" => Ok(StepLaw::Rademacher),
            "uniform" => Ok(StepLaw::Uniform),
            "standard_normal" | "normal" => Ok(StepLaw::StandardNormal),
            _ => Err(Error::Parse(format!("unknown step law {s:?}"))),
        }
    }
}

impl fmt::Display for StepLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepLaw::Rademacher => "rademacher",
            StepLaw::Uniform => "uniform",
            StepLaw::StandardNormal => "standard_normal",
        })
    }
}

impl StepLaw {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            StepLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            StepLaw::Uniform => {
                let r = 3f64.sqrt();
                Uniform::new_inclusive(-r, r).expect("valid bounds").sample(rng)
            }
            StepLaw::StandardNormal => StandardNormal.sample(rng),
        }
    }
}

/// Walk `X(t) = S_{⌊nt⌋} / √n` with the given increment law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RandomWalkSpec {
    pub law: StepLaw,
    pub n: usize,
    pub seed: u64,
}

/// Number of walk steps on `[0, horizon]`.
fn step_count(n: usize, horizon: f64) -> Result<usize> {
    if n == 0 {
        return domain("walk needs at least one step per unit time");
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return domain("horizon must be positive");
    }
    Ok((n as f64 * horizon).floor() as usize)
}

fn walk_from_increments(n: usize, horizon: f64, increments: impl Iterator<Item = f64>) -> Result<CadlagPath> {
    let scale = (n as f64).sqrt();
    let mut s = 0.0;
    let mut steps = vec![(0.0, 0.0)];
    for (k, xi) in increments.enumerate() {
        s += xi;
        steps.push(((k + 1) as f64 / n as f64, s / scale));
    }
    CadlagPath::step(0.0, horizon, &steps)
}

/// Sample `index` of the walk on `[0, horizon]`: a step path with jumps
/// `ξ_k/√n` at `k/n`.
pub fn donsker_sample(spec: &RandomWalkSpec, horizon: f64, index: u64) -> Result<CadlagPath> {
    let m = step_count(spec.n, horizon)?;
    let mut rng = substream(spec.seed, WALK_SALT, index);
    walk_from_increments(spec.n, horizon, (0..m).map(|_| spec.law.draw(&mut rng)))
}

/// The first sample of the walk.
pub fn donsker_path(spec: &RandomWalkSpec, horizon: f64) -> Result<CadlagPath> {
    donsker_sample(spec, horizon, 0)
}

/// `P(τ ≤ t) = 2(1 − N(a/√t))` for Brownian first passage to level `a`.
pub fn reflection_cdf(level: f64, t: f64) -> f64 {
    if level <= 0.0 {
        1.0
    } else if t <= 0.0 {
        0.0
    } else {
        erfc(level / (2.0 * t).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Comparison {
    Analytic,
    /// No closed-form law for this boundary.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DonskerExitRecord {
    pub law: StepLaw,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub horizon: f64,
    pub boundary: String,
    pub comparison: Comparison,
    /// `sup_t |F̂(t) − F(t)|` on `[0, horizon]`.
    pub ks: Option<f64>,
    pub ks_3sigma: f64,
    pub p_exit: f64,
    pub p_exit_3sigma: f64,
    pub p_exit_analytic: Option<f64>,
    #[serde(skip)]
    pub exit_times: Vec<TimeValue>,
    #[serde(skip)]
    pub ecdf: Ecdf,
}

/// Exit times of `samples` walks from `{x < g(t)}` on `[0, horizon]`,
/// compared with the reflection law when `g` is constant.
pub fn donsker_exit_experiment(
    spec: &RandomWalkSpec,
    samples: usize,
    boundary: BoundaryFn,
    horizon: f64,
) -> Result<DonskerExitRecord> {
    if samples < 100 {
        return domain("need at least 100 samples");
    }
    step_count(spec.n, horizon)?;
    let barrier = BarrierField::moving_boundary(boundary);
    let exit_times: Vec<TimeValue> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = donsker_sample(spec, horizon, i)?;
            exit_time(&x.into(), &barrier)
        })
        .collect::<Result<_>>()?;
    let ecdf = Ecdf::new(&exit_times);
    let p_exit = ecdf.eval(horizon);
    let (comparison, ks, p_exit_analytic) = match boundary {
        BoundaryFn::Constant(level) => {
            let cdf = |t: f64| reflection_cdf(level, t);
            let at_horizon = (p_exit - cdf(horizon)).abs();
            (Comparison::Analytic, Some(ks_statistic(&ecdf, cdf).max(at_horizon)), Some(cdf(horizon)))
        }
        _ => (Comparison::Inconclusive, None, None),
    };
    Ok(DonskerExitRecord {
        law: spec.law,
        n: spec.n,
        samples,
        seed: spec.seed,
        horizon,
        boundary: format!("{boundary:?}"),
        comparison,
        ks,
        ks_3sigma: dkw_3sigma(samples),
        p_exit,
        p_exit_3sigma: binomial_3sigma(p_exit, samples),
        p_exit_analytic,
        exit_times,
        ecdf,
    })
}

/// Options for [`donsker_profile_experiment`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileOptions {
    pub u0: f64,
    pub u1: f64,
    /// Constant boundary; profiles are taken for `x − level`.
    pub level: f64,
    pub horizon: f64,
    pub fine_cells: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { u0: 0.5, u1: 1.5, level: 0.0, horizon: 2.0, fine_cells: FINE_CELLS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DonskerProfileRecord {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub options: ProfileOptions,
    pub mean_m1_upper: f64,
    pub std_error: f64,
    #[serde(skip)]
    pub per_sample: Vec<f64>,
}

/// Walk and Brownian path built from the same normal increments: the
/// Brownian path interpolates linearly on `fine_cells` cells, the walk
/// holds its value at every `k/n`.
pub fn coupled_paths(spec: &RandomWalkSpec, opts: &ProfileOptions, index: u64) -> Result<(CadlagPath, CadlagPath)> {
    if spec.law != StepLaw::StandardNormal {
        return domain("the Brownian coupling needs standard normal increments");
    }
    let m = step_count(spec.n, opts.horizon)?;
    if m as f64 != spec.n as f64 * opts.horizon {
        return domain("n * horizon must be an integer");
    }
    if opts.fine_cells == 0 || !opts.fine_cells.is_multiple_of(m) {
        return domain(format!("fine grid of {} cells is not a refinement of {m} walk steps", opts.fine_cells));
    }
    let per_step = opts.fine_cells / m;
    let dt = opts.horizon / opts.fine_cells as f64;
    let mut rng = substream(spec.seed, WALK_SALT, index);
    let mut b = 0.0;
    let mut nodes = Vec::with_capacity(opts.fine_cells + 1);
    nodes.push((0.0, 0.0));
    for j in 1..=opts.fine_cells {
        let z: f64 = StandardNormal.sample(&mut rng);
        b += dt.sqrt() * z;
        nodes.push((opts.horizon * j as f64 / opts.fine_cells as f64, b));
    }
    let brownian = CadlagPath::piecewise_linear(&nodes)?;
    let steps: Vec<(f64, f64)> = nodes.iter().step_by(per_step).copied().collect();
    let walk = CadlagPath::step(0.0, opts.horizon, &steps)?;
    Ok((walk, brownian))
}

/// Mean M1 upper bound between compactified exit-time profiles of the
/// walk and its coupled Brownian path.
pub fn donsker_profile_experiment(
    spec: &RandomWalkSpec,
    samples: usize,
    opts: &ProfileOptions,
) -> Result<DonskerProfileRecord> {
    if !(opts.u0 < opts.u1) {
        return domain("profile needs u0 < u1");
    }
    if samples == 0 {
        return domain("need at least one sample");
    }
    let per_sample: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let (walk, brownian) = coupled_paths(spec, opts, i)?;
            let profile = |p: &CadlagPath| -> Result<MonotonePath> {
                let prof = exit_profile(&p.shift(-opts.level), opts.u0, opts.u1)?;
                MonotonePath::new(prof.compactified(1)?)
            };
            m1_upper_bound(&profile(&walk)?, &profile(&brownian)?)
        })
        .collect::<Result<_>>()?;
    let mean = per_sample.iter().sum::<f64>() / samples as f64;
    let var = per_sample.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (samples.max(2) - 1) as f64;
    Ok(DonskerProfileRecord {
        n: spec.n,
        samples,
        seed: spec.seed,
        options: *opts,
        mean_m1_upper: mean,
        std_error: (var / samples as f64).sqrt(),
        per_sample,
    })
}
