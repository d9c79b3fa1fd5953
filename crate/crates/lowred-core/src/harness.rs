//! Experiment engine: random instances, noise sweeps over a fixed
//! polynomial, and the worst-case random-walk search.
//!
//! Sweeps are deterministic under a fixed seed: each trial derives its own
//! seed as `hash(seed, level_index, trial_index)`, so serial and parallel
//! executions produce identical rows. `LOWRED_THREADS` caps the worker
//! count (0 or unset = automatic).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::bounds::{admissible_noise, error_bound_unchecked, sci_from_log10, BetaVariant};
use crate::error::{Error, Result};
use crate::interpolation::magnitude_families;
use crate::measurement::{add_noise, measure, sample_noise, NoiseModel};
use crate::polyspace::{rho, Polynomial, UnitPoint};
use crate::recovery::{default_grid_size, recover, select_z0, Method};

/// Where the sweep polynomial comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolySource {
    /// A fresh random unit-norm polynomial drawn from the sweep seed.
    Random,
    /// The published d = 7 worst-case polynomial.
    FixtureD7,
    /// Polynomial JSON loaded from a file.
    File(PathBuf),
}

/// Configuration for [`run_sweep`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub d: usize,
    pub poly_source: PolySource,
    pub noise_model: NoiseModel,
    /// Strictly increasing noise levels.
    pub noise_levels: Vec<f64>,
    pub trials_per_level: usize,
    pub method: Method,
    pub seed: u64,
    /// 0 selects the default grid for the dimension.
    #[serde(default)]
    pub grid_size: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub variant: BetaVariant,
}

fn default_alpha() -> f64 {
    0.5
}

/// One aggregated row of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub noise_level: f64,
    pub worst_rho: f64,
    pub mean_rho: f64,
    /// Final-theorem bound value at this level (a guarantee only where
    /// `admissible` is set; reported everywhere for plotting).
    pub bound: f64,
    pub bound_log10: f64,
    /// Whether the level is within the universal threshold αβ²‖p‖²/(2d-1).
    pub admissible: bool,
    /// Trials that errored (recorded, never fatal to the sweep).
    pub failures: usize,
}

/// Renders sweep rows as CSV with the fixed five-column header. The bound
/// column is printed from its log10 so values beyond the `f64` range stay
/// finite decimals.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("noise_level,worst_rho,mean_rho,bound,admissible\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.noise_level,
            r.worst_rho,
            r.mean_rho,
            sci_from_log10(r.bound_log10),
            r.admissible
        ));
    }
    out
}

/// i.i.d. standard complex Gaussian coefficients normalized to unit norm.
pub fn random_unit_poly(d: usize, seed: u64) -> Result<Polynomial> {
    if d < 1 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let coeffs: Vec<Complex64> = (0..d)
            .map(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
            .collect();
        let p = Polynomial::new(coeffs)?;
        let n = p.norm();
        if n > 1e-12 {
            return Ok(p.scale(Complex64::new(1.0 / n, 0.0)));
        }
    }
}

/// The numerically found local worst-case polynomial for d = 7, with the
/// published coefficients. Its norm is 1 up to the printed precision.
pub fn worst_case_fixture() -> Polynomial {
    Polynomial::new(vec![
        Complex64::new(0.3114912, -0.0519351),
        Complex64::new(-0.0367368, -0.6727228),
        Complex64::new(-0.2214904, -0.1978638),
        Complex64::new(-0.3210523, -0.3897147),
        Complex64::new(-0.1358901, 0.1047726),
        Complex64::new(-0.07403360, -0.2281884),
        Complex64::new(-0.12017811, 0.04210790),
    ])
    .expect("fixture coefficients are fixed")
}

/// Per-trial seed derivation, stable across platforms and thread counts.
pub fn trial_seed(seed: u64, level_index: u64, trial_index: u64) -> u64 {
    let mut x = seed ^ splitmix64(level_index ^ 0x9e3779b97f4a7c15);
    x = splitmix64(x);
    x ^= splitmix64(trial_index ^ 0xd1b54a32d192ed03);
    splitmix64(x)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn resolve_poly(cfg: &SweepConfig) -> Result<Polynomial> {
    let p = match &cfg.poly_source {
        PolySource::Random => random_unit_poly(cfg.d, trial_seed(cfg.seed, u64::MAX, 0))?,
        PolySource::FixtureD7 => worst_case_fixture(),
        PolySource::File(path) => Polynomial::from_json(&std::fs::read_to_string(path)?)?,
    };
    if p.dim() != cfg.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.d,
            got: p.dim(),
        });
    }
    Ok(p)
}

fn validate(cfg: &SweepConfig) -> Result<()> {
    if cfg.d < 2 {
        return Err(Error::InvalidParameter("sweep needs d >= 2".into()));
    }
    if cfg.trials_per_level < 1 {
        return Err(Error::InvalidParameter(
            "trials_per_level must be >= 1".into(),
        ));
    }
    if cfg.noise_levels.is_empty() {
        return Err(Error::InvalidParameter("no noise levels given".into()));
    }
    for w in cfg.noise_levels.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(
                "noise levels must be strictly increasing".into(),
            ));
        }
    }
    if cfg.noise_levels[0] < 0.0 {
        return Err(Error::InvalidParameter("noise levels must be >= 0".into()));
    }
    Ok(())
}

fn thread_pool() -> rayon::ThreadPool {
    let n = std::env::var("LOWRED_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool")
}

/// Runs the sweep: at every level, `trials_per_level` recoveries with
/// fresh noise against the fixed polynomial. A failed trial is counted,
/// never fatal. Rows come back ordered by level.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    validate(cfg)?;
    let p = resolve_poly(cfg)?;
    let grid = if cfg.grid_size == 0 {
        default_grid_size(cfg.d)
    } else {
        cfg.grid_size
    };
    let clean = measure(&p);
    let norm_p = p.norm();
    let universal = admissible_noise(cfg.d, cfg.alpha, norm_p, cfg.variant)?;
    let pool = thread_pool();
    let mut rows = Vec::with_capacity(cfg.noise_levels.len());
    for (li, &level) in cfg.noise_levels.iter().enumerate() {
        // index-ordered trial results keep aggregation order-independent
        let trials: Vec<Option<f64>> = pool.install(|| {
            (0..cfg.trials_per_level)
                .into_par_iter()
                .map(|ti| {
                    let seed = trial_seed(cfg.seed, li as u64, ti as u64);
                    let eps = sample_noise(clean.len(), level, cfg.noise_model, seed).ok()?;
                    let noisy = add_noise(&clean, &eps).ok()?;
                    let res = recover(&noisy, cfg.method, grid, None).ok()?;
                    rho(&res.p_tilde, &p).ok()
                })
                .collect()
        });
        let failures = trials.iter().filter(|t| t.is_none()).count();
        let ok: Vec<f64> = trials.into_iter().flatten().collect();
        let (worst, mean) = if ok.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            let worst = ok.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mean = ok.iter().sum::<f64>() / ok.len() as f64;
            (worst, mean)
        };
        let report = error_bound_unchecked(cfg.d, cfg.alpha, level, norm_p, cfg.variant)?;
        rows.push(SweepRow {
            noise_level: level,
            worst_rho: worst,
            mean_rho: mean,
            bound: report.error_bound,
            bound_log10: report.error_bound_log10,
            admissible: level <= universal,
            failures,
        });
    }
    Ok(rows)
}

/// The noiseless max-min objective `max_z min_j |p(ν^j z)|` over the grid.
pub fn max_min_objective(p: &Polynomial, grid_size: usize) -> f64 {
    let d = p.dim();
    let mut best = f64::NEG_INFINITY;
    for k in 0..grid_size {
        let z = UnitPoint::from_angle(std::f64::consts::TAU * k as f64 / grid_size as f64);
        let v = (1..=d)
            .map(|j| p.eval(z.rotate(UnitPoint::nu_pow(d, j as i64))).norm())
            .fold(f64::INFINITY, f64::min);
        if v > best {
            best = v;
        }
    }
    best
}

/// Random-walk search for polynomials with a small max-min value.
///
/// Starts from the worst of a 32-instance random batch and perturbs the
/// coefficients, renormalizing after each step; a step is accepted only if
/// the objective decreased. The step size halves after every rejection
/// stretch of `iters/10`.
pub fn search_worst(d: usize, iters: usize, seed: u64) -> Result<Polynomial> {
    if iters < 1 {
        return Err(Error::InvalidParameter("iters must be >= 1".into()));
    }
    if d < 1 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let grid = default_grid_size(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut current = random_unit_poly(d, rng.gen())?;
    let mut obj = max_min_objective(&current, grid);
    for _ in 1..32 {
        let candidate = random_unit_poly(d, rng.gen())?;
        let v = max_min_objective(&candidate, grid);
        if v < obj {
            current = candidate;
            obj = v;
        }
    }

    let stretch = (iters / 10).max(1);
    let mut step = 0.1;
    let mut rejected = 0usize;
    for _ in 0..iters {
        let coeffs: Vec<Complex64> = current
            .coeffs()
            .iter()
            .map(|c| {
                let dre: f64 = rng.sample(StandardNormal);
                let dim: f64 = rng.sample(StandardNormal);
                c + Complex64::new(step * dre, step * dim)
            })
            .collect();
        let candidate = Polynomial::new(coeffs)?;
        let n = candidate.norm();
        if n < 1e-12 {
            continue;
        }
        let candidate = candidate.scale(Complex64::new(1.0 / n, 0.0));
        let v = max_min_objective(&candidate, grid);
        if v < obj {
            current = candidate;
            obj = v;
            rejected = 0;
        } else {
            rejected += 1;
            if rejected >= stretch {
                step *= 0.5;
                rejected = 0;
            }
        }
    }
    Ok(current)
}

/// Least-squares line through the origin; returns (slope, R²) with the
/// uncentered total sum of squares.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| y * y).sum();
    (slope, 1.0 - ss_res / ss_tot)
}

/// The noiseless pipeline floor for a polynomial: `min_j f₀(ν^j z₀)` at the
/// max-min selected `z₀`. This is the quantity the per-instance noise
/// ceiling scales from.
pub fn noiseless_floor(p: &Polynomial, grid_size: usize) -> Result<f64> {
    let (f0, _, _) = magnitude_families(&measure(p))?;
    let (_, min_sample) = select_z0(&f0, grid_size)?;
    Ok(min_sample)
}
