//! Seeded Monte Carlo studies of slope estimators.
//!
//! Each replication draws a latent `X_i`, sets `Y_i = beta0 + beta1 X_i`, and
//! observes `x_i = X_i + delta_i`, `y_i = Y_i + tau_i` with independent normal
//! errors.
//!
//! Random streams: replication `i` of a study with seed `s` uses a ChaCha8
//! generator seeded (via `SeedableRng::seed_from_u64`) with
//! `derive_seed(s, i)`, a SplitMix64 mix of the two. Uniforms are the
//! generator's 53-bit `f64` in `[0, 1)`; exponentials use the inverse CDF
//! `-mean * ln(1 - u)` and normals Marsaglia's polar method. A sample draws
//! all `n` latent values, then all `n` x-errors, then all `n` y-errors.
//! Because every replication owns its stream, results do not depend on
//! execution order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_selected, mle, FitNote, Method};
use crate::oblique::oblique_angle;
use crate::summary_stats::{summarize, PairedSample};

pub const DEFAULT_SEED: u64 = 20_100_405;

/// Estimators compared in the default study, in report order.
pub const DEFAULT_ESTIMATORS: [Method; 7] = [
    Method::Ver,
    Method::Hor,
    Method::Per,
    Method::Gm,
    Method::Mom,
    Method::Copas,
    Method::Md,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum XDistribution {
    Exponential { mean: f64 },
    Normal { mean: f64, sd: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub x_distribution: XDistribution,
    pub beta0: f64,
    pub beta1: f64,
    /// Standard deviation of the x error.
    pub sigma_delta: f64,
    /// Standard deviation of the y error.
    pub sigma_tau: f64,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    /// Grid of assumed error ratios for the misspecification study.
    pub assumed_kappas: Vec<f64>,
    pub estimators: Vec<Method>,
    /// Ratio for the MLE row when it is requested; `None` uses the moment
    /// ratio at the clamped fourth-moment slope.
    pub mle_kappa: Option<f64>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            x_distribution: XDistribution::Exponential { mean: 10.0 },
            beta0: 0.0,
            beta1: 1.0,
            sigma_delta: 1.0,
            sigma_tau: 1.0,
            n: 100,
            replications: 1000,
            seed: DEFAULT_SEED,
            assumed_kappas: Vec::new(),
            estimators: DEFAULT_ESTIMATORS.to_vec(),
            mle_kappa: None,
        }
    }
}

impl SimulationConfig {
    /// True error ratio `sigma_tau^2 / sigma_delta^2`.
    pub fn kappa(&self) -> f64 {
        (self.sigma_tau / self.sigma_delta).powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key, reason: &str| {
            Err(Error::InvalidConfig {
                key,
                reason: reason.to_string(),
            })
        };
        match self.x_distribution {
            XDistribution::Exponential { mean } if !(mean > 0.0 && mean.is_finite()) => {
                return bad("mu_x", "exponential mean must be positive")
            }
            XDistribution::Normal { mean, sd }
                if !(mean.is_finite() && sd > 0.0 && sd.is_finite()) =>
            {
                return bad("sd_x", "normal sd must be positive")
            }
            _ => {}
        }
        if !self.beta0.is_finite() {
            return bad("beta0", "must be finite");
        }
        if !(self.beta1.is_finite() && self.beta1 != 0.0) {
            return bad("beta1", "must be finite and nonzero");
        }
        if !(self.sigma_delta > 0.0 && self.sigma_delta.is_finite()) {
            return bad("sigma_delta", "must be positive");
        }
        if !(self.sigma_tau > 0.0 && self.sigma_tau.is_finite()) {
            return bad("sigma_tau", "must be positive");
        }
        if self.n < 3 {
            return bad("n", "must be at least 3");
        }
        if self.replications < 1 {
            return bad("replications", "must be at least 1");
        }
        if self
            .assumed_kappas
            .iter()
            .any(|k| !(*k > 0.0 && k.is_finite()))
        {
            return bad("assumed_kappas", "every ratio must be positive");
        }
        if let Some(k) = self.mle_kappa {
            if !(k > 0.0 && k.is_finite()) {
                return bad("mle_kappa", "must be positive");
            }
        }
        if self.estimators.is_empty() {
            return bad("estimators", "at least one estimator is required");
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of substream `index` under master seed `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

struct Sampler {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    fn exponential(&mut self, mean: f64) -> f64 {
        -mean * (1.0 - self.uniform()).ln()
    }

    fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * factor);
                return u * factor;
            }
        }
    }

    fn latent(&mut self, dist: XDistribution) -> f64 {
        match dist {
            XDistribution::Exponential { mean } => self.exponential(mean),
            XDistribution::Normal { mean, sd } => mean + sd * self.standard_normal(),
        }
    }
}

fn draw(config: &SimulationConfig, seed: u64) -> Result<PairedSample> {
    let mut sampler = Sampler::new(seed);
    let latent: Vec<f64> = (0..config.n)
        .map(|_| sampler.latent(config.x_distribution))
        .collect();
    let xs = latent
        .iter()
        .map(|&x| x + config.sigma_delta * sampler.standard_normal())
        .collect();
    let ys = latent
        .iter()
        .map(|&x| config.beta0 + config.beta1 * x + config.sigma_tau * sampler.standard_normal())
        .collect();
    PairedSample::new(xs, ys)
}

/// Contaminated sample for one replication; a pure function of
/// `(config, replication_index)`.
///
/// The config is not validated here, so zero error SDs are allowed.
pub fn generate_sample(config: &SimulationConfig, replication_index: u64) -> Result<PairedSample> {
    draw(config, derive_seed(config.seed, replication_index))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub method: Method,
    /// Replications in which the estimator produced a slope.
    pub count: usize,
    pub failures: usize,
    pub mean_slope: f64,
    pub percent_bias: f64,
    pub mse: f64,
    /// `mse * 1e3`, the scale the comparison tables print.
    pub mse_e3: f64,
    pub mean_lambda: Option<f64>,
    /// Angle of the mean fit, `oblique_angle(mean_lambda, mean_slope)`.
    pub mean_theta_deg: Option<f64>,
}

/// Average of the OLS(y|x) and OLS(x|y) rows: mean MSE and mean absolute
/// percent bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlsAverage {
    pub mse: f64,
    pub mse_e3: f64,
    pub mean_abs_percent_bias: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyCounts {
    /// Replications where the fourth-moment radicand was negative and the
    /// geometric mean stood in.
    pub radicand_negative: usize,
    pub clamped_low: usize,
    pub clamped_high: usize,
    pub copas_ties: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub rows: Vec<EstimatorSummary>,
    pub ols_average: Option<OlsAverage>,
    pub counts: StudyCounts,
}

impl SimulationReport {
    pub fn row(&self, method: Method) -> Option<&EstimatorSummary> {
        self.rows.iter().find(|r| r.method == method)
    }
}

#[derive(Debug, Clone)]
struct Replicate {
    fits: Vec<Option<(f64, Option<f64>)>>,
    counts: StudyCounts,
}

fn replicate(config: &SimulationConfig, index: u64) -> Replicate {
    let fitted = generate_sample(config, index)
        .and_then(|s| summarize(&s))
        .map(|stats| estimate_selected(&stats, &config.estimators, config.mle_kappa));
    let mut counts = StudyCounts::default();
    let fits = match fitted {
        Ok(set) => {
            let mut fits = Vec::with_capacity(config.estimators.len());
            for &method in &config.estimators {
                let fit = set.fit(method);
                if let Some(f) = fit {
                    match method {
                        Method::Mom => {
                            counts.radicand_negative += f.has_note(FitNote::FallbackGm) as usize;
                            counts.clamped_low += f.has_note(FitNote::ClampedLow) as usize;
                            counts.clamped_high += f.has_note(FitNote::ClampedHigh) as usize;
                        }
                        Method::Copas => counts.copas_ties += f.has_note(FitNote::Tie) as usize,
                        _ => {}
                    }
                }
                fits.push(fit.map(|f| (f.beta1, f.lambda)));
            }
            fits
        }
        Err(_) => vec![None; config.estimators.len()],
    };
    Replicate { fits, counts }
}

fn summarize_method(
    method: Method,
    column: impl Iterator<Item = Option<(f64, Option<f64>)>>,
    truth: f64,
    replications: usize,
) -> EstimatorSummary {
    let (mut count, mut sum, mut sq, mut lambda_sum, mut lambda_count) =
        (0usize, 0.0, 0.0, 0.0, 0usize);
    for (slope, lambda) in column.flatten() {
        count += 1;
        sum += slope;
        sq += (slope - truth).powi(2);
        if let Some(l) = lambda {
            lambda_sum += l;
            lambda_count += 1;
        }
    }
    let mean_slope = sum / count as f64;
    let mse = sq / count as f64;
    let mean_lambda = (lambda_count > 0).then(|| lambda_sum / lambda_count as f64);
    EstimatorSummary {
        method,
        count,
        failures: replications - count,
        mean_slope,
        percent_bias: 100.0 * (mean_slope - truth) / truth,
        mse,
        mse_e3: mse * 1e3,
        mean_lambda,
        mean_theta_deg: mean_lambda.map(|l| oblique_angle(l, mean_slope)),
    }
}

/// Runs every replication and aggregates bias, MSE and mean obliqueness
/// per estimator.
pub fn run_study(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let results: Vec<Replicate> = (0..config.replications as u64)
        .into_par_iter()
        .map(|i| replicate(config, i))
        .collect();

    let mut counts = StudyCounts::default();
    for r in &results {
        counts.radicand_negative += r.counts.radicand_negative;
        counts.clamped_low += r.counts.clamped_low;
        counts.clamped_high += r.counts.clamped_high;
        counts.copas_ties += r.counts.copas_ties;
    }

    let rows: Vec<EstimatorSummary> = config
        .estimators
        .iter()
        .enumerate()
        .map(|(j, &method)| {
            summarize_method(
                method,
                results.iter().map(|r| r.fits[j]),
                config.beta1,
                config.replications,
            )
        })
        .collect();

    let find = |m: Method| rows.iter().find(|r| r.method == m && r.count > 0);
    let ols_average = match (find(Method::Ver), find(Method::Hor)) {
        (Some(v), Some(h)) => {
            let mse = 0.5 * (v.mse + h.mse);
            Some(OlsAverage {
                mse,
                mse_e3: mse * 1e3,
                mean_abs_percent_bias: 0.5 * (v.percent_bias.abs() + h.percent_bias.abs()),
            })
        }
        _ => None,
    };

    Ok(SimulationReport {
        config: config.clone(),
        rows,
        ols_average,
        counts,
    })
}

/// True error standard deviations for one column of the misspecification
/// study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub sigma_delta: f64,
    pub sigma_tau: f64,
}

impl ErrorPair {
    pub fn from_variances(sigma_delta_sq: f64, sigma_tau_sq: f64) -> Self {
        ErrorPair {
            sigma_delta: sigma_delta_sq.sqrt(),
            sigma_tau: sigma_tau_sq.sqrt(),
        }
    }

    pub fn kappa(&self) -> f64 {
        (self.sigma_tau / self.sigma_delta).powi(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaMatrix {
    pub assumed_kappas: Vec<f64>,
    pub columns: Vec<ErrorPair>,
    /// `percent_bias[row][col]` for assumed ratio `row` under true errors `col`.
    pub percent_bias: Vec<Vec<f64>>,
    /// Replications per column in which the sample was unusable.
    pub failures: Vec<usize>,
}

/// Percent bias of the likelihood slope when it is computed with each
/// assumed ratio in `config.assumed_kappas`, under each pair of true error
/// SDs in `columns`.
///
/// Within a column every row is computed from the same samples, so rows with
/// equal assumed ratios are identical. Column `j` draws its samples with
/// master seed `derive_seed(config.seed, j)`.
pub fn run_kappa_misspecification(
    config: &SimulationConfig,
    columns: &[ErrorPair],
) -> Result<KappaMatrix> {
    if config.assumed_kappas.is_empty() {
        return Err(Error::InvalidConfig {
            key: "assumed_kappas",
            reason: "grid must not be empty".into(),
        });
    }
    if columns.is_empty() {
        return Err(Error::InvalidConfig {
            key: "columns",
            reason: "at least one true error pair is required".into(),
        });
    }
    let rows = config.assumed_kappas.len();
    let mut percent_bias = vec![vec![0.0; columns.len()]; rows];
    let mut failures = Vec::with_capacity(columns.len());

    for (j, pair) in columns.iter().enumerate() {
        let column_config = SimulationConfig {
            sigma_delta: pair.sigma_delta,
            sigma_tau: pair.sigma_tau,
            seed: derive_seed(config.seed, j as u64),
            ..config.clone()
        };
        column_config.validate()?;

        let slopes: Vec<Option<Vec<f64>>> = (0..config.replications as u64)
            .into_par_iter()
            .map(|i| {
                let stats = generate_sample(&column_config, i)
                    .and_then(|s| summarize(&s))
                    .ok()?;
                config
                    .assumed_kappas
                    .iter()
                    .map(|&k| mle(&stats, k).map(|f| f.beta1).ok())
                    .collect()
            })
            .collect();

        let usable: Vec<&Vec<f64>> = slopes.iter().flatten().collect();
        failures.push(config.replications - usable.len());
        for (row, cell) in percent_bias.iter_mut().enumerate() {
            let mean = usable.iter().map(|s| s[row]).sum::<f64>() / usable.len() as f64;
            cell[j] = 100.0 * (mean - config.beta1) / config.beta1;
        }
    }

    Ok(KappaMatrix {
        assumed_kappas: config.assumed_kappas.clone(),
        columns: columns.to_vec(),
        percent_bias,
        failures,
    })
}
