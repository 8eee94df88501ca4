//! Moment estimates of the two error variances implied by a candidate slope.
//!
//! For a slope `b` the second-moment equations give
//!
//! ```text
//! sigma_delta^2 = Sxx/n - Sxy/(n b)      (x error)
//! sigma_tau^2   = Syy/n - b Sxy/n        (y error)
//! ```
//!
//! Both are nonnegative exactly on the admissible interval between the two
//! OLS slopes. Their ratio `kappa~(b)` fed back into the likelihood slope
//! returns `b` itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{self, Method};
use crate::summary_stats::SummaryStats;

/// Relative size, against `(Sxx + Syy)/n`, below which a variance estimate
/// counts as exactly zero.
pub const ADMISSIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorVarianceEstimates {
    pub sigma_delta_sq: f64,
    pub sigma_tau_sq: f64,
    /// `sigma_tau_sq / sigma_delta_sq`; `+inf` when only the x-variance
    /// vanishes, NaN when both do.
    pub kappa_tilde: f64,
    pub admissible: bool,
}

impl ErrorVarianceEstimates {
    fn from_parts(sigma_delta_sq: f64, sigma_tau_sq: f64) -> Self {
        ErrorVarianceEstimates {
            sigma_delta_sq,
            sigma_tau_sq,
            kappa_tilde: ratio(sigma_tau_sq, sigma_delta_sq),
            admissible: sigma_delta_sq >= 0.0 && sigma_tau_sq >= 0.0,
        }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    match (num == 0.0, den == 0.0) {
        (true, true) => f64::NAN,
        (true, false) => 0.0,
        (false, true) if num > 0.0 => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (false, false) => num / den,
    }
}

fn snap(value: f64, scale: f64) -> f64 {
    if value.abs() <= ADMISSIBILITY_SLACK * scale {
        0.0
    } else {
        value
    }
}

pub fn madansky_variances(beta1: f64, stats: &SummaryStats) -> Result<ErrorVarianceEstimates> {
    if beta1 == 0.0 || !beta1.is_finite() {
        return Err(Error::InvalidSlope(beta1));
    }
    if stats.n == 0 {
        return Err(Error::DegenerateStats("n must be positive"));
    }
    let n = stats.n as f64;
    let scale = (stats.sxx + stats.syy) / n;
    let delta = snap(stats.sxx / n - stats.sxy / (n * beta1), scale);
    let tau = snap(stats.syy / n - beta1 * stats.sxy / n, scale);
    Ok(ErrorVarianceEstimates::from_parts(delta, tau))
}

/// Moment estimate of the error-variance ratio at slope `beta1`:
/// `(Syy - b rho sqrt(Sxx Syy)) / (Sxx - (rho/b) sqrt(Sxx Syy))`.
///
/// Returns 0 at OLS(x|y) and `+inf` at OLS(y|x).
pub fn kappa_tilde(beta1: f64, stats: &SummaryStats) -> Result<f64> {
    if beta1 == 0.0 || !beta1.is_finite() {
        return Err(Error::InvalidSlope(beta1));
    }
    let cross = stats.rho * (stats.sxx * stats.syy).sqrt();
    let scale = stats.sxx + stats.syy;
    let num = snap(stats.syy - beta1 * cross, scale);
    let den = snap(stats.sxx - cross / beta1, scale);
    if num < 0.0 || den < 0.0 {
        return Err(Error::OutOfRange {
            slope: beta1,
            lower: stats.sxy / stats.sxx,
            upper: stats.syy / stats.sxy,
        });
    }
    Ok(ratio(num, den))
}

/// Likelihood slope evaluated at the moment ratio of `beta1`; equals `beta1`
/// on the admissible interval.
pub fn mle_circularity(beta1: f64, stats: &SummaryStats) -> Result<f64> {
    let kappa = kappa_tilde(beta1, stats)?;
    if kappa.is_nan() {
        return Err(Error::DegenerateStats("collinear data: ratio undefined"));
    }
    Ok(estimators::mle(stats, kappa)?.beta1)
}

/// Closed-form variance estimates for the OLS, geometric mean,
/// perpendicular and likelihood slopes.
pub fn table3_row(
    method: Method,
    stats: &SummaryStats,
    kappa: Option<f64>,
) -> Result<ErrorVarianceEstimates> {
    if stats.sxx <= 0.0 || stats.syy <= 0.0 {
        return Err(Error::DegenerateStats("Sxx and Syy must be positive"));
    }
    let n = stats.n as f64;
    let (sxx, syy, rho) = (stats.sxx, stats.syy, stats.rho);
    let r2 = rho * rho;
    let row = match method {
        Method::Ver => ErrorVarianceEstimates {
            sigma_delta_sq: 0.0,
            sigma_tau_sq: (1.0 - r2) * syy / n,
            kappa_tilde: f64::INFINITY,
            admissible: true,
        },
        Method::Hor => ErrorVarianceEstimates {
            sigma_delta_sq: (1.0 - r2) * sxx / n,
            sigma_tau_sq: 0.0,
            kappa_tilde: 0.0,
            admissible: true,
        },
        Method::Gm => ErrorVarianceEstimates {
            sigma_delta_sq: (1.0 - rho.abs()) * sxx / n,
            sigma_tau_sq: (1.0 - rho.abs()) * syy / n,
            kappa_tilde: syy / sxx,
            admissible: true,
        },
        Method::Per => {
            let v = 0.5 * (sxx + syy - ((sxx - syy).powi(2) + 4.0 * r2 * sxx * syy).sqrt()) / n;
            ErrorVarianceEstimates {
                sigma_delta_sq: v,
                sigma_tau_sq: v,
                kappa_tilde: 1.0,
                admissible: true,
            }
        }
        Method::Mle => {
            let k = kappa.ok_or(Error::InvalidKappa(f64::NAN))?;
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidKappa(k));
            }
            let sk = syy / k;
            let delta = 0.5 * (sxx + sk - ((sxx - sk).powi(2) + 4.0 * r2 * sxx * sk).sqrt()) / n;
            let tau = 0.5
                * (k * sxx + syy - ((k * sxx - syy).powi(2) + 4.0 * r2 * k * sxx * syy).sqrt())
                / n;
            ErrorVarianceEstimates {
                sigma_delta_sq: delta,
                sigma_tau_sq: tau,
                kappa_tilde: k,
                admissible: true,
            }
        }
        other => return Err(Error::NoClosedForm(other)),
    };
    Ok(row)
}
