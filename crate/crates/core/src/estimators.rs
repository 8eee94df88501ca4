//! Named slope estimators.
//!
//! Every estimator consumes [`SummaryStats`] and returns a [`SlopeFit`] whose
//! intercept passes the line through the centroid. Where the slope lies in
//! the admissible interval between the two OLS slopes, the fit also carries
//! the obliqueness `lambda` that reproduces it and the matching projection
//! angle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement_error::kappa_tilde;
use crate::oblique::{
    lambda_for_slope, lambda_min_deviation, oblique_angle, solve_slope_for_lambda,
};
use crate::summary_stats::SummaryStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// OLS(y|x)
    Ver,
    /// OLS(x|y)
    Hor,
    /// Geometric mean (reduced major axis)
    Gm,
    /// Perpendicular (orthogonal) regression
    Per,
    /// Known-ratio likelihood (Deming) slope
    Mle,
    Copas,
    /// Unclamped fourth-moment slope
    MomRaw,
    /// Fourth-moment slope clamped to the admissible interval
    Mom,
    /// Minimum deviation
    Md,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Ver,
        Method::Hor,
        Method::Gm,
        Method::Per,
        Method::Mle,
        Method::Copas,
        Method::MomRaw,
        Method::Mom,
        Method::Md,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Ver => "VER",
            Method::Hor => "HOR",
            Method::Gm => "GM",
            Method::Per => "PER",
            Method::Mle => "MLE",
            Method::Copas => "COPAS",
            Method::MomRaw => "MOM_RAW",
            Method::Mom => "MOM",
            Method::Md => "MD",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.tag() == upper)
            .ok_or_else(|| format!("unknown estimator `{}`", s.trim()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitNote {
    /// Copas rule met `Syy = Sxx`; the geometric mean was used.
    Tie,
    /// Fourth-moment radicand was negative; the geometric mean was used.
    FallbackGm,
    ClampedLow,
    ClampedHigh,
}

impl FitNote {
    pub fn tag(self) -> &'static str {
        match self {
            FitNote::Tie => "TIE",
            FitNote::FallbackGm => "FALLBACK_GM",
            FitNote::ClampedLow => "CLAMPED_LOW",
            FitNote::ClampedHigh => "CLAMPED_HIGH",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub method: Method,
    pub beta1: f64,
    pub beta0: f64,
    /// `None` when the slope has no obliqueness (collinear or degenerate data).
    pub lambda: Option<f64>,
    pub theta_deg: Option<f64>,
    pub notes: Vec<FitNote>,
}

impl SlopeFit {
    fn new(method: Method, beta1: f64, stats: &SummaryStats) -> Self {
        SlopeFit {
            method,
            beta1,
            beta0: stats.intercept(beta1),
            lambda: None,
            theta_deg: None,
            notes: Vec::new(),
        }
    }

    fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        // a zero slope under vertical projection has no angle
        self.theta_deg = Some(oblique_angle(lambda, self.beta1)).filter(|t| t.is_finite());
        self
    }

    /// Attaches the obliqueness recovered from the slope, if there is one.
    fn with_recovered_lambda(self, stats: &SummaryStats) -> Self {
        match lambda_for_slope(self.beta1, stats) {
            Ok(lambda) => self.with_lambda(lambda),
            Err(_) => self,
        }
    }

    fn noted(mut self, note: FitNote) -> Self {
        self.notes.push(note);
        self
    }

    pub fn has_note(&self, note: FitNote) -> bool {
        self.notes.contains(&note)
    }
}

fn require_spreads(stats: &SummaryStats) -> Result<()> {
    if stats.sxx > 0.0 && stats.syy > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateStats("Sxx and Syy must be positive"))
    }
}

pub fn ols_vertical(stats: &SummaryStats) -> Result<SlopeFit> {
    if stats.sxx <= 0.0 {
        return Err(Error::DegenerateStats("Sxx must be positive"));
    }
    let fit = SlopeFit::new(Method::Ver, stats.sxy / stats.sxx, stats);
    if stats.is_collinear() {
        Ok(fit)
    } else {
        Ok(fit.with_lambda(1.0))
    }
}

pub fn ols_horizontal(stats: &SummaryStats) -> Result<SlopeFit> {
    if stats.sxy_is_zero() {
        return Err(Error::HorizontalUndefined);
    }
    let fit = SlopeFit::new(Method::Hor, stats.syy / stats.sxy, stats);
    if stats.is_collinear() {
        Ok(fit)
    } else {
        Ok(fit.with_lambda(0.0))
    }
}

pub fn geometric_mean(stats: &SummaryStats) -> Result<SlopeFit> {
    require_spreads(stats)?;
    let sign = stats.sxy_sign().ok_or(Error::SignAmbiguous)?;
    let fit = SlopeFit::new(Method::Gm, sign * (stats.syy / stats.sxx).sqrt(), stats);
    if stats.is_collinear() {
        Ok(fit)
    } else {
        Ok(fit.with_lambda(0.5))
    }
}

/// Perpendicular-distance slope, the root of
/// `Sxy b^2 - (Syy - Sxx) b - Sxy = 0` that carries the sign of `Sxy`.
pub fn perpendicular(stats: &SummaryStats) -> Result<SlopeFit> {
    let sign = stats.sxy_sign().ok_or(Error::HorizontalUndefined)?;
    let d = stats.syy - stats.sxx;
    let c = stats.sxy.abs();
    let r = (d * d + 4.0 * c * c).sqrt();
    // rationalised branch avoids cancellation when Syy < Sxx
    let magnitude = if d >= 0.0 {
        (d + r) / (2.0 * c)
    } else {
        2.0 * c / (r - d)
    };
    Ok(SlopeFit::new(Method::Per, sign * magnitude, stats).with_recovered_lambda(stats))
}

/// Copas rule on the centered spreads: OLS(y|x) when `Syy < Sxx`, OLS(x|y)
/// when `Syy > Sxx`, geometric mean on a tie.
///
/// The rule is sometimes quoted with uncentered sums of squares; this
/// implementation compares the centered ones, i.e. `|b_gm|` against 1.
pub fn copas(stats: &SummaryStats) -> Result<SlopeFit> {
    require_spreads(stats)?;
    let mut fit = if stats.syy < stats.sxx {
        ols_vertical(stats)?
    } else if stats.syy > stats.sxx {
        ols_horizontal(stats)?
    } else {
        geometric_mean(stats)?.noted(FitNote::Tie)
    };
    fit.method = Method::Copas;
    Ok(fit)
}

/// Fourth-moment slope from the per-observation cross moments
///
/// ```text
/// b~^2 = (m_xyyy - 3 m_xy m_yy) / (m_xxxy - 3 m_xy m_xx),   m_.. = S_.. / n
/// ```
///
/// signed like `Sxy`. A negative radicand falls back to the geometric mean.
pub fn moment_raw(stats: &SummaryStats) -> Result<SlopeFit> {
    let n = stats.n as f64;
    let numerator = n * stats.sxyyy - 3.0 * stats.sxy * stats.syy;
    let denominator = n * stats.sxxxy - 3.0 * stats.sxy * stats.sxx;
    if denominator == 0.0 {
        return Err(Error::DenominatorZero);
    }
    let sign = stats.sxy_sign().ok_or(Error::SignAmbiguous)?;
    let radicand = numerator / denominator;
    if radicand < 0.0 {
        let mut fit = geometric_mean(stats)?.noted(FitNote::FallbackGm);
        fit.method = Method::MomRaw;
        return Ok(fit);
    }
    Ok(SlopeFit::new(Method::MomRaw, sign * radicand.sqrt(), stats).with_recovered_lambda(stats))
}

/// [`moment_raw`] clamped in magnitude to `[|b_ver|, |b_hor|]`.
pub fn moment_clamped(stats: &SummaryStats) -> Result<SlopeFit> {
    require_spreads(stats)?;
    let raw = moment_raw(stats)?;
    let ver = stats.sxy / stats.sxx;
    let hor = stats.syy / stats.sxy;
    let (low, high) = (ver.abs().min(hor.abs()), ver.abs().max(hor.abs()));
    let magnitude = raw.beta1.abs();

    let (beta1, note) = if magnitude < low {
        (ver, Some(FitNote::ClampedLow))
    } else if magnitude > high {
        (hor, Some(FitNote::ClampedHigh))
    } else {
        (raw.beta1, None)
    };
    let mut fit = SlopeFit::new(Method::Mom, beta1, stats);
    fit.notes = raw.notes;
    fit.notes.extend(note);
    if stats.is_collinear() {
        return Ok(fit);
    }
    Ok(match note {
        Some(FitNote::ClampedLow) => fit.with_lambda(1.0),
        Some(_) => fit.with_lambda(0.0),
        None => fit.with_recovered_lambda(stats),
    })
}

/// Likelihood slope for an assumed error-variance ratio
/// `kappa = sigma_tau^2 / sigma_delta^2`.
///
/// `kappa = 0` gives OLS(x|y) and `kappa = +inf` gives OLS(y|x), the limits
/// of the closed form. The slope follows the sign of `rho`.
pub fn mle(stats: &SummaryStats, kappa: f64) -> Result<SlopeFit> {
    require_spreads(stats)?;
    if kappa.is_nan() || kappa < 0.0 {
        return Err(Error::InvalidKappa(kappa));
    }
    if stats.rho == 0.0 || stats.sxy_is_zero() {
        return Err(Error::RhoZero);
    }
    let beta1 = if kappa.is_infinite() {
        stats.sxy / stats.sxx
    } else {
        let root_sxx_syy = (stats.sxx * stats.syy).sqrt();
        let a = stats.syy - kappa * stats.sxx;
        let b = 4.0 * kappa * stats.rho * stats.rho * stats.sxx * stats.syy;
        let disc = (a * a + b).sqrt();
        let numerator = if a >= 0.0 { a + disc } else { b / (disc - a) };
        numerator / (2.0 * stats.rho * root_sxx_syy)
    };
    let fit = SlopeFit::new(Method::Mle, beta1, stats);
    Ok(if kappa.is_infinite() {
        fit.with_lambda(1.0)
    } else if kappa == 0.0 {
        fit.with_lambda(0.0)
    } else {
        fit.with_recovered_lambda(stats)
    })
}

/// Minimum deviation slope: the oblique root at the `lambda` that minimises
/// the oblique objective for the clamped fourth-moment slope.
pub fn minimum_deviation(stats: &SummaryStats) -> Result<SlopeFit> {
    let mom = moment_clamped(stats)?;
    if stats.is_collinear() {
        let mut fit = SlopeFit::new(Method::Md, stats.sxy / stats.sxx, stats);
        fit.notes = mom.notes;
        return Ok(fit);
    }
    let lambda = lambda_min_deviation(mom.beta1, stats)?;
    let solution = solve_slope_for_lambda(lambda, stats)?;
    let mut fit = SlopeFit::new(Method::Md, solution.beta1, stats).with_lambda(lambda);
    fit.notes = mom.notes;
    Ok(fit)
}

/// Outcome of one estimator inside [`estimate_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    pub result: Result<SlopeFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    pub outcomes: Vec<MethodOutcome>,
    /// Ratio used for the MLE row: the assumed one, or the moment estimate at
    /// the clamped fourth-moment slope.
    pub mle_kappa: Option<f64>,
}

impl EstimateSet {
    pub fn get(&self, method: Method) -> Option<&Result<SlopeFit>> {
        self.outcomes
            .iter()
            .find(|o| o.method == method)
            .map(|o| &o.result)
    }

    pub fn fit(&self, method: Method) -> Option<&SlopeFit> {
        self.get(method).and_then(|r| r.as_ref().ok())
    }

    pub fn fits(&self) -> impl Iterator<Item = &SlopeFit> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().ok())
    }
}

/// Runs every estimator, keeping per-method failures instead of aborting.
///
/// The MLE row uses `assumed_kappa` when given; otherwise the moment ratio
/// at the clamped fourth-moment slope, and is omitted when that ratio cannot
/// be formed.
pub fn estimate_all(stats: &SummaryStats, assumed_kappa: Option<f64>) -> EstimateSet {
    estimate_selected(stats, &Method::ALL, assumed_kappa)
}

pub fn estimate_selected(
    stats: &SummaryStats,
    methods: &[Method],
    assumed_kappa: Option<f64>,
) -> EstimateSet {
    let mut outcomes = Vec::with_capacity(methods.len());
    let mut mle_kappa = assumed_kappa;
    for &method in methods {
        let result = match method {
            Method::Ver => ols_vertical(stats),
            Method::Hor => ols_horizontal(stats),
            Method::Gm => geometric_mean(stats),
            Method::Per => perpendicular(stats),
            Method::Copas => copas(stats),
            Method::MomRaw => moment_raw(stats),
            Method::Mom => moment_clamped(stats),
            Method::Md => minimum_deviation(stats),
            Method::Mle => match assumed_kappa {
                Some(kappa) => mle(stats, kappa),
                None => {
                    let kappa = moment_clamped(stats).and_then(|m| kappa_tilde(m.beta1, stats));
                    match kappa {
                        Ok(k) if !k.is_nan() => {
                            mle_kappa = Some(k);
                            mle(stats, k)
                        }
                        _ => continue,
                    }
                }
            },
        };
        outcomes.push(MethodOutcome { method, result });
    }
    EstimateSet {
        outcomes,
        mle_kappa,
    }
}
