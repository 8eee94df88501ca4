//! Oblique-error fitting.
//!
//! An oblique error runs from a data point to the fitted line along a
//! direction that interpolates between the horizontal (`lambda = 0`) and the
//! vertical (`lambda = 1`) projection. With the intercept profiled out the
//! objective is
//!
//! ```text
//! SSE_o = ((1 - lambda)^2 Syy / b^2 + lambda^2 Sxx) (Syy - 2 b Sxy + b^2 Sxx)
//! ```
//!
//! and its stationary slopes are the real roots of a quartic `P4(b)`. Exactly
//! one root carries the sign of `Sxy`; it lies between the two OLS slopes and
//! is the global minimiser.
//!
//! Internally the quartic is solved in the dimensionless variable
//! `t = b sqrt(Sxx / Syy)`, where it becomes
//!
//! ```text
//! g(t) = lambda^2 t^3 (t - r) - (1 - lambda)^2 (1 - r t),   r = |rho|
//! ```
//!
//! with the root bracketed by `[r, 1/r]`. Working in `t` makes the solver
//! exactly equivariant under rescaling of either axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summary_stats::SummaryStats;

/// Relative tolerance on the root in `t`.
pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;

/// Slack under which `t - r` or `1 - r t` is treated as exactly zero, so that
/// the OLS endpoints themselves count as admissible.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObliqueSolution {
    pub lambda: f64,
    pub beta1: f64,
    pub beta0: f64,
    pub theta_deg: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

fn check_spreads(stats: &SummaryStats) -> Result<()> {
    if stats.sxx > 0.0 && stats.syy > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateStats("Sxx and Syy must be positive"))
    }
}

/// Oblique sum of squared errors for the line `y = beta0 + beta1 x`.
///
/// When `beta0 = y_bar - beta1 x_bar` this is the profiled objective; other
/// intercepts add the `n (y_bar - beta0 - beta1 x_bar)^2` offset term to the
/// vertical residual sum.
pub fn sse_oblique(beta0: f64, beta1: f64, lambda: f64, stats: &SummaryStats) -> Result<f64> {
    if beta1 == 0.0 || !beta1.is_finite() {
        return Err(Error::InvalidSlope(beta1));
    }
    check_lambda(lambda)?;
    let weight = (1.0 - lambda).powi(2) * stats.syy / (beta1 * beta1) + lambda * lambda * stats.sxx;
    Ok(weight * vertical_sse(beta0, beta1, stats))
}

/// The same objective with explicit error-variance weights:
/// `(1 - lambda)^2 SSE_h / sigma_delta_sq + lambda^2 SSE_v / sigma_tau_sq`.
pub fn sse_oblique_weighted(
    beta0: f64,
    beta1: f64,
    lambda: f64,
    stats: &SummaryStats,
    sigma_delta_sq: f64,
    sigma_tau_sq: f64,
) -> Result<f64> {
    if beta1 == 0.0 || !beta1.is_finite() {
        return Err(Error::InvalidSlope(beta1));
    }
    check_lambda(lambda)?;
    let sse_v = vertical_sse(beta0, beta1, stats);
    let sse_h = sse_v / (beta1 * beta1);
    Ok((1.0 - lambda).powi(2) * sse_h / sigma_delta_sq + lambda * lambda * sse_v / sigma_tau_sq)
}

fn vertical_sse(beta0: f64, beta1: f64, stats: &SummaryStats) -> f64 {
    let offset = stats.y_bar - beta0 - beta1 * stats.x_bar;
    let centered = stats.syy - 2.0 * beta1 * stats.sxy + beta1 * beta1 * stats.sxx;
    (centered + stats.n as f64 * offset * offset).max(0.0)
}

/// Evaluates the stationarity quartic `P4(beta1)` for obliqueness `lambda`.
pub fn p4_eval(beta1: f64, lambda: f64, stats: &SummaryStats) -> Result<f64> {
    check_spreads(stats)?;
    check_lambda(lambda)?;
    let q = stats.sxx / stats.syy;
    let rho = stats.rho;
    let l2 = lambda * lambda;
    let m2 = (1.0 - lambda).powi(2);
    Ok(
        l2 * q.sqrt() * q * beta1.powi(4) - l2 * q * rho * beta1.powi(3) + m2 * rho * beta1
            - m2 * q.recip().sqrt(),
    )
}

fn normalized_quartic(t: f64, lambda: f64, r: f64) -> f64 {
    lambda * lambda * t * t * t * (t - r) - (1.0 - lambda).powi(2) * (1.0 - r * t)
}

/// Brent's method on a bracket with `f(lo) <= 0 <= f(hi)` (or the reverse).
fn brent<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoConvergence { iterations: 0 });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol =
            2.0 * f64::EPSILON * b.abs() + 0.5 * ROOT_TOLERANCE * b.abs().max(f64::MIN_POSITIVE);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

/// The minimising oblique slope for a fixed `lambda`.
///
/// Negative `Sxy` is handled by reflecting `y`, solving on the positive
/// branch and negating the slope back. `lambda = 1` and `lambda = 0` return
/// the OLS(y|x) and OLS(x|y) slopes directly.
pub fn solve_slope_for_lambda(lambda: f64, stats: &SummaryStats) -> Result<ObliqueSolution> {
    check_lambda(lambda)?;
    check_spreads(stats)?;
    let sign = stats
        .sxy_sign()
        .ok_or(Error::DegenerateStats("Sxy must be nonzero"))?;

    let beta1 = if lambda == 1.0 {
        stats.sxy / stats.sxx
    } else if lambda == 0.0 {
        stats.syy / stats.sxy
    } else {
        let scale = (stats.sxx / stats.syy).sqrt();
        let r = stats.rho.abs();
        let t = if r >= 1.0 {
            1.0
        } else {
            brent(|t| normalized_quartic(t, lambda, r), r, r.recip())?
        };
        sign * t / scale
    };

    Ok(ObliqueSolution {
        lambda,
        beta1,
        beta0: stats.intercept(beta1),
        theta_deg: oblique_angle(lambda, beta1),
    })
}

/// Obliqueness `lambda` at which `beta1` is the minimising oblique slope.
///
/// Uses `lambda / (1 - lambda) = sqrt(T2 / T1)` with
/// `T1 = (Sxx/Syy) b^3 (sqrt(Sxx/Syy) b - rho)` and `T2 = sqrt(Syy/Sxx) - rho b`.
pub fn lambda_for_slope(beta1: f64, stats: &SummaryStats) -> Result<f64> {
    check_spreads(stats)?;
    let sign = stats
        .sxy_sign()
        .ok_or(Error::DegenerateStats("Sxy must be nonzero"))?;
    let out_of_range = || Error::OutOfRange {
        slope: beta1,
        lower: stats.sxy / stats.sxx,
        upper: stats.syy / stats.sxy,
    };
    if !beta1.is_finite() {
        return Err(out_of_range());
    }

    let t = sign * beta1 * (stats.sxx / stats.syy).sqrt();
    let r = stats.rho.abs();
    let mut above_ver = t - r;
    let mut below_hor = 1.0 - r * t;
    if above_ver < 0.0 && above_ver > -BOUNDARY_SLACK * r {
        above_ver = 0.0;
    }
    if below_hor < 0.0 && below_hor > -BOUNDARY_SLACK {
        below_hor = 0.0;
    }
    if t <= 0.0 || above_ver < 0.0 || below_hor < 0.0 {
        return Err(out_of_range());
    }

    let t1 = t * t * t * above_ver;
    let t2 = below_hor;
    match (t1 == 0.0, t2 == 0.0) {
        (true, true) => Err(Error::DegenerateStats(
            "collinear data: every lambda gives the same slope",
        )),
        (true, false) => Ok(1.0),
        (false, true) => Ok(0.0),
        (false, false) => {
            let odds = (t2 / t1).sqrt();
            Ok(odds / (1.0 + odds))
        }
    }
}

/// Obliqueness minimising the oblique objective for a fixed slope:
/// `Syy / (Syy + beta1^2 Sxx)`.
pub fn lambda_min_deviation(beta1: f64, stats: &SummaryStats) -> Result<f64> {
    let denom = stats.syy + beta1 * beta1 * stats.sxx;
    if stats.sxx + stats.syy <= 0.0 {
        return Err(Error::DegenerateStats("Sxx and Syy are both zero"));
    }
    if beta1.is_infinite() {
        return Ok(0.0);
    }
    Ok(stats.syy / denom)
}

/// Projection angle in degrees between the oblique error segment and the
/// fitted line.
///
/// `arccos[(lambda b^2 - (1 - lambda)) / (sqrt((1-lambda)^2 + lambda^2 b^2) sqrt(1 + b^2))]`
/// with `b = |beta1|`. A slope-one line measures 45 degrees under vertical
/// projection, 90 at `lambda = 1/2` and 135 under horizontal projection.
pub fn oblique_angle(lambda: f64, beta1: f64) -> f64 {
    let b = beta1.abs();
    let num = lambda * b * b - (1.0 - lambda);
    let den = ((1.0 - lambda).powi(2) + lambda * lambda * b * b).sqrt() * (1.0 + b * b).sqrt();
    (num / den).clamp(-1.0, 1.0).acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table4(syy: f64) -> SummaryStats {
        SummaryStats::from_correlation(1, 1.0, syy, 0.5, 10.0, 5.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sse_endpoints() {
        let s = table4(1.0);
        let b = 0.8;
        let resid = s.syy - 2.0 * b * s.sxy + b * b * s.sxx;
        let v = sse_oblique(s.intercept(b), b, 1.0, &s).unwrap();
        assert!(close(v, s.sxx * resid, 1e-15));
        let h = sse_oblique(s.intercept(b), b, 0.0, &s).unwrap();
        assert!(close(h, s.syy / (b * b) * resid, 1e-15));
        // 0.5 * (1 - 1 + 1)
        assert!(close(sse_oblique(0.0, 1.0, 0.5, &s).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn sse_rejects_zero_slope() {
        assert_eq!(
            sse_oblique(0.0, 0.0, 0.5, &table4(1.0)),
            Err(Error::InvalidSlope(0.0))
        );
    }

    #[test]
    fn p4_known_roots() {
        let s = SummaryStats::from_correlation(20, 2.0, 5.0, 0.3, 0.0, 0.0).unwrap();
        let gm = (s.syy / s.sxx).sqrt();
        assert!(p4_eval(gm, 0.5, &s).unwrap().abs() < 1e-12);
        assert!(p4_eval(s.sxy / s.sxx, 1.0, &s).unwrap().abs() < 1e-12);
        assert!(p4_eval(s.syy / s.sxy, 0.0, &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn p4_needs_spreads() {
        let s = SummaryStats::from_sums(5, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            p4_eval(1.0, 0.5, &s),
            Err(Error::DegenerateStats(_))
        ));
    }

    #[test]
    fn solver_anchors() {
        let s = table4(1.0);
        assert_eq!(solve_slope_for_lambda(1.0, &s).unwrap().beta1, 0.5);
        assert_eq!(solve_slope_for_lambda(0.0, &s).unwrap().beta1, 2.0);
        let gm = solve_slope_for_lambda(0.5, &s).unwrap();
        assert!(close(gm.beta1, 1.0, 1e-12));
        assert!(close(gm.theta_deg, 90.0, 1e-9));
    }

    #[test]
    fn solver_matches_frozen_grid_search() {
        // grid search of sse_oblique over [0.5, 2.0], step 1e-6, refined
        let s = table4(1.0);
        let sol = solve_slope_for_lambda(0.75, &s).unwrap();
        assert!(close(sol.beta1, 0.705_157_180_008_900_5, 1e-6));
        assert!(p4_eval(sol.beta1, 0.75, &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn negative_branch_by_reflection() {
        let s = SummaryStats::from_correlation(20, 1.0, 4.0, -0.4, 0.0, 0.0).unwrap();
        let pos = solve_slope_for_lambda(0.3, &s.reflect_y()).unwrap();
        let neg = solve_slope_for_lambda(0.3, &s).unwrap();
        assert_eq!(neg.beta1, -pos.beta1);
        assert!(neg.beta1 < 0.0);
        assert!(close(
            solve_slope_for_lambda(0.5, &s).unwrap().beta1,
            -2.0,
            1e-12
        ));
    }

    #[test]
    fn collinear_solution_is_the_common_slope() {
        let s = SummaryStats::from_correlation(5, 1.0, 4.0, 1.0, 0.0, 0.0).unwrap();
        assert!(close(
            solve_slope_for_lambda(0.3, &s).unwrap().beta1,
            2.0,
            1e-15
        ));
        assert!(lambda_for_slope(2.0, &s).is_err());
    }

    #[test]
    fn solver_preconditions() {
        let s = table4(1.0);
        assert_eq!(
            solve_slope_for_lambda(1.5, &s),
            Err(Error::InvalidLambda(1.5))
        );
        let flat = SummaryStats::from_sums(5, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            solve_slope_for_lambda(0.5, &flat),
            Err(Error::DegenerateStats(_))
        ));
    }

    #[test]
    fn lambda_for_slope_anchors() {
        let s = table4(1.0);
        assert!(close(lambda_for_slope(1.0, &s).unwrap(), 0.5, 1e-15));
        assert_eq!(lambda_for_slope(0.5, &s).unwrap(), 1.0);
        assert_eq!(lambda_for_slope(2.0, &s).unwrap(), 0.0);
        assert!(matches!(
            lambda_for_slope(2.5, &s),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            lambda_for_slope(-1.0, &s),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn lambda_for_likelihood_slope_at_unit_ratio() {
        // kappa = 1, rho = 0.4, Sxx = Syy: the likelihood slope is 1 and lambda 0.500
        let s = SummaryStats::from_correlation(100, 1.0, 1.0, 0.4, 0.0, 0.0).unwrap();
        assert!(close(lambda_for_slope(1.0, &s).unwrap(), 0.5, 5e-4));
    }

    #[test]
    fn min_deviation_lambda() {
        let sym = table4(1.0);
        assert!(close(lambda_min_deviation(1.0, &sym).unwrap(), 0.5, 1e-15));
        // 1 / (1 + 0.6417^2)
        assert!(close(
            lambda_min_deviation(0.6417, &sym).unwrap(),
            0.708_326_216_720_806_6,
            1e-12
        ));
        assert!(lambda_min_deviation(1e12, &sym).unwrap() < 1e-20);
        assert_eq!(lambda_min_deviation(f64::INFINITY, &sym).unwrap(), 0.0);
        let empty = SummaryStats::from_sums(3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(lambda_min_deviation(1.0, &empty).is_err());
    }

    #[test]
    fn angle_anchors() {
        assert!(close(oblique_angle(1.0, 1.0), 45.0, 1e-12));
        assert!(close(oblique_angle(0.0, 1.0), 135.0, 1e-12));
        assert!(close(oblique_angle(0.5, 1.0), 90.0, 1e-12));
        // closed form; reference table lists 108.27 for this pair
        assert!(close(
            oblique_angle(0.339, 0.99170),
            108.280_761_316_192_14,
            1e-9
        ));
        assert!(close(oblique_angle(0.339, 0.99170), 108.27, 0.1));
        assert_eq!(oblique_angle(0.2, -1.3), oblique_angle(0.2, 1.3));
    }
}
