//! Sufficient statistics of a paired sample.
//!
//! Every estimator in this crate works from [`SummaryStats`] alone. The
//! centered sums are accumulated in two passes (means first) so that the
//! fourth-order cross sums do not suffer from raw-moment cancellation.

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Paired observations `(x_i, y_i)`, at least three of them, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PairedSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DegenerateSample(format!(
                "length mismatch: {} x-values vs {} y-values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 3 {
            return Err(Error::DegenerateSample(format!(
                "need at least 3 pairs, got {}",
                xs.len()
            )));
        }
        if let Some(i) = xs
            .iter()
            .zip(&ys)
            .position(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::DegenerateSample(format!(
                "non-finite value in pair {}",
                i
            )));
        }
        Ok(PairedSample { xs, ys })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (xs, ys) = pairs.iter().copied().unzip();
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub x_bar: f64,
    pub y_bar: f64,
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
    /// `Sxy / sqrt(Sxx * Syy)`, or 0 when either spread vanishes.
    pub rho: f64,
    /// `sum (x - x_bar)^3 (y - y_bar)`
    pub sxxxy: f64,
    /// `sum (x - x_bar) (y - y_bar)^3`
    pub sxyyy: f64,
}

/// Relative slack allowed on `Sxy^2 <= Sxx * Syy` for externally supplied sums.
const CAUCHY_SCHWARZ_SLACK: f64 = 1e-12;

impl SummaryStats {
    /// Builds statistics from already-centered sums, e.g. a published summary.
    ///
    /// `n` may be 1 when the sums are per-observation moments.
    #[allow(clippy::too_many_arguments)]
    pub fn from_sums(
        n: usize,
        x_bar: f64,
        y_bar: f64,
        sxx: f64,
        syy: f64,
        sxy: f64,
        sxxxy: f64,
        sxyyy: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateStats("n must be positive"));
        }
        let all = [x_bar, y_bar, sxx, syy, sxy, sxxxy, sxyyy];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateStats("non-finite summary value"));
        }
        if sxx < 0.0 || syy < 0.0 {
            return Err(Error::DegenerateStats("negative sum of squares"));
        }
        let bound = sxx * syy;
        if sxy * sxy > bound * (1.0 + CAUCHY_SCHWARZ_SLACK) {
            return Err(Error::DegenerateStats("Sxy^2 exceeds Sxx*Syy"));
        }
        let rho = if bound > 0.0 {
            (sxy / bound.sqrt()).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        Ok(SummaryStats {
            n,
            x_bar,
            y_bar,
            sxx,
            syy,
            sxy,
            rho,
            sxxxy,
            sxyyy,
        })
    }

    /// Builds centered statistics (zero means) from spreads and a correlation.
    pub fn from_correlation(
        n: usize,
        sxx: f64,
        syy: f64,
        rho: f64,
        sxxxy: f64,
        sxyyy: f64,
    ) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::DegenerateStats("correlation outside [-1, 1]"));
        }
        let sxy = rho * (sxx * syy).sqrt();
        let mut stats = Self::from_sums(n, 0.0, 0.0, sxx, syy, sxy, sxxxy, sxyyy)?;
        stats.rho = rho;
        Ok(stats)
    }

    /// Statistics of the sample with `y` negated: flips the sign of every
    /// odd-in-`y` quantity.
    pub fn reflect_y(&self) -> Self {
        SummaryStats {
            y_bar: -self.y_bar,
            sxy: -self.sxy,
            rho: -self.rho,
            sxxxy: -self.sxxxy,
            sxyyy: -self.sxyyy,
            ..*self
        }
    }

    /// Intercept of the line with slope `beta1` through the centroid.
    pub fn intercept(&self, beta1: f64) -> f64 {
        self.y_bar - beta1 * self.x_bar
    }

    /// `Sxy` is zero up to rounding relative to `sqrt(Sxx * Syy)`.
    pub fn sxy_is_zero(&self) -> bool {
        let scale = (self.sxx * self.syy).sqrt();
        self.sxy == 0.0 || self.sxy.abs() <= 64.0 * f64::EPSILON * scale
    }

    /// `+1` or `-1` following `Sxy`; `None` when `Sxy` vanishes.
    pub fn sxy_sign(&self) -> Option<f64> {
        if self.sxy_is_zero() {
            None
        } else {
            Some(self.sxy.signum())
        }
    }

    pub fn is_collinear(&self) -> bool {
        self.sxx > 0.0 && self.syy > 0.0 && 1.0 - self.rho.abs() <= 1e-12
    }
}

/// Computes means, centered second-order sums and the two fourth-order
/// cross sums of `sample`.
pub fn summarize(sample: &PairedSample) -> Result<SummaryStats> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::DegenerateSample(format!(
            "need at least 3 pairs, got {}",
            n
        )));
    }
    let nf = n as f64;
    let x_bar = sample.xs.iter().sum::<f64>() / nf;
    let y_bar = sample.ys.iter().sum::<f64>() / nf;

    let (mut sxx, mut syy, mut sxy, mut sxxxy, mut sxyyy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in sample.xs.iter().zip(&sample.ys) {
        let dx = x - x_bar;
        let dy = y - y_bar;
        let dxdy = dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dxdy;
        sxxxy += dxdy * dx * dx;
        sxyyy += dxdy * dy * dy;
    }

    let bound = sxx * syy;
    let rho = if bound > 0.0 {
        (sxy / bound.sqrt()).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    Ok(SummaryStats {
        n,
        x_bar,
        y_bar,
        sxx,
        syy,
        sxy,
        rho,
        sxxxy,
        sxyyy,
    })
}

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
    pub struct Diagnostics: u8 {
        /// `Sxy = 0`: OLS(x|y) and every sign-following slope are undefined.
        const HORIZONTAL_UNDEFINED = 1;
        /// `|rho| = 1`: every estimator returns the same exact fit.
        const COLLINEAR = 1 << 1;
        const NO_X_VARIATION = 1 << 2;
        const NO_Y_VARIATION = 1 << 3;
    }
}

impl Diagnostics {
    /// Flags that leave no estimator computable.
    pub fn is_degenerate(self) -> bool {
        self.intersects(
            Diagnostics::NO_X_VARIATION
                | Diagnostics::NO_Y_VARIATION
                | Diagnostics::HORIZONTAL_UNDEFINED,
        )
    }

    pub fn names(self) -> Vec<&'static str> {
        self.iter_names().map(|(name, _)| name).collect()
    }
}

pub fn validate(stats: &SummaryStats) -> Diagnostics {
    let mut flags = Diagnostics::empty();
    if stats.sxx <= 0.0 {
        flags |= Diagnostics::NO_X_VARIATION;
    }
    if stats.syy <= 0.0 {
        flags |= Diagnostics::NO_Y_VARIATION;
    }
    if stats.sxy_is_zero() {
        flags |= Diagnostics::HORIZONTAL_UNDEFINED;
    }
    if stats.is_collinear() {
        flags |= Diagnostics::COLLINEAR;
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats_of(xs: &[f64], ys: &[f64]) -> SummaryStats {
        summarize(&PairedSample::new(xs.to_vec(), ys.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn identity_data() {
        let s = stats_of(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert_eq!((s.sxx, s.syy, s.sxy), (2.0, 2.0, 2.0));
        assert_eq!(s.rho, 1.0);
    }

    #[test]
    fn reflected_data() {
        let s = stats_of(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]);
        assert_eq!(s.sxy, -2.0);
        assert_eq!(s.rho, -1.0);
    }

    #[test]
    fn hand_computed_four_points() {
        let s = stats_of(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 1.0, 2.0]);
        assert_eq!(s.sxx, 5.0);
        assert_eq!(s.syy, 2.0);
        assert_eq!(s.sxy, 3.0);
        assert!((s.rho - 3.0 / 10f64.sqrt()).abs() < 1e-15);
        // (-1.5)^3(-1) + 1.5^3(1) and (-1.5)(-1)^3 + 1.5(1)^3
        assert_eq!(s.sxxxy, 6.75);
        assert_eq!(s.sxyyy, 3.0);
    }

    #[test]
    fn rejects_short_or_non_finite_samples() {
        assert!(matches!(
            PairedSample::new(vec![1.0, 2.0], vec![1.0, 2.0]),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            PairedSample::new(vec![1.0, f64::NAN, 3.0], vec![1.0, 2.0, 3.0]),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            PairedSample::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0]),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn flags() {
        let flat = stats_of(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]);
        assert!(validate(&flat).contains(Diagnostics::HORIZONTAL_UNDEFINED));

        let line = stats_of(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert_eq!(validate(&line), Diagnostics::COLLINEAR);

        let vertical = stats_of(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]);
        let f = validate(&vertical);
        assert!(f.contains(Diagnostics::NO_X_VARIATION));
        assert!(f.is_degenerate());
    }

    #[test]
    fn from_sums_rejects_impossible_correlation() {
        assert!(SummaryStats::from_sums(10, 0.0, 0.0, 1.0, 1.0, 1.5, 0.0, 0.0).is_err());
        assert!(SummaryStats::from_sums(10, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn reflection_flips_odd_terms() {
        let s = stats_of(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 1.0, 2.0]);
        let r = s.reflect_y();
        assert_eq!(r.sxy, -s.sxy);
        assert_eq!(r.syy, s.syy);
        assert_eq!(r.sxyyy, -s.sxyyy);
        assert_eq!(r.reflect_y(), s);
    }
}
