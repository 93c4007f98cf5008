//! l1 global sensitivities and data-invariant output bounds.
//!
//! Sample variance and covariance use the `n − 1` denominator throughout;
//! the variance upper bound `n(c1 − c0)²/(4(n − 1))` is attained only with
//! that convention.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::mechanisms::Bounds;
use crate::pipelines::Interval;

/// Global bounds `[c0, c1]` of one attribute.
pub type AttributeBounds = Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatisticKind {
    Proportion,
    Mean,
    Variance,
    Covariance,
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatisticKind::Proportion => "proportion",
            StatisticKind::Mean => "mean",
            StatisticKind::Variance => "variance",
            StatisticKind::Covariance => "covariance",
        })
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proportion" => Ok(StatisticKind::Proportion),
            "mean" => Ok(StatisticKind::Mean),
            "variance" => Ok(StatisticKind::Variance),
            "covariance" => Ok(StatisticKind::Covariance),
            other => Err(invalid(format!("unknown statistic '{other}'"))),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(invalid(format!("sample size must be at least 2, got {n}")))
    } else {
        Ok(())
    }
}

/// l1 global sensitivity `δ1` of `kind` computed on `n` records.
///
/// * proportion: `1/n`
/// * mean: `(c1 − c0)/n`
/// * variance: `(c1 − c0)²/n`
/// * covariance: `(c11 − c10)(c21 − c20)/n`
pub fn gs_catalog(kind: StatisticKind, n: usize, bounds: &[AttributeBounds]) -> Result<f64> {
    check_n(n)?;
    let n = n as f64;
    let need = |k: usize| -> Result<()> {
        if bounds.len() < k {
            Err(invalid(format!("{kind} needs {k} attribute bound(s), got {}", bounds.len())))
        } else {
            Ok(())
        }
    };
    match kind {
        StatisticKind::Proportion => Ok(1.0 / n),
        StatisticKind::Mean => {
            need(1)?;
            Ok(bounds[0].width() / n)
        }
        StatisticKind::Variance => {
            need(1)?;
            Ok(bounds[0].width().powi(2) / n)
        }
        StatisticKind::Covariance => {
            need(2)?;
            Ok(bounds[0].width() * bounds[1].width() / n)
        }
    }
}

/// `[0, n(c1 − c0)²/(4(n − 1))]`, the range of a sample variance.
pub fn variance_output_bounds(n: usize, bounds: AttributeBounds) -> Result<Bounds> {
    check_n(n)?;
    let n = n as f64;
    Bounds::new(0.0, n * bounds.width().powi(2) / (4.0 * (n - 1.0)))
}

/// `[−√(S11·S22), √(S11·S22)]` (Cauchy–Schwarz). May be the single point 0.
pub fn covariance_output_bounds(s11: f64, s22: f64) -> Result<Interval> {
    if !(s11 >= 0.0 && s22 >= 0.0) || !s11.is_finite() || !s22.is_finite() {
        return Err(invalid(format!("variances must be finite and >= 0, got {s11}, {s22}")));
    }
    let half = (s11 * s22).sqrt();
    Ok(Interval::new(-half, half))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with denominator `n − 1`.
pub fn sample_variance(xs: &[f64]) -> f64 {
    sample_covariance(xs, xs)
}

/// Sample covariance with denominator `n − 1`.
pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "paired samples must have equal length");
    let (mx, my) = (mean(xs), mean(ys));
    let sum: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    sum / (xs.len() as f64 - 1.0)
}
