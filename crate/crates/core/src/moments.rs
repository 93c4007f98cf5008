//! Closed-form moments of truncated and BIT Laplace releases.
//!
//! Notation: `d0 = s − c0`, `d1 = c1 − s`, `e0 = e^{−d0/λ}`, `e1 = e^{−d1/λ}`
//! and `Z = 1 − ½e0 − ½e1`. Every exponential has a non-positive argument, so
//! tiny `λ` underflows to 0 instead of overflowing.
//!
//! Variances are computed from moments about `s` rather than as
//! `E(s*²) − μ²`; the latter loses every significant digit once `2λ²` drops
//! below the rounding error of `s²`.

use crate::error::{Error, Result};
use crate::mechanisms::{Bounds, LaplaceScale, Tails};

#[derive(Debug, Clone, Copy)]
struct Geometry {
    c0: f64,
    c1: f64,
    lambda: f64,
    d0: f64,
    d1: f64,
    e0: f64,
    e1: f64,
    z: f64,
}

impl Geometry {
    fn new(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<Self> {
        if !bounds.contains(s) {
            return Err(Error::InvalidParameter(format!(
                "location {s} outside bounds [{}, {}]",
                bounds.lower(),
                bounds.upper()
            )));
        }
        let lambda = scale.value();
        let tails = Tails::new(s, scale, bounds);
        Ok(Self {
            c0: bounds.lower(),
            c1: bounds.upper(),
            lambda,
            d0: s - bounds.lower(),
            d1: bounds.upper() - s,
            e0: 1.0 + tails.em1_lower,
            e1: 1.0 + tails.em1_upper,
            z: tails.normalizer(),
        })
    }

    fn trunc_bias(&self) -> f64 {
        let l = self.lambda;
        (0.5 * (l + self.d0) * self.e0 - 0.5 * (l + self.d1) * self.e1) / self.z
    }

    fn bit_bias(&self) -> f64 {
        0.5 * self.lambda * (self.e0 - self.e1)
    }

    /// `E[(s* − s)²]` under truncation.
    fn trunc_central2(&self) -> f64 {
        let l = self.lambda;
        let lower = 2.0 * l * l + 2.0 * l * self.d0 + self.d0 * self.d0;
        let upper = 2.0 * l * l + 2.0 * l * self.d1 + self.d1 * self.d1;
        (2.0 * l * l - 0.5 * lower * self.e0 - 0.5 * upper * self.e1) / self.z
    }

    /// `E[(s* − s)²]` under BIT.
    fn bit_central2(&self) -> f64 {
        let l = self.lambda;
        2.0 * l * l - (l * l + l * self.d0) * self.e0 - (l * l + l * self.d1) * self.e1
    }
}

/// `μ1 = E(s*)` for the truncated Laplace mechanism.
pub fn trunc_mean(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    let g = Geometry::new(s, scale, bounds)?;
    Ok(s + g.trunc_bias())
}

/// `μ2 = E(s*) = s + (λ/2)(e0 − e1)` for the BIT Laplace mechanism.
pub fn bit_mean(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    let g = Geometry::new(s, scale, bounds)?;
    Ok(s + g.bit_bias())
}

/// `E(s*²)` for the truncated mechanism:
/// `Z⁻¹[2λ² + s² − ½(2λ² − 2λc0 + c0²)e0 − ½(2λ² + 2λc1 + c1²)e1]`.
pub fn trunc_second_moment(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    let g = Geometry::new(s, scale, bounds)?;
    let l = g.lambda;
    let lower = 2.0 * l * l - 2.0 * l * g.c0 + g.c0 * g.c0;
    let upper = 2.0 * l * l + 2.0 * l * g.c1 + g.c1 * g.c1;
    Ok((2.0 * l * l + s * s - 0.5 * lower * g.e0 - 0.5 * upper * g.e1) / g.z)
}

/// `E(s*²)` for BIT: `2λ² + s² − (λ² − λc0)e0 − (λ² + λc1)e1`.
pub fn bit_second_moment(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    let g = Geometry::new(s, scale, bounds)?;
    let l = g.lambda;
    Ok(2.0 * l * l + s * s - (l * l - l * g.c0) * g.e0 - (l * l + l * g.c1) * g.e1)
}

pub fn trunc_variance(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    let g = Geometry::new(s, scale, bounds)?;
    let bias = g.trunc_bias();
    Ok((g.trunc_central2() - bias * bias).max(0.0))
}

pub fn bit_variance(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    let g = Geometry::new(s, scale, bounds)?;
    let bias = g.bit_bias();
    Ok((g.bit_central2() - bias * bias).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub s: f64,
    pub lambda: f64,
    pub mu_trunc: f64,
    pub mu_bit: f64,
    pub m2_trunc: f64,
    pub m2_bit: f64,
    pub bias_trunc: f64,
    pub bias_bit: f64,
    pub var_trunc: f64,
    pub var_bit: f64,
    /// Both tail terms underflowed to zero; the biases are exactly 0.
    pub tails_underflow: bool,
}

impl MomentReport {
    pub fn new(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<Self> {
        let g = Geometry::new(s, scale, bounds)?;
        let bias_trunc = g.trunc_bias();
        let bias_bit = g.bit_bias();
        Ok(Self {
            s,
            lambda: g.lambda,
            mu_trunc: s + bias_trunc,
            mu_bit: s + bias_bit,
            m2_trunc: trunc_second_moment(s, scale, bounds)?,
            m2_bit: bit_second_moment(s, scale, bounds)?,
            bias_trunc,
            bias_bit,
            var_trunc: (g.trunc_central2() - bias_trunc * bias_trunc).max(0.0),
            var_bit: (g.bit_central2() - bias_bit * bias_bit).max(0.0),
            tails_underflow: g.e0 == 0.0 && g.e1 == 0.0,
        })
    }
}

/// Computes the moment report and checks that BIT is never more biased than
/// truncation and that both biases point the same way.
///
/// Comparisons allow a few ulps of rounding relative to the problem scale.
pub fn bias_order_check(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<MomentReport> {
    let report = MomentReport::new(s, scale, bounds)?;
    let tol = 16.0 * f64::EPSILON * (scale.value() + bounds.width());
    let (bt, bb) = (report.bias_trunc, report.bias_bit);
    if bt.abs() + tol < bb.abs() {
        return Err(Error::PropertyViolation(format!(
            "|bias_trunc| = {} < |bias_bit| = {} at s={s}, λ={}",
            bt.abs(),
            bb.abs(),
            scale.value()
        )));
    }
    if bt * bb < 0.0 && bt.abs().min(bb.abs()) > tol {
        return Err(Error::PropertyViolation(format!(
            "biases disagree in sign: trunc {bt}, bit {bb} at s={s}, λ={}",
            scale.value()
        )));
    }
    Ok(report)
}
