//! Noise mechanisms for bounded statistics.
//!
//! Three Laplace variants share the scale `λ = δ1/ε`:
//!
//! * plain Laplace: `s* = s + e`, `e ~ Lap(0, λ)`, unbounded support;
//! * truncated Laplace: the Laplace density conditioned on `[c0, c1]` and
//!   renormalized by `Z = 1 − ½e^{−(c1−s)/λ} − ½e^{−(s−c0)/λ}`;
//! * BIT (boundary-inflated-truncated) Laplace: a Laplace draw clamped to
//!   `[c0, c1]`, so the out-of-bounds mass sits on the two boundaries.
//!
//! The discrete Exponential mechanism and the analytic Gaussian σ bound are
//! provided for comparison.
//!
//! The bounds passed here must be data-invariant. Strict validation rejects a
//! statistic outside its bounds instead of clamping it.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::normal::standard_normal_quantile;

/// Closed interval `[lower, upper]` with `lower < upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    lower: f64,
    upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) {
            return Err(invalid(format!("bounds must be finite, got [{lower}, {upper}]")));
        }
        if lower >= upper {
            return Err(invalid(format!("bounds need lower < upper, got [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    fn check_location(&self, s: f64) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(invalid(format!(
                "location {s} outside bounds [{}, {}]",
                self.lower, self.upper
            )))
        }
    }
}

/// Laplace scale `λ`, always finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LaplaceScale(f64);

impl LaplaceScale {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(Self(lambda))
        } else {
            Err(invalid(format!("Laplace scale must be finite and > 0, got {lambda}")))
        }
    }

    /// `λ = δ1 / ε`.
    pub fn from_budget(sensitivity: f64, epsilon: f64) -> Result<Self> {
        check_positive("sensitivity", sensitivity)?;
        check_positive("epsilon", epsilon)?;
        Self::new(sensitivity / epsilon)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A statistic together with its global bounds and l1 sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedStatistic {
    pub value: f64,
    pub bounds: Bounds,
    pub sensitivity: f64,
}

impl BoundedStatistic {
    pub fn new(value: f64, bounds: Bounds, sensitivity: f64) -> Result<Self> {
        bounds.check_location(value)?;
        check_positive("sensitivity", sensitivity)?;
        Ok(Self { value, bounds, sensitivity })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    Laplace,
    Truncated,
    Bit,
}

impl MechanismKind {
    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Laplace => "laplace",
            MechanismKind::Truncated => "trunc",
            MechanismKind::Bit => "bit",
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "laplace" | "plain" => Ok(MechanismKind::Laplace),
            "trunc" | "truncated" => Ok(MechanismKind::Truncated),
            "bit" => Ok(MechanismKind::Bit),
            other => Err(invalid(format!("unknown mechanism '{other}'"))),
        }
    }
}

/// The two mechanisms that respect bounds; used by the pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundedMechanism {
    Truncated,
    Bit,
}

impl BoundedMechanism {
    pub fn name(self) -> &'static str {
        MechanismKind::from(self).name()
    }
}

impl From<BoundedMechanism> for MechanismKind {
    fn from(m: BoundedMechanism) -> Self {
        match m {
            BoundedMechanism::Truncated => MechanismKind::Truncated,
            BoundedMechanism::Bit => MechanismKind::Bit,
        }
    }
}

impl fmt::Display for BoundedMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundedMechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<MechanismKind>()? {
            MechanismKind::Truncated => Ok(BoundedMechanism::Truncated),
            MechanismKind::Bit => Ok(BoundedMechanism::Bit),
            MechanismKind::Laplace => Err(invalid("plain Laplace does not respect bounds")),
        }
    }
}

/// A released value and how it was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SanitizedValue {
    pub value: f64,
    pub mechanism: MechanismKind,
    pub scale: LaplaceScale,
    pub bounds: Option<Bounds>,
    /// The release sits exactly on `c0` or `c1` (only possible for BIT).
    pub at_boundary: bool,
}

/// Sanitizes `stat` at budget `epsilon` with the chosen mechanism.
pub fn sanitize<R: Rng + ?Sized>(
    stat: &BoundedStatistic,
    epsilon: f64,
    mechanism: MechanismKind,
    rng: &mut R,
) -> Result<SanitizedValue> {
    let scale = LaplaceScale::from_budget(stat.sensitivity, epsilon)?;
    let (value, bounds) = match mechanism {
        MechanismKind::Laplace => (laplace_sanitize(stat.value, scale, rng), None),
        MechanismKind::Truncated => (
            trunc_laplace_sample(stat.value, scale, stat.bounds, rng)?,
            Some(stat.bounds),
        ),
        MechanismKind::Bit => (
            bit_laplace_sample(stat.value, scale, stat.bounds, rng)?,
            Some(stat.bounds),
        ),
    };
    let at_boundary = mechanism == MechanismKind::Bit
        && (value == stat.bounds.lower() || value == stat.bounds.upper());
    Ok(SanitizedValue { value, mechanism, scale, bounds, at_boundary })
}

/// Tail geometry of `Lap(s, λ)` relative to `[c0, c1]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tails {
    /// `expm1(−(s−c0)/λ)`
    pub em1_lower: f64,
    /// `expm1(−(c1−s)/λ)`
    pub em1_upper: f64,
}

impl Tails {
    pub fn new(s: f64, scale: LaplaceScale, bounds: Bounds) -> Self {
        let lambda = scale.value();
        Self {
            em1_lower: (-(s - bounds.lower()) / lambda).exp_m1(),
            em1_upper: (-(bounds.upper() - s) / lambda).exp_m1(),
        }
    }

    /// `P(Y < c0) = ½e^{−(s−c0)/λ}`
    pub fn lower_mass(&self) -> f64 {
        0.5 * (1.0 + self.em1_lower)
    }

    /// `P(Y > c1) = ½e^{−(c1−s)/λ}`
    pub fn upper_mass(&self) -> f64 {
        0.5 * (1.0 + self.em1_upper)
    }

    /// Normalizer `Z = P(c0 ≤ Y ≤ c1)`, computed without cancellation.
    pub fn normalizer(&self) -> f64 {
        -0.5 * (self.em1_lower + self.em1_upper)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn standard_laplace<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    if u < 0.5 {
        (2.0 * u).ln()
    } else {
        -(2.0 * (1.0 - u)).ln()
    }
}

/// Plain Laplace mechanism: `s + Lap(0, λ)`.
pub fn laplace_sanitize<R: Rng + ?Sized>(s: f64, scale: LaplaceScale, rng: &mut R) -> f64 {
    s + scale.value() * standard_laplace(rng)
}

/// Density of the truncated Laplace distribution at `x ∈ [c0, c1]`.
pub fn trunc_laplace_pdf(x: f64, s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    bounds.check_location(s)?;
    if !bounds.contains(x) {
        return Err(Error::Domain { x, lower: bounds.lower(), upper: bounds.upper() });
    }
    let lambda = scale.value();
    let z = Tails::new(s, scale, bounds).normalizer();
    Ok((-(x - s).abs() / lambda).exp() / (2.0 * lambda * z))
}

/// CDF of the truncated Laplace distribution; 0 below `c0`, 1 above `c1`.
pub fn trunc_laplace_cdf(x: f64, s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<f64> {
    bounds.check_location(s)?;
    if x <= bounds.lower() {
        return Ok(0.0);
    }
    if x >= bounds.upper() {
        return Ok(1.0);
    }
    let lambda = scale.value();
    let tails = Tails::new(s, scale, bounds);
    // Laplace mass on [c0, x].
    let mass = if x < s {
        0.5 * (((x - s) / lambda).exp() - (1.0 + tails.em1_lower))
    } else {
        -0.5 * (((s - x) / lambda).exp_m1() + tails.em1_lower)
    };
    Ok((mass / tails.normalizer()).clamp(0.0, 1.0))
}

/// Exact draw from the truncated Laplace distribution by inverse CDF.
///
/// `u ~ Uniform(F(c0), F(c1))` is mapped through the Laplace quantile. The
/// arithmetic is carried in `expm1`/`ln_1p` form so that very large and very
/// small `λ` keep full precision.
pub fn trunc_laplace_sample<R: Rng + ?Sized>(
    s: f64,
    scale: LaplaceScale,
    bounds: Bounds,
    rng: &mut R,
) -> Result<f64> {
    bounds.check_location(s)?;
    let lambda = scale.value();
    let tails = Tails::new(s, scale, bounds);
    let z = tails.normalizer();
    let v: f64 = rng.random();
    // 2u − 1 where u = F(c0) + v·Z
    let lower_arg = tails.em1_lower + 2.0 * v * z;
    let x = if lower_arg < 0.0 {
        s + lambda * lower_arg.ln_1p()
    } else {
        // 2(1 − u) − 1 = e^{−(c1−s)/λ} − 1 + 2(1 − v)Z
        let upper_arg = tails.em1_upper + 2.0 * (1.0 - v) * z;
        s - lambda * upper_arg.ln_1p()
    };
    Ok(x.clamp(bounds.lower(), bounds.upper()))
}

/// Draw from the BIT Laplace distribution: a Laplace draw clamped to the bounds.
pub fn bit_laplace_sample<R: Rng + ?Sized>(
    s: f64,
    scale: LaplaceScale,
    bounds: Bounds,
    rng: &mut R,
) -> Result<f64> {
    bounds.check_location(s)?;
    Ok(laplace_sanitize(s, scale, rng).clamp(bounds.lower(), bounds.upper()))
}

/// Point masses `(p0, p1)` of the BIT distribution at `c0` and `c1`.
pub fn bit_boundary_masses(s: f64, scale: LaplaceScale, bounds: Bounds) -> Result<(f64, f64)> {
    bounds.check_location(s)?;
    let tails = Tails::new(s, scale, bounds);
    Ok((tails.lower_mass(), tails.upper_mass()))
}

/// Utility of one candidate for the Exponential mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Utility {
    Score(f64),
    /// Illegitimate candidate; selected with probability exactly 0.
    OutOfBounds,
}

/// Selection probabilities `∝ exp(u·ε/(2δu))` of the discrete Exponential mechanism.
pub fn exponential_mechanism_probabilities(
    utilities: &[Utility],
    utility_sensitivity: f64,
    epsilon: f64,
) -> Result<Vec<f64>> {
    check_positive("utility sensitivity", utility_sensitivity)?;
    check_positive("epsilon", epsilon)?;
    if utilities.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = f64::NEG_INFINITY;
    for u in utilities {
        if let Utility::Score(score) = *u {
            if !score.is_finite() {
                return Err(invalid(format!("utility scores must be finite, got {score}")));
            }
            best = best.max(score);
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::AllOutOfBounds);
    }
    let factor = epsilon / (2.0 * utility_sensitivity);
    let weights: Vec<f64> = utilities
        .iter()
        .map(|u| match *u {
            Utility::Score(score) => ((score - best) * factor).exp(),
            Utility::OutOfBounds => 0.0,
        })
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Discrete Exponential mechanism.
pub fn exponential_mechanism_discrete<'a, T, R: Rng + ?Sized>(
    candidates: &'a [T],
    utilities: &[Utility],
    utility_sensitivity: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<&'a T> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if candidates.len() != utilities.len() {
        return Err(invalid(format!(
            "{} candidates but {} utilities",
            candidates.len(),
            utilities.len()
        )));
    }
    let probs = exponential_mechanism_probabilities(utilities, utility_sensitivity, epsilon)?;
    let target: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_legal = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        last_legal = i;
        acc += p;
        if target < acc {
            return Ok(&candidates[i]);
        }
    }
    // Rounding left `acc` a hair below 1.
    Ok(&candidates[last_legal])
}

/// Smallest Gaussian σ giving (ε, δ)-probabilistic DP for a scalar statistic:
/// `(2ε)⁻¹ δ1 (√(Φ⁻¹(δ/2)² + 2ε) − Φ⁻¹(δ/2))`.
pub fn gaussian_sigma_lower_bound(sensitivity: f64, epsilon: f64, delta: f64) -> Result<f64> {
    check_positive("sensitivity", sensitivity)?;
    check_positive("epsilon", epsilon)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let q = standard_normal_quantile(delta / 2.0);
    Ok(sensitivity / (2.0 * epsilon) * ((q * q + 2.0 * epsilon).sqrt() - q))
}
