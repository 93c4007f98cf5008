//! End-to-end sanitizers: a 2x2 covariance matrix, a 4-category proportion
//! vector, and multiple synthesis of the proportion vector.

use rand::Rng;

use crate::accountant::{allocate_equal, BudgetLedger, Composition};
use crate::error::{invalid, Error, Result};
use crate::mechanisms::{sanitize, BoundedMechanism, BoundedStatistic, Bounds};
use crate::normal::standard_normal_quantile;
use crate::sensitivity::{
    covariance_output_bounds, gs_catalog, variance_output_bounds, AttributeBounds, StatisticKind,
};

pub const CATEGORIES: usize = 4;

/// Closed interval with `lower ≤ upper`; unlike [`Bounds`] it may be a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "interval [{lower}, {upper}] is reversed");
        Self { lower, upper }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn clip(self, lower: f64, upper: f64) -> Self {
        Self::new(self.lower.clamp(lower, upper), self.upper.clamp(lower, upper))
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix2 {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
}

impl CovMatrix2 {
    pub fn new(s11: f64, s22: f64, s12: f64) -> Result<Self> {
        if !(s11 >= 0.0 && s22 >= 0.0 && s12.is_finite() && s11.is_finite() && s22.is_finite()) {
            return Err(invalid(format!("bad covariance matrix ({s11}, {s22}, {s12})")));
        }
        // Allow a few ulps so matrices built from (S11, S22, r) with |r| = 1 pass.
        if s12 * s12 > s11 * s22 * (1.0 + 4.0 * f64::EPSILON) {
            return Err(invalid(format!("S12² > S11·S22 for ({s11}, {s22}, {s12})")));
        }
        Ok(Self { s11, s22, s12 })
    }

    /// Builds the matrix from variances and a correlation.
    pub fn from_correlation(s11: f64, s22: f64, r: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&r) {
            return Err(invalid(format!("correlation {r} outside [-1, 1]")));
        }
        Self::new(s11, s22, r * (s11 * s22).sqrt())
    }

    /// `S12/√(S11·S22)`, undefined when either variance is 0.
    pub fn correlation(&self) -> Option<f64> {
        let denom = (self.s11 * self.s22).sqrt();
        (denom > 0.0).then(|| (self.s12 / denom).clamp(-1.0, 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovRelease {
    pub matrix: CovMatrix2,
    /// `None` when a sanitized variance is exactly 0.
    pub correlation: Option<f64>,
    /// S12 was fixed at 0 because its interval collapsed to a point.
    pub s12_degenerate: bool,
    pub ledger: BudgetLedger,
}

/// Sanitizes `S` with an equal three-way split of `epsilon`.
///
/// Order is fixed: S11, then S22 on `[0, n(c1 − c0)²/(4(n − 1))]`, then S12 on
/// `[−√(S11*·S22*), √(S11*·S22*)]`. The S12 interval is built from released
/// values, so it costs nothing extra. The original S12 is clamped into that
/// interval before noise is added; clamping is 1-Lipschitz, so the covariance
/// sensitivity still holds. When the interval is the single point 0 the
/// release is 0 with no noise drawn.
pub fn sanitize_covariance<R: Rng + ?Sized>(
    s: CovMatrix2,
    n: usize,
    bounds: [AttributeBounds; 2],
    epsilon: f64,
    mechanism: BoundedMechanism,
    rng: &mut R,
) -> Result<CovRelease> {
    let shares = allocate_equal(epsilon, 3)?;
    let mut ledger = BudgetLedger::new(epsilon)?;

    let mut variances = [0.0; 2];
    for (i, (value, b)) in [s.s11, s.s22].into_iter().zip(bounds).enumerate() {
        let range = variance_output_bounds(n, b)?;
        if !range.contains(value) {
            return Err(invalid(format!(
                "S{0}{0} = {value} outside [0, {1}]",
                i + 1,
                range.upper()
            )));
        }
        let stat = BoundedStatistic::new(value, range, gs_catalog(StatisticKind::Variance, n, &[b])?)?;
        variances[i] = sanitize(&stat, shares[i], mechanism.into(), rng)?.value;
        ledger.spend(&format!("S{0}{0}", i + 1), shares[i], Composition::Sequential)?;
    }

    let interval = covariance_output_bounds(variances[0], variances[1])?;
    let s12_degenerate = interval.width() <= 0.0;
    let s12 = if s12_degenerate {
        0.0
    } else {
        let range = Bounds::new(interval.lower, interval.upper)?;
        let value = s.s12.clamp(range.lower(), range.upper());
        let stat = BoundedStatistic::new(value, range, gs_catalog(StatisticKind::Covariance, n, &bounds)?)?;
        sanitize(&stat, shares[2], mechanism.into(), rng)?.value
    };
    ledger.spend("S12", shares[2], Composition::Sequential)?;

    let matrix = CovMatrix2::new(variances[0], variances[1], s12)?;
    Ok(CovRelease { correlation: matrix.correlation(), matrix, s12_degenerate, ledger })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionVector {
    p: [f64; CATEGORIES],
}

impl ProportionVector {
    pub fn new(p: [f64; CATEGORIES]) -> Result<Self> {
        if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid(format!("proportions must lie in [0, 1]: {p:?}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("proportions sum to {sum}, not 1")));
        }
        Ok(Self { p })
    }

    pub fn from_counts(counts: [u64; CATEGORIES]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(invalid("counts sum to 0"));
        }
        Self::new(counts.map(|c| c as f64 / n as f64))
    }

    pub fn as_array(&self) -> [f64; CATEGORIES] {
        self.p
    }
}

impl std::ops::Index<usize> for ProportionVector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.p[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionRelease {
    pub proportions: ProportionVector,
    /// Sanitized proportions before renormalization.
    pub raw: [f64; CATEGORIES],
    pub ledger: BudgetLedger,
}

/// Sanitizes each sample proportion on `[0, 1]` with `δ1 = 1/n` and the full
/// budget (the categories are disjoint), then renormalizes to sum to 1.
pub fn sanitize_proportions<R: Rng + ?Sized>(
    counts: [u64; CATEGORIES],
    epsilon: f64,
    mechanism: BoundedMechanism,
    rng: &mut R,
) -> Result<ProportionRelease> {
    let n: u64 = counts.iter().sum();
    let p_hat = ProportionVector::from_counts(counts)?;
    // Proportion entry of the sensitivity catalog; valid for n = 1 as well.
    let sensitivity = 1.0 / n as f64;
    let unit = Bounds::new(0.0, 1.0)?;

    let mut ledger = BudgetLedger::new(epsilon)?;
    for k in 0..CATEGORIES {
        ledger.spend(&format!("p{}", k + 1), epsilon, Composition::Parallel("categories".into()))?;
    }

    // One redraw when every category lands on 0.
    for _ in 0..2 {
        let mut raw = [0.0; CATEGORIES];
        for k in 0..CATEGORIES {
            let stat = BoundedStatistic::new(p_hat[k], unit, sensitivity)?;
            raw[k] = sanitize(&stat, epsilon, mechanism.into(), rng)?.value;
        }
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            let proportions = ProportionVector::new(raw.map(|q| q / total))?;
            return Ok(ProportionRelease { proportions, raw, ledger });
        }
    }
    Err(Error::DegenerateNormalization)
}

/// Multiple-synthesis release of a proportion vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisBundle {
    pub m: usize,
    pub n: u64,
    pub estimates: Vec<ProportionVector>,
    /// Mean of the `m` estimates.
    pub combined: [f64; CATEGORIES],
    /// `W̄`: mean within-set sampling variance `p̂*(1 − p̂*)/n`.
    pub within: [f64; CATEGORIES],
    /// `B`: between-set variance (0 when `m = 1`).
    pub between: [f64; CATEGORIES],
    /// `T = W̄ + (1 + 1/m)B`.
    pub variance: [f64; CATEGORIES],
    pub ledger: BudgetLedger,
}

impl SynthesisBundle {
    /// Normal-reference CI for each category, clipped to `[0, 1]`.
    pub fn confidence_intervals(&self, level: f64) -> Result<[Interval; CATEGORIES]> {
        let mut out = [Interval::new(0.0, 0.0); CATEGORIES];
        for k in 0..CATEGORIES {
            out[k] = normal_ci(self.combined[k], self.variance[k], level)?.clip(0.0, 1.0);
        }
        Ok(out)
    }
}

/// Releases `m` independently sanitized copies, each at `ε/m`, and combines
/// them with `T = W̄ + (1 + 1/m)B`.
pub fn multiple_synthesis<R: Rng + ?Sized>(
    counts: [u64; CATEGORIES],
    epsilon: f64,
    m: usize,
    mechanism: BoundedMechanism,
    rng: &mut R,
) -> Result<SynthesisBundle> {
    let shares = allocate_equal(epsilon, m)?;
    let n: u64 = counts.iter().sum();
    let mut ledger = BudgetLedger::new(epsilon)?;
    let mut estimates = Vec::with_capacity(m);
    for (j, share) in shares.iter().enumerate() {
        let release = sanitize_proportions(counts, *share, mechanism, rng)?;
        for entry in release.ledger.entries() {
            let group = format!("set{}", j + 1);
            ledger.spend(&format!("set{}/{}", j + 1, entry.label), *share, Composition::Parallel(group))?;
        }
        estimates.push(release.proportions);
    }

    let mf = m as f64;
    let mut combined = [0.0; CATEGORIES];
    let mut within = [0.0; CATEGORIES];
    let mut between = [0.0; CATEGORIES];
    let mut variance = [0.0; CATEGORIES];
    for k in 0..CATEGORIES {
        let mean = estimates.iter().map(|e| e[k]).sum::<f64>() / mf;
        combined[k] = mean;
        within[k] = estimates.iter().map(|e| e[k] * (1.0 - e[k]) / n as f64).sum::<f64>() / mf;
        between[k] = if m > 1 {
            estimates.iter().map(|e| (e[k] - mean).powi(2)).sum::<f64>() / (mf - 1.0)
        } else {
            0.0
        };
        variance[k] = within[k] + (1.0 + 1.0 / mf) * between[k];
    }
    Ok(SynthesisBundle { m, n, estimates, combined, within, between, variance, ledger })
}

fn z_value(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!("confidence level must lie in (0, 1), got {level}")));
    }
    Ok(standard_normal_quantile(0.5 + 0.5 * level))
}

/// `center ± z·√variance`.
pub fn normal_ci(center: f64, variance: f64, level: f64) -> Result<Interval> {
    if !(variance >= 0.0) {
        return Err(invalid(format!("variance must be >= 0, got {variance}")));
    }
    let half = z_value(level)? * variance.sqrt();
    Ok(Interval::new(center - half, center + half))
}

/// Wald interval `p ± z·√(p(1 − p)/n)` clipped to `[0, 1]`.
pub fn wald_ci(p: f64, n: u64, level: f64) -> Result<Interval> {
    if !(0.0..=1.0).contains(&p) || n == 0 {
        return Err(invalid(format!("need p in [0, 1] and n > 0, got p={p}, n={n}")));
    }
    Ok(normal_ci(p, p * (1.0 - p) / n as f64, level)?.clip(0.0, 1.0))
}
