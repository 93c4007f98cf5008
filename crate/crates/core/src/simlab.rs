//! Simulation lab for the covariance study and the proportion studies.
//!
//! * `cov`: a fixed 2x2 covariance matrix is sanitized `reps` times per cell.
//! * `prop`: `reps` multinomial data sets are drawn per sample size and each
//!   is sanitized once per (ε, mechanism).
//! * `prop-ms`: as `prop`, but each release is a multiple synthesis of `m` sets.
//!
//! Every cell draws from a stream keyed by its own parameters, and replicate
//! `r` uses block `r` of that stream, so a cell reproduces exactly whether it
//! runs alone or alongside others. Replicates run on the rayon pool; rows are
//! collected in key order, never completion order.
//!
//! A replicate with no defined release is written as `NA` and left out of the
//! summaries: r* when a sanitized variance is 0, and a proportion release
//! whose renormalization failed on both attempts.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::mechanisms::{BoundedMechanism, Bounds};
use crate::pipelines::{
    multiple_synthesis, sanitize_covariance, sanitize_proportions, wald_ci, CovMatrix2,
    ProportionVector, CATEGORIES,
};
use crate::rng::RandomStream;

/// Confidence level of every interval the lab reports.
pub const CI_LEVEL: f64 = 0.95;

/// True category probabilities of the proportion studies.
pub const TRUE_P: [f64; CATEGORIES] = [0.1, 0.2, 0.3, 0.4];

/// Label used for the unsanitized baseline rows.
pub const ORIGINAL: &str = "original";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Study {
    Cov,
    Prop,
    PropMs,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Cov => "cov",
            Study::Prop => "prop",
            Study::PropMs => "prop-ms",
        }
    }

    fn is_prop(self) -> bool {
        matches!(self, Study::Prop | Study::PropMs)
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Study {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cov" => Ok(Study::Cov),
            "prop" => Ok(Study::Prop),
            "prop-ms" => Ok(Study::PropMs),
            other => Err(Error::Config(format!("unknown study '{other}'"))),
        }
    }
}

/// One specification of the covariance study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovSpec {
    pub id: usize,
    pub s11: f64,
    pub s22: f64,
    pub r: f64,
    pub bounds: [Bounds; 2],
}

impl CovSpec {
    pub fn get(id: usize) -> Result<Self> {
        let b = |lo, hi| Bounds::new(lo, hi).expect("static bounds");
        let (s11, s22, r, second) = match id {
            1 => (1.0, 1.0, 0.0, b(-3.0, 3.0)),
            2 => (1.0, 2.0, -0.4, b(-4.5, 4.5)),
            3 => (1.0, 2.0, 0.7, b(-4.5, 4.5)),
            other => return Err(Error::Config(format!("covariance spec must be 1, 2 or 3, got {other}"))),
        };
        Ok(Self { id, s11, s22, r, bounds: [b(-3.0, 3.0), second] })
    }

    pub fn matrix(&self) -> CovMatrix2 {
        CovMatrix2::from_correlation(self.s11, self.s22, self.r).expect("static spec is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub study: Study,
    pub specs: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub mechanisms: Vec<BoundedMechanism>,
    pub reps: usize,
    pub m: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl SimConfig {
    pub fn defaults(study: Study) -> Self {
        let (specs, n_grid, epsilons) = match study {
            Study::Cov => (vec![1, 2, 3], vec![50, 100, 200, 400, 800], vec![1.0]),
            Study::Prop | Study::PropMs => {
                (vec![1], vec![50, 100, 200, 300, 400, 500], vec![0.1, 0.5, 1.0])
            }
        };
        Self {
            study,
            specs,
            n_grid,
            epsilons,
            mechanisms: vec![BoundedMechanism::Truncated, BoundedMechanism::Bit],
            reps: 500,
            m: 5,
            seed: 2017,
            out_dir: None,
        }
    }

    /// Applies one `key=value` setting; the keys mirror the CLI flags.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "spec" => self.specs = parse_list(key, value)?,
            "n" => self.n_grid = parse_list(key, value)?,
            "eps" => self.epsilons = parse_list(key, value)?,
            "mech" => self.mechanisms = parse_list(key, value)?,
            "reps" => self.reps = parse_one(key, value)?,
            "m" => self.m = parse_one(key, value)?,
            "seed" => self.seed = parse_one(key, value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a config file of `key=value` lines. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            self.apply(key, value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.reps < 1 {
            return fail("reps must be at least 1".into());
        }
        if self.m < 1 {
            return fail("m must be at least 1".into());
        }
        if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n < 2) {
            return fail(format!("n grid must be nonempty with every n >= 2: {:?}", self.n_grid));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("n grid must be strictly increasing: {:?}", self.n_grid));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return fail(format!("eps values must be finite and > 0: {:?}", self.epsilons));
        }
        if self.mechanisms.is_empty() {
            return fail("at least one mechanism is required".into());
        }
        if self.specs.is_empty() {
            return fail("at least one spec is required".into());
        }
        for &id in &self.specs {
            match self.study {
                Study::Cov => {
                    CovSpec::get(id)?;
                }
                Study::Prop | Study::PropMs if id != 1 => {
                    return fail(format!("proportion studies have a single spec (1), got {id}"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value for {key}: '{value}'")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').filter(|v| !v.trim().is_empty()).map(|v| parse_one(key, v)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub study: Study,
    pub spec: usize,
    pub n: usize,
    pub eps: f64,
    pub mechanism: &'static str,
    pub rep: usize,
    pub stat: &'static str,
    pub original: f64,
    /// NaN when the statistic is undefined for this replicate.
    pub sanitized: f64,
    pub category: Option<usize>,
    pub truth: Option<f64>,
    pub covered: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub study: Study,
    pub spec: usize,
    pub n: usize,
    pub eps: f64,
    pub mechanism: &'static str,
    pub stat: &'static str,
    /// Mean of the original values across replicates.
    pub original: f64,
    pub mean: f64,
    pub q025: f64,
    pub q25: f64,
    pub q75: f64,
    pub q975: f64,
    /// Measured against `truth` when present, otherwise against `original`.
    pub bias: f64,
    pub rmse: f64,
    /// Replicates with a defined sanitized value.
    pub count: usize,
    pub category: Option<usize>,
    pub truth: Option<f64>,
    pub cp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub config: SimConfig,
    pub replicates: Vec<ReplicateRow>,
    pub summaries: Vec<SummaryRow>,
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let h = (len - 1) as f64 * q;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(len - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

type GroupKey = (Study, usize, usize, u64, &'static str, &'static str, Option<usize>);

/// Groups replicate rows by cell and statistic and reduces each group.
///
/// Groups appear in the order of their first row. Undefined (NaN) sanitized
/// values are left out of every summary quantity except `original`.
pub fn summarize(rows: &[ReplicateRow]) -> Vec<SummaryRow> {
    let mut order: Vec<GroupKey> = Vec::new();
    let mut groups: HashMap<GroupKey, Vec<&ReplicateRow>> = HashMap::new();
    for row in rows {
        let key = (row.study, row.spec, row.n, row.eps.to_bits(), row.mechanism, row.stat, row.category);
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(row);
    }
    order
        .into_iter()
        .map(|key| {
            let group = &groups[&key];
            let first = group[0];
            let original = group.iter().map(|r| r.original).sum::<f64>() / group.len() as f64;
            let target = first.truth.unwrap_or(first.original);
            let mut values: Vec<f64> =
                group.iter().map(|r| r.sanitized).filter(|v| !v.is_nan()).collect();
            values.sort_by(f64::total_cmp);
            let k = values.len() as f64;
            let mean = values.iter().sum::<f64>() / k;
            let mse = values.iter().map(|v| (v - target).powi(2)).sum::<f64>() / k;
            let covered: Vec<bool> = group.iter().filter_map(|r| r.covered).collect();
            let cp = (!covered.is_empty())
                .then(|| covered.iter().filter(|c| **c).count() as f64 / covered.len() as f64);
            SummaryRow {
                study: first.study,
                spec: first.spec,
                n: first.n,
                eps: first.eps,
                mechanism: first.mechanism,
                stat: first.stat,
                original,
                mean,
                q025: quantile_sorted(&values, 0.025),
                q25: quantile_sorted(&values, 0.25),
                q75: quantile_sorted(&values, 0.75),
                q975: quantile_sorted(&values, 0.975),
                bias: mean - target,
                rmse: mse.sqrt(),
                count: values.len(),
                category: first.category,
                truth: first.truth,
                cp,
            }
        })
        .collect()
}

/// Multinomial draw by sequential conditional binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(
    n: u64,
    p: &[f64; CATEGORIES],
    rng: &mut R,
) -> Result<[u64; CATEGORIES]> {
    let mut counts = [0u64; CATEGORIES];
    let mut left = n;
    let mut mass = 1.0;
    for k in 0..CATEGORIES - 1 {
        if left == 0 {
            break;
        }
        let prob = (p[k] / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(left, prob).map_err(|e| invalid(e.to_string()))?.sample(rng);
        counts[k] = draw;
        left -= draw;
        mass -= p[k];
    }
    counts[CATEGORIES - 1] = left;
    Ok(counts)
}

pub fn run(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    let replicates = match config.study {
        Study::Cov => cov_rows(config)?,
        Study::Prop | Study::PropMs => prop_rows(config)?,
    };
    let summaries = summarize(&replicates);
    Ok(SimReport { config: config.clone(), replicates, summaries })
}

pub fn run_cov_study(config: &SimConfig) -> Result<SimReport> {
    expect_study(config, Study::Cov)?;
    run(config)
}

pub fn run_prop_study(config: &SimConfig) -> Result<SimReport> {
    expect_study(config, Study::Prop)?;
    run(config)
}

pub fn run_prop_ms_study(config: &SimConfig) -> Result<SimReport> {
    expect_study(config, Study::PropMs)?;
    run(config)
}

fn expect_study(config: &SimConfig, want: Study) -> Result<()> {
    if config.study == want {
        Ok(())
    } else {
        Err(Error::Config(format!("expected a {want} config, got {}", config.study)))
    }
}

fn cov_rows(config: &SimConfig) -> Result<Vec<ReplicateRow>> {
    let mut cells = Vec::new();
    for &spec_id in &config.specs {
        let spec = CovSpec::get(spec_id)?;
        for &n in &config.n_grid {
            for &eps in &config.epsilons {
                for &mech in &config.mechanisms {
                    cells.push((spec, n, eps, mech));
                }
            }
        }
    }
    let jobs: Vec<_> = cells
        .iter()
        .flat_map(|cell| (0..config.reps).map(move |rep| (*cell, rep)))
        .collect();
    let chunks: Vec<Vec<ReplicateRow>> = jobs
        .par_iter()
        .map(|&((spec, n, eps, mech), rep)| {
            let key = format!("cov|spec={}|n={n}|eps={eps}|mech={mech}", spec.id);
            let mut rng = RandomStream::keyed(config.seed, &key).block(rep as u32);
            let original = spec.matrix();
            let out = sanitize_covariance(original, n, spec.bounds, eps, mech, &mut rng)?;
            let row = |stat, original, sanitized| ReplicateRow {
                study: Study::Cov,
                spec: spec.id,
                n,
                eps,
                mechanism: mech.name(),
                rep,
                stat,
                original,
                sanitized,
                category: None,
                truth: None,
                covered: None,
            };
            Ok(vec![
                row("S11", original.s11, out.matrix.s11),
                row("S22", original.s22, out.matrix.s22),
                row("S12", original.s12, out.matrix.s12),
                row("r", spec.r, out.correlation.unwrap_or(f64::NAN)),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn prop_rows(config: &SimConfig) -> Result<Vec<ReplicateRow>> {
    let study = config.study;
    let mut cells: Vec<(usize, f64, Option<BoundedMechanism>)> = Vec::new();
    for &n in &config.n_grid {
        for &eps in &config.epsilons {
            cells.push((n, eps, None));
            for &mech in &config.mechanisms {
                cells.push((n, eps, Some(mech)));
            }
        }
    }
    let jobs: Vec<_> = cells
        .iter()
        .flat_map(|cell| (0..config.reps).map(move |rep| (*cell, rep)))
        .collect();
    let chunks: Vec<Vec<ReplicateRow>> = jobs
        .par_iter()
        .map(|&((n, eps, mech), rep)| {
            // Data depend on (n, rep) only, so every ε and mechanism (and both
            // proportion studies) see the same simulated data sets.
            let mut data_rng = RandomStream::keyed(config.seed, &format!("prop-data|n={n}")).block(rep as u32);
            let counts = sample_multinomial(n as u64, &TRUE_P, &mut data_rng)?;
            let p_hat = ProportionVector::from_counts(counts)?;

            let (label, estimate, intervals) = match mech {
                None => {
                    let cis = (0..CATEGORIES)
                        .map(|k| wald_ci(p_hat[k], n as u64, CI_LEVEL))
                        .collect::<Result<Vec<_>>>()?;
                    (ORIGINAL, p_hat.as_array(), Some(cis))
                }
                Some(mech) => {
                    let key = match study {
                        Study::PropMs => format!("{study}|n={n}|eps={eps}|mech={mech}|m={}", config.m),
                        _ => format!("{study}|n={n}|eps={eps}|mech={mech}"),
                    };
                    let mut rng = RandomStream::keyed(config.seed, &key).block(rep as u32);
                    let release = if study == Study::PropMs {
                        multiple_synthesis(counts, eps, config.m, mech, &mut rng).and_then(|bundle| {
                            Ok((bundle.combined, bundle.confidence_intervals(CI_LEVEL)?.to_vec()))
                        })
                    } else {
                        sanitize_proportions(counts, eps, mech, &mut rng).and_then(|release| {
                            let p = release.proportions;
                            let cis = (0..CATEGORIES)
                                .map(|k| wald_ci(p[k], n as u64, CI_LEVEL))
                                .collect::<Result<Vec<_>>>()?;
                            Ok((p.as_array(), cis))
                        })
                    };
                    match release {
                        Ok((estimate, cis)) => (mech.name(), estimate, Some(cis)),
                        // Every sanitized share was 0 twice over; the replicate has no release.
                        Err(Error::DegenerateNormalization) => (mech.name(), [f64::NAN; CATEGORIES], None),
                        Err(e) => return Err(e),
                    }
                }
            };
            Ok((0..CATEGORIES)
                .map(|k| ReplicateRow {
                    study,
                    spec: 1,
                    n,
                    eps,
                    mechanism: label,
                    rep,
                    stat: "p",
                    original: p_hat[k],
                    sanitized: estimate[k],
                    category: Some(k + 1),
                    truth: Some(TRUE_P[k]),
                    covered: intervals.as_ref().map(|cis| cis[k].contains(TRUE_P[k])),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NA".to_owned()
    } else {
        v.to_string()
    }
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header)?;
    for record in records {
        writer.write_record(&record)?;
    }
    writer.into_inner().map_err(|e| Error::Io(e.to_string()))
}

impl SimReport {
    pub fn replicate_header(&self) -> Vec<&'static str> {
        let mut h = vec!["study", "spec", "n", "eps", "mechanism", "rep", "stat", "original", "sanitized"];
        if self.config.study.is_prop() {
            h.extend(["category", "truth", "cp"]);
        }
        h
    }

    pub fn summary_header(&self) -> Vec<&'static str> {
        let mut h = vec![
            "study", "spec", "n", "eps", "mechanism", "stat", "original", "mean", "q025", "q25",
            "q75", "q975", "bias", "rmse",
        ];
        if self.config.study.is_prop() {
            h.extend(["category", "truth", "cp"]);
        }
        h
    }

    pub fn replicates_csv(&self) -> Result<Vec<u8>> {
        let prop = self.config.study.is_prop();
        let records = self.replicates.iter().map(|r| {
            let mut rec = vec![
                r.study.to_string(),
                r.spec.to_string(),
                r.n.to_string(),
                fmt_f64(r.eps),
                r.mechanism.to_owned(),
                r.rep.to_string(),
                r.stat.to_owned(),
                fmt_f64(r.original),
                fmt_f64(r.sanitized),
            ];
            if prop {
                rec.push(fmt_opt(r.category));
                rec.push(r.truth.map(fmt_f64).unwrap_or_default());
                rec.push(fmt_opt(r.covered.map(u8::from)));
            }
            rec
        });
        csv_bytes(&self.replicate_header(), records)
    }

    pub fn summary_csv(&self) -> Result<Vec<u8>> {
        let prop = self.config.study.is_prop();
        let records = self.summaries.iter().map(|s| {
            let mut rec = vec![
                s.study.to_string(),
                s.spec.to_string(),
                s.n.to_string(),
                fmt_f64(s.eps),
                s.mechanism.to_owned(),
                s.stat.to_owned(),
                fmt_f64(s.original),
                fmt_f64(s.mean),
                fmt_f64(s.q025),
                fmt_f64(s.q25),
                fmt_f64(s.q75),
                fmt_f64(s.q975),
                fmt_f64(s.bias),
                fmt_f64(s.rmse),
            ];
            if prop {
                rec.push(fmt_opt(s.category));
                rec.push(s.truth.map(fmt_f64).unwrap_or_default());
                rec.push(s.cp.map(fmt_f64).unwrap_or_default());
            }
            rec
        });
        csv_bytes(&self.summary_header(), records)
    }

    /// Writes `<study>_replicates.csv` and `<study>_summary.csv` into `dir`.
    pub fn write_csvs(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let rep_path = dir.join(format!("{}_replicates.csv", self.config.study));
        let sum_path = dir.join(format!("{}_summary.csv", self.config.study));
        fs::write(&rep_path, self.replicates_csv()?)?;
        fs::write(&sum_path, self.summary_csv()?)?;
        Ok((rep_path, sum_path))
    }

    /// Summary row lookup by cell, statistic and (for proportions) category.
    pub fn summary(
        &self,
        spec: usize,
        n: usize,
        eps: f64,
        mechanism: &str,
        stat: &str,
        category: Option<usize>,
    ) -> Option<&SummaryRow> {
        self.summaries.iter().find(|s| {
            s.spec == spec
                && s.n == n
                && s.eps == eps
                && s.mechanism == mechanism
                && s.stat == stat
                && s.category == category
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(original: f64, sanitized: f64) -> ReplicateRow {
        ReplicateRow {
            study: Study::Cov,
            spec: 1,
            n: 50,
            eps: 1.0,
            mechanism: "bit",
            rep: 0,
            stat: "S11",
            original,
            sanitized,
            category: None,
            truth: None,
            covered: None,
        }
    }

    #[test]
    fn type7_quantiles() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 0.5), 3.0);
        assert_eq!(quantile_sorted(&xs, 0.25), 2.0);
        assert!((quantile_sorted(&xs, 0.975) - 4.9).abs() < 1e-12);
        assert!((quantile_sorted(&xs, 0.025) - 1.1).abs() < 1e-12);
        assert_eq!(quantile_sorted(&[7.0], 0.3), 7.0);
        assert!(quantile_sorted(&[], 0.3).is_nan());
    }

    #[test]
    fn summary_single_row() {
        let s = summarize(&[row(1.0, 1.3)]);
        assert_eq!(s.len(), 1);
        assert!((s[0].bias - 0.3).abs() < 1e-12);
        assert!((s[0].rmse - 0.3).abs() < 1e-12);
        assert_eq!(s[0].cp, None);
    }

    #[test]
    fn summary_symmetric_pair() {
        let s = summarize(&[row(1.0, 0.5), row(1.0, 1.5)]);
        assert_eq!(s[0].bias, 0.0);
        assert_eq!(s[0].rmse, 0.5);
    }

    /// Five-row fixture recomputed by hand:
    /// values 0.8, 1.1, 0.9, 1.6, 1.2 around original 1.0.
    /// mean 1.12; bias 0.12; squared errors .04 .01 .01 .36 .04 → mse .092;
    /// sorted .8 .9 1.1 1.2 1.6; q25 at h=1 → .9; q75 at h=3 → 1.2;
    /// q025 at h=.1 → .81; q975 at h=3.9 → 1.56.
    #[test]
    fn summary_hand_fixture() {
        let rows: Vec<_> = [0.8, 1.1, 0.9, 1.6, 1.2].iter().map(|v| row(1.0, *v)).collect();
        let s = &summarize(&rows)[0];
        assert!((s.mean - 1.12).abs() < 1e-12);
        assert!((s.bias - 0.12).abs() < 1e-12);
        assert!((s.rmse - 0.092_f64.sqrt()).abs() < 1e-12);
        assert!((s.q25 - 0.9).abs() < 1e-12);
        assert!((s.q75 - 1.2).abs() < 1e-12);
        assert!((s.q025 - 0.81).abs() < 1e-12);
        assert!((s.q975 - 1.56).abs() < 1e-12);
        assert_eq!(s.count, 5);
    }

    #[test]
    fn summary_skips_undefined_values() {
        let s = &summarize(&[row(0.7, f64::NAN), row(0.7, 0.5), row(0.7, 0.9)])[0];
        assert_eq!(s.count, 2);
        assert!((s.mean - 0.7).abs() < 1e-12);
    }

    #[test]
    fn config_parsing_and_validation() {
        let mut cfg = SimConfig::defaults(Study::Cov);
        cfg.apply_file_text("# comment\nreps = 20\nn=50,100\neps=0.5\nmech=bit\nseed=9\n").unwrap();
        assert_eq!(cfg.reps, 20);
        assert_eq!(cfg.n_grid, vec![50, 100]);
        assert_eq!(cfg.epsilons, vec![0.5]);
        assert_eq!(cfg.mechanisms, vec![BoundedMechanism::Bit]);
        assert_eq!(cfg.seed, 9);
        cfg.validate().unwrap();

        assert!(cfg.apply("bogus", "1").is_err());
        assert!(cfg.apply_file_text("noequals").is_err());
        let mut bad = cfg.clone();
        bad.n_grid = vec![100, 50];
        assert!(bad.validate().is_err());
        bad = cfg.clone();
        bad.reps = 0;
        assert!(bad.validate().is_err());
        bad = cfg.clone();
        bad.epsilons = vec![0.0];
        assert!(bad.validate().is_err());
        bad = cfg.clone();
        bad.specs = vec![4];
        assert!(bad.validate().is_err());
        let mut prop = SimConfig::defaults(Study::Prop);
        prop.specs = vec![2];
        assert!(prop.validate().is_err());
    }

    #[test]
    fn multinomial_counts_sum_to_n() {
        let mut rng = RandomStream::new(1, 1).rng();
        let mut totals = [0u64; 4];
        for _ in 0..2000 {
            let c = sample_multinomial(50, &TRUE_P, &mut rng).unwrap();
            assert_eq!(c.iter().sum::<u64>(), 50);
            for k in 0..4 {
                totals[k] += c[k];
            }
        }
        for k in 0..4 {
            let frac = totals[k] as f64 / 100_000.0;
            assert!((frac - TRUE_P[k]).abs() < 0.005, "{k}: {frac}");
        }
    }

    #[test]
    fn wrong_study_is_rejected() {
        let cfg = SimConfig::defaults(Study::Prop);
        assert!(run_cov_study(&cfg).is_err());
    }
}
