//! Privacy budget ledger with sequential and parallel composition.
//!
//! Sequential spends add up. Spends that share a parallel group touch
//! disjoint parts of the data, so the group costs only its largest member.
//! The ledger has a single writer; reading it concurrently is fine.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Composition {
    Sequential,
    /// Member of the named parallel group.
    Parallel(String),
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Composition::Sequential => f.write_str("sequential"),
            Composition::Parallel(group) => write!(f, "parallel:{group}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub label: String,
    pub epsilon: f64,
    pub composition: Composition,
}

/// Splits `total` into `k` equal shares.
///
/// The last share is `total − (sum of the others)`, so adding the shares in
/// order reproduces `total` exactly.
pub fn allocate_equal(total: f64, k: usize) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(invalid("cannot split a budget into 0 shares"));
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(invalid(format!("budget must be finite and > 0, got {total}")));
    }
    let share = total / k as f64;
    let mut shares = vec![share; k - 1];
    let head: f64 = shares.iter().sum();
    shares.push(total - head);
    Ok(shares)
}

/// Effective ε of a set of spends.
///
/// Contributions are summed in sorted order so the result does not depend on
/// the order in which entries were recorded.
pub fn compose(entries: &[LedgerEntry]) -> f64 {
    let mut groups: BTreeMap<&str, f64> = BTreeMap::new();
    let mut parts = Vec::with_capacity(entries.len());
    for e in entries {
        match &e.composition {
            Composition::Sequential => parts.push(e.epsilon),
            Composition::Parallel(group) => {
                let slot = groups.entry(group.as_str()).or_insert(0.0);
                *slot = slot.max(e.epsilon);
            }
        }
    }
    parts.extend(groups.into_values());
    parts.sort_by(f64::total_cmp);
    parts.into_iter().sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetLedger {
    total: f64,
    entries: Vec<LedgerEntry>,
}

impl BudgetLedger {
    pub fn new(total: f64) -> Result<Self> {
        if !(total.is_finite() && total > 0.0) {
            return Err(invalid(format!("total budget must be finite and > 0, got {total}")));
        }
        Ok(Self { total, entries: Vec::new() })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn spent(&self) -> f64 {
        compose(&self.entries)
    }

    pub fn remaining(&self) -> f64 {
        (self.total - self.spent()).max(0.0)
    }

    /// Rounding slack for comparing composed spends with the total. Shares
    /// from [`allocate_equal`] may be recorded in any order, and re-summing
    /// them can land an ulp or two off.
    fn slack(&self, n: usize) -> f64 {
        self.total * f64::EPSILON * (n as f64 + 1.0)
    }

    /// Records a spend, refusing it if the composed total would exceed the budget.
    pub fn spend(&mut self, label: &str, epsilon: f64, composition: Composition) -> Result<()> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid(format!("spend must be finite and > 0, got {epsilon}")));
        }
        let bad = |s: &str| s.contains([',', '\n', '\r']);
        if bad(label) || matches!(&composition, Composition::Parallel(g) if bad(g) || g.is_empty())
        {
            return Err(invalid(format!("label/group may not contain commas or newlines: {label:?}")));
        }
        let entry = LedgerEntry { label: label.to_owned(), epsilon, composition };
        self.entries.push(entry);
        let after = self.spent();
        if after > self.total + self.slack(self.entries.len()) {
            self.entries.pop();
            return Err(Error::OverBudget { requested: epsilon, remaining: self.remaining() });
        }
        Ok(())
    }

    /// Line-oriented audit log: a `total,<ε>` line, then `label,class,ε` per spend.
    pub fn to_audit_log(&self) -> String {
        let mut out = format!("total,{}\n", self.total);
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.label, e.composition, e.epsilon));
        }
        out
    }

    pub fn from_audit_log(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| invalid("empty audit log"))?;
        let total = header
            .strip_prefix("total,")
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| invalid(format!("bad audit log header: {header:?}")))?;
        let mut ledger = Self::new(total)?;
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            let [label, class, eps] = fields[..] else {
                return Err(invalid(format!("bad audit log line: {line:?}")));
            };
            let composition = match class {
                "sequential" => Composition::Sequential,
                other => match other.strip_prefix("parallel:") {
                    Some(group) => Composition::Parallel(group.to_owned()),
                    None => return Err(invalid(format!("unknown composition class {other:?}"))),
                },
            };
            let eps: f64 = eps.trim().parse().map_err(|_| invalid(format!("bad ε in {line:?}")))?;
            ledger.spend(label, eps, composition)?;
        }
        Ok(ledger)
    }
}
