//! Revision-triangle storage for surveillance reports.
//!
//! A value for target week `i` may be republished (revised) at several later
//! weeks `j`. The triangle stores each `(target, published, value)` record
//! together with the finalized series the revisions converge to, and
//! [`VintageSeries::as_of`] reconstructs exactly what was knowable at a
//! given week. Weeks with no archived revisions at all (off-season) fall
//! back to the finalized value; weeks whose entire archive lies in the
//! future of the query week yield nothing rather than leaking the
//! finalized value.

use crate::series::WeeklySeries;
use crate::week::WeekId;
use std::collections::BTreeMap;
use thiserror::Error;

/// One archived report: the value for `target` as published at `published`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VintageRecord {
    pub target: WeekId,
    pub published: WeekId,
    pub value: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VintageError {
    #[error("record for {target} published at {published}: publication must be at least one week after the target")]
    DelayViolation { target: WeekId, published: WeekId },
    #[error("duplicate record for target {target} published at {published}")]
    DuplicateRecord { target: WeekId, published: WeekId },
    #[error("record target {0} is not covered by the finalized series")]
    TargetNotCovered(WeekId),
    #[error("non-finite value for {target} published at {published}")]
    NonFinite { target: WeekId, published: WeekId },
}

/// The revision triangle plus finalized values.
#[derive(Debug, Clone, PartialEq)]
pub struct VintageSeries {
    /// target week -> (publication week -> value), both axes ordered.
    records: BTreeMap<WeekId, BTreeMap<WeekId, f64>>,
    finalized: WeeklySeries,
}

/// Result of an as-of query: the reconstructed series and the weeks whose
/// value came from the finalized fallback (no archived revisions exist).
#[derive(Debug, Clone)]
pub struct AsOfSeries {
    pub series: WeeklySeries,
    pub finalized_fallback: Vec<WeekId>,
}

impl VintageSeries {
    pub fn new(
        finalized: WeeklySeries,
        records: impl IntoIterator<Item = VintageRecord>,
    ) -> Result<Self, VintageError> {
        let mut map: BTreeMap<WeekId, BTreeMap<WeekId, f64>> = BTreeMap::new();
        for r in records {
            if r.published <= r.target {
                return Err(VintageError::DelayViolation {
                    target: r.target,
                    published: r.published,
                });
            }
            if finalized.position_of(r.target).is_none() {
                return Err(VintageError::TargetNotCovered(r.target));
            }
            if !r.value.is_finite() {
                return Err(VintageError::NonFinite { target: r.target, published: r.published });
            }
            if map.entry(r.target).or_default().insert(r.published, r.value).is_some() {
                return Err(VintageError::DuplicateRecord {
                    target: r.target,
                    published: r.published,
                });
            }
        }
        Ok(VintageSeries { records: map, finalized })
    }

    /// Triangle with no revision records: every as-of view is a truncation
    /// of the finalized series.
    pub fn without_revisions(finalized: WeeklySeries) -> Self {
        VintageSeries { records: BTreeMap::new(), finalized }
    }

    pub fn finalized(&self) -> &WeeklySeries {
        &self.finalized
    }

    pub fn n_records(&self) -> usize {
        self.records.values().map(|m| m.len()).sum()
    }

    pub fn records(&self) -> impl Iterator<Item = VintageRecord> + '_ {
        self.records.iter().flat_map(|(&target, pubs)| {
            pubs.iter().map(move |(&published, &value)| VintageRecord { target, published, value })
        })
    }

    /// Reconstructs the series as it was knowable at week `j`: for every
    /// target week `i < j`, the record with the largest publication week
    /// `<= j` wins; weeks with no archive at all use the finalized value.
    /// Weeks whose archive is entirely published after `j` contribute no
    /// value, and the result is the maximal gapless span ending at the
    /// last week with data. Returns `None` when nothing is visible.
    pub fn as_of(&self, j: WeekId) -> Option<AsOfSeries> {
        let base = self.finalized.truncate_before(j).ok()?;
        let mut values: Vec<Option<f64>> = base.values().iter().map(|&v| Some(v)).collect();
        let mut fallback: Vec<WeekId> = Vec::new();
        for (idx, w) in base.weeks().iter().enumerate() {
            match self.records.get(&w.id()) {
                None => fallback.push(w.id()),
                Some(pubs) => {
                    values[idx] = pubs.range(..=j).next_back().map(|(_, &v)| v);
                }
            }
        }
        // keep the maximal contiguous suffix of weeks that have a value
        let first = match values.iter().rposition(|v| v.is_none()) {
            Some(gap) => gap + 1,
            None => 0,
        };
        if first >= values.len() {
            return None;
        }
        let weeks = base.weeks()[first..].to_vec();
        let vals: Vec<f64> = values[first..].iter().map(|v| v.unwrap()).collect();
        fallback.retain(|id| *id >= weeks[0].id());
        let series = WeeklySeries::new(weeks, vals, base.unit()).ok()?;
        Some(AsOfSeries { series, finalized_fallback: fallback })
    }
}
