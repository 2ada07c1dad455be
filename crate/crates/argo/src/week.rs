//! Epidemiological-week time axis.
//!
//! Weeks are read from input files verbatim as `(year, week, end_date)`
//! triplets; the library never derives week numbers from calendar dates.
//! Succession is validated positionally: consecutive weeks must be exactly
//! seven days apart and carry a plausible `(year, week)` advance.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The `(year, week)` pair that orders the weekly axis.
///
/// Cheap to copy and totally ordered; used wherever only the position of a
/// week matters (vintage publication weeks, range bounds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeekId {
    pub year: i32,
    /// Week number within the year, 1..=53.
    pub week: u8,
}

impl WeekId {
    pub fn new(year: i32, week: u8) -> Self {
        WeekId { year, week }
    }
}

impl std::fmt::Display for WeekId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}w{:02}", self.year, self.week)
    }
}

/// One week of the reporting calendar: its `(year, week)` label and the
/// calendar date of its final day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EpiWeek {
    pub year: i32,
    pub week: u8,
    pub end_date: NaiveDate,
}

impl EpiWeek {
    pub fn new(year: i32, week: u8, end_date: NaiveDate) -> Result<Self, WeekError> {
        if !(1..=53).contains(&week) {
            return Err(WeekError::WeekOutOfRange { year, week });
        }
        Ok(EpiWeek { year, week, end_date })
    }

    pub fn id(&self) -> WeekId {
        WeekId { year: self.year, week: self.week }
    }

    /// True when `self` is the week immediately after `prev`.
    ///
    /// Requires the end dates to be exactly 7 days apart and the label to
    /// advance either within the year or as a plausible year rollover
    /// (week 52 or 53 to week 1 of the next year).
    pub fn is_successor_of(&self, prev: &EpiWeek) -> bool {
        let date_ok = self.end_date - prev.end_date == chrono::Duration::days(7);
        let label_ok = (self.year == prev.year && self.week == prev.week + 1)
            || (self.year == prev.year + 1 && self.week == 1 && prev.week >= 52);
        date_ok && label_ok
    }
}

impl std::fmt::Display for EpiWeek {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}w{:02} ({})", self.year, self.week, self.end_date)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeekError {
    #[error("week number {week} out of range 1..=53 for year {year}")]
    WeekOutOfRange { year: i32, week: u8 },
    #[error("gap in weekly axis after {prev}: expected {} ending {expected_end}, found {next}", gap_label(prev))]
    Gap { prev: EpiWeek, next: EpiWeek, expected_end: NaiveDate },
}

/// Label of the week expected after `prev`; the 52/53 rollover is left
/// open because week numbering cannot be derived from dates.
fn gap_label(prev: &EpiWeek) -> String {
    if prev.week < 52 {
        format!("week {}w{:02}", prev.year, prev.week + 1)
    } else {
        format!("the week after {}w{:02}", prev.year, prev.week)
    }
}

/// Validates that `weeks` is a strictly consecutive weekly axis.
pub fn validate_axis(weeks: &[EpiWeek]) -> Result<(), WeekError> {
    for pair in weeks.windows(2) {
        if !pair[1].is_successor_of(&pair[0]) {
            return Err(WeekError::Gap {
                prev: pair[0],
                next: pair[1],
                expected_end: pair[0].end_date + chrono::Duration::days(7),
            });
        }
    }
    Ok(())
}
