//! Weekly series and search-frequency panel containers.
//!
//! Both containers own a validated, gapless weekly axis and are immutable
//! after construction. Derived views copy the relevant span.

use crate::week::{self, EpiWeek, WeekError, WeekId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unit tag of a [`WeeklySeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    /// Activity level stored in percent form as published (1.8 means 1.8%).
    /// Values must lie strictly inside (0, 100) so the logit is defined.
    Percent,
    /// Unconstrained real scale (logit-transformed series, error series, ...).
    Free,
}

/// Origin of a search panel's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PanelSource {
    /// Standardized real-valued frequencies; rescaled to [0, 100] at ingestion.
    Correlate,
    /// Integer frequencies in [0, 100].
    Trends,
}

impl std::fmt::Display for PanelSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PanelSource::Correlate => write!(f, "correlate"),
            PanelSource::Trends => write!(f, "trends"),
        }
    }
}

/// Whether panel values are raw search frequencies or already log-transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PanelScale {
    /// Raw frequencies on the [0, 100] search scale.
    Raw,
    /// ln(x + delta) transformed values; no range validation applies.
    Log,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error(transparent)]
    Axis(#[from] WeekError),
    #[error("series/axis length mismatch: {weeks} weeks vs {values} values")]
    LengthMismatch { weeks: usize, values: usize },
    #[error("empty series")]
    Empty,
    #[error("value {value} for {week} outside the open interval (0, 100)")]
    PercentOutOfRange { week: WeekId, value: f64 },
    #[error("week {0} not covered by the series")]
    NotCovered(WeekId),
    #[error("date ranges do not intersect")]
    EmptyIntersection,
    #[error("panel row for {week} has {got} entries, expected {expected}")]
    NonRectangular { week: WeekId, got: usize, expected: usize },
    #[error("duplicate term name `{0}`")]
    DuplicateTerm(String),
    #[error("trends value {value} for term `{term}` at {week} is not an integer in [0, 100]")]
    TrendsRange { week: WeekId, term: String, value: f64 },
    #[error("non-finite value for term `{term}` at {week}")]
    NonFinite { week: WeekId, term: String },
    #[error("panels cannot be concatenated: {0}")]
    Concat(String),
}

/// A date-indexed weekly scalar series with no gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct WeeklySeries {
    weeks: Vec<EpiWeek>,
    values: Vec<f64>,
    unit: Unit,
}

impl WeeklySeries {
    pub fn new(weeks: Vec<EpiWeek>, values: Vec<f64>, unit: Unit) -> Result<Self, SeriesError> {
        if weeks.len() != values.len() {
            return Err(SeriesError::LengthMismatch { weeks: weeks.len(), values: values.len() });
        }
        if weeks.is_empty() {
            return Err(SeriesError::Empty);
        }
        week::validate_axis(&weeks)?;
        if unit == Unit::Percent {
            for (w, v) in weeks.iter().zip(&values) {
                if !(*v > 0.0 && *v < 100.0) {
                    return Err(SeriesError::PercentOutOfRange { week: w.id(), value: *v });
                }
            }
        }
        Ok(WeeklySeries { weeks, values, unit })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn weeks(&self) -> &[EpiWeek] {
        &self.weeks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> WeekId {
        self.weeks[0].id()
    }

    pub fn end(&self) -> WeekId {
        self.weeks[self.weeks.len() - 1].id()
    }

    /// Position of `id` on the axis, if covered.
    pub fn position_of(&self, id: WeekId) -> Option<usize> {
        self.weeks.binary_search_by_key(&id, |w| w.id()).ok()
    }

    pub fn value_at(&self, id: WeekId) -> Option<f64> {
        self.position_of(id).map(|i| self.values[i])
    }

    pub fn week_at(&self, idx: usize) -> EpiWeek {
        self.weeks[idx]
    }

    /// Copy of the span from `from` to `to` inclusive.
    pub fn restrict(&self, from: WeekId, to: WeekId) -> Result<WeeklySeries, SeriesError> {
        let a = self.position_of(from).ok_or(SeriesError::NotCovered(from))?;
        let b = self.position_of(to).ok_or(SeriesError::NotCovered(to))?;
        if a > b {
            return Err(SeriesError::EmptyIntersection);
        }
        Ok(WeeklySeries {
            weeks: self.weeks[a..=b].to_vec(),
            values: self.values[a..=b].to_vec(),
            unit: self.unit,
        })
    }

    /// Copy of the prefix strictly before `id`. Weeks ordered at or after
    /// `id` are dropped even when `id` itself is not on the axis.
    pub fn truncate_before(&self, id: WeekId) -> Result<WeeklySeries, SeriesError> {
        let n = self.weeks.partition_point(|w| w.id() < id);
        if n == 0 {
            return Err(SeriesError::Empty);
        }
        Ok(WeeklySeries {
            weeks: self.weeks[..n].to_vec(),
            values: self.values[..n].to_vec(),
            unit: self.unit,
        })
    }

    /// Element-wise transformation onto a new unit. Axis is preserved.
    pub fn map_values(&self, unit: Unit, f: impl Fn(f64) -> f64) -> WeeklySeries {
        WeeklySeries {
            weeks: self.weeks.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            unit,
        }
    }
}

/// One provenance segment of a panel: rows from `start_row` on came from
/// `source` (until the next segment begins).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelSegment {
    pub source: PanelSource,
    pub start_row: usize,
}

/// A date-indexed matrix of K search-term frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchPanel {
    weeks: Vec<EpiWeek>,
    terms: Vec<String>,
    /// Row-major, `weeks.len() * terms.len()` entries.
    data: Vec<f64>,
    segments: Vec<PanelSegment>,
    scale: PanelScale,
}

impl SearchPanel {
    pub fn new(
        weeks: Vec<EpiWeek>,
        terms: Vec<String>,
        rows: Vec<Vec<f64>>,
        source: PanelSource,
    ) -> Result<Self, SeriesError> {
        Self::with_scale(weeks, terms, rows, source, PanelScale::Raw)
    }

    pub fn with_scale(
        weeks: Vec<EpiWeek>,
        terms: Vec<String>,
        rows: Vec<Vec<f64>>,
        source: PanelSource,
        scale: PanelScale,
    ) -> Result<Self, SeriesError> {
        if weeks.len() != rows.len() {
            return Err(SeriesError::LengthMismatch { weeks: weeks.len(), values: rows.len() });
        }
        if weeks.is_empty() {
            return Err(SeriesError::Empty);
        }
        week::validate_axis(&weeks)?;
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].contains(t) {
                return Err(SeriesError::DuplicateTerm(t.clone()));
            }
        }
        let k = terms.len();
        let mut data = Vec::with_capacity(weeks.len() * k);
        for (w, row) in weeks.iter().zip(&rows) {
            if row.len() != k {
                return Err(SeriesError::NonRectangular {
                    week: w.id(),
                    got: row.len(),
                    expected: k,
                });
            }
            for (t, &v) in terms.iter().zip(row) {
                if !v.is_finite() {
                    return Err(SeriesError::NonFinite { week: w.id(), term: t.clone() });
                }
                if scale == PanelScale::Raw
                    && source == PanelSource::Trends
                    && (!(0.0..=100.0).contains(&v) || v.fract() != 0.0)
                {
                    return Err(SeriesError::TrendsRange {
                        week: w.id(),
                        term: t.clone(),
                        value: v,
                    });
                }
            }
            data.extend_from_slice(row);
        }
        Ok(SearchPanel {
            weeks,
            terms,
            data,
            segments: vec![PanelSegment { source, start_row: 0 }],
            scale,
        })
    }

    pub fn n_weeks(&self) -> usize {
        self.weeks.len()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn weeks(&self) -> &[EpiWeek] {
        &self.weeks
    }

    pub fn scale(&self) -> PanelScale {
        self.scale
    }

    pub fn segments(&self) -> &[PanelSegment] {
        &self.segments
    }

    /// Source of row 0; panels built by [`SearchPanel::concat`] carry
    /// additional segments.
    pub fn source(&self) -> PanelSource {
        self.segments[0].source
    }

    pub fn start(&self) -> WeekId {
        self.weeks[0].id()
    }

    pub fn end(&self) -> WeekId {
        self.weeks[self.weeks.len() - 1].id()
    }

    pub fn row(&self, idx: usize) -> &[f64] {
        let k = self.terms.len();
        &self.data[idx * k..(idx + 1) * k]
    }

    pub fn position_of(&self, id: WeekId) -> Option<usize> {
        self.weeks.binary_search_by_key(&id, |w| w.id()).ok()
    }

    pub fn row_for(&self, id: WeekId) -> Option<&[f64]> {
        self.position_of(id).map(|i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        let k = self.terms.len();
        self.data.iter().skip(j).step_by(k).copied().collect()
    }

    /// Copy of the span from `from` to `to` inclusive, preserving provenance.
    pub fn restrict(&self, from: WeekId, to: WeekId) -> Result<SearchPanel, SeriesError> {
        let a = self.position_of(from).ok_or(SeriesError::NotCovered(from))?;
        let b = self.position_of(to).ok_or(SeriesError::NotCovered(to))?;
        if a > b {
            return Err(SeriesError::EmptyIntersection);
        }
        let k = self.terms.len();
        let mut segments: Vec<PanelSegment> = Vec::new();
        for (i, seg) in self.segments.iter().enumerate() {
            let seg_end = self.segments.get(i + 1).map_or(self.weeks.len(), |s| s.start_row);
            if seg.start_row < b + 1 && seg_end > a {
                segments.push(PanelSegment {
                    source: seg.source,
                    start_row: seg.start_row.saturating_sub(a),
                });
            }
        }
        Ok(SearchPanel {
            weeks: self.weeks[a..=b].to_vec(),
            terms: self.terms.clone(),
            data: self.data[a * k..(b + 1) * k].to_vec(),
            segments,
            scale: self.scale,
        })
    }

    /// Concatenates two panels in time. `other` must start on the week
    /// immediately after `self` ends and carry the same terms in the same
    /// order; the switch week is recorded as a provenance segment.
    pub fn concat(&self, other: &SearchPanel) -> Result<SearchPanel, SeriesError> {
        if self.terms != other.terms {
            return Err(SeriesError::Concat("term sets differ".into()));
        }
        if self.scale != other.scale {
            return Err(SeriesError::Concat("panel scales differ".into()));
        }
        let last = self.weeks[self.weeks.len() - 1];
        if !other.weeks[0].is_successor_of(&last) {
            return Err(SeriesError::Concat(format!(
                "second panel starts at {}, expected the week after {}",
                other.weeks[0], last
            )));
        }
        let mut weeks = self.weeks.clone();
        weeks.extend_from_slice(&other.weeks);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        let offset = self.weeks.len();
        let mut segments = self.segments.clone();
        for seg in &other.segments {
            segments.push(PanelSegment { source: seg.source, start_row: seg.start_row + offset });
        }
        Ok(SearchPanel { weeks, terms: self.terms.clone(), data, segments, scale: self.scale })
    }

    /// Rebuilds the panel with transformed values (for the shifted-log map).
    pub fn map_values(&self, scale: PanelScale, f: impl Fn(f64) -> f64) -> SearchPanel {
        SearchPanel {
            weeks: self.weeks.clone(),
            terms: self.terms.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
            segments: self.segments.clone(),
            scale,
        }
    }

    /// Rebuilds the panel column-by-column (for per-term rescaling).
    pub fn map_columns(
        &self,
        mut f: impl FnMut(usize, &[f64]) -> Result<Vec<f64>, SeriesError>,
    ) -> Result<SearchPanel, SeriesError> {
        let k = self.terms.len();
        let n = self.weeks.len();
        let mut data = vec![0.0; n * k];
        for j in 0..k {
            let col = f(j, &self.column(j))?;
            assert_eq!(col.len(), n);
            for (i, v) in col.into_iter().enumerate() {
                data[i * k + j] = v;
            }
        }
        Ok(SearchPanel {
            weeks: self.weeks.clone(),
            terms: self.terms.clone(),
            data,
            segments: self.segments.clone(),
            scale: self.scale,
        })
    }
}

/// Intersection of inclusive week ranges; errors when empty.
pub fn common_range(ranges: &[(WeekId, WeekId)]) -> Result<(WeekId, WeekId), SeriesError> {
    let start = ranges.iter().map(|r| r.0).max().ok_or(SeriesError::Empty)?;
    let end = ranges.iter().map(|r| r.1).min().ok_or(SeriesError::Empty)?;
    if start > end {
        return Err(SeriesError::EmptyIntersection);
    }
    Ok((start, end))
}

/// Restricts a series and a panel to their common window.
pub fn align(
    series: &WeeklySeries,
    panel: &SearchPanel,
) -> Result<(WeeklySeries, SearchPanel), SeriesError> {
    let (from, to) =
        common_range(&[(series.start(), series.end()), (panel.start(), panel.end())])?;
    Ok((series.restrict(from, to)?, panel.restrict(from, to)?))
}
