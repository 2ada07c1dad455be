//! CSV ingestion and export.
//!
//! All files share the explicit `year,week,end_date` axis columns so week
//! numbering is never derived from dates. Parsing is locale-independent
//! (decimal point, no thousands separators); writers emit either full
//! round-trip precision (estimates) or six significant digits (reports).

pub mod config;
pub mod synth;

use crate::series::{PanelSource, SearchPanel, SeriesError, Unit, WeeklySeries};
use crate::transform;
use crate::vintage::{VintageError, VintageRecord, VintageSeries};
use crate::week::{EpiWeek, WeekId};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }

    fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        IoError::Parse { path: path.to_path_buf(), line, message: message.into() }
    }

    fn data(path: &Path, message: impl std::fmt::Display) -> Self {
        IoError::Data { path: path.to_path_buf(), message: message.to_string() }
    }
}

/// Six-significant-digit decimal rendering used by report files.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor();
    let scale = 10f64.powf(5.0 - exp);
    let rounded = (v * scale).round() / scale;
    format!("{rounded}")
}

/// Full-precision rendering (shortest string that round-trips).
pub fn format_full(v: f64) -> String {
    format!("{v}")
}

fn read_lines(path: &Path) -> Result<Vec<String>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    Ok(text.lines().map(|l| l.trim_end_matches('\r').to_string()).collect())
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    field: &str,
    value: &str,
) -> Result<T, IoError> {
    value.trim().parse::<T>().map_err(|_| {
        IoError::parse(path, line, format!("cannot parse {field} from `{value}`"))
    })
}

fn parse_week_fields(
    path: &Path,
    line: usize,
    year: &str,
    week: &str,
    end_date: &str,
) -> Result<EpiWeek, IoError> {
    let year: i32 = parse_field(path, line, "year", year)?;
    let week: u8 = parse_field(path, line, "week", week)?;
    let end_date: chrono::NaiveDate = end_date
        .trim()
        .parse()
        .map_err(|_| IoError::parse(path, line, format!("cannot parse end_date `{end_date}`")))?;
    EpiWeek::new(year, week, end_date).map_err(|e| IoError::parse(path, line, e.to_string()))
}

/// Reads a weekly surveillance series: header `year,week,end_date,wili`,
/// strictly consecutive weeks, values inside the open interval (0, 100).
pub fn read_ili_csv(path: &Path) -> Result<WeeklySeries, IoError> {
    let lines = read_lines(path)?;
    if lines.first().map(|h| h.trim()) != Some("year,week,end_date,wili") {
        return Err(IoError::parse(path, 1, "expected header `year,week,end_date,wili`"));
    }
    let mut weeks = Vec::new();
    let mut values = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(1) {
        if raw.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 4 {
            return Err(IoError::parse(path, line, format!("expected 4 fields, got {}", fields.len())));
        }
        let week = parse_week_fields(path, line, fields[0], fields[1], fields[2])?;
        let value: f64 = parse_field(path, line, "wili", fields[3])?;
        if !(value > 0.0 && value < 100.0) {
            return Err(IoError::parse(
                path,
                line,
                format!("wili value {value} for {} outside the open interval (0, 100)", week.id()),
            ));
        }
        weeks.push(week);
        values.push(value);
    }
    WeeklySeries::new(weeks, values, Unit::Percent).map_err(|e| IoError::data(path, e))
}

/// Writes a weekly series with the surveillance header, full precision.
pub fn write_ili_csv(path: &Path, series: &WeeklySeries) -> Result<(), IoError> {
    let mut out = String::from("year,week,end_date,wili\n");
    for (w, v) in series.weeks().iter().zip(series.values()) {
        out.push_str(&format!("{},{},{},{}\n", w.year, w.week, w.end_date, format_full(*v)));
    }
    std::fs::write(path, out).map_err(|e| IoError::io(path, e))
}

/// Reads a search panel: header `year,week,end_date,<term1>,...,<termK>`.
/// Correlate columns are rescaled onto [0, 100] at ingestion; trends values
/// must be integers in [0, 100].
pub fn read_panel_csv(path: &Path, source: PanelSource) -> Result<SearchPanel, IoError> {
    let lines = read_lines(path)?;
    let header = lines
        .first()
        .ok_or_else(|| IoError::parse(path, 1, "empty file"))?;
    let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
    if cols.len() < 4 || cols[0] != "year" || cols[1] != "week" || cols[2] != "end_date" {
        return Err(IoError::parse(
            path,
            1,
            "expected header `year,week,end_date,<term1>,...` with at least one term",
        ));
    }
    let terms: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
    for (i, t) in terms.iter().enumerate() {
        if terms[..i].contains(t) {
            return Err(IoError::parse(path, 1, format!("duplicate term name `{t}`")));
        }
    }
    let k = terms.len();
    let mut weeks = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(1) {
        if raw.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 3 + k {
            return Err(IoError::parse(
                path,
                line,
                format!("expected {} fields, got {}", 3 + k, fields.len()),
            ));
        }
        let week = parse_week_fields(path, line, fields[0], fields[1], fields[2])?;
        let mut row = Vec::with_capacity(k);
        for (j, f) in fields[3..].iter().enumerate() {
            let v: f64 = parse_field(path, line, &terms[j], f)?;
            if source == PanelSource::Trends && (!(0.0..=100.0).contains(&v) || v.fract() != 0.0) {
                return Err(IoError::parse(
                    path,
                    line,
                    format!("trends value {v} for `{}` is not an integer in [0, 100]", terms[j]),
                ));
            }
            row.push(v);
        }
        weeks.push(week);
        rows.push(row);
    }
    let panel = SearchPanel::new(weeks, terms, rows, source).map_err(|e| IoError::data(path, e))?;
    match source {
        PanelSource::Trends => Ok(panel),
        PanelSource::Correlate => panel
            .map_columns(|j, col| {
                transform::rescale_correlate(col).map_err(|e| {
                    SeriesError::Concat(format!("term `{}`: {e}", panel.terms()[j]))
                })
            })
            .map_err(|e| IoError::data(path, e)),
    }
}

/// Writes a raw panel, full precision.
pub fn write_panel_csv(path: &Path, panel: &SearchPanel) -> Result<(), IoError> {
    let mut out = String::from("year,week,end_date");
    for t in panel.terms() {
        out.push(',');
        out.push_str(t);
    }
    out.push('\n');
    for (i, w) in panel.weeks().iter().enumerate() {
        out.push_str(&format!("{},{},{}", w.year, w.week, w.end_date));
        for v in panel.row(i) {
            out.push(',');
            out.push_str(&format_full(*v));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| IoError::io(path, e))
}

/// Reads a revision triangle: header
/// `target_year,target_week,pub_year,pub_week,wili`, one record per row,
/// against an already-loaded finalized series.
pub fn read_vintage_csv(
    path: &Path,
    finalized: WeeklySeries,
) -> Result<VintageSeries, IoError> {
    let lines = read_lines(path)?;
    if lines.first().map(|h| h.trim()) != Some("target_year,target_week,pub_year,pub_week,wili") {
        return Err(IoError::parse(
            path,
            1,
            "expected header `target_year,target_week,pub_year,pub_week,wili`",
        ));
    }
    let mut records = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(1) {
        if raw.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(IoError::parse(path, line, format!("expected 5 fields, got {}", fields.len())));
        }
        let target = WeekId::new(
            parse_field(path, line, "target_year", fields[0])?,
            parse_field(path, line, "target_week", fields[1])?,
        );
        let published = WeekId::new(
            parse_field(path, line, "pub_year", fields[2])?,
            parse_field(path, line, "pub_week", fields[3])?,
        );
        let value: f64 = parse_field(path, line, "wili", fields[4])?;
        records.push(VintageRecord { target, published, value });
    }
    VintageSeries::new(finalized, records).map_err(|e: VintageError| IoError::data(path, e))
}

/// Writes the revision records of a triangle (the finalized series has its
/// own file).
pub fn write_vintage_csv(path: &Path, vintage: &VintageSeries) -> Result<(), IoError> {
    let mut out = String::from("target_year,target_week,pub_year,pub_week,wili\n");
    for r in vintage.records() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.target.year,
            r.target.week,
            r.published.year,
            r.published.week,
            format_full(r.value)
        ));
    }
    std::fs::write(path, out).map_err(|e| IoError::io(path, e))
}

/// Reads a one-column error series: header `error`.
pub fn read_error_csv(path: &Path) -> Result<Vec<f64>, IoError> {
    let lines = read_lines(path)?;
    if lines.first().map(|h| h.trim()) != Some("error") {
        return Err(IoError::parse(path, 1, "expected header `error`"));
    }
    let mut out = Vec::new();
    for (i, raw) in lines.iter().enumerate().skip(1) {
        if raw.trim().is_empty() {
            continue;
        }
        let v: f64 = parse_field(path, i + 1, "error", raw)?;
        if !v.is_finite() {
            return Err(IoError::parse(path, i + 1, "error value must be finite"));
        }
        out.push(v);
    }
    Ok(out)
}

/// Creates `path` and writes `content`, creating parent directories first.
pub fn write_text(path: &Path, content: &str) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| IoError::io(parent, e))?;
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| IoError::io(path, e))?;
    f.write_all(content.as_bytes()).map_err(|e| IoError::io(path, e))
}
