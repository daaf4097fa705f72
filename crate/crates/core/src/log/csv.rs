//! Event logs stored as one row per event.

use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{EventLog, LogBuilder};
use crate::error::{Error, Result};

/// Names of the columns holding the case id, the activity and the ordering key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvMapping {
    pub case: String,
    pub activity: String,
    pub order: String,
}

impl Default for CsvMapping {
    fn default() -> Self {
        Self {
            case: "case".into(),
            activity: "activity".into(),
            order: "order".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OrderKind {
    Integer,
    Timestamp,
}

const NAIVE_FORMATS: &[&str] = &[
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y/%m/%d %H:%M:%S%.f",
    "%d-%m-%Y %H:%M:%S%.f",
    "%Y-%m-%d %H:%M",
];

fn parse_timestamp(text: &str) -> Option<i64> {
    if let Ok(t) = DateTime::parse_from_rfc3339(text) {
        return t.timestamp_nanos_opt();
    }
    NAIVE_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
        .and_then(|t| t.and_utc().timestamp_nanos_opt())
}

fn parse_order(text: &str, kind: &mut Option<OrderKind>) -> Option<i64> {
    let text = text.trim();
    match kind {
        Some(OrderKind::Integer) => text.parse().ok(),
        Some(OrderKind::Timestamp) => parse_timestamp(text),
        None => {
            if let Ok(v) = text.parse() {
                *kind = Some(OrderKind::Integer);
                Some(v)
            } else {
                let v = parse_timestamp(text)?;
                *kind = Some(OrderKind::Timestamp);
                Some(v)
            }
        }
    }
}

/// Parses a headed CSV file; rows are grouped by case and sorted by the
/// order column, ties keeping file order.
///
/// The order column holds either integers or timestamps (RFC 3339 or a
/// handful of common `YYYY-MM-DD hh:mm:ss` variants); the kind is fixed by
/// the first data row.
pub fn parse_csv<R: Read>(input: R, mapping: &CsvMapping) -> Result<EventLog> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Config(format!("missing column {name:?}")))
    };
    let case_col = column(&mapping.case)?;
    let activity_col = column(&mapping.activity)?;
    let order_col = column(&mapping.order)?;

    let mut kind = None;
    let mut cases: IndexMap<String, Vec<(i64, String)>> = IndexMap::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let field = |col: usize| {
            record.get(col).ok_or_else(|| Error::Row {
                row,
                message: "too few fields".into(),
            })
        };
        let case = field(case_col)?;
        let activity = field(activity_col)?;
        let order_text = field(order_col)?;
        if activity.is_empty() {
            return Err(Error::Row {
                row,
                message: "empty activity".into(),
            });
        }
        let order = parse_order(order_text, &mut kind).ok_or_else(|| Error::Row {
            row,
            message: format!("unparsable order value {order_text:?}"),
        })?;
        cases
            .entry(case.to_owned())
            .or_default()
            .push((order, activity.to_owned()));
    }

    let mut builder = LogBuilder::new();
    for (case, mut rows) in cases {
        rows.sort_by_key(|(order, _)| *order);
        builder.push_trace(&case, rows.iter().map(|(_, a)| a.as_str()), 1)?;
    }
    Ok(builder.finish())
}

/// Writes the log as `case,activity,order` rows, one case per trace occurrence.
pub fn write_csv<W: Write>(log: &EventLog, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["case", "activity", "order"])?;
    let mut case = 0usize;
    for (trace, count) in log.traces() {
        for _ in 0..count {
            let id = format!("case_{case}");
            for (pos, name) in log.trace_names(trace).enumerate() {
                writer.write_record([id.as_str(), name, &pos.to_string()])?;
            }
            case += 1;
        }
    }
    writer.flush()?;
    Ok(())
}
