//! Reading count data from files.
//!
//! Two layouts are accepted. A CSV of `value,count` rows (an optional
//! non-numeric header line first), or one raw observation per line. Blank
//! lines are skipped. The layout is CSV as soon as any data line holds a
//! comma.

use std::fmt;
use std::path::Path;

use cmnb::table::FrequencyTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestError {
    pub source: String,
    /// 1-based data row and physical line, when the error is tied to one.
    pub row: Option<(usize, usize)>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)?;
        if let Some((row, line)) = self.row {
            write!(f, ": row {row} (line {line})")?;
        }
        if let Some(col) = self.column {
            write!(f, ", column {col}")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for IngestError {}

pub fn ingest(path: &Path) -> Result<FrequencyTable, IngestError> {
    let source = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| IngestError {
        source: source.clone(),
        row: None,
        column: None,
        message: format!("cannot read file: {e}"),
    })?;
    parse_table(&text, &source)
}

fn parse_field(
    field: &str,
    what: &str,
    source: &str,
    row: usize,
    line: usize,
    column: usize,
) -> Result<u64, IngestError> {
    let field = field.trim();
    let fail = |message: String| IngestError {
        source: source.to_string(),
        row: Some((row, line)),
        column: Some(column),
        message,
    };
    match field.parse::<u64>() {
        Ok(v) => Ok(v),
        Err(_) if field.parse::<i128>().is_ok_and(|v| v < 0) => {
            Err(fail(format!("{what} {field} is negative")))
        }
        Err(_) => Err(fail(format!(
            "{what} {field:?} is not a nonnegative integer"
        ))),
    }
}

/// Parses file contents; `source` names the input in messages.
pub fn parse_table(text: &str, source: &str) -> Result<FrequencyTable, IngestError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let whole = |message: &str| IngestError {
        source: source.to_string(),
        row: None,
        column: None,
        message: message.to_string(),
    };
    if lines.is_empty() {
        return Err(whole("input is empty"));
    }
    let csv = lines.iter().any(|(_, l)| l.contains(','));
    let header = csv
        && lines[0]
            .1
            .split(',')
            .all(|f| f.trim().parse::<i128>().is_err());
    let data = if header { &lines[1..] } else { &lines[..] };
    let mut pairs = Vec::with_capacity(data.len());
    for (i, &(line, text)) in data.iter().enumerate() {
        let row = i + 1;
        if csv {
            let fields: Vec<&str> = text.split(',').collect();
            if fields.len() != 2 {
                return Err(IngestError {
                    source: source.to_string(),
                    row: Some((row, line)),
                    column: None,
                    message: format!("expected 2 fields (value,count), found {}", fields.len()),
                });
            }
            let value = parse_field(fields[0], "value", source, row, line, 1)?;
            let count = parse_field(fields[1], "count", source, row, line, 2)?;
            pairs.push((value, count));
        } else {
            pairs.push((parse_field(text, "value", source, row, line, 1)?, 1));
        }
    }
    if pairs.is_empty() {
        return Err(whole("input holds a header but no data rows"));
    }
    FrequencyTable::from_pairs(pairs).map_err(|e| whole(&e.to_string()))
}

/// `value,count` CSV with a header line, one row per table entry.
pub fn emit_csv(table: Option<&FrequencyTable>) -> String {
    let mut out = String::from("value,count\n");
    if let Some(t) = table {
        for &(v, c) in t.entries() {
            out.push_str(&format!("{v},{c}\n"));
        }
    }
    out
}
