//! CSV traces: one header line naming the columns, then one row per time
//! step with every value in `{:.16e}` (17 significant digits).

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::closed_loop::TraceRow;
use crate::error::{Error, Result};

pub fn header() -> String {
    TraceRow::COLUMNS.join(",")
}

/// Renders rows as CSV text.
pub fn to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity((rows.len() + 1) * 13 * 24);
    out.push_str(&header());
    out.push('\n');
    for row in rows {
        for (j, v) in row.values().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    file.write_all(to_csv(rows).as_bytes()).map_err(io)?;
    file.flush().map_err(io)
}

/// Parses CSV text produced by [`to_csv`]; the header must match exactly.
pub fn from_csv(reader: impl Read) -> Result<Vec<TraceRow>> {
    let mut lines = BufReader::new(reader).lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Trace("empty file".into()))?
        .map_err(|e| Error::Trace(e.to_string()))?;
    if first != header() {
        return Err(Error::Trace(format!("unexpected header `{first}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Trace(e.to_string()))?;
        let lineno = i + 2;
        let mut values = [0.0; 13];
        let mut n = 0;
        for field in line.split(',') {
            if n == values.len() {
                return Err(Error::Trace(format!("line {lineno}: more than 13 columns")));
            }
            values[n] = field
                .parse()
                .map_err(|_| Error::Trace(format!("line {lineno}: bad number `{field}`")))?;
            n += 1;
        }
        if n != values.len() {
            return Err(Error::Trace(format!("line {lineno}: expected 13 columns, got {n}")));
        }
        rows.push(TraceRow::from_values(values));
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_csv(file)
}

/// Checks a trace: strictly increasing time, finite entries (the funnel
/// radii may be `+inf` where `phi` vanishes) and `|e| < 1/phi0` per row.
pub fn validate_trace(rows: &[TraceRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Trace("no rows".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.values().iter().enumerate() {
            let radius = j == 6 || j == 7;
            let ok = if radius { *v == f64::INFINITY || (v.is_finite() && *v > 0.0) } else { v.is_finite() };
            if !ok {
                return Err(Error::Trace(format!(
                    "row {i}: column {} has invalid value {v}",
                    TraceRow::COLUMNS[j]
                )));
            }
        }
        if !(row.e.abs() < row.funnel0_inv) {
            return Err(Error::Trace(format!(
                "row {i} (t = {:e}): |e| = {:e} not inside the funnel radius {:e}",
                row.t,
                row.e.abs(),
                row.funnel0_inv
            )));
        }
        if i > 0 && !(row.t > rows[i - 1].t) {
            return Err(Error::Trace(format!("row {i}: time {} does not increase", row.t)));
        }
    }
    Ok(())
}
