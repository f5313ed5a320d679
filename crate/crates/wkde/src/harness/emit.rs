//! CSV emission and re-parsing with 17-significant-digit round-trip
//! serialization.
//!
//! Three files per run: `rows.csv` (one line per replication),
//! `summary.csv` (per-`n` quantiles and theory-comparison columns) and
//! `config.txt` (echo of the parsed configuration).  Fields are quoted
//! RFC-4180 style only when they contain a separator.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

use super::runner::{ExperimentResult, NSummary, ResultRow};
use super::theory::TheoryComparison;

pub const ROWS_FILE: &str = "rows.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_FILE: &str = "config.txt";

pub const ROWS_HEADER: &str = "n,rep,T,M,central,residual,argmax,seed_hi,seed_lo";

/// Shortest-faithful 17-significant-digit form.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

fn parse_f64(field: &str) -> Result<f64> {
    match field {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|_| Error::InvalidConfig(format!("bad numeric field `{other}`"))),
    }
}

fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn rows_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96 + 64);
    out.push_str(ROWS_HEADER);
    out.push('\n');
    for r in rows {
        let central = r.central.map(fmt_g17).unwrap_or_else(|| "nan".into());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.rep,
            fmt_g17(r.statistic),
            fmt_g17(r.max_term),
            central,
            fmt_g17(r.residual),
            fmt_g17(r.argmax),
            r.seed_hi,
            r.seed_lo
        );
    }
    out
}

pub fn summary_csv(summaries: &[NSummary], cmp: Option<&TheoryComparison>) -> String {
    let mut out = String::new();
    out.push_str("n,count,failed");
    for name in ["T", "M", "resid"] {
        for q in ["q05", "q25", "q50", "q75", "q95"] {
            let _ = write!(out, ",{name}_{q}");
        }
    }
    out.push_str(",rel_dev,ks,median_abs_residual\n");
    for (i, s) in summaries.iter().enumerate() {
        let _ = write!(out, "{},{},{}", s.n, s.count, s.failed);
        for block in [&s.stat_q, &s.max_term_q, &s.residual_q] {
            for v in block.iter() {
                let _ = write!(out, ",{}", fmt_g17(*v));
            }
        }
        let (rel_dev, ks, mar) = match cmp.and_then(|c| c.per_n.get(i)) {
            Some(row) => (
                row.rel_dev.map(fmt_g17).unwrap_or_else(|| "nan".into()),
                row.ks.map(fmt_g17).unwrap_or_else(|| "nan".into()),
                fmt_g17(row.median_abs_residual),
            ),
            None => ("nan".into(), "nan".into(), "nan".into()),
        };
        let _ = writeln!(out, ",{rel_dev},{ks},{mar}");
    }
    out
}

/// Write `rows.csv`, `summary.csv` and `config.txt` under `dir`.
pub fn emit(res: &ExperimentResult, cmp: Option<&TheoryComparison>, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let rows_path = dir.join(ROWS_FILE);
    let summary_path = dir.join(SUMMARY_FILE);
    let config_path = dir.join(CONFIG_FILE);
    write_file(&rows_path, &rows_csv(&res.rows))?;
    write_file(&summary_path, &summary_csv(&res.summaries, cmp))?;
    write_file(&config_path, &res.config_echo)?;
    Ok(vec![rows_path, summary_path, config_path])
}

/// Split one CSV line honoring RFC-4180 quoting.
fn split_csv(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => {
                fields.push(std::mem::take(&mut cur));
            }
            other => cur.push(other),
        }
    }
    fields.push(cur);
    fields
}

/// Parse a `rows.csv` produced by [`emit`].
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == ROWS_HEADER => {}
        other => {
            return Err(Error::InvalidConfig(format!(
                "unexpected rows header {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let f = split_csv(line);
        if f.len() != 9 {
            return Err(Error::InvalidConfig(format!(
                "row with {} fields (expected 9)",
                f.len()
            )));
        }
        let statistic = parse_f64(&f[2])?;
        let central = parse_f64(&f[4])?;
        rows.push(ResultRow {
            n: f[0].parse().map_err(|_| Error::InvalidConfig("bad n".into()))?,
            rep: f[1].parse().map_err(|_| Error::InvalidConfig("bad rep".into()))?,
            statistic,
            max_term: parse_f64(&f[3])?,
            central: if central.is_nan() { None } else { Some(central) },
            residual: parse_f64(&f[5])?,
            argmax: parse_f64(&f[6])?,
            seed_hi: f[7].parse().map_err(|_| Error::InvalidConfig("bad seed_hi".into()))?,
            seed_lo: f[8].parse().map_err(|_| Error::InvalidConfig("bad seed_lo".into()))?,
            error: if statistic.is_nan() {
                Some("recorded failure".into())
            } else {
                None
            },
        });
    }
    Ok(rows)
}
