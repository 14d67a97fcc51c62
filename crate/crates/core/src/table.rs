//! Convergence-table emission: CSV (comma, dot-decimal, LF) or markdown.
//! Column order is fixed (level, delta, tau, error, rate); errors print in
//! scientific notation with 5 significant digits, rates with 4 decimals.

use crate::error::{Error, Result};
use crate::study::{ConvergenceRecord, SplittingRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl TableFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

fn fmt_error(e: Option<f64>) -> String {
    match e {
        Some(v) => format!("{v:.4e}"),
        None => String::new(),
    }
}

fn fmt_rate(r: Option<f64>) -> String {
    match r {
        Some(v) => format!("{v:.4}"),
        None => String::new(),
    }
}

fn render(header: &[String], rows: &[Vec<String>], format: TableFormat) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            out.push_str("| ");
            out.push_str(&header.join(" | "));
            out.push_str(" |\n|");
            for _ in header {
                out.push_str(" --- |");
            }
            out.push('\n');
            for row in rows {
                out.push_str("| ");
                out.push_str(&row.join(" | "));
                out.push_str(" |\n");
            }
        }
    }
    out
}

/// One study, five fixed columns.
pub fn emit_table(records: &[ConvergenceRecord], format: TableFormat) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Config("no records to emit".into()));
    }
    let header: Vec<String> = ["level", "delta", "tau", "error", "rate"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![
                r.level.to_string(),
                format!("{:.6e}", r.delta),
                if r.tau.is_nan() {
                    String::new()
                } else {
                    format!("{:.6e}", r.tau)
                },
                fmt_error(r.error),
                fmt_rate(r.rate),
            ];
            if let Some(n) = &r.note {
                row[3] = format!("failed: {n}");
            }
            row
        })
        .collect();
    Ok(render(&header, &rows, format))
}

/// Several studies over the same level ladder side by side: one (error, rate)
/// column pair per labelled group, matching the published table layout.
pub fn emit_grouped_table(
    groups: &[(String, Vec<ConvergenceRecord>)],
    format: TableFormat,
) -> Result<String> {
    if groups.is_empty() || groups[0].1.is_empty() {
        return Err(Error::Config("no records to emit".into()));
    }
    let n_levels = groups[0].1.len();
    if groups.iter().any(|(_, g)| g.len() != n_levels) {
        return Err(Error::Config(
            "grouped emission needs matching level ladders".into(),
        ));
    }
    let mut header = vec!["delta".to_string(), "tau".to_string()];
    for (label, _) in groups {
        header.push(format!("error[{label}]"));
        header.push(format!("rate[{label}]"));
    }
    let mut rows = Vec::with_capacity(n_levels);
    for lvl in 0..n_levels {
        let base = &groups[0].1[lvl];
        let mut row = vec![format!("{:.6e}", base.delta), format!("{:.6e}", base.tau)];
        for (_, g) in groups {
            row.push(fmt_error(g[lvl].error));
            row.push(fmt_rate(g[lvl].rate));
        }
        rows.push(row);
    }
    Ok(render(&header, &rows, format))
}

/// The splitting comparison: one row per scheme, one error column per ratio.
pub fn emit_splitting_table(rows: &[SplittingRow], format: TableFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Config("no records to emit".into()));
    }
    let mut ratios: Vec<f64> = Vec::new();
    for r in rows {
        if !ratios.contains(&r.ratio) {
            ratios.push(r.ratio);
        }
    }
    let mut schemes: Vec<crate::study::SchemeKind> = Vec::new();
    for r in rows {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
    }
    let mut header = vec!["scheme".to_string()];
    for ratio in &ratios {
        header.push(format!("tau/dx={ratio}"));
    }
    let mut table = Vec::new();
    for s in &schemes {
        let mut row = vec![s.name().to_string()];
        for ratio in &ratios {
            let cell = rows
                .iter()
                .find(|r| r.scheme == *s && r.ratio == *ratio)
                .map(|r| format!("{:.4e}", r.error))
                .unwrap_or_default();
            row.push(cell);
        }
        table.push(row);
    }
    Ok(render(&header, &table, format))
}
