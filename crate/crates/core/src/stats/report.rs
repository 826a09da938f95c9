use std::io::Write;

use super::ChannelComparison;
use crate::error::{Error, Result};

const HEADERS: [&str; 6] = [
    "Channel",
    "Statistics",
    "ΔPRD Mean",
    "ΔPRD SD",
    "Significant?",
    "p-value",
];

fn cells(row: &ChannelComparison) -> [String; 6] {
    [
        row.channel.to_string(),
        row.test.kind.label().to_string(),
        format!("{:.6}", row.mean_delta),
        format!("{:.6}", row.sd_delta),
        if row.significant { "Yes" } else { "No" }.to_string(),
        format!("{:.6}", row.test.p_value),
    ]
}

/// Percentage of rows with a significant difference.
pub fn detection_rate(rows: &[ChannelComparison]) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::invalid("no channel comparisons"));
    }
    let hits = rows.iter().filter(|r| r.significant).count();
    Ok(100.0 * hits as f64 / rows.len() as f64)
}

pub fn render_csv(rows: &[ChannelComparison]) -> String {
    let mut out = HEADERS.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&cells(row).join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv<W: Write>(mut w: W, rows: &[ChannelComparison]) -> std::io::Result<()> {
    w.write_all(render_csv(rows).as_bytes())
}

/// Column-aligned table. Text columns are left aligned, numbers right aligned.
pub fn render_text(rows: &[ChannelComparison]) -> String {
    let body: Vec<[String; 6]> = rows.iter().map(cells).collect();
    let mut widths = HEADERS.map(|h| h.chars().count());
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cols: &[String]| {
        let parts: Vec<String> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let pad = widths[i] - c.chars().count();
                if matches!(i, 1 | 4) {
                    format!("{c}{}", " ".repeat(pad))
                } else {
                    format!("{}{c}", " ".repeat(pad))
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(&HEADERS.map(String::from));
    out.push('\n');
    for r in &body {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}
