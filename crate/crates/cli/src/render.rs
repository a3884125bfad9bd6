use std::collections::BTreeMap;

use owi_core::protocol::QueryResult;
use owi_core::tables::RowResult;
use serde::Serialize;
use serde_json::json;

/// `x` rounded to 12 decimals, with `-0` folded into `0`.
pub fn round12(x: f64) -> f64 {
    let r: f64 = format!("{x:.12}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Fixed 12-decimal rendering used by every text format.
pub fn format_value(x: f64) -> String {
    format!("{:.12}", round12(x))
}

/// One evaluated query as rendered by `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub query: String,
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub given: Vec<String>,
    pub value: f64,
    /// Marginal entropies in bits, keyed by space-separated labels.
    pub entropies: BTreeMap<String, f64>,
    pub mode: String,
    pub copy_bases: BTreeMap<String, String>,
    pub ref_bases: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl From<&QueryResult> for OutputRecord {
    fn from(r: &QueryResult) -> Self {
        OutputRecord {
            query: r.query().describe(),
            source: r.source.clone(),
            target: r.target.clone(),
            given: r.conditioned.clone(),
            value: round12(r.value),
            entropies: r
                .entropies
                .iter()
                .filter(|(labels, _)| !labels.is_empty())
                .map(|(labels, s)| (labels.join(" "), round12(*s)))
                .collect(),
            mode: r.metadata.mode.name().to_string(),
            copy_bases: r.metadata.copy_bases.clone(),
            ref_bases: r.metadata.ref_bases.clone(),
            warnings: r.metadata.warnings.clone(),
        }
    }
}

pub fn records_text(records: &[OutputRecord]) -> String {
    records
        .iter()
        .map(|r| format!("owi {} = {}\n", r.query, format_value(r.value)))
        .collect()
}

pub fn records_json(records: &[OutputRecord]) -> String {
    let doc = json!({ "schema": 1, "records": records });
    let mut s = serde_json::to_string_pretty(&doc).expect("records serialize");
    s.push('\n');
    s
}

fn join_map(m: &BTreeMap<String, String>) -> String {
    m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    write(&mut w).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

pub fn records_csv(records: &[OutputRecord]) -> String {
    csv_string(|w| {
        w.write_record([
            "query", "source", "target", "given", "value", "mode", "copy_bases", "ref_bases", "entropies", "warnings",
        ])?;
        for r in records {
            let entropies = r
                .entropies
                .iter()
                .map(|(k, v)| format!("{k}={}", format_value(*v)))
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                r.query.as_str(),
                &r.source.join(" "),
                &r.target.join(" "),
                &r.given.join(" "),
                &format_value(r.value),
                &r.mode,
                &join_map(&r.copy_bases),
                &join_map(&r.ref_bases),
                &entropies,
                &r.warnings.join(" | "),
            ])?;
        }
        Ok(())
    })
}

struct Cell<'a> {
    row: &'a str,
    query: &'a str,
    computed: f64,
    formula: &'a str,
    expected: f64,
    diff: f64,
}

fn cells(rows: &[RowResult]) -> Vec<Cell<'_>> {
    let mut out = Vec::new();
    for r in rows {
        for ((q, &c), e) in r.columns.iter().zip(&r.computed).zip(&r.expected) {
            out.push(Cell {
                row: &r.label,
                query: q,
                computed: c,
                formula: e.formula,
                expected: e.value,
                diff: (c - e.value).abs(),
            });
        }
    }
    out
}

pub fn table_text(table: u8, d: usize, seed: u64, rows: &[RowResult], worst: f64, pass: bool) -> String {
    let cells = cells(rows);
    let head = ["row", "query", "computed", "formula", "closed form", "diff"];
    let body: Vec<[String; 6]> = cells
        .iter()
        .map(|c| {
            [
                c.row.to_string(),
                c.query.to_string(),
                format_value(c.computed),
                c.formula.to_string(),
                format_value(c.expected),
                format!("{:.1e}", c.diff),
            ]
        })
        .collect();
    let mut width = head.map(|h| h.chars().count());
    for line in &body {
        for (w, s) in width.iter_mut().zip(line) {
            *w = (*w).max(s.chars().count());
        }
    }
    let render = |cols: &[String]| {
        let mut s = String::new();
        for (k, (c, w)) in cols.iter().zip(width).enumerate() {
            if k > 0 {
                s.push_str("  ");
            }
            let pad = w - c.chars().count();
            if (2..6).contains(&k) && k != 3 {
                s.push_str(&" ".repeat(pad));
                s.push_str(c);
            } else {
                s.push_str(c);
                s.push_str(&" ".repeat(pad));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = format!("table {table}, d = {d}, seed {seed}\n");
    out.push_str(&render(&head.map(String::from)));
    for line in &body {
        out.push_str(&render(line));
    }
    out.push_str(&format!(
        "{} rows, max diff {worst:.1e}: {}\n",
        rows.len(),
        if pass { "PASS" } else { "FAIL" }
    ));
    out
}

pub fn table_json(table: u8, d: usize, seed: u64, rows: &[RowResult], worst: f64, pass: bool) -> String {
    let rows: Vec<_> = rows
        .iter()
        .map(|r| {
            let cells: Vec<_> = cells(std::slice::from_ref(r))
                .iter()
                .map(|c| {
                    json!({
                        "query": c.query,
                        "computed": round12(c.computed),
                        "formula": c.formula,
                        "closed_form": round12(c.expected),
                        "diff": c.diff,
                    })
                })
                .collect();
            json!({ "label": r.label, "cells": cells })
        })
        .collect();
    let doc = json!({
        "schema": 1,
        "table": table,
        "d": d,
        "seed": seed,
        "tolerance": crate::TABLE_TOL,
        "max_diff": worst,
        "pass": pass,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
    s.push('\n');
    s
}

pub fn table_csv(table: u8, d: usize, rows: &[RowResult]) -> String {
    csv_string(|w| {
        w.write_record(["table", "d", "row", "query", "computed", "formula", "closed_form", "diff"])?;
        for c in cells(rows) {
            w.write_record([
                table.to_string(),
                d.to_string(),
                c.row.to_string(),
                c.query.to_string(),
                format_value(c.computed),
                c.formula.to_string(),
                format_value(c.expected),
                format!("{:e}", c.diff),
            ])?;
        }
        Ok(())
    })
}
