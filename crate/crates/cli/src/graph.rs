use std::path::{Path, PathBuf};

use owi_core::protocol::CausalMatrix;
use serde_json::json;

use crate::render::{format_value, round12};

/// Edges below this are not drawn.
pub const EDGE_THRESHOLD: f64 = 1e-6;

/// `graph.dot` -> `graph.json`; a `.json` DOT path gets `.adjacency.json`.
pub fn adjacency_path(dot: &Path) -> PathBuf {
    if dot.extension().is_some_and(|e| e == "json") {
        let mut s = dot.as_os_str().to_owned();
        s.push(".adjacency.json");
        PathBuf::from(s)
    } else {
        dot.with_extension("json")
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn dot(m: &CausalMatrix) -> String {
    let mut out = String::from("digraph owi {\n  rankdir=LR;\n");
    for l in &m.labels {
        out.push_str(&format!("  {};\n", quote(l)));
    }
    for (a, b, v) in m.edges(EDGE_THRESHOLD) {
        let v = format_value(v);
        out.push_str(&format!("  {} -> {} [label=\"{v}\", weight={v}];\n", quote(&a), quote(&b)));
    }
    out.push_str("}\n");
    out
}

pub fn adjacency_json(m: &CausalMatrix) -> String {
    let matrix: Vec<Vec<Option<f64>>> = m
        .entries
        .iter()
        .map(|row| row.iter().map(|v| v.map(round12)).collect())
        .collect();
    let edges: Vec<_> = m
        .edges(EDGE_THRESHOLD)
        .into_iter()
        .map(|(a, b, v)| json!({ "source": a, "target": b, "value": round12(v) }))
        .collect();
    let chains: Vec<_> = m
        .chains
        .iter()
        .map(|c| {
            let terms: Vec<_> = c
                .terms
                .iter()
                .map(|t| json!({ "source": t.source, "given": t.given, "value": round12(t.value) }))
                .collect();
            json!({ "target": c.target, "total": round12(c.total), "terms": terms })
        })
        .collect();
    let doc = json!({
        "schema": 1,
        "nodes": m.labels,
        "threshold": EDGE_THRESHOLD,
        "matrix": matrix,
        "edges": edges,
        "row_sums": m.row_sums().into_iter().map(round12).collect::<Vec<_>>(),
        "chains": chains,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serializes");
    s.push('\n');
    s
}

pub fn summary(m: &CausalMatrix, dot: &Path, json: &Path) -> String {
    let edges = m.edges(EDGE_THRESHOLD);
    let mut out = String::new();
    for (a, b, v) in &edges {
        out.push_str(&format!("{a} -> {b} = {}\n", format_value(*v)));
    }
    out.push_str(&format!(
        "{} edges; wrote {} and {}\n",
        edges.len(),
        dot.display(),
        json.display()
    ));
    out
}
