// SPDX-License-Identifier: Apache-2.0
//! Graphviz export. Match elements are drawn thick and green, patch edges
//! dashed and red, context elements plain.

use std::fmt::Write;

use crate::graph::Graph;
use crate::matching::Redex;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_dot(g: &Graph, highlight: Option<&Redex<'_>>) -> String {
    let mut out = String::from("digraph G {\n");
    for v in g.vertices() {
        let style = match highlight {
            Some(r) if r.decomposition.matched.contains_vertex(v) => ", color=green, penwidth=3",
            _ => "",
        };
        let _ = writeln!(out, "  n{v} [label={}{style}];", quote(&v.to_string()));
    }
    for (id, e) in g.edges() {
        let style = match highlight {
            Some(r) if r.decomposition.matched.contains_edge(id) => ", color=green, penwidth=3",
            Some(r) if r.decomposition.patch.contains_edge(id) => ", color=red, style=dashed",
            _ => "",
        };
        let _ = writeln!(out, "  n{} -> n{} [label={}, id={}{style}];", e.src, e.tgt, quote(e.label.as_str()), quote(&format!("e{id}")));
    }
    out.push_str("}\n");
    out
}
