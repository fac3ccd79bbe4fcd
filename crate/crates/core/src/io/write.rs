// SPDX-License-Identifier: Apache-2.0
//! Serialisation. Output always carries explicit ids so that parsing it back
//! gives the identical value.

use std::fmt::Write;

use crate::graph::{Graph, UNLABELED};
use crate::rule::{QuasiRule, Scheme};

use super::lexer::is_ident_char;
use super::parser::Document;

const RESERVED: &[&str] = &["node", "type", "forbid", "ctx", "from", "fresh", "on", "lhs", "rhs", "graph", "rule", "system"];

/// A bare word if it lexes back to itself, a quoted string otherwise.
pub fn word(s: &str) -> String {
    let bare = !s.is_empty()
        && s.chars().all(is_ident_char)
        && !s.chars().all(|c| c.is_ascii_digit())
        && !RESERVED.contains(&s);
    if bare {
        s.to_string()
    } else {
        let mut out = String::from("\"");
        for c in s.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('"');
        out
    }
}

fn body(out: &mut String, g: &Graph, indent: &str) {
    for v in g.vertices() {
        let _ = writeln!(out, "{indent}node {v};");
    }
    for (id, e) in g.edges() {
        let arrow = if e.label.as_str() == UNLABELED {
            "-->".to_string()
        } else {
            format!("-{}->", word(e.label.as_str()))
        };
        let _ = writeln!(out, "{indent}{id}: {} {arrow} {};", e.src, e.tgt);
    }
}

pub fn serialize_graph(name: &str, g: &Graph) -> String {
    let mut out = format!("graph {} {{\n", word(name));
    body(&mut out, g, "  ");
    out.push_str("}\n");
    out
}

fn side(out: &mut String, s: &Scheme) {
    body(out, &s.pattern, "    ");
}

/// The fully expanded form of a rule.
pub fn serialize_rule(r: &QuasiRule) -> String {
    let mut out = format!("rule {} {{\n  lhs {{\n", word(&r.name));
    side(&mut out, &r.lhs);
    for (id, t) in r.lhs.ptype.iter() {
        let _ = writeln!(out, "    type {id}: {} -> {};", t.src, t.tgt);
    }
    out.push_str("  }\n  rhs {\n");
    for v in r.rhs.pattern.vertices() {
        let link = match r.correspondence.get(&v) {
            Some(l) if *l == v => String::new(),
            Some(l) => format!(" from {l}"),
            None if r.lhs.pattern.contains_vertex(v) => " fresh".into(),
            None => String::new(),
        };
        let _ = writeln!(out, "    node {v}{link};");
    }
    for (id, e) in r.rhs.pattern.edges() {
        let arrow = if e.label.as_str() == UNLABELED {
            "-->".to_string()
        } else {
            format!("-{}->", word(e.label.as_str()))
        };
        let _ = writeln!(out, "    {id}: {} {arrow} {};", e.src, e.tgt);
    }
    for (id, t) in r.rhs.ptype.iter() {
        let _ = writeln!(out, "    type {id}: {} -> {} from {};", t.src, t.tgt, r.trace[&id]);
    }
    out.push_str("  }\n}\n");
    out
}

pub fn serialize_document(doc: &Document) -> String {
    let mut parts = Vec::new();
    for (name, g) in &doc.graphs {
        parts.push(serialize_graph(name, g));
    }
    for r in &doc.rules {
        parts.push(serialize_rule(r));
    }
    for (name, members) in &doc.systems {
        let list: Vec<String> = members.iter().map(|m| word(m)).collect();
        parts.push(format!("system {} {{ {} }}\n", word(name), list.join(", ")));
    }
    parts.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parser::{parse_document, parse_graph};

    #[test]
    fn graph_round_trip_with_odd_labels() {
        let g = Graph::from_edges([9], [(1, 2, "a b"), (2, 2, "_"), (2, 1, "12"), (1, 1, "node"), (1, 1, "q\"")]);
        let text = serialize_graph("G", &g);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn rule_round_trip_keeps_correspondence() {
        let doc = parse_document(
            "rule r { lhs { node 1; node 2; 1 -a-> 2; type 1: ctx -> 1; }
                      rhs { node 1 fresh; node 2; node 5 from 1; type 1: ctx -> 5; } }",
        )
        .unwrap();
        let text = serialize_document(&doc);
        let back = parse_document(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(doc.rules[0].correspondence.len(), 2);
    }

    #[test]
    fn words() {
        assert_eq!(word("x1"), "x1");
        assert_eq!(word("1"), "\"1\"");
        assert_eq!(word(""), "\"\"");
        assert_eq!(word("ctx"), "\"ctx\"");
    }
}
