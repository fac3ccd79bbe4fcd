// SPDX-License-Identifier: Apache-2.0
//! Vertex labels encoded as edges: either one loop per vertex, or edges from
//! a single root vertex that has no incoming edges.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Label, VertexId};
use crate::io::write::word;
use crate::rule::QuasiRule;

use super::bundled;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    /// `v -a-> v` for a vertex `v` labelled `a`.
    Loops,
    /// A fresh root `r` with `r -a-> v` for every vertex `v` labelled `a`.
    Root,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("vertex label {0} is also used as an edge label")]
    AlphabetClash(Label),
    #[error("vertex {0} has no label")]
    Unlabelled(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Encodes `vlabel` into `g`. In root mode the root gets `g.next_vertex_id()`.
pub fn encode_vertex_labels(
    g: &Graph,
    vlabel: &BTreeMap<VertexId, Label>,
    mode: LabelMode,
) -> Result<Graph, LabelError> {
    let mut out = g.clone();
    let edge_labels = g.labels();
    match mode {
        LabelMode::Loops => {
            for v in g.vertices() {
                let l = vlabel.get(&v).ok_or(LabelError::Unlabelled(v))?;
                if edge_labels.contains(l) {
                    return Err(LabelError::AlphabetClash(l.clone()));
                }
                out.push_edge(v, v, l.clone())?;
            }
        }
        LabelMode::Root => {
            let root = g.next_vertex_id()?;
            out.add_vertex(root)?;
            for v in g.vertices() {
                let l = vlabel.get(&v).ok_or(LabelError::Unlabelled(v))?;
                out.push_edge(root, v, l.clone())?;
            }
        }
    }
    Ok(out)
}

const DROP_ALL_LOOPS: &str = "
rule \"drop loops\" {
  lhs {
    node v; node root;
    type 1: ctx -> v;
    type 2: v -> ctx;
    type 3: v -> v;
    type 4: root -> v;
    type 5: root -> ctx;
  }
  rhs {
    node v; node root;
    type 1: ctx -> v;
    type 2: v -> ctx;
    type 4: root -> v;
    type 5: root -> ctx;
  }
}";

/// Drops every loop of a vertex, whatever its label, in a root-encoded graph.
/// The root is the vertex without incoming edges; the edge carrying the
/// label of `v` adheres to type edge 4.
pub fn drop_all_loops_rule() -> QuasiRule {
    bundled(DROP_ALL_LOOPS).rules.remove(0)
}

/// The loop-encoded counterpart, which needs one rule per vertex label.
pub fn drop_loops_rule_for_label(label: &str) -> QuasiRule {
    let l = word(label);
    let text = format!(
        "rule \"drop loops {l}\" {{
           lhs {{ node v; v -{l}-> v; type 1: ctx -> v; type 2: v -> ctx; type 3: v -> v; }}
           rhs {{ node v; v -{l}-> v; type 1: ctx -> v; type 2: v -> ctx; }} }}"
    );
    bundled(&text).rules.remove(0)
}
