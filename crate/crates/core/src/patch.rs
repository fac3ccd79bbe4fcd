// SPDX-License-Identifier: Apache-2.0
//! Splitting a graph into context, patch and match, and gluing it back.

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{EdgeId, Graph, GraphError, VertexId};

/// A graph cut into context `C`, patch `J` and match `M`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatchDecomposition {
    pub context: Graph,
    pub patch: Graph,
    pub matched: Graph,
}

/// Which side of a decomposition a vertex lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Context,
    Match,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatchViolation {
    SharedVertex(VertexId),
    SharedEdge(EdgeId),
    PatchEdgeClash(EdgeId),
    /// Both endpoints of the patch edge are context vertices.
    EdgeInsideContext(EdgeId),
    /// An endpoint is in neither `C` nor `M`.
    ForeignEndpoint { edge: EdgeId, vertex: VertexId },
    /// A patch vertex that is not an endpoint of any patch edge.
    IsolatedPatchVertex(VertexId),
}

impl fmt::Display for PatchViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatchViolation::SharedVertex(v) => write!(f, "vertex {v} is in both context and match"),
            PatchViolation::SharedEdge(e) => write!(f, "edge {e} is in both context and match"),
            PatchViolation::PatchEdgeClash(e) => write!(f, "patch edge {e} reuses a context or match edge id"),
            PatchViolation::EdgeInsideContext(e) => write!(f, "patch edge {e} lies inside the context"),
            PatchViolation::ForeignEndpoint { edge, vertex } => {
                write!(f, "patch edge {edge} has endpoint {vertex} outside context and match")
            }
            PatchViolation::IsolatedPatchVertex(v) => write!(f, "patch vertex {v} is not an endpoint of a patch edge"),
        }
    }
}

/// Outcome of [`validate_patch`]. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatchReport {
    pub violations: Vec<PatchViolation>,
}

impl PatchReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PatchDecomposition {
    pub fn side(&self, v: VertexId) -> Option<Side> {
        if self.matched.contains_vertex(v) {
            Some(Side::Match)
        } else if self.context.contains_vertex(v) {
            Some(Side::Context)
        } else {
            None
        }
    }
}

pub fn validate_patch(d: &PatchDecomposition) -> PatchReport {
    let mut violations = Vec::new();
    for v in d.context.vertex_set().intersection(d.matched.vertex_set()) {
        violations.push(PatchViolation::SharedVertex(*v));
    }
    for e in d.context.edge_ids().filter(|e| d.matched.contains_edge(*e)) {
        violations.push(PatchViolation::SharedEdge(e));
    }
    let mut endpoints = BTreeSet::new();
    for (id, e) in d.patch.edges() {
        if d.context.contains_edge(id) || d.matched.contains_edge(id) {
            violations.push(PatchViolation::PatchEdgeClash(id));
        }
        let mut foreign = false;
        for v in [e.src, e.tgt] {
            endpoints.insert(v);
            if d.side(v).is_none() {
                foreign = true;
                violations.push(PatchViolation::ForeignEndpoint { edge: id, vertex: v });
            }
        }
        if !foreign && d.side(e.src) == Some(Side::Context) && d.side(e.tgt) == Some(Side::Context) {
            violations.push(PatchViolation::EdgeInsideContext(id));
        }
    }
    for v in d.patch.vertices().filter(|v| !endpoints.contains(v)) {
        violations.push(PatchViolation::IsolatedPatchVertex(v));
    }
    PatchReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatchError {
    #[error("invalid patch: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<PatchViolation>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `C ·_J M`, the union of the three parts with ids preserved.
pub fn patch_compose(d: &PatchDecomposition) -> Result<Graph, PatchError> {
    let report = validate_patch(d);
    if !report.is_valid() {
        return Err(PatchError::Invalid(report.violations));
    }
    Ok(d.context.union(&d.patch)?.union(&d.matched)?)
}

/// Cuts `g` around the match `(match_vertices, match_edges)`.
pub fn decompose_at(
    g: &Graph,
    match_vertices: &BTreeSet<VertexId>,
    match_edges: &BTreeSet<EdgeId>,
) -> Result<PatchDecomposition, GraphError> {
    let matched = g.subgraph(match_vertices, match_edges)?;
    let context_vertices: BTreeSet<VertexId> = g.vertices().filter(|v| !match_vertices.contains(v)).collect();
    let context = g.induced(&context_vertices);
    let mut patch = Graph::new();
    for (id, e) in g.edges() {
        if match_edges.contains(&id) || context.contains_edge(id) {
            continue;
        }
        patch.ensure_vertex(e.src);
        patch.ensure_vertex(e.tgt);
        patch.add_edge(id, e.src, e.tgt, e.label.clone())?;
    }
    Ok(PatchDecomposition { context, patch, matched })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    /// The six-vertex composition example: C = {1,2}, M = {3..6}.
    fn example1() -> PatchDecomposition {
        let mut c = Graph::from_edges([1, 2], []);
        c.add_edge(EdgeId(0), v(2), v(1), "b").unwrap();
        let mut m = Graph::from_edges([3, 4, 5, 6], []);
        m.add_edge(EdgeId(1), v(3), v(4), "a").unwrap();
        m.add_edge(EdgeId(2), v(4), v(5), "a").unwrap();
        m.add_edge(EdgeId(3), v(5), v(6), "a").unwrap();
        m.add_edge(EdgeId(4), v(6), v(3), "a").unwrap();
        let mut j = Graph::from_edges([2, 3, 4, 5, 6], []);
        j.add_edge(EdgeId(5), v(2), v(3), "a").unwrap();
        j.add_edge(EdgeId(6), v(6), v(2), "b").unwrap();
        j.add_edge(EdgeId(7), v(4), v(5), "b").unwrap();
        j.add_edge(EdgeId(8), v(4), v(6), "b").unwrap();
        PatchDecomposition { context: c, patch: j, matched: m }
    }

    #[test]
    fn example_one_is_valid_and_composes() {
        let d = example1();
        assert!(validate_patch(&d).is_valid());
        let g = patch_compose(&d).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 9);
    }

    #[test]
    fn edge_inside_context_is_rejected() {
        let mut d = example1();
        d.patch.ensure_vertex(v(1));
        d.patch.add_edge(EdgeId(9), v(1), v(2), "x").unwrap();
        let r = validate_patch(&d);
        assert_eq!(r.violations, vec![PatchViolation::EdgeInsideContext(EdgeId(9))]);
        assert!(patch_compose(&d).is_err());
    }

    #[test]
    fn isolated_patch_vertex_is_rejected() {
        let mut d = example1();
        d.patch.ensure_vertex(v(1));
        assert_eq!(validate_patch(&d).violations, vec![PatchViolation::IsolatedPatchVertex(v(1))]);
    }

    #[test]
    fn empty_patch_is_valid() {
        let mut d = example1();
        d.patch = Graph::new();
        assert!(validate_patch(&d).is_valid());
    }

    #[test]
    fn whole_graph_match_has_empty_context_and_patch() {
        let g = Graph::from_edges([], [(1, 2, "b"), (2, 2, "a")]);
        let d = decompose_at(&g, g.vertex_set(), &g.edge_ids().collect()).unwrap();
        assert!(d.context.is_empty());
        assert!(d.patch.is_empty());
        assert_eq!(patch_compose(&d).unwrap(), g);
    }

    #[test]
    fn decompose_round_trips() {
        let g = Graph::from_edges([], [(1, 2, "b"), (1, 2, "c"), (2, 2, "a"), (2, 3, "d"), (3, 3, "e")]);
        let d = decompose_at(&g, &[v(2)].into(), &[EdgeId(2)].into()).unwrap();
        assert_eq!(d.patch.edge_count(), 3);
        assert_eq!(d.context.edge_count(), 1);
        assert_eq!(patch_compose(&d).unwrap(), g);
    }

    #[test]
    fn decompose_rejects_dangling_match_edge() {
        let g = Graph::from_edges([], [(1, 2, "b")]);
        assert!(decompose_at(&g, &[v(1)].into(), &[EdgeId(0)].into()).is_err());
    }
}
