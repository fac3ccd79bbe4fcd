// SPDX-License-Identifier: Apache-2.0
//! Directed, edge-labelled multigraphs and graph renamings.
//!
//! Vertex and edge ids are opaque unsigned integers living in two separate
//! namespaces. All containers are ordered so that equality, hashing and
//! iteration order are fully determined by the graph's contents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Opaque vertex identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u64);

/// Opaque edge identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The label carried by edges drawn without one (process/request edges in
/// wait-for graphs, for instance).
pub const UNLABELED: &str = "_";

/// An edge label. Cheap to clone; compares by content.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(s: &str) -> Self {
        Label(Arc::from(s))
    }

    pub fn unlabeled() -> Self {
        Label::new(UNLABELED)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub tgt: VertexId,
    pub label: Label,
}

impl Edge {
    pub fn new(src: VertexId, tgt: VertexId, label: impl Into<Label>) -> Self {
        Edge {
            src,
            tgt,
            label: label.into(),
        }
    }

    pub fn is_loop(&self) -> bool {
        self.src == self.tgt
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} already exists")]
    DuplicateVertex(VertexId),
    #[error("edge {0} already exists")]
    DuplicateEdge(EdgeId),
    #[error("edge {edge} refers to unknown vertex {vertex}")]
    UnknownEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("edge id {0} occurs in both operands of a union")]
    EdgeIdClash(EdgeId),
    #[error("renaming has no image for {0}")]
    DomainGap(String),
    #[error("renaming is not injective on {0}")]
    NotInjective(String),
    #[error("selection is not a subgraph: {0}")]
    NotASubgraph(String),
    #[error("identifier space exhausted")]
    IdExhausted,
}

/// A finite directed multigraph `(V, E, src, tgt, label)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl DoubleEndedIterator<Item = (EdgeId, &Edge)> + ExactSizeIterator + '_ {
        self.edges.iter().map(|(id, e)| (*id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    /// Adds a vertex, failing if the id is taken.
    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if self.vertices.insert(v) {
            Ok(())
        } else {
            Err(GraphError::DuplicateVertex(v))
        }
    }

    /// Adds a vertex if absent. Returns whether it was inserted.
    pub fn ensure_vertex(&mut self, v: VertexId) -> bool {
        self.vertices.insert(v)
    }

    pub fn add_edge(
        &mut self,
        id: EdgeId,
        src: VertexId,
        tgt: VertexId,
        label: impl Into<Label>,
    ) -> Result<(), GraphError> {
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        for v in [src, tgt] {
            if !self.vertices.contains(&v) {
                return Err(GraphError::UnknownEndpoint { edge: id, vertex: v });
            }
        }
        self.edges.insert(id, Edge::new(src, tgt, label));
        Ok(())
    }

    /// Adds an edge under the next unused edge id and returns that id.
    pub fn push_edge(
        &mut self,
        src: VertexId,
        tgt: VertexId,
        label: impl Into<Label>,
    ) -> Result<EdgeId, GraphError> {
        let id = self.next_edge_id()?;
        self.add_edge(id, src, tgt, label)?;
        Ok(id)
    }

    /// Adds a vertex under the next unused vertex id and returns it.
    pub fn push_vertex(&mut self) -> Result<VertexId, GraphError> {
        let id = self.next_vertex_id()?;
        self.vertices.insert(id);
        Ok(id)
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.edges.remove(&id)
    }

    /// Removes a vertex together with every incident edge.
    pub fn remove_vertex(&mut self, v: VertexId) -> bool {
        if !self.vertices.remove(&v) {
            return false;
        }
        self.edges.retain(|_, e| e.src != v && e.tgt != v);
        true
    }

    pub fn next_vertex_id(&self) -> Result<VertexId, GraphError> {
        match self.vertices.iter().next_back() {
            None => Ok(VertexId(0)),
            Some(v) => v.0.checked_add(1).map(VertexId).ok_or(GraphError::IdExhausted),
        }
    }

    pub fn next_edge_id(&self) -> Result<EdgeId, GraphError> {
        match self.edges.keys().next_back() {
            None => Ok(EdgeId(0)),
            Some(e) => e.0.checked_add(1).map(EdgeId).ok_or(GraphError::IdExhausted),
        }
    }

    /// Smallest integer above every vertex id and every edge id.
    pub fn id_ceiling(&self) -> Result<u64, GraphError> {
        let v = self.next_vertex_id()?.0;
        let e = self.next_edge_id()?.0;
        Ok(v.max(e))
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.edges.values().map(|e| e.label.clone()).collect()
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges().filter(move |(_, e)| e.src == v)
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges().filter(move |(_, e)| e.tgt == v)
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges().filter(move |(_, e)| e.src == v || e.tgt == v)
    }

    /// Number of loops at `v` carrying `label`.
    pub fn loop_count(&self, v: VertexId, label: &str) -> usize {
        self.edges
            .values()
            .filter(|e| e.src == v && e.tgt == v && e.label.as_str() == label)
            .count()
    }

    /// Componentwise union. Shared vertices fuse; edge ids must be disjoint.
    pub fn union(&self, other: &Graph) -> Result<Graph, GraphError> {
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().copied());
        for (id, e) in &other.edges {
            if out.edges.contains_key(id) {
                return Err(GraphError::EdgeIdClash(*id));
            }
            out.edges.insert(*id, e.clone());
        }
        Ok(out)
    }

    /// Applies `phi` to every vertex and edge id. Labels are unchanged.
    pub fn rename(&self, phi: &Renaming) -> Result<Graph, GraphError> {
        let mut out = Graph::new();
        for v in &self.vertices {
            out.vertices.insert(phi.vertex(*v).ok_or_else(|| GraphError::DomainGap(format!("vertex {v}")))?);
        }
        for (id, e) in &self.edges {
            let nid = phi.edge(*id).ok_or_else(|| GraphError::DomainGap(format!("edge {id}")))?;
            let src = phi.vertex(e.src).ok_or_else(|| GraphError::DomainGap(format!("vertex {}", e.src)))?;
            let tgt = phi.vertex(e.tgt).ok_or_else(|| GraphError::DomainGap(format!("vertex {}", e.tgt)))?;
            out.edges.insert(nid, Edge::new(src, tgt, e.label.clone()));
        }
        Ok(out)
    }

    /// True iff no two distinct edges share source, target and label.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.values().all(|e| seen.insert(e))
    }

    /// The subgraph with exactly the given vertices and edges. Every edge
    /// endpoint must be among `vertices` and every id must exist here.
    pub fn subgraph(
        &self,
        vertices: &BTreeSet<VertexId>,
        edges: &BTreeSet<EdgeId>,
    ) -> Result<Graph, GraphError> {
        let mut out = Graph::new();
        for v in vertices {
            if !self.vertices.contains(v) {
                return Err(GraphError::NotASubgraph(format!("vertex {v} is not in the graph")));
            }
            out.vertices.insert(*v);
        }
        for id in edges {
            let e = self
                .edges
                .get(id)
                .ok_or_else(|| GraphError::NotASubgraph(format!("edge {id} is not in the graph")))?;
            if !vertices.contains(&e.src) || !vertices.contains(&e.tgt) {
                return Err(GraphError::NotASubgraph(format!(
                    "edge {id} has an endpoint outside the selected vertices"
                )));
            }
            out.edges.insert(*id, e.clone());
        }
        Ok(out)
    }

    /// Subgraph induced by `vertices`: those vertices and all edges between them.
    pub fn induced(&self, vertices: &BTreeSet<VertexId>) -> Graph {
        Graph {
            vertices: self.vertices.intersection(vertices).copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(_, e)| vertices.contains(&e.src) && vertices.contains(&e.tgt))
                .map(|(id, e)| (*id, e.clone()))
                .collect(),
        }
    }

    /// Builds a graph from `(src, tgt, label)` triples, numbering edges from 0.
    /// Vertices are the listed ones plus all edge endpoints.
    pub fn from_edges<'a>(
        vertices: impl IntoIterator<Item = u64>,
        edges: impl IntoIterator<Item = (u64, u64, &'a str)>,
    ) -> Graph {
        let mut g = Graph::new();
        for v in vertices {
            g.vertices.insert(VertexId(v));
        }
        for (i, (s, t, l)) in edges.into_iter().enumerate() {
            g.vertices.insert(VertexId(s));
            g.vertices.insert(VertexId(t));
            g.edges.insert(EdgeId(i as u64), Edge::new(VertexId(s), VertexId(t), l));
        }
        g
    }
}

/// A pair of bijections on vertex ids and edge ids. The domains may be larger
/// than the vertex and edge sets of the graphs the renaming is applied to.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Renaming {
    vmap: BTreeMap<VertexId, VertexId>,
    emap: BTreeMap<EdgeId, EdgeId>,
}

impl Renaming {
    pub fn new(
        vmap: BTreeMap<VertexId, VertexId>,
        emap: BTreeMap<EdgeId, EdgeId>,
    ) -> Result<Self, GraphError> {
        let vimg: BTreeSet<_> = vmap.values().collect();
        if vimg.len() != vmap.len() {
            return Err(GraphError::NotInjective("vertices".into()));
        }
        let eimg: BTreeSet<_> = emap.values().collect();
        if eimg.len() != emap.len() {
            return Err(GraphError::NotInjective("edges".into()));
        }
        Ok(Renaming { vmap, emap })
    }

    pub fn identity(g: &Graph) -> Self {
        Renaming {
            vmap: g.vertices().map(|v| (v, v)).collect(),
            emap: g.edge_ids().map(|e| (e, e)).collect(),
        }
    }

    pub fn vertex(&self, v: VertexId) -> Option<VertexId> {
        self.vmap.get(&v).copied()
    }

    pub fn edge(&self, e: EdgeId) -> Option<EdgeId> {
        self.emap.get(&e).copied()
    }

    pub fn vertex_map(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.vmap
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, EdgeId> {
        &self.emap
    }

    pub fn inverse(&self) -> Renaming {
        Renaming {
            vmap: self.vmap.iter().map(|(a, b)| (*b, *a)).collect(),
            emap: self.emap.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    /// `other ∘ self`: first apply `self`, then `other`. Ids without an image
    /// under `other` are dropped.
    pub fn then(&self, other: &Renaming) -> Renaming {
        Renaming {
            vmap: self
                .vmap
                .iter()
                .filter_map(|(a, b)| other.vertex(*b).map(|c| (*a, c)))
                .collect(),
            emap: self
                .emap
                .iter()
                .filter_map(|(a, b)| other.edge(*b).map(|c| (*a, c)))
                .collect(),
        }
    }

    pub fn image_vertices(&self) -> BTreeSet<VertexId> {
        self.vmap.values().copied().collect()
    }

    pub fn image_edges(&self) -> BTreeSet<EdgeId> {
        self.emap.values().copied().collect()
    }
}
