// SPDX-License-Identifier: Apache-2.0
//! Isomorphism of rules.
//!
//! A rule is flattened into a single marker-labelled graph (pattern vertices,
//! one vertex per type edge, the context sentinel, and trace edges), so that
//! graph isomorphism of the encodings is exactly rule isomorphism.

use std::collections::BTreeMap;

use crate::graph::{EdgeId, Graph, Renaming, VertexId};
use crate::iso::find_isomorphism;

use super::{QuasiRule, Scheme, TypeEdgeId, TypeEnd};

/// Witness of a rule isomorphism: renamings of both patterns and the induced
/// bijections on type edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleRenaming {
    pub lhs: Renaming,
    pub rhs: Renaming,
    pub lhs_types: BTreeMap<TypeEdgeId, TypeEdgeId>,
    pub rhs_types: BTreeMap<TypeEdgeId, TypeEdgeId>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Vertex(bool, VertexId),
    Edge(bool, EdgeId),
    Type(bool, TypeEdgeId),
}

#[derive(Default)]
struct Encoding {
    graph: Graph,
    vertex_of: BTreeMap<Item, VertexId>,
    origin_v: BTreeMap<VertexId, Item>,
    origin_e: BTreeMap<EdgeId, Item>,
}

impl Encoding {
    fn fresh(&mut self, label: &str) -> VertexId {
        let v = self.graph.push_vertex().expect("small encodings");
        self.graph.push_edge(v, v, label).expect("vertex exists");
        v
    }

    fn side(&mut self, rhs: bool, s: &Scheme) {
        let (vmark, tmark, cmark) = if rhs { ("#R", "#TR", "#CR") } else { ("#L", "#TL", "#CL") };
        let ctx = self.fresh(cmark);
        for v in s.pattern.vertices() {
            let x = self.fresh(vmark);
            self.vertex_of.insert(Item::Vertex(rhs, v), x);
            self.origin_v.insert(x, Item::Vertex(rhs, v));
        }
        for (id, e) in s.pattern.edges() {
            let a = self.vertex_of[&Item::Vertex(rhs, e.src)];
            let b = self.vertex_of[&Item::Vertex(rhs, e.tgt)];
            let x = self.graph.push_edge(a, b, format!("={}", e.label).as_str()).expect("vertices exist");
            self.origin_e.insert(x, Item::Edge(rhs, id));
        }
        for (id, t) in s.ptype.iter() {
            let x = self.fresh(tmark);
            self.vertex_of.insert(Item::Type(rhs, id), x);
            self.origin_v.insert(x, Item::Type(rhs, id));
            for (end, label) in [(t.src, "#tsrc"), (t.tgt, "#ttgt")] {
                let y = match end {
                    TypeEnd::Context => ctx,
                    TypeEnd::Node(v) => self.vertex_of[&Item::Vertex(rhs, v)],
                };
                self.graph.push_edge(x, y, label).expect("vertices exist");
            }
        }
    }

    fn of(r: &QuasiRule) -> Encoding {
        let mut enc = Encoding::default();
        enc.side(false, &r.lhs);
        enc.side(true, &r.rhs);
        for (rt, lt) in &r.trace {
            let a = enc.vertex_of[&Item::Type(true, *rt)];
            let b = enc.vertex_of[&Item::Type(false, *lt)];
            enc.graph.push_edge(a, b, "#trace").expect("vertices exist");
        }
        enc
    }
}

/// A witness that `r1` and `r2` are equal up to renaming of pattern vertices,
/// pattern edges and type edges, with the context sentinel fixed and the
/// traces commuting with the renaming. Rule names and vertex correspondences
/// are not compared.
pub fn rules_isomorphic(r1: &QuasiRule, r2: &QuasiRule) -> Option<RuleRenaming> {
    if r1.lhs.ptype.len() != r2.lhs.ptype.len() || r1.rhs.ptype.len() != r2.rhs.ptype.len() {
        return None;
    }
    let e1 = Encoding::of(r1);
    let e2 = Encoding::of(r2);
    let phi = find_isomorphism(&e1.graph, &e2.graph)?;
    let mut out = RuleRenaming {
        lhs: Renaming::default(),
        rhs: Renaming::default(),
        lhs_types: BTreeMap::new(),
        rhs_types: BTreeMap::new(),
    };
    let mut vmaps: [BTreeMap<VertexId, VertexId>; 2] = Default::default();
    let mut emaps: [BTreeMap<EdgeId, EdgeId>; 2] = Default::default();
    for (a, b) in phi.vertex_map() {
        match (e1.origin_v.get(a), e2.origin_v.get(b)) {
            (Some(Item::Vertex(s, x)), Some(Item::Vertex(_, y))) => {
                vmaps[usize::from(*s)].insert(*x, *y);
            }
            (Some(Item::Type(false, x)), Some(Item::Type(_, y))) => {
                out.lhs_types.insert(*x, *y);
            }
            (Some(Item::Type(true, x)), Some(Item::Type(_, y))) => {
                out.rhs_types.insert(*x, *y);
            }
            _ => {}
        }
    }
    for (a, b) in phi.edge_map() {
        if let (Some(Item::Edge(s, x)), Some(Item::Edge(_, y))) = (e1.origin_e.get(a), e2.origin_e.get(b)) {
            emaps[usize::from(*s)].insert(*x, *y);
        }
    }
    let [lv, rv] = vmaps;
    let [le, re] = emaps;
    out.lhs = Renaming::new(lv, le).ok()?;
    out.rhs = Renaming::new(rv, re).ok()?;
    Some(out)
}
