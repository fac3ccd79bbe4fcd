// SPDX-License-Identifier: Apache-2.0
//! Adherence of patch edges to type edges.

use std::collections::BTreeMap;

use crate::graph::{Edge, EdgeId, Graph, VertexId};
use crate::patch::{PatchDecomposition, Side};

use super::{PatchType, TypeEdge, TypeEdgeId, TypeEnd};

/// Default upper bound on the number of adherence maps enumerated per patch.
pub const DEFAULT_MAP_CAP: usize = 4096;

/// The adherence-map cap, overridable through `PGR_MAX_MAPS`.
pub fn default_map_cap() -> usize {
    std::env::var("PGR_MAX_MAPS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|n| *n > 0)
        .unwrap_or(DEFAULT_MAP_CAP)
}

fn end_adheres(d: &PatchDecomposition, v: VertexId, end: TypeEnd) -> bool {
    match d.side(v) {
        Some(Side::Context) => end == TypeEnd::Context,
        Some(Side::Match) => end == TypeEnd::Node(v),
        None => false,
    }
}

/// Whether patch edge `j` may be typed by `t`: a context endpoint needs the
/// sentinel at that end, a match endpoint needs exactly that vertex.
pub fn edge_adheres(d: &PatchDecomposition, j: &Edge, t: &TypeEdge) -> bool {
    end_adheres(d, j.src, t.src) && end_adheres(d, j.tgt, t.tgt)
}

/// A total assignment of patch edges to type edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdherenceMap(pub BTreeMap<EdgeId, TypeEdgeId>);

impl AdherenceMap {
    pub fn get(&self, e: EdgeId) -> Option<TypeEdgeId> {
        self.0.get(&e).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, TypeEdgeId)> + '_ {
        self.0.iter().map(|(e, t)| (*e, *t))
    }

    /// Patch edges mapped to `t`, in id order.
    pub fn preimage(&self, t: TypeEdgeId) -> Vec<EdgeId> {
        self.0.iter().filter(|(_, x)| **x == t).map(|(e, _)| *e).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdherenceMaps {
    pub maps: Vec<AdherenceMap>,
    /// Set when more maps exist than the cap allowed.
    pub truncated: bool,
}

/// Candidate type edges for each patch edge, in id order.
fn candidates(j: &Graph, t: &PatchType, d: &PatchDecomposition) -> Vec<(EdgeId, Vec<TypeEdgeId>)> {
    j.edges()
        .map(|(id, e)| {
            let c = t.iter().filter(|(_, te)| edge_adheres(d, e, te)).map(|(k, _)| k).collect();
            (id, c)
        })
        .collect()
}

/// All adherence maps from `j` into `t`, lexicographically ordered by
/// (patch edge id, type edge id), at most `cap` of them.
pub fn enumerate_adherence_maps(j: &Graph, t: &PatchType, d: &PatchDecomposition, cap: usize) -> AdherenceMaps {
    let cands = candidates(j, t, d);
    if cands.iter().any(|(_, c)| c.is_empty()) {
        return AdherenceMaps::default();
    }
    let mut maps = Vec::new();
    let mut idx = vec![0usize; cands.len()];
    loop {
        if maps.len() == cap {
            return AdherenceMaps { maps, truncated: true };
        }
        maps.push(AdherenceMap(cands.iter().zip(&idx).map(|((e, c), i)| (*e, c[*i])).collect()));
        // Odometer step: the last edge varies fastest.
        let mut pos = cands.len();
        loop {
            if pos == 0 {
                return AdherenceMaps { maps, truncated: false };
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < cands[pos].1.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Whether `h` is a total adherence map from `j` into `t`.
pub fn is_adherence_map(j: &Graph, t: &PatchType, d: &PatchDecomposition, h: &AdherenceMap) -> bool {
    h.len() == j.edge_count()
        && j.edges().all(|(id, e)| match h.get(id).and_then(|k| t.get(k)) {
            Some(te) => edge_adheres(d, e, te),
            None => false,
        })
}

/// The context vertex a typed patch edge touches: its source if the type
/// edge starts at the sentinel, its target if it ends there.
pub fn context_of(e: &Edge, typed_by: &TypeEdge) -> Option<VertexId> {
    if typed_by.src.is_context() {
        Some(e.src)
    } else if typed_by.tgt.is_context() {
        Some(e.tgt)
    } else {
        None
    }
}
