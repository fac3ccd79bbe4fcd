// SPDX-License-Identifier: Apache-2.0
//! Pattern embeddings and redexes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::graph::{EdgeId, Graph, Renaming, VertexId};
use crate::patch::{decompose_at, PatchDecomposition};
use crate::rule::{context_of, enumerate_adherence_maps, AdherenceMap, PatchType, QuasiRule};

/// Orders pattern vertices so that each is adjacent to an earlier one where possible.
fn vertex_order(p: &Graph) -> Vec<VertexId> {
    let mut order = Vec::with_capacity(p.vertex_count());
    let mut placed = BTreeSet::new();
    while order.len() < p.vertex_count() {
        let next = p
            .vertices()
            .filter(|v| !placed.contains(v))
            .max_by_key(|v| {
                let links = p
                    .incident_edges(*v)
                    .filter(|(_, e)| placed.contains(&e.src) || placed.contains(&e.tgt))
                    .count();
                (links, p.incident_edges(*v).count(), std::cmp::Reverse(*v))
            })
            .expect("unplaced vertex exists");
        placed.insert(next);
        order.push(next);
    }
    order
}

type LabelCounts = HashMap<(VertexId, VertexId), BTreeMap<crate::graph::Label, usize>>;

fn label_counts(g: &Graph) -> LabelCounts {
    let mut out: LabelCounts = HashMap::new();
    for (_, e) in g.edges() {
        *out.entry((e.src, e.tgt)).or_default().entry(e.label.clone()).or_default() += 1;
    }
    out
}

fn covers(host: &LabelCounts, hp: (VertexId, VertexId), pat: &LabelCounts, pp: (VertexId, VertexId)) -> bool {
    let Some(need) = pat.get(&pp) else { return true };
    let have = host.get(&hp);
    need.iter()
        .all(|(l, n)| have.and_then(|h| h.get(l)).copied().unwrap_or(0) >= *n)
}

/// All injective embeddings of `pattern` into `host`, ordered by sorted image
/// vertex ids, then sorted image edge ids, then the maps themselves.
pub fn find_pattern_embeddings(host: &Graph, pattern: &Graph) -> Vec<Renaming> {
    if pattern.vertex_count() > host.vertex_count() || pattern.edge_count() > host.edge_count() {
        return Vec::new();
    }
    let order = vertex_order(pattern);
    let hc = label_counts(host);
    let pc = label_counts(pattern);
    let mut vmaps = Vec::new();
    let mut cur = BTreeMap::new();
    let mut used = BTreeSet::new();
    vertex_search(0, &order, host, &hc, &pc, &mut cur, &mut used, &mut vmaps);

    let mut out = Vec::new();
    let pedges: Vec<(EdgeId, &crate::graph::Edge)> = pattern.edges().collect();
    for vmap in vmaps {
        let cands: Vec<Vec<EdgeId>> = pedges
            .iter()
            .map(|(_, e)| {
                let (s, t) = (vmap[&e.src], vmap[&e.tgt]);
                host.out_edges(s)
                    .filter(|(_, h)| h.tgt == t && h.label == e.label)
                    .map(|(id, _)| id)
                    .collect()
            })
            .collect();
        let mut chosen = Vec::with_capacity(pedges.len());
        let mut taken = BTreeSet::new();
        edge_search(0, &cands, &mut chosen, &mut taken, &mut |chosen| {
            let emap = pedges.iter().map(|(id, _)| *id).zip(chosen.iter().copied()).collect();
            out.push(Renaming::new(vmap.clone(), emap).expect("search keeps maps injective"));
        });
    }
    out.sort_by_cached_key(|r| {
        let mut vs: Vec<_> = r.vertex_map().values().copied().collect();
        let mut es: Vec<_> = r.edge_map().values().copied().collect();
        vs.sort();
        es.sort();
        (vs, es, r.clone())
    });
    out
}

#[allow(clippy::too_many_arguments)]
fn vertex_search(
    pos: usize,
    order: &[VertexId],
    host: &Graph,
    hc: &LabelCounts,
    pc: &LabelCounts,
    cur: &mut BTreeMap<VertexId, VertexId>,
    used: &mut BTreeSet<VertexId>,
    out: &mut Vec<BTreeMap<VertexId, VertexId>>,
) {
    if pos == order.len() {
        out.push(cur.clone());
        return;
    }
    let u = order[pos];
    for x in host.vertices() {
        if used.contains(&x) || !covers(hc, (x, x), pc, (u, u)) {
            continue;
        }
        let ok = order[..pos].iter().all(|w| {
            let y = cur[w];
            covers(hc, (x, y), pc, (u, *w)) && covers(hc, (y, x), pc, (*w, u))
        });
        if !ok {
            continue;
        }
        cur.insert(u, x);
        used.insert(x);
        vertex_search(pos + 1, order, host, hc, pc, cur, used, out);
        cur.remove(&u);
        used.remove(&x);
    }
}

fn edge_search(
    pos: usize,
    cands: &[Vec<EdgeId>],
    chosen: &mut Vec<EdgeId>,
    taken: &mut BTreeSet<EdgeId>,
    emit: &mut dyn FnMut(&[EdgeId]),
) {
    if pos == cands.len() {
        emit(chosen);
        return;
    }
    for &e in &cands[pos] {
        if taken.insert(e) {
            chosen.push(e);
            edge_search(pos + 1, cands, chosen, taken, emit);
            chosen.pop();
            taken.remove(&e);
        }
    }
}

/// A located, adherence-witnessed occurrence of a rule's left scheme.
#[derive(Clone, Debug)]
pub struct Redex<'r> {
    pub rule: &'r QuasiRule,
    /// Maps the lhs pattern onto the match.
    pub embedding: Renaming,
    pub decomposition: PatchDecomposition,
    /// The lhs patch type transported into host ids.
    pub lhs_type: PatchType,
    pub h_l: AdherenceMap,
}

impl Redex<'_> {
    /// The context vertex touched by patch edge `e` under `h_l`.
    pub fn context_of(&self, e: EdgeId) -> Option<VertexId> {
        let edge = self.decomposition.patch.edge(e)?;
        let t = self.lhs_type.get(self.h_l.get(e)?)?;
        context_of(edge, t)
    }

    /// One-line description: rule name, matched vertices and edges.
    pub fn summary(&self) -> String {
        let vs: Vec<String> = self.decomposition.matched.vertices().map(|v| v.to_string()).collect();
        let es: Vec<String> = self.decomposition.matched.edge_ids().map(|e| e.to_string()).collect();
        format!("{} at V{{{}}} E{{{}}}", self.rule.name, vs.join(","), es.join(","))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Redexes<'r> {
    pub redexes: Vec<Redex<'r>>,
    /// Set when some embedding had more adherence maps than the cap.
    pub truncated: bool,
}

/// Every embedding of the lhs pattern whose patch adheres to the lhs patch
/// type, one redex per adherence map (at most `cap` per embedding).
pub fn find_redexes<'r>(host: &Graph, rule: &'r QuasiRule, cap: usize) -> Redexes<'r> {
    let mut out = Redexes::default();
    for embedding in find_pattern_embeddings(host, &rule.lhs.pattern) {
        let Some(r) = redexes_at(host, rule, embedding, cap) else { continue };
        out.truncated |= r.truncated;
        out.redexes.extend(r.redexes);
    }
    out
}

/// Redexes for one given embedding; `None` if the embedding is not into `host`.
pub fn redexes_at<'r>(host: &Graph, rule: &'r QuasiRule, embedding: Renaming, cap: usize) -> Option<Redexes<'r>> {
    let lhs_type = rule.lhs.ptype.rename(&embedding)?;
    let mv = embedding.image_vertices();
    let me = embedding.image_edges();
    // Cheap rejection before building the decomposition.
    let quick = host.edges().all(|(id, e)| {
        me.contains(&id)
            || (!mv.contains(&e.src) && !mv.contains(&e.tgt))
            || lhs_type.iter().any(|(_, t)| {
                let end_ok = |v: VertexId, end: crate::rule::TypeEnd| match end {
                    crate::rule::TypeEnd::Context => !mv.contains(&v),
                    crate::rule::TypeEnd::Node(w) => v == w,
                };
                end_ok(e.src, t.src) && end_ok(e.tgt, t.tgt)
            })
    });
    if !quick {
        return Some(Redexes::default());
    }
    let decomposition = decompose_at(host, &mv, &me).ok()?;
    let maps = enumerate_adherence_maps(&decomposition.patch, &lhs_type, &decomposition, cap);
    let redexes = maps
        .maps
        .into_iter()
        .map(|h_l| Redex {
            rule,
            embedding: embedding.clone(),
            decomposition: decomposition.clone(),
            lhs_type: lhs_type.clone(),
            h_l,
        })
        .collect();
    Some(Redexes {
        redexes,
        truncated: maps.truncated,
    })
}

/// Whether `rule` has at least one redex in `host`.
pub fn has_redex(host: &Graph, rule: &QuasiRule) -> bool {
    find_pattern_embeddings(host, &rule.lhs.pattern)
        .into_iter()
        .any(|m| redexes_at(host, rule, m, 1).is_some_and(|r| !r.redexes.is_empty()))
}
