// SPDX-License-Identifier: Apache-2.0
//! Graph isomorphism and canonical forms.
//!
//! `find_isomorphism` is a plain backtracking search over signature-compatible
//! vertex candidates; once the vertex map is fixed, parallel edges between the
//! same ordered pair are paired off by label. `canonical_form` uses colour
//! refinement with individualisation, pruning branches that are related by a
//! transposition automorphism.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::graph::{EdgeId, Graph, Label, Renaming, VertexId};

type PairIndex = HashMap<(VertexId, VertexId), Vec<(Label, EdgeId)>>;
/// Colour, then sorted (direction, label rank, neighbour colour) triples.
type Refined = (u32, Vec<(u8, u32, u32)>);
/// Encoded edge list and the colouring that produced it.
type Candidate = (Vec<(u32, u32, u32)>, Vec<u32>);

fn pair_index(g: &Graph) -> PairIndex {
    let mut idx: PairIndex = HashMap::new();
    for (id, e) in g.edges() {
        idx.entry((e.src, e.tgt)).or_default().push((e.label.clone(), id));
    }
    for v in idx.values_mut() {
        v.sort();
    }
    idx
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    loops: Vec<Label>,
    out: Vec<Label>,
    inc: Vec<Label>,
}

fn signatures(g: &Graph) -> BTreeMap<VertexId, Signature> {
    let mut sig: BTreeMap<VertexId, Signature> = g
        .vertices()
        .map(|v| {
            (
                v,
                Signature {
                    loops: vec![],
                    out: vec![],
                    inc: vec![],
                },
            )
        })
        .collect();
    for (_, e) in g.edges() {
        if e.is_loop() {
            sig.get_mut(&e.src).unwrap().loops.push(e.label.clone());
        } else {
            sig.get_mut(&e.src).unwrap().out.push(e.label.clone());
            sig.get_mut(&e.tgt).unwrap().inc.push(e.label.clone());
        }
    }
    for s in sig.values_mut() {
        s.loops.sort();
        s.out.sort();
        s.inc.sort();
    }
    sig
}

fn labels_between(idx: &PairIndex, a: VertexId, b: VertexId) -> impl Iterator<Item = &Label> {
    idx.get(&(a, b)).into_iter().flatten().map(|(l, _)| l)
}

fn same_labels(gi: &PairIndex, g_pair: (VertexId, VertexId), hi: &PairIndex, h_pair: (VertexId, VertexId)) -> bool {
    labels_between(gi, g_pair.0, g_pair.1).eq(labels_between(hi, h_pair.0, h_pair.1))
}

/// Orders vertices so that each one (after the first of its component) is
/// adjacent to an earlier one, which lets the search prune early.
fn search_order(g: &Graph) -> Vec<VertexId> {
    let mut nbrs: BTreeMap<VertexId, BTreeSet<VertexId>> = g.vertices().map(|v| (v, BTreeSet::new())).collect();
    let mut degree: BTreeMap<VertexId, usize> = g.vertices().map(|v| (v, 0)).collect();
    for (_, e) in g.edges() {
        nbrs.get_mut(&e.src).unwrap().insert(e.tgt);
        nbrs.get_mut(&e.tgt).unwrap().insert(e.src);
        *degree.get_mut(&e.src).unwrap() += 1;
        *degree.get_mut(&e.tgt).unwrap() += 1;
    }
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut placed = BTreeSet::new();
    while order.len() < g.vertex_count() {
        let next = g
            .vertices()
            .filter(|v| !placed.contains(v))
            .max_by_key(|v| {
                let links = nbrs[v].iter().filter(|w| placed.contains(*w)).count();
                (links, degree[v], std::cmp::Reverse(*v))
            })
            .unwrap();
        placed.insert(next);
        order.push(next);
    }
    order
}

/// Returns a renaming `phi` with `g.rename(&phi) == h`, if one exists.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Renaming> {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let gs = signatures(g);
    let hs = signatures(h);
    {
        let mut a: Vec<_> = gs.values().collect();
        let mut b: Vec<_> = hs.values().collect();
        a.sort();
        b.sort();
        if a != b {
            return None;
        }
    }
    let gi = pair_index(g);
    let hi = pair_index(h);
    let order = search_order(g);
    let candidates: Vec<Vec<VertexId>> = order
        .iter()
        .map(|u| h.vertices().filter(|x| hs[x] == gs[u]).collect())
        .collect();

    let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    if !extend(0, &order, &candidates, &gi, &hi, &mut map, &mut used) {
        return None;
    }

    let mut emap = BTreeMap::new();
    for ((a, b), es) in &gi {
        let hs = &hi[&(map[a], map[b])];
        for ((_, ge), (_, he)) in es.iter().zip(hs.iter()) {
            emap.insert(*ge, *he);
        }
    }
    Some(Renaming::new(map, emap).expect("isomorphism is bijective"))
}

fn extend(
    pos: usize,
    order: &[VertexId],
    candidates: &[Vec<VertexId>],
    gi: &PairIndex,
    hi: &PairIndex,
    map: &mut BTreeMap<VertexId, VertexId>,
    used: &mut BTreeSet<VertexId>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let u = order[pos];
    for &x in &candidates[pos] {
        if used.contains(&x) {
            continue;
        }
        if !same_labels(gi, (u, u), hi, (x, x)) {
            continue;
        }
        let consistent = order[..pos].iter().all(|&w| {
            let y = map[&w];
            same_labels(gi, (u, w), hi, (x, y)) && same_labels(gi, (w, u), hi, (y, x))
        });
        if !consistent {
            continue;
        }
        map.insert(u, x);
        used.insert(x);
        if extend(pos + 1, order, candidates, gi, hi, map, used) {
            return true;
        }
        map.remove(&u);
        used.remove(&x);
    }
    false
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Dense integer view of a graph used by the canonical labelling search.
struct Dense {
    n: usize,
    labels: Vec<Label>,
    /// (src, tgt, label rank), sorted.
    edges: Vec<(u32, u32, u32)>,
    /// Per vertex: (direction, label rank, neighbour), direction 0 = out, 1 = in, 2 = loop.
    adj: Vec<Vec<(u8, u32, u32)>>,
}

impl Dense {
    fn new(g: &Graph) -> Self {
        let index: BTreeMap<VertexId, u32> = g.vertices().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let labels: Vec<Label> = g.labels().into_iter().collect();
        let rank: BTreeMap<&Label, u32> = labels.iter().enumerate().map(|(i, l)| (l, i as u32)).collect();
        let mut edges = Vec::with_capacity(g.edge_count());
        let mut adj = vec![Vec::new(); g.vertex_count()];
        for (_, e) in g.edges() {
            let (s, t, l) = (index[&e.src], index[&e.tgt], rank[&e.label]);
            edges.push((s, t, l));
            if s == t {
                adj[s as usize].push((2, l, t));
            } else {
                adj[s as usize].push((0, l, t));
                adj[t as usize].push((1, l, s));
            }
        }
        edges.sort_unstable();
        Dense {
            n: g.vertex_count(),
            labels,
            edges,
            adj,
        }
    }

    fn initial_colours(&self) -> Vec<u32> {
        let sigs: Vec<Vec<(u8, u32)>> = self
            .adj
            .iter()
            .map(|a| {
                let mut s: Vec<(u8, u32)> = a.iter().map(|(d, l, _)| (*d, *l)).collect();
                s.sort_unstable();
                s
            })
            .collect();
        rank_by(&sigs)
    }

    /// Iterated colour refinement until the number of classes is stable.
    fn refine(&self, mut colours: Vec<u32>) -> Vec<u32> {
        let mut classes = count_classes(&colours);
        loop {
            let sigs: Vec<Refined> = (0..self.n)
                .map(|v| {
                    let mut s: Vec<(u8, u32, u32)> =
                        self.adj[v].iter().map(|(d, l, w)| (*d, *l, colours[*w as usize])).collect();
                    s.sort_unstable();
                    (colours[v], s)
                })
                .collect();
            let next = rank_by(&sigs);
            let next_classes = count_classes(&next);
            colours = next;
            if next_classes == classes {
                return colours;
            }
            classes = next_classes;
        }
    }

    fn encode(&self, colours: &[u32]) -> Vec<(u32, u32, u32)> {
        let mut enc: Vec<(u32, u32, u32)> = self
            .edges
            .iter()
            .map(|(s, t, l)| (colours[*s as usize], colours[*t as usize], *l))
            .collect();
        enc.sort_unstable();
        enc
    }

    /// Whether swapping `a` and `b` maps the edge multiset onto itself.
    fn transposition_is_automorphism(&self, a: u32, b: u32) -> bool {
        let swap = |x: u32| {
            if x == a {
                b
            } else if x == b {
                a
            } else {
                x
            }
        };
        let mut moved: Vec<(u32, u32, u32)> = self.edges.iter().map(|(s, t, l)| (swap(*s), swap(*t), *l)).collect();
        moved.sort_unstable();
        moved == self.edges
    }

    fn search(&self, colours: Vec<u32>, best: &mut Option<Candidate>) {
        let mut members: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (v, c) in colours.iter().enumerate() {
            members.entry(*c).or_default().push(v as u32);
        }
        let Some((&cell, cands)) = members.iter().find(|(_, m)| m.len() > 1) else {
            let enc = self.encode(&colours);
            if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                *best = Some((enc, colours));
            }
            return;
        };
        let mut reps: Vec<u32> = Vec::new();
        for &v in cands {
            if reps.iter().any(|&r| self.transposition_is_automorphism(r, v)) {
                continue;
            }
            reps.push(v);
        }
        for v in reps {
            let split: Vec<u32> = colours
                .iter()
                .enumerate()
                .map(|(w, &c)| if c > cell || (c == cell && w as u32 != v) { c + 1 } else { c })
                .collect();
            let refined = self.refine(split);
            self.search(refined, best);
        }
    }
}

fn count_classes(colours: &[u32]) -> usize {
    colours.iter().collect::<BTreeSet<_>>().len()
}

fn rank_by<T: Ord>(sigs: &[T]) -> Vec<u32> {
    let distinct: BTreeSet<&T> = sigs.iter().collect();
    let rank: BTreeMap<&T, u32> = distinct.into_iter().enumerate().map(|(i, s)| (s, i as u32)).collect();
    sigs.iter().map(|s| rank[s]).collect()
}

/// Deterministic representative of the isomorphism class of `g`: vertices are
/// numbered `0..n` and edges `0..m` in canonical order, so that
/// `canonical_form(g) == canonical_form(h)` exactly when `g ≈ h`.
pub fn canonical_form(g: &Graph) -> Graph {
    canonical_labelling(g).0
}

/// Canonical form together with the renaming that produces it from `g`.
pub fn canonical_labelling(g: &Graph) -> (Graph, Renaming) {
    let dense = Dense::new(g);
    if dense.n == 0 {
        return (Graph::new(), Renaming::default());
    }
    let start = dense.refine(dense.initial_colours());
    let mut best = None;
    dense.search(start, &mut best);
    let (enc, colours) = best.expect("search visits at least one leaf");

    let originals: Vec<VertexId> = g.vertices().collect();
    let vmap: BTreeMap<VertexId, VertexId> = originals
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, VertexId(u64::from(colours[i]))))
        .collect();

    let mut out = Graph::new();
    for i in 0..dense.n {
        out.ensure_vertex(VertexId(i as u64));
    }
    for (i, (s, t, l)) in enc.iter().enumerate() {
        out.add_edge(EdgeId(i as u64), VertexId(u64::from(*s)), VertexId(u64::from(*t)), dense.labels[*l as usize].clone())
            .expect("canonical edge endpoints exist");
    }

    // Pair original edges with canonical ones bucket by bucket.
    let mut buckets: BTreeMap<(VertexId, VertexId, Label), Vec<EdgeId>> = BTreeMap::new();
    for (id, e) in g.edges() {
        buckets.entry((vmap[&e.src], vmap[&e.tgt], e.label.clone())).or_default().push(id);
    }
    let mut emap = BTreeMap::new();
    for (id, e) in out.edges() {
        let b = buckets.get_mut(&(e.src, e.tgt, e.label.clone())).expect("bucket exists");
        emap.insert(b.remove(0), id);
    }
    (out, Renaming::new(vmap, emap).expect("canonical labelling is bijective"))
}
