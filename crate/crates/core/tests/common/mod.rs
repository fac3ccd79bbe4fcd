// SPDX-License-Identifier: Apache-2.0
//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use pgr::io::{parse_document, Document};
use pgr::{Graph, PatchType, QuasiRule, Scheme, TypeEdgeId, TypeEnd, VertexId};
use rand::seq::SliceRandom;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture(name: &str) -> Document {
    parse_document(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

const LABELS: [&str; 2] = ["a", "b"];

fn random_edges(rng: &mut ChaCha8Rng, g: &mut Graph, vs: &[VertexId], max: usize) {
    if vs.is_empty() {
        return;
    }
    for _ in 0..rng.random_range(0..=max) {
        let s = vs[rng.random_range(0..vs.len())];
        let t = vs[rng.random_range(0..vs.len())];
        let l = LABELS[rng.random_range(0..LABELS.len())];
        g.push_edge(s, t, l).unwrap();
    }
}

/// A random rule with a simple lhs patch type: up to two lhs and two rhs
/// vertices, and up to two rhs type edges per lhs type edge.
pub fn random_rule(rng: &mut ChaCha8Rng) -> QuasiRule {
    let k = rng.random_range(1..=2u64);
    let lv: Vec<VertexId> = (0..k).map(VertexId).collect();
    let mut lp = Graph::new();
    for &v in &lv {
        lp.add_vertex(v).unwrap();
    }
    random_edges(rng, &mut lp, &lv, 2);

    let mut ends: Vec<TypeEnd> = vec![TypeEnd::Context];
    ends.extend(lv.iter().map(|&v| TypeEnd::Node(v)));
    let mut pairs = Vec::new();
    for &s in &ends {
        for &t in &ends {
            if !(s.is_context() && t.is_context()) {
                pairs.push((s, t));
            }
        }
    }
    pairs.shuffle(rng);
    let mut lt = PatchType::new();
    let mut next = 1;
    for (s, t) in pairs {
        if rng.random_bool(0.5) {
            lt.insert(TypeEdgeId(next), s, t);
            next += 1;
        }
    }

    let m = rng.random_range(0..=2u64);
    let rv: Vec<VertexId> = (10..10 + m).map(VertexId).collect();
    let mut rp = Graph::new();
    for &v in &rv {
        rp.add_vertex(v).unwrap();
    }
    random_edges(rng, &mut rp, &rv, 2);

    let mut rt = PatchType::new();
    let mut trace = BTreeMap::new();
    let mut rid = 1;
    if !rv.is_empty() {
        for (kid, te) in lt.iter() {
            for _ in 0..rng.random_range(0..=2) {
                let x = rv[rng.random_range(0..rv.len())];
                let y = rv[rng.random_range(0..rv.len())];
                let (s, t) = match (te.touches_context(), rng.random_range(0..3)) {
                    (true, 0) => (TypeEnd::Context, TypeEnd::Node(x)),
                    (true, 1) => (TypeEnd::Node(x), TypeEnd::Context),
                    _ => (TypeEnd::Node(x), TypeEnd::Node(y)),
                };
                rt.insert(TypeEdgeId(rid), s, t);
                trace.insert(TypeEdgeId(rid), kid);
                rid += 1;
            }
        }
    }
    QuasiRule::new(
        "random",
        Scheme {
            pattern: lp,
            ptype: lt,
        },
        Scheme {
            pattern: rp,
            ptype: rt,
        },
        trace,
        BTreeMap::new(),
    )
    .expect("generated rule is valid")
}

/// A host of at most four vertices that contains the lhs pattern of `rule`
/// plus random extra edges.
pub fn random_host(rng: &mut ChaCha8Rng, rule: &QuasiRule) -> Graph {
    let mut g = rule.lhs.pattern.clone();
    let have = g.vertex_count() as u64;
    let total = rng.random_range(have..=4);
    for v in have..total {
        g.add_vertex(VertexId(20 + v)).unwrap();
    }
    let vs: Vec<VertexId> = g.vertices().collect();
    random_edges(rng, &mut g, &vs, 4);
    g
}

/// A random graph on `n` vertices with up to `m` edges over `labels`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: u64, m: usize, labels: &[&str]) -> Graph {
    let mut g = Graph::new();
    for v in 0..n {
        g.add_vertex(VertexId(v)).unwrap();
    }
    if n == 0 {
        return g;
    }
    for _ in 0..rng.random_range(0..=m) {
        let s = VertexId(rng.random_range(0..n));
        let t = VertexId(rng.random_range(0..n));
        g.push_edge(s, t, labels[rng.random_range(0..labels.len())]).unwrap();
    }
    g
}
