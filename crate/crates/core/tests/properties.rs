// SPDX-License-Identifier: Apache-2.0
//! Property tests over random graphs, rules and wait-for nets.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use pgr::io::{parse_graph, serialize_graph};
use pgr::patch::validate_patch;
use pgr::rule::default_map_cap;
use pgr::systems::{build_waitfor_net, detect_deadlock, reachability_oracle, RequestSpec};
use pgr::{
    apply_at, canonical_form, decompose_at, find_redexes, is_isomorphic, patch_compose, verify_step, EdgeId, Graph,
    Renaming, VertexId,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random bijective renaming of `g` onto scattered ids.
fn scramble(g: &Graph, r: &mut ChaCha8Rng) -> Renaming {
    let mut vs: Vec<u64> = (0..g.vertex_count() as u64).map(|i| 1000 + 7 * i).collect();
    vs.shuffle(r);
    let mut es: Vec<u64> = (0..g.edge_count() as u64).map(|i| 5000 + 3 * i).collect();
    es.shuffle(r);
    let vmap: BTreeMap<VertexId, VertexId> = g.vertices().zip(vs).map(|(a, b)| (a, VertexId(b))).collect();
    let emap: BTreeMap<EdgeId, EdgeId> = g.edge_ids().zip(es).map(|(a, b)| (a, EdgeId(b))).collect();
    Renaming::new(vmap, emap).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn graph_text_round_trip(seed in any::<u64>(), n in 0u64..6, m in 0usize..10) {
        let g = common::random_graph(&mut rng(seed), n, m, &["a", "b", "_", "x y"]);
        let back = parse_graph(&serialize_graph("g", &g)).unwrap();
        prop_assert!(is_isomorphic(&g, &back));
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.edge_count(), g.edge_count());
    }

    #[test]
    fn canonical_form_ignores_ids(seed in any::<u64>(), n in 0u64..6, m in 0usize..10) {
        let mut r = rng(seed);
        let g = common::random_graph(&mut r, n, m, &["a", "b"]);
        let h = g.rename(&scramble(&g, &mut r)).unwrap();
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        prop_assert!(is_isomorphic(&g, &h));
    }

    #[test]
    fn decomposition_recomposes(seed in any::<u64>(), n in 1u64..6, m in 0usize..10) {
        let mut r = rng(seed);
        let g = common::random_graph(&mut r, n, m, &["a", "b"]);
        let mv: BTreeSet<VertexId> = g.vertices().filter(|_| r.random_bool(0.5)).collect();
        let me: BTreeSet<EdgeId> = g
            .edges()
            .filter(|(_, e)| mv.contains(&e.src) && mv.contains(&e.tgt) && r.random_bool(0.5))
            .map(|(id, _)| id)
            .collect();
        let d = decompose_at(&g, &mv, &me).unwrap();
        prop_assert!(validate_patch(&d).is_valid());
        prop_assert_eq!(patch_compose(&d).unwrap(), g.clone());
        prop_assert_eq!(d.context.vertex_count() + d.matched.vertex_count(), g.vertex_count());
        prop_assert_eq!(d.context.edge_count() + d.patch.edge_count() + d.matched.edge_count(), g.edge_count());
    }

    #[test]
    fn applied_steps_verify(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rule = common::random_rule(&mut r);
        let host = common::random_host(&mut r, &rule);
        for redex in find_redexes(&host, &rule, default_map_cap()).redexes {
            let (out, cert) = apply_at(&host, &redex).unwrap();
            prop_assert!(verify_step(&host, &out, &cert));
            // Context survives untouched.
            for v in redex.decomposition.context.vertices() {
                prop_assert!(out.contains_vertex(v));
            }
            for (id, e) in redex.decomposition.context.edges() {
                prop_assert_eq!(out.edge(id), Some(e));
            }
            prop_assert_eq!(
                out.vertex_count(),
                redex.decomposition.context.vertex_count() + rule.rhs.pattern.vertex_count()
            );
        }
    }

    #[test]
    fn redex_count_ignores_ids(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rule = common::random_rule(&mut r);
        let host = common::random_host(&mut r, &rule);
        let moved = host.rename(&scramble(&host, &mut r)).unwrap();
        let a = find_redexes(&host, &rule, default_map_cap()).redexes.len();
        let b = find_redexes(&moved, &rule, default_map_cap()).redexes.len();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn deadlock_verdict_matches_reachability(seed in any::<u64>(), p in 2usize..5, k in 0usize..4) {
        let mut r = rng(seed);
        let mut requesters: Vec<usize> = (0..p).collect();
        requesters.shuffle(&mut r);
        let specs: Vec<RequestSpec> = requesters
            .into_iter()
            .take(k)
            .map(|q| {
                let mut others: Vec<usize> = (0..p).filter(|&x| x != q).collect();
                others.shuffle(&mut r);
                let m = r.random_range(1..=others.len());
                others.truncate(m);
                RequestSpec { requester: q, targets: others, pending: r.random_range(0..=m) }
            })
            .collect();
        let net = build_waitfor_net(p, &specs).unwrap();
        let fast = detect_deadlock(&net, 10_000).unwrap();
        let slow = reachability_oracle(net.graph(), 100_000).unwrap();
        prop_assert_eq!(fast.verdict, slow.verdict());
        prop_assert_eq!(slow.normal_forms.len(), 1);
        prop_assert_eq!(canonical_form(&fast.normal_form), slow.normal_forms[0].clone());
    }
}
