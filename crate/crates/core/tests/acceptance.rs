// SPDX-License-Identifier: Apache-2.0
//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use pgr::io::{parse_document, serialize_document, Document};
use pgr::matching::has_redex;
use pgr::rewrite::{apply_at_with, brute_force_step_oracle, explore, ApplyOptions, ExploreLimits, OracleError};
use pgr::rule::{default_map_cap, enumerate_adherence_maps, import_dpo, import_spo, rules_isomorphic, Morphism};
use pgr::systems::waitfor::{small_waitfor_nets, waitfor_violations};
use pgr::systems::{
    detect_deadlock, ds_initial_network, explore_ds, reachability_oracle, waitfor_grammar, DsLimits, Verdict,
    WaitForNet, WaitForPhase,
};
use pgr::systems::{DS_RULES, ELEMENTARY_RULES, WAITFOR_RULES};
use pgr::{
    apply_at, canonical_form, find_redexes, is_isomorphic, verify_step, Graph, PatchDecomposition, PatchType,
    TypeEdgeId, TypeEnd, VertexId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Applies the single redex of `rule` on `host`.
fn apply_unique(doc: &Document, host: &str, rule: &str) -> Result<Graph, String> {
    let g = doc.graph(host).ok_or(format!("no graph {host}"))?;
    let r = doc.rule(rule).ok_or(format!("no rule {rule}"))?;
    let found = find_redexes(g, r, default_map_cap());
    ensure(found.redexes.len() == 1, || format!("{rule}: {} redexes on {host}", found.redexes.len()))?;
    let (out, cert) = apply_at(g, &found.redexes[0]).map_err(|e| e.to_string())?;
    ensure(verify_step(g, &out, &cert), || format!("{rule}: step does not verify"))?;
    Ok(out)
}

fn figure_rules() -> Outcome {
    let doc = common::fixture("figures.pgr");
    let cases = [
        ("G", "delete", "after_delete"),
        ("G", "redirect", "after_redirect"),
        ("G", "duplicate", "after_duplicate"),
        ("G", "invert_and_pull", "after_invert_and_pull"),
        ("Gf", "node_duplication", "after_node_duplication"),
    ];
    for (host, rule, want) in cases {
        let got = apply_unique(&doc, host, rule)?;
        let want_g = doc.graph(want).ok_or(format!("no graph {want}"))?;
        ensure(is_isomorphic(&got, want_g), || format!("{rule} on {host} is not {want}"))?;
    }
    let iso = doc.rule("isolated").ok_or("no rule isolated")?;
    let g = doc.graph("G").ok_or("no graph G")?;
    ensure(!has_redex(g, iso), || "isolated-node rule matched a connected vertex".into())?;
    Ok(format!("{} figure steps reproduced; patch-free rule blocked", cases.len()))
}

fn four_node_application() -> Outcome {
    let doc = common::fixture("application.pgr");
    let got = apply_unique(&doc, "host", "moves")?;
    let want = doc.graph("result").ok_or("no graph result")?;
    ensure(is_isomorphic(&got, want), || "result differs from the expected graph".into())?;
    Ok(format!("{} vertices, {} edges", got.vertex_count(), got.edge_count()))
}

type TypeShape = (TypeEnd, TypeEnd);

/// Matched vertices 0 and 1, one context vertex 5. Every patch edge shape
/// and every type edge shape is indexed the same way.
fn shapes() -> (Vec<(VertexId, VertexId)>, Vec<TypeShape>) {
    let host = [VertexId(5), VertexId(0), VertexId(1)];
    let ends = [TypeEnd::Context, TypeEnd::Node(VertexId(0)), TypeEnd::Node(VertexId(1))];
    let mut es = Vec::new();
    let mut ts = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i == 0 && j == 0 {
                continue;
            }
            es.push((host[i], host[j]));
            ts.push((ends[i], ends[j]));
        }
    }
    (es, ts)
}

/// Multisets of size `len` over `0..n`, as non-decreasing index vectors.
fn multisets(n: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for m in multisets(n, len - 1) {
        let lo = m.last().copied().unwrap_or(0);
        for x in lo..n {
            let mut m2 = m.clone();
            m2.push(x);
            out.push(m2);
        }
    }
    out
}

fn adherence_exhaustive() -> Outcome {
    let (es, ts) = shapes();
    let n = es.len();
    let mut matched = Graph::new();
    matched.add_vertex(VertexId(0)).unwrap();
    matched.add_vertex(VertexId(1)).unwrap();
    let mut context = Graph::new();
    context.add_vertex(VertexId(5)).unwrap();

    let patches: Vec<Vec<usize>> = (0..=6).flat_map(|k| multisets(n, k)).collect();
    // Simple types with up to four edges, plus every type that doubles
    // one or two distinct type edges.
    let mut types: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() <= 4 {
            types.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    let simple = types.len();
    for a in 0..n {
        types.push(vec![a, a]);
        for b in a + 1..n {
            types.push(vec![a, a, b, b]);
        }
    }

    let mut checked = 0usize;
    for ty in &types {
        let mut t = PatchType::new();
        for (k, &s) in ty.iter().enumerate() {
            t.insert(TypeEdgeId(k as u64 + 1), ts[s].0, ts[s].1);
        }
        let max_patch = if ty.len() > 2 && ty.len() == 2 * ty.iter().collect::<BTreeSet<_>>().len() { 4 } else { 6 };
        for p in patches.iter().filter(|p| p.len() <= max_patch) {
            let mut j = Graph::new();
            for &s in p {
                let (a, b) = es[s];
                j.ensure_vertex(a);
                j.ensure_vertex(b);
                j.push_edge(a, b, "x").unwrap();
            }
            let d = PatchDecomposition {
                context: context.clone(),
                patch: j.clone(),
                matched: matched.clone(),
            };
            // Shape s can only be typed by type edges of shape s.
            let expected: usize = p.iter().map(|s| ty.iter().filter(|x| *x == s).count()).product();
            let got = enumerate_adherence_maps(&j, &t, &d, usize::MAX);
            ensure(!got.truncated && got.maps.len() == expected, || {
                format!("type {ty:?}, patch {p:?}: {} maps, expected {expected}", got.maps.len())
            })?;
            let distinct: BTreeSet<_> = got.maps.iter().collect();
            ensure(distinct.len() == got.maps.len(), || format!("duplicate maps for {ty:?} / {p:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{simple} simple and {} doubled types, {checked} (type, patch) pairs", types.len() - simple))
}

fn determinism_random() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut instances = 0usize;
    let mut skipped = 0usize;
    let mut attempts = 0usize;
    while instances < 200 {
        attempts += 1;
        ensure(attempts < 20_000, || format!("only {instances} instances generated"))?;
        let rule = common::random_rule(&mut rng);
        let host = common::random_host(&mut rng, &rule);
        let found = find_redexes(&host, &rule, default_map_cap());
        ensure(!found.truncated, || "adherence cap hit on a deterministic rule".into())?;
        for redex in &found.redexes {
            ensure(redex.h_l.len() == redex.decomposition.patch.edge_count(), || "partial adherence map".into())?;
            let (g1, cert) = apply_at(&host, redex).map_err(|e| e.to_string())?;
            ensure(verify_step(&host, &g1, &cert), || format!("step does not verify: {}", redex.summary()))?;
            let ceiling = host.id_ceiling().map_err(|e| e.to_string())?;
            let opts = ApplyOptions {
                fresh_base: Some(ceiling + 1000),
                shuffle_seed: Some(attempts as u64),
            };
            let (g2, _) = apply_at_with(&host, redex, opts).map_err(|e| e.to_string())?;
            ensure(is_isomorphic(&g1, &g2), || format!("fresh ids changed the result: {}", redex.summary()))?;
            match brute_force_step_oracle(&host, redex, 6) {
                Ok(classes) => {
                    ensure(classes == vec![canonical_form(&g1)], || {
                        format!("oracle found {} classes for {}", classes.len(), redex.summary())
                    })?;
                    instances += 1;
                }
                Err(OracleError::BoundTooSmall { .. }) => skipped += 1,
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(format!("{instances} redexes agree with the oracle ({skipped} over the size bound)"))
}

const QUASI: &str = "
rule either {
  lhs { node 1; node 2; type 1: 1 -> 2; type 2: 1 -> 2; }
  rhs { node 1; node 2; type 1: 1 -> 2; }
}
";

fn quasi_map_count() -> Outcome {
    let doc = parse_document(QUASI).map_err(|e| e.to_string())?;
    let rule = doc.rule("either").ok_or("no rule")?;
    ensure(!rule.deterministic, || "rule with a repeated type edge is marked deterministic".into())?;
    let mut counts = Vec::new();
    for n in 0..=4u32 {
        let mut host = Graph::new();
        host.add_vertex(VertexId(10)).unwrap();
        host.add_vertex(VertexId(20)).unwrap();
        for _ in 0..n {
            host.push_edge(VertexId(10), VertexId(20), "a").unwrap();
        }
        let found = find_redexes(&host, rule, 1 << 10);
        let forward = found
            .redexes
            .iter()
            .filter(|r| r.embedding.vertex(VertexId(1)) == Some(VertexId(10)))
            .count();
        ensure(forward == 1 << n, || format!("{n} parallel edges: {forward} maps, expected {}", 1 << n))?;
        counts.push(forward);
    }
    Ok(format!("map counts {counts:?}"))
}

fn dangling_import() -> Outcome {
    let l = Graph::from_edges([0], [(0, 0, "x")]);
    let k = Graph::new();
    let r = Graph::new();
    let phi = Morphism::new(BTreeMap::new(), BTreeMap::new());
    let psi = Morphism::new(BTreeMap::new(), BTreeMap::new());
    let dpo = import_dpo("del", &l, &k, &r, &phi, &psi, true).map_err(|e| e.to_string())?;
    let spo = import_spo("del", &l, &k, &r, &phi, &psi).map_err(|e| e.to_string())?;

    let clean = Graph::from_edges([0, 1], [(0, 0, "x")]);
    ensure(has_redex(&clean, &dpo), || "DPO import blocked without dangling edges".into())?;

    let host = Graph::from_edges([0, 1], [(0, 0, "x"), (1, 0, "a"), (0, 1, "b")]);
    let d = find_redexes(&host, &dpo, default_map_cap()).redexes.len();
    ensure(d == 0, || format!("DPO import has {d} redexes despite dangling edges"))?;
    let s = find_redexes(&host, &spo, default_map_cap());
    ensure(s.redexes.len() == 1, || format!("SPO import has {} redexes", s.redexes.len()))?;
    let (out, cert) = apply_at(&host, &s.redexes[0]).map_err(|e| e.to_string())?;
    ensure(verify_step(&host, &out, &cert), || "SPO step does not verify".into())?;
    let want = Graph::from_edges([1], []);
    ensure(is_isomorphic(&out, &want), || "SPO step kept dangling edges".into())?;
    Ok("DPO blocked, SPO deletes the dangling edges".into())
}

fn waitfor() -> Outcome {
    let grammar = explore(
        &Graph::new(),
        &waitfor_grammar(),
        ExploreLimits {
            max_depth: Some(6),
            max_states: 200_000,
        },
    )
    .map_err(|e| e.to_string())?;
    for g in &grammar.states {
        let v = waitfor_violations(g, WaitForPhase::Grammar);
        ensure(v.is_empty(), || format!("grammar produced an invalid net: {}", v[0]))?;
    }

    let nets = small_waitfor_nets(4, 2);
    let mut deadlocked = 0usize;
    for g in &nets {
        let oracle = reachability_oracle(g, 100_000).map_err(|e| e.to_string())?;
        ensure(oracle.non_shrinking_steps == 0, || "a detection step did not shrink the net".into())?;
        ensure(oracle.normal_forms.len() == 1, || format!("{} normal forms", oracle.normal_forms.len()))?;
        let net = WaitForNet::new(g.clone()).map_err(|e| e.to_string())?;
        let rep = detect_deadlock(&net, 10_000).map_err(|e| e.to_string())?;
        ensure(rep.verdict == oracle.verdict(), || "strategy and oracle disagree".into())?;
        ensure(canonical_form(&rep.normal_form) == oracle.normal_forms[0], || "normal forms differ".into())?;
        deadlocked += usize::from(rep.verdict == Verdict::Deadlocked);
    }

    let doc = common::fixture("waitfor_nets.pgr");
    for (name, want) in [("chain", Verdict::DeadlockFree), ("cycle", Verdict::Deadlocked)] {
        let net = WaitForNet::new(doc.graph(name).ok_or("missing net")?.clone()).map_err(|e| e.to_string())?;
        let rep = detect_deadlock(&net, 10_000).map_err(|e| e.to_string())?;
        ensure(rep.verdict == want, || format!("{name}: {:?}", rep.verdict))?;
    }
    Ok(format!(
        "{} grammar states valid; {} nets ({deadlocked} deadlocked) confluent and terminating",
        grammar.states.len(),
        nets.len()
    ))
}

fn dijkstra_scholten() -> Outcome {
    let doc = common::fixture("line3.pgr");
    let topo = doc.graph("line3").ok_or("no graph line3")?;
    let links: Vec<(u64, u64)> = topo.edges().map(|(_, e)| (e.src.0, e.tgt.0)).collect();
    let g = ds_initial_network(&links, 0).map_err(|e| e.to_string())?;
    let ex = explore_ds(&g, DsLimits::default()).map_err(|e| e.to_string())?;
    ensure(ex.complete, || "exploration hit a limit".into())?;
    ensure(ex.violations.is_empty(), || format!("{} states announce early", ex.violations.len()))?;
    ensure(ex.announce_states > 0, || "announce never enabled".into())?;
    Ok(format!("{} states, announce in {}, no violations", ex.states, ex.announce_states))
}

fn same_content(a: &Document, b: &Document) -> bool {
    a.graphs == b.graphs && a.rules == b.rules && a.systems == b.systems
}

fn formats_and_shorthand() -> Outcome {
    let mut texts: Vec<(String, String)> = ["figures.pgr", "application.pgr", "shorthand.pgr", "waitfor_nets.pgr", "line3.pgr"]
        .iter()
        .map(|n| (n.to_string(), common::fixture_text(n)))
        .collect();
    for (n, t) in [("waitfor", WAITFOR_RULES), ("ds", DS_RULES), ("elementary", ELEMENTARY_RULES)] {
        texts.push((n.to_string(), t.to_string()));
    }
    for (name, text) in &texts {
        let d1 = parse_document(text).map_err(|e| format!("{name}: {e}"))?;
        let s1 = serialize_document(&d1);
        let d2 = parse_document(&s1).map_err(|e| format!("{name} reparse: {e}"))?;
        ensure(same_content(&d1, &d2), || format!("{name}: content changed"))?;
        ensure(serialize_document(&d2) == s1, || format!("{name}: serialization not stable"))?;
    }

    let doc = common::fixture("shorthand.pgr");
    let pairs = ["merge", "copy", "split", "black"];
    for p in pairs {
        let short = doc.rule(&format!("{p}_short")).ok_or(format!("no {p}_short"))?;
        let full = doc.rule(&format!("{p}_full")).ok_or(format!("no {p}_full"))?;
        ensure(rules_isomorphic(short, full).is_some(), || format!("{p}: shorthand differs from full form"))?;
    }
    let elem = parse_document(ELEMENTARY_RULES).map_err(|e| e.to_string())?;
    let merge = elem.rule("merge").ok_or("no bundled merge")?;
    ensure(rules_isomorphic(doc.rule("merge_full").unwrap(), merge).is_some(), || "bundled merge differs".into())?;
    Ok(format!("{} texts round-trip; {} shorthand pairs expand correctly", texts.len(), pairs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("figure rules on the example host", figure_rules),
        ("four-node rule application", four_node_application),
        ("adherence maps, exhaustive", adherence_exhaustive),
        ("deterministic steps agree with the oracle", determinism_random),
        ("quasi rule map counts", quasi_map_count),
        ("DPO and SPO imports on dangling edges", dangling_import),
        ("wait-for grammar and deadlock detection", waitfor),
        ("Dijkstra-Scholten safety on a line", dijkstra_scholten),
        ("format round trip and shorthand", formats_and_shorthand),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
