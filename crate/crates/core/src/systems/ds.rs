// SPDX-License-Identifier: Apache-2.0
//! Dijkstra-Scholten termination detection, and exhaustive exploration of
//! its runs on small networks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use crate::iso::canonical_form;
use crate::matching::find_redexes;
use crate::rewrite::{apply_at, RewriteError, RuleSet};
use crate::rule::{default_map_cap, QuasiRule};

use super::{bundled, DS_RULES};

pub const SEND: &str = "snd b";
pub const ANNOUNCE: &str = "announce";

/// Loop label used only inside state keys to record per-process send counts.
const SENT: &str = "#sent";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DsError {
    #[error("topology has a self-loop on {0}")]
    SelfLoopInTopology(u64),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `snd b`, `rec b-1`, `rec b-2`, `rec c`, `quit`, `announce`.
pub fn dijkstra_scholten_system() -> RuleSet {
    match bundled(DS_RULES).system("ds") {
        Some(s) => s,
        None => panic!("bundled DS text lacks its system"),
    }
}

/// The start state: an `e`-edge in each direction per undirected link, and
/// `i` and `t` loops on the initiator.
pub fn ds_initial_network(links: &[(u64, u64)], initiator: u64) -> Result<Graph, DsError> {
    let mut g = Graph::new();
    let mut pairs = BTreeSet::new();
    for &(u, v) in links {
        if u == v {
            return Err(DsError::SelfLoopInTopology(u));
        }
        pairs.insert((u, v));
        pairs.insert((v, u));
    }
    g.ensure_vertex(VertexId(initiator));
    for (u, v) in pairs {
        g.ensure_vertex(VertexId(u));
        g.ensure_vertex(VertexId(v));
        g.push_edge(VertexId(u), VertexId(v), "e")?;
    }
    let i = VertexId(initiator);
    g.push_edge(i, i, "i")?;
    g.push_edge(i, i, "t")?;
    Ok(g)
}

/// True if the state is quiet: no message in transit and nobody but the
/// initiator still in the tree.
pub fn is_quiescent(g: &Graph) -> bool {
    let initiators: BTreeSet<VertexId> = g.vertices().filter(|&v| g.loop_count(v, "i") > 0).collect();
    g.edges().all(|(_, e)| match e.label.as_str() {
        "b" | "c" => false,
        "t" => initiators.contains(&e.src),
        _ => true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DsLimits {
    /// Basic messages each process may send in one run.
    pub max_sends_per_process: Option<u32>,
    /// Basic messages all processes together may send in one run.
    pub max_total_sends: Option<u32>,
    pub max_depth: Option<usize>,
    pub max_states: usize,
}

impl Default for DsLimits {
    fn default() -> Self {
        DsLimits {
            max_sends_per_process: Some(2),
            max_total_sends: None,
            max_depth: None,
            max_states: 200_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DsExploration {
    pub states: usize,
    pub transitions: usize,
    /// States in which `announce` has a redex.
    pub announce_states: usize,
    /// Announce-enabled states that are not quiescent.
    pub violations: Vec<Graph>,
    /// False if the depth or state limit cut the search short.
    pub complete: bool,
}

#[derive(Clone)]
struct State {
    graph: Graph,
    sent: BTreeMap<VertexId, u32>,
    total: u32,
    depth: usize,
}

fn key(s: &State) -> (Graph, u32) {
    let mut g = s.graph.clone();
    for (&v, &n) in &s.sent {
        for _ in 0..n {
            // Ids are fresh, so this cannot fail on a well-formed graph.
            let _ = g.push_edge(v, v, SENT);
        }
    }
    (canonical_form(&g), s.total)
}

/// The lhs vertex of `snd b` that sends, i.e. the one carrying the `t` loop.
fn sender_of(rule: &QuasiRule) -> Option<VertexId> {
    let p = &rule.lhs.pattern;
    p.vertices().find(|&v| p.loop_count(v, "t") > 0)
}

/// Explores every run from `initial`, bounding the number of basic messages,
/// and checks that `announce` is only enabled in quiescent states.
pub fn explore_ds(initial: &Graph, limits: DsLimits) -> Result<DsExploration, DsError> {
    let sys = dijkstra_scholten_system();
    let cap = default_map_cap();
    let mut out = DsExploration {
        complete: true,
        ..DsExploration::default()
    };
    let start = State {
        graph: initial.clone(),
        sent: BTreeMap::new(),
        total: 0,
        depth: 0,
    };
    let mut seen = BTreeSet::from([key(&start)]);
    let mut queue = VecDeque::from([start]);
    while let Some(st) = queue.pop_front() {
        out.states += 1;
        if limits.max_depth.is_some_and(|d| st.depth >= d) {
            out.complete = false;
            continue;
        }
        for rule in &sys.rules {
            let found = find_redexes(&st.graph, rule, cap);
            out.complete &= !found.truncated;
            if rule.name == ANNOUNCE && !found.redexes.is_empty() {
                out.announce_states += 1;
                if !is_quiescent(&st.graph) {
                    out.violations.push(st.graph.clone());
                }
            }
            let sender = if rule.name == SEND { sender_of(rule) } else { None };
            for redex in &found.redexes {
                let who = sender.and_then(|u| redex.embedding.vertex(u));
                if let Some(w) = who {
                    let n = st.sent.get(&w).copied().unwrap_or(0);
                    if limits.max_sends_per_process.is_some_and(|m| n >= m)
                        || limits.max_total_sends.is_some_and(|m| st.total >= m)
                    {
                        continue;
                    }
                }
                let (g, cert) = apply_at(&st.graph, redex)?;
                let origins = cert.vertex_origins();
                let mut sent = BTreeMap::new();
                for (new, old) in origins {
                    let mut n = st.sent.get(&old).copied().unwrap_or(0);
                    if Some(old) == who {
                        n += 1;
                    }
                    if n > 0 {
                        sent.insert(new, n);
                    }
                }
                let next = State {
                    graph: g,
                    sent,
                    total: st.total + u32::from(who.is_some()),
                    depth: st.depth + 1,
                };
                out.transitions += 1;
                if seen.insert(key(&next)) {
                    if seen.len() > limits.max_states {
                        out.complete = false;
                        continue;
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::has_redex;

    fn first_step(g: &Graph, rule: &str) -> Graph {
        let sys = dijkstra_scholten_system();
        let r = sys.get(rule).unwrap();
        let found = find_redexes(g, r, default_map_cap());
        apply_at(g, &found.redexes[0]).unwrap().0
    }

    fn count(g: &Graph, label: &str) -> usize {
        g.edges().filter(|(_, e)| e.label.as_str() == label).count()
    }

    #[test]
    fn six_rules_all_deterministic() {
        let sys = dijkstra_scholten_system();
        assert_eq!(sys.rules.len(), 6);
        assert!(sys.rules.iter().all(|r| r.deterministic));
        let a = sys.get(ANNOUNCE).unwrap();
        assert_eq!(a.lhs.ptype.len(), 2);
        assert!(a.lhs.ptype.iter().all(|(_, t)| t.touches_context()));
    }

    #[test]
    fn initial_networks() {
        let g = ds_initial_network(&[(0, 1)], 0).unwrap();
        assert_eq!((g.vertex_count(), count(&g, "e")), (2, 2));
        assert_eq!((g.loop_count(VertexId(0), "i"), g.loop_count(VertexId(0), "t")), (1, 1));
        let g = ds_initial_network(&[], 7).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 2));
        let g = ds_initial_network(&[(0, 1), (1, 2), (2, 0)], 0).unwrap();
        assert_eq!((g.vertex_count(), count(&g, "e")), (3, 6));
        assert_eq!(ds_initial_network(&[(1, 1)], 1), Err(DsError::SelfLoopInTopology(1)));
    }

    #[test]
    fn send_then_join_then_announce_blocked() {
        let g = ds_initial_network(&[(0, 1)], 0).unwrap();
        let g = first_step(&g, SEND);
        assert_eq!((count(&g, "s"), count(&g, "b")), (1, 1));
        let ann = dijkstra_scholten_system();
        assert!(!has_redex(&g, ann.get(ANNOUNCE).unwrap()));
        let g = first_step(&g, "rec b-2");
        assert_eq!((count(&g, "b"), count(&g, "p"), count(&g, "t")), (0, 1, 2));
        assert!(!has_redex(&g, ann.get(ANNOUNCE).unwrap()));
    }

    #[test]
    fn two_process_line_is_safe() {
        let g = ds_initial_network(&[(0, 1)], 0).unwrap();
        let ex = explore_ds(&g, DsLimits::default()).unwrap();
        assert!(ex.complete);
        assert!(ex.announce_states > 0);
        assert!(ex.violations.is_empty());
    }
}
