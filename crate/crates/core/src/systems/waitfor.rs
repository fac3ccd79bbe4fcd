// SPDX-License-Identifier: Apache-2.0
//! Wait-for graphs with N-out-of-M requests, and deadlock detection by
//! normalisation.
//!
//! A request is a vertex of its own: it carries one `z`-loop, one `s`-loop
//! per grant still outstanding, an edge from its requester and an edge to
//! each target process.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, Graph, GraphError, VertexId, UNLABELED};
use crate::rewrite::{explore, normalize, ExploreLimits, NormalizeError, RewriteError, RuleSet, Strategy, TraceStep};
use crate::rule::QuasiRule;

use super::{bundled, WAITFOR_RULES};

pub const Z: &str = "z";
pub const S: &str = "s";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WaitForError {
    #[error("not a wait-for graph: {}", join(.0))]
    Invalid(Vec<WaitForViolation>),
    #[error("an N-of-M request needs 0 < N <= M, got N = {n}, M = {m}")]
    BadArity { n: usize, m: usize },
    #[error("no normal form within {steps} steps")]
    StepLimitReached { steps: usize },
    #[error("state space exceeds {0} states")]
    StateLimitReached(usize),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn join(v: &[WaitForViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WaitForViolation {
    ForeignLabel { edge: EdgeId, label: String },
    ZLoops { vertex: VertexId, count: usize },
    StrayLoop { vertex: VertexId, edge: EdgeId },
    Requesters { request: VertexId, count: usize },
    RequesterNotProcess { request: VertexId, requester: VertexId },
    TargetNotProcess { request: VertexId, target: VertexId },
    DuplicateTarget { request: VertexId, target: VertexId },
    TargetIsRequester { request: VertexId },
    NoTargets { request: VertexId },
    NothingPending { request: VertexId },
    PendingExceedsTargets { request: VertexId, pending: usize, targets: usize },
    ProcessOutDegree { process: VertexId, count: usize },
    ProcessToProcess { edge: EdgeId },
}

impl fmt::Display for WaitForViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use WaitForViolation::*;
        match self {
            ForeignLabel { edge, label } => write!(f, "edge {edge} has label {label:?}"),
            ZLoops { vertex, count } => write!(f, "request {vertex} has {count} z-loops"),
            StrayLoop { vertex, edge } => write!(f, "loop {edge} on {vertex} is not allowed there"),
            Requesters { request, count } => write!(f, "request {request} has {count} incoming edges"),
            RequesterNotProcess { request, requester } => {
                write!(f, "request {request} is issued by {requester}, which is not a process")
            }
            TargetNotProcess { request, target } => write!(f, "request {request} targets non-process {target}"),
            DuplicateTarget { request, target } => write!(f, "request {request} targets {target} twice"),
            TargetIsRequester { request } => write!(f, "request {request} targets its own requester"),
            NoTargets { request } => write!(f, "request {request} has no targets"),
            NothingPending { request } => write!(f, "request {request} has no outstanding grants"),
            PendingExceedsTargets {
                request,
                pending,
                targets,
            } => write!(f, "request {request} waits for {pending} grants from {targets} targets"),
            ProcessOutDegree { process, count } => write!(f, "process {process} has {count} outgoing requests"),
            ProcessToProcess { edge } => write!(f, "edge {edge} joins two processes"),
        }
    }
}

/// How strictly request bookkeeping is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaitForPhase {
    /// As built by the grammar: every request has a target and at least one
    /// outstanding grant.
    Grammar,
    /// While granting: requests may have run out of grants or targets.
    Execution,
}

pub fn waitfor_violations(g: &Graph, phase: WaitForPhase) -> Vec<WaitForViolation> {
    use WaitForViolation::*;
    let mut out = Vec::new();
    for (id, e) in g.edges() {
        let l = e.label.as_str();
        if l != Z && l != S && l != UNLABELED {
            out.push(ForeignLabel {
                edge: id,
                label: l.to_string(),
            });
        }
    }
    let is_request = |v: VertexId| g.loop_count(v, Z) > 0;
    for v in g.vertices() {
        if is_request(v) {
            let z = g.loop_count(v, Z);
            if z != 1 {
                out.push(ZLoops { vertex: v, count: z });
            }
            for (id, e) in g.out_edges(v) {
                if e.is_loop() && e.label.as_str() == UNLABELED {
                    out.push(StrayLoop { vertex: v, edge: id });
                }
            }
            let incoming: Vec<VertexId> = g.in_edges(v).filter(|(_, e)| !e.is_loop()).map(|(_, e)| e.src).collect();
            if incoming.len() != 1 {
                out.push(Requesters {
                    request: v,
                    count: incoming.len(),
                });
            }
            for &q in &incoming {
                if is_request(q) {
                    out.push(RequesterNotProcess {
                        request: v,
                        requester: q,
                    });
                }
            }
            let mut targets = BTreeSet::new();
            for (_, e) in g.out_edges(v).filter(|(_, e)| !e.is_loop()) {
                if is_request(e.tgt) {
                    out.push(TargetNotProcess {
                        request: v,
                        target: e.tgt,
                    });
                }
                if !targets.insert(e.tgt) {
                    out.push(DuplicateTarget {
                        request: v,
                        target: e.tgt,
                    });
                }
                if incoming.contains(&e.tgt) {
                    out.push(TargetIsRequester { request: v });
                }
            }
            let pending = g.loop_count(v, S);
            let m = g.out_edges(v).filter(|(_, e)| !e.is_loop()).count();
            if pending > m {
                out.push(PendingExceedsTargets {
                    request: v,
                    pending,
                    targets: m,
                });
            }
            if phase == WaitForPhase::Grammar {
                if m == 0 {
                    out.push(NoTargets { request: v });
                }
                if pending == 0 {
                    out.push(NothingPending { request: v });
                }
            }
        } else {
            for (id, e) in g.out_edges(v) {
                if e.is_loop() {
                    out.push(StrayLoop { vertex: v, edge: id });
                } else if !is_request(e.tgt) {
                    out.push(ProcessToProcess { edge: id });
                }
            }
            let count = g.out_edges(v).filter(|(_, e)| !e.is_loop()).count();
            if count > 1 {
                out.push(ProcessOutDegree { process: v, count });
            }
        }
    }
    out
}

/// A graph known to satisfy the wait-for invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaitForNet {
    graph: Graph,
}

impl WaitForNet {
    /// Checks the invariants that hold throughout execution.
    pub fn new(graph: Graph) -> Result<Self, WaitForError> {
        Self::with_phase(graph, WaitForPhase::Execution)
    }

    pub fn with_phase(graph: Graph, phase: WaitForPhase) -> Result<Self, WaitForError> {
        let v = waitfor_violations(&graph, phase);
        if v.is_empty() {
            Ok(WaitForNet { graph })
        } else {
            Err(WaitForError::Invalid(v))
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn processes(&self) -> BTreeSet<VertexId> {
        self.graph.vertices().filter(|&v| self.graph.loop_count(v, Z) == 0).collect()
    }

    pub fn requests(&self) -> BTreeSet<VertexId> {
        self.graph.vertices().filter(|&v| self.graph.loop_count(v, Z) == 1).collect()
    }
}

/// One request for [`build_waitfor_net`]. Processes are numbered from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestSpec {
    pub requester: usize,
    pub targets: Vec<usize>,
    /// Grants still outstanding.
    pub pending: usize,
}

/// Processes get vertex ids `0..processes`, requests the ids after them.
pub fn build_waitfor_net(processes: usize, requests: &[RequestSpec]) -> Result<WaitForNet, WaitForError> {
    let mut g = Graph::new();
    for p in 0..processes {
        g.add_vertex(VertexId(p as u64))?;
    }
    for (i, r) in requests.iter().enumerate() {
        let v = VertexId((processes + i) as u64);
        g.add_vertex(v)?;
        g.push_edge(v, v, Z)?;
        for _ in 0..r.pending {
            g.push_edge(v, v, S)?;
        }
        let q = VertexId(r.requester as u64);
        g.ensure_vertex(q);
        g.push_edge(q, v, UNLABELED)?;
        for &t in &r.targets {
            let t = VertexId(t as u64);
            g.ensure_vertex(t);
            g.push_edge(v, t, UNLABELED)?;
        }
    }
    WaitForNet::new(g)
}

fn load(system: &str) -> RuleSet {
    let doc = bundled(WAITFOR_RULES);
    match doc.system(system) {
        Some(s) => s,
        None => panic!("bundled wait-for text lacks system {system}"),
    }
}

/// Rules that build wait-for graphs from the empty graph:
/// `create`, `1-of-1`, `ext-0`, `ext-1`.
pub fn waitfor_grammar() -> RuleSet {
    load("grammar")
}

/// Rules that run a wait-for system: `create`, `destroy`, `grant`,
/// `resolve`, `clone-1`, `clone-2`, plus `2-of-2`.
pub fn waitfor_system() -> RuleSet {
    let mut s = load("waitfor");
    let doc = bundled(WAITFOR_RULES);
    if let Some(r) = doc.rule("2-of-2") {
        s.rules.push(r.clone());
    }
    s
}

/// `grant`, `resolve` and `destroy`: the terminating subsystem used for
/// deadlock detection.
pub fn detection_system() -> RuleSet {
    load("detection")
}

/// The atomic rule that makes a process wait for `n` grants out of `m`
/// targets.
pub fn make_n_of_m_rule(n: usize, m: usize) -> Result<QuasiRule, WaitForError> {
    if n == 0 || n > m {
        return Err(WaitForError::BadArity { n, m });
    }
    let mut lhs = String::from("node q;");
    let mut rhs = String::from("node q; node r; r -z-> r; q --> r;");
    let mut types = String::from("type 1: ctx -> q;");
    for i in 1..=m {
        lhs.push_str(&format!(" node t{i};"));
        rhs.push_str(&format!(" node t{i}; r --> t{i};"));
        types.push_str(&format!(" type {}: ctx -> t{i}; type {}: t{i} -> ctx;", 2 * i, 2 * i + 1));
    }
    for _ in 0..n {
        rhs.push_str(" r -s-> r;");
    }
    let text = format!("rule \"{n}-of-{m}\" {{ lhs {{ {lhs} {types} }} rhs {{ {rhs} {types} }} }}");
    let mut doc = bundled(&text);
    Ok(doc.rules.remove(0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    DeadlockFree,
    Deadlocked,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadlockReport {
    pub verdict: Verdict,
    pub normal_form: Graph,
    pub trace: Vec<TraceStep>,
}

/// Normalises under [`detection_system`]. The net is free of deadlock iff
/// everything drains away, i.e. the normal form is empty.
pub fn detect_deadlock(net: &WaitForNet, max_steps: usize) -> Result<DeadlockReport, WaitForError> {
    match normalize(net.graph(), &detection_system(), Strategy::First, max_steps) {
        Ok(nf) => Ok(DeadlockReport {
            verdict: if nf.graph.is_empty() {
                Verdict::DeadlockFree
            } else {
                Verdict::Deadlocked
            },
            normal_form: nf.graph,
            trace: nf.trace,
        }),
        Err(NormalizeError::StepLimitReached { partial }) => Err(WaitForError::StepLimitReached {
            steps: partial.trace.len(),
        }),
        Err(NormalizeError::Rewrite(e)) => Err(e.into()),
    }
}

/// Result of exploring every run of the detection system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachabilityOutcome {
    pub empty_reachable: bool,
    /// Canonical forms of all terminal states.
    pub normal_forms: Vec<Graph>,
    pub states: usize,
    /// Transitions that did not shrink `|V| + |E|`.
    pub non_shrinking_steps: usize,
}

impl ReachabilityOutcome {
    pub fn verdict(&self) -> Verdict {
        if self.empty_reachable {
            Verdict::DeadlockFree
        } else {
            Verdict::Deadlocked
        }
    }
}

/// Explores all runs of [`detection_system`] from `g`, independent of any
/// strategy.
pub fn reachability_oracle(g: &Graph, max_states: usize) -> Result<ReachabilityOutcome, WaitForError> {
    let ex = explore(
        g,
        &detection_system(),
        ExploreLimits {
            max_depth: None,
            max_states,
        },
    )?;
    if !ex.complete {
        return Err(WaitForError::StateLimitReached(max_states));
    }
    let size = |g: &Graph| g.vertex_count() + g.edge_count();
    let non_shrinking_steps = ex
        .transitions
        .iter()
        .filter(|t| size(&ex.states[t.to]) >= size(&ex.states[t.from]))
        .count();
    Ok(ReachabilityOutcome {
        empty_reachable: ex.states.iter().any(Graph::is_empty),
        normal_forms: ex.terminal_states().cloned().collect(),
        states: ex.states.len(),
        non_shrinking_steps,
    })
}

/// Every net with at most `max_processes` processes and `max_requests`
/// requests, up to isomorphism. Requests have distinct requesters, at least
/// one target and between 0 and M outstanding grants.
pub fn small_waitfor_nets(max_processes: usize, max_requests: usize) -> Vec<Graph> {
    let mut seen = BTreeMap::new();
    for p in 0..=max_processes {
        let mut shapes = Vec::new();
        for q in 0..p {
            let others: Vec<usize> = (0..p).filter(|&x| x != q).collect();
            for mask in 1u32..(1 << others.len()) {
                let targets: Vec<usize> =
                    others.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &t)| t).collect();
                for pending in 0..=targets.len() {
                    shapes.push(RequestSpec {
                        requester: q,
                        targets: targets.clone(),
                        pending,
                    });
                }
            }
        }
        let mut chosen = Vec::new();
        collect_nets(p, &shapes, 0, max_requests, &mut chosen, &mut seen);
    }
    seen.into_values().collect()
}

fn collect_nets(
    p: usize,
    shapes: &[RequestSpec],
    from: usize,
    left: usize,
    chosen: &mut Vec<RequestSpec>,
    seen: &mut BTreeMap<Graph, Graph>,
) {
    if let Ok(net) = build_waitfor_net(p, chosen) {
        let g = net.into_graph();
        seen.entry(crate::iso::canonical_form(&g)).or_insert(g);
    }
    if left == 0 {
        return;
    }
    for i in from..shapes.len() {
        if chosen.iter().any(|c| c.requester == shapes[i].requester) {
            continue;
        }
        chosen.push(shapes[i].clone());
        collect_nets(p, shapes, i + 1, left - 1, chosen, seen);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;
    use crate::matching::find_redexes;
    use crate::rewrite::apply_at;
    use crate::rule::{default_map_cap, rules_isomorphic};

    fn step(g: &Graph, sys: &RuleSet, rule: &str) -> Graph {
        let r = sys.get(rule).unwrap();
        let found = find_redexes(g, r, default_map_cap());
        let redex = found.redexes.first().unwrap_or_else(|| panic!("{rule} has no redex"));
        apply_at(g, redex).unwrap().0
    }

    #[test]
    fn bundled_rules_are_deterministic() {
        for r in waitfor_system().rules.iter().chain(&waitfor_grammar().rules) {
            assert!(r.deterministic, "{}", r.name);
        }
    }

    #[test]
    fn create_on_empty_graph() {
        let g = step(&Graph::new(), &waitfor_grammar(), "create");
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn one_of_one_then_ext_one_is_two_of_two() {
        let gr = waitfor_grammar();
        let mut g = Graph::new();
        for _ in 0..3 {
            g = step(&g, &gr, "create");
        }
        g = step(&g, &gr, "1-of-1");
        g = step(&g, &gr, "ext-1");
        let two = waitfor_system().get("2-of-2").unwrap().rhs.pattern.clone();
        assert!(is_isomorphic(&g, &two));
    }

    #[test]
    fn n_of_m_matches_drawn_rules() {
        let doc = bundled(WAITFOR_RULES);
        assert!(rules_isomorphic(&make_n_of_m_rule(1, 1).unwrap(), doc.rule("1-of-1").unwrap()).is_some());
        assert!(rules_isomorphic(&make_n_of_m_rule(2, 2).unwrap(), doc.rule("2-of-2").unwrap()).is_some());
        let r = make_n_of_m_rule(2, 3).unwrap();
        let p = &r.rhs.pattern;
        let req = p.vertices().find(|&v| p.loop_count(v, Z) == 1).unwrap();
        assert_eq!(p.loop_count(req, S), 2);
        assert_eq!(p.out_edges(req).filter(|(_, e)| !e.is_loop()).count(), 3);
        assert_eq!(make_n_of_m_rule(0, 2), Err(WaitForError::BadArity { n: 0, m: 2 }));
        assert_eq!(make_n_of_m_rule(3, 2), Err(WaitForError::BadArity { n: 3, m: 2 }));
    }

    #[test]
    fn grant_resolve_and_clone() {
        let sys = waitfor_system();
        let net = build_waitfor_net(
            2,
            &[RequestSpec {
                requester: 0,
                targets: vec![1],
                pending: 1,
            }],
        )
        .unwrap();
        let g = step(net.graph(), &sys, "grant");
        assert_eq!(g.edge_count(), net.graph().edge_count() - 2);
        let g = step(&g, &sys, "resolve");
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 0));

        let reqs: Vec<RequestSpec> = (1..4)
            .map(|q| RequestSpec {
                requester: q,
                targets: vec![0],
                pending: 1,
            })
            .collect();
        let net = build_waitfor_net(4, &reqs).unwrap();
        let g = step(net.graph(), &sys, "clone-1");
        WaitForNet::with_phase(g.clone(), WaitForPhase::Grammar).unwrap();
        let mut indeg: Vec<usize> = g
            .vertices()
            .filter(|&v| g.loop_count(v, Z) == 0)
            .map(|v| g.in_edges(v).count())
            .filter(|&d| d > 0)
            .collect();
        indeg.sort();
        assert_eq!(indeg, vec![1, 2]);
        assert_eq!(g.vertex_count(), 8);
    }

    #[test]
    fn deadlock_examples() {
        let empty = WaitForNet::new(Graph::new()).unwrap();
        assert_eq!(detect_deadlock(&empty, 100).unwrap().verdict, Verdict::DeadlockFree);
        let cycle = build_waitfor_net(
            2,
            &[
                RequestSpec {
                    requester: 0,
                    targets: vec![1],
                    pending: 1,
                },
                RequestSpec {
                    requester: 1,
                    targets: vec![0],
                    pending: 1,
                },
            ],
        )
        .unwrap();
        let rep = detect_deadlock(&cycle, 100).unwrap();
        assert_eq!(rep.verdict, Verdict::Deadlocked);
        assert!(rep.trace.is_empty());
        let chain = build_waitfor_net(
            2,
            &[RequestSpec {
                requester: 0,
                targets: vec![1],
                pending: 1,
            }],
        )
        .unwrap();
        assert_eq!(detect_deadlock(&chain, 100).unwrap().verdict, Verdict::DeadlockFree);
        assert!(matches!(detect_deadlock(&chain, 1), Err(WaitForError::StepLimitReached { .. })));
    }

    #[test]
    fn invariant_checker_rejects_bad_shapes() {
        let g = Graph::from_edges([], [(1, 1, "s")]);
        assert!(WaitForNet::new(g).is_err());
        let g = Graph::from_edges([], [(1, 2, "_")]);
        assert!(matches!(
            WaitForNet::new(g).unwrap_err(),
            WaitForError::Invalid(v) if v.contains(&WaitForViolation::ProcessToProcess { edge: EdgeId(0) })
        ));
        let g = Graph::from_edges([], [(1, 1, "z"), (0, 1, "_")]);
        assert!(WaitForNet::new(g.clone()).is_ok());
        assert!(WaitForNet::with_phase(g, WaitForPhase::Grammar).is_err());
    }
}
