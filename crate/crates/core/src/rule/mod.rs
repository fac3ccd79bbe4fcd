// SPDX-License-Identifier: Apache-2.0
//! Patch types, schemes and (quasi) rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, Renaming, VertexId};

pub mod adherence;
pub mod import;
pub mod iso;
pub mod shorthand;

pub use adherence::{
    context_of, default_map_cap, edge_adheres, enumerate_adherence_maps, is_adherence_map, AdherenceMap,
    AdherenceMaps,
};
pub use import::{import_dpo, import_spo, Morphism};
pub use iso::{rules_isomorphic, RuleRenaming};
pub use shorthand::{expand, AnnotatedRule, AnnotatedSide, ExpandOutput, Forbid, NameKey, TraceKey, TypeDecl};

/// An endpoint of a type edge: a pattern vertex or the context sentinel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeEnd {
    Context,
    Node(VertexId),
}

impl TypeEnd {
    pub fn is_context(self) -> bool {
        matches!(self, TypeEnd::Context)
    }

    pub fn node(self) -> Option<VertexId> {
        match self {
            TypeEnd::Context => None,
            TypeEnd::Node(v) => Some(v),
        }
    }

    fn rename(self, phi: &Renaming) -> Option<TypeEnd> {
        match self {
            TypeEnd::Context => Some(TypeEnd::Context),
            TypeEnd::Node(v) => phi.vertex(v).map(TypeEnd::Node),
        }
    }
}

impl fmt::Display for TypeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeEnd::Context => f.write_str("ctx"),
            TypeEnd::Node(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeEdgeId(pub u64);

impl fmt::Display for TypeEdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unlabeled type edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeEdge {
    pub src: TypeEnd,
    pub tgt: TypeEnd,
}

impl TypeEdge {
    pub fn new(src: TypeEnd, tgt: TypeEnd) -> Self {
        TypeEdge { src, tgt }
    }

    pub fn touches_context(&self) -> bool {
        self.src.is_context() || self.tgt.is_context()
    }

    pub fn is_internal(&self) -> bool {
        !self.touches_context()
    }
}

/// A patch type: unlabeled edges over a pattern plus the context sentinel.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PatchType {
    pub edges: BTreeMap<TypeEdgeId, TypeEdge>,
}

impl PatchType {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: TypeEdgeId, src: TypeEnd, tgt: TypeEnd) {
        self.edges.insert(id, TypeEdge::new(src, tgt));
    }

    pub fn get(&self, id: TypeEdgeId) -> Option<&TypeEdge> {
        self.edges.get(&id)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TypeEdgeId, &TypeEdge)> + '_ {
        self.edges.iter().map(|(k, v)| (*k, v))
    }

    /// True iff no two type edges share source and target.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.values().all(|t| seen.insert((t.src, t.tgt)))
    }

    /// Transports node endpoints along `phi`; `None` if some endpoint has no image.
    pub fn rename(&self, phi: &Renaming) -> Option<PatchType> {
        let mut out = PatchType::new();
        for (id, t) in &self.edges {
            out.insert(*id, t.src.rename(phi)?, t.tgt.rename(phi)?);
        }
        Some(out)
    }
}

/// A pattern together with its patch type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub pattern: Graph,
    pub ptype: PatchType,
}

/// Which side of a rule a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleSide {
    Lhs,
    Rhs,
}

impl fmt::Display for RuleSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleSide::Lhs => "lhs",
            RuleSide::Rhs => "rhs",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleViolation {
    ContextLoop(RuleSide, TypeEdgeId),
    DanglingTypeEnd(RuleSide, TypeEdgeId, VertexId),
    TraceMissing(TypeEdgeId),
    TraceUnknownTarget(TypeEdgeId, TypeEdgeId),
    TraceExtraSource(TypeEdgeId),
    ContextPreservation(TypeEdgeId, TypeEdgeId),
    DeterministicFlag { stored: bool, actual: bool },
    Correspondence(VertexId, VertexId),
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleViolation::ContextLoop(s, t) => write!(f, "{s} type edge {t} runs from ctx to ctx"),
            RuleViolation::DanglingTypeEnd(s, t, v) => {
                write!(f, "{s} type edge {t} refers to vertex {v}, which is not in the pattern")
            }
            RuleViolation::TraceMissing(t) => write!(f, "rhs type edge {t} has no trace"),
            RuleViolation::TraceUnknownTarget(t, k) => {
                write!(f, "rhs type edge {t} is traced to unknown lhs type edge {k}")
            }
            RuleViolation::TraceExtraSource(t) => write!(f, "trace mentions unknown rhs type edge {t}"),
            RuleViolation::ContextPreservation(t, k) => write!(
                f,
                "rhs type edge {t} touches ctx but its trace target {k} does not"
            ),
            RuleViolation::DeterministicFlag { stored, actual } => {
                write!(f, "deterministic flag is {stored} but the lhs patch type says {actual}")
            }
            RuleViolation::Correspondence(r, l) => {
                write!(f, "correspondence {r} -> {l} refers to a missing vertex")
            }
        }
    }
}

/// Outcome of [`validate_quasi_rule`]. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleReport {
    pub violations: Vec<RuleViolation>,
}

impl RuleReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule {rule}: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid { rule: String, violations: Vec<RuleViolation> },
    #[error("rule {rule}: name {name} is carried by more than one lhs node")]
    SharedName { rule: String, name: String },
    #[error("rule {rule}: rhs name {name} does not occur on the lhs")]
    DanglingRhsName { rule: String, name: String },
    #[error("rule {rule}: rhs type edge cites unknown key {key}")]
    UnknownTraceKey { rule: String, key: String },
    #[error("rule {rule}: duplicate lhs type key {key}")]
    DuplicateTraceKey { rule: String, key: String },
    #[error("rule {rule}: black node {node} does not appear black on both sides")]
    PositionMismatch { rule: String, node: VertexId },
    #[error("rule {rule}: type edge refers to unknown node {node}")]
    UnknownNode { rule: String, node: VertexId },
    #[error("not a graph morphism: {0}")]
    NotAMorphism(String),
}

/// A rule `(P_L, T_L) → (P_R, T_R)` with trace function `τ: E_{T_R} → E_{T_L}`.
///
/// The two sides live in separate id namespaces. `correspondence` records
/// which rhs vertices stand for which lhs vertices; it does not affect
/// rewriting and is only used to track vertex identity across steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiRule {
    pub name: String,
    pub lhs: Scheme,
    pub rhs: Scheme,
    pub trace: BTreeMap<TypeEdgeId, TypeEdgeId>,
    pub correspondence: BTreeMap<VertexId, VertexId>,
    pub deterministic: bool,
}

impl QuasiRule {
    /// Builds and validates a rule, deriving the deterministic flag.
    pub fn new(
        name: impl Into<String>,
        lhs: Scheme,
        rhs: Scheme,
        trace: BTreeMap<TypeEdgeId, TypeEdgeId>,
        correspondence: BTreeMap<VertexId, VertexId>,
    ) -> Result<Self, RuleError> {
        let deterministic = lhs.ptype.is_simple();
        let rule = QuasiRule {
            name: name.into(),
            lhs,
            rhs,
            trace,
            correspondence,
            deterministic,
        };
        let report = validate_quasi_rule(&rule);
        if report.is_valid() {
            Ok(rule)
        } else {
            Err(RuleError::Invalid {
                rule: rule.name,
                violations: report.violations,
            })
        }
    }

    /// The rhs type edges traced onto lhs type edge `k`.
    pub fn traced_from(&self, k: TypeEdgeId) -> impl Iterator<Item = TypeEdgeId> + '_ {
        self.trace.iter().filter(move |(_, l)| **l == k).map(|(r, _)| *r)
    }
}

fn check_scheme(side: RuleSide, s: &Scheme, out: &mut Vec<RuleViolation>) {
    for (id, t) in s.ptype.iter() {
        if t.src.is_context() && t.tgt.is_context() {
            out.push(RuleViolation::ContextLoop(side, id));
        }
        for end in [t.src, t.tgt] {
            if let Some(v) = end.node() {
                if !s.pattern.contains_vertex(v) {
                    out.push(RuleViolation::DanglingTypeEnd(side, id, v));
                }
            }
        }
    }
}

/// Checks well-formedness of both schemes, totality of the trace, context
/// preservation, and the deterministic flag.
pub fn validate_quasi_rule(r: &QuasiRule) -> RuleReport {
    let mut v = Vec::new();
    check_scheme(RuleSide::Lhs, &r.lhs, &mut v);
    check_scheme(RuleSide::Rhs, &r.rhs, &mut v);
    for (id, t) in r.rhs.ptype.iter() {
        match r.trace.get(&id) {
            None => v.push(RuleViolation::TraceMissing(id)),
            Some(k) => match r.lhs.ptype.get(*k) {
                None => v.push(RuleViolation::TraceUnknownTarget(id, *k)),
                Some(lt) => {
                    if t.touches_context() && !lt.touches_context() {
                        v.push(RuleViolation::ContextPreservation(id, *k));
                    }
                }
            },
        }
    }
    for id in r.trace.keys() {
        if r.rhs.ptype.get(*id).is_none() {
            v.push(RuleViolation::TraceExtraSource(*id));
        }
    }
    let actual = r.lhs.ptype.is_simple();
    if r.deterministic != actual {
        v.push(RuleViolation::DeterministicFlag {
            stored: r.deterministic,
            actual,
        });
    }
    for (rv, lv) in &r.correspondence {
        if !r.rhs.pattern.contains_vertex(*rv) || !r.lhs.pattern.contains_vertex(*lv) {
            v.push(RuleViolation::Correspondence(*rv, *lv));
        }
    }
    RuleReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(i: u64) -> TypeEnd {
        TypeEnd::Node(VertexId(i))
    }

    fn scheme(pattern: Graph, types: &[(u64, TypeEnd, TypeEnd)]) -> Scheme {
        let mut ptype = PatchType::new();
        for (id, s, t) in types {
            ptype.insert(TypeEdgeId(*id), *s, *t);
        }
        Scheme { pattern, ptype }
    }

    #[test]
    fn invert_and_pull_in_rule_is_valid() {
        let lhs = scheme(
            Graph::from_edges([], [(1, 1, "a")]),
            &[(1, TypeEnd::Context, node(1)), (2, node(1), TypeEnd::Context)],
        );
        let rhs = scheme(
            Graph::from_edges([1, 2], []),
            &[
                (1, node(1), TypeEnd::Context),
                (2, node(1), TypeEnd::Context),
                (3, node(2), node(1)),
            ],
        );
        let trace = [(1, 1), (2, 2), (3, 2)].map(|(a, b)| (TypeEdgeId(a), TypeEdgeId(b))).into();
        let r = QuasiRule::new("invert", lhs, rhs, trace, BTreeMap::new()).unwrap();
        assert!(r.deterministic);
    }

    #[test]
    fn context_edge_traced_to_internal_edge_is_rejected() {
        let lhs = scheme(Graph::from_edges([1], []), &[(1, node(1), node(1))]);
        let rhs = scheme(Graph::from_edges([1], []), &[(1, node(1), TypeEnd::Context)]);
        let trace = [(TypeEdgeId(1), TypeEdgeId(1))].into();
        let err = QuasiRule::new("bad", lhs, rhs, trace, BTreeMap::new()).unwrap_err();
        assert!(matches!(err, RuleError::Invalid { ref violations, .. }
            if violations == &[RuleViolation::ContextPreservation(TypeEdgeId(1), TypeEdgeId(1))]));
    }

    #[test]
    fn parallel_type_edges_make_a_quasi_rule() {
        let lhs = scheme(Graph::from_edges([1, 2], []), &[(1, node(1), node(2)), (2, node(1), node(2))]);
        let rhs = scheme(Graph::from_edges([1, 2], []), &[(1, node(1), node(2))]);
        let trace = [(TypeEdgeId(1), TypeEdgeId(1))].into();
        let r = QuasiRule::new("q", lhs, rhs, trace, BTreeMap::new()).unwrap();
        assert!(!r.deterministic);
    }

    #[test]
    fn missing_trace_and_ctx_loop_are_reported() {
        let lhs = scheme(Graph::new(), &[(1, TypeEnd::Context, TypeEnd::Context)]);
        let rhs = scheme(Graph::from_edges([1], []), &[(1, node(1), node(1))]);
        let r = QuasiRule {
            name: "bad".into(),
            lhs,
            rhs,
            trace: BTreeMap::new(),
            correspondence: BTreeMap::new(),
            deterministic: true,
        };
        let rep = validate_quasi_rule(&r);
        assert!(rep.violations.contains(&RuleViolation::ContextLoop(RuleSide::Lhs, TypeEdgeId(1))));
        assert!(rep.violations.contains(&RuleViolation::TraceMissing(TypeEdgeId(1))));
    }
}
