// SPDX-License-Identifier: Apache-2.0
//! Desugaring of annotated rules: explicit keyed type edges, node names,
//! forbidden implicit edges and black nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::graph::{Graph, VertexId};

use super::{PatchType, QuasiRule, RuleError, Scheme, TypeEdgeId, TypeEnd};

/// Key of a type edge implied by node names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameKey {
    /// `(ctx, x)`: from the context into the node named `x`.
    In(String),
    /// `(x, ctx)`.
    Out(String),
    /// `(x, y)`.
    Pair(String, String),
}

impl fmt::Display for NameKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameKey::In(x) => write!(f, "(ctx,{x})"),
            NameKey::Out(x) => write!(f, "({x},ctx)"),
            NameKey::Pair(x, y) => write!(f, "({x},{y})"),
        }
    }
}

/// What a rhs type edge is traced to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraceKey {
    Num(u64),
    Name(NameKey),
}

impl fmt::Display for TraceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceKey::Num(k) => write!(f, "{k}"),
            TraceKey::Name(n) => write!(f, "{n}"),
        }
    }
}

/// An explicitly written type edge. On the lhs `id` is the key and `from` is
/// unused; on the rhs `from` is required and `id` is optional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub id: Option<u64>,
    pub src: TypeEnd,
    pub tgt: TypeEnd,
    pub from: Option<TraceKey>,
}

/// Suppresses the implicit type edge with `key` between `src` and `tgt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forbid {
    pub key: NameKey,
    pub src: TypeEnd,
    pub tgt: TypeEnd,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotatedSide {
    pub pattern: Graph,
    pub names: BTreeMap<VertexId, Vec<String>>,
    pub black: BTreeSet<VertexId>,
    pub types: Vec<TypeDecl>,
    pub forbids: Vec<Forbid>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotatedRule {
    pub name: String,
    pub lhs: AnnotatedSide,
    pub rhs: AnnotatedSide,
    /// rhs vertex -> lhs vertex.
    pub correspondence: BTreeMap<VertexId, VertexId>,
}

#[derive(Clone, Debug)]
pub struct ExpandOutput {
    pub rule: QuasiRule,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum DerivedKey {
    Name(NameKey),
    Black(TypeEnd, TypeEnd),
}

struct Derived {
    key: DerivedKey,
    src: TypeEnd,
    tgt: TypeEnd,
}

fn name_edges(rule: &str, side: &AnnotatedSide, warnings: &mut Vec<String>) -> Vec<Derived> {
    let mut out = Vec::new();
    let named: Vec<(VertexId, &Vec<String>)> = side.names.iter().map(|(v, n)| (*v, n)).collect();
    for (n, names) in &named {
        for x in names.iter() {
            out.push(Derived {
                key: DerivedKey::Name(NameKey::In(x.clone())),
                src: TypeEnd::Context,
                tgt: TypeEnd::Node(*n),
            });
            out.push(Derived {
                key: DerivedKey::Name(NameKey::Out(x.clone())),
                src: TypeEnd::Node(*n),
                tgt: TypeEnd::Context,
            });
        }
    }
    for (n, xs) in &named {
        for (m, ys) in &named {
            for x in xs.iter() {
                for y in ys.iter() {
                    out.push(Derived {
                        key: DerivedKey::Name(NameKey::Pair(x.clone(), y.clone())),
                        src: TypeEnd::Node(*n),
                        tgt: TypeEnd::Node(*m),
                    });
                }
            }
        }
    }
    let mut used = vec![false; side.forbids.len()];
    out.retain(|d| {
        let DerivedKey::Name(key) = &d.key else { return true };
        let hit = side
            .forbids
            .iter()
            .position(|f| &f.key == key && f.src == d.src && f.tgt == d.tgt);
        if let Some(i) = hit {
            used[i] = true;
        }
        hit.is_none()
    });
    for (f, u) in side.forbids.iter().zip(used) {
        if !u {
            warnings.push(format!(
                "rule {rule}: forbid {} on {} -> {} names no implicit type edge",
                f.key, f.src, f.tgt
            ));
        }
    }
    out
}

fn black_edges(side: &AnnotatedSide, to_lhs: impl Fn(VertexId) -> VertexId) -> Vec<Derived> {
    let mut ends = vec![TypeEnd::Context];
    ends.extend(side.black.iter().map(|v| TypeEnd::Node(*v)));
    let lift = |e: TypeEnd| match e {
        TypeEnd::Context => TypeEnd::Context,
        TypeEnd::Node(v) => TypeEnd::Node(to_lhs(v)),
    };
    let mut out = Vec::new();
    for &a in &ends {
        for &b in &ends {
            if a.is_context() && b.is_context() {
                continue;
            }
            out.push(Derived {
                key: DerivedKey::Black(lift(a), lift(b)),
                src: a,
                tgt: b,
            });
        }
    }
    out
}

fn check_end(rule: &str, pattern: &Graph, e: TypeEnd) -> Result<(), RuleError> {
    match e {
        TypeEnd::Node(v) if !pattern.contains_vertex(v) => Err(RuleError::UnknownNode {
            rule: rule.into(),
            node: v,
        }),
        _ => Ok(()),
    }
}

/// Expands all shorthand into an explicit, validated rule.
///
/// Lhs type edges written with a numeric key keep it as their id; implied
/// edges are numbered above the largest explicit key. Rhs edges keep an
/// explicit id when given; the rest are numbered upward in order.
pub fn expand(a: &AnnotatedRule) -> Result<ExpandOutput, RuleError> {
    let rule = a.name.as_str();
    let mut warnings = Vec::new();

    // Names must be unique among lhs nodes, and every rhs name must occur on the lhs.
    let mut owner: BTreeMap<&str, VertexId> = BTreeMap::new();
    for (v, names) in &a.lhs.names {
        for x in names {
            if let Some(w) = owner.insert(x, *v) {
                if w != *v {
                    return Err(RuleError::SharedName {
                        rule: rule.into(),
                        name: x.clone(),
                    });
                }
            }
        }
    }
    for names in a.rhs.names.values() {
        for x in names {
            if !owner.contains_key(x.as_str()) {
                return Err(RuleError::DanglingRhsName {
                    rule: rule.into(),
                    name: x.clone(),
                });
            }
        }
    }

    // Black nodes must be black on both sides under the correspondence.
    let rhs_to_lhs = &a.correspondence;
    let lhs_to_rhs: BTreeMap<VertexId, VertexId> = rhs_to_lhs.iter().map(|(r, l)| (*l, *r)).collect();
    for b in &a.lhs.black {
        match lhs_to_rhs.get(b) {
            Some(r) if a.rhs.black.contains(r) => {}
            _ => {
                return Err(RuleError::PositionMismatch {
                    rule: rule.into(),
                    node: *b,
                })
            }
        }
    }
    for r in &a.rhs.black {
        match rhs_to_lhs.get(r) {
            Some(l) if a.lhs.black.contains(l) => {}
            _ => {
                return Err(RuleError::PositionMismatch {
                    rule: rule.into(),
                    node: *r,
                })
            }
        }
    }

    // Left-hand side.
    let mut lhs_type = PatchType::new();
    let mut lhs_num: BTreeMap<u64, TypeEdgeId> = BTreeMap::new();
    for d in &a.lhs.types {
        check_end(rule, &a.lhs.pattern, d.src)?;
        check_end(rule, &a.lhs.pattern, d.tgt)?;
        let key = d.id.ok_or_else(|| RuleError::UnknownTraceKey {
            rule: rule.into(),
            key: "<missing lhs key>".into(),
        })?;
        if lhs_num.insert(key, TypeEdgeId(key)).is_some() {
            return Err(RuleError::DuplicateTraceKey {
                rule: rule.into(),
                key: key.to_string(),
            });
        }
        lhs_type.insert(TypeEdgeId(key), d.src, d.tgt);
    }
    let first = lhs_num.keys().next_back().map_or(1, |k| k + 1);
    let mut lhs_derived: BTreeMap<DerivedKey, TypeEdgeId> = BTreeMap::new();
    let mut derived = name_edges(rule, &a.lhs, &mut warnings);
    derived.extend(black_edges(&a.lhs, |v| v));
    for (next, d) in (first..).zip(derived) {
        let id = TypeEdgeId(next);
        lhs_type.insert(id, d.src, d.tgt);
        lhs_derived.insert(d.key, id);
    }

    // Right-hand side.
    let resolve = |key: &TraceKey| -> Result<TypeEdgeId, RuleError> {
        let found = match key {
            TraceKey::Num(k) => lhs_num.get(k).copied(),
            TraceKey::Name(n) => lhs_derived.get(&DerivedKey::Name(n.clone())).copied(),
        };
        found.ok_or_else(|| RuleError::UnknownTraceKey {
            rule: rule.into(),
            key: key.to_string(),
        })
    };
    let mut rhs_type = PatchType::new();
    let mut trace = BTreeMap::new();
    let explicit_ids: BTreeSet<u64> = a.rhs.types.iter().filter_map(|d| d.id).collect();
    if explicit_ids.len() != a.rhs.types.iter().filter(|d| d.id.is_some()).count() {
        return Err(RuleError::DuplicateTraceKey {
            rule: rule.into(),
            key: "rhs type id".into(),
        });
    }
    let mut next = explicit_ids.iter().next_back().map_or(1, |k| k + 1);
    for d in &a.rhs.types {
        check_end(rule, &a.rhs.pattern, d.src)?;
        check_end(rule, &a.rhs.pattern, d.tgt)?;
        let from = d.from.as_ref().ok_or_else(|| RuleError::UnknownTraceKey {
            rule: rule.into(),
            key: "<missing rhs trace>".into(),
        })?;
        let target = resolve(from)?;
        let id = match d.id {
            Some(i) => TypeEdgeId(i),
            None => {
                next += 1;
                TypeEdgeId(next - 1)
            }
        };
        rhs_type.insert(id, d.src, d.tgt);
        trace.insert(id, target);
    }
    let mut derived = name_edges(rule, &a.rhs, &mut warnings);
    derived.extend(black_edges(&a.rhs, |v| rhs_to_lhs[&v]));
    for d in derived {
        let target = match &d.key {
            DerivedKey::Name(n) => resolve(&TraceKey::Name(n.clone()))?,
            black => lhs_derived[black],
        };
        let id = TypeEdgeId(next);
        next += 1;
        rhs_type.insert(id, d.src, d.tgt);
        trace.insert(id, target);
    }

    let rule = QuasiRule::new(
        a.name.clone(),
        Scheme {
            pattern: a.lhs.pattern.clone(),
            ptype: lhs_type,
        },
        Scheme {
            pattern: a.rhs.pattern.clone(),
            ptype: rhs_type,
        },
        trace,
        a.correspondence.clone(),
    )?;
    Ok(ExpandOutput { rule, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u64) -> VertexId {
        VertexId(i)
    }

    fn names(pairs: &[(u64, &[&str])]) -> BTreeMap<VertexId, Vec<String>> {
        pairs
            .iter()
            .map(|(n, xs)| (v(*n), xs.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    fn merge_shorthand() -> AnnotatedRule {
        AnnotatedRule {
            name: "merge".into(),
            lhs: AnnotatedSide {
                pattern: Graph::from_edges([], [(1, 2, "a")]),
                names: names(&[(1, &["x"]), (2, &["y"])]),
                ..Default::default()
            },
            rhs: AnnotatedSide {
                pattern: Graph::from_edges([1], []),
                names: names(&[(1, &["x", "y"])]),
                ..Default::default()
            },
            correspondence: BTreeMap::new(),
        }
    }

    #[test]
    fn merge_expands_to_eight_and_eight() {
        let out = expand(&merge_shorthand()).unwrap();
        assert_eq!(out.rule.lhs.ptype.len(), 8);
        assert_eq!(out.rule.rhs.ptype.len(), 8);
        assert!(out.rule.deterministic);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn unnamed_node_gets_no_type_edges() {
        let a = AnnotatedRule {
            name: "plain".into(),
            lhs: AnnotatedSide {
                pattern: Graph::from_edges([1], []),
                ..Default::default()
            },
            ..Default::default()
        };
        let out = expand(&a).unwrap();
        assert!(out.rule.lhs.ptype.is_empty());
    }

    #[test]
    fn two_names_on_one_lhs_node_make_a_quasi_rule() {
        let mut a = merge_shorthand();
        std::mem::swap(&mut a.lhs, &mut a.rhs);
        let out = expand(&a).unwrap();
        assert!(!out.rule.deterministic);
    }

    #[test]
    fn shared_and_dangling_names_are_rejected() {
        let mut a = merge_shorthand();
        a.lhs.names = names(&[(1, &["x"]), (2, &["x"])]);
        assert!(matches!(expand(&a), Err(RuleError::SharedName { .. })));
        let mut a = merge_shorthand();
        a.rhs.names = names(&[(1, &["z"])]);
        assert!(matches!(expand(&a), Err(RuleError::DanglingRhsName { .. })));
    }

    #[test]
    fn forbid_removes_edge_and_unused_forbid_warns() {
        let mut a = merge_shorthand();
        a.lhs.forbids.push(Forbid {
            key: NameKey::Pair("x".into(), "y".into()),
            src: TypeEnd::Node(v(1)),
            tgt: TypeEnd::Node(v(2)),
        });
        a.rhs.forbids.push(Forbid {
            key: NameKey::Pair("x".into(), "y".into()),
            src: TypeEnd::Node(v(1)),
            tgt: TypeEnd::Node(v(1)),
        });
        a.lhs.forbids.push(Forbid {
            key: NameKey::Pair("y".into(), "y".into()),
            src: TypeEnd::Node(v(1)),
            tgt: TypeEnd::Node(v(1)),
        });
        let out = expand(&a).unwrap();
        assert_eq!(out.rule.lhs.ptype.len(), 7);
        assert_eq!(out.rule.rhs.ptype.len(), 7);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn rhs_name_edge_without_lhs_counterpart_is_rejected() {
        let mut a = merge_shorthand();
        a.lhs.forbids.push(Forbid {
            key: NameKey::Pair("x".into(), "y".into()),
            src: TypeEnd::Node(v(1)),
            tgt: TypeEnd::Node(v(2)),
        });
        assert!(matches!(expand(&a), Err(RuleError::UnknownTraceKey { .. })));
    }

    #[test]
    fn black_nodes_need_matching_positions() {
        let mut a = AnnotatedRule {
            name: "b".into(),
            lhs: AnnotatedSide {
                pattern: Graph::from_edges([1, 2], []),
                black: [v(1)].into(),
                ..Default::default()
            },
            rhs: AnnotatedSide {
                pattern: Graph::from_edges([1, 2], []),
                black: [v(1)].into(),
                ..Default::default()
            },
            correspondence: [(v(1), v(1)), (v(2), v(2))].into(),
        };
        let out = expand(&a).unwrap();
        // ctx->1, 1->ctx, 1->1 on each side, traced identically.
        assert_eq!(out.rule.lhs.ptype.len(), 3);
        assert_eq!(out.rule.rhs.ptype.len(), 3);
        assert!(out.rule.deterministic);
        a.rhs.black.clear();
        assert!(matches!(expand(&a), Err(RuleError::PositionMismatch { .. })));
    }

    #[test]
    fn explicit_keys_and_unknown_trace_key() {
        let mut a = AnnotatedRule {
            name: "k".into(),
            lhs: AnnotatedSide {
                pattern: Graph::from_edges([1], []),
                types: vec![TypeDecl {
                    id: Some(4),
                    src: TypeEnd::Context,
                    tgt: TypeEnd::Node(v(1)),
                    from: None,
                }],
                ..Default::default()
            },
            rhs: AnnotatedSide {
                pattern: Graph::from_edges([7], []),
                types: vec![TypeDecl {
                    id: None,
                    src: TypeEnd::Node(v(7)),
                    tgt: TypeEnd::Context,
                    from: Some(TraceKey::Num(4)),
                }],
                ..Default::default()
            },
            correspondence: BTreeMap::new(),
        };
        let out = expand(&a).unwrap();
        assert_eq!(out.rule.trace.values().collect::<Vec<_>>(), vec![&TypeEdgeId(4)]);
        a.rhs.types[0].from = Some(TraceKey::Num(9));
        assert!(matches!(expand(&a), Err(RuleError::UnknownTraceKey { .. })));
    }
}
