// SPDX-License-Identifier: Apache-2.0
//! Translation of span rules `L <-φ- K -ψ-> R` into patch rules.
//!
//! Each interface vertex `u` becomes the name `k{u}`. An lhs vertex carries
//! the names of its φ-preimage and an rhs vertex those of its ψ-preimage;
//! the name shorthand then supplies the patch types.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgeId, Graph, VertexId};

use super::shorthand::{expand, AnnotatedRule, AnnotatedSide};
use super::{QuasiRule, RuleError};

/// A graph morphism given by its vertex and edge maps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Morphism {
    pub vmap: BTreeMap<VertexId, VertexId>,
    pub emap: BTreeMap<EdgeId, EdgeId>,
}

impl Morphism {
    pub fn new(vmap: BTreeMap<VertexId, VertexId>, emap: BTreeMap<EdgeId, EdgeId>) -> Self {
        Morphism { vmap, emap }
    }

    /// Checks totality on `from` and preservation of sources, targets and labels.
    pub fn check(&self, from: &Graph, to: &Graph, what: &str) -> Result<(), RuleError> {
        let bad = |msg: String| Err(RuleError::NotAMorphism(format!("{what}: {msg}")));
        for v in from.vertices() {
            match self.vmap.get(&v) {
                None => return bad(format!("vertex {v} has no image")),
                Some(w) if !to.contains_vertex(*w) => return bad(format!("image {w} of vertex {v} is missing")),
                _ => {}
            }
        }
        for (id, e) in from.edges() {
            let Some(img) = self.emap.get(&id).and_then(|i| to.edge(*i)) else {
                return bad(format!("edge {id} has no image"));
            };
            if img.src != self.vmap[&e.src] || img.tgt != self.vmap[&e.tgt] || img.label != e.label {
                return bad(format!("edge {id} is not preserved"));
            }
        }
        Ok(())
    }

    pub fn is_injective(&self) -> bool {
        let vs: BTreeSet<_> = self.vmap.values().collect();
        let es: BTreeSet<_> = self.emap.values().collect();
        vs.len() == self.vmap.len() && es.len() == self.emap.len()
    }

    fn preimage(&self, w: VertexId) -> Vec<VertexId> {
        self.vmap.iter().filter(|(_, x)| **x == w).map(|(u, _)| *u).collect()
    }
}

fn interface_name(u: VertexId) -> String {
    format!("k{u}")
}

fn translate(
    name: &str,
    l: &Graph,
    k: &Graph,
    r: &Graph,
    phi: &Morphism,
    psi: &Morphism,
    fresh_for_unnamed: bool,
) -> Result<QuasiRule, RuleError> {
    phi.check(k, l, "phi")?;
    psi.check(k, r, "psi")?;
    let mut lhs_names = BTreeMap::new();
    for v in l.vertices() {
        let mut names: Vec<String> = phi.preimage(v).into_iter().map(interface_name).collect();
        if names.is_empty() && fresh_for_unnamed {
            names.push(format!("d{v}"));
        }
        if !names.is_empty() {
            lhs_names.insert(v, names);
        }
    }
    let mut rhs_names = BTreeMap::new();
    let mut correspondence = BTreeMap::new();
    for w in r.vertices() {
        let pre = psi.preimage(w);
        if let Some(u) = pre.first() {
            correspondence.insert(w, phi.vmap[u]);
        }
        if !pre.is_empty() {
            rhs_names.insert(w, pre.into_iter().map(interface_name).collect());
        }
    }
    let annotated = AnnotatedRule {
        name: name.to_string(),
        lhs: AnnotatedSide {
            pattern: l.clone(),
            names: lhs_names,
            ..Default::default()
        },
        rhs: AnnotatedSide {
            pattern: r.clone(),
            names: rhs_names,
            ..Default::default()
        },
        correspondence,
    };
    Ok(expand(&annotated)?.rule)
}

/// Double-pushout import. With `injective_phi` a non-injective φ is rejected;
/// without it φ may identify interface vertices and the result may be a quasi rule.
pub fn import_dpo(
    name: &str,
    l: &Graph,
    k: &Graph,
    r: &Graph,
    phi: &Morphism,
    psi: &Morphism,
    injective_phi: bool,
) -> Result<QuasiRule, RuleError> {
    if injective_phi && !phi.is_injective() {
        return Err(RuleError::NotAMorphism("phi: not injective".into()));
    }
    translate(name, l, k, r, phi, psi, false)
}

/// Single-pushout import: lhs vertices outside the interface get a fresh
/// lhs-only name, so their incident patch edges are deleted rather than
/// blocking the step.
pub fn import_spo(
    name: &str,
    l: &Graph,
    k: &Graph,
    r: &Graph,
    phi: &Morphism,
    psi: &Morphism,
) -> Result<QuasiRule, RuleError> {
    translate(name, l, k, r, phi, psi, true)
}
