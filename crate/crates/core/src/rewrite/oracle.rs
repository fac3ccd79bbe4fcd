// SPDX-License-Identifier: Apache-2.0
//! Exhaustive step oracle for small instances.
//!
//! For a fixed redex it enumerates candidate new patches edge by edge: each
//! rhs type edge `t` needs exactly as many adherents as the lhs fibre of its
//! trace has edges, and every candidate edge copies the label of the old edge
//! it is paired with. Context endpoints range over all of `V_C`. Every
//! candidate is checked with `verify_step`; survivors are deduplicated by
//! canonical form.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::iso::canonical_form;
use crate::matching::Redex;
use crate::rule::{AdherenceMap, TypeEnd};

use super::{construct_rhs_patch, verify_step, RewriteError, StepCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the step needs {needed} new patch edges, above the bound {bound}")]
    BoundTooSmall { needed: usize, bound: usize },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// One slot of the new patch: rhs type edge `t` paired with old edge `j`.
struct Slot {
    t: crate::rule::TypeEdgeId,
    j: EdgeId,
    choices: Vec<(VertexId, VertexId)>,
}

/// All step results for `redex`, as canonical forms.
pub fn brute_force_step_oracle(host: &Graph, redex: &Redex<'_>, size_bound: usize) -> Result<Vec<Graph>, OracleError> {
    let rule = redex.rule;
    let base = host.id_ceiling().map_err(RewriteError::from)?;
    // Only the fresh rhs copy is reused from the constructive path.
    let skeleton = construct_rhs_patch(redex, base)?;
    let rhs_type = skeleton.rhs_type.clone();
    let copy = rule.rhs.pattern.rename(&skeleton.rhs_instance).map_err(RewriteError::from)?;
    let ctx: Vec<VertexId> = redex.decomposition.context.vertices().collect();

    let mut slots = Vec::new();
    for (t, te) in rhs_type.iter() {
        let k = rule.trace[&t];
        for j in redex.h_l.preimage(k) {
            let ends = |e: TypeEnd| match e {
                TypeEnd::Context => ctx.clone(),
                TypeEnd::Node(v) => vec![v],
            };
            let mut choices = Vec::new();
            for s in ends(te.src) {
                for g in ends(te.tgt) {
                    choices.push((s, g));
                }
            }
            slots.push(Slot { t, j, choices });
        }
    }
    if slots.len() > size_bound {
        return Err(OracleError::BoundTooSmall {
            needed: slots.len(),
            bound: size_bound,
        });
    }

    // The rhs copy occupies ids base..start.
    let start = base + (copy.vertex_count() + copy.edge_count()) as u64;
    let edge_ids: Vec<EdgeId> = (0..slots.len() as u64)
        .map(|i| start.checked_add(i).map(EdgeId).ok_or(RewriteError::IdExhaustion))
        .collect::<Result<_, _>>()?;

    let mut found = BTreeSet::new();
    let mut pick = vec![0usize; slots.len()];
    if slots.iter().any(|s| s.choices.is_empty()) {
        return Ok(Vec::new());
    }
    loop {
        let mut j_prime = Graph::new();
        let mut h_r = BTreeMap::new();
        let mut sigma = BTreeMap::new();
        for ((slot, id), p) in slots.iter().zip(&edge_ids).zip(&pick) {
            let (s, g) = slot.choices[*p];
            let label = redex.decomposition.patch.edge(slot.j).expect("fibre edge").label.clone();
            j_prime.ensure_vertex(s);
            j_prime.ensure_vertex(g);
            j_prime.add_edge(*id, s, g, label).expect("fresh id");
            h_r.insert(*id, slot.t);
            sigma.insert(*id, slot.j);
        }
        let result = redex
            .decomposition
            .context
            .union(&j_prime)
            .and_then(|g| g.union(&copy))
            .map_err(RewriteError::from)?;
        let cert = StepCertificate {
            redex: redex.clone(),
            rhs_instance: skeleton.rhs_instance.clone(),
            rhs_type: rhs_type.clone(),
            j_prime,
            h_r: AdherenceMap(h_r),
            sigma,
        };
        if verify_step(host, &result, &cert) {
            found.insert(canonical_form(&result));
        }
        // Advance the odometer.
        let mut i = slots.len();
        loop {
            if i == 0 {
                return Ok(found.into_iter().collect());
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < slots[i].choices.len() {
                break;
            }
            pick[i] = 0;
        }
    }
}
