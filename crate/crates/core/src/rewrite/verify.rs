// SPDX-License-Identifier: Apache-2.0
//! Declarative re-check of a rewrite step.
//!
//! Nothing here reuses the constructive path: both compositions, both
//! adherence maps, and the per-type-edge bijections are checked directly.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgeId, Graph};
use crate::patch::{patch_compose, validate_patch, PatchDecomposition};
use crate::rule::{context_of, is_adherence_map, TypeEdgeId};

use super::StepCertificate;

/// Whether `cert` witnesses a step from `host` to `result`.
pub fn verify_step(host: &Graph, result: &Graph, cert: &StepCertificate<'_>) -> bool {
    verify_step_report(host, result, cert).is_empty()
}

/// Like [`verify_step`], listing every failed condition.
pub fn verify_step_report(host: &Graph, result: &Graph, cert: &StepCertificate<'_>) -> Vec<String> {
    let mut bad = Vec::new();
    let redex = &cert.redex;
    let rule = redex.rule;
    let d = &redex.decomposition;

    // Left side: G = C ·_J M with M the embedded lhs pattern.
    match rule.lhs.pattern.rename(&redex.embedding) {
        Ok(m) if m == d.matched => {}
        _ => bad.push("match is not the embedded lhs pattern".to_string()),
    }
    match patch_compose(d) {
        Ok(g) if &g == host => {}
        Ok(_) => bad.push("host is not C ·_J M".into()),
        Err(e) => bad.push(format!("lhs decomposition: {e}")),
    }
    match rule.lhs.ptype.rename(&redex.embedding) {
        Some(t) if t == redex.lhs_type => {}
        _ => bad.push("lhs patch type is not the embedded one".into()),
    }
    if !is_adherence_map(&d.patch, &redex.lhs_type, d, &redex.h_l) {
        bad.push("h_L is not an adherence map".into());
    }

    // Right side: G' = C ·_J' M' with M' a copy of the rhs pattern.
    let copy = match rule.rhs.pattern.rename(&cert.rhs_instance) {
        Ok(c) => c,
        Err(e) => {
            bad.push(format!("rhs instance: {e}"));
            return bad;
        }
    };
    match rule.rhs.ptype.rename(&cert.rhs_instance) {
        Some(t) if t == cert.rhs_type => {}
        _ => bad.push("rhs patch type is not the instantiated one".into()),
    }
    let right = PatchDecomposition {
        context: d.context.clone(),
        patch: cert.j_prime.clone(),
        matched: copy,
    };
    let report = validate_patch(&right);
    for v in &report.violations {
        bad.push(format!("rhs decomposition: {v}"));
    }
    if report.is_valid() {
        match patch_compose(&right) {
            Ok(g) if &g == result => {}
            _ => bad.push("result is not C ·_J' M'".into()),
        }
        if !is_adherence_map(&cert.j_prime, &cert.rhs_type, &right, &cert.h_r) {
            bad.push("h_R is not an adherence map".into());
        }
    }

    // sigma restricted to each h_R-fibre is a label- and context-respecting
    // bijection onto the h_L-fibre of the traced type edge.
    let sigma_keys: BTreeSet<EdgeId> = cert.sigma.keys().copied().collect();
    let jp_keys: BTreeSet<EdgeId> = cert.j_prime.edge_ids().collect();
    if sigma_keys != jp_keys {
        bad.push("sigma is not defined on exactly the new patch edges".into());
    }
    for (t, _) in rule.rhs.ptype.iter() {
        let Some(k) = rule.trace.get(&t).copied() else {
            bad.push(format!("rhs type edge {t} has no trace"));
            continue;
        };
        let fibre_r = cert.h_r.preimage(t);
        let fibre_l: BTreeSet<EdgeId> = redex.h_l.preimage(k).into_iter().collect();
        let images: Vec<EdgeId> = fibre_r.iter().filter_map(|e| cert.sigma.get(e).copied()).collect();
        let image_set: BTreeSet<EdgeId> = images.iter().copied().collect();
        if images.len() != fibre_r.len() || image_set.len() != images.len() || image_set != fibre_l {
            bad.push(format!("sigma is not a bijection for rhs type edge {t}"));
            continue;
        }
        for e in &fibre_r {
            check_pair(cert, *e, cert.sigma[e], t, k, &mut bad);
        }
    }
    bad
}

fn check_pair(cert: &StepCertificate<'_>, e: EdgeId, j: EdgeId, t: TypeEdgeId, k: TypeEdgeId, bad: &mut Vec<String>) {
    let (Some(new), Some(old)) = (cert.j_prime.edge(e), cert.redex.decomposition.patch.edge(j)) else {
        bad.push(format!("sigma pairs unknown edges {e} and {j}"));
        return;
    };
    if new.label != old.label {
        bad.push(format!("sigma pairs {e} and {j} with different labels"));
    }
    let (Some(tr), Some(tl)) = (cert.rhs_type.get(t), cert.redex.lhs_type.get(k)) else {
        bad.push(format!("missing type edge {t} or {k}"));
        return;
    };
    let ctx_new = context_of(new, tr);
    let ctx_old = context_of(old, tl);
    if ctx_new.is_some() && ctx_new != ctx_old {
        bad.push(format!("edge {e} touches a context vertex that {j} does not"));
    }
}

/// Size of `J'` forced by the bijections: the sum over rhs type edges of the
/// traced lhs fibre sizes.
pub fn expected_patch_size(cert: &StepCertificate<'_>) -> usize {
    let fibres: BTreeMap<TypeEdgeId, usize> = cert
        .redex
        .h_l
        .iter()
        .fold(BTreeMap::new(), |mut m, (_, k)| {
            *m.entry(k).or_default() += 1;
            m
        });
    cert.redex
        .rule
        .rhs
        .ptype
        .iter()
        .map(|(t, _)| fibres.get(&cert.redex.rule.trace[&t]).copied().unwrap_or(0))
        .sum()
}
