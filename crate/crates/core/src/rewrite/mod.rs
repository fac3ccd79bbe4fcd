// SPDX-License-Identifier: Apache-2.0
//! Rewrite steps: building the new patch, applying a redex, and certificates.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, EdgeId, Graph, GraphError, Renaming, VertexId};
use crate::matching::Redex;
use crate::rule::{AdherenceMap, PatchType, TypeEdgeId, TypeEnd};

pub mod explore;
pub mod normalize;
pub mod oracle;
pub mod verify;

pub use normalize::{
    check_rule_determinism, normalize, successors, DeterminismError, NormalForm, NormalizeError, RuleSet, Strategy,
    Successor, TraceStep, DEFAULT_MAX_STEPS,
};
pub use explore::{explore, ExploreLimits, Exploration, Transition};
pub use oracle::{brute_force_step_oracle, OracleError};
pub use verify::{verify_step, verify_step_report};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("fresh identifier space exhausted")]
    IdExhaustion,
    #[error("fresh id {0} collides with an id kept from the host")]
    FreshIdCollision(u64),
    #[error("redex does not belong to this host: {0}")]
    ForeignRedex(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Knobs for [`apply_at_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ApplyOptions {
    /// First fresh id; defaults to the host's id ceiling.
    pub fresh_base: Option<u64>,
    /// Permutes the order in which fresh ids are handed out.
    pub shuffle_seed: Option<u64>,
}

/// Everything needed to check a step against the definition.
#[derive(Clone, Debug)]
pub struct StepCertificate<'r> {
    pub redex: Redex<'r>,
    /// Maps the rhs pattern onto its fresh copy in the result.
    pub rhs_instance: Renaming,
    /// The rhs patch type transported along `rhs_instance`.
    pub rhs_type: PatchType,
    pub j_prime: Graph,
    pub h_r: AdherenceMap,
    /// New patch edge -> the old patch edge it was derived from.
    pub sigma: BTreeMap<EdgeId, EdgeId>,
}

impl StepCertificate<'_> {
    /// For each result vertex that stands for a host vertex, that host vertex:
    /// context vertices map to themselves, rhs vertices via the rule's
    /// correspondence and the match.
    pub fn vertex_origins(&self) -> BTreeMap<VertexId, VertexId> {
        let mut out: BTreeMap<VertexId, VertexId> =
            self.redex.decomposition.context.vertices().map(|v| (v, v)).collect();
        for (rv, lv) in &self.redex.rule.correspondence {
            if let (Some(new), Some(old)) = (self.rhs_instance.vertex(*rv), self.redex.embedding.vertex(*lv)) {
                out.insert(new, old);
            }
        }
        out
    }
}

/// The new patch `J'` with its adherence map and derivation map.
#[derive(Clone, Debug)]
pub struct RhsPatch {
    pub rhs_instance: Renaming,
    pub rhs_type: PatchType,
    pub j_prime: Graph,
    pub h_r: AdherenceMap,
    pub sigma: BTreeMap<EdgeId, EdgeId>,
}

struct Fresh(u64);

impl Fresh {
    fn take(&mut self) -> Result<u64, RewriteError> {
        let id = self.0;
        self.0 = self.0.checked_add(1).ok_or(RewriteError::IdExhaustion)?;
        Ok(id)
    }
}

fn maybe_shuffle<T>(items: &mut [T], rng: &mut Option<ChaCha8Rng>) {
    if let Some(r) = rng {
        items.shuffle(r);
    }
}

/// Builds the fresh rhs copy and `J'` for `redex`, taking ids upward from `fresh_base`.
pub fn construct_rhs_patch(redex: &Redex<'_>, fresh_base: u64) -> Result<RhsPatch, RewriteError> {
    build(redex, fresh_base, None)
}

fn build(redex: &Redex<'_>, fresh_base: u64, seed: Option<u64>) -> Result<RhsPatch, RewriteError> {
    let rule = redex.rule;
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut fresh = Fresh(fresh_base);

    let mut vs: Vec<VertexId> = rule.rhs.pattern.vertices().collect();
    maybe_shuffle(&mut vs, &mut rng);
    let mut vmap = BTreeMap::new();
    for v in vs {
        vmap.insert(v, VertexId(fresh.take()?));
    }
    let mut es: Vec<EdgeId> = rule.rhs.pattern.edge_ids().collect();
    maybe_shuffle(&mut es, &mut rng);
    let mut emap = BTreeMap::new();
    for e in es {
        emap.insert(e, EdgeId(fresh.take()?));
    }
    let rhs_instance = Renaming::new(vmap, emap)?;
    let rhs_type = rule.rhs.ptype.rename(&rhs_instance).expect("rhs type edges end in the rhs pattern");

    let patch = &redex.decomposition.patch;
    let mut j_prime = Graph::new();
    let mut h_r = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    let mut ts: Vec<(TypeEdgeId, _)> = rhs_type.iter().map(|(k, t)| (k, *t)).collect();
    maybe_shuffle(&mut ts, &mut rng);
    for (tid, t) in ts {
        let k = rule.trace[&tid];
        let lt = redex.lhs_type.get(k).expect("trace targets exist");
        let mut js = redex.h_l.preimage(k);
        maybe_shuffle(&mut js, &mut rng);
        for j in js {
            let old = patch.edge(j).expect("adherence map covers patch edges");
            let (src, tgt) = derive_endpoints(t.src, t.tgt, lt.src, lt.tgt, old);
            let id = EdgeId(fresh.take()?);
            j_prime.ensure_vertex(src);
            j_prime.ensure_vertex(tgt);
            j_prime.add_edge(id, src, tgt, old.label.clone())?;
            h_r.insert(id, tid);
            sigma.insert(id, j);
        }
    }
    Ok(RhsPatch {
        rhs_instance,
        rhs_type,
        j_prime,
        h_r: AdherenceMap(h_r),
        sigma,
    })
}

/// Endpoints of the edge derived from patch edge `j` for rhs type edge
/// `(ts, tt)` whose trace is `(ks, kt)`.
fn derive_endpoints(ts: TypeEnd, tt: TypeEnd, ks: TypeEnd, kt: TypeEnd, j: &Edge) -> (VertexId, VertexId) {
    use TypeEnd::{Context, Node};
    match (ts, tt) {
        (Node(a), Node(b)) => (a, b),
        (Context, Node(b)) if ks == Context => (j.src, b),
        (Context, Node(b)) => {
            debug_assert_eq!(kt, Context);
            (j.tgt, b)
        }
        (Node(a), Context) if kt == Context => (a, j.tgt),
        (Node(a), Context) => {
            debug_assert_eq!(ks, Context);
            (a, j.src)
        }
        (Context, Context) => unreachable!("validated rules have no ctx-to-ctx type edge"),
    }
}

/// Applies `redex` to `host` with default options.
pub fn apply_at<'r>(host: &Graph, redex: &Redex<'r>) -> Result<(Graph, StepCertificate<'r>), RewriteError> {
    apply_at_with(host, redex, ApplyOptions::default())
}

/// Applies `redex`, producing `C ∪ J' ∪ P_R'` and its certificate. The host is
/// not modified; context ids are kept and all new ids are fresh.
pub fn apply_at_with<'r>(
    host: &Graph,
    redex: &Redex<'r>,
    opts: ApplyOptions,
) -> Result<(Graph, StepCertificate<'r>), RewriteError> {
    let d = &redex.decomposition;
    for v in d.matched.vertices().chain(d.context.vertices()) {
        if !host.contains_vertex(v) {
            return Err(RewriteError::ForeignRedex(format!("vertex {v}")));
        }
    }
    let base = match opts.fresh_base {
        Some(b) => b,
        None => host.id_ceiling()?,
    };
    let rp = build(redex, base, opts.shuffle_seed)?;
    let copy = redex.rule.rhs.pattern.rename(&rp.rhs_instance)?;
    for v in copy.vertices() {
        if d.context.contains_vertex(v) {
            return Err(RewriteError::FreshIdCollision(v.0));
        }
    }
    for e in copy.edge_ids().chain(rp.j_prime.edge_ids()) {
        if d.context.contains_edge(e) {
            return Err(RewriteError::FreshIdCollision(e.0));
        }
    }
    let result = d.context.union(&rp.j_prime)?.union(&copy)?;
    let cert = StepCertificate {
        redex: redex.clone(),
        rhs_instance: rp.rhs_instance,
        rhs_type: rp.rhs_type,
        j_prime: rp.j_prime,
        h_r: rp.h_r,
        sigma: rp.sigma,
    };
    Ok((result, cert))
}
