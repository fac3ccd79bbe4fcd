// SPDX-License-Identifier: Apache-2.0
//! Rule sets, successor generation, normalisation and determinism checks.

use std::collections::BTreeSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;
use crate::iso::{canonical_form, is_isomorphic};
use crate::matching::{find_pattern_embeddings, find_redexes, redexes_at, Redex};
use crate::rule::{default_map_cap, QuasiRule};

use super::{apply_at, apply_at_with, ApplyOptions, RewriteError};

/// An ordered collection of rules. Order matters for the `First` strategy.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub name: String,
    pub rules: Vec<QuasiRule>,
}

impl RuleSet {
    pub fn new(name: impl Into<String>, rules: Vec<QuasiRule>) -> Self {
        RuleSet {
            name: name.into(),
            rules,
        }
    }

    pub fn get(&self, name: &str) -> Option<&QuasiRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// The sub-system made of the named rules, in the given order.
    pub fn restrict(&self, names: &[&str]) -> Option<RuleSet> {
        let rules = names.iter().map(|n| self.get(n).cloned()).collect::<Option<Vec<_>>>()?;
        Some(RuleSet::new(self.name.clone(), rules))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub rule: String,
    pub graph: Graph,
}

/// All one-step results, rule by rule in declared order and redex by redex in
/// canonical order. With `dedup`, later results isomorphic to an earlier one
/// are dropped. The flag reports adherence-map truncation.
pub fn successors(host: &Graph, system: &RuleSet, dedup: bool) -> Result<(Vec<Successor>, bool), RewriteError> {
    let cap = default_map_cap();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut truncated = false;
    for rule in &system.rules {
        let found = find_redexes(host, rule, cap);
        truncated |= found.truncated;
        for redex in &found.redexes {
            let (g, _) = apply_at(host, redex)?;
            if dedup && !seen.insert(canonical_form(&g)) {
                continue;
            }
            out.push(Successor {
                rule: rule.name.clone(),
                graph: g,
            });
        }
    }
    Ok((out, truncated))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// First rule in declared order that has a redex; its first redex.
    First,
    /// Uniformly random redex among all rules, from a seeded generator.
    Random(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub redex: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub graph: Graph,
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("no normal form within {} steps", .partial.trace.len())]
    StepLimitReached { partial: NormalForm },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

pub const DEFAULT_MAX_STEPS: usize = 10_000;

fn first_redex<'r>(host: &Graph, rule: &'r QuasiRule) -> Option<Redex<'r>> {
    find_pattern_embeddings(host, &rule.lhs.pattern)
        .into_iter()
        .find_map(|m| redexes_at(host, rule, m, 1).and_then(|r| r.redexes.into_iter().next()))
}

/// Rewrites until no rule applies or `max_steps` steps have been taken.
pub fn normalize(host: &Graph, system: &RuleSet, strategy: Strategy, max_steps: usize) -> Result<NormalForm, NormalizeError> {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::First => None,
    };
    let cap = default_map_cap();
    let mut current = host.clone();
    let mut trace = Vec::new();
    loop {
        let step = match &mut rng {
            None => system.rules.iter().find_map(|r| first_redex(&current, r)),
            Some(rng) => {
                let mut all: Vec<Redex<'_>> = system
                    .rules
                    .iter()
                    .flat_map(|r| find_redexes(&current, r, cap).redexes)
                    .collect();
                if all.is_empty() {
                    None
                } else {
                    let i = rng.random_range(0..all.len());
                    Some(all.swap_remove(i))
                }
            }
        };
        let Some(redex) = step else {
            return Ok(NormalForm { graph: current, trace });
        };
        if trace.len() == max_steps {
            return Err(NormalizeError::StepLimitReached {
                partial: NormalForm { graph: current, trace },
            });
        }
        let (next, _) = apply_at(&current, &redex)?;
        trace.push(TraceStep {
            rule: redex.rule.name.clone(),
            redex: redex.summary(),
        });
        current = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeterminismError {
    #[error("rule {0} has a non-simple lhs patch type")]
    NotDeterministic(String),
    #[error("rule {rule}: two applications of redex {redex} on host {host} gave non-isomorphic results")]
    DeterminismViolation { rule: String, host: usize, redex: String },
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// Applies every redex of `rule` on every host twice, with different fresh
/// id bases and a shuffled allocation order, and checks the results are
/// isomorphic. Returns the number of redexes checked.
pub fn check_rule_determinism(rule: &QuasiRule, hosts: &[Graph]) -> Result<usize, DeterminismError> {
    if !rule.deterministic {
        return Err(DeterminismError::NotDeterministic(rule.name.clone()));
    }
    let mut checked = 0;
    for (i, host) in hosts.iter().enumerate() {
        let ceiling = host.id_ceiling().map_err(RewriteError::from)?;
        for (n, redex) in find_redexes(host, rule, default_map_cap()).redexes.iter().enumerate() {
            let (a, _) = apply_at(host, redex)?;
            let opts = ApplyOptions {
                fresh_base: Some(ceiling.saturating_add(1000)),
                shuffle_seed: Some(n as u64 + 1),
            };
            let (b, _) = apply_at_with(host, redex, opts)?;
            if !is_isomorphic(&a, &b) {
                return Err(DeterminismError::DeterminismViolation {
                    rule: rule.name.clone(),
                    host: i,
                    redex: redex.summary(),
                });
            }
            checked += 1;
        }
    }
    Ok(checked)
}
