// SPDX-License-Identifier: Apache-2.0
//! Breadth-first exploration of the states reachable under a rule set.
//! States are identified up to isomorphism.

use std::collections::{BTreeMap, VecDeque};

use crate::graph::Graph;
use crate::iso::canonical_form;

use super::{successors, RewriteError, RuleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreLimits {
    /// States at this depth are recorded but not expanded.
    pub max_depth: Option<usize>,
    /// Exploration stops once this many states are known.
    pub max_states: usize,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            max_depth: None,
            max_states: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub rule: String,
    pub to: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Exploration {
    /// Canonical forms, in discovery order. Index 0 is the initial state.
    pub states: Vec<Graph>,
    pub depth: Vec<usize>,
    pub transitions: Vec<Transition>,
    /// Expanded states without successors.
    pub terminal: Vec<usize>,
    /// False if a limit cut the search short or adherence maps were truncated.
    pub complete: bool,
}

impl Exploration {
    pub fn terminal_states(&self) -> impl Iterator<Item = &Graph> + '_ {
        self.terminal.iter().map(|&i| &self.states[i])
    }
}

pub fn explore(initial: &Graph, system: &RuleSet, limits: ExploreLimits) -> Result<Exploration, RewriteError> {
    let mut out = Exploration {
        complete: true,
        ..Exploration::default()
    };
    let mut index: BTreeMap<Graph, usize> = BTreeMap::new();
    let start = canonical_form(initial);
    index.insert(start.clone(), 0);
    out.states.push(start);
    out.depth.push(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let d = out.depth[i];
        if limits.max_depth.is_some_and(|m| d >= m) {
            out.complete = false;
            continue;
        }
        let (succ, truncated) = successors(&out.states[i], system, true)?;
        out.complete &= !truncated;
        if succ.is_empty() {
            out.terminal.push(i);
        }
        for s in succ {
            let key = canonical_form(&s.graph);
            let to = match index.get(&key) {
                Some(&j) => j,
                None => {
                    if out.states.len() >= limits.max_states {
                        out.complete = false;
                        continue;
                    }
                    let j = out.states.len();
                    index.insert(key.clone(), j);
                    out.states.push(key);
                    out.depth.push(d + 1);
                    queue.push_back(j);
                    j
                }
            };
            out.transitions.push(Transition { from: i, rule: s.rule, to });
        }
    }
    Ok(out)
}
