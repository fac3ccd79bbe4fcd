// SPDX-License-Identifier: Apache-2.0
//! Merging, copying and splitting nodes.

use crate::rewrite::RuleSet;

use super::{bundled, ELEMENTARY_RULES};

/// `merge`, `restricted merge`, `copy`, `partial copy` and `split`. Only
/// `split` is a quasi rule.
pub fn elementary_rules() -> RuleSet {
    match bundled(ELEMENTARY_RULES).system("elementary") {
        Some(s) => s,
        None => panic!("bundled elementary text lacks its system"),
    }
}
