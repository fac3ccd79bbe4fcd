// SPDX-License-Identifier: Apache-2.0
//! Bundled rule sets and the procedures built on them.

use crate::io::{parse_document, Document};

pub mod ds;
pub mod elementary;
pub mod labels;
pub mod waitfor;

pub const WAITFOR_RULES: &str = include_str!("rules/waitfor.pgr");
pub const DS_RULES: &str = include_str!("rules/ds.pgr");
pub const ELEMENTARY_RULES: &str = include_str!("rules/elementary.pgr");

/// Parses a bundled text. These are fixed at compile time and covered by
/// tests, so a failure here is a bug in the crate.
pub(crate) fn bundled(text: &str) -> Document {
    match parse_document(text) {
        Ok(doc) => doc,
        Err(e) => panic!("bundled rule text does not parse: {e}"),
    }
}

pub use ds::{dijkstra_scholten_system, ds_initial_network, explore_ds, DsError, DsExploration, DsLimits};
pub use elementary::elementary_rules;
pub use labels::{drop_all_loops_rule, drop_loops_rule_for_label, encode_vertex_labels, LabelError, LabelMode};
pub use waitfor::{
    build_waitfor_net, detect_deadlock, detection_system, make_n_of_m_rule, reachability_oracle, waitfor_grammar,
    waitfor_system, DeadlockReport, RequestSpec, Verdict, WaitForError, WaitForNet, WaitForPhase, WaitForViolation,
};
