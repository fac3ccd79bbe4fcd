// SPDX-License-Identifier: Apache-2.0
//! Text formats for graphs and rules, and DOT export.
//!
//! ```text
//! graph G {
//!   node 1; node 2;
//!   0: 1 -b-> 2;      # explicit edge id
//!   2 -a-> 2;         # id assigned automatically
//!   1 --> 2;          # unlabeled, same as -_->
//! }
//!
//! rule copy {
//!   lhs { node n [x]; }
//!   rhs { node u [x]; node w [x]; forbid (x,x) on u -> w; forbid (x,x) on w -> u; }
//! }
//!
//! system S { copy }
//! ```
//!
//! Numeric node tokens are used as ids; symbolic ones are numbered above the
//! largest numeric id of the enclosing graph or rule, in order of appearance.
//! In a rule, a rhs node with the same id as a lhs node stands for it unless
//! declared `fresh`; `node 5 from 3;` links rhs node 5 to lhs node 3.

use thiserror::Error;

use crate::rule::RuleError;

pub mod dot;
pub mod lexer;
pub mod parser;
pub mod write;

pub use dot::export_dot;
pub use parser::{parse_document, parse_graph, parse_rules, Document};
pub use write::{serialize_document, serialize_graph, serialize_rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    /// The rule-level error behind this one, if any.
    pub cause: Option<RuleError>,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
            cause: None,
        }
    }
}
