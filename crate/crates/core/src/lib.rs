// SPDX-License-Identifier: Apache-2.0
//! Patch graph rewriting.
//!
//! Rules match a pattern in a host graph and constrain how the edges around
//! the match (the patch) may look. A step replaces the pattern and rewires,
//! copies, inverts or drops patch edges as the rule's trace function says.

pub mod graph;
pub mod io;
pub mod iso;
pub mod matching;
pub mod patch;
pub mod rewrite;
pub mod rule;
pub mod systems;

pub use graph::{Edge, EdgeId, Graph, GraphError, Label, Renaming, VertexId, UNLABELED};
pub use iso::{canonical_form, find_isomorphism, is_isomorphic};
pub use matching::{find_pattern_embeddings, find_redexes, Redex};
pub use patch::{decompose_at, patch_compose, validate_patch, PatchDecomposition};
pub use rewrite::{apply_at, construct_rhs_patch, verify_step, StepCertificate};
pub use rule::{QuasiRule, PatchType, Scheme, TypeEdge, TypeEdgeId, TypeEnd};
