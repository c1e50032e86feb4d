//! Likelihood of a candidate source given a snapshot.
//!
//! Everything is in the natural-log domain. The building block is the leaf
//! probability, computed by log-scale adaptive quadrature; trees are scored
//! either by message passing (a product of leaf terms) or exactly by
//! convolution along every parent-child edge.

mod arms;
pub mod closed_form;
mod leaf;
mod panel;
pub mod quadrature;
pub mod special;
mod tree;

pub use arms::{arm_log_likelihood, Arm};
pub(crate) use arms::{fill_leaf_table, sum_arms, LeafTable};
pub use closed_form::{
    chain_constant, line_likelihood, regular_ratio, regular_tree_closed_form, star_arm_constant,
    star_arm_true_likelihood, star_center_constant, starlike_ratio_approx, three_node_path,
};
pub use leaf::{leaf_probability, LeafProbTerm, LogLikelihood};
pub use quadrature::QuadratureConfig;
pub use special::{erlang_log_pdf, lower_incomplete_gamma};
pub(crate) use tree::mp_arms;
pub use tree::{
    bridge_convolution, exact_tree_likelihood, exact_tree_likelihood_capped, mp_likelihood, tree_likelihood,
    Evaluator, EXACT_NODE_CAP,
};
