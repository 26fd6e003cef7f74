//! Covering, tree counting, linked-set counting and binomial/entropy estimates.

mod counting;
mod cover;
mod entropy;

pub use counting::{
    binomial, binomial_tail_bound, count_k_linked_sets, rooted_subtree_count, TailBound,
};
pub use cover::{
    greedy_cover, greedy_cover_in_graph, random_regular_instance, Cover, CoverInstance,
};
pub use entropy::{binary_entropy, entropy_bound_holds};
