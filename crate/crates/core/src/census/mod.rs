//! Exact independent-set counts of `Q_d`, the sum over small even sets, disjoint
//! neighborhood counts `f(k)`, and the upper and lower bound assembly.

mod bounds;
mod count;
mod log_value;
mod sums;

pub use bounds::{asymptotic_estimate, lower_bound_assembly, ratio_table, LowerBound, RatioRow};
pub use count::{
    count_independent_sets, count_with, CountMethod, MAX_COUNT_DIMENSION, MAX_EXTENDED_DIMENSION,
};
pub use log_value::{LogValue, FRAC_BITS};
pub use sums::{f_k, f_k_lower, sandwich, sap_sum, upper_bound_check, DyadicRational, Sandwich};
