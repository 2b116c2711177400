//! Permutation groups stored fully enumerated: element arithmetic, closure,
//! centers, subgroup search, coset spaces and double-coset counting.

mod cosets;
mod group;
mod permutation;
mod subgroups;

pub use cosets::{
    conjugacy_class_representatives, double_coset_count, left_cosets, orbit_count, permutation_cycles, Coset,
    CosetAction, CosetSpace,
};
pub use group::{center, central_involutions, FiniteGroup, DEFAULT_ORDER_CAP};
pub use permutation::Permutation;
pub use subgroups::{join_subgroup, overgroups, subgroups_of_order, DEFAULT_SUBGROUP_SEARCH_CAP};
