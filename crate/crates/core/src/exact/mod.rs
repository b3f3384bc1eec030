//! Exact oracle at small `n`: every increasing tree and every event
//! sequence is enumerated, and laws carry rational weights.

mod checks;
mod enumerate;
mod law;

pub use checks::{
    alternating_bounds, decoupling_check, feasible_indices, orthant_check, AlternatingReport,
    DecouplingReport, DecouplingRow, OrthantReport, OrthantRow, PartialSum,
};
pub use enumerate::{
    enumerate_events, enumerate_increasing_trees, AllEvents, IncreasingTrees, MAX_EVENTS_N,
    MAX_TREE_N,
};
pub use law::{
    exact_factorial_moments, exact_profile_law, phi_fiber_census, rational_f64, rational_string,
    ExactLaw, Source,
};
