//! Degree profiles and the reference laws they are compared against.

mod gof;
mod limit;
mod moments;
mod profile;

pub use gof::{
    chi_square_homogeneity, chi_square_independence, chi_square_sf, gof, gof_counts,
    ks_standard_normal, ks_standard_normal_weighted, poisson_pmf, total_variation, ChiSquare,
    GofReport, Reference,
};
pub use limit::{clt_zscore, limit_mean, tail_reference, LimitLaw};
pub use moments::{factorial_moment_estimate, falling_factorial, Estimate, MomentSpec};
pub use profile::{epsilon, floor_log2, profile, DegreeProfile};
