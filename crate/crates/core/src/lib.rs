//! Non-uniform packings of finite metric spaces.
//!
//! A subset `A` with per-point radii `R` is *R-separated* when every `a` in
//! `A` has its nearest other member strictly farther than `R(a)`. This crate
//! finds maximum R-separated subsets, estimates doubling dimension, builds the
//! MST certificate, and checks the packing bounds
//! `|A| <= (5 diam(A) / rbar)^min(ddim(A), ddim(Ω))`,
//! `M(r) <= (2 diam / r)^ddim` and, in normed unit balls, `|A| <= (4 / rbar)^d`.

pub mod bounds;
pub mod dimension;
pub mod error;
pub mod harness;
pub mod io;
pub mod metric;
pub mod packing;
pub mod spanning;

pub use bounds::{
    classical_bound, disjoint_balls_check, jensen_check, mean_radius, proof_chain_check,
    theorem1_bound, verify_theorem1, verify_theorem1_with, volumetric_bound, BoundReport,
    ChainReport, Check, Verdict, VerifyOptions,
};
pub use dimension::{
    critical_radii, ddim_lower, ddim_upper, min_halving_cover, subset_dimension_ratio_check,
    DimensionEstimate, DimensionMode,
};
pub use error::{Error, Result};
pub use io::InstanceDoc;
pub use metric::{
    validate_metric, MetricInstance, Norm, PointId, RadiusAssignment, Subset, Violation, TOLERANCE,
};
pub use packing::{
    conflict_graph, is_r_separated, is_uniform_separated, max_separated_subset_exact,
    max_separated_subset_greedy, packing_number, ConflictGraph,
};
pub use spanning::{
    assign_edges, kruskal_spanning_tree, minimum_spanning_tree, radius_edge_check,
    root_min_radius, talwar_check, EdgeAssignment, SpanningTree,
};
