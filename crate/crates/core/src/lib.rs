//! Combinatorics of split vector bundles on smooth complete toric varieties
//! and a numeric toric Abel-trace inversion for surfaces.

pub mod abel;
pub mod bundles;
pub mod decomposition;
pub mod error;
pub mod fan;
mod hull;
pub mod io;
pub mod lattice;
pub mod numeric;
mod pairs;
pub mod polytope;

pub use bundles::{polytope_from_divisor, FaceMode, LineBundle, Section, SplitBundle, TDivisor};
pub use decomposition::{
    cycle_intersection, dual_codim, intersection_number, is_degenerate_class, orbital_decomposition,
    parameter_space_shape, positivity_table, resultant_multidegree, satisfies_positivity, CycleClass, OrbitalEntry,
    OrbitalTable,
};
pub use error::{Error, ErrorClass, Result};
pub use fan::{validate_fan, ChartFrame, Cone, Fan, Ray, ValidationReport};
pub use numeric::{residue_sum, solve_bivariate, CPoly, CPoly1, SolutionSet, Tolerances, C64};
pub use polytope::{
    is_essential, minkowski_sum, mixed_volume, normalized_volume, HPolytope, Halfspace, Polytope, PolytopeFamily,
};
