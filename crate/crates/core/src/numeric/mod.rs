//! Complex-numeric kernels: polynomials, root finding, bivariate systems and
//! transversal residue sums.

mod bivariate;
mod poly;
mod residue;
mod roots;

pub use bivariate::{jacobian_det, resultant, solve_bivariate, transversality, PointFlags, SolutionSet, Tolerances};
pub use poly::{CPoly, CPoly1, C64};
pub use residue::residue_sum;
pub use roots::{univariate_roots, Root};
