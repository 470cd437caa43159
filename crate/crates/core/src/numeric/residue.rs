use super::bivariate::{jacobian_det, SolutionSet};
use super::poly::{CPoly, C64};
use crate::error::{Error, Result};

/// `Σ_p h(p) / J(p)` over the simple zeros of a square system.
pub fn residue_sum(h: &CPoly, system: &[CPoly], sols: &SolutionSet) -> Result<C64> {
    if let Some(i) = sols.flags.iter().position(|f| f.any()) {
        return Err(Error::NonTransversal(format!("solution {i} is singular or multiple")));
    }
    let mut acc = C64::new(0.0, 0.0);
    for p in &sols.points {
        let j = jacobian_det(system, p);
        if j.norm() == 0.0 {
            return Err(Error::NonTransversal("zero Jacobian".into()));
        }
        acc += h.eval(p) / j;
    }
    Ok(acc)
}
