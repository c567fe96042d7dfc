use nalgebra::DMatrix;
use serde::Serialize;

use crate::assembly::AssembledFluxSystem;
use crate::error::{Error, Result};
use crate::sparse::{mul_vec, norm2, to_dense};

use super::lp::{linprog, LpStatus};
use super::qp::min_norm_point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FluxStatus {
    Optimal,
    /// A bound-respecting solution whose optimality could not be certified.
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxSolution {
    /// Nodal fluxes, column-major (`col * n_nodes + node`).
    pub v: Vec<f64>,
    /// `‖A V‖₂`.
    pub residual_norm: f64,
    pub status: FluxStatus,
    /// `cᵀV` when an objective was given and the status is `Optimal` or `Feasible`.
    pub objective: Option<f64>,
}

/// Solves the flux system with the bounds stored in its columns.
///
/// Without an objective this returns the minimum-norm `V` with `A V = 0` inside the bounds.
/// With a per-unknown objective `c` it maximizes `cᵀV` and breaks ties by minimum norm.
pub fn solve_flux(system: &AssembledFluxSystem, objective: Option<&[f64]>) -> Result<FluxSolution> {
    solve_flux_with_bounds(system, &system.lower_bounds(), &system.upper_bounds(), objective)
}

pub fn solve_flux_with_bounds(
    system: &AssembledFluxSystem,
    lower: &[f64],
    upper: &[f64],
    objective: Option<&[f64]>,
) -> Result<FluxSolution> {
    let n = system.n_unknowns();
    if system.matrix.ncols() != n || lower.len() != n || upper.len() != n || objective.is_some_and(|c| c.len() != n) {
        return Err(Error::Dimension(format!("flux system has {n} unknowns; bounds or objective disagree")));
    }
    if lower.iter().zip(upper).any(|(l, u)| l > u || l.is_nan() || u.is_nan()) {
        return Err(Error::Invalid("inconsistent flux bounds (lower > upper)".into()));
    }
    let a = to_dense(&system.matrix);
    let rows = a.nrows();
    let finish = |v: Vec<f64>, status, objective| FluxSolution {
        residual_norm: norm2(&mul_vec(&system.matrix, &v)),
        v,
        status,
        objective,
    };
    let infeasible = || finish(vec![0.0; n], FluxStatus::Infeasible, None);

    let Some(c) = objective else {
        return Ok(match min_norm_point(&a, &vec![0.0; rows], lower, upper) {
            Some(v) => finish(v, FluxStatus::Optimal, None),
            None => infeasible(),
        });
    };

    let lp = linprog(&a, &vec![0.0; rows], Some(c), lower, upper)?;
    match lp.status {
        LpStatus::Infeasible => Ok(infeasible()),
        LpStatus::Unbounded => Ok(finish(lp.x, FluxStatus::Unbounded, None)),
        LpStatus::Optimal => {
            let opt = lp.objective;
            let mut e = DMatrix::zeros(rows + 1, n);
            e.view_mut((0, 0), (rows, n)).copy_from(&a);
            for (j, cj) in c.iter().enumerate() {
                e[(rows, j)] = *cj;
            }
            let mut rhs = vec![0.0; rows + 1];
            rhs[rows] = opt;
            match min_norm_point(&e, &rhs, lower, upper) {
                Some(v) => {
                    let value = c.iter().zip(&v).map(|(a, b)| a * b).sum();
                    Ok(finish(v, FluxStatus::Optimal, Some(value)))
                }
                None => Ok(finish(lp.x, FluxStatus::Feasible, Some(opt))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_fba_system, assemble_flux_system, GlobalMass};

    #[test]
    fn zero_bounds_give_zero() {
        let s = DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]);
        let sys = assemble_fba_system(&GlobalMass::single_node(), &s, &[(0.0, 0.0), (0.0, 0.0)], None).unwrap();
        let sol = solve_flux(&sys, None).unwrap();
        assert_eq!(sol.status, FluxStatus::Optimal);
        assert_eq!(sol.v, vec![0.0, 0.0]);
    }

    #[test]
    fn pinned_uptake_propagates_along_a_chain() {
        // uptake → A → B → excretion
        let s = DMatrix::from_row_slice(2, 3, &[1.0, -1.0, 0.0, 0.0, 1.0, -1.0]);
        let sys = assemble_fba_system(&GlobalMass::single_node(), &s, &[(2.0, 2.0), (0.0, 5.0), (0.0, 5.0)], None).unwrap();
        let sol = solve_flux(&sys, None).unwrap();
        for v in &sol.v {
            assert!((v - 2.0).abs() < 1e-9);
        }
        let c = [0.0, 0.0, 1.0];
        let free = assemble_fba_system(&GlobalMass::single_node(), &s, &[(0.0, 3.0), (0.0, 5.0), (0.0, 5.0)], None).unwrap();
        let best = solve_flux(&free, Some(&c)).unwrap();
        assert_eq!(best.status, FluxStatus::Optimal);
        assert!((best.objective.unwrap() - 3.0).abs() < 1e-9);
        assert!(best.residual_norm < 1e-9);
    }

    #[test]
    fn unbounded_and_infeasible() {
        let s = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let inf = f64::INFINITY;
        let sys = assemble_fba_system(&GlobalMass::single_node(), &s, &[(0.0, inf), (0.0, inf)], None).unwrap();
        assert_eq!(solve_flux(&sys, Some(&[1.0, 0.0])).unwrap().status, FluxStatus::Unbounded);
        let bad = assemble_fba_system(&GlobalMass::single_node(), &s, &[(1.0, 1.0), (2.0, 2.0)], None).unwrap();
        assert_eq!(solve_flux(&bad, None).unwrap().status, FluxStatus::Infeasible);
        let free = assemble_flux_system(&GlobalMass::single_node(), &s).unwrap();
        assert!(solve_flux(&free, Some(&[1.0])).is_err());
    }
}
