use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::solvers::{min_norm_point, nnls};

use super::pathways::PathwayBasis;

#[derive(Debug, Clone, PartialEq)]
pub struct PathwayProjection {
    /// Non-negative pathway coordinates.
    pub w: Vec<f64>,
    /// `‖P w − v‖₂`.
    pub residual: f64,
}

/// `argmin ‖P w − v‖₂` over `w ≥ 0`; among equally good `w` the one of least norm.
pub fn project_onto(p: &DMatrix<f64>, v: &[f64]) -> Result<PathwayProjection> {
    if p.nrows() != v.len() {
        return Err(Error::Dimension(format!("flux vector of length {} for {} basis rows", v.len(), p.nrows())));
    }
    let n = p.ncols();
    if n == 0 {
        return Ok(PathwayProjection { w: Vec::new(), residual: DVector::from_column_slice(v).norm() });
    }
    let first = nnls(p, v);
    let fitted: Vec<f64> = (p * DVector::from_column_slice(&first.x)).as_slice().to_vec();
    let w = min_norm_point(p, &fitted, &vec![0.0; n], &vec![f64::INFINITY; n]).unwrap_or(first.x);
    let residual = (p * DVector::from_column_slice(&w) - DVector::from_column_slice(v)).norm();
    Ok(PathwayProjection { w, residual })
}

/// Coordinates of a step-flux vector on the extreme pathways.
pub fn project_to_pathway_coords(v: &[f64], basis: &PathwayBasis) -> Result<PathwayProjection> {
    project_onto(&basis.p, v)
}
