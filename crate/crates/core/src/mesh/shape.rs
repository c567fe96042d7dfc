use nalgebra::DMatrix;

use super::{Element, ElementType, Mesh};
use crate::error::{Error, Result};

const INSIDE_TOL: f64 = 1e-12;

/// Shape coefficients at local coordinates.
///
/// Simplices use reference coordinates on the unit simplex (`N_0 = 1 - Σ r`, `N_i = r_i`),
/// quadrilaterals use `(ξ, η) ∈ [-1, 1]²` with nodes ordered counter-clockwise from `(-1, -1)`.
pub fn shape_values(etype: ElementType, local: &[f64]) -> Result<Vec<f64>> {
    check_local(etype, local)?;
    Ok(match etype {
        ElementType::LinearBeam => vec![1.0 - local[0], local[0]],
        ElementType::LinearTriangle => vec![1.0 - local[0] - local[1], local[0], local[1]],
        ElementType::LinearTetrahedron => {
            vec![1.0 - local[0] - local[1] - local[2], local[0], local[1], local[2]]
        }
        ElementType::LinearQuadrilateral => {
            let (x, y) = (local[0], local[1]);
            vec![
                0.25 * (1.0 - x) * (1.0 - y),
                0.25 * (1.0 + x) * (1.0 - y),
                0.25 * (1.0 + x) * (1.0 + y),
                0.25 * (1.0 - x) * (1.0 + y),
            ]
        }
    })
}

/// Derivatives of the shape functions with respect to the local coordinates,
/// one row per node.
pub fn reference_gradients(etype: ElementType, local: &[f64]) -> Result<DMatrix<f64>> {
    check_local(etype, local)?;
    Ok(match etype {
        ElementType::LinearBeam => DMatrix::from_row_slice(2, 1, &[-1.0, 1.0]),
        ElementType::LinearTriangle => DMatrix::from_row_slice(3, 2, &[-1.0, -1.0, 1.0, 0.0, 0.0, 1.0]),
        ElementType::LinearTetrahedron => DMatrix::from_row_slice(
            4,
            3,
            &[-1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ),
        ElementType::LinearQuadrilateral => {
            let (x, y) = (local[0], local[1]);
            DMatrix::from_row_slice(
                4,
                2,
                &[
                    -0.25 * (1.0 - y),
                    -0.25 * (1.0 - x),
                    0.25 * (1.0 - y),
                    -0.25 * (1.0 + x),
                    0.25 * (1.0 + y),
                    0.25 * (1.0 + x),
                    -0.25 * (1.0 + y),
                    0.25 * (1.0 - x),
                ],
            )
        }
    })
}

/// Spatial shape-function gradients `∂N_i/∂x_d` (nodes × dim). Constant for simplices;
/// quadrilaterals are evaluated at the element centre.
pub fn shape_gradients(mesh: &Mesh, element: &Element) -> Result<DMatrix<f64>> {
    shape_gradients_at(mesh, element, &centroid_local(element.etype))
}

pub fn shape_gradients_at(mesh: &Mesh, element: &Element, local: &[f64]) -> Result<DMatrix<f64>> {
    let coords = mesh.element_coords(element);
    let (grads, _) = physical_gradients(element.etype, &coords, local)
        .map_err(|msg| Error::Element { id: element.id, msg })?;
    Ok(grads)
}

pub(crate) fn centroid_local(etype: ElementType) -> Vec<f64> {
    match etype {
        ElementType::LinearBeam => vec![0.5],
        ElementType::LinearTriangle => vec![1.0 / 3.0; 2],
        ElementType::LinearTetrahedron => vec![0.25; 3],
        ElementType::LinearQuadrilateral => vec![0.0; 2],
    }
}

/// Gradients in physical space and the Jacobian determinant of the reference map.
pub(crate) fn physical_gradients(
    etype: ElementType,
    coords: &[[f64; 3]],
    local: &[f64],
) -> std::result::Result<(DMatrix<f64>, f64), String> {
    let dim = etype.dim();
    let dref = reference_gradients(etype, local).map_err(|e| e.to_string())?;
    // jac[(a, b)] = ∂x_a/∂ξ_b
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    for (i, x) in coords.iter().enumerate() {
        for a in 0..dim {
            for b in 0..dim {
                jac[(a, b)] += x[a] * dref[(i, b)];
            }
        }
    }
    let det: f64 = jac.determinant();
    if !(det > 0.0) || !det.is_finite() {
        return Err(format!("degenerate element (jacobian determinant {det:e})"));
    }
    let inv = jac.try_inverse().ok_or_else(|| "singular jacobian".to_string())?;
    // ∇N_i = J^{-T} ∂N_i/∂ξ  ->  rows: dref * J^{-1}
    Ok((dref * inv, det))
}

fn check_local(etype: ElementType, local: &[f64]) -> Result<()> {
    if local.len() != etype.dim() {
        return Err(Error::Domain(format!(
            "{etype} expects {} local coordinates, got {}",
            etype.dim(),
            local.len()
        )));
    }
    if local.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite local coordinate".into()));
    }
    let inside = match etype {
        ElementType::LinearQuadrilateral => local.iter().all(|v| v.abs() <= 1.0 + INSIDE_TOL),
        _ => local.iter().all(|&v| v >= -INSIDE_TOL) && local.iter().sum::<f64>() <= 1.0 + INSIDE_TOL,
    };
    if !inside {
        return Err(Error::Domain(format!("local coordinates {local:?} outside the reference {etype}")));
    }
    Ok(())
}
