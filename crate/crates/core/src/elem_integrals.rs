//! Element-level operators: mass, diffusion, first-order reaction matrices and the
//! bilinear/trilinear collision vectors of higher-order mass-action steps.
//!
//! Every nodal field is interpolated with the element shape functions, so a reaction
//! term of order `m` becomes `∫ N_p (N·k) Π_j (N·C_j) dΩ`. Products are integrated
//! exactly on simplices and with a 4×4 Gauss rule on quadrilaterals.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{gauss_legendre, physical_gradients, shape_values, Element, ElementIntegrator, ElementType, Mesh};

#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix {
    pub element_id: usize,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementVector {
    pub element_id: usize,
    pub values: DVector<f64>,
}

fn check_len(element: &Element, field: &[f64], name: &str) -> Result<()> {
    let n = element.etype.node_count();
    if field.len() != n {
        return Err(Error::Dimension(format!(
            "element {}: {name} has {} nodal values, expected {n}",
            element.id,
            field.len()
        )));
    }
    if field.iter().any(|v| !v.is_finite()) {
        return Err(Error::Element { id: element.id, msg: format!("non-finite {name}") });
    }
    Ok(())
}

fn check_concentration(element: &Element, field: &[f64], name: &str) -> Result<()> {
    check_len(element, field, name)?;
    if let Some(&v) = field.iter().find(|&&v| v < 0.0) {
        return Err(Error::NegativeConcentration { value: v, context: format!("{name} on element {}", element.id) });
    }
    Ok(())
}

fn matrix(element: &Element, matrix: DMatrix<f64>) -> ElementMatrix {
    ElementMatrix { element_id: element.id, matrix }
}

fn vector(element: &Element, values: Vec<f64>) -> ElementVector {
    ElementVector { element_id: element.id, values: DVector::from_vec(values) }
}

/// Consistent mass matrix `∫ N_p N_q dΩ`.
pub fn mass_matrix(mesh: &Mesh, element: &Element) -> Result<ElementMatrix> {
    Ok(matrix(element, ElementIntegrator::new(mesh, element).product_matrix(&[])))
}

/// Row-sum lumped mass matrix (diagonal).
pub fn lumped_mass_matrix(mesh: &Mesh, element: &Element) -> Result<ElementMatrix> {
    let rows = ElementIntegrator::new(mesh, element).product_vector(&[]);
    Ok(matrix(element, DMatrix::from_diagonal(&DVector::from_vec(rows))))
}

/// `∫ (N·D) ∇N_p · ∇N_q dΩ` with a nodal scalar diffusivity.
pub fn diffusion_matrix(mesh: &Mesh, element: &Element, d_nodal: &[f64]) -> Result<ElementMatrix> {
    check_len(element, d_nodal, "diffusivity")?;
    if let Some(&d) = d_nodal.iter().find(|&&d| d < 0.0) {
        return Err(Error::Element { id: element.id, msg: format!("negative diffusivity {d}") });
    }
    let coords = mesh.element_coords(element);
    let err = |msg| Error::Element { id: element.id, msg };
    if element.etype.is_simplex() {
        let local = vec![0.0; element.etype.dim()];
        let (g, _) = physical_gradients(element.etype, &coords, &local).map_err(err)?;
        let mean_d = d_nodal.iter().sum::<f64>() / d_nodal.len() as f64;
        let scale = mean_d * mesh.element_measure(element);
        return Ok(matrix(element, &g * g.transpose() * scale));
    }
    let (gx, gw) = gauss_legendre(4);
    let n = element.etype.node_count();
    let mut out = DMatrix::zeros(n, n);
    for (x, wx) in gx.iter().zip(&gw) {
        for (y, wy) in gx.iter().zip(&gw) {
            let local = [*x, *y];
            let (g, det) = physical_gradients(ElementType::LinearQuadrilateral, &coords, &local).map_err(err)?;
            let nv = shape_values(ElementType::LinearQuadrilateral, &local)?;
            let d: f64 = nv.iter().zip(d_nodal).map(|(a, b)| a * b).sum();
            out += &g * g.transpose() * (wx * wy * det * d);
        }
    }
    Ok(matrix(element, out))
}

/// First-order reaction matrix `Σ_r k_r ∫ N_r N_p N_q dΩ`.
pub fn reaction_matrix_order1(mesh: &Mesh, element: &Element, k_nodal: &[f64]) -> Result<ElementMatrix> {
    check_len(element, k_nodal, "rate constant")?;
    Ok(matrix(element, ElementIntegrator::new(mesh, element).product_matrix(&[k_nodal])))
}

/// Second-order collision vector `∫ N_p (N·k)(N·Ca)(N·Cb) dΩ`.
pub fn reaction_vector_order2(
    mesh: &Mesh,
    element: &Element,
    k_nodal: &[f64],
    ca: &[f64],
    cb: &[f64],
) -> Result<ElementVector> {
    check_len(element, k_nodal, "rate constant")?;
    check_concentration(element, ca, "Ca")?;
    check_concentration(element, cb, "Cb")?;
    Ok(vector(element, ElementIntegrator::new(mesh, element).product_vector(&[k_nodal, ca, cb])))
}

/// Third-order collision vector `∫ N_p (N·k)(N·Ca)(N·Cb)(N·Cc) dΩ`.
pub fn reaction_vector_order3(
    mesh: &Mesh,
    element: &Element,
    k_nodal: &[f64],
    ca: &[f64],
    cb: &[f64],
    cc: &[f64],
) -> Result<ElementVector> {
    check_len(element, k_nodal, "rate constant")?;
    check_concentration(element, ca, "Ca")?;
    check_concentration(element, cb, "Cb")?;
    check_concentration(element, cc, "Cc")?;
    Ok(vector(element, ElementIntegrator::new(mesh, element).product_vector(&[k_nodal, ca, cb, cc])))
}

/// Derivatives of the collision vector `∫ N_p (N·k) Π_j (N·C_j) dΩ` with respect to the
/// nodal values of each concentration factor: entry `j` is `∂/∂C_j,q`.
pub fn reaction_jacobians(
    mesh: &Mesh,
    element: &Element,
    k_nodal: &[f64],
    factors: &[&[f64]],
) -> Result<Vec<ElementMatrix>> {
    check_len(element, k_nodal, "rate constant")?;
    for f in factors {
        check_concentration(element, f, "concentration")?;
    }
    if factors.is_empty() || factors.len() > 3 {
        return Err(Error::Invalid(format!("reaction order {} not supported", factors.len())));
    }
    let integ = ElementIntegrator::new(mesh, element);
    Ok((0..factors.len())
        .map(|j| {
            let mut rest: Vec<&[f64]> = vec![k_nodal];
            rest.extend(factors.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, f)| *f));
            matrix(element, integ.product_matrix(&rest))
        })
        .collect())
}
