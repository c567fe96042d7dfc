//! Global systems assembled from element contributions.
//!
//! Transient unknowns are species-major (`species · n_nodes + node`); flux unknowns
//! are column-major over steps (`column · n_nodes + node`).

mod flux;
mod transient;

use nalgebra_sparse::CsrMatrix;
use rayon::prelude::*;

pub use flux::{
    apply_weights, assemble_compartment_system, assemble_fba_system, assemble_flux_system,
    assemble_species_flux_system, AssembledFluxSystem, ColumnKind, Compartment, FluxColumn, GlobalMass,
    TransportColumn, TransportMap,
};
pub use transient::{assemble_transient, AssembledTransient, BoundaryCondition, WeightField};

use crate::elem_integrals::{diffusion_matrix, mass_matrix};
use crate::error::Result;
use crate::mesh::{quadrature_points, Mesh};
use crate::sparse::csr_from_triplets;

/// Element loops switch to the rayon pool above this many elements.
pub(crate) const PARALLEL_THRESHOLD: usize = 256;

/// Runs `f` per element index, in parallel for large meshes; results keep element order.
pub(crate) fn map_elements<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if count >= PARALLEL_THRESHOLD {
        (0..count).into_par_iter().map(f).collect()
    } else {
        (0..count).map(f).collect()
    }
}

/// Global consistent mass matrix (nodes × nodes).
pub fn assemble_mass(mesh: &Mesh) -> Result<CsrMatrix<f64>> {
    let locals = map_elements(mesh.elements().len(), |e| mass_matrix(mesh, &mesh.elements()[e]));
    let mut t = Vec::new();
    for (el, m) in mesh.elements().iter().zip(locals) {
        let m = m?.matrix;
        for (p, &i) in el.nodes.iter().enumerate() {
            for (q, &j) in el.nodes.iter().enumerate() {
                t.push((i, j, m[(p, q)]));
            }
        }
    }
    Ok(csr_from_triplets(mesh.node_count(), mesh.node_count(), &t))
}

/// Global diffusion (stiffness) matrix for a nodal diffusivity field.
pub fn assemble_diffusion(mesh: &Mesh, d_nodal: &[f64]) -> Result<CsrMatrix<f64>> {
    if d_nodal.len() != mesh.node_count() {
        return Err(crate::Error::Dimension(format!(
            "{} diffusivities for {} nodes",
            d_nodal.len(),
            mesh.node_count()
        )));
    }
    let locals = map_elements(mesh.elements().len(), |e| {
        let el = &mesh.elements()[e];
        let d: Vec<f64> = el.nodes.iter().map(|&n| d_nodal[n]).collect();
        diffusion_matrix(mesh, el, &d)
    });
    let mut t = Vec::new();
    for (el, k) in mesh.elements().iter().zip(locals) {
        let k = k?.matrix;
        for (p, &i) in el.nodes.iter().enumerate() {
            for (q, &j) in el.nodes.iter().enumerate() {
                t.push((i, j, k[(p, q)]));
            }
        }
    }
    Ok(csr_from_triplets(mesh.node_count(), mesh.node_count(), &t))
}

/// Load vector `∫ N_p f(x) dΩ` for a source given as a function of position.
pub fn assemble_load<F>(mesh: &Mesh, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64; 3]) -> f64 + Sync,
{
    let mut b = vec![0.0; mesh.node_count()];
    for el in mesh.elements() {
        for qp in quadrature_points(mesh, el, 6)? {
            let fx = f(&qp.x);
            for (l, &n) in el.nodes.iter().enumerate() {
                b[n] += qp.weight * fx * qp.shape[l];
            }
        }
    }
    Ok(b)
}

/// `‖u_h − u‖_{L2(Ω)}` for a nodal field against an analytic function.
pub fn l2_error<F>(mesh: &Mesh, nodal: &[f64], exact: F) -> Result<f64>
where
    F: Fn(&[f64; 3]) -> f64,
{
    let mut sum = 0.0;
    for el in mesh.elements() {
        for qp in quadrature_points(mesh, el, 6)? {
            let uh: f64 = el.nodes.iter().zip(&qp.shape).map(|(&n, s)| nodal[n] * s).sum();
            let e = uh - exact(&qp.x);
            sum += qp.weight * e * e;
        }
    }
    Ok(sum.sqrt())
}

/// Imposes `x_i = g_i` on a linear system while keeping a symmetric matrix symmetric:
/// the known values are moved to the right-hand side, then rows and columns are zeroed
/// and the diagonal set to one.
pub fn apply_dirichlet(a: &mut CsrMatrix<f64>, b: &mut [f64], constraints: &[(usize, f64)]) {
    let mut fixed = vec![None; a.nrows()];
    for &(i, g) in constraints {
        fixed[i] = Some(g);
    }
    let (offsets, cols, vals) = a.csr_data_mut();
    for i in 0..b.len() {
        let range = offsets[i]..offsets[i + 1];
        if let Some(g) = fixed[i] {
            for k in range {
                vals[k] = if cols[k] == i { 1.0 } else { 0.0 };
            }
            b[i] = g;
        } else {
            for k in range {
                if let Some(g) = fixed[cols[k]] {
                    b[i] -= vals[k] * g;
                    vals[k] = 0.0;
                }
            }
        }
    }
}
