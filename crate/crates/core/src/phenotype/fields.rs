use nalgebra::{DMatrix, DVector};

use crate::elem_integrals::mass_matrix;
use crate::error::{Error, Result};
use crate::mesh::{physical_gradients, shape_gradients, shape_values, Element, Mesh};

const LOCATE_TOL: f64 = 1e-10;

fn check_nodal(mesh: &Mesh, u: &[f64]) -> Result<()> {
    if u.len() != mesh.node_count() {
        return Err(Error::Dimension(format!("{} nodal values for {} nodes", u.len(), mesh.node_count())));
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("nodal field has non-finite values".into()));
    }
    Ok(())
}

/// Local coordinates of `x` in `element`, if it lies inside (within a small tolerance).
fn local_coordinates(mesh: &Mesh, element: &Element, x: &[f64]) -> Option<Vec<f64>> {
    let coords = mesh.element_coords(element);
    let dim = element.etype.dim();
    let h = mesh.element_measure(element).powf(1.0 / dim as f64);
    if element.etype.is_simplex() {
        let mut jac = DMatrix::zeros(dim, dim);
        for d in 0..dim {
            for k in 0..dim {
                jac[(d, k)] = coords[k + 1][d] - coords[0][d];
            }
        }
        let rhs = DVector::from_fn(dim, |d, _| x[d] - coords[0][d]);
        let r = jac.lu().solve(&rhs)?;
        let sum: f64 = r.iter().sum();
        let tol = LOCATE_TOL;
        if r.iter().any(|&v| v < -tol) || sum > 1.0 + tol {
            return None;
        }
        let mut r: Vec<f64> = r.iter().map(|v| v.max(0.0)).collect();
        let s: f64 = r.iter().sum();
        if s > 1.0 {
            r.iter_mut().for_each(|v| *v /= s);
        }
        Some(r)
    } else {
        // bilinear map inverted by Newton iteration; shapes are evaluated without the
        // reference-domain check because iterates may leave it
        let (mut a, mut b) = (0.0f64, 0.0f64);
        let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
        for _ in 0..30 {
            let (mut r, mut j) = ([-x[0], -x[1]], [[0.0; 2]; 2]);
            for (c, &(sa, sb)) in coords.iter().zip(&corners) {
                let n = 0.25 * (1.0 + sa * a) * (1.0 + sb * b);
                let (da, db) = (0.25 * sa * (1.0 + sb * b), 0.25 * sb * (1.0 + sa * a));
                for d in 0..2 {
                    r[d] += n * c[d];
                    j[d][0] += da * c[d];
                    j[d][1] += db * c[d];
                }
            }
            if r.iter().all(|v| v.abs() <= 1e-14 * h.max(1.0)) {
                break;
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < f64::MIN_POSITIVE {
                return None;
            }
            a -= (j[1][1] * r[0] - j[0][1] * r[1]) / det;
            b -= (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
            a = a.clamp(-3.0, 3.0);
            b = b.clamp(-3.0, 3.0);
        }
        let xi = [a, b];
        if xi.iter().any(|v| v.abs() > 1.0 + LOCATE_TOL) {
            return None;
        }
        Some(xi.iter().map(|v| v.clamp(-1.0, 1.0)).collect())
    }
}

/// Element index and local coordinates of the first element containing `x`.
pub fn locate(mesh: &Mesh, x: &[f64]) -> Option<(usize, Vec<f64>)> {
    if x.len() < mesh.dim() {
        return None;
    }
    mesh.elements().iter().enumerate().find_map(|(i, el)| local_coordinates(mesh, el, x).map(|l| (i, l)))
}

/// Shape-function interpolation `u_e = Σ N_i u_i` at a physical point.
pub fn interp_field(mesh: &Mesh, u: &[f64], x: &[f64]) -> Result<f64> {
    check_nodal(mesh, u)?;
    let (e, local) = locate(mesh, x).ok_or_else(|| Error::Domain(format!("point {x:?} lies outside the mesh")))?;
    let el = &mesh.elements()[e];
    let n = shape_values(el.etype, &local)?;
    Ok(n.iter().zip(&el.nodes).map(|(ni, &k)| ni * u[k]).sum())
}

/// Per-element gradient `∇u = Σ ∇N_i u_i` (quadrilaterals at their centre).
pub fn field_gradient(mesh: &Mesh, u: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_nodal(mesh, u)?;
    mesh.elements()
        .iter()
        .map(|el| {
            let g = shape_gradients(mesh, el)?;
            Ok((0..g.ncols()).map(|d| el.nodes.iter().enumerate().map(|(i, &k)| g[(i, d)] * u[k]).sum()).collect())
        })
        .collect()
}

/// Gradient inside a given element at local coordinates.
pub fn field_gradient_at(mesh: &Mesh, u: &[f64], element: usize, local: &[f64]) -> Result<Vec<f64>> {
    check_nodal(mesh, u)?;
    let el = mesh.elements().get(element).ok_or_else(|| Error::Invalid(format!("no element at index {element}")))?;
    let (g, _) = physical_gradients(el.etype, &mesh.element_coords(el), local)
        .map_err(|msg| Error::Element { id: el.id, msg })?;
    Ok((0..g.ncols()).map(|d| el.nodes.iter().enumerate().map(|(i, &k)| g[(i, d)] * u[k]).sum()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeDerivatives {
    /// `du/dt` at every sample.
    pub rate: Vec<Vec<f64>>,
    /// `d²u/dt²` at every sample.
    pub acceleration: Vec<Vec<f64>>,
}

/// Finite-difference rates of a uniformly sampled nodal history: central differences inside,
/// one-sided second-order stencils at both ends (the three-point second difference when only
/// three samples exist).
pub fn field_time_derivatives(history: &[Vec<f64>], dt: f64) -> Result<TimeDerivatives> {
    let m = history.len();
    if m < 3 {
        return Err(Error::Invalid(format!("time derivatives need at least 3 samples, got {m}")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Invalid(format!("sample spacing must be positive, got {dt}")));
    }
    let n = history[0].len();
    if history.iter().any(|h| h.len() != n) {
        return Err(Error::Dimension("history samples differ in length".into()));
    }
    let combine = |coeffs: &[(usize, f64)], scale: f64| -> Vec<f64> {
        (0..n).map(|i| coeffs.iter().map(|&(k, c)| c * history[k][i]).sum::<f64>() / scale).collect()
    };
    let mut rate = Vec::with_capacity(m);
    let mut acceleration = Vec::with_capacity(m);
    for k in 0..m {
        let (r, a) = if k == 0 {
            let r = combine(&[(0, -3.0), (1, 4.0), (2, -1.0)], 2.0 * dt);
            let a = if m >= 4 {
                combine(&[(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)], dt * dt)
            } else {
                combine(&[(0, 1.0), (1, -2.0), (2, 1.0)], dt * dt)
            };
            (r, a)
        } else if k == m - 1 {
            let r = combine(&[(k - 2, 1.0), (k - 1, -4.0), (k, 3.0)], 2.0 * dt);
            let a = if m >= 4 {
                combine(&[(k - 3, -1.0), (k - 2, 4.0), (k - 1, -5.0), (k, 2.0)], dt * dt)
            } else {
                combine(&[(k - 2, 1.0), (k - 1, -2.0), (k, 1.0)], dt * dt)
            };
            (r, a)
        } else {
            (
                combine(&[(k - 1, -1.0), (k + 1, 1.0)], 2.0 * dt),
                combine(&[(k - 1, 1.0), (k, -2.0), (k + 1, 1.0)], dt * dt),
            )
        };
        rate.push(r);
        acceleration.push(a);
    }
    Ok(TimeDerivatives { rate, acceleration })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceStats {
    /// `ŵ = ∫ N w ds / s`
    pub mean: f64,
    /// `σ² = ∫ (N w − ŵ)² ds / s`
    pub variance: f64,
    /// `s`
    pub measure: f64,
}

/// Mean and variance of a nodal field over the elements with `region` tag (all elements
/// when `None`), integrated exactly with the element mass matrices.
pub fn surface_stats(mesh: &Mesh, w: &[f64], region: Option<i64>) -> Result<SurfaceStats> {
    check_nodal(mesh, w)?;
    let elements: Vec<&Element> =
        mesh.elements().iter().filter(|el| region.is_none_or(|r| el.region_tag == r)).collect();
    let mut measure = 0.0;
    let mut integral = 0.0;
    let mut mats = Vec::with_capacity(elements.len());
    for el in &elements {
        let m = mass_matrix(mesh, el)?.matrix;
        let local: Vec<f64> = el.nodes.iter().map(|&k| w[k]).collect();
        for i in 0..local.len() {
            let row: f64 = m.row(i).sum();
            integral += row * local[i];
            measure += row;
        }
        mats.push((m, local));
    }
    if elements.is_empty() || !(measure > 0.0) {
        return Err(Error::Domain(match region {
            Some(r) => format!("region {r} is empty"),
            None => "mesh has no measure".into(),
        }));
    }
    let mean = integral / measure;
    let mut var = 0.0;
    for (m, local) in &mats {
        let d = DVector::from_iterator(local.len(), local.iter().map(|v| v - mean));
        var += d.dot(&(m * &d));
    }
    Ok(SurfaceStats { mean, variance: (var / measure).max(0.0), measure })
}
