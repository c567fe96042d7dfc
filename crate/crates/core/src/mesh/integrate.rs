use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::shape::{physical_gradients, shape_values};
use super::{Element, ElementType, Mesh};
use crate::error::{Error, Result};

/// Highest total degree accepted by [`integrate_shape_monomial`].
pub const MAX_MONOMIAL_DEGREE: usize = 4;

/// Highest order of shape-function products handled by the element kernels
/// (`N_p` times four interpolated nodal fields).
const MAX_PRODUCT_ORDER: usize = 5;

/// Gauss points per direction on quadrilaterals; exact to degree 7 per direction.
const QUAD_GAUSS_POINTS: usize = 4;

/// Exact `∫_Ω Π N_i^{a_i} dΩ` over one element.
///
/// Simplices use the closed form `d! Π a_i! / (d + Σ a_i)! · |Ω|`; quadrilaterals use a
/// tensor Gauss rule that is exact for the bilinear map and degrees up to four.
pub fn integrate_shape_monomial(mesh: &Mesh, element: &Element, exponents: &[usize]) -> Result<f64> {
    let n = element.etype.node_count();
    if exponents.len() != n {
        return Err(Error::Dimension(format!("{} exponents for a {}-node element", exponents.len(), n)));
    }
    let degree: usize = exponents.iter().sum();
    if degree > MAX_MONOMIAL_DEGREE {
        return Err(Error::UnsupportedDegree { degree, max: MAX_MONOMIAL_DEGREE });
    }
    if element.etype.is_simplex() {
        let measure = mesh.element_measure(element);
        Ok(measure * simplex_monomial(element.etype.dim(), exponents))
    } else {
        let points = quad_points(&mesh.element_coords(element), QUAD_GAUSS_POINTS)
            .map_err(|msg| Error::Element { id: element.id, msg })?;
        Ok(points
            .iter()
            .map(|(w, nv)| w * nv.iter().zip(exponents).map(|(v, &a)| v.powi(a as i32)).product::<f64>())
            .sum())
    }
}

/// `d! Π a_i! / (d + Σ a_i)!`: the monomial integral normalized by the simplex measure.
pub(crate) fn simplex_monomial(dim: usize, exponents: &[usize]) -> f64 {
    let degree: usize = exponents.iter().sum();
    let num: f64 = exponents.iter().map(|&a| factorial(a)).product::<f64>() * factorial(dim);
    num / factorial(dim + degree)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    x.reverse();
    w.reverse();
    (x, w)
}

/// Tensor Gauss points on a quadrilateral: (weight · det J, shape values).
fn quad_points(coords: &[[f64; 3]], per_dir: usize) -> std::result::Result<Vec<(f64, Vec<f64>)>, String> {
    let (gx, gw) = gauss_legendre(per_dir);
    let mut out = Vec::with_capacity(per_dir * per_dir);
    for (i, &x) in gx.iter().enumerate() {
        for (j, &y) in gx.iter().enumerate() {
            let local = [x, y];
            let (_, det) = physical_gradients(ElementType::LinearQuadrilateral, coords, &local)?;
            let nv = shape_values(ElementType::LinearQuadrilateral, &local).map_err(|e| e.to_string())?;
            out.push((gw[i] * gw[j] * det, nv));
        }
    }
    Ok(out)
}

/// A quadrature point in physical space.
#[derive(Debug, Clone)]
pub struct QuadraturePoint {
    pub weight: f64,
    pub x: [f64; 3],
    pub shape: Vec<f64>,
}

/// General-purpose quadrature over an element for integrands that are not shape-function
/// polynomials (errors against analytic fields, source terms). Simplices use collapsed
/// Gauss–Legendre products; `per_dir` points per direction.
pub fn quadrature_points(mesh: &Mesh, element: &Element, per_dir: usize) -> Result<Vec<QuadraturePoint>> {
    let coords = mesh.element_coords(element);
    let (gx, gw) = gauss_legendre(per_dir);
    let to01 = |x: f64| 0.5 * (x + 1.0);
    let mut locals: Vec<(f64, Vec<f64>)> = Vec::new();
    match element.etype {
        ElementType::LinearBeam => {
            for (x, w) in gx.iter().zip(&gw) {
                locals.push((0.5 * w, vec![to01(*x)]));
            }
        }
        ElementType::LinearTriangle => {
            for (u, wu) in gx.iter().zip(&gw) {
                for (v, wv) in gx.iter().zip(&gw) {
                    let (u, v) = (to01(*u), to01(*v));
                    locals.push((0.25 * wu * wv * (1.0 - u), vec![u, v * (1.0 - u)]));
                }
            }
        }
        ElementType::LinearTetrahedron => {
            for (u, wu) in gx.iter().zip(&gw) {
                for (v, wv) in gx.iter().zip(&gw) {
                    for (t, wt) in gx.iter().zip(&gw) {
                        let (u, v, t) = (to01(*u), to01(*v), to01(*t));
                        let jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
                        locals.push((
                            0.125 * wu * wv * wt * jac,
                            vec![u, v * (1.0 - u), t * (1.0 - u) * (1.0 - v)],
                        ));
                    }
                }
            }
        }
        ElementType::LinearQuadrilateral => {
            for (x, wx) in gx.iter().zip(&gw) {
                for (y, wy) in gx.iter().zip(&gw) {
                    locals.push((wx * wy, vec![*x, *y]));
                }
            }
        }
    }
    let mut out = Vec::with_capacity(locals.len());
    for (w, local) in locals {
        let (_, det) =
            physical_gradients(element.etype, &coords, &local).map_err(|msg| Error::Element { id: element.id, msg })?;
        let shape = shape_values(element.etype, &local)?;
        let mut x = [0.0; 3];
        for (c, n) in coords.iter().zip(&shape) {
            for d in 0..3 {
                x[d] += n * c[d];
            }
        }
        out.push(QuadraturePoint { weight: w * det, x, shape });
    }
    Ok(out)
}

/// Normalized shape-product tensors `∫ N_{i1}…N_{im} dΩ / |Ω|` of a reference simplex.
struct SimplexTensors {
    n: usize,
    by_order: Vec<Vec<f64>>,
}

impl SimplexTensors {
    fn build(dim: usize) -> Self {
        let n = dim + 1;
        let mut by_order = Vec::with_capacity(MAX_PRODUCT_ORDER + 1);
        for order in 0..=MAX_PRODUCT_ORDER {
            let size = n.pow(order as u32);
            let mut data = Vec::with_capacity(size);
            let mut exps = vec![0usize; n];
            for flat in 0..size {
                exps.iter_mut().for_each(|e| *e = 0);
                let mut rem = flat;
                for _ in 0..order {
                    exps[rem % n] += 1;
                    rem /= n;
                }
                data.push(simplex_monomial(dim, &exps));
            }
            by_order.push(data);
        }
        SimplexTensors { n, by_order }
    }

    fn get(dim: usize) -> &'static SimplexTensors {
        static TENSORS: [OnceLock<SimplexTensors>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        TENSORS[dim - 1].get_or_init(|| SimplexTensors::build(dim))
    }
}

/// Contracts the last index of a flat `n^order` tensor with `v`.
fn contract_last(data: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    data.chunks_exact(n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Integrates products of shape functions and interpolated nodal fields over one element.
#[derive(Debug, Clone)]
pub(crate) struct ElementIntegrator {
    n: usize,
    kind: IntegratorKind,
}

#[derive(Debug, Clone)]
enum IntegratorKind {
    Simplex { dim: usize, measure: f64 },
    Quadrature { points: Vec<(f64, Vec<f64>)> },
}

impl ElementIntegrator {
    /// The element must come from a validated mesh (positive measure).
    pub(crate) fn new(mesh: &Mesh, element: &Element) -> Self {
        let n = element.etype.node_count();
        let kind = if element.etype.is_simplex() {
            IntegratorKind::Simplex { dim: element.etype.dim(), measure: mesh.element_measure(element) }
        } else {
            let points = quad_points(&mesh.element_coords(element), QUAD_GAUSS_POINTS)
                .expect("validated quadrilateral has a positive jacobian");
            IntegratorKind::Quadrature { points }
        };
        ElementIntegrator { n, kind }
    }

    /// `∫ N_p Π_f (N·f) dΩ` for every local node `p`.
    pub(crate) fn product_vector(&self, factors: &[&[f64]]) -> Vec<f64> {
        assert!(factors.len() < MAX_PRODUCT_ORDER, "too many factors in element product");
        match &self.kind {
            IntegratorKind::Simplex { dim, measure } => {
                let t = SimplexTensors::get(*dim);
                let mut data = t.by_order[factors.len() + 1].clone();
                for f in factors {
                    data = contract_last(&data, t.n, f);
                }
                data.iter().map(|v| v * measure).collect()
            }
            IntegratorKind::Quadrature { points } => {
                let mut out = vec![0.0; self.n];
                for (w, nv) in points {
                    let prod: f64 = factors.iter().map(|f| dot(nv, f)).product();
                    for (o, n) in out.iter_mut().zip(nv) {
                        *o += w * prod * n;
                    }
                }
                out
            }
        }
    }

    /// `∫ N_p N_q Π_f (N·f) dΩ`.
    pub(crate) fn product_matrix(&self, factors: &[&[f64]]) -> DMatrix<f64> {
        assert!(factors.len() + 1 < MAX_PRODUCT_ORDER, "too many factors in element product");
        let n = self.n;
        match &self.kind {
            IntegratorKind::Simplex { dim, measure } => {
                let t = SimplexTensors::get(*dim);
                let mut data = t.by_order[factors.len() + 2].clone();
                for f in factors {
                    data = contract_last(&data, n, f);
                }
                DMatrix::from_row_slice(n, n, &data) * *measure
            }
            IntegratorKind::Quadrature { points } => {
                let mut out = DMatrix::zeros(n, n);
                for (w, nv) in points {
                    let prod: f64 = factors.iter().map(|f| dot(nv, f)).product();
                    for p in 0..n {
                        for q in 0..n {
                            out[(p, q)] += w * prod * nv[p] * nv[q];
                        }
                    }
                }
                out
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
