//! Structured meshes shared by unit tests.

use crate::mesh::{BoundaryFacet, Element, ElementType, Mesh, Node};

/// `n × n` squares on the unit square, each split into two counter-clockwise triangles.
/// Boundary facets carry tag 1 (y = 0), 2 (x = 1), 3 (y = 1), 4 (x = 0).
pub(crate) fn unit_square_tri(n: usize) -> Mesh {
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut nodes = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            nodes.push(Node { id: idx(i, j) + 1, coords: [i as f64 * h, j as f64 * h, 0.0] });
        }
    }
    let mut elements = Vec::new();
    let mut boundary = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            let lower = elements.len();
            elements.push(Element { id: lower + 1, etype: ElementType::LinearTriangle, nodes: vec![a, b, c], region_tag: 0 });
            elements.push(Element { id: lower + 2, etype: ElementType::LinearTriangle, nodes: vec![a, c, d], region_tag: 0 });
            if j == 0 {
                boundary.push(BoundaryFacet { element: lower, facet: 0, tag: 1 });
            }
            if i == n - 1 {
                boundary.push(BoundaryFacet { element: lower, facet: 1, tag: 2 });
            }
            if j == n - 1 {
                boundary.push(BoundaryFacet { element: lower + 1, facet: 1, tag: 3 });
            }
            if i == 0 {
                boundary.push(BoundaryFacet { element: lower + 1, facet: 2, tag: 4 });
            }
        }
    }
    Mesh::new(nodes, elements, boundary).expect("structured mesh is valid")
}

pub(crate) fn unit_triangle() -> Mesh {
    crate::mesh::load_mesh("rdfem-mesh 1\nnodes 3\n1 0 0\n2 1 0\n3 0 1\nelements 1\n1 tri3 1 2 3\n").unwrap()
}
