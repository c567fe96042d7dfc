//! Discretized physical domain: nodes, linear elements and tagged boundary facets.
//!
//! Mesh files are plain UTF-8 text:
//!
//! ```text
//! rdfem-mesh 1
//! nodes 3
//! 1 0.0 0.0
//! 2 1.0 0.0
//! 3 0.0 1.0
//! elements 1
//! 1 tri3 1 2 3      # optional trailing integer = region tag (default 0)
//! boundary 1
//! 1 0 7             # element_id facet_index tag
//! ```
//!
//! `#` starts a comment. Triangles and quadrilaterals must be counter-clockwise,
//! tetrahedra right-handed and beams must run in the +x direction; elements with
//! a non-positive measure are rejected instead of being reoriented.

mod integrate;
mod shape;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use integrate::{gauss_legendre, integrate_shape_monomial, quadrature_points, QuadraturePoint, MAX_MONOMIAL_DEGREE};
pub(crate) use integrate::ElementIntegrator;
pub(crate) use shape::physical_gradients;
pub use shape::{reference_gradients, shape_gradients, shape_gradients_at, shape_values};

use crate::error::{Error, Result};

pub const MESH_HEADER: &str = "rdfem-mesh 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    /// Spatial coordinates in meters; unused trailing components are zero.
    pub coords: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementType {
    LinearBeam,
    LinearTriangle,
    LinearQuadrilateral,
    LinearTetrahedron,
}

impl ElementType {
    pub fn node_count(self) -> usize {
        match self {
            ElementType::LinearBeam => 2,
            ElementType::LinearTriangle => 3,
            ElementType::LinearQuadrilateral => 4,
            ElementType::LinearTetrahedron => 4,
        }
    }

    /// Topological (and spatial) dimension of the element.
    pub fn dim(self) -> usize {
        match self {
            ElementType::LinearBeam => 1,
            ElementType::LinearTriangle | ElementType::LinearQuadrilateral => 2,
            ElementType::LinearTetrahedron => 3,
        }
    }

    pub fn is_simplex(self) -> bool {
        !matches!(self, ElementType::LinearQuadrilateral)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            ElementType::LinearBeam => "beam2",
            ElementType::LinearTriangle => "tri3",
            ElementType::LinearQuadrilateral => "quad4",
            ElementType::LinearTetrahedron => "tet4",
        }
    }

    /// Local node indices of each facet. Facet `i` of a triangle or quadrilateral is the
    /// edge from node `i` to node `i+1`; facet `i` of a tetrahedron is the face opposite node `i`.
    pub fn facets(self) -> &'static [&'static [usize]] {
        match self {
            ElementType::LinearBeam => &[&[0], &[1]],
            ElementType::LinearTriangle => &[&[0, 1], &[1, 2], &[2, 0]],
            ElementType::LinearQuadrilateral => &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
            ElementType::LinearTetrahedron => &[&[1, 2, 3], &[0, 3, 2], &[0, 1, 3], &[0, 2, 1]],
        }
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for ElementType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "beam2" => Ok(ElementType::LinearBeam),
            "tri3" => Ok(ElementType::LinearTriangle),
            "quad4" => Ok(ElementType::LinearQuadrilateral),
            "tet4" => Ok(ElementType::LinearTetrahedron),
            other => Err(format!("unknown element type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    pub etype: ElementType,
    /// Indices into [`Mesh::nodes`], in the element's local order.
    pub nodes: Vec<usize>,
    pub region_tag: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFacet {
    /// Index into [`Mesh::elements`].
    pub element: usize,
    pub facet: usize,
    pub tag: i64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    nodes: Vec<Node>,
    elements: Vec<Element>,
    boundary: Vec<BoundaryFacet>,
    measures: Vec<f64>,
}

impl Mesh {
    /// Builds a mesh and checks every invariant. Element node lists hold node indices.
    pub fn new(nodes: Vec<Node>, elements: Vec<Element>, boundary: Vec<BoundaryFacet>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Invalid("mesh has no elements".into()));
        }
        let dim = elements[0].etype.dim();

        let mut ids = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if ids.insert(node.id, i).is_some() {
                return Err(Error::Invalid(format!("duplicate node id {}", node.id)));
            }
            if node.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::Invalid(format!("node {} has non-finite coordinates", node.id)));
            }
        }

        let mut referenced = vec![false; nodes.len()];
        let mut element_ids = HashMap::with_capacity(elements.len());
        let mut measures = Vec::with_capacity(elements.len());
        let mut facet_use: HashMap<Vec<usize>, usize> = HashMap::new();
        for el in &elements {
            if element_ids.insert(el.id, ()).is_some() {
                return Err(Error::Invalid(format!("duplicate element id {}", el.id)));
            }
            if el.etype.dim() != dim {
                return Err(Error::Element {
                    id: el.id,
                    msg: format!("{} element mixed into a {dim}-dimensional mesh", el.etype),
                });
            }
            if el.nodes.len() != el.etype.node_count() {
                return Err(Error::Element {
                    id: el.id,
                    msg: format!("{} needs {} nodes, got {}", el.etype, el.etype.node_count(), el.nodes.len()),
                });
            }
            for (a, &n) in el.nodes.iter().enumerate() {
                if n >= nodes.len() {
                    return Err(Error::Element { id: el.id, msg: format!("node index {n} out of range") });
                }
                if el.nodes[..a].contains(&n) {
                    return Err(Error::Element { id: el.id, msg: "repeated node".into() });
                }
                referenced[n] = true;
            }
            let coords: Vec<[f64; 3]> = el.nodes.iter().map(|&n| nodes[n].coords).collect();
            let measure = signed_measure(el.etype, &coords);
            if !(measure > 0.0) {
                return Err(Error::Element {
                    id: el.id,
                    msg: format!("non-positive measure {measure:e} (check node ordering)"),
                });
            }
            if el.etype == ElementType::LinearQuadrilateral && !quad_is_convex(&coords) {
                return Err(Error::Element {
                    id: el.id,
                    msg: "quadrilateral is not convex and counter-clockwise".into(),
                });
            }
            measures.push(measure);
            for facet in el.etype.facets() {
                let mut key: Vec<usize> = facet.iter().map(|&l| el.nodes[l]).collect();
                key.sort_unstable();
                *facet_use.entry(key).or_insert(0) += 1;
            }
        }
        if let Some((key, count)) = facet_use.iter().find(|(_, &c)| c > 2) {
            return Err(Error::Invalid(format!(
                "non-conforming mesh: facet with nodes {key:?} shared by {count} elements"
            )));
        }
        if let Some(i) = referenced.iter().position(|r| !r) {
            return Err(Error::Invalid(format!("node {} is not referenced by any element", nodes[i].id)));
        }
        for b in &boundary {
            let Some(el) = elements.get(b.element) else {
                return Err(Error::Invalid(format!("boundary facet references element index {}", b.element)));
            };
            if b.facet >= el.etype.facets().len() {
                return Err(Error::Element {
                    id: el.id,
                    msg: format!("facet index {} out of range", b.facet),
                });
            }
        }

        Ok(Mesh { dim, nodes, elements, boundary, measures })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn boundary(&self) -> &[BoundaryFacet] {
        &self.boundary
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Length, area or volume of the element at `index`.
    pub fn measure(&self, index: usize) -> f64 {
        self.measures[index]
    }

    /// Measure of an element; the element must belong to this mesh.
    pub fn element_measure(&self, element: &Element) -> f64 {
        let coords = self.element_coords(element);
        signed_measure(element.etype, &coords)
    }

    pub fn total_measure(&self) -> f64 {
        self.measures.iter().sum()
    }

    pub fn element_coords(&self, element: &Element) -> Vec<[f64; 3]> {
        element.nodes.iter().map(|&n| self.nodes[n].coords).collect()
    }

    pub fn has_boundary_tag(&self, tag: i64) -> bool {
        self.boundary.iter().any(|b| b.tag == tag)
    }

    /// Sorted, deduplicated node indices lying on facets with the given tag.
    pub fn boundary_nodes(&self, tag: i64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary
            .iter()
            .filter(|b| b.tag == tag)
            .flat_map(|b| {
                let el = &self.elements[b.element];
                el.etype.facets()[b.facet].iter().map(move |&l| el.nodes[l])
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Integral of each shape function over the mesh (row sums of the global mass matrix).
    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        for el in &self.elements {
            let integ = ElementIntegrator::new(self, el);
            for (l, v) in integ.product_vector(&[]).into_iter().enumerate() {
                out[el.nodes[l]] += v;
            }
        }
        out
    }
}

/// Parses mesh-file text into a validated [`Mesh`].
pub fn load_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let perr = |line: usize, msg: String| Error::Parse { line, msg };

    let (line, header) = lines.next().ok_or_else(|| perr(1, "empty mesh file".into()))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["rdfem-mesh", "1"] {
        return Err(perr(line, format!("expected header `{MESH_HEADER}`")));
    }

    let section = |lines: &mut dyn Iterator<Item = (usize, &str)>, name: &str| -> Result<Option<(usize, usize)>> {
        match lines.next() {
            None => Ok(None),
            Some((line, l)) => {
                let tok: Vec<&str> = l.split_whitespace().collect();
                if tok.len() != 2 || tok[0] != name {
                    return Err(perr(line, format!("expected `{name} <count>`")));
                }
                let count = tok[1].parse().map_err(|_| perr(line, format!("bad {name} count `{}`", tok[1])))?;
                Ok(Some((line, count)))
            }
        }
    };

    let (sec_line, n_nodes) =
        section(&mut lines, "nodes")?.ok_or_else(|| perr(line, "missing `nodes` section".into()))?;
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut index_of = HashMap::with_capacity(n_nodes);
    let mut coord_dim = None;
    for _ in 0..n_nodes {
        let (line, l) = lines.next().ok_or_else(|| perr(sec_line, "truncated nodes section".into()))?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        if !(2..=4).contains(&tok.len()) {
            return Err(perr(line, "node line must be `id x [y] [z]`".into()));
        }
        let id: usize = tok[0].parse().map_err(|_| perr(line, format!("bad node id `{}`", tok[0])))?;
        let mut coords = [0.0f64; 3];
        for (c, t) in coords.iter_mut().zip(&tok[1..]) {
            *c = t.parse().map_err(|_| perr(line, format!("bad coordinate `{t}`")))?;
            if !c.is_finite() {
                return Err(perr(line, format!("non-finite coordinate `{t}`")));
            }
        }
        match coord_dim {
            None => coord_dim = Some(tok.len() - 1),
            Some(d) if d != tok.len() - 1 => {
                return Err(perr(line, format!("node has {} coordinates, expected {d}", tok.len() - 1)))
            }
            _ => {}
        }
        if index_of.insert(id, nodes.len()).is_some() {
            return Err(perr(line, format!("duplicate node id {id}")));
        }
        nodes.push(Node { id, coords });
    }

    let (sec_line, n_elements) =
        section(&mut lines, "elements")?.ok_or_else(|| perr(sec_line, "missing `elements` section".into()))?;
    let mut elements = Vec::with_capacity(n_elements);
    let mut element_index = HashMap::with_capacity(n_elements);
    for _ in 0..n_elements {
        let (line, l) = lines.next().ok_or_else(|| perr(sec_line, "truncated elements section".into()))?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() < 2 {
            return Err(perr(line, "element line must be `id type node_ids... [tag]`".into()));
        }
        let id: usize = tok[0].parse().map_err(|_| perr(line, format!("bad element id `{}`", tok[0])))?;
        let etype: ElementType = tok[1].parse().map_err(|e| perr(line, e))?;
        let k = etype.node_count();
        if tok.len() != 2 + k && tok.len() != 3 + k {
            return Err(perr(line, format!("{etype} expects {k} node ids and an optional region tag")));
        }
        let mut el_nodes = Vec::with_capacity(k);
        for t in &tok[2..2 + k] {
            let nid: usize = t.parse().map_err(|_| perr(line, format!("bad node id `{t}`")))?;
            let idx = *index_of.get(&nid).ok_or_else(|| perr(line, format!("unknown node id {nid}")))?;
            el_nodes.push(idx);
        }
        let region_tag = match tok.get(2 + k) {
            Some(t) => t.parse().map_err(|_| perr(line, format!("bad region tag `{t}`")))?,
            None => 0,
        };
        if coord_dim != Some(etype.dim()) {
            return Err(perr(
                line,
                format!("{etype} needs {}-D node coordinates, nodes have {}", etype.dim(), coord_dim.unwrap_or(0)),
            ));
        }
        if element_index.insert(id, elements.len()).is_some() {
            return Err(perr(line, format!("duplicate element id {id}")));
        }
        elements.push(Element { id, etype, nodes: el_nodes, region_tag });
    }

    let mut boundary = Vec::new();
    if let Some((sec_line, n_facets)) = section(&mut lines, "boundary")? {
        for _ in 0..n_facets {
            let (line, l) = lines.next().ok_or_else(|| perr(sec_line, "truncated boundary section".into()))?;
            let tok: Vec<&str> = l.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(perr(line, "boundary line must be `element_id facet_index tag`".into()));
            }
            let eid: usize = tok[0].parse().map_err(|_| perr(line, format!("bad element id `{}`", tok[0])))?;
            let element =
                *element_index.get(&eid).ok_or_else(|| perr(line, format!("unknown element id {eid}")))?;
            let facet = tok[1].parse().map_err(|_| perr(line, format!("bad facet index `{}`", tok[1])))?;
            let tag = tok[2].parse().map_err(|_| perr(line, format!("bad tag `{}`", tok[2])))?;
            boundary.push(BoundaryFacet { element, facet, tag });
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(perr(line, "unexpected trailing content".into()));
    }

    Mesh::new(nodes, elements, boundary)
}

/// Serializes a mesh in the format read by [`load_mesh`].
pub fn write_mesh(mesh: &Mesh) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "{MESH_HEADER}");
    let _ = writeln!(s, "nodes {}", mesh.nodes.len());
    for n in &mesh.nodes {
        let _ = write!(s, "{}", n.id);
        for c in &n.coords[..mesh.dim] {
            let _ = write!(s, " {c:?}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "elements {}", mesh.elements.len());
    for el in &mesh.elements {
        let _ = write!(s, "{} {}", el.id, el.etype);
        for &n in &el.nodes {
            let _ = write!(s, " {}", mesh.nodes[n].id);
        }
        let _ = writeln!(s, " {}", el.region_tag);
    }
    let _ = writeln!(s, "boundary {}", mesh.boundary.len());
    for b in &mesh.boundary {
        let _ = writeln!(s, "{} {} {}", mesh.elements[b.element].id, b.facet, b.tag);
    }
    s
}

pub(crate) fn signed_measure(etype: ElementType, c: &[[f64; 3]]) -> f64 {
    let d = |a: usize, b: usize| [c[b][0] - c[a][0], c[b][1] - c[a][1], c[b][2] - c[a][2]];
    match etype {
        ElementType::LinearBeam => c[1][0] - c[0][0],
        ElementType::LinearTriangle => {
            let (u, v) = (d(0, 1), d(0, 2));
            0.5 * (u[0] * v[1] - u[1] * v[0])
        }
        ElementType::LinearQuadrilateral => {
            // shoelace
            let mut a = 0.0;
            for i in 0..4 {
                let j = (i + 1) % 4;
                a += c[i][0] * c[j][1] - c[j][0] * c[i][1];
            }
            0.5 * a
        }
        ElementType::LinearTetrahedron => {
            let (u, v, w) = (d(0, 1), d(0, 2), d(0, 3));
            let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                + u[2] * (v[0] * w[1] - v[1] * w[0]);
            det / 6.0
        }
    }
}

fn quad_is_convex(c: &[[f64; 3]]) -> bool {
    (0..4).all(|i| {
        let p = c[(i + 3) % 4];
        let q = c[i];
        let r = c[(i + 1) % 4];
        let cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
        cross > 0.0
    })
}
