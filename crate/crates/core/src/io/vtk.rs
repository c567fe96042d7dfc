use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mesh::{ElementType, Mesh};

pub const VTK_HEADER: &str = "# vtk DataFile Version 3.0";

/// A named field attached to points or cells. `components` is 1 (scalars) or up to 3
/// (vectors, padded with zeros on output).
#[derive(Debug, Clone, PartialEq)]
pub struct VtkField {
    pub name: String,
    pub components: usize,
    pub values: Vec<f64>,
}

impl VtkField {
    pub fn scalar(name: impl Into<String>, values: Vec<f64>) -> Self {
        VtkField { name: name.into(), components: 1, values }
    }

    /// One vector per entry; shorter vectors are padded to three components.
    pub fn vector(name: impl Into<String>, vectors: &[Vec<f64>]) -> Self {
        let values = vectors.iter().flat_map(|v| (0..3).map(move |d| v.get(d).copied().unwrap_or(0.0))).collect();
        VtkField { name: name.into(), components: 3, values }
    }

    fn len(&self) -> usize {
        self.values.len() / self.components.max(1)
    }
}

fn cell_type(etype: ElementType) -> u8 {
    match etype {
        ElementType::LinearBeam => 3,
        ElementType::LinearTriangle => 5,
        ElementType::LinearQuadrilateral => 9,
        ElementType::LinearTetrahedron => 10,
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn vtk_name(name: &str) -> String {
    let cleaned: String = name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    if cleaned.is_empty() {
        "field".to_string()
    } else {
        cleaned
    }
}

fn write_fields(out: &mut String, section: &str, count: usize, fields: &[VtkField]) -> Result<()> {
    if fields.is_empty() {
        return Ok(());
    }
    writeln!(out, "{section} {count}").unwrap();
    for f in fields {
        if f.components == 0 || f.components > 3 || f.values.len() % f.components != 0 || f.len() != count {
            return Err(Error::Dimension(format!(
                "field '{}' has {} values with {} components; expected {count} entries",
                f.name,
                f.values.len(),
                f.components
            )));
        }
        if f.components == 1 {
            writeln!(out, "SCALARS {} double 1\nLOOKUP_TABLE default", vtk_name(&f.name)).unwrap();
            for v in &f.values {
                writeln!(out, "{}", num(*v)).unwrap();
            }
        } else {
            writeln!(out, "VECTORS {} double", vtk_name(&f.name)).unwrap();
            for chunk in f.values.chunks(f.components) {
                let padded: Vec<String> = (0..3).map(|d| num(chunk.get(d).copied().unwrap_or(0.0))).collect();
                writeln!(out, "{}", padded.join(" ")).unwrap();
            }
        }
    }
    Ok(())
}

/// Legacy ASCII unstructured-grid file with point and cell fields.
pub fn vtk_string(mesh: &Mesh, title: &str, point_fields: &[VtkField], cell_fields: &[VtkField]) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{VTK_HEADER}").unwrap();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(out, "{}", if title.is_empty() { "rdfem" } else { &title }).unwrap();
    writeln!(out, "ASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(out, "POINTS {} double", mesh.node_count()).unwrap();
    for n in mesh.nodes() {
        writeln!(out, "{} {} {}", num(n.coords[0]), num(n.coords[1]), num(n.coords[2])).unwrap();
    }
    let els = mesh.elements();
    let size: usize = els.iter().map(|e| e.nodes.len() + 1).sum();
    writeln!(out, "CELLS {} {}", els.len(), size).unwrap();
    for e in els {
        let ids: Vec<String> = e.nodes.iter().map(|k| k.to_string()).collect();
        writeln!(out, "{} {}", e.nodes.len(), ids.join(" ")).unwrap();
    }
    writeln!(out, "CELL_TYPES {}", els.len()).unwrap();
    for e in els {
        writeln!(out, "{}", cell_type(e.etype)).unwrap();
    }
    write_fields(&mut out, "POINT_DATA", mesh.node_count(), point_fields)?;
    write_fields(&mut out, "CELL_DATA", els.len(), cell_fields)?;
    Ok(out)
}

pub fn write_vtk(
    mesh: &Mesh,
    title: &str,
    point_fields: &[VtkField],
    cell_fields: &[VtkField],
    path: &std::path::Path,
) -> Result<()> {
    let text = vtk_string(mesh, title, point_fields, cell_fields)?;
    std::fs::write(path, text).map_err(|e| Error::from(e).context(path.display().to_string()))
}

/// Sizes and field names found by [`validate_vtk`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkSummary {
    pub points: Vec<[f64; 3]>,
    pub cells: usize,
    pub point_fields: Vec<String>,
    pub cell_fields: Vec<String>,
}

fn vtk_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Structural check of a legacy ASCII unstructured-grid file: section order, declared counts,
/// connectivity bounds and field lengths.
pub fn validate_vtk(text: &str) -> Result<VtkSummary> {
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    let expect = |want: &str, i: &mut usize| -> Result<Vec<String>> {
        let line = lines.get(*i).ok_or_else(|| vtk_err(*i + 1, format!("missing '{want}'")))?;
        let toks: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if !line.starts_with(want) {
            return Err(vtk_err(*i + 1, format!("expected '{want}', found '{line}'")));
        }
        *i += 1;
        Ok(toks)
    };
    expect(VTK_HEADER, &mut i)?;
    if lines.get(1).is_none() {
        return Err(vtk_err(2, "missing title line"));
    }
    i = 2;
    expect("ASCII", &mut i)?;
    expect("DATASET UNSTRUCTURED_GRID", &mut i)?;
    let head = expect("POINTS", &mut i)?;
    let count = |toks: &[String], k: usize, line: usize| -> Result<usize> {
        toks.get(k).and_then(|t| t.parse().ok()).ok_or_else(|| vtk_err(line, "bad count"))
    };
    let n_points = count(&head, 1, i)?;
    let mut points = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let line = lines.get(i).ok_or_else(|| vtk_err(i + 1, "truncated POINTS"))?;
        let v: Vec<f64> = line.split_whitespace().map(|t| t.parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| vtk_err(i + 1, "bad coordinate"))?;
        if v.len() != 3 {
            return Err(vtk_err(i + 1, "points need three coordinates"));
        }
        points.push([v[0], v[1], v[2]]);
        i += 1;
    }
    let head = expect("CELLS", &mut i)?;
    let (n_cells, size) = (count(&head, 1, i)?, count(&head, 2, i)?);
    let mut seen = 0;
    for _ in 0..n_cells {
        let line = lines.get(i).ok_or_else(|| vtk_err(i + 1, "truncated CELLS"))?;
        let ids: Vec<usize> = line.split_whitespace().map(|t| t.parse::<usize>()).collect::<std::result::Result<_, _>>().map_err(|_| vtk_err(i + 1, "bad connectivity"))?;
        if ids.is_empty() || ids[0] + 1 != ids.len() || ids[1..].iter().any(|&k| k >= n_points) {
            return Err(vtk_err(i + 1, "inconsistent connectivity"));
        }
        seen += ids.len();
        i += 1;
    }
    if seen != size {
        return Err(vtk_err(i, format!("CELLS size {size} but {seen} entries")));
    }
    let head = expect("CELL_TYPES", &mut i)?;
    if count(&head, 1, i)? != n_cells {
        return Err(vtk_err(i, "CELL_TYPES count differs from CELLS"));
    }
    for _ in 0..n_cells {
        let line = lines.get(i).ok_or_else(|| vtk_err(i + 1, "truncated CELL_TYPES"))?;
        line.trim().parse::<u8>().map_err(|_| vtk_err(i + 1, "bad cell type"))?;
        i += 1;
    }
    let mut point_fields = Vec::new();
    let mut cell_fields = Vec::new();
    let mut section: Option<(bool, usize)> = None;
    let mut saw_cells = false;
    while i < lines.len() {
        let line = lines[i];
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first().copied() {
            None => i += 1,
            Some("POINT_DATA") => {
                if section.is_some() {
                    return Err(vtk_err(i + 1, "POINT_DATA must precede CELL_DATA and appear once"));
                }
                let n = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| vtk_err(i + 1, "bad count"))?;
                if n != n_points {
                    return Err(vtk_err(i + 1, "POINT_DATA count differs from POINTS"));
                }
                section = Some((true, n));
                i += 1;
            }
            Some("CELL_DATA") => {
                if saw_cells {
                    return Err(vtk_err(i + 1, "duplicate CELL_DATA"));
                }
                let n = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| vtk_err(i + 1, "bad count"))?;
                if n != n_cells {
                    return Err(vtk_err(i + 1, "CELL_DATA count differs from CELLS"));
                }
                section = Some((false, n));
                saw_cells = true;
                i += 1;
            }
            Some(kind @ ("SCALARS" | "VECTORS")) => {
                let (is_point, n) = section.ok_or_else(|| vtk_err(i + 1, "field outside a data section"))?;
                let name = toks.get(1).ok_or_else(|| vtk_err(i + 1, "unnamed field"))?.to_string();
                let width = if kind == "SCALARS" { 1 } else { 3 };
                i += 1;
                if kind == "SCALARS" {
                    if !lines.get(i).is_some_and(|l| l.starts_with("LOOKUP_TABLE")) {
                        return Err(vtk_err(i + 1, "SCALARS without LOOKUP_TABLE"));
                    }
                    i += 1;
                }
                for _ in 0..n {
                    let l = lines.get(i).ok_or_else(|| vtk_err(i + 1, format!("field '{name}' truncated")))?;
                    let vals: Vec<&str> = l.split_whitespace().collect();
                    if vals.len() != width || vals.iter().any(|v| v.parse::<f64>().is_err()) {
                        return Err(vtk_err(i + 1, format!("field '{name}' has a malformed row")));
                    }
                    i += 1;
                }
                if is_point {
                    point_fields.push(name);
                } else {
                    cell_fields.push(name);
                }
            }
            Some(other) => return Err(vtk_err(i + 1, format!("unexpected keyword '{other}'"))),
        }
    }
    Ok(VtkSummary { points, cells: n_cells, point_fields, cell_fields })
}
