use std::collections::HashMap;

use nalgebra::DMatrix;
use nalgebra_sparse::CsrMatrix;

use super::assemble_mass;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sparse::{csr_from_triplets, mul_vec, norm2};

/// Nodal mass operator used by the Kronecker flux systems.
#[derive(Debug, Clone)]
pub struct GlobalMass {
    matrix: CsrMatrix<f64>,
    lumped: Vec<f64>,
}

impl GlobalMass {
    pub fn from_mesh(mesh: &Mesh) -> Result<Self> {
        Ok(GlobalMass { matrix: assemble_mass(mesh)?, lumped: mesh.lumped_mass() })
    }

    /// A single well-mixed node with unit mass: the classical `S·V = 0` setting.
    pub fn single_node() -> Self {
        GlobalMass { matrix: csr_from_triplets(1, 1, &[(0, 0, 1.0)]), lumped: vec![1.0] }
    }

    pub fn n_nodes(&self) -> usize {
        self.lumped.len()
    }

    pub fn matrix(&self) -> &CsrMatrix<f64> {
        &self.matrix
    }

    pub fn lumped(&self) -> &[f64] {
        &self.lumped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Step,
    Transport,
    /// Concentration unknowns of the `μ C` dilution term.
    Concentration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxColumn {
    pub name: String,
    pub kind: ColumnKind,
    pub lower: f64,
    pub upper: f64,
}

/// `A V = 0` with `A = S ⊗ M` (plus optional transport and dilution blocks).
/// Rows are species-major and unknowns column-major: `V[col · n_nodes + node]`.
#[derive(Debug, Clone)]
pub struct AssembledFluxSystem {
    pub matrix: CsrMatrix<f64>,
    pub n_nodes: usize,
    pub rows: Vec<String>,
    pub columns: Vec<FluxColumn>,
    /// Nodal lumped mass, used to integrate objectives over the domain.
    pub lumped: Vec<f64>,
}

impl AssembledFluxSystem {
    pub fn n_unknowns(&self) -> usize {
        self.columns.len() * self.n_nodes
    }

    pub fn lower_bounds(&self) -> Vec<f64> {
        self.columns.iter().flat_map(|c| std::iter::repeat_n(c.lower, self.n_nodes)).collect()
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        self.columns.iter().flat_map(|c| std::iter::repeat_n(c.upper, self.n_nodes)).collect()
    }

    /// Nodal values of column `col` in a full unknown vector.
    pub fn column_field<'a>(&self, v: &'a [f64], col: usize) -> &'a [f64] {
        &v[col * self.n_nodes..(col + 1) * self.n_nodes]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Spatially constant extension `V* ⊗ 1`.
    pub fn constant_extension(&self, per_column: &[f64]) -> Vec<f64> {
        per_column.iter().flat_map(|&v| std::iter::repeat_n(v, self.n_nodes)).collect()
    }

    /// Domain-integrated objective `Σ_col c_col ∫ V_col dΩ` as a per-unknown vector.
    pub fn objective_vector(&self, per_column: &[f64]) -> Result<Vec<f64>> {
        if per_column.len() != self.columns.len() {
            return Err(Error::Dimension(format!(
                "{} objective coefficients for {} columns",
                per_column.len(),
                self.columns.len()
            )));
        }
        Ok(per_column.iter().flat_map(|&c| self.lumped.iter().map(move |m| c * m)).collect())
    }

    /// `‖A V‖₂`.
    pub fn residual_norm(&self, v: &[f64]) -> f64 {
        norm2(&mul_vec(&self.matrix, v))
    }

    pub fn with_labels(mut self, rows: &[String], columns: &[String]) -> Result<Self> {
        if rows.len() * self.n_nodes != self.matrix.nrows() || columns.len() > self.columns.len() {
            return Err(Error::Dimension("label count does not match the system".into()));
        }
        self.rows = rows.to_vec();
        for (c, name) in self.columns.iter_mut().zip(columns) {
            c.name = name.clone();
        }
        Ok(self)
    }
}

/// Triplets of `B ⊗ M` placed at a row and column block offset.
fn kron_triplets(b: &DMatrix<f64>, m: &CsrMatrix<f64>, col_offset: usize, out: &mut Vec<(usize, usize, f64)>) {
    let n = m.nrows();
    for s in 0..b.nrows() {
        for r in 0..b.ncols() {
            let coeff = b[(s, r)];
            if coeff == 0.0 {
                continue;
            }
            for (i, j, v) in m.triplet_iter() {
                out.push((s * n + i, (col_offset + r) * n + j, coeff * v));
            }
        }
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{}", i + 1)).collect()
}

fn check_finite(s: &DMatrix<f64>) -> Result<()> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("stoichiometric matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Reaction-flux system `S ⊗ M` with free bounds.
pub fn assemble_flux_system(mass: &GlobalMass, s: &DMatrix<f64>) -> Result<AssembledFluxSystem> {
    check_finite(s)?;
    let n = mass.n_nodes();
    let mut t = Vec::new();
    kron_triplets(s, &mass.matrix, 0, &mut t);
    Ok(AssembledFluxSystem {
        matrix: csr_from_triplets(s.nrows() * n, s.ncols() * n, &t),
        n_nodes: n,
        rows: labels("s", s.nrows()),
        columns: labels("r", s.ncols())
            .into_iter()
            .map(|name| FluxColumn { name, kind: ColumnKind::Step, lower: f64::NEG_INFINITY, upper: f64::INFINITY })
            .collect(),
        lumped: mass.lumped.clone(),
    })
}

/// Species-flux variant `Sᵀ ⊗ M`: one row block per step, one unknown field per species.
pub fn assemble_species_flux_system(mass: &GlobalMass, s: &DMatrix<f64>) -> Result<AssembledFluxSystem> {
    let mut sys = assemble_flux_system(mass, &s.transpose())?;
    sys.rows = labels("r", s.ncols());
    for (c, name) in sys.columns.iter_mut().zip(labels("s", s.nrows())) {
        c.name = name;
    }
    Ok(sys)
}

fn check_bounds(bounds: &[(f64, f64)], names: &[String]) -> Result<()> {
    for ((lo, hi), name) in bounds.iter().zip(names) {
        if lo.is_nan() || hi.is_nan() || lo > hi || *lo == f64::INFINITY || *hi == f64::NEG_INFINITY {
            return Err(Error::Invalid(format!("inconsistent bounds ({lo}, {hi}) for {name}")));
        }
    }
    Ok(())
}

/// Steady-state FBA system `S ⊗ M · V − μ (I ⊗ M) C = 0` with per-step bounds replicated at
/// every node. With `mu` set and positive, non-negative concentration columns are appended.
pub fn assemble_fba_system(
    mass: &GlobalMass,
    s: &DMatrix<f64>,
    bounds: &[(f64, f64)],
    mu: Option<f64>,
) -> Result<AssembledFluxSystem> {
    if bounds.len() != s.ncols() {
        return Err(Error::Dimension(format!("{} bounds for {} steps", bounds.len(), s.ncols())));
    }
    let mut sys = assemble_flux_system(mass, s)?;
    check_bounds(bounds, &sys.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>())?;
    for (c, &(lo, hi)) in sys.columns.iter_mut().zip(bounds) {
        c.lower = lo;
        c.upper = hi;
    }
    match mu {
        Some(mu) if !(mu >= 0.0 && mu.is_finite()) => {
            return Err(Error::Invalid(format!("dilution rate must be non-negative, got {mu}")));
        }
        Some(mu) if mu > 0.0 => {
            let n = mass.n_nodes();
            let ns = s.nrows();
            let mut t: Vec<(usize, usize, f64)> = sys.matrix.triplet_iter().map(|(i, j, v)| (i, j, *v)).collect();
            kron_triplets(&(DMatrix::identity(ns, ns) * -mu), &mass.matrix, s.ncols(), &mut t);
            sys.matrix = csr_from_triplets(ns * n, (s.ncols() + ns) * n, &t);
            for name in sys.rows.clone() {
                sys.columns.push(FluxColumn {
                    name: format!("C_{name}"),
                    kind: ColumnKind::Concentration,
                    lower: 0.0,
                    upper: f64::INFINITY,
                });
            }
        }
        _ => {}
    }
    Ok(sys)
}

/// One compartment's stoichiometry; species names are local to the compartment.
#[derive(Debug, Clone)]
pub struct Compartment {
    pub name: String,
    pub species: Vec<String>,
    pub steps: Vec<String>,
    pub s: DMatrix<f64>,
    pub bounds: Vec<(f64, f64)>,
}

/// Boundary-flux column linking species across compartments.
#[derive(Debug, Clone)]
pub struct TransportColumn {
    pub id: String,
    /// (compartment, species, coefficient)
    pub terms: Vec<(String, String, f64)>,
    pub bounds: (f64, f64),
}

/// Transport incidence `T`: one column per boundary flux `b`.
#[derive(Debug, Clone, Default)]
pub struct TransportMap {
    pub columns: Vec<TransportColumn>,
}

/// `[S_1 ⊕ S_2 ⊕ … | T] ⊗ M`: compartments concatenated block-diagonally, species named
/// `compartment:species`, followed by transport columns.
pub fn assemble_compartment_system(
    mass: &GlobalMass,
    compartments: &[Compartment],
    transport: &TransportMap,
) -> Result<AssembledFluxSystem> {
    let mut rows = Vec::new();
    let mut row_of: HashMap<(String, String), usize> = HashMap::new();
    let mut columns = Vec::new();
    let mut ncols = 0;
    for comp in compartments {
        if comp.s.nrows() != comp.species.len() || comp.s.ncols() != comp.steps.len() || comp.bounds.len() != comp.steps.len()
        {
            return Err(Error::Dimension(format!("compartment {} has inconsistent sizes", comp.name)));
        }
        check_finite(&comp.s)?;
        for sp in &comp.species {
            if row_of.insert((comp.name.clone(), sp.clone()), rows.len()).is_some() {
                return Err(Error::Invalid(format!("duplicate species {sp} in compartment {}", comp.name)));
            }
            rows.push(format!("{}:{sp}", comp.name));
        }
        let names: Vec<String> = comp.steps.iter().map(|s| format!("{}:{s}", comp.name)).collect();
        check_bounds(&comp.bounds, &names)?;
        for (name, &(lower, upper)) in names.into_iter().zip(&comp.bounds) {
            columns.push(FluxColumn { name, kind: ColumnKind::Step, lower, upper });
        }
        ncols += comp.steps.len();
    }
    let mut big = DMatrix::zeros(rows.len(), ncols + transport.columns.len());
    let (mut r0, mut c0) = (0, 0);
    for comp in compartments {
        big.view_mut((r0, c0), (comp.s.nrows(), comp.s.ncols())).copy_from(&comp.s);
        r0 += comp.s.nrows();
        c0 += comp.s.ncols();
    }
    for (j, col) in transport.columns.iter().enumerate() {
        check_bounds(&[col.bounds], std::slice::from_ref(&col.id))?;
        for (comp, sp, coeff) in &col.terms {
            let row = row_of.get(&(comp.clone(), sp.clone())).ok_or_else(|| {
                Error::Invalid(format!("transport column {} references unknown species {comp}:{sp}", col.id))
            })?;
            big[(*row, ncols + j)] += coeff;
        }
        columns.push(FluxColumn {
            name: col.id.clone(),
            kind: ColumnKind::Transport,
            lower: col.bounds.0,
            upper: col.bounds.1,
        });
    }
    let n = mass.n_nodes();
    let mut t = Vec::new();
    kron_triplets(&big, &mass.matrix, 0, &mut t);
    Ok(AssembledFluxSystem {
        matrix: csr_from_triplets(rows.len() * n, columns.len() * n, &t),
        n_nodes: n,
        rows,
        columns,
        lumped: mass.lumped.clone(),
    })
}

/// Scales the column block of step `r` by `w[r]`; a zero weight deletes the step
/// (zero columns, bounds forced to `(0, 0)`). Concentration columns are left untouched.
pub fn apply_weights(system: &AssembledFluxSystem, w: &[f64]) -> Result<AssembledFluxSystem> {
    let weighted: Vec<usize> =
        (0..system.columns.len()).filter(|&c| system.columns[c].kind != ColumnKind::Concentration).collect();
    if w.len() != weighted.len() {
        return Err(Error::Dimension(format!("{} weights for {} flux columns", w.len(), weighted.len())));
    }
    crate::network::check_weights(w)?;
    let mut scale = vec![1.0; system.columns.len()];
    for (&c, &wc) in weighted.iter().zip(w) {
        scale[c] = wc;
    }
    let n = system.n_nodes;
    let t: Vec<(usize, usize, f64)> = system
        .matrix
        .triplet_iter()
        .filter_map(|(i, j, v)| {
            let s = scale[j / n];
            (s != 0.0).then_some((i, j, v * s))
        })
        .collect();
    let mut out = system.clone();
    out.matrix = csr_from_triplets(system.matrix.nrows(), system.matrix.ncols(), &t);
    for (c, s) in out.columns.iter_mut().zip(&scale) {
        if *s == 0.0 {
            c.lower = 0.0;
            c.upper = 0.0;
        }
    }
    Ok(out)
}
