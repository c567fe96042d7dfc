use std::collections::BTreeMap;

use nalgebra_sparse::CsrMatrix;

use super::map_elements;
use crate::elem_integrals::{diffusion_matrix, mass_matrix};
use crate::error::{Error, Result};
use crate::mesh::{ElementIntegrator, Mesh};
use crate::network::{check_weights, ReactionNetwork};

/// Per-step, per-node dimensionless weights multiplying the reference rate constants.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    n_nodes: usize,
    values: Vec<Vec<f64>>,
}

impl WeightField {
    pub fn ones(net: &ReactionNetwork, n_nodes: usize) -> Self {
        WeightField { n_nodes, values: vec![vec![1.0; n_nodes]; net.step_count()] }
    }

    /// The same weight vector at every node.
    pub fn uniform(weights: &[f64], n_nodes: usize) -> Result<Self> {
        check_weights(weights)?;
        Ok(WeightField { n_nodes, values: weights.iter().map(|&w| vec![w; n_nodes]).collect() })
    }

    /// Weights from a nodal temperature field (K) through the Arrhenius factor of each step.
    /// `disabled[r] = true` deletes catalyst step `r` everywhere.
    pub fn from_temperature(net: &ReactionNetwork, temperature: &[f64], disabled: &[bool]) -> Result<Self> {
        let mut values = Vec::with_capacity(net.step_count());
        for (r, _) in net.steps().iter().enumerate() {
            let mut row = Vec::with_capacity(temperature.len());
            for &t in temperature {
                let w = net.weight_vector(t, disabled)?;
                row.push(w[r]);
            }
            values.push(row);
        }
        Ok(WeightField { n_nodes: temperature.len(), values })
    }

    pub fn from_values(values: Vec<Vec<f64>>) -> Result<Self> {
        let n_nodes = values.first().map_or(0, Vec::len);
        for (r, row) in values.iter().enumerate() {
            if row.len() != n_nodes {
                return Err(Error::Dimension(format!("weight row {r} has {} nodes, expected {n_nodes}", row.len())));
            }
            if let Some(&w) = row.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
                return Err(Error::NegativeWeight { step: r, value: w });
            }
        }
        Ok(WeightField { n_nodes, values })
    }

    pub fn step(&self, r: usize) -> &[f64] {
        &self.values[r]
    }

    pub fn step_count(&self) -> usize {
        self.values.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// Fixed concentration of one species on every node of the tagged facets.
    Dirichlet { species: String, tag: i64, value: f64 },
    /// Natural (no-flux) boundary; nothing is added to the system.
    ZeroFlux { tag: i64 },
}

#[derive(Debug, Clone)]
struct StepTerm {
    /// Reactant species repeated by coefficient.
    factors: Vec<usize>,
    /// Nonzero column entries of `S`.
    stoich: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
struct ElementData {
    nodes: Vec<usize>,
    integ: ElementIntegrator,
    /// Local nodal `w·k` per step.
    rates: Vec<Vec<f64>>,
}

/// Global transient reaction–diffusion operators over a fixed sparsity pattern.
#[derive(Debug, Clone)]
pub struct AssembledTransient {
    n_nodes: usize,
    n_species: usize,
    species: Vec<String>,
    steps: Vec<StepTerm>,
    elements: Vec<ElementData>,
    /// CSR structure shared by mass, diffusion and Jacobian.
    offsets: Vec<usize>,
    cols: Vec<usize>,
    mass_vals: Vec<f64>,
    diff_vals: Vec<f64>,
    dirichlet: Vec<(usize, f64)>,
    lumped: Vec<f64>,
    moieties: Vec<(String, Vec<f64>)>,
}

/// Builds the transient system `M Ċ + res(C) = 0` with
/// `res(C) = K_D C − Σ_r S[·][r] ∫ N (N·w_r k_r) Π (N·C_reactant)`.
pub fn assemble_transient(
    mesh: &Mesh,
    net: &ReactionNetwork,
    weights: &WeightField,
    bcs: &[BoundaryCondition],
) -> Result<AssembledTransient> {
    let n_nodes = mesh.node_count();
    let n_species = net.species_count();
    if weights.step_count() != net.step_count() || weights.n_nodes() != n_nodes {
        return Err(Error::Dimension(format!(
            "weight field is {}×{}, network has {} steps on {} nodes",
            weights.step_count(),
            weights.n_nodes(),
            net.step_count(),
            n_nodes
        )));
    }
    let s = net.stoichiometric_matrix();
    let steps: Vec<StepTerm> = net
        .steps()
        .iter()
        .enumerate()
        .map(|(r, step)| StepTerm {
            factors: step.reactant_factors(),
            stoich: (0..n_species).filter(|&i| s[(i, r)] != 0.0).map(|i| (i, s[(i, r)])).collect(),
        })
        .collect();

    // species coupling: row species s depends on column species t
    let mut coupled = vec![vec![false; n_species]; n_species];
    for (i, row) in coupled.iter_mut().enumerate() {
        row[i] = true;
    }
    for st in &steps {
        for &(i, _) in &st.stoich {
            for &t in &st.factors {
                coupled[i][t] = true;
            }
        }
    }

    let n = n_nodes * n_species;
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for el in mesh.elements() {
        for (i, row) in coupled.iter().enumerate() {
            for (t, _) in row.iter().enumerate().filter(|(_, c)| **c) {
                for &p in &el.nodes {
                    let rc = &mut row_cols[i * n_nodes + p];
                    rc.extend(el.nodes.iter().map(|&q| t * n_nodes + q));
                }
            }
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    offsets.push(0);
    for mut rc in row_cols {
        rc.sort_unstable();
        rc.dedup();
        cols.extend(rc);
        offsets.push(cols.len());
    }

    let k_steps: Vec<f64> = net.steps().iter().map(|s| s.k_ref).collect();
    let locals = map_elements(mesh.elements().len(), |e| -> Result<_> {
        let el = &mesh.elements()[e];
        let m = mass_matrix(mesh, el)?.matrix;
        let k = diffusion_matrix(mesh, el, &vec![1.0; el.nodes.len()])?.matrix;
        let rates = (0..k_steps.len())
            .map(|r| el.nodes.iter().map(|&nd| weights.step(r)[nd] * k_steps[r]).collect())
            .collect();
        Ok((m, k, ElementData { nodes: el.nodes.clone(), integ: ElementIntegrator::new(mesh, el), rates }))
    });

    let mut sys = AssembledTransient {
        n_nodes,
        n_species,
        species: net.species_names().iter().map(|s| s.to_string()).collect(),
        steps,
        elements: Vec::with_capacity(mesh.elements().len()),
        mass_vals: vec![0.0; cols.len()],
        diff_vals: vec![0.0; cols.len()],
        offsets,
        cols,
        dirichlet: Vec::new(),
        lumped: mesh.lumped_mass(),
        moieties: net.moieties().iter().map(|m| (m.name.clone(), m.weights.clone())).collect(),
    };
    for local in locals {
        let (m, k, data) = local?;
        for sp in 0..n_species {
            let d = net.species()[sp].diffusivity;
            for (p, &i) in data.nodes.iter().enumerate() {
                for (q, &j) in data.nodes.iter().enumerate() {
                    let pos = sys.position(sp * n_nodes + i, sp * n_nodes + j);
                    sys.mass_vals[pos] += m[(p, q)];
                    sys.diff_vals[pos] += d * k[(p, q)];
                }
            }
        }
        sys.elements.push(data);
    }

    let mut fixed: BTreeMap<usize, f64> = BTreeMap::new();
    for bc in bcs {
        match bc {
            BoundaryCondition::ZeroFlux { tag } => {
                if !mesh.has_boundary_tag(*tag) {
                    return Err(Error::Invalid(format!("boundary tag {tag} not present in mesh")));
                }
            }
            BoundaryCondition::Dirichlet { species, tag, value } => {
                if !mesh.has_boundary_tag(*tag) {
                    return Err(Error::Invalid(format!("boundary tag {tag} not present in mesh")));
                }
                let sp = net
                    .species_index(species)
                    .ok_or_else(|| Error::Invalid(format!("boundary condition on unknown species `{species}`")))?;
                if !(*value >= 0.0 && value.is_finite()) {
                    return Err(Error::NegativeConcentration {
                        value: *value,
                        context: format!("Dirichlet value for {species}"),
                    });
                }
                for node in mesh.boundary_nodes(*tag) {
                    let dof = sp * n_nodes + node;
                    if let Some(old) = fixed.insert(dof, *value) {
                        if old != *value {
                            return Err(Error::Invalid(format!(
                                "conflicting Dirichlet values {old} and {value} for {species} at node {}",
                                mesh.nodes()[node].id
                            )));
                        }
                    }
                }
            }
        }
    }
    sys.dirichlet = fixed.into_iter().collect();
    Ok(sys)
}

impl AssembledTransient {
    fn position(&self, row: usize, col: usize) -> usize {
        let range = self.offsets[row]..self.offsets[row + 1];
        let start = range.start;
        start + self.cols[range].binary_search(&col).expect("entry inside the assembled pattern")
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_species(&self) -> usize {
        self.n_species
    }

    pub fn n_dofs(&self) -> usize {
        self.n_nodes * self.n_species
    }

    pub fn species_names(&self) -> &[String] {
        &self.species
    }

    /// Unknown index of `species` at `node`.
    pub fn dof(&self, species: usize, node: usize) -> usize {
        species * self.n_nodes + node
    }

    /// Sorted `(dof, value)` Dirichlet constraints.
    pub fn dirichlet(&self) -> &[(usize, f64)] {
        &self.dirichlet
    }

    /// Row sums of the nodal mass matrix.
    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped
    }

    /// Replaces the consistent mass matrix by its row-sum diagonal.
    pub fn lump_mass(&mut self) {
        for row in 0..self.n_dofs() {
            let range = self.offsets[row]..self.offsets[row + 1];
            let sum: f64 = self.mass_vals[range.clone()].iter().sum();
            for pos in range {
                self.mass_vals[pos] = if self.cols[pos] == row { sum } else { 0.0 };
            }
        }
    }

    pub fn moieties(&self) -> &[(String, Vec<f64>)] {
        &self.moieties
    }

    fn matrix(&self, values: Vec<f64>) -> CsrMatrix<f64> {
        let n = self.n_dofs();
        CsrMatrix::try_from_csr_data(n, n, self.offsets.clone(), self.cols.clone(), values)
            .expect("valid CSR pattern")
    }

    /// Global consistent mass matrix `I ⊗ M`.
    pub fn mass(&self) -> CsrMatrix<f64> {
        self.matrix(self.mass_vals.clone())
    }

    /// Block-diagonal diffusion operator `diag(D_s) ⊗ K`.
    pub fn diffusion(&self) -> CsrMatrix<f64> {
        self.matrix(self.diff_vals.clone())
    }

    pub(crate) fn mass_values(&self) -> &[f64] {
        &self.mass_vals
    }

    pub(crate) fn pattern_len(&self) -> usize {
        self.cols.len()
    }

    pub(crate) fn pattern_matrix(&self, values: Vec<f64>) -> CsrMatrix<f64> {
        self.matrix(values)
    }

    fn check_len(&self, c: &[f64]) {
        assert_eq!(c.len(), self.n_dofs(), "state vector length");
    }

    /// Initial state from per-species constants, with Dirichlet values imposed.
    pub fn initial_state(&self, per_species: &[f64]) -> Result<Vec<f64>> {
        if per_species.len() != self.n_species {
            return Err(Error::Dimension(format!(
                "{} initial values for {} species",
                per_species.len(),
                self.n_species
            )));
        }
        let mut c: Vec<f64> = per_species.iter().flat_map(|&v| std::iter::repeat_n(v, self.n_nodes)).collect();
        self.apply_constraints(&mut c);
        Ok(c)
    }

    pub fn apply_constraints(&self, c: &mut [f64]) {
        for &(dof, g) in &self.dirichlet {
            c[dof] = g;
        }
    }

    fn gather(&self, c: &[f64], nodes: &[usize], species: usize) -> Vec<f64> {
        nodes.iter().map(|&n| c[species * self.n_nodes + n]).collect()
    }

    /// Reaction source `Σ_r S[·][r] f_r(C)` (production positive).
    fn reaction_source(&self, c: &[f64]) -> Vec<f64> {
        let locals = map_elements(self.elements.len(), |e| {
            let el = &self.elements[e];
            let fields: Vec<Vec<f64>> = (0..self.n_species).map(|s| self.gather(c, &el.nodes, s)).collect();
            let mut out = vec![0.0; self.n_species * el.nodes.len()];
            for (r, st) in self.steps.iter().enumerate() {
                let mut factors: Vec<&[f64]> = vec![&el.rates[r]];
                factors.extend(st.factors.iter().map(|&s| fields[s].as_slice()));
                let f = el.integ.product_vector(&factors);
                for &(s, coeff) in &st.stoich {
                    for (p, v) in f.iter().enumerate() {
                        out[s * el.nodes.len() + p] += coeff * v;
                    }
                }
            }
            out
        });
        let mut src = vec![0.0; self.n_dofs()];
        for (el, out) in self.elements.iter().zip(locals) {
            let nl = el.nodes.len();
            for s in 0..self.n_species {
                for (p, &node) in el.nodes.iter().enumerate() {
                    src[s * self.n_nodes + node] += out[s * nl + p];
                }
            }
        }
        src
    }

    /// `res(C) = K_D C − source(C)`; Dirichlet rows are not modified.
    pub fn residual(&self, c: &[f64]) -> Vec<f64> {
        self.check_len(c);
        let src = self.reaction_source(c);
        (0..self.n_dofs())
            .map(|i| {
                let range = self.offsets[i]..self.offsets[i + 1];
                let kd: f64 = self.cols[range.clone()].iter().zip(&self.diff_vals[range]).map(|(&j, v)| v * c[j]).sum();
                kd - src[i]
            })
            .collect()
    }

    /// Reaction part of the Jacobian on the pattern. With `picard`, only the first reactant
    /// factor of each step is differentiated and the others are lagged at `c`.
    fn reaction_jacobian_values(&self, c: &[f64], picard: bool) -> Vec<f64> {
        let locals = map_elements(self.elements.len(), |e| {
            let el = &self.elements[e];
            let fields: Vec<Vec<f64>> = (0..self.n_species).map(|s| self.gather(c, &el.nodes, s)).collect();
            let mut blocks = Vec::new();
            for (r, st) in self.steps.iter().enumerate() {
                let differentiate = if picard { st.factors.len().min(1) } else { st.factors.len() };
                for j in 0..differentiate {
                    let mut rest: Vec<&[f64]> = vec![&el.rates[r]];
                    rest.extend(
                        st.factors.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, &s)| fields[s].as_slice()),
                    );
                    let m = el.integ.product_matrix(&rest);
                    for &(s, coeff) in &st.stoich {
                        blocks.push((s, st.factors[j], -coeff, m.clone()));
                    }
                }
            }
            blocks
        });
        let mut vals = vec![0.0; self.cols.len()];
        for (el, blocks) in self.elements.iter().zip(locals) {
            for (s, t, coeff, m) in blocks {
                for (p, &i) in el.nodes.iter().enumerate() {
                    for (q, &j) in el.nodes.iter().enumerate() {
                        let pos = self.position(s * self.n_nodes + i, t * self.n_nodes + j);
                        vals[pos] += coeff * m[(p, q)];
                    }
                }
            }
        }
        vals
    }

    pub(crate) fn jacobian_values(&self, c: &[f64], picard: bool) -> Vec<f64> {
        self.check_len(c);
        let mut vals = self.reaction_jacobian_values(c, picard);
        for (v, d) in vals.iter_mut().zip(&self.diff_vals) {
            *v += d;
        }
        vals
    }

    /// Exact derivative `∂res/∂C`.
    pub fn jacobian(&self, c: &[f64]) -> CsrMatrix<f64> {
        self.matrix(self.jacobian_values(c, false))
    }

    /// Fixed-point matrix `P(C)` with `P(C)·C = res(C)` up to zero-order sources.
    pub fn picard_matrix(&self, c: &[f64]) -> CsrMatrix<f64> {
        self.matrix(self.jacobian_values(c, true))
    }

    /// `∫ C_s dΩ` for every species.
    pub fn species_totals(&self, c: &[f64]) -> Vec<f64> {
        self.check_len(c);
        (0..self.n_species)
            .map(|s| (0..self.n_nodes).map(|n| self.lumped[n] * c[s * self.n_nodes + n]).sum())
            .collect()
    }

    /// Domain-averaged concentration of every species.
    pub fn species_means(&self, c: &[f64]) -> Vec<f64> {
        let vol: f64 = self.lumped.iter().sum();
        self.species_totals(c).into_iter().map(|t| t / vol).collect()
    }

    /// `Σ_s m_s ∫ C_s dΩ` for each attached moiety.
    pub fn moiety_totals(&self, c: &[f64]) -> Vec<(String, f64)> {
        let totals = self.species_totals(c);
        self.moieties
            .iter()
            .map(|(name, w)| (name.clone(), w.iter().zip(&totals).map(|(a, b)| a * b).sum()))
            .collect()
    }
}
