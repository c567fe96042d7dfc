//! Batch pipelines behind the command-line tool.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::assembly::{
    apply_weights, assemble_fba_system, assemble_species_flux_system, assemble_transient, AssembledFluxSystem,
    BoundaryCondition, GlobalMass, WeightField,
};
use crate::error::{Error, Result};
use crate::io::{
    parse_temperature_file, write_csv_timeseries, write_vtk, BoundarySpec, FluxForm, Mode, NetworkSource, OutputKind,
    OutputSpec, RunConfig, Temperature, TimeSeries, VtkField,
};
use crate::mesh::{load_mesh, Mesh};
use crate::network::{expand_mechanism, parse_knowledge_base, ReactionNetwork};
use crate::phenotype::{extreme_pathways, field_gradient, project_onto, surface_stats, PathwayClass};
use crate::solvers::{integrate_transient, solve_flux, FluxSolution, FluxStatus};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoietyDrift {
    pub name: String,
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_total: f64,
    /// `|final − initial| / |initial|` (absolute change when the initial total is zero).
    pub relative_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathwaySummary {
    pub class: PathwayClass,
    /// Step ids with nonzero flux, signed by direction.
    pub support: Vec<String>,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: String,
    pub wall_time_s: f64,
    pub steps: usize,
    pub nonlinear_iterations: usize,
    /// Transient: last nonlinear update norm. Flux modes: `‖A V‖₂`.
    pub final_residual: f64,
    /// Closed systems (no Dirichlet data) conserve every moiety.
    pub closed_system: bool,
    pub conservation: Vec<MoietyDrift>,
    /// Final domain means per species (simulate) or per flux column.
    pub means: BTreeMap<String, f64>,
    pub flux_status: Option<FluxStatus>,
    pub objective: Option<f64>,
    pub pathways: Vec<PathwaySummary>,
    /// Largest pathway projection residual over the nodes.
    pub projection_residual: Option<f64>,
    pub outputs: Vec<PathBuf>,
}

impl RunReport {
    fn new(mode: Mode) -> Self {
        RunReport {
            mode: mode.to_string(),
            wall_time_s: 0.0,
            steps: 0,
            nonlinear_iterations: 0,
            final_residual: 0.0,
            closed_system: true,
            conservation: Vec::new(),
            means: BTreeMap::new(),
            flux_status: None,
            objective: None,
            pathways: Vec::new(),
            projection_residual: None,
            outputs: Vec::new(),
        }
    }

    /// True when the flux solve ended without a usable solution.
    pub fn solver_failed(&self) -> bool {
        matches!(self.flux_status, Some(FluxStatus::Infeasible | FluxStatus::Unbounded))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_network(cfg: &RunConfig) -> Result<ReactionNetwork> {
    let mut net = match cfg.network.as_ref().ok_or_else(|| Error::Config("no `kb` or `mechanism` given".into()))? {
        NetworkSource::KnowledgeBase(path) => {
            parse_knowledge_base(&read(path)?).map_err(|e| e.context(path.display().to_string()))?
        }
        NetworkSource::Mechanism { kind, constants } => expand_mechanism(*kind, constants)?,
    };
    for (name, c) in &cfg.initial {
        net.set_initial_concentration(name, *c).map_err(|e| Error::Config(format!("[initial] {name}: {e}")))?;
    }
    for (name, d) in &cfg.diffusivity {
        net.set_diffusivity(name, *d).map_err(|e| Error::Config(format!("[diffusivity] {name}: {e}")))?;
    }
    Ok(net)
}

fn load_mesh_file(cfg: &RunConfig) -> Result<Option<Mesh>> {
    match &cfg.mesh {
        Some(path) => Ok(Some(load_mesh(&read(path)?).map_err(|e| e.context(path.display().to_string()))?)),
        None => Ok(None),
    }
}

fn disabled_flags(net: &ReactionNetwork, ids: &[String]) -> Result<Vec<bool>> {
    let mut flags = vec![false; net.step_count()];
    for id in ids {
        let r = net
            .steps()
            .iter()
            .position(|s| &s.id == id)
            .ok_or_else(|| Error::Config(format!("[weights] unknown step `{id}`")))?;
        flags[r] = true;
    }
    Ok(flags)
}

/// `stem_000010.ext` for cadence outputs.
fn numbered(path: &Path, step: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{step:06}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{step:06}"),
    };
    path.with_file_name(name)
}

fn outputs(cfg: &RunConfig, kind: OutputKind) -> impl Iterator<Item = &OutputSpec> {
    cfg.outputs.iter().filter(move |o| o.kind == kind)
}

fn species_fields(mesh: &Mesh, names: &[String], c: &[f64]) -> Result<(Vec<VtkField>, Vec<VtkField>)> {
    let n = mesh.node_count();
    let mut points = Vec::new();
    let mut cells = Vec::new();
    for (s, name) in names.iter().enumerate() {
        let u = &c[s * n..(s + 1) * n];
        points.push(VtkField::scalar(name.clone(), u.to_vec()));
        cells.push(VtkField::vector(format!("grad_{name}"), &field_gradient(mesh, u)?));
    }
    Ok((points, cells))
}

/// Runs the pipeline selected by `cfg.mode`.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let mode = cfg.mode.ok_or_else(|| Error::Config("no mode given".into()))?;
    let start = Instant::now();
    let mut report = match mode {
        Mode::Simulate => simulate(cfg)?,
        Mode::SteadyFlux | Mode::Fba | Mode::Phenotype => flux_pipeline(cfg, mode)?,
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    for o in outputs(cfg, OutputKind::Report) {
        report.outputs.push(o.path.clone());
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Invalid(e.to_string()))?;
    for o in outputs(cfg, OutputKind::Report) {
        std::fs::write(&o.path, format!("{json}\n")).map_err(|e| Error::from(e).context(o.path.display().to_string()))?;
    }
    Ok(report)
}

fn simulate(cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::new(Mode::Simulate);
    let net = load_network(cfg)?;
    let mesh = load_mesh_file(cfg)?.ok_or_else(|| Error::Config("simulate mode needs a mesh".into()))?;
    let n = mesh.node_count();
    let disabled = disabled_flags(&net, &cfg.disabled_steps)?;
    let temps = match &cfg.temperature {
        Temperature::Reference => vec![net.t_ref(); n],
        Temperature::Constant(t) => vec![*t; n],
        Temperature::File(path) => {
            let ids: Vec<usize> = mesh.nodes().iter().map(|node| node.id).collect();
            parse_temperature_file(&read(path)?, &ids).map_err(|e| e.context(path.display().to_string()))?
        }
    };
    let weights = WeightField::from_temperature(&net, &temps, &disabled)?;
    let bcs: Vec<BoundaryCondition> = cfg
        .boundary
        .iter()
        .map(|b| match b {
            BoundarySpec::Dirichlet { species, tag, value } => {
                BoundaryCondition::Dirichlet { species: species.clone(), tag: *tag, value: *value }
            }
            BoundarySpec::ZeroFlux { tag } => BoundaryCondition::ZeroFlux { tag: *tag },
        })
        .collect();
    let mut sys = assemble_transient(&mesh, &net, &weights, &bcs)?;
    if cfg.lumped_mass {
        sys.lump_mass();
    }
    let c0_species: Vec<f64> = net.species().iter().map(|s| s.initial_concentration.unwrap_or(0.0)).collect();
    let c0 = sys.initial_state(&c0_species)?;
    let names = sys.species_names().to_vec();

    let csv_specs: Vec<&OutputSpec> = outputs(cfg, OutputKind::Csv).collect();
    let vtk_specs: Vec<&OutputSpec> = outputs(cfg, OutputKind::Vtk).collect();
    let mut series: Vec<TimeSeries> = csv_specs.iter().map(|_| TimeSeries::new(names.clone())).collect();
    let mut written = Vec::new();
    let steps = cfg.solver.step_count();
    let summary = integrate_transient(&sys, &c0, &cfg.solver, |k, t, c| {
        for (spec, ts) in csv_specs.iter().zip(series.iter_mut()) {
            if k % spec.cadence.unwrap_or(1) == 0 {
                ts.push(t, sys.species_means(c))?;
            }
        }
        for spec in &vtk_specs {
            let path = match spec.cadence {
                Some(every) if k % every == 0 => numbered(&spec.path, k),
                None if k == steps => spec.path.clone(),
                _ => continue,
            };
            let (points, cells) = species_fields(&mesh, &names, c)?;
            write_vtk(&mesh, &format!("rdfem simulate t={t:e}"), &points, &cells, &path)?;
            written.push(path);
        }
        Ok(())
    })?;
    for (spec, ts) in csv_specs.iter().zip(&series) {
        write_csv_timeseries(ts, &spec.path)?;
        written.push(spec.path.clone());
    }

    report.steps = summary.steps;
    report.nonlinear_iterations = summary.nonlinear_iterations;
    report.final_residual = summary.last_update_norm;
    report.closed_system = sys.dirichlet().is_empty();
    let before = sys.moiety_totals(&c0);
    let after = sys.moiety_totals(&summary.state);
    for ((name, m0), (_, m1)) in before.into_iter().zip(after) {
        let relative_drift = if m0 != 0.0 { ((m1 - m0) / m0).abs() } else { (m1 - m0).abs() };
        report.conservation.push(MoietyDrift { name, initial: m0, final_total: m1, relative_drift });
    }
    for (name, mean) in names.iter().zip(sys.species_means(&summary.state)) {
        report.means.insert(name.clone(), mean);
    }
    report.outputs = written;
    Ok(report)
}

fn step_bounds(net: &ReactionNetwork, cfg: &RunConfig) -> Result<Vec<(f64, f64)>> {
    let mut bounds: Vec<(f64, f64)> =
        net.steps().iter().map(|s| s.flux_bounds.unwrap_or(cfg.flux.default_bounds)).collect();
    for (name, lo, up) in &cfg.flux.bounds {
        let r = net
            .steps()
            .iter()
            .position(|s| &s.id == name)
            .ok_or_else(|| Error::Config(format!("[flux] bounds for unknown step `{name}`")))?;
        bounds[r] = (*lo, *up);
    }
    Ok(bounds)
}

fn flux_pipeline(cfg: &RunConfig, mode: Mode) -> Result<RunReport> {
    let mut report = RunReport::new(mode);
    let net = load_network(cfg)?;
    let mesh = load_mesh_file(cfg)?;
    let mass = match &mesh {
        Some(m) => GlobalMass::from_mesh(m)?,
        None => GlobalMass::single_node(),
    };
    let s = net.stoichiometric_matrix();
    let species: Vec<String> = net.species().iter().map(|sp| sp.name.clone()).collect();
    let step_ids: Vec<String> = net.steps().iter().map(|st| st.id.clone()).collect();

    let sys: AssembledFluxSystem = match cfg.flux.form {
        FluxForm::Steps => {
            let base = assemble_fba_system(&mass, &s, &step_bounds(&net, cfg)?, cfg.flux.mu)?;
            let labels: Vec<String> = step_ids.clone();
            let base = base.with_labels(&species, &labels)?;
            let disabled = disabled_flags(&net, &cfg.disabled_steps)?;
            let w = match &cfg.temperature {
                Temperature::Reference => net.weight_vector(net.t_ref(), &disabled)?,
                Temperature::Constant(t) => net.weight_vector(*t, &disabled)?,
                Temperature::File(_) => {
                    return Err(Error::Config("nodal temperature files are only supported in simulate mode".into()))
                }
            };
            apply_weights(&base, &w)?
        }
        FluxForm::Species => {
            if mode == Mode::Phenotype {
                return Err(Error::Config("phenotype mode needs the `steps` flux form".into()));
            }
            let mut sys = assemble_species_flux_system(&mass, &s)?;
            sys = sys.with_labels(&step_ids, &species)?;
            for (name, lo, up) in &cfg.flux.bounds {
                let c = sys
                    .column_index(name)
                    .ok_or_else(|| Error::Config(format!("[flux] bounds for unknown species `{name}`")))?;
                sys.columns[c].lower = *lo;
                sys.columns[c].upper = *up;
            }
            sys
        }
    };

    let objective = if cfg.flux.objective.is_empty() {
        if mode == Mode::Fba {
            return Err(Error::Config("fba mode needs a [flux] objective".into()));
        }
        None
    } else {
        if mode == Mode::SteadyFlux {
            return Err(Error::Config("steady-flux mode takes no objective; use fba".into()));
        }
        let mut per_column = vec![0.0; sys.columns.len()];
        for (name, coeff) in &cfg.flux.objective {
            let c = sys
                .column_index(name)
                .ok_or_else(|| Error::Config(format!("[flux] objective names unknown column `{name}`")))?;
            per_column[c] += coeff;
        }
        Some(sys.objective_vector(&per_column)?)
    };
    let sol: FluxSolution = solve_flux(&sys, objective.as_deref())?;
    report.flux_status = Some(sol.status);
    report.objective = sol.objective;
    report.final_residual = sol.residual_norm;
    let volume: f64 = sys.lumped.iter().sum();
    for (c, col) in sys.columns.iter().enumerate() {
        let field = sys.column_field(&sol.v, c);
        let mean = field.iter().zip(&sys.lumped).map(|(v, m)| v * m).sum::<f64>() / volume;
        report.means.insert(col.name.clone(), mean);
    }

    let mut points: Vec<VtkField> = Vec::new();
    let mut cells: Vec<VtkField> = Vec::new();
    if mesh.is_some() && !report.solver_failed() {
        for (c, col) in sys.columns.iter().enumerate() {
            points.push(VtkField::scalar(col.name.clone(), sys.column_field(&sol.v, c).to_vec()));
        }
    }

    if mode == Mode::Phenotype && !report.solver_failed() {
        phenotype_stage(cfg, &net, &s, mesh.as_ref(), &sys, &sol, &mut report, &mut points, &mut cells)?;
    }

    for spec in outputs(cfg, OutputKind::Vtk) {
        let mesh = mesh.as_ref().ok_or_else(|| Error::Config("VTK output needs a mesh".into()))?;
        write_vtk(mesh, &format!("rdfem {mode}"), &points, &cells, &spec.path)?;
        report.outputs.push(spec.path.clone());
    }
    if outputs(cfg, OutputKind::Csv).next().is_some() {
        return Err(Error::Config("CSV time series are only written in simulate mode".into()));
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn phenotype_stage(
    cfg: &RunConfig,
    net: &ReactionNetwork,
    s: &DMatrix<f64>,
    mesh: Option<&Mesh>,
    sys: &AssembledFluxSystem,
    sol: &FluxSolution,
    report: &mut RunReport,
    points: &mut Vec<VtkField>,
    cells: &mut Vec<VtkField>,
) -> Result<()> {
    let steps = net.steps();
    let flag = |ids: &[String], what: &str| -> Result<Vec<bool>> {
        let mut f = vec![false; steps.len()];
        for id in ids {
            let r = steps
                .iter()
                .position(|st| &st.id == id)
                .ok_or_else(|| Error::Config(format!("[phenotype] {what} names unknown step `{id}`")))?;
            f[r] = true;
        }
        Ok(f)
    };
    let reversible = flag(&cfg.phenotype.reversible, "reversible")?;
    let boundary = match &cfg.phenotype.boundary {
        Some(ids) => flag(ids, "boundary")?,
        None => steps.iter().map(|st| st.reactants.is_empty() || st.products.is_empty()).collect(),
    };
    let basis = extreme_pathways(s, &reversible, &boundary)?;
    let n = sys.n_nodes;
    let np = basis.len();
    // per-node step fluxes projected onto the pathways
    let mut w = vec![vec![0.0; n]; np];
    let mut worst = 0.0f64;
    for node in 0..n {
        let v: Vec<f64> = (0..steps.len()).map(|r| sol.v[r * n + node]).collect();
        let proj = project_onto(&basis.p, &v)?;
        worst = worst.max(proj.residual);
        for (k, wk) in proj.w.iter().enumerate() {
            w[k][node] = *wk;
        }
    }
    report.projection_residual = Some(worst);
    for k in 0..np {
        let support: Vec<String> = (0..steps.len())
            .filter(|&r| basis.p[(r, k)] != 0.0)
            .map(|r| if basis.p[(r, k)] < 0.0 { format!("-{}", steps[r].id) } else { steps[r].id.clone() })
            .collect();
        let (mean, variance) = match mesh {
            Some(m) => {
                let st = surface_stats(m, &w[k], cfg.phenotype.region)?;
                (st.mean, st.variance)
            }
            None => (w[k][0], 0.0),
        };
        report.pathways.push(PathwaySummary { class: basis.classes[k], support, mean, variance });
        if let Some(m) = mesh {
            points.push(VtkField::scalar(format!("w_{k}"), w[k].clone()));
            cells.push(VtkField::vector(format!("grad_w_{k}"), &field_gradient(m, &w[k])?));
            cells.push(VtkField::scalar(format!("var_w_{k}"), vec![variance; m.elements().len()]));
        }
    }
    Ok(())
}
