//! Run configuration files.
//!
//! The format is line-oriented `key = value` text. `[section]` lines open a section, `#`
//! starts a comment and `;` separates several statements on one line:
//!
//! ```text
//! mode = simulate
//! mesh = square.mesh
//! mechanism = michaelis_menten; k1 = 1e3; k-1 = 1; k2 = 10
//!
//! [solver]
//! theta = 1; dt = 1e-3; t_end = 1
//!
//! [initial]
//! S = 1; E = 1e-2
//!
//! [output]
//! csv = series.csv every 10
//! vtk = final.vtk
//! report = report.json
//! ```
//!
//! Relative paths are resolved against the directory of the configuration file.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{MechanismKind, RateConstants};
use crate::solvers::{Nonlinear, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    SteadyFlux,
    Fba,
    Phenotype,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "steady-flux" => Ok(Mode::SteadyFlux),
            "fba" => Ok(Mode::Fba),
            "phenotype" => Ok(Mode::Phenotype),
            other => Err(Error::Config(format!("unknown mode `{other}` (simulate, steady-flux, fba, phenotype)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Simulate => "simulate",
            Mode::SteadyFlux => "steady-flux",
            Mode::Fba => "fba",
            Mode::Phenotype => "phenotype",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    KnowledgeBase(PathBuf),
    Mechanism { kind: MechanismKind, constants: RateConstants },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Temperature {
    /// Every step at its reference temperature (all weights 1).
    Reference,
    Constant(f64),
    /// One value per node, in node order, or `id value` pairs.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Vtk,
    Csv,
    Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub kind: OutputKind,
    pub path: PathBuf,
    /// Record every `cadence` steps; `None` records the final state only (CSV: every step).
    pub cadence: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxForm {
    /// `S ⊗ M` with one column per reaction step.
    Steps,
    /// `Sᵀ ⊗ M` with one column per species.
    Species,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxOptions {
    /// (column name, coefficient) pairs to maximize.
    pub objective: Vec<(String, f64)>,
    pub bounds: Vec<(String, f64, f64)>,
    /// Bounds for steps without explicit ones.
    pub default_bounds: (f64, f64),
    pub mu: Option<f64>,
    pub form: FluxForm,
}

impl Default for FluxOptions {
    fn default() -> Self {
        FluxOptions {
            objective: Vec::new(),
            bounds: Vec::new(),
            default_bounds: (0.0, f64::INFINITY),
            mu: None,
            form: FluxForm::Steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhenotypeOptions {
    pub reversible: Vec<String>,
    /// Exchange steps; by default every step with an empty side.
    pub boundary: Option<Vec<String>>,
    pub region: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Dirichlet { species: String, tag: i64, value: f64 },
    ZeroFlux { tag: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub mesh: Option<PathBuf>,
    pub network: Option<NetworkSource>,
    pub solver: SolverConfig,
    /// Row-sum lumped mass instead of the consistent mass matrix.
    pub lumped_mass: bool,
    pub temperature: Temperature,
    pub disabled_steps: Vec<String>,
    pub initial: Vec<(String, f64)>,
    pub diffusivity: Vec<(String, f64)>,
    pub boundary: Vec<BoundarySpec>,
    pub flux: FluxOptions,
    pub phenotype: PhenotypeOptions,
    pub outputs: Vec<OutputSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: None,
            mesh: None,
            network: None,
            solver: SolverConfig::default(),
            lumped_mass: false,
            temperature: Temperature::Reference,
            disabled_steps: Vec::new(),
            initial: Vec::new(),
            diffusivity: Vec::new(),
            boundary: Vec::new(),
            flux: FluxOptions::default(),
            phenotype: PhenotypeOptions::default(),
            outputs: Vec::new(),
        }
    }
}

fn cfg_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn number(v: &str, line: usize) -> Result<f64> {
    v.parse::<f64>().map_err(|_| cfg_err(line, format!("`{v}` is not a number")))
}

fn integer<T: FromStr>(v: &str, line: usize) -> Result<T> {
    v.parse::<T>().map_err(|_| cfg_err(line, format!("`{v}` is not an integer")))
}

fn list(v: &str) -> Vec<String> {
    v.split([',', ' ', '\t']).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn output(kind: OutputKind, v: &str, base: &Path, line: usize) -> Result<OutputSpec> {
    let tok: Vec<&str> = v.split_whitespace().collect();
    let cadence = match tok.as_slice() {
        [_] => None,
        [_, "every", n] => {
            let n: usize = integer(n, line)?;
            if n == 0 {
                return Err(cfg_err(line, "output cadence must be positive"));
            }
            Some(n)
        }
        _ => return Err(cfg_err(line, "expected `<path> [every <n>]`")),
    };
    if kind == OutputKind::Report && cadence.is_some() {
        return Err(cfg_err(line, "reports take no cadence"));
    }
    Ok(OutputSpec { kind, path: base.join(tok[0]), cadence })
}

/// Parses configuration text; relative paths are joined to `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    let mut mechanism: Option<(MechanismKind, usize)> = None;
    let mut constants: Vec<(String, f64, usize)> = Vec::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut temperature_value = None;
    let mut temperature_file = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| cfg_err(line, "unterminated section header"))?;
            section = name.trim().to_string();
            if !["solver", "temperature", "initial", "diffusivity", "boundary", "weights", "flux", "phenotype", "output", "rates"]
                .contains(&section.as_str())
            {
                return Err(cfg_err(line, format!("unknown section [{section}]")));
            }
            continue;
        }
        for stmt in content.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = stmt.split_once('=').ok_or_else(|| cfg_err(line, format!("expected `key = value`, found `{stmt}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(cfg_err(line, "empty key or value"));
            }
            let repeatable = matches!((section.as_str(), key), ("boundary", _) | ("flux", "bounds"));
            if !repeatable && !seen.insert((section.clone(), key.to_string())) {
                return Err(cfg_err(line, format!("duplicate key `{key}`")));
            }
            match (section.as_str(), key) {
                ("", "mode") => cfg.mode = Some(value.parse()?),
                ("", "mesh") => cfg.mesh = Some(base.join(value)),
                ("", "kb") => {
                    if mechanism.is_some() {
                        return Err(cfg_err(line, "`kb` and `mechanism` are mutually exclusive"));
                    }
                    cfg.network = Some(NetworkSource::KnowledgeBase(base.join(value)));
                }
                ("", "mechanism") => {
                    if cfg.network.is_some() {
                        return Err(cfg_err(line, "`kb` and `mechanism` are mutually exclusive"));
                    }
                    mechanism = Some((value.parse().map_err(|e: Error| cfg_err(line, e))?, line));
                }
                ("", "temperature") | ("temperature", "value") => {
                    temperature_value = Some(number(value, line)?);
                }
                ("temperature", "file") => temperature_file = Some(base.join(value)),
                ("" | "rates", k) => constants.push((k.to_string(), number(value, line)?, line)),
                ("solver", "theta") => cfg.solver.theta = number(value, line)?,
                ("solver", "dt") => cfg.solver.dt = number(value, line)?,
                ("solver", "t_end") => cfg.solver.t_end = number(value, line)?,
                ("solver", "nl_tol") => cfg.solver.nl_tol = number(value, line)?,
                ("solver", "lin_tol") => cfg.solver.lin_tol = number(value, line)?,
                ("solver", "nl_max_iter") => cfg.solver.nl_max_iter = integer(value, line)?,
                ("solver", "mass") => {
                    cfg.lumped_mass = match value {
                        "consistent" => false,
                        "lumped" => true,
                        other => return Err(cfg_err(line, format!("mass must be `consistent` or `lumped`, got `{other}`"))),
                    }
                }
                ("solver", "nonlinear") => {
                    cfg.solver.nonlinear = match value {
                        "newton" => Nonlinear::Newton,
                        "picard" => Nonlinear::Picard,
                        _ => return Err(cfg_err(line, "nonlinear must be `newton` or `picard`")),
                    }
                }
                ("initial", species) => cfg.initial.push((species.to_string(), number(value, line)?)),
                ("diffusivity", species) => cfg.diffusivity.push((species.to_string(), number(value, line)?)),
                ("boundary", "dirichlet") => {
                    let tok: Vec<&str> = value.split_whitespace().collect();
                    let [species, tag, v] = tok.as_slice() else {
                        return Err(cfg_err(line, "expected `dirichlet = <species> <tag> <value>`"));
                    };
                    cfg.boundary.push(BoundarySpec::Dirichlet {
                        species: species.to_string(),
                        tag: integer(tag, line)?,
                        value: number(v, line)?,
                    });
                }
                ("boundary", "zero_flux") => {
                    for tag in list(value) {
                        cfg.boundary.push(BoundarySpec::ZeroFlux { tag: integer(&tag, line)? });
                    }
                }
                ("weights", "disable") => cfg.disabled_steps = list(value),
                ("flux", "objective") => {
                    for term in list(value) {
                        let (name, coeff) = match term.split_once(':') {
                            Some((n, c)) => (n.to_string(), number(c, line)?),
                            None => (term.clone(), 1.0),
                        };
                        cfg.flux.objective.push((name, coeff));
                    }
                }
                ("flux", "bounds") => {
                    let tok: Vec<&str> = value.split_whitespace().collect();
                    let [name, lo, up] = tok.as_slice() else {
                        return Err(cfg_err(line, "expected `bounds = <step> <lower> <upper>`"));
                    };
                    cfg.flux.bounds.push((name.to_string(), number(lo, line)?, number(up, line)?));
                }
                ("flux", "default_lower") => cfg.flux.default_bounds.0 = number(value, line)?,
                ("flux", "default_upper") => cfg.flux.default_bounds.1 = number(value, line)?,
                ("flux", "mu") => cfg.flux.mu = Some(number(value, line)?),
                ("flux", "form") => {
                    cfg.flux.form = match value {
                        "steps" => FluxForm::Steps,
                        "species" => FluxForm::Species,
                        _ => return Err(cfg_err(line, "form must be `steps` or `species`")),
                    }
                }
                ("phenotype", "reversible") => cfg.phenotype.reversible = list(value),
                ("phenotype", "boundary") => cfg.phenotype.boundary = Some(list(value)),
                ("phenotype", "region") => cfg.phenotype.region = Some(integer(value, line)?),
                ("output", "vtk") => cfg.outputs.push(output(OutputKind::Vtk, value, base, line)?),
                ("output", "csv") => cfg.outputs.push(output(OutputKind::Csv, value, base, line)?),
                ("output", "report") => cfg.outputs.push(output(OutputKind::Report, value, base, line)?),
                (s, k) => {
                    let at = if s.is_empty() { String::new() } else { format!(" in [{s}]") };
                    return Err(cfg_err(line, format!("unknown key `{k}`{at}")));
                }
            }
        }
    }

    match mechanism {
        Some((kind, _)) => {
            let names = kind.rate_constant_names();
            let mut k = RateConstants::new();
            for (name, value, line) in constants {
                if !names.contains(&name) {
                    return Err(cfg_err(line, format!("`{name}` is not a rate constant of {kind}")));
                }
                k.insert(name, value);
            }
            cfg.network = Some(NetworkSource::Mechanism { kind, constants: k });
        }
        None => {
            if let Some((name, _, line)) = constants.first() {
                return Err(cfg_err(*line, format!("unknown key `{name}`")));
            }
        }
    }
    cfg.temperature = match (temperature_value, temperature_file) {
        (Some(_), Some(_)) => return Err(Error::Config("give either a temperature value or a file, not both".into())),
        (Some(t), None) => Temperature::Constant(t),
        (None, Some(p)) => Temperature::File(p),
        (None, None) => Temperature::Reference,
    };
    cfg.solver.validate()?;
    Ok(cfg)
}

/// Nodal temperature file: one value per line in node order, or `node_id value` pairs.
pub fn parse_temperature_file(text: &str, node_ids: &[usize]) -> Result<Vec<f64>> {
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect();
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let kelvin = |line: usize, v: &str| -> Result<f64> {
        match v.parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            Ok(_) => Err(perr(line, "temperature must be positive (K)")),
            Err(_) => Err(perr(line, "bad temperature")),
        }
    };
    let mut out = vec![f64::NAN; node_ids.len()];
    if rows.iter().all(|(_, t)| t.len() == 1) {
        if rows.len() != node_ids.len() {
            return Err(Error::Dimension(format!("{} temperatures for {} nodes", rows.len(), node_ids.len())));
        }
        for (k, (line, t)) in rows.iter().enumerate() {
            out[k] = kelvin(*line, t[0])?;
        }
    } else {
        for (line, t) in &rows {
            let [id, v] = t.as_slice() else { return Err(perr(*line, "expected `node_id value`")) };
            let id: usize = id.parse().map_err(|_| perr(*line, "bad node id"))?;
            let k = node_ids.iter().position(|&n| n == id).ok_or_else(|| perr(*line, "unknown node id"))?;
            out[k] = kelvin(*line, v)?;
        }
        if out.iter().any(|v| v.is_nan()) {
            return Err(Error::Invalid("temperature file does not cover every node".into()));
        }
    }
    Ok(out)
}
