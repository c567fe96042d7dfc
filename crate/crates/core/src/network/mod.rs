//! Reaction networks: species, elementary mass-action steps, stoichiometry,
//! Arrhenius temperature dependence and catalyst weighting.

mod kb;
mod mechanisms;

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;

pub use kb::{parse_knowledge_base, write_knowledge_base, KB_HEADER};
pub use mechanisms::{expand_mechanism, MechanismKind, RateConstants};

use crate::error::{Error, Result};

/// Universal gas constant, J·mol⁻¹·K⁻¹.
pub const GAS_CONSTANT: f64 = 8.314462618;

pub const DEFAULT_T_REF: f64 = 298.15;

/// Highest supported reaction order (sum of reactant coefficients).
pub const MAX_ORDER: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub id: usize,
    pub name: String,
    /// mol·m⁻³
    pub initial_concentration: Option<f64>,
    /// m²·s⁻¹
    pub diffusivity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionStep {
    pub id: String,
    /// (species index, stoichiometric coefficient)
    pub reactants: Vec<(usize, u32)>,
    pub products: Vec<(usize, u32)>,
    pub k_ref: f64,
    /// Activation energy, J·mol⁻¹.
    pub ea: f64,
    pub catalyst: bool,
    /// Flux bounds (lower, upper), mol·s⁻¹.
    pub flux_bounds: Option<(f64, f64)>,
}

impl ReactionStep {
    /// Sum of reactant coefficients. Zero-order steps model constant sources.
    pub fn order(&self) -> u32 {
        self.reactants.iter().map(|(_, c)| c).sum()
    }

    /// Reactant species repeated by coefficient, e.g. `2A + B` gives `[A, A, B]`.
    pub fn reactant_factors(&self) -> Vec<usize> {
        self.reactants.iter().flat_map(|&(s, c)| std::iter::repeat_n(s, c as usize)).collect()
    }
}

/// A conserved linear combination of species, e.g. total enzyme.
#[derive(Debug, Clone, PartialEq)]
pub struct Moiety {
    pub name: String,
    /// One weight per species.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    steps: Vec<ReactionStep>,
    t_ref: f64,
    moieties: Vec<Moiety>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<Species>, steps: Vec<ReactionStep>, t_ref: f64) -> Result<Self> {
        if !(t_ref > 0.0 && t_ref.is_finite()) {
            return Err(Error::Domain(format!("reference temperature must be positive, got {t_ref}")));
        }
        let mut names = HashMap::new();
        for (i, s) in species.iter().enumerate() {
            if s.name.is_empty() || s.name.contains(|c: char| c.is_whitespace() || "+*|#,;".contains(c)) {
                return Err(Error::Invalid(format!("invalid species name `{}`", s.name)));
            }
            if names.insert(s.name.as_str(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate species `{}`", s.name)));
            }
            if let Some(c) = s.initial_concentration {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::NegativeConcentration { value: c, context: format!("species {}", s.name) });
                }
            }
            if !(s.diffusivity >= 0.0 && s.diffusivity.is_finite()) {
                return Err(Error::Invalid(format!("species {} has invalid diffusivity {}", s.name, s.diffusivity)));
            }
        }
        let mut ids = HashMap::new();
        for step in &steps {
            if ids.insert(step.id.as_str(), ()).is_some() {
                return Err(Error::Invalid(format!("duplicate step id `{}`", step.id)));
            }
            for &(s, c) in step.reactants.iter().chain(&step.products) {
                if s >= species.len() {
                    return Err(Error::Invalid(format!("step {} references unknown species index {s}", step.id)));
                }
                if c == 0 {
                    return Err(Error::Invalid(format!("step {} has a zero stoichiometric coefficient", step.id)));
                }
            }
            if step.order() > MAX_ORDER {
                return Err(Error::Invalid(format!("step {} has order {} (maximum {MAX_ORDER})", step.id, step.order())));
            }
            if !step.k_ref.is_finite() || step.k_ref < 0.0 {
                return Err(Error::NegativeRateConstant { name: step.id.clone(), value: step.k_ref });
            }
            if !step.ea.is_finite() {
                return Err(Error::Invalid(format!("step {} has non-finite activation energy", step.id)));
            }
            if let Some((lo, hi)) = step.flux_bounds {
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return Err(Error::Invalid(format!("step {} has inconsistent flux bounds ({lo}, {hi})", step.id)));
                }
            }
        }
        let species = species.into_iter().enumerate().map(|(i, s)| Species { id: i, ..s }).collect();
        Ok(ReactionNetwork { species, steps, t_ref, moieties: Vec::new() })
    }

    /// Attaches conserved moieties; each must lie in the left null space of `S`.
    pub fn with_moieties(mut self, moieties: Vec<Moiety>) -> Result<Self> {
        let s = self.stoichiometric_matrix();
        for m in &moieties {
            if m.weights.len() != self.species.len() {
                return Err(Error::Dimension(format!("moiety {} has {} weights", m.name, m.weights.len())));
            }
            for r in 0..s.ncols() {
                let dot: f64 = (0..s.nrows()).map(|i| m.weights[i] * s[(i, r)]).sum();
                if dot != 0.0 {
                    return Err(Error::Invalid(format!("moiety {} is not conserved by step {}", m.name, self.steps[r].id)));
                }
            }
        }
        self.moieties = moieties;
        Ok(self)
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn steps(&self) -> &[ReactionStep] {
        &self.steps
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn moieties(&self) -> &[Moiety] {
        &self.moieties
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn species_names(&self) -> Vec<&str> {
        self.species.iter().map(|s| s.name.as_str()).collect()
    }

    /// Sets per-species diffusivities (m²/s) by name.
    pub fn set_diffusivity(&mut self, name: &str, d: f64) -> Result<()> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::Invalid(format!("invalid diffusivity {d} for {name}")));
        }
        let i = self.species_index(name).ok_or_else(|| Error::Invalid(format!("unknown species `{name}`")))?;
        self.species[i].diffusivity = d;
        Ok(())
    }

    pub fn set_initial_concentration(&mut self, name: &str, c: f64) -> Result<()> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::NegativeConcentration { value: c, context: format!("initial value of {name}") });
        }
        let i = self.species_index(name).ok_or_else(|| Error::Invalid(format!("unknown species `{name}`")))?;
        self.species[i].initial_concentration = Some(c);
        Ok(())
    }

    /// `S[s][r]` = product coefficient − reactant coefficient (production positive).
    pub fn stoichiometric_matrix(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.species.len(), self.steps.len());
        for (r, step) in self.steps.iter().enumerate() {
            for &(i, c) in &step.reactants {
                s[(i, r)] -= c as f64;
            }
            for &(i, c) in &step.products {
                s[(i, r)] += c as f64;
            }
        }
        s
    }

    /// Entry `(a, b)` counts the steps consuming `a` and producing `b`.
    pub fn incidence_matrix(&self) -> DMatrix<u32> {
        let n = self.species.len();
        let mut m = DMatrix::zeros(n, n);
        for step in &self.steps {
            for &(a, _) in &step.reactants {
                for &(b, _) in &step.products {
                    if a != b {
                        m[(a, b)] += 1;
                    }
                }
            }
        }
        m
    }

    /// Mass-action rates `v_r = w_r k_r Π C^coeff` for well-mixed concentrations.
    pub fn rate_vector(&self, c: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        if c.len() != self.species.len() || w.len() != self.steps.len() {
            return Err(Error::Dimension(format!(
                "{} concentrations and {} weights for {} species and {} steps",
                c.len(),
                w.len(),
                self.species.len(),
                self.steps.len()
            )));
        }
        if let Some(i) = c.iter().position(|&v| v < 0.0 || v.is_nan()) {
            return Err(Error::NegativeConcentration { value: c[i], context: format!("species {}", self.species[i].name) });
        }
        check_weights(w)?;
        Ok(self
            .steps
            .iter()
            .zip(w)
            .map(|(step, &wr)| {
                let prod: f64 = step.reactants.iter().map(|&(s, k)| c[s].powi(k as i32)).product();
                wr * step.k_ref * prod
            })
            .collect())
    }

    /// Well-mixed balance `Ċ = S·v`.
    pub fn species_rates(&self, c: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        let v = self.rate_vector(c, w)?;
        let mut out = vec![0.0; self.species.len()];
        for (step, vr) in self.steps.iter().zip(&v) {
            for &(s, k) in &step.reactants {
                out[s] -= k as f64 * vr;
            }
            for &(s, k) in &step.products {
                out[s] += k as f64 * vr;
            }
        }
        Ok(out)
    }

    /// Per-step weights at temperature `t`. `disabled[r] = true` deletes catalyst step `r`.
    pub fn weight_vector(&self, t: f64, disabled: &[bool]) -> Result<Vec<f64>> {
        if !disabled.is_empty() && disabled.len() != self.steps.len() {
            return Err(Error::Dimension(format!("{} catalyst switches for {} steps", disabled.len(), self.steps.len())));
        }
        self.steps
            .iter()
            .enumerate()
            .map(|(r, step)| {
                if disabled.get(r).copied().unwrap_or(false) {
                    if !step.catalyst {
                        return Err(Error::Invalid(format!("step {} is not catalyst-flagged", step.id)));
                    }
                    return Ok(0.0);
                }
                arrhenius_factor(step.ea, t, self.t_ref)
            })
            .collect()
    }
}

impl fmt::Display for ReactionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

pub(crate) fn check_weights(w: &[f64]) -> Result<()> {
    match w.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
        Some(step) => Err(Error::NegativeWeight { step, value: w[step] }),
        None => Ok(()),
    }
}

/// `exp(-Ea/R (1/T - 1/T_ref))`.
pub fn arrhenius_factor(ea: f64, t: f64, t_ref: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) || !(t_ref > 0.0 && t_ref.is_finite()) {
        return Err(Error::Domain(format!("temperatures must be positive (T = {t}, T_ref = {t_ref})")));
    }
    if t == t_ref || ea == 0.0 {
        return Ok(1.0);
    }
    Ok((-ea / GAS_CONSTANT * (1.0 / t - 1.0 / t_ref)).exp())
}

/// `k = k_ref exp(-Ea/R (1/T - 1/T_ref))`.
pub fn arrhenius_rate(k_ref: f64, ea: f64, t: f64, t_ref: f64) -> Result<f64> {
    Ok(k_ref * arrhenius_factor(ea, t, t_ref)?)
}

pub fn stoichiometric_matrix(net: &ReactionNetwork) -> DMatrix<f64> {
    net.stoichiometric_matrix()
}

pub fn incidence_matrix(net: &ReactionNetwork) -> DMatrix<u32> {
    net.incidence_matrix()
}

pub fn weight_vector(net: &ReactionNetwork, t: f64, disabled: &[bool]) -> Result<Vec<f64>> {
    net.weight_vector(t, disabled)
}

pub fn rate_vector(net: &ReactionNetwork, c: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    net.rate_vector(c, w)
}

/// Parses `2*A + B -> C` into reactant and product lists, registering new species names
/// through `lookup`. Either side may be empty.
pub(crate) fn parse_equation(
    text: &str,
    lookup: &mut dyn FnMut(&str) -> Result<usize>,
) -> Result<(Vec<(usize, u32)>, Vec<(usize, u32)>)> {
    let (lhs, rhs) =
        text.split_once("->").ok_or_else(|| Error::Invalid(format!("expected `reactants -> products` in `{text}`")))?;
    let mut side = |s: &str| -> Result<Vec<(usize, u32)>> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        for term in s.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let (coeff, name) = match term.split_once('*') {
                Some((c, n)) => {
                    let c: u32 = c
                        .trim()
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad stoichiometric coefficient in `{term}`")))?;
                    (c, n.trim())
                }
                None => (1, term),
            };
            if coeff == 0 {
                return Err(Error::Invalid(format!("zero stoichiometric coefficient in `{term}`")));
            }
            let idx = lookup(name)?;
            match out.iter_mut().find(|(s, _)| *s == idx) {
                Some(entry) => entry.1 += coeff,
                None => out.push((idx, coeff)),
            }
        }
        Ok(out)
    };
    let reactants = side(lhs)?;
    let products = side(rhs)?;
    Ok((reactants, products))
}
