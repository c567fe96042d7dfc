//! Knowledge-base text files.
//!
//! ```text
//! rdfem-kb 1
//! tref 298.15
//! species H 1.0 1e-9          # name [C0] [D]; `-` leaves C0 unset
//! rxn r1 1.0e3 5.0e4 0 0 inf | 1*H + 1*HCl -> 1*H2 + 1*Cl
//! ```
//!
//! Reaction rows are `rxn id k_ref [Ea] [catalyst lower upper] | equation`; an omitted `Ea`
//! is 0 and omitted bounds are unset (`-` also means unset). Fields may be separated by
//! tabs or spaces. Species not declared in a `species` row are collected from the
//! equations in order of first appearance.

use std::fmt::Write;

use super::{parse_equation, ReactionNetwork, ReactionStep, Species, DEFAULT_T_REF};
use crate::error::{Error, Result};

pub const KB_HEADER: &str = "rdfem-kb 1";

fn parse_f64(tok: &str, what: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad {what} `{tok}`") })
}

fn parse_opt(tok: &str, what: &str, line: usize) -> Result<Option<f64>> {
    if tok == "-" {
        Ok(None)
    } else {
        parse_f64(tok, what, line).map(Some)
    }
}

pub fn parse_knowledge_base(text: &str) -> Result<ReactionNetwork> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let perr = |line: usize, msg: String| Error::Parse { line, msg };

    let (line, header) = lines.next().ok_or_else(|| perr(1, "empty knowledge base".into()))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["rdfem-kb", "1"] {
        return Err(perr(line, format!("expected header `{KB_HEADER}`")));
    }

    let mut t_ref = None;
    let mut species: Vec<Species> = Vec::new();
    let mut steps: Vec<ReactionStep> = Vec::new();
    for (line, l) in lines {
        let (head, equation) = match l.split_once('|') {
            Some((h, e)) => (h, Some(e)),
            None => (l, None),
        };
        let tok: Vec<&str> = head.split_whitespace().collect();
        match tok[0] {
            "tref" => {
                if tok.len() != 2 || equation.is_some() || t_ref.is_some() {
                    return Err(perr(line, "expected a single `tref <K>` line".into()));
                }
                let t = parse_f64(tok[1], "reference temperature", line)?;
                if !(t > 0.0) {
                    return Err(perr(line, format!("reference temperature must be positive, got {t}")));
                }
                t_ref = Some(t);
            }
            "species" => {
                if !(2..=4).contains(&tok.len()) || equation.is_some() {
                    return Err(perr(line, "species line must be `species name [C0] [D]`".into()));
                }
                let name = tok[1];
                if species.iter().any(|s| s.name == name) {
                    return Err(perr(line, format!("duplicate species `{name}`")));
                }
                let c0 = match tok.get(2) {
                    Some(t) => parse_opt(t, "initial concentration", line)?,
                    None => None,
                };
                let d = match tok.get(3) {
                    Some(t) => parse_f64(t, "diffusivity", line)?,
                    None => 0.0,
                };
                species.push(Species { id: species.len(), name: name.into(), initial_concentration: c0, diffusivity: d });
            }
            "rxn" => {
                let equation = equation.ok_or_else(|| perr(line, "reaction row needs `| equation`".into()))?;
                let (id, k_ref, ea, catalyst, bounds) = match tok.len() {
                    3 => (tok[1], tok[2], None, None, None),
                    4 => (tok[1], tok[2], Some(tok[3]), None, None),
                    6 => (tok[1], tok[2], None, Some(tok[3]), Some((tok[4], tok[5]))),
                    7 => (tok[1], tok[2], Some(tok[3]), Some(tok[4]), Some((tok[5], tok[6]))),
                    _ => return Err(perr(line, "malformed reaction row".into())),
                };
                if steps.iter().any(|s| s.id == id) {
                    return Err(perr(line, format!("duplicate step id `{id}`")));
                }
                let k_ref = parse_f64(k_ref, "rate constant", line)?;
                let ea = match ea {
                    Some(t) => parse_f64(t, "activation energy", line)?,
                    None => 0.0,
                };
                let catalyst = match catalyst {
                    None | Some("0") => false,
                    Some("1") => true,
                    Some(t) => return Err(perr(line, format!("catalyst flag must be 0 or 1, got `{t}`"))),
                };
                let flux_bounds = match bounds {
                    None => None,
                    Some((lo, hi)) => match (parse_opt(lo, "lower bound", line)?, parse_opt(hi, "upper bound", line)?) {
                        (None, None) => None,
                        (lo, hi) => Some((lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))),
                    },
                };
                let mut lookup = |name: &str| -> Result<usize> {
                    if name.is_empty() || name.contains(char::is_whitespace) {
                        return Err(Error::Invalid(format!("bad species name `{name}`")));
                    }
                    Ok(match species.iter().position(|s| s.name == name) {
                        Some(i) => i,
                        None => {
                            species.push(Species {
                                id: species.len(),
                                name: name.into(),
                                initial_concentration: None,
                                diffusivity: 0.0,
                            });
                            species.len() - 1
                        }
                    })
                };
                let (reactants, products) = parse_equation(equation, &mut lookup).map_err(|e| perr(line, e.to_string()))?;
                steps.push(ReactionStep { id: id.into(), reactants, products, k_ref, ea, catalyst, flux_bounds });
            }
            other => return Err(perr(line, format!("unknown row kind `{other}`"))),
        }
    }
    if steps.is_empty() {
        return Err(Error::Invalid("no reactions".into()));
    }
    ReactionNetwork::new(species, steps, t_ref.unwrap_or(DEFAULT_T_REF))
}

/// Serializes a network in the format read by [`parse_knowledge_base`].
pub fn write_knowledge_base(net: &ReactionNetwork) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{KB_HEADER}");
    let _ = writeln!(s, "tref {}", net.t_ref());
    for sp in net.species() {
        let c0 = sp.initial_concentration.map_or("-".to_string(), |c| c.to_string());
        let _ = writeln!(s, "species\t{}\t{}\t{}", sp.name, c0, sp.diffusivity);
    }
    let names = net.species_names();
    let side = |terms: &[(usize, u32)]| {
        terms.iter().map(|&(i, c)| format!("{c}*{}", names[i])).collect::<Vec<_>>().join(" + ")
    };
    for step in net.steps() {
        let (lo, hi) = match step.flux_bounds {
            Some((lo, hi)) => (lo.to_string(), hi.to_string()),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            s,
            "rxn\t{}\t{}\t{}\t{}\t{}\t{}\t| {} -> {}",
            step.id,
            step.k_ref,
            step.ea,
            u8::from(step.catalyst),
            lo,
            hi,
            side(&step.reactants),
            side(&step.products)
        );
    }
    s
}
