//! Catalog of enzymatic and elementary mechanisms expanded into mass-action networks.
//!
//! Reversible steps become two irreversible steps named after their constants
//! (`k1` forward, `k-1` backward). Ping-Pong schemes write the modified enzyme `E*` as `F`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{parse_equation, Moiety, ReactionNetwork, ReactionStep, Species, DEFAULT_T_REF};
use crate::error::{Error, Result};

/// Named rate constants, e.g. `{"k1": 1e3, "k-1": 1.0}`.
pub type RateConstants = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    EnzymeActivation,
    /// Linear chain `A1 -> A2 -> ... -> An` with `n ≥ 2` species.
    ReactionChain(usize),
    MichaelisMenten,
    CompetitiveInhibition,
    NonCompetitiveInhibition,
    AntiCompetitiveInhibition,
    PingPongBiBi,
    PingPongBiBiParallel,
    TernaryComplexRandom,
    RapidEquilibriumRandom,
    FirstOrder,
    SecondOrder,
}

struct Scheme {
    species: Vec<String>,
    /// (equation, rate-constant name)
    steps: Vec<(String, String)>,
    /// Species forming the conserved moiety.
    moiety: (&'static str, Vec<&'static str>),
}

fn scheme(species: &[&str], steps: &[(&str, &str)], moiety: (&'static str, Vec<&'static str>)) -> Scheme {
    Scheme {
        species: species.iter().map(|s| s.to_string()).collect(),
        steps: steps.iter().map(|(e, k)| (e.to_string(), k.to_string())).collect(),
        moiety,
    }
}

impl MechanismKind {
    /// The ten enzymatic/kinetic schemes (chain of four species for the chain).
    pub fn catalog() -> [MechanismKind; 10] {
        [
            MechanismKind::EnzymeActivation,
            MechanismKind::ReactionChain(4),
            MechanismKind::MichaelisMenten,
            MechanismKind::CompetitiveInhibition,
            MechanismKind::NonCompetitiveInhibition,
            MechanismKind::AntiCompetitiveInhibition,
            MechanismKind::PingPongBiBi,
            MechanismKind::PingPongBiBiParallel,
            MechanismKind::TernaryComplexRandom,
            MechanismKind::RapidEquilibriumRandom,
        ]
    }

    /// Rate-constant names required by the scheme, in step order.
    pub fn rate_constant_names(self) -> Vec<String> {
        self.scheme().map(|s| s.steps.into_iter().map(|(_, k)| k).collect()).unwrap_or_default()
    }

    pub fn species_names(self) -> Vec<String> {
        self.scheme().map(|s| s.species).unwrap_or_default()
    }

    fn scheme(self) -> Result<Scheme> {
        use MechanismKind::*;
        Ok(match self {
            EnzymeActivation => scheme(&["E0", "E"], &[("E0 -> E", "k1"), ("E -> E0", "k-1")], ("enzyme", vec!["E0", "E"])),
            ReactionChain(n) => {
                if n < 2 {
                    return Err(Error::Invalid(format!("reaction chain needs at least 2 species, got {n}")));
                }
                let names: Vec<String> = (1..=n).map(|i| format!("A{i}")).collect();
                let steps = (1..n).map(|i| (format!("A{i} -> A{}", i + 1), format!("k{i}"))).collect();
                return Ok(Scheme { species: names, steps, moiety: ("total", vec![]) });
            }
            MichaelisMenten => scheme(
                &["E", "S", "ES", "P"],
                &[("E + S -> ES", "k1"), ("ES -> E + S", "k-1"), ("ES -> E + P", "k2")],
                ("enzyme", vec!["E", "ES"]),
            ),
            CompetitiveInhibition => scheme(
                &["E", "S", "ES", "P", "I", "EI"],
                &[
                    ("E + S -> ES", "k1"),
                    ("ES -> E + S", "k-1"),
                    ("ES -> E + P", "k2"),
                    ("E + I -> EI", "k3"),
                    ("EI -> E + I", "k-3"),
                ],
                ("enzyme", vec!["E", "ES", "EI"]),
            ),
            NonCompetitiveInhibition => scheme(
                &["E", "S", "ES", "P", "I", "EI", "ESI"],
                &[
                    ("E + S -> ES", "k1"),
                    ("ES -> E + S", "k-1"),
                    ("ES -> E + P", "k2"),
                    ("E + I -> EI", "k3"),
                    ("EI -> E + I", "k-3"),
                    ("ES + I -> ESI", "k4"),
                    ("ESI -> ES + I", "k-4"),
                    ("EI + S -> ESI", "k5"),
                    ("ESI -> EI + S", "k-5"),
                ],
                ("enzyme", vec!["E", "ES", "EI", "ESI"]),
            ),
            AntiCompetitiveInhibition => scheme(
                &["E", "S", "ES", "P", "I", "ESI"],
                &[
                    ("E + S -> ES", "k1"),
                    ("ES -> E + S", "k-1"),
                    ("ES -> E + P", "k2"),
                    ("ES + I -> ESI", "k3"),
                    ("ESI -> ES + I", "k-3"),
                ],
                ("enzyme", vec!["E", "ES", "ESI"]),
            ),
            PingPongBiBi => scheme(
                &["E", "A", "EA", "FP", "F", "P", "B", "FB", "EQ", "Q"],
                &[
                    ("E + A -> EA", "k1"),
                    ("EA -> FP", "k2"),
                    ("FP -> EA", "k-2"),
                    ("FP -> F + P", "k3"),
                    ("F + B -> FB", "k4"),
                    ("FB -> EQ", "k5"),
                    ("EQ -> FB", "k-5"),
                    ("EQ -> E + Q", "k6"),
                ],
                ("enzyme", vec!["E", "EA", "FP", "F", "FB", "EQ"]),
            ),
            PingPongBiBiParallel => scheme(
                &["E", "D", "ED", "FP", "F", "P", "A", "FA", "ET", "T", "B", "FB", "EC", "C"],
                &[
                    ("E + D -> ED", "k1"),
                    ("ED -> FP", "k2"),
                    ("FP -> ED", "k-2"),
                    ("FP -> F + P", "k3"),
                    ("F + A -> FA", "k4"),
                    ("FA -> ET", "k5"),
                    ("ET -> FA", "k-5"),
                    ("ET -> E + T", "k6"),
                    ("F + B -> FB", "k7"),
                    ("FB -> EC", "k8"),
                    ("EC -> FB", "k-8"),
                    ("EC -> E + C", "k9"),
                ],
                ("enzyme", vec!["E", "ED", "FP", "F", "FA", "ET", "FB", "EC"]),
            ),
            TernaryComplexRandom => scheme(
                &["E", "A", "B", "EA", "EB", "EAB", "EPQ", "EP", "EQ", "P", "Q"],
                &[
                    ("E + A -> EA", "k1"),
                    ("E + B -> EB", "k2"),
                    ("EA + B -> EAB", "k3"),
                    ("EB + A -> EAB", "k4"),
                    ("EAB -> EPQ", "k5"),
                    ("EPQ -> EAB", "k-5"),
                    ("EPQ -> EP + Q", "k6"),
                    ("EPQ -> EQ + P", "k7"),
                    ("EP -> E + P", "k8"),
                    ("EQ -> E + Q", "k9"),
                ],
                ("enzyme", vec!["E", "EA", "EB", "EAB", "EPQ", "EP", "EQ"]),
            ),
            RapidEquilibriumRandom => scheme(
                &["E", "A", "B", "D", "EA", "ED", "EB", "EDA", "EDB", "P", "T", "C"],
                &[
                    ("E + A -> EA", "k1"),
                    ("EA -> E + A", "k-1"),
                    ("EA + D -> EDA", "k2"),
                    ("EDA -> EA + D", "k-2"),
                    ("EDA -> E + P + T", "k3"),
                    ("E + P + T -> EDA", "k-3"),
                    ("E + D -> ED", "k4"),
                    ("ED -> E + D", "k-4"),
                    ("ED + A -> EDA", "k5"),
                    ("EDA -> ED + A", "k-5"),
                    ("ED + B -> EDB", "k6"),
                    ("EDB -> ED + B", "k-6"),
                    ("EDB -> E + P + C", "k7"),
                    ("E + P + C -> EDB", "k-7"),
                    ("E + B -> EB", "k8"),
                    ("EB -> E + B", "k-8"),
                    ("EB + D -> EDB", "k9"),
                    ("EDB -> EB + D", "k-9"),
                ],
                ("enzyme", vec!["E", "EA", "ED", "EB", "EDA", "EDB"]),
            ),
            FirstOrder => scheme(&["A", "B"], &[("A -> B", "k1")], ("total", vec!["A", "B"])),
            SecondOrder => scheme(&["A", "B", "C"], &[("A + B -> C", "k1")], ("A", vec!["A", "C"])),
        })
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MechanismKind::*;
        let name = match self {
            EnzymeActivation => "enzyme_activation",
            ReactionChain(n) => return write!(f, "reaction_chain({n})"),
            MichaelisMenten => "michaelis_menten",
            CompetitiveInhibition => "competitive_inhibition",
            NonCompetitiveInhibition => "noncompetitive_inhibition",
            AntiCompetitiveInhibition => "anticompetitive_inhibition",
            PingPongBiBi => "ping_pong_bi_bi",
            PingPongBiBiParallel => "ping_pong_bi_bi_parallel",
            TernaryComplexRandom => "ternary_complex_random",
            RapidEquilibriumRandom => "rapid_equilibrium_random",
            FirstOrder => "first_order",
            SecondOrder => "second_order",
        };
        f.write_str(name)
    }
}

impl FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use MechanismKind::*;
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("reaction_chain") {
            let n = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|r| r.trim().parse().ok())
                .ok_or_else(|| Error::Invalid(format!("expected `reaction_chain(n)`, got `{s}`")))?;
            return Ok(ReactionChain(n));
        }
        Ok(match s {
            "enzyme_activation" => EnzymeActivation,
            "michaelis_menten" => MichaelisMenten,
            "competitive_inhibition" => CompetitiveInhibition,
            "noncompetitive_inhibition" => NonCompetitiveInhibition,
            "anticompetitive_inhibition" => AntiCompetitiveInhibition,
            "ping_pong_bi_bi" => PingPongBiBi,
            "ping_pong_bi_bi_parallel" => PingPongBiBiParallel,
            "ternary_complex_random" => TernaryComplexRandom,
            "rapid_equilibrium_random" => RapidEquilibriumRandom,
            "first_order" => FirstOrder,
            "second_order" => SecondOrder,
            other => return Err(Error::Invalid(format!("unknown mechanism `{other}`"))),
        })
    }
}

/// Expands a catalog mechanism into its elementary mass-action network.
/// Every constant of the scheme must be given and non-negative; unknown names are rejected.
pub fn expand_mechanism(kind: MechanismKind, k: &RateConstants) -> Result<ReactionNetwork> {
    let sch = kind.scheme()?;
    for name in k.keys() {
        if !sch.steps.iter().any(|(_, kn)| kn == name) {
            return Err(Error::Invalid(format!("rate constant `{name}` is not used by {kind}")));
        }
    }
    let species: Vec<Species> = sch
        .species
        .iter()
        .enumerate()
        .map(|(id, name)| Species { id, name: name.clone(), initial_concentration: None, diffusivity: 0.0 })
        .collect();
    let mut steps = Vec::with_capacity(sch.steps.len());
    for (eq, kname) in &sch.steps {
        let value = *k.get(kname).ok_or_else(|| Error::MissingRateConstant(kname.clone()))?;
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::NegativeRateConstant { name: kname.clone(), value });
        }
        let mut lookup = |n: &str| -> Result<usize> {
            sch.species.iter().position(|s| s == n).ok_or_else(|| Error::Invalid(format!("unknown species {n}")))
        };
        let (reactants, products) = parse_equation(eq, &mut lookup)?;
        steps.push(ReactionStep {
            id: kname.clone(),
            reactants,
            products,
            k_ref: value,
            ea: 0.0,
            catalyst: false,
            flux_bounds: None,
        });
    }
    let (moiety_name, members) = sch.moiety;
    let weights = sch
        .species
        .iter()
        .map(|s| if members.is_empty() || members.contains(&s.as_str()) { 1.0 } else { 0.0 })
        .collect();
    ReactionNetwork::new(species, steps, DEFAULT_T_REF)?
        .with_moieties(vec![Moiety { name: moiety_name.to_string(), weights }])
}
