//! JSON interchange for series, tuples, groups, rings and ghost families.
//!
//! Rational coefficients are strings in the scalar text form (`"-3/2"`);
//! polynomial coefficients are `{"poly": [{"monomial": {"a": 1}, "coefficient": "-1/2"}]}`.
//! Unknown fields are rejected.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fglaw::FormalGroup;
use crate::fring::FormalRing;
use crate::mvps::{Series, SeriesTuple};
use crate::scalars::{Coefficient, CoefficientRing, Poly, Rational};
use crate::witt::{ghosts_p_typical, ghosts_universal, GhostFamily, GhostKind};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct PolyTermJson {
    monomial: BTreeMap<String, u32>,
    coefficient: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    poly: Vec<PolyTermJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
enum CoefficientJson {
    Text(String),
    Poly(PolyJson),
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct TermJson {
    exponents: Vec<u32>,
    coefficient: CoefficientJson,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct ComponentJson {
    terms: Vec<TermJson>,
}

/// Wire form of a [`SeriesTuple`]; a single series is a one-component tuple.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TupleJson {
    num_vars: usize,
    trunc_degree: u32,
    #[serde(default)]
    parameters: Vec<String>,
    components: Vec<ComponentJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct GroupJson {
    dim: usize,
    law: TupleJson,
    log: Option<TupleJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct RingJson {
    dim: usize,
    phi: TupleJson,
    psi: TupleJson,
    log: Option<TupleJson>,
}

#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
struct GhostJson {
    kind: String,
    n: Option<usize>,
    p: Option<u64>,
    ghosts: Option<Vec<TupleJson>>,
}

fn coefficient_to_json(c: &Coefficient) -> CoefficientJson {
    match c {
        Coefficient::Rational(r) => CoefficientJson::Text(r.to_string()),
        Coefficient::Poly(p) => CoefficientJson::Poly(PolyJson {
            poly: p
                .terms()
                .map(|(m, r)| PolyTermJson {
                    monomial: p
                        .params()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| m.get(*i) > 0)
                        .map(|(i, name)| (name.clone(), m.get(i)))
                        .collect(),
                    coefficient: r.to_string(),
                })
                .collect(),
        }),
    }
}

fn coefficient_from_json(c: &CoefficientJson, ring: &CoefficientRing) -> Result<Coefficient> {
    match c {
        CoefficientJson::Text(s) => ring.parse(s),
        CoefficientJson::Poly(p) => {
            let CoefficientRing::Poly(params) = ring else {
                return Err(Error::Json("polynomial coefficient in a series without parameters".into()));
            };
            let terms = p
                .poly
                .iter()
                .map(|t| {
                    let mut exps = vec![0u32; params.len()];
                    for (name, e) in &t.monomial {
                        let i = params.iter().position(|q| q == name).ok_or_else(|| Error::UnknownParameter(name.clone()))?;
                        exps[i] = *e;
                    }
                    Ok((exps, t.coefficient.parse::<Rational>()?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Coefficient::Poly(Poly::from_terms(Arc::clone(params), terms)?))
        }
    }
}

impl TupleJson {
    pub fn from_tuple(t: &SeriesTuple) -> Self {
        TupleJson {
            num_vars: t.num_vars(),
            trunc_degree: t.trunc_degree(),
            parameters: t.ring().params().to_vec(),
            components: t
                .components()
                .iter()
                .map(|s| ComponentJson {
                    terms: s
                        .terms()
                        .map(|(m, c)| TermJson { exponents: m.to_vec(), coefficient: coefficient_to_json(c) })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_tuple(&self) -> Result<SeriesTuple> {
        if self.components.is_empty() {
            return Err(Error::Json("a tuple needs at least one component".into()));
        }
        let ring = CoefficientRing::polynomial(&self.parameters);
        let components = self
            .components
            .iter()
            .map(|comp| {
                let terms = comp
                    .terms
                    .iter()
                    .map(|t| Ok((t.exponents.clone(), coefficient_from_json(&t.coefficient, &ring)?)))
                    .collect::<Result<Vec<_>>>()?;
                Series::from_terms(self.num_vars, self.trunc_degree, ring.clone(), terms)
            })
            .collect::<Result<Vec<_>>>()?;
        SeriesTuple::new(components)
    }
}

pub fn tuple_to_json(t: &SeriesTuple) -> String {
    serde_json::to_string_pretty(&TupleJson::from_tuple(t)).expect("serializable")
}

pub fn tuple_from_json(s: &str) -> Result<SeriesTuple> {
    serde_json::from_str::<TupleJson>(s)?.to_tuple()
}

pub fn series_to_json(s: &Series) -> String {
    tuple_to_json(&SeriesTuple::new(vec![s.clone()]).expect("one component"))
}

pub fn series_from_json(s: &str) -> Result<Series> {
    let t = tuple_from_json(s)?;
    if t.len() != 1 {
        return Err(Error::Json(format!("expected one component, got {}", t.len())));
    }
    Ok(t.into_components().remove(0))
}

fn check_dim(dim: usize, t: &SeriesTuple, what: &str) -> Result<()> {
    if t.len() != dim {
        return Err(Error::ShapeMismatch(format!("{what} has {} components, dim is {dim}", t.len())));
    }
    Ok(())
}

pub fn group_to_json(g: &FormalGroup) -> String {
    let j = GroupJson { dim: g.dim(), law: TupleJson::from_tuple(g.law()), log: g.log().map(TupleJson::from_tuple) };
    serde_json::to_string_pretty(&j).expect("serializable")
}

/// A stored logarithm is trusted only if it reproduces the stored law.
pub fn group_from_json(s: &str) -> Result<FormalGroup> {
    let j: GroupJson = serde_json::from_str(s)?;
    let law = j.law.to_tuple()?;
    check_dim(j.dim, &law, "law")?;
    match j.log {
        None => FormalGroup::from_law(law),
        Some(log) => {
            let log = log.to_tuple()?;
            check_dim(j.dim, &log, "log")?;
            let g = FormalGroup::from_log(&log)?;
            if g.law() != &law {
                return Err(Error::Json("law does not match the one generated by log".into()));
            }
            Ok(g)
        }
    }
}

pub fn ring_to_json(r: &FormalRing) -> String {
    let j = RingJson {
        dim: r.dim(),
        phi: TupleJson::from_tuple(r.phi()),
        psi: TupleJson::from_tuple(r.psi()),
        log: r.log().map(TupleJson::from_tuple),
    };
    serde_json::to_string_pretty(&j).expect("serializable")
}

/// The laws are taken as given; a log, if present, is attached after
/// checking that it generates `phi`.
pub fn ring_from_json(s: &str) -> Result<FormalRing> {
    let j: RingJson = serde_json::from_str(s)?;
    let phi = j.phi.to_tuple()?;
    let psi = j.psi.to_tuple()?;
    check_dim(j.dim, &phi, "phi")?;
    check_dim(j.dim, &psi, "psi")?;
    let group = match j.log {
        None => FormalGroup::from_law(phi)?,
        Some(log) => {
            let log = log.to_tuple()?;
            check_dim(j.dim, &log, "log")?;
            let g = FormalGroup::from_log(&log)?;
            if g.law() != &phi {
                return Err(Error::Json("phi does not match the one generated by log".into()));
            }
            g
        }
    };
    FormalRing::from_group(group, psi)
}

/// `{"n": 2, "kind": "p_typical", "p": 2}`, `{"n": 3, "kind": "universal"}`,
/// or `{"kind": "custom", "ghosts": [tuple, ...]}` where the components of all
/// listed tuples, in order, are `g_1, …, g_n`.
pub fn ghosts_from_json(s: &str) -> Result<GhostFamily> {
    let j: GhostJson = serde_json::from_str(s)?;
    let need_n = || j.n.ok_or_else(|| Error::Json(format!("kind `{}` needs `n`", j.kind)));
    match j.kind.as_str() {
        "p_typical" => {
            let p = j.p.ok_or_else(|| Error::Json("kind `p_typical` needs `p`".into()))?;
            ghosts_p_typical(p, need_n()?)
        }
        "universal" => ghosts_universal(need_n()?),
        "custom" => {
            let tuples = j.ghosts.as_ref().ok_or_else(|| Error::Json("kind `custom` needs `ghosts`".into()))?;
            let mut ghosts = Vec::new();
            for t in tuples {
                ghosts.extend(t.to_tuple()?.into_components());
            }
            if let Some(n) = j.n {
                if n != ghosts.len() {
                    return Err(Error::Json(format!("n = {n} but {} ghosts given", ghosts.len())));
                }
            }
            GhostFamily::new(ghosts, GhostKind::Custom)
        }
        other => Err(Error::Json(format!("unknown ghost kind `{other}`"))),
    }
}
