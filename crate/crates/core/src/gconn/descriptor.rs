use std::fmt;

use serde::{Deserialize, Serialize};

use super::Term;
use crate::error::{Error, Result};
use crate::fset::AttributeUniverse;
use crate::lattice::{Hedge, ResiduatedChain, TruthDegree};

/// A degree written either as a JSON number or a string (`0.5`, `"1/3"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeLit {
    Number(serde_json::Number),
    Text(String),
}

impl DegreeLit {
    pub fn resolve(&self, chain: &ResiduatedChain) -> Result<TruthDegree> {
        chain.parse_degree(&self.to_string())
    }

    pub fn of(chain: &ResiduatedChain, d: TruthDegree) -> Self {
        let s = chain.format_degree(d);
        match s.parse::<serde_json::Number>() {
            Ok(n) => DegreeLit::Number(n),
            Err(_) => DegreeLit::Text(s),
        }
    }
}

impl fmt::Display for DegreeLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeLit::Number(n) => write!(f, "{n}"),
            DegreeLit::Text(s) => f.write_str(s),
        }
    }
}

/// Generator descriptor as it appears in parameterization and proof files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Descriptor {
    Identity,
    ConstMult {
        c: DegreeLit,
    },
    ConstMultSet {
        #[serde(rename = "C")]
        c: String,
    },
    DiffSet {
        #[serde(rename = "C")]
        c: String,
    },
    Rotate {
        shift: usize,
    },
    Hedge {
        fixed_points: Vec<DegreeLit>,
    },
    /// `of[0] ∘ of[1] ∘ …`; the last entry's lower adjoint applies first.
    Compose {
        of: Vec<Descriptor>,
    },
}

impl Descriptor {
    /// Terms denoted by the descriptor. Everything except `hedge` yields
    /// exactly one term.
    pub fn expand(&self, chain: &ResiduatedChain, universe: &AttributeUniverse) -> Result<Vec<Term>> {
        match self {
            Descriptor::Hedge { fixed_points } => {
                let fixed = fixed_points.iter().map(|d| d.resolve(chain)).collect::<Result<Vec<_>>>()?;
                let h = Hedge::new(chain, &fixed)?;
                let mut out: Vec<Term> = Vec::new();
                for c in chain.degrees() {
                    let t = Term::ConstMult(h.apply(c));
                    if !out.contains(&t) {
                        out.push(t);
                    }
                }
                Ok(out)
            }
            other => Ok(vec![other.to_term(chain, universe)?]),
        }
    }

    /// The single term for a non-hedge descriptor.
    pub fn to_term(&self, chain: &ResiduatedChain, universe: &AttributeUniverse) -> Result<Term> {
        Ok(match self {
            Descriptor::Identity => Term::Identity,
            Descriptor::ConstMult { c } => Term::ConstMult(c.resolve(chain)?),
            Descriptor::ConstMultSet { c } => Term::ConstMultSet(universe.parse_lset(chain, c)?),
            Descriptor::DiffSet { c } => Term::DiffSet(universe.parse_lset(chain, c)?),
            Descriptor::Rotate { shift } => Term::Rotate(*shift),
            Descriptor::Hedge { .. } => {
                return Err(Error::Parse("a hedge descriptor denotes a family, not one connection".into()))
            }
            Descriptor::Compose { of } => {
                let terms = of.iter().map(|d| d.to_term(chain, universe)).collect::<Result<Vec<_>>>()?;
                let mut terms = terms.into_iter().rev();
                let first = terms.next().unwrap_or(Term::Identity);
                terms.fold(first, |inner, outer| outer.compose(inner))
            }
        })
    }

    pub fn from_term(term: &Term, chain: &ResiduatedChain, universe: &AttributeUniverse) -> Self {
        match term {
            Term::Identity => Descriptor::Identity,
            Term::ConstMult(c) => Descriptor::ConstMult { c: DegreeLit::of(chain, *c) },
            Term::ConstMultSet(c) => Descriptor::ConstMultSet { c: universe.render(chain, c) },
            Term::DiffSet(c) => Descriptor::DiffSet { c: universe.render(chain, c) },
            Term::Rotate(i) => Descriptor::Rotate { shift: *i },
            Term::Compose(..) => {
                let mut of = Vec::new();
                flatten(term, &mut of);
                Descriptor::Compose { of: of.into_iter().map(|t| Self::from_term(t, chain, universe)).collect() }
            }
        }
    }
}

fn flatten<'a>(term: &'a Term, out: &mut Vec<&'a Term>) {
    match term {
        Term::Compose(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        t => out.push(t),
    }
}
