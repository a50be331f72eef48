use serde::{Deserialize, Serialize};

use super::{Justification, Premise, Proof, ProofStep};
use crate::error::{Error, Result};
use crate::fset::AttributeUniverse;
use crate::gconn::{Connection, Descriptor, Parameterization};
use crate::semantics::Fai;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFile {
    formula: String,
    by: ByFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ByFile {
    Keyword(String),
    Hyp(HypFile),
    Cut(CutFile),
    ApplyF(ApplyFFile),
    CutF(CutFFile),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypFile {
    hyp: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CutFile {
    cut: [PremiseFile; 2],
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplyFFile {
    #[serde(rename = "applyF")]
    apply_f: usize,
    conn: Descriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fingerprint: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CutFFile {
    #[serde(rename = "cutF")]
    cut_f: [PremiseFile; 2],
    conn: Descriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fingerprint: Option<String>,
    #[serde(rename = "B")]
    b: String,
    #[serde(rename = "C")]
    c: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum PremiseFile {
    Step(usize),
    Axiom(AxiomFile),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxiomFile {
    axiom: String,
}

fn bad(step: usize, reason: impl std::fmt::Display) -> Error {
    Error::InvalidStep { step: step + 1, reason: reason.to_string() }
}

fn step_ref(k: usize, i: usize) -> Result<usize> {
    if i == 0 {
        Err(bad(k, "step references are 1-based"))
    } else {
        Ok(i - 1)
    }
}

fn resolve_conn(
    k: usize,
    d: &Descriptor,
    fingerprint: Option<&str>,
    universe: &AttributeUniverse,
    s: &Parameterization,
) -> Result<usize> {
    let term = d.to_term(s.chain(), universe).map_err(|e| bad(k, e))?;
    let c = Connection::new(term, s.chain_arc().clone(), universe.len()).map_err(|e| bad(k, e))?;
    if let Some(fp) = fingerprint {
        if fp != c.fingerprint().digest() {
            return Err(bad(k, format!("fingerprint {fp} does not match the connection")));
        }
    }
    s.index_of(&c).ok_or_else(|| bad(k, format!("connection {} is not a member of S", c.term())))
}

/// Reads the JSON proof format: an array of `{"formula", "by"}` objects.
pub fn parse_proof(text: &str, universe: &AttributeUniverse, s: &Parameterization) -> Result<Proof> {
    let raw: Vec<StepFile> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("proof: {e}")))?;
    let chain = s.chain();
    let fai = |k: usize, t: &str| Fai::parse(universe, chain, t).map_err(|e| bad(k, e));
    let set = |k: usize, t: &str| universe.parse_lset(chain, t).map_err(|e| bad(k, e));
    let premise = |k: usize, p: &PremiseFile| -> Result<Premise> {
        Ok(match p {
            PremiseFile::Step(i) => Premise::Step(step_ref(k, *i)?),
            PremiseFile::Axiom(a) => Premise::Axiom(fai(k, &a.axiom)?),
        })
    };
    let mut steps = Vec::with_capacity(raw.len());
    for (k, st) in raw.iter().enumerate() {
        let formula = fai(k, &st.formula)?;
        let by = match &st.by {
            ByFile::Keyword(w) if w == "axiom" => Justification::Axiom,
            ByFile::Keyword(w) => return Err(bad(k, format!("unknown justification `{w}`"))),
            ByFile::Hyp(h) => Justification::Hyp(step_ref(k, h.hyp)?),
            ByFile::Cut(c) => Justification::Cut {
                premises: [premise(k, &c.cut[0])?, premise(k, &c.cut[1])?],
                c: c.c.as_deref().map(|t| set(k, t)).transpose()?,
            },
            ByFile::ApplyF(a) => Justification::ApplyF {
                premise: step_ref(k, a.apply_f)?,
                conn: resolve_conn(k, &a.conn, a.fingerprint.as_deref(), universe, s)?,
            },
            ByFile::CutF(c) => Justification::CutF {
                premises: [premise(k, &c.cut_f[0])?, premise(k, &c.cut_f[1])?],
                conn: resolve_conn(k, &c.conn, c.fingerprint.as_deref(), universe, s)?,
                b: set(k, &c.b)?,
                c: set(k, &c.c)?,
            },
        };
        steps.push(ProofStep::new(formula, by));
    }
    Proof::new(steps)
}

/// Writes the JSON proof format with connection fingerprints.
pub fn render_proof(proof: &Proof, universe: &AttributeUniverse, s: &Parameterization) -> String {
    let chain = s.chain();
    let premise = |p: &Premise| match p {
        Premise::Step(i) => PremiseFile::Step(i + 1),
        Premise::Axiom(f) => PremiseFile::Axiom(AxiomFile { axiom: f.render(universe, chain) }),
    };
    let conn = |j: usize| {
        let c = s.get(j);
        (Descriptor::from_term(c.term(), chain, universe), Some(c.fingerprint().digest()))
    };
    let raw: Vec<StepFile> = proof
        .steps()
        .iter()
        .map(|st| {
            let by = match &st.by {
                Justification::Axiom => ByFile::Keyword("axiom".into()),
                Justification::Hyp(i) => ByFile::Hyp(HypFile { hyp: i + 1 }),
                Justification::Cut { premises, c } => ByFile::Cut(CutFile {
                    cut: [premise(&premises[0]), premise(&premises[1])],
                    c: c.as_ref().map(|c| universe.render(chain, c)),
                }),
                Justification::ApplyF { premise: i, conn: j } => {
                    let (d, fp) = conn(*j);
                    ByFile::ApplyF(ApplyFFile { apply_f: i + 1, conn: d, fingerprint: fp })
                }
                Justification::CutF { premises, conn: j, b, c } => {
                    let (d, fp) = conn(*j);
                    ByFile::CutF(CutFFile {
                        cut_f: [premise(&premises[0]), premise(&premises[1])],
                        conn: d,
                        fingerprint: fp,
                        b: universe.render(chain, b),
                        c: universe.render(chain, c),
                    })
                }
            };
            StepFile { formula: st.formula.render(universe, chain), by }
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&raw).expect("proof serializes");
    out.push('\n');
    out
}
