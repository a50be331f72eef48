//! Parameterization files: chain, attribute universe, generators and caps.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fset::AttributeUniverse;
use crate::gconn::{Connection, DegreeLit, Descriptor, Parameterization, DEFAULT_MONOID_CAP, DEFAULT_VERIFY_CAP};
use crate::lattice::{parse_rational, Logic, ResiduatedChain};
use crate::semantics::DEFAULT_ENUM_CAP;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub degrees: Vec<DegreeLit>,
    pub logic: Logic,
}

impl ChainSpec {
    pub fn build(&self) -> Result<ResiduatedChain> {
        let values = self.degrees.iter().map(|d| parse_rational(&d.to_string())).collect::<Result<Vec<_>>>()?;
        ResiduatedChain::new(values, self.logic)
    }
}

/// Contents of a parameterization file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub chain: ChainSpec,
    #[serde(default)]
    pub attributes: Option<Vec<String>>,
    #[serde(default)]
    pub generators: Vec<Descriptor>,
    #[serde(default)]
    pub monoid_cap: Option<usize>,
    #[serde(default)]
    pub verify_cap: Option<u64>,
    #[serde(default)]
    pub enum_cap: Option<u64>,
    /// Drop the constant-`0_Y` connection after generation.
    #[serde(default)]
    pub drop_vacuous: bool,
    /// Re-check the Galois condition for every generator.
    #[serde(default)]
    pub verify: bool,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub chain: Arc<ResiduatedChain>,
    pub attributes: Option<AttributeUniverse>,
    pub generators: Vec<Descriptor>,
    pub monoid_cap: usize,
    pub verify_cap: u64,
    pub enum_cap: u64,
    pub drop_vacuous: bool,
    pub verify: bool,
}

impl RunConfig {
    pub fn from_file(file: ParamsFile) -> Result<Self> {
        let chain = Arc::new(file.chain.build()?);
        let attributes = file.attributes.map(AttributeUniverse::new).transpose()?;
        let positive = |v: Option<u64>, what: &str, default: u64| match v {
            Some(0) => Err(Error::Parse(format!("{what} must be positive"))),
            Some(v) => Ok(v),
            None => Ok(default),
        };
        Ok(RunConfig {
            chain,
            attributes,
            generators: file.generators,
            monoid_cap: positive(file.monoid_cap.map(|v| v as u64), "monoid_cap", DEFAULT_MONOID_CAP as u64)? as usize,
            verify_cap: positive(file.verify_cap, "verify_cap", DEFAULT_VERIFY_CAP)?,
            enum_cap: positive(file.enum_cap, "enum_cap", DEFAULT_ENUM_CAP)?,
            drop_vacuous: file.drop_vacuous,
            verify: file.verify,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ParamsFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("parameters: {e}")))?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The universe: from the context if given, else from the file. Both
    /// present must agree.
    pub fn universe(&self, from_context: Option<&AttributeUniverse>) -> Result<AttributeUniverse> {
        match (from_context, &self.attributes) {
            (Some(c), Some(p)) if c.names() != p.names() => Err(Error::InvalidUniverse(format!(
                "context attributes {:?} differ from parameter attributes {:?}",
                c.names(),
                p.names()
            ))),
            (Some(c), _) => Ok(c.clone()),
            (None, Some(p)) => Ok(p.clone()),
            (None, None) => Err(Error::InvalidUniverse("no attributes given (add \"attributes\" or a context)".into())),
        }
    }

    pub fn generator_connections(&self, universe: &AttributeUniverse) -> Result<Vec<Connection>> {
        let mut out = Vec::new();
        for d in &self.generators {
            for term in d.expand(&self.chain, universe)? {
                let c = if self.verify {
                    Connection::new_verified(term, self.chain.clone(), universe.len(), self.verify_cap)?
                } else {
                    Connection::new(term, self.chain.clone(), universe.len())?
                };
                out.push(c);
            }
        }
        Ok(out)
    }

    pub fn parameterization(&self, universe: &AttributeUniverse) -> Result<Parameterization> {
        let gens = self.generator_connections(universe)?;
        let s = Parameterization::generate(self.chain.clone(), universe.len(), gens, self.monoid_cap)?;
        Ok(if self.drop_vacuous { s.without_vacuous() } else { s })
    }
}
