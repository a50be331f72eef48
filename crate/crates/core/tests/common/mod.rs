#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use fai::config::RunConfig;
use fai::context::LContext;
use fai::fset::{AttributeUniverse, LSet};
use fai::gconn::Parameterization;
use fai::lattice::ResiduatedChain;
use fai::semantics::{Fai, Theory};

pub const CAP: u64 = 1_000_000;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub struct Setup {
    pub cfg: RunConfig,
    pub ctx: LContext,
    pub universe: AttributeUniverse,
    pub s: Parameterization,
}

impl Setup {
    pub fn chain(&self) -> &Arc<ResiduatedChain> {
        &self.cfg.chain
    }

    pub fn theory(&self, file: &str) -> Theory {
        let text = std::fs::read_to_string(fixture(file)).unwrap();
        Theory::parse(&self.universe, self.chain(), &text).unwrap()
    }

    pub fn fai(&self, text: &str) -> Fai {
        Fai::parse(&self.universe, self.chain(), text).unwrap()
    }

    pub fn set(&self, text: &str) -> LSet {
        self.universe.parse_lset(self.chain(), text).unwrap()
    }
}

/// The holidays context under the parameterization in `params`.
pub fn holidays(params: &str) -> Setup {
    let cfg = RunConfig::load(&fixture(params)).unwrap();
    let ctx = LContext::load_csv(&fixture("holidays.csv"), cfg.chain.clone()).unwrap();
    let universe = cfg.universe(Some(ctx.universe())).unwrap();
    let s = cfg.parameterization(&universe).unwrap();
    Setup { cfg, ctx, universe, s }
}

pub fn rule_set(t: &Theory) -> BTreeSet<Fai> {
    t.iter().cloned().collect()
}

pub fn set_of(v: &[LSet]) -> BTreeSet<LSet> {
    v.iter().cloned().collect()
}
