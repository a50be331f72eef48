//! Object–attribute data, its closure operator under a parameterization,
//! intents, pseudo-intents and bases.

use std::collections::{BTreeSet, HashSet};
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fset::{all_lsets, check_len, space_size, AttributeUniverse, LSet};
use crate::gconn::Parameterization;
use crate::lattice::ResiduatedChain;
use crate::semantics::{holds_in, Closure, Fai, Theory};

/// An L-context `⟨X, Y, I⟩`; row `x` is the L-set `I_x`.
#[derive(Debug, Clone)]
pub struct LContext {
    objects: Vec<String>,
    universe: AttributeUniverse,
    chain: Arc<ResiduatedChain>,
    rows: Vec<LSet>,
}

impl LContext {
    pub fn new(
        objects: Vec<String>,
        universe: AttributeUniverse,
        chain: Arc<ResiduatedChain>,
        rows: Vec<LSet>,
    ) -> Result<Self> {
        if objects.len() != rows.len() {
            return Err(Error::Parse(format!("{} objects but {} rows", objects.len(), rows.len())));
        }
        for r in &rows {
            universe.check(r)?;
            if r.degrees().iter().any(|d| d.index() >= chain.len()) {
                return Err(Error::NotInChain(format!("row {r:?}")));
            }
        }
        Ok(LContext { objects, universe, chain, rows })
    }

    /// Reads CSV with header `object,<attr>,...`; cells must be chain
    /// members written exactly.
    pub fn from_csv<R: Read>(reader: R, chain: Arc<ResiduatedChain>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::Parse(format!("context header: {e}")))?.clone();
        if header.len() < 2 {
            return Err(Error::Parse("context header needs `object` and at least one attribute".into()));
        }
        let universe = AttributeUniverse::new(header.iter().skip(1))?;
        let mut objects = Vec::new();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("context row {}: {e}", i + 1)))?;
            if rec.len() != header.len() {
                return Err(Error::Parse(format!("context row {}: expected {} cells", i + 1, header.len())));
            }
            objects.push(rec[0].to_string());
            let degrees = rec
                .iter()
                .skip(1)
                .map(|cell| chain.parse_degree(cell))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse(format!("context row {}: {e}", i + 1)))?;
            rows.push(LSet::from_degrees(degrees));
        }
        Self::new(objects, universe, chain, rows)
    }

    pub fn load_csv(path: &Path, chain: Arc<ResiduatedChain>) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv(f, chain)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn chain(&self) -> &Arc<ResiduatedChain> {
        &self.chain
    }

    pub fn rows(&self) -> &[LSet] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &LSet {
        &self.rows[x]
    }

    pub fn n_attrs(&self) -> usize {
        self.universe.len()
    }
}

/// A set of pairs `⟨x, g⟩`: object index and connection index in `S`.
pub type RowOperatorSet = BTreeSet<(usize, usize)>;

/// The context together with every `g(I_x)` for `g ∈ S`.
#[derive(Debug, Clone)]
pub struct ContextClosure<'a> {
    ctx: &'a LContext,
    s: &'a Parameterization,
    /// `images[x][j] = g_j(I_x)`.
    images: Vec<Vec<LSet>>,
    distinct: Vec<LSet>,
}

impl<'a> ContextClosure<'a> {
    pub fn new(ctx: &'a LContext, s: &'a Parameterization) -> Result<Self> {
        if ctx.n_attrs() != s.n_attrs() {
            return Err(Error::UniverseMismatch { expected: s.n_attrs(), found: ctx.n_attrs() });
        }
        if *ctx.chain != *s.chain() {
            return Err(Error::InvalidChain("context and parameterization use different chains".into()));
        }
        let images: Vec<Vec<LSet>> = ctx.rows.iter().map(|r| s.iter().map(|c| c.apply_upper(r)).collect()).collect();
        let mut seen = HashSet::new();
        let distinct = images.iter().flatten().filter(|m| seen.insert(*m)).cloned().collect();
        Ok(ContextClosure { ctx, s, images, distinct })
    }

    pub fn context(&self) -> &LContext {
        self.ctx
    }

    pub fn parameterization(&self) -> &Parameterization {
        self.s
    }

    /// `F↑ = ⋂ { g(I_x) : ⟨x, g⟩ ∈ F }`.
    pub fn up(&self, f: &RowOperatorSet) -> LSet {
        let mut out = LSet::constant(self.ctx.n_attrs(), self.s.chain().top());
        for &(x, j) in f {
            out.intersect_with(&self.images[x][j]);
        }
        out
    }

    /// `G↓ = { ⟨x, g⟩ : G ⊆ g(I_x) }`.
    pub fn down(&self, g: &LSet) -> Result<RowOperatorSet> {
        check_len(self.ctx.n_attrs(), g)?;
        let mut out = RowOperatorSet::new();
        for (x, imgs) in self.images.iter().enumerate() {
            for (j, m) in imgs.iter().enumerate() {
                if g.leq(m) {
                    out.insert((x, j));
                }
            }
        }
        Ok(out)
    }

    /// `G↓↑ = ⋂ { g(I_x) : G ⊆ g(I_x) }`.
    pub fn downup(&self, g: &LSet) -> LSet {
        assert_eq!(g.len(), self.ctx.n_attrs(), "L-set over a different universe");
        let mut out = LSet::constant(self.ctx.n_attrs(), self.s.chain().top());
        for m in &self.distinct {
            if g.leq(m) {
                out.intersect_with(m);
            }
        }
        out
    }

    pub fn is_intent(&self, g: &LSet) -> bool {
        self.downup(g) == *g
    }

    /// `B ⊆ A↓↑`.
    pub fn holds(&self, fai: &Fai) -> Result<bool> {
        check_len(self.ctx.n_attrs(), &fai.antecedent)?;
        check_len(self.ctx.n_attrs(), &fai.consequent)?;
        Ok(fai.consequent.leq(&self.downup(&fai.antecedent)))
    }

    /// Truth in every row `I_x`.
    pub fn holds_rowwise(&self, fai: &Fai) -> Result<bool> {
        for r in &self.ctx.rows {
            if !holds_in(r, fai, self.s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `A↓ ⊆ B↓`.
    pub fn holds_by_extents(&self, fai: &Fai) -> Result<bool> {
        Ok(self.down(&fai.antecedent)?.is_subset(&self.down(&fai.consequent)?))
    }

    /// Fixed points of `↓↑` in lectic order.
    pub fn intents(&self, cap: u64) -> Result<Vec<LSet>> {
        let n = self.ctx.n_attrs();
        let top = self.s.chain().top();
        let mut out = vec![self.downup(&LSet::empty(n))];
        'next: loop {
            let a = out.last().expect("non-empty").clone();
            for i in (0..n).rev() {
                if a.get(i) == top {
                    continue;
                }
                let mut cand = a.clone();
                for y in i + 1..n {
                    cand.set(y, self.s.chain().bottom());
                }
                cand.set(i, crate::lattice::TruthDegree::from_index(a.get(i).index() + 1));
                let closed = self.downup(&cand);
                if (0..i).all(|y| closed.get(y) == a.get(y)) {
                    if out.len() as u64 >= cap {
                        return Err(Error::CapExceeded { what: "number of intents".into(), cap });
                    }
                    out.push(closed);
                    continue 'next;
                }
            }
            return Ok(out);
        }
    }

    /// Fixed points of `↓↑` found by testing every L-set.
    pub fn intents_brute(&self, cap: u64) -> Result<Vec<LSet>> {
        let all = self.space(cap)?;
        Ok(all.into_par_iter().filter(|m| self.is_intent(m)).collect())
    }

    fn space(&self, cap: u64) -> Result<Vec<LSet>> {
        let n = self.ctx.n_attrs();
        let k = self.s.chain().len();
        match space_size(n, k) {
            Some(size) if size <= cap => Ok(all_lsets(n, k).collect()),
            _ => Err(Error::CapExceeded { what: format!("{k}^{n} candidate L-sets"), cap }),
        }
    }

    /// Pseudo-intents in lectic order.
    pub fn pseudo_intents(&self, cap: u64) -> Result<Vec<LSet>> {
        self.pseudo_intents_in(ScanOrder::RankLectic, cap)
    }

    /// Pseudo-intents classified by scanning `L^Y` in the given order,
    /// returned in lectic order.
    pub fn pseudo_intents_in(&self, order: ScanOrder, cap: u64) -> Result<Vec<LSet>> {
        let mut all = self.space(cap)?;
        match order {
            ScanOrder::RankLectic => all.sort_by_key(|m| m.rank()),
            ScanOrder::RankReverseLectic => {
                all.reverse();
                all.sort_by_key(|m| m.rank());
            }
        }
        let closures: Vec<LSet> = all.par_iter().map(|m| self.downup(m)).collect();
        let mut found: Vec<(&LSet, &LSet)> = Vec::new();
        for (p, cp) in all.iter().zip(&closures) {
            if p == cp {
                continue;
            }
            if found.iter().all(|(q, cq)| !q.proper_subset_of(p) || cq.leq(p)) {
                found.push((p, cp));
            }
        }
        let mut out: Vec<LSet> = found.into_iter().map(|(p, _)| p.clone()).collect();
        out.sort_by(|a, b| a.lectic_cmp(b));
        Ok(out)
    }

    /// `{ P ⇒ P↓↑ : P pseudo-intent }`, in lectic order of `P`.
    pub fn complete_set(&self, cap: u64) -> Result<Theory> {
        let rules = self.pseudo_intents(cap)?.into_iter().map(|p| {
            let c = self.downup(&p);
            Fai::new(p, c)
        });
        Theory::new(self.ctx.n_attrs(), rules.collect())
    }

    /// `[M]_Σ = M↓↑` for every `M ∈ L^Y`.
    pub fn is_complete_exhaustive(&self, theory: &Theory, cap: u64) -> Result<bool> {
        let closure = Closure::new(theory, self.s)?;
        let all = self.space(cap)?;
        Ok(all.par_iter().all(|m| closure.close(m) == self.downup(m)))
    }

    /// Completeness decided from soundness of every rule plus entailment
    /// of `P ⇒ P↓↑` for every pseudo-intent `P`.
    pub fn completeness_checker(&self, cap: u64) -> Result<CompletenessChecker<'_, 'a>> {
        let targets = self.complete_set(cap)?;
        Ok(CompletenessChecker { cc: self, targets })
    }

    /// Greedily drops rules entailed by the remaining ones, in theory order.
    pub fn reduce_to_base(&self, theory: &Theory, cap: u64) -> Result<Theory> {
        let checker = self.completeness_checker(cap)?;
        if !checker.is_complete(theory)? {
            return Err(Error::NotComplete);
        }
        let mut current = theory.clone();
        let mut i = 0;
        while i < current.len() {
            let rest = current.without(i);
            let closure = Closure::new(&rest, self.s)?;
            let rule = &current.rules()[i];
            if rule.consequent.leq(&closure.close(&rule.antecedent)) {
                current = rest;
            } else {
                i += 1;
            }
        }
        Ok(current)
    }

    /// Lowers antecedent degrees of each rule, attribute by attribute, while
    /// the rule stays true in the context. The result entails the input.
    pub fn strengthen_antecedents(&self, theory: &Theory) -> Result<Theory> {
        let mut current = theory.clone();
        for i in 0..current.len() {
            for y in 0..self.ctx.n_attrs() {
                loop {
                    let rule = &current.rules()[i];
                    let d = rule.antecedent.get(y);
                    if d.is_zero() {
                        break;
                    }
                    let mut lowered = rule.antecedent.clone();
                    lowered.set(y, crate::lattice::TruthDegree::from_index(d.index() - 1));
                    let trial = Fai::new(lowered, rule.consequent.clone());
                    if !self.holds(&trial)? {
                        break;
                    }
                    current.set(i, trial);
                }
            }
        }
        Ok(current)
    }

    /// Lowers degrees in antecedents, then consequents, one chain step at
    /// a time while the theory stays complete.
    pub fn minimize_sides(&self, theory: &Theory, cap: u64) -> Result<Theory> {
        let checker = self.completeness_checker(cap)?;
        if !checker.is_complete(theory)? {
            return Err(Error::NotComplete);
        }
        let mut current = theory.clone();
        for i in 0..current.len() {
            for side in [Side::Antecedent, Side::Consequent] {
                for y in 0..self.ctx.n_attrs() {
                    loop {
                        let rule = current.rules()[i].clone();
                        let set = side.of(&rule);
                        if set.get(y).is_zero() {
                            break;
                        }
                        let mut lowered = set.clone();
                        lowered.set(y, crate::lattice::TruthDegree::from_index(set.get(y).index() - 1));
                        let mut trial = current.clone();
                        trial.set(i, side.replace(&rule, lowered));
                        if checker.is_complete(&trial)? {
                            current = trial;
                        } else {
                            break;
                        }
                    }
                }
            }
        }
        Ok(current)
    }
}

#[derive(Clone, Copy)]
enum Side {
    Antecedent,
    Consequent,
}

impl Side {
    fn of(self, r: &Fai) -> &LSet {
        match self {
            Side::Antecedent => &r.antecedent,
            Side::Consequent => &r.consequent,
        }
    }

    fn replace(self, r: &Fai, set: LSet) -> Fai {
        match self {
            Side::Antecedent => Fai::new(set, r.consequent.clone()),
            Side::Consequent => Fai::new(r.antecedent.clone(), set),
        }
    }
}

/// Linear orders on `L^Y` extending `⊂` used for pseudo-intent scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOrder {
    /// Index sum, ties broken lectically.
    RankLectic,
    /// Index sum, ties broken by reverse lectic order.
    RankReverseLectic,
}

pub struct CompletenessChecker<'c, 'a> {
    cc: &'c ContextClosure<'a>,
    targets: Theory,
}

impl CompletenessChecker<'_, '_> {
    pub fn is_complete(&self, theory: &Theory) -> Result<bool> {
        for r in theory.iter() {
            if !self.cc.holds(r)? {
                return Ok(false);
            }
        }
        let closure = Closure::new(theory, self.cc.s)?;
        Ok(self.targets.iter().all(|t| t.consequent.leq(&closure.close(&t.antecedent))))
    }
}

/// Context truth: `B ⊆ A↓↑`.
pub fn holds_in_context(ctx: &LContext, fai: &Fai, s: &Parameterization) -> Result<bool> {
    ContextClosure::new(ctx, s)?.holds(fai)
}

pub fn downup(ctx: &LContext, g: &LSet, s: &Parameterization) -> Result<LSet> {
    check_len(ctx.n_attrs(), g)?;
    Ok(ContextClosure::new(ctx, s)?.downup(g))
}

pub fn intents_enum(ctx: &LContext, s: &Parameterization, cap: u64) -> Result<Vec<LSet>> {
    ContextClosure::new(ctx, s)?.intents(cap)
}

pub fn pseudo_intents(ctx: &LContext, s: &Parameterization, cap: u64) -> Result<Vec<LSet>> {
    ContextClosure::new(ctx, s)?.pseudo_intents(cap)
}

pub fn complete_set(ctx: &LContext, s: &Parameterization, cap: u64) -> Result<Theory> {
    ContextClosure::new(ctx, s)?.complete_set(cap)
}

pub fn is_complete(theory: &Theory, ctx: &LContext, s: &Parameterization, cap: u64) -> Result<bool> {
    ContextClosure::new(ctx, s)?.is_complete_exhaustive(theory, cap)
}

pub fn reduce_to_base(theory: &Theory, ctx: &LContext, s: &Parameterization, cap: u64) -> Result<Theory> {
    ContextClosure::new(ctx, s)?.reduce_to_base(theory, cap)
}

pub fn minimize_sides(theory: &Theory, ctx: &LContext, s: &Parameterization, cap: u64) -> Result<Theory> {
    ContextClosure::new(ctx, s)?.minimize_sides(theory, cap)
}

/// Pairs `(i, j)` with `sets[i] ⊂ sets[j]` and nothing in between.
pub fn cover_edges(sets: &[LSet]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            if a.proper_subset_of(b) && !sets.iter().any(|c| a.proper_subset_of(c) && c.proper_subset_of(b)) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Hasse diagram of `⊆` on `intents` in DOT, edges pointing upward.
pub fn hasse_dot(intents: &[LSet], universe: &AttributeUniverse, chain: &ResiduatedChain) -> String {
    let mut out = String::from("digraph intents {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, m) in intents.iter().enumerate() {
        let label = universe.render(chain, m).replace('\\', "\\\\").replace('"', "\\\"");
        out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
    }
    for (i, j) in cover_edges(intents) {
        out.push_str(&format!("  n{i} -> n{j};\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Logic;

    fn chain() -> Arc<ResiduatedChain> {
        Arc::new(ResiduatedChain::from_literals(&["0", "0.25", "0.5", "0.75", "1"], Logic::Godel).unwrap())
    }

    fn one_object() -> LContext {
        let csv = "object,p,q\nx,1,1\n";
        LContext::from_csv(csv.as_bytes(), chain()).unwrap()
    }

    #[test]
    fn csv_parsing() {
        let ctx = LContext::from_csv("object, p, q\nx, 0.5, 1\ny,0,0.25\n".as_bytes(), chain()).unwrap();
        assert_eq!(ctx.objects(), ["x", "y"]);
        assert_eq!(ctx.row(0), &LSet::from_indices(&[2, 4]));
        assert!(LContext::from_csv("object,p\nx,0.3\n".as_bytes(), chain()).is_err());
        assert!(LContext::from_csv("object,p\nx,0.5,1\n".as_bytes(), chain()).is_err());
        assert!(LContext::from_csv("object,p,p\nx,0.5,1\n".as_bytes(), chain()).is_err());
    }

    #[test]
    fn single_full_row() {
        let ctx = one_object();
        let s = Parameterization::identity_only(chain(), 2);
        let cc = ContextClosure::new(&ctx, &s).unwrap();
        assert_eq!(cc.intents(100).unwrap(), vec![LSet::from_indices(&[4, 4])]);
        assert_eq!(cc.pseudo_intents(100).unwrap(), vec![LSet::empty(2)]);
        assert_eq!(cc.up(&RowOperatorSet::new()), LSet::from_indices(&[4, 4]));
        assert_eq!(cc.down(&LSet::empty(2)).unwrap().len(), 1);
    }

    #[test]
    fn cover_edges_of_chain() {
        let sets = vec![LSet::from_indices(&[0, 0]), LSet::from_indices(&[1, 0]), LSet::from_indices(&[1, 1])];
        assert_eq!(cover_edges(&sets), vec![(0, 1), (1, 2)]);
        assert_eq!(cover_edges(&sets[..1]), vec![]);
        let y = AttributeUniverse::new(["p", "q"]).unwrap();
        let dot = hasse_dot(&sets, &y, &chain());
        assert!(dot.contains("n0 [label=\"{}\"]") && dot.contains("n1 -> n2"));
    }

    #[test]
    fn empty_theory_incomplete_unless_everything_closed() {
        let ctx = one_object();
        let s = Parameterization::identity_only(chain(), 2);
        assert!(!is_complete(&Theory::empty(2), &ctx, &s, 1000).unwrap());
    }
}
