//! Truth, models, least models and entailment of FAIs under a
//! parameterization.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fset::{all_lsets, check_len, space_size, AttributeUniverse, LSet};
use crate::gconn::Parameterization;
use crate::lattice::{Hedge, ResiduatedChain, TruthDegree};

/// Default bound on `|L|^|Y|` for model enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

/// A fuzzy attribute implication `A ⇒ B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fai {
    pub antecedent: LSet,
    pub consequent: LSet,
}

impl Fai {
    pub fn new(antecedent: LSet, consequent: LSet) -> Self {
        assert_eq!(antecedent.len(), consequent.len(), "sides over different universes");
        Fai { antecedent, consequent }
    }

    pub fn n_attrs(&self) -> usize {
        self.antecedent.len()
    }

    /// Parses `ANT -> CONS`.
    pub fn parse(universe: &AttributeUniverse, chain: &ResiduatedChain, text: &str) -> Result<Self> {
        let (a, b) = text
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("expected `ANT -> CONS`, got `{}`", text.trim())))?;
        Ok(Fai::new(universe.parse_lset(chain, a)?, universe.parse_lset(chain, b)?))
    }

    pub fn render(&self, universe: &AttributeUniverse, chain: &ResiduatedChain) -> String {
        format!("{} -> {}", universe.render(chain, &self.antecedent), universe.render(chain, &self.consequent))
    }

    /// `A ⇒ c⊗B`.
    pub fn scaled(&self, chain: &ResiduatedChain, c: TruthDegree) -> Fai {
        Fai::new(self.antecedent.clone(), self.consequent.c_mult(chain, c))
    }

    fn check(&self, n: usize) -> Result<()> {
        check_len(n, &self.antecedent)?;
        check_len(n, &self.consequent)
    }
}

/// An ordered finite list of FAIs over one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    n_attrs: usize,
    rules: Vec<Fai>,
}

impl Theory {
    pub fn empty(n_attrs: usize) -> Self {
        Theory { n_attrs, rules: Vec::new() }
    }

    pub fn new(n_attrs: usize, rules: Vec<Fai>) -> Result<Self> {
        for r in &rules {
            r.check(n_attrs)?;
        }
        Ok(Theory { n_attrs, rules })
    }

    /// One rule per line; `#` starts a comment.
    pub fn parse(universe: &AttributeUniverse, chain: &ResiduatedChain, text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let rule = Fai::parse(universe, chain, line).map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
            rules.push(rule);
        }
        Ok(Theory { n_attrs: universe.len(), rules })
    }

    pub fn render(&self, universe: &AttributeUniverse, chain: &ResiduatedChain) -> String {
        self.rules.iter().map(|r| r.render(universe, chain) + "\n").collect()
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn rules(&self) -> &[Fai] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn push(&mut self, rule: Fai) -> Result<()> {
        rule.check(self.n_attrs)?;
        self.rules.push(rule);
        Ok(())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Fai> {
        self.rules.iter()
    }

    /// Copy without the rule at `skip`.
    pub fn without(&self, skip: usize) -> Theory {
        let rules = self.rules.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, r)| r.clone()).collect();
        Theory { n_attrs: self.n_attrs, rules }
    }

    pub fn with_rule(&self, rule: Fai) -> Result<Theory> {
        let mut t = self.clone();
        t.push(rule)?;
        Ok(t)
    }

    pub fn set(&mut self, i: usize, rule: Fai) {
        assert_eq!(rule.n_attrs(), self.n_attrs);
        self.rules[i] = rule;
    }
}

impl From<Theory> for Vec<Fai> {
    fn from(t: Theory) -> Self {
        t.rules
    }
}

impl fmt::Display for Fai {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.antecedent, self.consequent)
    }
}

fn check_theory(s: &Parameterization, theory: &Theory) -> Result<()> {
    if theory.n_attrs() == s.n_attrs() {
        Ok(())
    } else {
        Err(Error::UniverseMismatch { expected: s.n_attrs(), found: theory.n_attrs() })
    }
}

fn check_inputs(s: &Parameterization, sets: &[&LSet]) -> Result<()> {
    for set in sets {
        s.check_universe(set)?;
    }
    Ok(())
}

/// `M ⊨ A ⇒ B` under `S`: for every `f`, `f(A) ⊄ M` or `f(B) ⊆ M`.
pub fn holds_in(m: &LSet, fai: &Fai, s: &Parameterization) -> Result<bool> {
    check_inputs(s, &[m, &fai.antecedent, &fai.consequent])?;
    Ok(holds(m, fai, s))
}

fn holds(m: &LSet, fai: &Fai, s: &Parameterization) -> bool {
    s.iter().all(|c| !c.lower_within(&fai.antecedent, m) || c.lower_within(&fai.consequent, m))
}

/// The same truth condition phrased with upper adjoints:
/// `A ⊆ g(M)` implies `B ⊆ g(M)`.
pub fn holds_in_upper(m: &LSet, fai: &Fai, s: &Parameterization) -> Result<bool> {
    check_inputs(s, &[m, &fai.antecedent, &fai.consequent])?;
    Ok(s.iter().all(|c| {
        let gm = c.apply_upper(m);
        !fai.antecedent.leq(&gm) || fai.consequent.leq(&gm)
    }))
}

/// `S(A,M)* → S(B,M)`.
pub fn hedge_truth_degree(chain: &ResiduatedChain, m: &LSet, fai: &Fai, h: &Hedge) -> TruthDegree {
    let sa = fai.antecedent.subsethood(chain, m);
    let sb = fai.consequent.subsethood(chain, m);
    chain.residuum(h.apply(sa), sb)
}

pub fn is_model(m: &LSet, theory: &Theory, s: &Parameterization) -> Result<bool> {
    check_len(s.n_attrs(), m)?;
    check_theory(s, theory)?;
    Ok(theory.iter().all(|r| holds(m, r, s)))
}

/// One application of the immediate consequence operator.
pub fn t_step(theory: &Theory, s: &Parameterization, m: &LSet) -> LSet {
    let mut out = m.clone();
    for r in theory.iter() {
        for c in s.iter() {
            if c.lower_within(&r.antecedent, m) {
                out.union_with(&c.apply_lower(&r.consequent));
            }
        }
    }
    out
}

/// Origin of an expanded rule `f(A) ⇒ f(B)`: rule index in the theory and
/// connection index in `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub rule: usize,
    pub conn: usize,
}

/// `Σ^S = { f(A) ⇒ f(B) }` precomputed for repeated closure computations.
/// Rules with `f(B) ⊆ f(A)` can never add anything and are dropped.
#[derive(Debug, Clone)]
pub struct Closure {
    n_attrs: usize,
    rules: Vec<(LSet, LSet, Origin)>,
}

impl Closure {
    pub fn new(theory: &Theory, s: &Parameterization) -> Result<Self> {
        check_theory(s, theory)?;
        let mut seen = HashSet::new();
        let mut rules = Vec::new();
        for (ri, r) in theory.iter().enumerate() {
            for (ci, c) in s.iter().enumerate() {
                let fa = c.apply_lower(&r.antecedent);
                let fb = c.apply_lower(&r.consequent);
                if fb.leq(&fa) || !seen.insert((fa.clone(), fb.clone())) {
                    continue;
                }
                rules.push((fa, fb, Origin { rule: ri, conn: ci }));
            }
        }
        Ok(Closure { n_attrs: s.n_attrs(), rules })
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    /// `[A]^S_Σ`.
    pub fn close(&self, a: &LSet) -> LSet {
        self.close_traced(a, |_| ())
    }

    /// Like [`Closure::close`], calling `fired` with the origin of every
    /// expanded rule at the moment it enlarges the current set.
    pub fn close_traced(&self, a: &LSet, mut fired: impl FnMut(Origin)) -> LSet {
        assert_eq!(a.len(), self.n_attrs, "L-set over a different universe");
        let mut m = a.clone();
        let mut done = vec![false; self.rules.len()];
        let mut passes = 0usize;
        loop {
            passes += 1;
            let mut changed = false;
            for (i, (fa, fb, origin)) in self.rules.iter().enumerate() {
                if done[i] || !fa.leq(&m) {
                    continue;
                }
                done[i] = true;
                if !fb.leq(&m) {
                    m.union_with(fb);
                    fired(*origin);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // Every productive pass raises the index sum of `m` by at least one.
        debug_assert!(passes <= a.len() * 256 + 1);
        m
    }
}

/// Least model of `Σ` under `S` containing `A`, by iterating
/// [`t_step`] to its fixed point.
pub fn least_model(theory: &Theory, s: &Parameterization, a: &LSet) -> Result<LSet> {
    check_len(s.n_attrs(), a)?;
    check_theory(s, theory)?;
    let bound = s.chain().len() * s.n_attrs();
    let mut m = a.clone();
    for _ in 0..=bound {
        let next = t_step(theory, s, &m);
        if next == m {
            return Ok(m);
        }
        m = next;
    }
    unreachable!("immediate consequence operator did not stabilize within |L|·|Y| steps")
}

/// `Σ ⊨ A ⇒ B` iff `B ⊆ [A]`.
pub fn entails(theory: &Theory, fai: &Fai, s: &Parameterization) -> Result<bool> {
    check_inputs(s, &[&fai.antecedent, &fai.consequent])?;
    let closure = Closure::new(theory, s)?;
    Ok(fai.consequent.leq(&closure.close(&fai.antecedent)))
}

/// Greatest `c` with `M ⊨ A ⇒ c⊗B`.
pub fn truth_degree(m: &LSet, fai: &Fai, s: &Parameterization) -> Result<TruthDegree> {
    check_inputs(s, &[m, &fai.antecedent, &fai.consequent])?;
    let chain = s.chain();
    Ok(chain.degrees().rev().find(|c| holds(m, &fai.scaled(chain, *c), s)).unwrap_or(TruthDegree::ZERO))
}

/// `S(B, [A])`.
pub fn entail_degree(theory: &Theory, fai: &Fai, s: &Parameterization) -> Result<TruthDegree> {
    check_inputs(s, &[&fai.antecedent, &fai.consequent])?;
    let closure = Closure::new(theory, s)?;
    Ok(fai.consequent.subsethood(s.chain(), &closure.close(&fai.antecedent)))
}

fn enumerate(s: &Parameterization, cap: u64) -> Result<Vec<LSet>> {
    let n = s.n_attrs();
    match space_size(n, s.chain().len()) {
        Some(size) if size <= cap => Ok(all_lsets(n, s.chain().len()).collect()),
        _ => Err(Error::CapExceeded { what: format!("{}^{} candidate L-sets", s.chain().len(), n), cap }),
    }
}

/// All models of `Σ` under `S`, in lectic order.
pub fn models_enum(theory: &Theory, s: &Parameterization, cap: u64) -> Result<Vec<LSet>> {
    check_theory(s, theory)?;
    let all = enumerate(s, cap)?;
    Ok(all.into_par_iter().filter(|m| theory.iter().all(|r| holds(m, r, s))).collect())
}

/// `{ A ⇒ C(A) }` where `C(A)` is the least member of `models` containing
/// `A`. Rules with `C(A) = A` are omitted since they hold everywhere.
pub fn theory_of_system(models: &[LSet], s: &Parameterization, cap: u64) -> Result<Theory> {
    let n = s.n_attrs();
    for m in models {
        check_len(n, m)?;
    }
    let set: HashSet<&LSet> = models.iter().collect();
    let top = LSet::constant(n, s.chain().top());
    if !set.contains(&top) {
        return Err(Error::NotClosureSystem("1_Y is not a member".into()));
    }
    for (i, a) in models.iter().enumerate() {
        for b in &models[i + 1..] {
            if !set.contains(&a.intersection(b)) {
                return Err(Error::NotClosureSystem(format!("not closed under intersection: {a:?} ∩ {b:?}")));
            }
        }
        for c in s.iter() {
            if !set.contains(&c.apply_upper(a)) {
                return Err(Error::NotClosureSystem(format!("not closed under {}: {a:?}", c.term())));
            }
        }
    }
    let mut rules = Vec::new();
    for a in enumerate(s, cap)? {
        let mut closed = top.clone();
        for m in models.iter().filter(|m| a.leq(m)) {
            closed.intersect_with(m);
        }
        if closed != a {
            rules.push(Fai::new(a, closed));
        }
    }
    Theory::new(n, rules)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::gconn::{Connection, Term};
    use crate::lattice::Logic;

    fn chain() -> Arc<ResiduatedChain> {
        Arc::new(ResiduatedChain::from_literals(&["0", "0.25", "0.5", "0.75", "1"], Logic::Godel).unwrap())
    }

    fn y() -> AttributeUniverse {
        AttributeUniverse::new(["k", "l", "a", "e"]).unwrap()
    }

    fn set(s: &str) -> LSet {
        y().parse_lset(&chain(), s).unwrap()
    }

    fn fai(s: &str) -> Fai {
        Fai::parse(&y(), &chain(), s).unwrap()
    }

    fn theory(s: &str) -> Theory {
        Theory::parse(&y(), &chain(), s).unwrap()
    }

    fn id() -> Parameterization {
        Parameterization::identity_only(chain(), 4)
    }

    fn s1() -> Parameterization {
        let half = chain().parse_degree("0.5").unwrap();
        let g = Connection::new(Term::ConstMult(half), chain(), 4).unwrap();
        Parameterization::generate(chain(), 4, vec![g], 16).unwrap()
    }

    #[test]
    fn truth_examples() {
        let beach = set("0.75/k, 0.25/l, 0.75/a, 0.25/e");
        assert!(holds_in(&beach, &fai("0.5/k -> 0.75/a"), &id()).unwrap());
        assert!(!holds_in(&set("0.5/k"), &fai("0.5/k -> l"), &id()).unwrap());
        assert!(holds_in(&set("0.5/k"), &fai("0.5/k, l -> 0.5/k"), &s1()).unwrap());
        assert_eq!(truth_degree(&beach, &fai("0.5/k -> a"), &id()).unwrap(), chain().parse_degree("0.75").unwrap());
    }

    #[test]
    fn step_and_closure_examples() {
        let t = theory("l -> e");
        assert_eq!(t_step(&t, &id(), &set("l")), set("l, e"));
        assert_eq!(t_step(&t, &s1(), &set("0.5/l")), set("0.5/l, 0.5/e"));
        assert_eq!(t_step(&Theory::empty(4), &s1(), &set("k")), set("k"));
        let t2 = theory("l -> e\n# chain\ne -> a\n");
        assert_eq!(least_model(&t2, &id(), &set("l")).unwrap(), set("l, e, a"));
        assert_eq!(Closure::new(&t2, &id()).unwrap().close(&set("l")), set("l, e, a"));
        assert!(!entails(&Theory::empty(4), &fai("k -> l"), &id()).unwrap());
        assert!(entails(&t2, &fai("l -> a"), &id()).unwrap());
    }

    #[test]
    fn empty_theory_degree_is_subsethood() {
        let f = fai("0.75/a, e -> 0.5/a, e");
        assert_eq!(entail_degree(&Theory::empty(4), &f, &s1()).unwrap(), chain().parse_degree("1").unwrap());
        let g = fai("0.5/a, e -> 0.75/a, e");
        assert_eq!(entail_degree(&Theory::empty(4), &g, &s1()).unwrap(), chain().parse_degree("0.5").unwrap());
    }

    #[test]
    fn model_checks() {
        assert!(is_model(&LSet::empty(4), &Theory::empty(4), &id()).unwrap());
        let t = theory("{} -> 0.25/k, 0.25/l, 0.25/a, 0.25/e");
        assert!(!is_model(&LSet::empty(4), &t, &id()).unwrap());
        let bad = AttributeUniverse::new(["k", "l"]).unwrap().parse_lset(&chain(), "k").unwrap();
        assert!(matches!(is_model(&bad, &t, &id()), Err(Error::UniverseMismatch { .. })));
    }

    #[test]
    fn theory_round_trip() {
        let text = "0.5/k, 0.75/e -> 0.75/a, e\n{} -> 0.25/k\n";
        let t = theory(text);
        assert_eq!(t.render(&y(), &chain()), text);
        assert!(Theory::parse(&y(), &chain(), "k => l").is_err());
        assert!(Theory::parse(&y(), &chain(), "0.3/k -> l").is_err());
    }

    #[test]
    fn theory_of_full_space_is_empty() {
        let ch = Arc::new(ResiduatedChain::from_literals(&["0", "1"], Logic::Godel).unwrap());
        let s = Parameterization::identity_only(ch.clone(), 2);
        let all: Vec<LSet> = all_lsets(2, 2).collect();
        assert!(theory_of_system(&all, &s, 100).unwrap().is_empty());
        let bad = vec![LSet::from_indices(&[1, 0]), LSet::from_indices(&[0, 1]), LSet::from_indices(&[1, 1])];
        assert!(matches!(theory_of_system(&bad, &s, 100), Err(Error::NotClosureSystem(_))));
    }
}
