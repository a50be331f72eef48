//! S-proofs: checking, normalization, synthesis and graded provability.
//!
//! Step and rule indices are 0-based in memory. The file format and all
//! diagnostics use 1-based numbering.

mod file;

use std::collections::HashMap;

pub use file::{parse_proof, render_proof};

use crate::error::{Error, Result};
use crate::fset::{check_len, LSet};
use crate::gconn::Parameterization;
use crate::lattice::TruthDegree;
use crate::semantics::{Closure, Fai, Theory};

/// A premise of a cut: an earlier step or an axiom instance written inline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Premise {
    Step(usize),
    Axiom(Fai),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// `X ⇒ Y` with `Y ⊆ X`.
    Axiom,
    /// Member of the theory.
    Hyp(usize),
    /// From `A ⇒ B` and `B ∪ C ⇒ D` infer `A ∪ C ⇒ D`. `C` is recovered
    /// from the formulas when absent.
    Cut { premises: [Premise; 2], c: Option<LSet> },
    /// From `A ⇒ B` infer `f(A) ⇒ f(B)`; `conn` indexes `S`.
    ApplyF { premise: usize, conn: usize },
    /// From `A ⇒ f(B)` and `B ∪ C ⇒ D` infer `A ∪ f(C) ⇒ f(D)`.
    CutF { premises: [Premise; 2], conn: usize, b: LSet, c: LSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub formula: Fai,
    pub by: Justification,
}

impl ProofStep {
    pub fn new(formula: Fai, by: Justification) -> Self {
        ProofStep { formula, by }
    }
}

/// A non-empty sequence of steps whose last formula is the goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    steps: Vec<ProofStep>,
}

impl Proof {
    pub fn new(steps: Vec<ProofStep>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidProof("a proof needs at least one step".into()));
        }
        Ok(Proof { steps })
    }

    pub fn steps(&self) -> &[ProofStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn goal(&self) -> &Fai {
        &self.steps.last().expect("non-empty").formula
    }

    pub fn uses_apply_f(&self) -> bool {
        self.steps.iter().any(|s| matches!(s.by, Justification::ApplyF { .. }))
    }

    pub fn uses_cut_f(&self) -> bool {
        self.steps.iter().any(|s| matches!(s.by, Justification::CutF { .. }))
    }
}

/// Which inference rules a checker accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub allow_cut: bool,
    pub allow_apply_f: bool,
    pub allow_cut_f: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { allow_cut: true, allow_apply_f: true, allow_cut_f: false }
    }
}

impl CheckOptions {
    pub const CUT_ONLY: CheckOptions = CheckOptions { allow_cut: true, allow_apply_f: false, allow_cut_f: false };
    pub const CUT_F_ONLY: CheckOptions = CheckOptions { allow_cut: false, allow_apply_f: false, allow_cut_f: true };

    pub fn with_cut_f(allow: bool) -> Self {
        CheckOptions { allow_cut_f: allow, ..Self::default() }
    }
}

pub fn is_axiom(f: &Fai) -> bool {
    f.consequent.leq(&f.antecedent)
}

/// A `C` with `E = B ∪ C` and `X = A ∪ C`, if one exists.
pub fn solve_cut(a: &LSet, b: &LSet, e: &LSet, x: &LSet) -> Option<LSet> {
    let mut c = LSet::empty(a.len());
    for y in 0..a.len() {
        let (ay, by, ey, xy) = (a.get(y), b.get(y), e.get(y), x.get(y));
        let cy = if by > ey {
            return None;
        } else if by < ey {
            ey
        } else if ay == xy {
            TruthDegree::ZERO
        } else {
            xy
        };
        if ey != by.max(cy) || xy != ay.max(cy) {
            return None;
        }
        c.set(y, cy);
    }
    Some(c)
}

fn invalid(step: usize, reason: impl Into<String>) -> Error {
    Error::InvalidStep { step: step + 1, reason: reason.into() }
}

/// Checks every step and that the proof ends in `goal`.
pub fn check_proof_of(
    theory: &Theory,
    s: &Parameterization,
    proof: &Proof,
    goal: &Fai,
    opts: CheckOptions,
) -> Result<()> {
    check_proof(theory, s, proof, opts)?;
    if proof.goal() != goal {
        return Err(Error::GoalMismatch { expected: goal.to_string(), found: proof.goal().to_string() });
    }
    Ok(())
}

/// Checks every step of `proof`.
pub fn check_proof(theory: &Theory, s: &Parameterization, proof: &Proof, opts: CheckOptions) -> Result<()> {
    let n = s.n_attrs();
    if theory.n_attrs() != n {
        return Err(Error::UniverseMismatch { expected: n, found: theory.n_attrs() });
    }
    let steps = proof.steps();
    for (k, step) in steps.iter().enumerate() {
        let f = &step.formula;
        check_len(n, &f.antecedent).and_then(|_| check_len(n, &f.consequent)).map_err(|e| invalid(k, e.to_string()))?;
        let premise = |p: &Premise| -> Result<Fai> {
            match p {
                Premise::Step(i) if *i < k => Ok(steps[*i].formula.clone()),
                Premise::Step(i) => Err(invalid(k, format!("premise {} does not precede this step", i + 1))),
                Premise::Axiom(a) => {
                    check_len(n, &a.antecedent)
                        .and_then(|_| check_len(n, &a.consequent))
                        .map_err(|e| invalid(k, e.to_string()))?;
                    if is_axiom(a) {
                        Ok(a.clone())
                    } else {
                        Err(invalid(k, "inline premise is not an axiom"))
                    }
                }
            }
        };
        let conn = |j: usize| {
            if j < s.len() {
                Ok(s.get(j))
            } else {
                Err(invalid(k, format!("connection {} is not a member of S", j + 1)))
            }
        };
        match &step.by {
            Justification::Axiom => {
                if !is_axiom(f) {
                    return Err(invalid(k, "not an axiom: consequent is not contained in antecedent"));
                }
            }
            Justification::Hyp(i) => match theory.rules().get(*i) {
                Some(r) if r == f => {}
                Some(_) => return Err(invalid(k, format!("formula differs from hypothesis {}", i + 1))),
                None => return Err(invalid(k, format!("theory has no rule {}", i + 1))),
            },
            Justification::Cut { premises, c } => {
                if !opts.allow_cut {
                    return Err(invalid(k, "cut is not allowed here"));
                }
                let p1 = premise(&premises[0])?;
                let p2 = premise(&premises[1])?;
                if p2.consequent != f.consequent {
                    return Err(invalid(k, "cut conclusion must keep the consequent of the second premise"));
                }
                match c {
                    Some(c) => {
                        check_len(n, c).map_err(|e| invalid(k, e.to_string()))?;
                        if p2.antecedent != p1.consequent.union(c) {
                            return Err(invalid(k, "second premise antecedent is not B ∪ C"));
                        }
                        if f.antecedent != p1.antecedent.union(c) {
                            return Err(invalid(k, "conclusion antecedent is not A ∪ C"));
                        }
                    }
                    None => {
                        if solve_cut(&p1.antecedent, &p1.consequent, &p2.antecedent, &f.antecedent).is_none() {
                            return Err(invalid(k, "no C matches the cut"));
                        }
                    }
                }
            }
            Justification::ApplyF { premise: i, conn: j } => {
                if !opts.allow_apply_f {
                    return Err(invalid(k, "the F-rule is not allowed here"));
                }
                let p = premise(&Premise::Step(*i))?;
                let c = conn(*j)?;
                if c.apply_lower(&p.antecedent) != f.antecedent || c.apply_lower(&p.consequent) != f.consequent {
                    return Err(invalid(k, format!("formula is not the image of step {} under the connection", i + 1)));
                }
            }
            Justification::CutF { premises, conn: j, b, c } => {
                if !opts.allow_cut_f {
                    return Err(invalid(k, "the combined cut/F rule is not allowed here"));
                }
                check_len(n, b).and_then(|_| check_len(n, c)).map_err(|e| invalid(k, e.to_string()))?;
                let p1 = premise(&premises[0])?;
                let p2 = premise(&premises[1])?;
                let g = conn(*j)?;
                if p1.consequent != g.apply_lower(b) {
                    return Err(invalid(k, "first premise consequent is not f(B)"));
                }
                if p2.antecedent != b.union(c) {
                    return Err(invalid(k, "second premise antecedent is not B ∪ C"));
                }
                if f.antecedent != p1.antecedent.union(&g.apply_lower(c))
                    || f.consequent != g.apply_lower(&p2.consequent)
                {
                    return Err(invalid(k, "conclusion is not A ∪ f(C) ⇒ f(D)"));
                }
            }
        }
    }
    Ok(())
}

/// `Σ^S = { f(A) ⇒ f(B) }`, ordered by rule then connection, deduplicated.
pub fn expand_theory(theory: &Theory, s: &Parameterization) -> Result<Theory> {
    let mut seen = std::collections::HashSet::new();
    let mut rules = Vec::new();
    for r in theory.iter() {
        for c in s.iter() {
            let img = Fai::new(c.apply_lower(&r.antecedent), c.apply_lower(&r.consequent));
            if seen.insert(img.clone()) {
                rules.push(img);
            }
        }
    }
    Theory::new(theory.n_attrs(), rules)
}

/// Incrementally built proof with memoized hypothesis steps.
struct Builder {
    steps: Vec<ProofStep>,
    hyps: HashMap<usize, usize>,
    images: HashMap<(usize, usize), usize>,
}

impl Builder {
    fn new() -> Self {
        Builder { steps: Vec::new(), hyps: HashMap::new(), images: HashMap::new() }
    }

    fn push(&mut self, formula: Fai, by: Justification) -> usize {
        self.steps.push(ProofStep::new(formula, by));
        self.steps.len() - 1
    }

    fn hyp(&mut self, theory: &Theory, i: usize) -> usize {
        if let Some(&k) = self.hyps.get(&i) {
            return k;
        }
        let k = self.push(theory.rules()[i].clone(), Justification::Hyp(i));
        self.hyps.insert(i, k);
        k
    }

    /// `f_j(Σ_i)` via a hypothesis step and, unless `f_j` is the identity,
    /// one F-rule step.
    fn hyp_image(&mut self, theory: &Theory, s: &Parameterization, i: usize, j: usize) -> usize {
        let h = self.hyp(theory, i);
        if s.get(j).is_identity() {
            return h;
        }
        if let Some(&k) = self.images.get(&(i, j)) {
            return k;
        }
        let r = &theory.rules()[i];
        let c = s.get(j);
        let f = Fai::new(c.apply_lower(&r.antecedent), c.apply_lower(&r.consequent));
        let k = self.push(f, Justification::ApplyF { premise: h, conn: j });
        self.images.insert((i, j), k);
        k
    }

    fn formula(&self, p: &Premise) -> Fai {
        match p {
            Premise::Step(i) => self.steps[*i].formula.clone(),
            Premise::Axiom(f) => f.clone(),
        }
    }

    fn cut(&mut self, p1: Premise, p2: Premise, c: LSet) -> usize {
        let f1 = self.formula(&p1);
        let f2 = self.formula(&p2);
        let f = Fai::new(f1.antecedent.union(&c), f2.consequent);
        self.push(f, Justification::Cut { premises: [p1, p2], c: Some(c) })
    }

    /// Moves hypothesis and F-rule steps in front of every other step.
    fn finish(self) -> Proof {
        let is_f = |s: &ProofStep| matches!(s.by, Justification::Hyp(_) | Justification::ApplyF { .. });
        let order: Vec<usize> = (0..self.steps.len())
            .filter(|&i| is_f(&self.steps[i]))
            .chain((0..self.steps.len()).filter(|&i| !is_f(&self.steps[i])))
            .collect();
        let mut remap = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let fix = |p: &Premise| match p {
            Premise::Step(i) => Premise::Step(remap[*i]),
            a => a.clone(),
        };
        let goal_step = self.steps.len() - 1;
        let mut steps: Vec<ProofStep> = order
            .iter()
            .map(|&old| {
                let s = &self.steps[old];
                let by = match &s.by {
                    Justification::ApplyF { premise, conn } => {
                        Justification::ApplyF { premise: remap[*premise], conn: *conn }
                    }
                    Justification::Cut { premises, c } => {
                        Justification::Cut { premises: [fix(&premises[0]), fix(&premises[1])], c: c.clone() }
                    }
                    Justification::CutF { premises, conn, b, c } => Justification::CutF {
                        premises: [fix(&premises[0]), fix(&premises[1])],
                        conn: *conn,
                        b: b.clone(),
                        c: c.clone(),
                    },
                    other => other.clone(),
                };
                ProofStep::new(s.formula.clone(), by)
            })
            .collect();
        if remap[goal_step] != steps.len() - 1 {
            let goal = steps[remap[goal_step]].formula.clone();
            let axiom = Fai::new(goal.consequent.clone(), goal.consequent.clone());
            let c = LSet::empty(goal.n_attrs());
            steps.push(ProofStep::new(
                goal,
                Justification::Cut { premises: [Premise::Step(remap[goal_step]), Premise::Axiom(axiom)], c: Some(c) },
            ));
        }
        Proof { steps }
    }
}

/// A proof of `goal` from `theory` in normal form: hypotheses and their
/// images first, then a chain of cuts replaying the least-model trace.
pub fn prove(theory: &Theory, s: &Parameterization, goal: &Fai) -> Result<Proof> {
    s.check_universe(&goal.antecedent)?;
    s.check_universe(&goal.consequent)?;
    let closure = Closure::new(theory, s)?;
    let mut fired = Vec::new();
    let closed = closure.close_traced(&goal.antecedent, |o| fired.push(o));
    if !goal.consequent.leq(&closed) {
        return Err(Error::NotProvable);
    }
    if is_axiom(goal) {
        return Proof::new(vec![ProofStep::new(goal.clone(), Justification::Axiom)]);
    }
    if let Some(i) = theory.rules().iter().position(|r| r == goal) {
        return Proof::new(vec![ProofStep::new(goal.clone(), Justification::Hyp(i))]);
    }
    let mut b = Builder::new();
    let images: Vec<usize> = fired.iter().map(|o| b.hyp_image(theory, s, o.rule, o.conn)).collect();
    let a = goal.antecedent.clone();
    let mut current = b.push(Fai::new(a.clone(), a.clone()), Justification::Axiom);
    let mut m = a;
    for k in images {
        let fb = b.steps[k].formula.consequent.clone();
        let grown = m.union(&fb);
        // f(A) ⇒ f(B) and the axiom f(B) ∪ M ⇒ M ∪ f(B) give M ⇒ M ∪ f(B).
        let lift = b.cut(Premise::Step(k), Premise::Axiom(Fai::new(fb.union(&m), grown.clone())), m.clone());
        debug_assert_eq!(b.steps[lift].formula.antecedent, m);
        current = b.cut(Premise::Step(current), Premise::Step(lift), LSet::empty(m.len()));
        m = grown;
    }
    let n = m.len();
    b.cut(Premise::Step(current), Premise::Axiom(Fai::new(m, goal.consequent.clone())), LSet::empty(n));
    Ok(b.finish())
}

/// Rewrites a checked proof so that F-rule steps apply only to hypotheses
/// and precede every cut. Combined cut/F steps are expanded as well.
pub fn normalize_proof(theory: &Theory, s: &Parameterization, proof: &Proof) -> Result<Proof> {
    check_proof(theory, s, proof, CheckOptions::with_cut_f(true)).map_err(|e| Error::InvalidProof(e.to_string()))?;
    let id = s
        .members()
        .iter()
        .position(|c| c.is_identity())
        .ok_or_else(|| Error::InvalidProof("S has no identity connection".into()))?;
    let mut n = Normalizer { theory, s, proof, b: Builder::new(), memo: HashMap::new() };
    let last = n.image(proof.len() - 1, id)?;
    let mut out = n.b;
    if out.steps.len() - 1 != last {
        let f = out.steps[last].formula.clone();
        let axiom = Fai::new(f.consequent.clone(), f.consequent.clone());
        out.cut(Premise::Step(last), Premise::Axiom(axiom), LSet::empty(f.n_attrs()));
    }
    let normal = out.finish();
    debug_assert_eq!(normal.goal(), proof.goal());
    Ok(normal)
}

struct Normalizer<'a> {
    theory: &'a Theory,
    s: &'a Parameterization,
    proof: &'a Proof,
    b: Builder,
    memo: HashMap<(usize, usize), usize>,
}

impl Normalizer<'_> {
    fn lower(&self, j: usize, f: &Fai) -> Fai {
        let c = self.s.get(j);
        Fai::new(c.apply_lower(&f.antecedent), c.apply_lower(&f.consequent))
    }

    fn compose(&self, outer: usize, inner: usize) -> Result<usize> {
        self.s
            .compose_index(outer, inner)
            .ok_or_else(|| Error::InvalidProof("S is not closed under composition".into()))
    }

    /// Premise for `f_j` applied to a cut premise.
    fn premise(&mut self, p: &Premise, j: usize) -> Result<Premise> {
        Ok(match p {
            Premise::Step(i) => Premise::Step(self.image(*i, j)?),
            Premise::Axiom(f) => Premise::Axiom(self.lower(j, f)),
        })
    }

    /// Step deriving `f_j(φ_k)` in the new proof.
    fn image(&mut self, k: usize, j: usize) -> Result<usize> {
        if let Some(&done) = self.memo.get(&(k, j)) {
            return Ok(done);
        }
        let proof = self.proof;
        let step = &proof.steps()[k];
        let target = self.lower(j, &step.formula);
        let out = match &step.by {
            Justification::Axiom => self.b.push(target, Justification::Axiom),
            Justification::Hyp(i) => self.b.hyp_image(self.theory, self.s, *i, j),
            Justification::ApplyF { premise, conn } => {
                let jj = self.compose(j, *conn)?;
                self.image(*premise, jj)?
            }
            Justification::Cut { premises, c } => {
                let q1 = self.premise(&premises[0], j)?;
                let q2 = self.premise(&premises[1], j)?;
                let c = match c {
                    Some(c) => c.clone(),
                    None => {
                        let f1 = self.formula_of(&premises[0]);
                        let f2 = self.formula_of(&premises[1]);
                        solve_cut(&f1.antecedent, &f1.consequent, &f2.antecedent, &step.formula.antecedent)
                            .ok_or_else(|| Error::InvalidProof(format!("step {}: no C matches the cut", k + 1)))?
                    }
                };
                let fc = self.s.get(j).apply_lower(&c);
                self.push_cut(q1, q2, fc, target)
            }
            Justification::CutF { premises, conn, c, .. } => {
                let q1 = self.premise(&premises[0], j)?;
                let jg = self.compose(j, *conn)?;
                let q2 = self.premise(&premises[1], jg)?;
                let fc = self.s.get(jg).apply_lower(c);
                self.push_cut(q1, q2, fc, target)
            }
        };
        self.memo.insert((k, j), out);
        Ok(out)
    }

    fn formula_of(&self, p: &Premise) -> Fai {
        match p {
            Premise::Step(i) => self.proof.steps()[*i].formula.clone(),
            Premise::Axiom(f) => f.clone(),
        }
    }

    fn push_cut(&mut self, p1: Premise, p2: Premise, c: LSet, target: Fai) -> usize {
        debug_assert_eq!(self.b.formula(&p1).antecedent.union(&c), target.antecedent);
        self.b.push(target, Justification::Cut { premises: [p1, p2], c: Some(c) })
    }
}

/// Rewrites cut and F-rule steps as combined cut/F steps.
pub fn to_cut_f_only(s: &Parameterization, proof: &Proof) -> Result<Proof> {
    let id = s
        .members()
        .iter()
        .position(|c| c.is_identity())
        .ok_or_else(|| Error::InvalidProof("S has no identity connection".into()))?;
    let n = proof.goal().n_attrs();
    let steps = proof.steps();
    let mut out = Vec::with_capacity(steps.len());
    for (k, step) in steps.iter().enumerate() {
        let formula_of = |p: &Premise| match p {
            Premise::Step(i) => steps[*i].formula.clone(),
            Premise::Axiom(f) => f.clone(),
        };
        let by = match &step.by {
            Justification::Cut { premises, c } => {
                let f1 = formula_of(&premises[0]);
                let f2 = formula_of(&premises[1]);
                let c = match c {
                    Some(c) => c.clone(),
                    None => solve_cut(&f1.antecedent, &f1.consequent, &f2.antecedent, &step.formula.antecedent)
                        .ok_or_else(|| Error::InvalidProof(format!("step {}: no C matches the cut", k + 1)))?,
                };
                Justification::CutF { premises: premises.clone(), conn: id, b: f1.consequent, c }
            }
            Justification::ApplyF { premise, conn } => {
                // 0_Y ⇒ f(0_Y) and 0_Y ∪ A ⇒ B give f(A) ⇒ f(B).
                let zero = LSet::empty(n);
                let p = formula_of(&Premise::Step(*premise));
                Justification::CutF {
                    premises: [Premise::Axiom(Fai::new(zero.clone(), zero.clone())), Premise::Step(*premise)],
                    conn: *conn,
                    b: zero,
                    c: p.antecedent,
                }
            }
            other => other.clone(),
        };
        out.push(ProofStep::new(step.formula.clone(), by));
    }
    Proof::new(out)
}

/// Greatest `c` such that `A ⇒ c⊗B` is provable.
pub fn provability_degree(theory: &Theory, s: &Parameterization, fai: &Fai) -> Result<TruthDegree> {
    let chain = s.chain();
    for c in chain.degrees().rev() {
        match prove(theory, s, &fai.scaled(chain, c)) {
            Ok(_) => return Ok(c),
            Err(Error::NotProvable) => continue,
            Err(e) => return Err(e),
        }
    }
    unreachable!("A ⇒ 0_Y is an axiom")
}
