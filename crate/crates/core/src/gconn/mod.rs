//! Isotone Galois connections on `⟨L^Y, ⊆⟩` and finite monoids of them.
//!
//! A lower adjoint preserves unions, so it is fully determined by its images
//! of the non-zero singletons `{a/y}`. That table (the [`Fingerprint`]) is
//! used both for fast evaluation and as the extensional identity of a
//! connection when generating monoids.

mod descriptor;
mod term;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

pub use descriptor::{DegreeLit, Descriptor};
pub use term::Term;

use crate::error::{Error, Result};
use crate::fset::{all_lsets, check_len, space_size, LSet};
use crate::lattice::{Hedge, ResiduatedChain, TruthDegree};

/// Default bound on `|L|^|Y|` for exhaustive adjointness checks.
pub const DEFAULT_VERIFY_CAP: u64 = 1_000_000;
/// Default bound on the size of a generated monoid.
pub const DEFAULT_MONOID_CAP: usize = 4096;

/// Images `f({a/y})` for every attribute `y` and non-zero degree `a`,
/// stored flat as `[y][a-1][z]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint(Vec<TruthDegree>);

impl Fingerprint {
    /// Short stable digest used to cross-check connection references in
    /// proof files.
    pub fn digest(&self) -> String {
        let bytes: Vec<u8> = self.0.iter().map(|d| d.index() as u8).collect();
        let hash = Sha256::digest(&bytes);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone)]
pub struct Connection {
    term: Term,
    chain: Arc<ResiduatedChain>,
    n_attrs: usize,
    fingerprint: Fingerprint,
}

impl fmt::Debug for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Connection({})", self.term)
    }
}

impl PartialEq for Connection {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
    }
}

impl Eq for Connection {}

impl Connection {
    /// Builds a connection from a built-in term. Built-in families are
    /// adjoint by construction, so no exhaustive check runs here.
    pub fn new(term: Term, chain: Arc<ResiduatedChain>, n_attrs: usize) -> Result<Self> {
        term.validate(&chain, n_attrs)?;
        let mut fp = Vec::with_capacity(n_attrs * (chain.len() - 1) * n_attrs);
        for y in 0..n_attrs {
            for a in chain.degrees().skip(1) {
                fp.extend_from_slice(term.lower(&chain, &LSet::singleton(n_attrs, y, a)).degrees());
            }
        }
        Ok(Connection { term, chain, n_attrs, fingerprint: Fingerprint(fp) })
    }

    /// Builds a connection and checks the Galois condition exhaustively.
    pub fn new_verified(term: Term, chain: Arc<ResiduatedChain>, n_attrs: usize, cap: u64) -> Result<Self> {
        let conn = Self::new(term, chain, n_attrs)?;
        conn.verify(cap)?;
        Ok(conn)
    }

    pub fn identity(chain: Arc<ResiduatedChain>, n_attrs: usize) -> Self {
        Self::new(Term::Identity, chain, n_attrs).expect("identity is always valid")
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn chain(&self) -> &Arc<ResiduatedChain> {
        &self.chain
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    fn image(&self, y: usize, a: TruthDegree) -> &[TruthDegree] {
        let stride = self.chain.len() - 1;
        let start = (y * stride + a.index() - 1) * self.n_attrs;
        &self.fingerprint.0[start..start + self.n_attrs]
    }

    /// `f(A)` as the union of singleton images.
    pub fn apply_lower(&self, a: &LSet) -> LSet {
        assert_eq!(a.len(), self.n_attrs, "L-set over a different universe");
        let mut out = vec![TruthDegree::ZERO; self.n_attrs];
        for (y, d) in a.degrees().iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            for (o, i) in out.iter_mut().zip(self.image(y, *d)) {
                *o = (*o).max(*i);
            }
        }
        LSet::from_degrees(out)
    }

    /// `f(A) ⊆ M` without materializing `f(A)`.
    pub fn lower_within(&self, a: &LSet, m: &LSet) -> bool {
        a.degrees()
            .iter()
            .enumerate()
            .all(|(y, d)| d.is_zero() || self.image(y, *d).iter().zip(m.degrees()).all(|(i, b)| i <= b))
    }

    pub fn try_apply_lower(&self, a: &LSet) -> Result<LSet> {
        check_len(self.n_attrs, a)?;
        Ok(self.apply_lower(a))
    }

    /// `g(B)` evaluated from the term's explicit upper adjoint.
    pub fn apply_upper(&self, b: &LSet) -> LSet {
        assert_eq!(b.len(), self.n_attrs, "L-set over a different universe");
        self.term.upper(&self.chain, b)
    }

    pub fn try_apply_upper(&self, b: &LSet) -> Result<LSet> {
        check_len(self.n_attrs, b)?;
        Ok(self.apply_upper(b))
    }

    /// `g(B)(y) = max { a : f({a/y}) ⊆ B }`, computed from the fingerprint.
    pub fn derive_upper(&self, b: &LSet) -> LSet {
        assert_eq!(b.len(), self.n_attrs, "L-set over a different universe");
        let degrees = (0..self.n_attrs)
            .map(|y| {
                let mut best = TruthDegree::ZERO;
                for a in self.chain.degrees().skip(1) {
                    if self.image(y, a).iter().zip(b.degrees()).all(|(i, d)| i <= d) {
                        best = a;
                    } else {
                        break;
                    }
                }
                best
            })
            .collect();
        LSet::from_degrees(degrees)
    }

    /// `self ∘ inner`: lower adjoint `f_self(f_inner(·))`.
    pub fn compose(&self, inner: &Connection) -> Connection {
        assert_eq!(self.n_attrs, inner.n_attrs, "connections over different universes");
        let mut fp = Vec::with_capacity(inner.fingerprint.0.len());
        for chunk in inner.fingerprint.0.chunks(self.n_attrs) {
            fp.extend_from_slice(self.apply_lower(&LSet::from_degrees(chunk.to_vec())).degrees());
        }
        Connection {
            term: self.term.clone().compose(inner.term.clone()),
            chain: self.chain.clone(),
            n_attrs: self.n_attrs,
            fingerprint: Fingerprint(fp),
        }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n_attrs).all(|y| {
            self.chain
                .degrees()
                .skip(1)
                .all(|a| self.image(y, a).iter().enumerate().all(|(z, d)| if z == y { *d == a } else { d.is_zero() }))
        })
    }

    /// Lower adjoint maps everything to `0_Y`.
    pub fn is_vacuous(&self) -> bool {
        self.fingerprint.0.iter().all(|d| d.is_zero())
    }

    /// `f(M) ⊆ M` for every `M`, decided on singletons.
    pub fn is_intensive(&self) -> bool {
        (0..self.n_attrs).all(|y| {
            self.chain
                .degrees()
                .skip(1)
                .all(|a| self.image(y, a).iter().enumerate().all(|(z, d)| if z == y { *d <= a } else { d.is_zero() }))
        })
    }

    /// Exhaustive check of the Galois condition for the term's explicit
    /// lower and upper adjoints.
    pub fn verify(&self, cap: u64) -> Result<()> {
        let chain = self.chain.clone();
        let term = self.term.clone();
        let term2 = self.term.clone();
        verify_adjoint(
            &self.chain,
            self.n_attrs,
            move |a| term.lower(&chain, a),
            {
                let chain = self.chain.clone();
                move |b| term2.upper(&chain, b)
            },
            cap,
        )
    }
}

/// Decides `f(A) ⊆ B ⇔ A ⊆ g(B)` for all `A, B ∈ L^Y`.
///
/// Uses the equivalent characterization: `f` and `g` monotone (checked on
/// covering pairs), `A ⊆ g(f(A))` and `f(g(B)) ⊆ B`.
pub fn verify_adjoint(
    chain: &ResiduatedChain,
    n_attrs: usize,
    lower: impl Fn(&LSet) -> LSet,
    upper: impl Fn(&LSet) -> LSet,
    cap: u64,
) -> Result<()> {
    let size = space_size(n_attrs, chain.len()).filter(|s| *s <= cap);
    if size.is_none() {
        return Err(Error::CapExceeded {
            what: format!("adjointness check over {}^{} L-sets", chain.len(), n_attrs),
            cap,
        });
    }
    for a in all_lsets(n_attrs, chain.len()) {
        let fa = lower(&a);
        let ga = upper(&a);
        if !a.leq(&upper(&fa)) {
            return Err(Error::NotAdjoint(format!("A ⊄ g(f(A)) for A = {a:?}")));
        }
        if !lower(&ga).leq(&a) {
            return Err(Error::NotAdjoint(format!("f(g(B)) ⊄ B for B = {a:?}")));
        }
        for y in 0..n_attrs {
            if a.get(y) == chain.top() {
                continue;
            }
            let mut up = a.clone();
            up.set(y, TruthDegree::from_index(a.get(y).index() + 1));
            if !fa.leq(&lower(&up)) {
                return Err(Error::NotAdjoint(format!("lower adjoint not monotone at {a:?}")));
            }
            if !ga.leq(&upper(&up)) {
                return Err(Error::NotAdjoint(format!("upper adjoint not monotone at {a:?}")));
            }
        }
    }
    Ok(())
}

/// A finite monoid `S` of isotone Galois connections: contains the
/// identity (always at index 0), closed under composition, members
/// pairwise distinct as functions.
#[derive(Debug, Clone)]
pub struct Parameterization {
    chain: Arc<ResiduatedChain>,
    n_attrs: usize,
    members: Vec<Connection>,
    by_fingerprint: HashMap<Fingerprint, usize>,
}

impl Parameterization {
    /// `S = {⟨1, 1⟩}`.
    pub fn identity_only(chain: Arc<ResiduatedChain>, n_attrs: usize) -> Self {
        Self::generate(chain, n_attrs, Vec::new(), 1).expect("trivial monoid")
    }

    /// Least composition-closed set containing the identity and
    /// `generators`, deduplicated by fingerprint.
    pub fn generate(
        chain: Arc<ResiduatedChain>,
        n_attrs: usize,
        generators: Vec<Connection>,
        cap: usize,
    ) -> Result<Self> {
        for g in &generators {
            if g.n_attrs != n_attrs {
                return Err(Error::UniverseMismatch { expected: n_attrs, found: g.n_attrs });
            }
            if *g.chain != *chain {
                return Err(Error::InvalidChain("generator built over a different chain".into()));
            }
        }
        let mut s =
            Parameterization { chain: chain.clone(), n_attrs, members: Vec::new(), by_fingerprint: HashMap::new() };
        s.insert(Connection::identity(chain, n_attrs), cap)?;
        let mut gens: Vec<Connection> = Vec::new();
        for g in generators {
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        for g in &gens {
            s.insert(g.clone(), cap)?;
        }
        let mut next = 0;
        while next < s.members.len() {
            for g in &gens {
                let c = s.members[next].compose(g);
                s.insert(c, cap)?;
            }
            next += 1;
        }
        Ok(s)
    }

    /// `S* = {⟨c*⊗·, c*→·⟩ : c ∈ L}`.
    pub fn from_hedge(chain: Arc<ResiduatedChain>, n_attrs: usize, hedge: &Hedge) -> Result<Self> {
        let generators = chain
            .degrees()
            .map(|c| Connection::new(Term::ConstMult(hedge.apply(c)), chain.clone(), n_attrs))
            .collect::<Result<Vec<_>>>()?;
        Self::generate(chain, n_attrs, generators, usize::MAX)
    }

    fn insert(&mut self, c: Connection, cap: usize) -> Result<bool> {
        if self.by_fingerprint.contains_key(&c.fingerprint) {
            return Ok(false);
        }
        if self.members.len() >= cap {
            return Err(Error::CapExceeded { what: "monoid size".into(), cap: cap as u64 });
        }
        self.by_fingerprint.insert(c.fingerprint.clone(), self.members.len());
        self.members.push(c);
        Ok(true)
    }

    /// Copy without the constant-`0_Y` connection, which never affects
    /// truth of any implication. The result may no longer be closed.
    pub fn without_vacuous(&self) -> Self {
        let members: Vec<Connection> = self.members.iter().filter(|c| !c.is_vacuous()).cloned().collect();
        let by_fingerprint = members.iter().enumerate().map(|(i, c)| (c.fingerprint.clone(), i)).collect();
        Parameterization { chain: self.chain.clone(), n_attrs: self.n_attrs, members, by_fingerprint }
    }

    pub fn chain(&self) -> &ResiduatedChain {
        &self.chain
    }

    pub fn chain_arc(&self) -> &Arc<ResiduatedChain> {
        &self.chain
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Connection] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Connection {
        &self.members[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Connection> {
        self.members.iter()
    }

    pub fn index_of(&self, c: &Connection) -> Option<usize> {
        self.by_fingerprint.get(&c.fingerprint).copied()
    }

    /// Index of `members[outer] ∘ members[inner]`, if it is a member.
    pub fn compose_index(&self, outer: usize, inner: usize) -> Option<usize> {
        self.index_of(&self.members[outer].compose(&self.members[inner]))
    }

    pub fn is_closed(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.compose_index(i, j).is_some()))
    }

    pub fn all_intensive(&self) -> bool {
        self.members.iter().all(Connection::is_intensive)
    }

    pub fn check_universe(&self, set: &LSet) -> Result<()> {
        check_len(self.n_attrs, set)
    }
}
