use std::fmt;

use crate::error::{Error, Result};
use crate::fset::{check_len, LSet};
use crate::lattice::{ResiduatedChain, TruthDegree};

/// Symbolic description of an isotone Galois connection `⟨f, g⟩`.
///
/// `Compose(t1, t2)` is `⟨f1 f2, g2 g1⟩`: the lower adjoint applies `t2`
/// first, the upper adjoint applies `t1` first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Identity,
    /// `⟨c ⊗ ·, c → ·⟩`
    ConstMult(TruthDegree),
    /// `⟨C ⊗ ·, C → ·⟩` componentwise.
    ConstMultSet(LSet),
    /// `⟨· ⊖ C, C ⊕ ·⟩` componentwise; needs a symmetric chain.
    DiffSet(LSet),
    /// `(f A)(y) = A((y + i) mod n)`, `(g B)(y) = B((y - i) mod n)`.
    Rotate(usize),
    Compose(Box<Term>, Box<Term>),
}

impl Term {
    pub fn compose(self, inner: Term) -> Term {
        Term::Compose(Box::new(self), Box::new(inner))
    }

    pub(crate) fn validate(&self, chain: &ResiduatedChain, n: usize) -> Result<()> {
        match self {
            Term::Identity | Term::Rotate(_) => Ok(()),
            Term::ConstMult(c) => {
                if c.index() < chain.len() {
                    Ok(())
                } else {
                    Err(Error::NotInChain(format!("degree index {}", c.index())))
                }
            }
            Term::ConstMultSet(c) => check_len(n, c),
            Term::DiffSet(c) => {
                chain.dual()?;
                check_len(n, c)
            }
            Term::Compose(a, b) => {
                a.validate(chain, n)?;
                b.validate(chain, n)
            }
        }
    }

    /// Evaluates the lower adjoint directly from the term.
    pub fn lower(&self, chain: &ResiduatedChain, a: &LSet) -> LSet {
        match self {
            Term::Identity => a.clone(),
            Term::ConstMult(c) => a.c_mult(chain, *c),
            Term::ConstMultSet(c) => c.tensor(chain, a),
            Term::DiffSet(c) => {
                let dual = chain.dual().expect("validated: symmetric chain");
                a.zip_with(c, |x, y| dual.diff(x, y))
            }
            Term::Rotate(i) => {
                let n = a.len();
                LSet::from_degrees((0..n).map(|y| a.get((y + i) % n)).collect())
            }
            Term::Compose(outer, inner) => outer.lower(chain, &inner.lower(chain, a)),
        }
    }

    /// Evaluates the explicit upper adjoint from the term.
    pub fn upper(&self, chain: &ResiduatedChain, b: &LSet) -> LSet {
        match self {
            Term::Identity => b.clone(),
            Term::ConstMult(c) => b.c_shift(chain, *c),
            Term::ConstMultSet(c) => c.residuate(chain, b),
            Term::DiffSet(c) => {
                let dual = chain.dual().expect("validated: symmetric chain");
                c.zip_with(b, |x, y| dual.add(x, y))
            }
            Term::Rotate(i) => {
                let n = b.len();
                let i = i % n;
                LSet::from_degrees((0..n).map(|y| b.get((y + n - i) % n)).collect())
            }
            Term::Compose(outer, inner) => inner.upper(chain, &outer.upper(chain, b)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Identity => write!(f, "id"),
            Term::ConstMult(c) => write!(f, "mult[{}]", c.index()),
            Term::ConstMultSet(c) => write!(f, "mult{c:?}"),
            Term::DiffSet(c) => write!(f, "diff{c:?}"),
            Term::Rotate(i) => write!(f, "rot[{i}]"),
            Term::Compose(a, b) => write!(f, "{a}∘{b}"),
        }
    }
}
