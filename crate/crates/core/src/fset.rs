//! Fuzzy sets (L-sets) over a fixed, ordered attribute universe.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{ResiduatedChain, TruthDegree};

/// Ordered list of attribute names. The order drives lectic enumeration
/// and rotation indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeUniverse {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl AttributeUniverse {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidUniverse("the attribute universe must be non-empty".into()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains([',', '/', '{', '}']) || n.trim() != n || n.contains("->") {
                return Err(Error::InvalidUniverse(format!("invalid attribute name `{n}`")));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidUniverse(format!("duplicate attribute `{n}`")));
            }
        }
        Ok(AttributeUniverse { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, y: usize) -> &str {
        &self.names[y]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Parses `0.75/a, e` style literals. An empty literal, `{}` or `0_Y`
    /// denotes the empty set; surrounding braces are optional.
    pub fn parse_lset(&self, chain: &ResiduatedChain, text: &str) -> Result<LSet> {
        let mut s = text.trim();
        if let Some(inner) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            s = inner.trim();
        }
        let mut set = LSet::empty(self.len());
        if s.is_empty() || s == "0_Y" {
            return Ok(set);
        }
        let mut seen = vec![false; self.len()];
        for item in s.split(',') {
            let item = item.trim();
            let (degree, name) = match item.rsplit_once('/') {
                Some((d, n)) => (chain.parse_degree(d)?, n.trim()),
                None => (chain.top(), item),
            };
            let y =
                self.position(name).ok_or_else(|| Error::Parse(format!("unknown attribute `{name}` in `{text}`")))?;
            if std::mem::replace(&mut seen[y], true) {
                return Err(Error::Parse(format!("attribute `{name}` listed twice in `{text}`")));
            }
            set.degrees[y] = degree;
        }
        Ok(set)
    }

    /// Renders without zero entries; degree 1 prints as the bare name.
    pub fn render(&self, chain: &ResiduatedChain, set: &LSet) -> String {
        let items: Vec<String> = set
            .degrees
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(y, d)| {
                if *d == chain.top() {
                    self.names[y].clone()
                } else {
                    format!("{}/{}", chain.format_degree(*d), self.names[y])
                }
            })
            .collect();
        if items.is_empty() {
            "{}".to_string()
        } else {
            items.join(", ")
        }
    }

    pub fn check(&self, set: &LSet) -> Result<()> {
        check_len(self.len(), set)
    }
}

pub(crate) fn check_len(expected: usize, set: &LSet) -> Result<()> {
    if set.len() == expected {
        Ok(())
    } else {
        Err(Error::UniverseMismatch { expected, found: set.len() })
    }
}

/// A total map from attribute positions to degrees.
///
/// Binary operations expect both operands to live over the same universe
/// and panic otherwise; public entry points in the other modules validate
/// sizes and report [`Error::UniverseMismatch`] before getting here.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LSet {
    degrees: Vec<TruthDegree>,
}

impl fmt::Debug for LSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LSet{:?}", self.degrees.iter().map(|d| d.index()).collect::<Vec<_>>())
    }
}

impl LSet {
    pub fn empty(n: usize) -> Self {
        LSet { degrees: vec![TruthDegree::ZERO; n] }
    }

    pub fn constant(n: usize, c: TruthDegree) -> Self {
        LSet { degrees: vec![c; n] }
    }

    pub fn singleton(n: usize, y: usize, a: TruthDegree) -> Self {
        let mut s = Self::empty(n);
        s.degrees[y] = a;
        s
    }

    pub fn from_degrees(degrees: Vec<TruthDegree>) -> Self {
        LSet { degrees }
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        LSet { degrees: indices.iter().map(|&i| TruthDegree::from_index(i)).collect() }
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[TruthDegree] {
        &self.degrees
    }

    pub fn get(&self, y: usize) -> TruthDegree {
        self.degrees[y]
    }

    pub fn set(&mut self, y: usize, a: TruthDegree) {
        self.degrees[y] = a;
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(|d| d.is_zero())
    }

    /// Sum of degree indices; strictly increases along `⊂`.
    pub fn rank(&self) -> usize {
        self.degrees.iter().map(|d| d.index()).sum()
    }

    /// Full containment `A ⊆ B`.
    pub fn leq(&self, other: &LSet) -> bool {
        assert_eq!(self.len(), other.len(), "L-sets over different universes");
        self.degrees.iter().zip(&other.degrees).all(|(a, b)| a <= b)
    }

    /// Strict containment `A ⊂ B`.
    pub fn proper_subset_of(&self, other: &LSet) -> bool {
        self != other && self.leq(other)
    }

    pub fn union(&self, other: &LSet) -> LSet {
        self.zip_with(other, |a, b| a.max(b))
    }

    pub fn intersection(&self, other: &LSet) -> LSet {
        self.zip_with(other, |a, b| a.min(b))
    }

    pub fn union_with(&mut self, other: &LSet) {
        assert_eq!(self.len(), other.len(), "L-sets over different universes");
        for (a, b) in self.degrees.iter_mut().zip(&other.degrees) {
            *a = (*a).max(*b);
        }
    }

    pub fn intersect_with(&mut self, other: &LSet) {
        assert_eq!(self.len(), other.len(), "L-sets over different universes");
        for (a, b) in self.degrees.iter_mut().zip(&other.degrees) {
            *a = (*a).min(*b);
        }
    }

    /// Subsethood degree `S(A, B) = ⋀_y A(y) → B(y)`.
    pub fn subsethood(&self, chain: &ResiduatedChain, other: &LSet) -> TruthDegree {
        assert_eq!(self.len(), other.len(), "L-sets over different universes");
        self.degrees
            .iter()
            .zip(&other.degrees)
            .map(|(a, b)| chain.residuum(*a, *b))
            .min()
            .unwrap_or_else(|| chain.top())
    }

    /// Componentwise `A ⊗ B`.
    pub fn tensor(&self, chain: &ResiduatedChain, other: &LSet) -> LSet {
        self.zip_with(other, |a, b| chain.tnorm(a, b))
    }

    /// Componentwise `A → B`.
    pub fn residuate(&self, chain: &ResiduatedChain, other: &LSet) -> LSet {
        self.zip_with(other, |a, b| chain.residuum(a, b))
    }

    /// The c-multiple `c ⊗ A`.
    pub fn c_mult(&self, chain: &ResiduatedChain, c: TruthDegree) -> LSet {
        self.map(|a| chain.tnorm(c, a))
    }

    /// The c-shift `c → A`.
    pub fn c_shift(&self, chain: &ResiduatedChain, c: TruthDegree) -> LSet {
        self.map(|a| chain.residuum(c, a))
    }

    pub fn map(&self, f: impl Fn(TruthDegree) -> TruthDegree) -> LSet {
        LSet { degrees: self.degrees.iter().map(|d| f(*d)).collect() }
    }

    pub fn zip_with(&self, other: &LSet, f: impl Fn(TruthDegree, TruthDegree) -> TruthDegree) -> LSet {
        assert_eq!(self.len(), other.len(), "L-sets over different universes");
        LSet { degrees: self.degrees.iter().zip(&other.degrees).map(|(a, b)| f(*a, *b)).collect() }
    }

    /// Non-zero singletons `{A(y)/y}`; their union is `A`.
    pub fn singletons(&self) -> impl Iterator<Item = LSet> + '_ {
        let n = self.len();
        self.degrees.iter().enumerate().filter(|(_, d)| !d.is_zero()).map(move |(y, d)| LSet::singleton(n, y, *d))
    }

    /// Lectic comparison: lexicographic on degree indices, first attribute
    /// most significant.
    pub fn lectic_cmp(&self, other: &LSet) -> std::cmp::Ordering {
        self.degrees.cmp(&other.degrees)
    }
}

/// `|L|^|Y|`, or `None` on overflow.
pub fn space_size(n_attrs: usize, n_degrees: usize) -> Option<u64> {
    (n_degrees as u64).checked_pow(n_attrs.try_into().ok()?)
}

/// Every L-set over `n_attrs` attributes, in ascending lectic order.
pub fn all_lsets(n_attrs: usize, n_degrees: usize) -> LecticIter {
    LecticIter { next: Some(vec![TruthDegree::ZERO; n_attrs]), n_degrees }
}

pub struct LecticIter {
    next: Option<Vec<TruthDegree>>,
    n_degrees: usize,
}

impl Iterator for LecticIter {
    type Item = LSet;

    fn next(&mut self) -> Option<LSet> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let top = self.n_degrees - 1;
        for i in (0..succ.len()).rev() {
            if succ[i].index() < top {
                succ[i] = TruthDegree::from_index(succ[i].index() + 1);
                self.next = Some(succ);
                break;
            }
            succ[i] = TruthDegree::ZERO;
        }
        Some(LSet { degrees: current })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Logic;

    fn setup() -> (ResiduatedChain, AttributeUniverse) {
        (
            ResiduatedChain::from_literals(&["0", "0.25", "0.5", "0.75", "1"], Logic::Godel).unwrap(),
            AttributeUniverse::new(["k", "l", "a", "e"]).unwrap(),
        )
    }

    #[test]
    fn parse_and_render() {
        let (c, u) = setup();
        let s = u.parse_lset(&c, "0.75/a, e").unwrap();
        assert_eq!(s, LSet::from_indices(&[0, 0, 3, 4]));
        assert_eq!(u.render(&c, &s), "0.75/a, e");
        assert_eq!(u.render(&c, &LSet::empty(4)), "{}");
        assert_eq!(u.parse_lset(&c, "{}").unwrap(), LSet::empty(4));
        assert_eq!(u.parse_lset(&c, "{k, 0.25/l}").unwrap(), LSet::from_indices(&[4, 1, 0, 0]));
    }

    #[test]
    fn parse_rejects_bad_literals() {
        let (c, u) = setup();
        assert!(matches!(u.parse_lset(&c, "0.3/k"), Err(Error::NotInChain(_))));
        assert!(u.parse_lset(&c, "z").is_err());
        assert!(u.parse_lset(&c, "k, 0.5/k").is_err());
    }

    #[test]
    fn universe_validation() {
        assert!(AttributeUniverse::new(Vec::<String>::new()).is_err());
        assert!(AttributeUniverse::new(["a", "a"]).is_err());
        assert!(AttributeUniverse::new(["a/b"]).is_err());
    }

    #[test]
    fn containment() {
        let (c, u) = setup();
        let p = |s| u.parse_lset(&c, s).unwrap();
        let a = p("0.5/k, 0.25/a");
        assert!(a.leq(&a));
        assert!(p("0.5/k").leq(&p("0.75/k, 0.25/l")));
        assert!(!a.leq(&p("0.5/k")));
    }

    #[test]
    fn subsethood_examples() {
        let (c, u) = setup();
        let p = |s| u.parse_lset(&c, s).unwrap();
        let a = p("0.75/a, e");
        assert_eq!(a.subsethood(&c, &a), c.top());
        assert_eq!(a.subsethood(&c, &p("0.5/a, e")), c.parse_degree("0.5").unwrap());
        assert_eq!(LSet::empty(4).subsethood(&c, &a), c.top());
    }

    #[test]
    fn union_and_intersection() {
        let (c, u) = setup();
        let p = |s| u.parse_lset(&c, s).unwrap();
        let a = p("0.5/k, 0.75/a");
        assert_eq!(a.union(&LSet::empty(4)), a);
        assert_eq!(p("0.5/k").union(&p("0.25/k, l")), p("0.5/k, l"));
        assert_eq!(a.intersection(&p("0.25/k, a")), p("0.25/k, 0.75/a"));
    }

    #[test]
    fn multiples_and_shifts() {
        let (c, u) = setup();
        let p = |s| u.parse_lset(&c, s).unwrap();
        let half = c.parse_degree("0.5").unwrap();
        assert_eq!(p("k, 0.75/a").c_mult(&c, half), p("0.5/k, 0.5/a"));
        let a = p("k, 0.75/a");
        assert_eq!(a.c_mult(&c, c.top()), a);
        assert_eq!(p("0.25/k").c_shift(&c, half), p("0.25/k"));
    }

    #[test]
    fn lectic_iteration_is_exhaustive_and_sorted() {
        let all: Vec<_> = all_lsets(3, 3).collect();
        assert_eq!(all.len(), 27);
        assert!(all.windows(2).all(|w| w[0].lectic_cmp(&w[1]).is_lt()));
        assert_eq!(space_size(4, 5), Some(625));
    }
}
