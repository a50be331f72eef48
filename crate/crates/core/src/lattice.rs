//! Finite residuated chains of truth degrees.
//!
//! A [`ResiduatedChain`] is a strictly increasing list of rationals in `[0, 1]`
//! together with one of the three classic adjoint pairs (Gödel, Łukasiewicz,
//! Goguen). All operations are tabulated at construction, so a
//! [`TruthDegree`] is just an index into the chain and no arithmetic on
//! rationals happens after that point.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Largest chain we accept; degrees are stored as `u8` indices.
pub const MAX_DEGREES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Logic {
    Godel,
    Lukasiewicz,
    Goguen,
}

impl FromStr for Logic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "godel" | "gödel" | "minimum" => Ok(Logic::Godel),
            "lukasiewicz" | "łukasiewicz" => Ok(Logic::Lukasiewicz),
            "goguen" | "product" => Ok(Logic::Goguen),
            other => Err(Error::InvalidChain(format!("unknown logic `{other}`"))),
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Godel => "godel",
            Logic::Lukasiewicz => "lukasiewicz",
            Logic::Goguen => "goguen",
        })
    }
}

/// Position of a degree in its chain. Index order is the lattice order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TruthDegree(pub(crate) u8);

impl TruthDegree {
    pub const ZERO: TruthDegree = TruthDegree(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        debug_assert!(i < MAX_DEGREES);
        TruthDegree(i as u8)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Tabulated addition and difference, adjoint in the sense
/// `a ⊖ b ≤ c  iff  a ≤ b ⊕ c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPair {
    n: usize,
    add: Vec<TruthDegree>,
    diff: Vec<TruthDegree>,
}

impl DualPair {
    pub fn add(&self, a: TruthDegree, b: TruthDegree) -> TruthDegree {
        self.add[a.index() * self.n + b.index()]
    }

    pub fn diff(&self, a: TruthDegree, b: TruthDegree) -> TruthDegree {
        self.diff[a.index() * self.n + b.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduatedChain {
    degrees: Vec<Rational>,
    logic: Logic,
    mul: Vec<TruthDegree>,
    res: Vec<TruthDegree>,
    dual: Option<DualPair>,
}

impl ResiduatedChain {
    /// Builds a chain, checking the degree list and that the selected
    /// operations never leave it.
    pub fn new(degrees: Vec<Rational>, logic: Logic) -> Result<Self> {
        check_degrees(&degrees)?;
        let n = degrees.len();
        let lookup = |r: &Rational| degrees.binary_search(r).ok().map(TruthDegree::from_index);

        let mut mul = Vec::with_capacity(n * n);
        let mut res = Vec::with_capacity(n * n);
        for a in &degrees {
            for b in &degrees {
                let p = raw_tnorm(logic, a, b);
                let r = raw_residuum(logic, a, b);
                mul.push(lookup(&p).ok_or_else(|| Error::ChainNotClosed {
                    op: "t-norm",
                    detail: format!("{} ⊗ {} = {}", fmt_rational(a), fmt_rational(b), fmt_rational(&p)),
                })?);
                res.push(lookup(&r).ok_or_else(|| Error::ChainNotClosed {
                    op: "residuum",
                    detail: format!("{} → {} = {}", fmt_rational(a), fmt_rational(b), fmt_rational(&r)),
                })?);
            }
        }

        let mut chain = ResiduatedChain { degrees, logic, mul, res, dual: None };
        chain.check_adjointness()?;
        chain.dual = chain.build_dual();
        Ok(chain)
    }

    /// Parses decimal (`0.25`) or fractional (`1/4`) degree literals.
    pub fn from_literals<S: AsRef<str>>(degrees: &[S], logic: Logic) -> Result<Self> {
        let parsed = degrees.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(parsed, logic)
    }

    /// `{0, 1/(n-1), ..., 1}`.
    pub fn uniform(n: usize, logic: Logic) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidChain("a chain needs at least two degrees".into()));
        }
        let d = (n - 1) as i64;
        Self::new((0..n as i64).map(|i| Rational::new(i, d)).collect(), logic)
    }

    pub fn logic(&self) -> Logic {
        self.logic
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bottom(&self) -> TruthDegree {
        TruthDegree(0)
    }

    pub fn top(&self) -> TruthDegree {
        TruthDegree::from_index(self.degrees.len() - 1)
    }

    pub fn degrees(&self) -> impl DoubleEndedIterator<Item = TruthDegree> + ExactSizeIterator + Clone {
        (0..self.degrees.len()).map(TruthDegree::from_index)
    }

    pub fn value(&self, d: TruthDegree) -> Rational {
        self.degrees[d.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.degrees
    }

    pub fn find(&self, r: &Rational) -> Option<TruthDegree> {
        self.degrees.binary_search(r).ok().map(TruthDegree::from_index)
    }

    /// Parses a degree literal; values absent from the chain are rejected.
    pub fn parse_degree(&self, s: &str) -> Result<TruthDegree> {
        let r = parse_rational(s)?;
        self.find(&r).ok_or_else(|| Error::NotInChain(s.trim().to_string()))
    }

    pub fn format_degree(&self, d: TruthDegree) -> String {
        fmt_rational(&self.value(d))
    }

    pub fn tnorm(&self, a: TruthDegree, b: TruthDegree) -> TruthDegree {
        self.mul[a.index() * self.len() + b.index()]
    }

    pub fn residuum(&self, a: TruthDegree, b: TruthDegree) -> TruthDegree {
        self.res[a.index() * self.len() + b.index()]
    }

    pub fn meet(&self, a: TruthDegree, b: TruthDegree) -> TruthDegree {
        a.min(b)
    }

    pub fn join(&self, a: TruthDegree, b: TruthDegree) -> TruthDegree {
        a.max(b)
    }

    pub fn is_symmetric(&self) -> bool {
        self.dual.is_some()
    }

    pub fn dual(&self) -> Result<&DualPair> {
        self.dual.as_ref().ok_or_else(|| {
            let missing = self
                .degrees
                .iter()
                .find(|v| self.find(&(Rational::one() - **v)).is_none())
                .map(fmt_rational)
                .unwrap_or_default();
            Error::ChainNotSymmetric(missing)
        })
    }

    pub fn dual_add(&self, a: TruthDegree, b: TruthDegree) -> Result<TruthDegree> {
        Ok(self.dual()?.add(a, b))
    }

    pub fn dual_diff(&self, a: TruthDegree, b: TruthDegree) -> Result<TruthDegree> {
        Ok(self.dual()?.diff(a, b))
    }

    fn check_adjointness(&self) -> Result<()> {
        for a in self.degrees() {
            for b in self.degrees() {
                for c in self.degrees() {
                    if (self.tnorm(a, b) <= c) != (a <= self.residuum(b, c)) {
                        return Err(Error::InvalidChain(format!(
                            "adjointness fails at ({}, {}, {})",
                            self.format_degree(a),
                            self.format_degree(b),
                            self.format_degree(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn build_dual(&self) -> Option<DualPair> {
        let n = self.len();
        let mirror: Vec<TruthDegree> =
            self.degrees.iter().map(|v| self.find(&(Rational::one() - *v))).collect::<Option<_>>()?;
        let m = |d: TruthDegree| mirror[d.index()];
        let mut add = Vec::with_capacity(n * n);
        let mut diff = Vec::with_capacity(n * n);
        for a in self.degrees() {
            for b in self.degrees() {
                add.push(m(self.tnorm(m(a), m(b))));
                diff.push(m(self.residuum(m(b), m(a))));
            }
        }
        Some(DualPair { n, add, diff })
    }
}

/// Checks that `logic`'s operations map `degrees × degrees` into `degrees`.
pub fn validate_chain(degrees: &[Rational], logic: Logic) -> Result<()> {
    ResiduatedChain::new(degrees.to_vec(), logic).map(|_| ())
}

fn check_degrees(degrees: &[Rational]) -> Result<()> {
    if degrees.len() < 2 {
        return Err(Error::InvalidChain("a chain needs at least two degrees".into()));
    }
    if degrees.len() > MAX_DEGREES {
        return Err(Error::InvalidChain(format!("at most {MAX_DEGREES} degrees are supported")));
    }
    if !degrees[0].is_zero() || !degrees[degrees.len() - 1].is_one() {
        return Err(Error::InvalidChain("degrees must start at 0 and end at 1".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidChain("degrees must be strictly increasing".into()));
    }
    Ok(())
}

fn raw_tnorm(logic: Logic, a: &Rational, b: &Rational) -> Rational {
    match logic {
        Logic::Godel => *a.min(b),
        Logic::Lukasiewicz => (a + b - Rational::one()).max(Rational::zero()),
        Logic::Goguen => a * b,
    }
}

fn raw_residuum(logic: Logic, a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        return Rational::one();
    }
    match logic {
        Logic::Godel => *b,
        Logic::Lukasiewicz => (Rational::one() - a + b).min(Rational::one()),
        Logic::Goguen => b / a,
    }
}

/// Idempotent truth-stressing hedge given by its fixed points:
/// `a* = max { b ∈ F : b ≤ a }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hedge {
    fixed: Vec<bool>,
    table: Vec<TruthDegree>,
}

impl Hedge {
    pub fn new(chain: &ResiduatedChain, fixed_points: &[TruthDegree]) -> Result<Self> {
        let mut fixed = vec![false; chain.len()];
        for d in fixed_points {
            if d.index() >= chain.len() {
                return Err(Error::InvalidHedge(format!("degree index {} outside the chain", d.index())));
            }
            fixed[d.index()] = true;
        }
        if !fixed[chain.top().index()] {
            return Err(Error::InvalidHedge("1 must be a fixed point".into()));
        }
        if !fixed[0] {
            return Err(Error::InvalidHedge("0 must be a fixed point (a* ≤ a forces 0* = 0)".into()));
        }
        let mut table = Vec::with_capacity(chain.len());
        let mut last = TruthDegree(0);
        for d in chain.degrees() {
            if fixed[d.index()] {
                last = d;
            }
            table.push(last);
        }
        let hedge = Hedge { fixed, table };
        hedge.check_laws(chain)?;
        Ok(hedge)
    }

    pub fn from_values(chain: &ResiduatedChain, values: &[Rational]) -> Result<Self> {
        let fixed = values
            .iter()
            .map(|v| chain.find(v).ok_or_else(|| Error::NotInChain(fmt_rational(v))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(chain, &fixed)
    }

    pub fn identity(chain: &ResiduatedChain) -> Self {
        let all: Vec<_> = chain.degrees().collect();
        Self::new(chain, &all).expect("identity is always a hedge")
    }

    pub fn globalization(chain: &ResiduatedChain) -> Self {
        Self::new(chain, &[chain.bottom(), chain.top()]).expect("globalization is always a hedge")
    }

    pub fn apply(&self, a: TruthDegree) -> TruthDegree {
        self.table[a.index()]
    }

    pub fn is_fixed(&self, a: TruthDegree) -> bool {
        self.fixed[a.index()]
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = TruthDegree> + '_ {
        self.fixed.iter().enumerate().filter(|(_, f)| **f).map(|(i, _)| TruthDegree::from_index(i))
    }

    fn check_laws(&self, chain: &ResiduatedChain) -> Result<()> {
        let h = |a| self.apply(a);
        if h(chain.top()) != chain.top() {
            return Err(Error::InvalidHedge("1* ≠ 1".into()));
        }
        for a in chain.degrees() {
            if h(a) > a {
                return Err(Error::InvalidHedge(format!("{0}* > {0}", chain.format_degree(a))));
            }
            if h(h(a)) != h(a) {
                return Err(Error::InvalidHedge(format!("{0}** ≠ {0}*", chain.format_degree(a))));
            }
            for b in chain.degrees() {
                if h(chain.residuum(a, b)) > chain.residuum(h(a), h(b)) {
                    return Err(Error::InvalidHedge(format!(
                        "({0} → {1})* > {0}* → {1}*",
                        chain.format_degree(a),
                        chain.format_degree(b)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parses `0.25`, `1`, `.5`, `2.5e-1` or `1/4` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid degree `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = Rational::from_integer(10);
    let mut r = Rational::from_integer(num);
    if scale >= 0 {
        for _ in 0..scale {
            r *= ten;
        }
    } else {
        for _ in 0..(-scale) {
            r /= ten;
        }
    }
    Ok(if neg { -r } else { r })
}

/// Terminating decimals print as decimals (`0.25`), everything else as `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    let mut den = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    if places == 0 {
        return r.numer().to_string();
    }
    let scaled = r * Rational::from_integer(10i64.pow(places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - places as usize);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{int}.{frac}")
}
