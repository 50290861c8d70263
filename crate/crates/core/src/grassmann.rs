//! Exact arithmetic in a truncated Grassmann algebra Λ(G) over ℚ.
//!
//! An element is a sparse map from generator bitmasks to nonzero rationals.
//! Bit `k-1` of a mask stands for the generator `e_k`; a mask therefore
//! encodes the ordered monomial `e_{i1} e_{i2} ⋯` with `i1 < i2 < ⋯`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

/// Generator budget used when nothing else is specified.
pub const DEFAULT_BUDGET: u8 = 8;
pub const MAX_BUDGET: u8 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrassmannError {
    #[error("generator budget mismatch: {0} vs {1}")]
    BudgetMismatch(u8, u8),
    #[error("generator budget {0} outside 1..=64")]
    BadBudget(u32),
    #[error("element has zero body and is not invertible")]
    NoBody,
    #[error("generator e{0} exceeds budget {1}")]
    GeneratorOutOfRange(u32, u8),
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational, GrassmannError> {
    let s = s.trim();
    let bad = || GrassmannError::Parse(format!("bad rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Parity of the number of transpositions needed to sort the concatenation
/// of the generator lists of `a` and then `b` (disjoint masks).
#[inline]
pub fn merge_sign(a: u64, b: u64) -> bool {
    let mut parity = 0u32;
    let mut bits = a;
    while bits != 0 {
        let i = bits.trailing_zeros();
        parity ^= (b & ((1u64 << i) - 1)).count_ones() & 1;
        bits &= bits - 1;
    }
    parity == 1
}

fn budget_mask(budget: u8) -> u64 {
    if budget >= 64 {
        u64::MAX
    } else {
        (1u64 << budget) - 1
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grassmann {
    budget: u8,
    terms: BTreeMap<u64, Rational>,
}

impl Grassmann {
    pub fn zero(budget: u8) -> Self {
        assert!((1..=MAX_BUDGET).contains(&budget), "budget {budget} outside 1..=64");
        Grassmann { budget, terms: BTreeMap::new() }
    }

    pub fn one(budget: u8) -> Self {
        Self::scalar(budget, Rational::one())
    }

    pub fn scalar(budget: u8, q: Rational) -> Self {
        let mut g = Self::zero(budget);
        if !q.is_zero() {
            g.terms.insert(0, q);
        }
        g
    }

    pub fn from_int(budget: u8, n: i64) -> Self {
        Self::scalar(budget, rat(n))
    }

    /// The generator `e_k` (1-based).
    pub fn generator(budget: u8, k: u32) -> Result<Self, GrassmannError> {
        Self::monomial(budget, &[k], Rational::one())
    }

    /// `coef · e_{k1} e_{k2} ⋯` for generators in the given order.
    pub fn monomial(budget: u8, gens: &[u32], coef: Rational) -> Result<Self, GrassmannError> {
        let mut mask = 0u64;
        let mut sign = false;
        for &k in gens {
            if k == 0 || k > budget as u32 {
                return Err(GrassmannError::GeneratorOutOfRange(k, budget));
            }
            let bit = 1u64 << (k - 1);
            if mask & bit != 0 {
                return Ok(Self::zero(budget));
            }
            sign ^= merge_sign(mask, bit);
            mask |= bit;
        }
        Ok(Self::from_terms(budget, [(mask, if sign { -coef } else { coef })]))
    }

    /// Builds an element from raw `(mask, coef)` pairs, summing repeats.
    ///
    /// Panics if a mask uses a generator beyond the budget.
    pub fn from_terms(budget: u8, terms: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut g = Self::zero(budget);
        let allowed = budget_mask(budget);
        for (mask, c) in terms {
            assert!(mask & !allowed == 0, "mask {mask:#x} exceeds budget {budget}");
            g.add_term(mask, c);
        }
        g
    }

    fn add_term(&mut self, mask: u64, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn budget(&self) -> u8 {
        self.budget
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Coefficient of the empty monomial (projection Λ → ℚ).
    pub fn body(&self) -> Rational {
        self.terms.get(&0).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, mask: u64) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    /// The nilpotent part `a - body(a)`.
    pub fn soul(&self) -> Self {
        let mut s = self.clone();
        s.terms.remove(&0);
        s
    }

    pub fn is_body_only(&self) -> bool {
        self.terms.keys().all(|&m| m == 0)
    }

    /// Largest Z-degree present (None for zero).
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.count_ones()).max()
    }

    /// Highest generator index used (0 if none).
    pub fn max_generator(&self) -> u32 {
        self.terms.keys().fold(0u64, |acc, m| acc | m).checked_ilog2().map_or(0, |b| b + 1)
    }

    pub fn z2_split(&self) -> (Self, Self) {
        let mut even = Self::zero(self.budget);
        let mut odd = Self::zero(self.budget);
        for (&m, c) in &self.terms {
            let target = if m.count_ones() % 2 == 0 { &mut even } else { &mut odd };
            target.terms.insert(m, c.clone());
        }
        (even, odd)
    }

    pub fn even_part(&self) -> Self {
        self.z2_split().0
    }

    pub fn odd_part(&self) -> Self {
        self.z2_split().1
    }

    /// `Some(p)` if the element is homogeneous of Z₂-degree `p`; zero counts
    /// as homogeneous of degree 0.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| (m.count_ones() % 2) as u8);
        let first = match it.next() {
            Some(p) => p,
            None => return Some(0),
        };
        it.all(|p| p == first).then_some(first)
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 1)
    }

    /// The grade involution `x₀ + x₁ ↦ x₀ − x₁`, applied when `flip` is set.
    /// This is the effect of moving the element past an object of odd parity.
    pub fn twist(&self, flip: bool) -> Self {
        if !flip {
            return self.clone();
        }
        let mut r = self.clone();
        for (m, c) in r.terms.iter_mut() {
            if m.count_ones() % 2 == 1 {
                *c = -c.clone();
            }
        }
        r
    }

    /// Re-embeds into Λ(budget). Fails if a used generator would fall off.
    pub fn with_budget(&self, budget: u8) -> Result<Self, GrassmannError> {
        if !(1..=MAX_BUDGET).contains(&budget) {
            return Err(GrassmannError::BadBudget(budget as u32));
        }
        let top = self.max_generator();
        if top > budget as u32 {
            return Err(GrassmannError::GeneratorOutOfRange(top, budget));
        }
        Ok(Grassmann { budget, terms: self.terms.clone() })
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.budget);
        }
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c *= q;
        }
        r
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GrassmannError> {
        if self.budget != other.budget {
            return Err(GrassmannError::BudgetMismatch(self.budget, other.budget));
        }
        let mut r = self.clone();
        for (&m, c) in &other.terms {
            r.add_term(m, c.clone());
        }
        Ok(r)
    }

    pub fn gmul(&self, other: &Self) -> Result<Self, GrassmannError> {
        if self.budget != other.budget {
            return Err(GrassmannError::BudgetMismatch(self.budget, other.budget));
        }
        let mut r = Self::zero(self.budget);
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca * cb;
                r.add_term(ma | mb, if merge_sign(ma, mb) { -c } else { c });
            }
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.budget);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Two-sided inverse via the terminating series `b⁻¹ Σ (−n b⁻¹)^k`.
    pub fn ginv(&self) -> Result<Self, GrassmannError> {
        let b = self.body();
        if b.is_zero() {
            return Err(GrassmannError::NoBody);
        }
        let binv = b.recip();
        let step = self.soul().scale(&-binv.clone());
        let mut acc = Self::one(self.budget);
        let mut power = Self::one(self.budget);
        loop {
            power = &power * &step;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&binv))
    }

    /// Random element of the requested parity (`None` = inhomogeneous).
    ///
    /// The body is a small integer when the parity allows one; the
    /// nilpotent part has `extra` monomials of Z-degree in `1..=degree_cap`.
    pub fn random<R: Rng + ?Sized>(
        budget: u8,
        degree_cap: u32,
        parity: Option<u8>,
        extra: usize,
        rng: &mut R,
    ) -> Self {
        let mut g = Self::zero(budget);
        if parity != Some(1) {
            g.add_term(0, rat(rng.gen_range(-3..=3)));
        }
        let cap = degree_cap.min(budget as u32);
        let degrees: Vec<u32> = (1..=cap)
            .filter(|d| parity.is_none_or(|p| d % 2 == p as u32))
            .collect();
        if degrees.is_empty() {
            return g;
        }
        for _ in 0..extra {
            let d = degrees[rng.gen_range(0..degrees.len())];
            let mut mask = 0u64;
            while mask.count_ones() < d {
                mask |= 1u64 << rng.gen_range(0..budget as u32);
            }
            let mut num = 0i64;
            while num == 0 {
                num = rng.gen_range(-3..=3);
            }
            let den = rng.gen_range(1..=2);
            g.add_term(mask, Rational::new(BigInt::from(num), BigInt::from(den)));
        }
        g
    }

    /// Parses the textual form, e.g. `3 + 2*e1*e2 - 1/2*e1*e3*e4`.
    pub fn parse(budget: u8, text: &str) -> Result<Self, GrassmannError> {
        if !(1..=MAX_BUDGET).contains(&budget) {
            return Err(GrassmannError::BadBudget(budget as u32));
        }
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(GrassmannError::Parse("empty input".into()));
        }
        let mut result = Self::zero(budget);
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let negative = match rest.as_bytes()[0] {
                b'+' => {
                    rest = &rest[1..];
                    false
                }
                b'-' => {
                    rest = &rest[1..];
                    true
                }
                _ if first => false,
                _ => return Err(GrassmannError::Parse(format!("expected sign at `{rest}`"))),
            };
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            if term.is_empty() {
                return Err(GrassmannError::Parse("empty term".into()));
            }
            let mut coef = Rational::one();
            let mut gens = Vec::new();
            for (i, factor) in term.split('*').enumerate() {
                if let Some(idx) = factor.strip_prefix('e') {
                    let k: u32 = idx
                        .parse()
                        .map_err(|_| GrassmannError::Parse(format!("bad generator `{factor}`")))?;
                    gens.push(k);
                } else if i == 0 {
                    coef = parse_rational(factor)?;
                } else {
                    return Err(GrassmannError::Parse(format!("unexpected factor `{factor}`")));
                }
            }
            if negative {
                coef = -coef;
            }
            let t = Self::monomial(budget, &gens, coef)?;
            result = &result + &t;
        }
        Ok(result)
    }

    pub fn to_json(&self) -> GrassmannJson {
        GrassmannJson {
            budget: self.budget as u32,
            terms: self
                .terms
                .iter()
                .map(|(&m, c)| TermJson { mask: mask_generators(m), coef: c.to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &GrassmannJson) -> Result<Self, GrassmannError> {
        if !(1..=MAX_BUDGET as u32).contains(&j.budget) {
            return Err(GrassmannError::BadBudget(j.budget));
        }
        let budget = j.budget as u8;
        let mut g = Self::zero(budget);
        for t in &j.terms {
            if t.mask.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GrassmannError::Parse("mask must be strictly increasing".into()));
            }
            let c = parse_rational(&t.coef)?;
            g = &g + &Self::monomial(budget, &t.mask, c)?;
        }
        Ok(g)
    }

    pub fn parse_json(text: &str) -> Result<Self, GrassmannError> {
        let j: GrassmannJson =
            serde_json::from_str(text).map_err(|e| GrassmannError::Parse(e.to_string()))?;
        Self::from_json(&j)
    }
}

pub fn mask_generators(mask: u64) -> Vec<u32> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub mask: Vec<u32>,
    pub coef: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrassmannJson {
    pub budget: u32,
    pub terms: Vec<TermJson>,
}

impl fmt::Display for Grassmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let gens = mask_generators(m);
            if gens.is_empty() {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            let names: Vec<String> = gens.iter().map(|k| format!("e{k}")).collect();
            write!(f, "{}", names.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Grassmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{}[{}]", self.budget, self)
    }
}

impl FromStr for Grassmann {
    type Err = GrassmannError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(DEFAULT_BUDGET, s)
    }
}

impl Add for &Grassmann {
    type Output = Grassmann;
    fn add(self, rhs: &Grassmann) -> Grassmann {
        self.try_add(rhs).expect("Grassmann addition")
    }
}

impl Add for Grassmann {
    type Output = Grassmann;
    fn add(self, rhs: Grassmann) -> Grassmann {
        &self + &rhs
    }
}

impl AddAssign<&Grassmann> for Grassmann {
    fn add_assign(&mut self, rhs: &Grassmann) {
        assert_eq!(self.budget, rhs.budget, "Grassmann budget mismatch");
        for (&m, c) in &rhs.terms {
            self.add_term(m, c.clone());
        }
    }
}

impl Neg for &Grassmann {
    type Output = Grassmann;
    fn neg(self) -> Grassmann {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = -c.clone();
        }
        r
    }
}

impl Neg for Grassmann {
    type Output = Grassmann;
    fn neg(self) -> Grassmann {
        -&self
    }
}

impl Sub for &Grassmann {
    type Output = Grassmann;
    fn sub(self, rhs: &Grassmann) -> Grassmann {
        self + &(-rhs)
    }
}

impl Sub for Grassmann {
    type Output = Grassmann;
    fn sub(self, rhs: Grassmann) -> Grassmann {
        &self - &rhs
    }
}

impl Mul for &Grassmann {
    type Output = Grassmann;
    fn mul(self, rhs: &Grassmann) -> Grassmann {
        self.gmul(rhs).expect("Grassmann multiplication")
    }
}

impl Mul for Grassmann {
    type Output = Grassmann;
    fn mul(self, rhs: Grassmann) -> Grassmann {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Grassmann {
        Grassmann::parse(4, s).unwrap()
    }

    #[test]
    fn anticommuting_generators() {
        assert_eq!(g("e1") * g("e2"), g("e1*e2"));
        assert_eq!(g("e2") * g("e1"), g("-e1*e2"));
        assert_eq!(g("e1") * g("e1"), Grassmann::zero(4));
    }

    #[test]
    fn nilpotent_square_cancels() {
        assert_eq!(g("1 + e1*e2") * g("1 - e1*e2"), Grassmann::one(4));
    }

    #[test]
    fn body_and_split() {
        assert_eq!(g("3 + e1 + 5*e2*e3").body(), rat(3));
        assert_eq!(g("e1*e2").body(), rat(0));
        let (e, o) = g("3 + e1 + e2*e3").z2_split();
        assert_eq!(e, g("3 + e2*e3"));
        assert_eq!(o, g("e1"));
        assert_eq!(g("e1 + e2").z2_split().0, Grassmann::zero(4));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Grassmann::one(4).ginv().unwrap(), Grassmann::one(4));
        assert_eq!(g("2 + e1*e2").ginv().unwrap(), g("1/2 - 1/4*e1*e2"));
        assert_eq!(g("e1").ginv(), Err(GrassmannError::NoBody));
    }

    #[test]
    fn text_round_trip() {
        let x = g("3 + 2*e1*e2 - 1/2*e1*e3*e4");
        assert_eq!(x.to_string(), "3 + 2*e1*e2 - 1/2*e1*e3*e4");
        assert_eq!(g(&x.to_string()), x);
        assert_eq!(g("e2*e1").to_string(), "-e1*e2");
        assert!(Grassmann::parse(2, "e3").is_err());
        assert!(Grassmann::parse(2, "1 +").is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = g("3 + 2*e1*e2");
        let text = serde_json::to_string(&x.to_json()).unwrap();
        assert_eq!(text, r#"{"budget":4,"terms":[{"mask":[],"coef":"3"},{"mask":[1,2],"coef":"2"}]}"#);
        assert_eq!(Grassmann::parse_json(&text).unwrap(), x);
    }

    #[test]
    fn budget_mismatch_is_an_error() {
        let a = Grassmann::one(3);
        let b = Grassmann::one(4);
        assert_eq!(a.gmul(&b), Err(GrassmannError::BudgetMismatch(3, 4)));
    }
}
