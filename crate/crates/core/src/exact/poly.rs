use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, rat, Rational};
use crate::error::{Error, Result};

/// Parameter name. Variables are ordered by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Power product of symbols, sorted by symbol with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| v == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes `s^k` entirely, returning the exponent that was removed.
    fn split_off(&self, s: &Symbol) -> (Monomial, u32) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut k = 0;
        for (v, e) in &self.0 {
            if v == s {
                k = *e;
            } else {
                rest.push((v.clone(), *e));
            }
        }
        (Monomial(rest), k)
    }

    fn divide(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.iter().any(|(s, e)| self.exponent(s) < *e) {
            return None;
        }
        Some(Monomial(
            self.0
                .iter()
                .filter_map(|(s, e)| {
                    let r = e - other.exponent(s);
                    (r > 0).then(|| (s.clone(), r))
                })
                .collect(),
        ))
    }
}

// Graded lexicographic order: total degree first, then the exponent of the
// earliest variable by name.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = &self.0[i];
            let (b, eb) = &other.0[j];
            match a.cmp(b) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                },
            }
        }
        (self.0.len() - i).cmp(&(other.0.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in graded lexicographic order and never store a zero
/// coefficient, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn var(name: &str) -> Self {
        Poly::symbol(Symbol::new(name))
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(s), Rational::one());
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn parse(s: &str) -> Result<Self> {
        super::parse::parse_poly(s)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Value of a parameter-free polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn mentions(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) > 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    /// Coefficient of `s^k` as a polynomial in the remaining variables.
    pub fn coeff_of(&self, s: &Symbol, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(s);
            if e == k {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Leading term in graded lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Scales so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Poly {
        let lc = self.leading_coefficient();
        if lc.is_zero() || lc.is_one() {
            return self.clone();
        }
        self.scale(&(Rational::one() / lc))
    }

    /// Canonical representative up to nonzero rational scaling.
    pub fn normalized(&self) -> Poly {
        self.monic()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Simultaneous substitution. Fails when a bound value mentions a bound name.
    pub fn subst(&self, binding: &BTreeMap<Symbol, Poly>) -> Result<Poly> {
        for v in binding.values() {
            if let Some(s) = v.variables().into_iter().find(|s| binding.contains_key(s)) {
                return Err(Error::CyclicBinding(s.to_string()));
            }
        }
        Ok(self.subst_unchecked(binding))
    }

    /// Substitution without the cycle check; bound names are replaced once.
    pub fn subst_unchecked(&self, binding: &BTreeMap<Symbol, Poly>) -> Poly {
        if binding.is_empty() || !self.terms.keys().any(|m| m.0.iter().any(|(s, _)| binding.contains_key(s))) {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut free = Vec::new();
            let mut prod = Poly::one();
            for (s, e) in &m.0 {
                match binding.get(s) {
                    Some(v) => prod = &prod * &v.pow(*e),
                    None => free.push((s.clone(), *e)),
                }
            }
            let term = prod.mul_monomial(&Monomial(free), c);
            out += &term;
        }
        out
    }

    pub fn subst_one(&self, s: &Symbol, value: &Poly) -> Poly {
        let mut b = BTreeMap::new();
        b.insert(s.clone(), value.clone());
        self.subst_unchecked(&b)
    }

    pub fn eval(&self, values: &BTreeMap<Symbol, Rational>) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (s, e) in &m.0 {
                let v = values
                    .get(s)
                    .ok_or_else(|| Error::MissingValue(s.to_string()))?;
                for _ in 0..*e {
                    t *= v;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact division by a monomial; `None` when some term is not divisible.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.terms {
            out.insert(k.divide(m)?, v.clone());
        }
        Some(Poly { terms: out })
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut acc: Vec<(Symbol, u32)> = first.0.clone();
        for m in it {
            acc = acc
                .into_iter()
                .filter_map(|(s, e)| {
                    let f = m.exponent(&s);
                    (f > 0).then(|| (s, e.min(f)))
                })
                .collect();
        }
        Monomial(acc)
    }

    /// True when the polynomial equals `c * other` for some nonzero rational `c`.
    pub fn proportional(&self, other: &Poly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.monic() == other.monic()
    }

    pub fn rename(&self, from: &Symbol, to: &Symbol) -> Poly {
        self.subst_one(from, &Poly::symbol(to.clone()))
    }

    pub fn is_negative_leading(&self) -> bool {
        self.leading_coefficient().is_negative()
    }
}

// Compares leading terms first so lower-degree polynomials sort first.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter().rev();
        let mut b = other.terms.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    match ma.cmp(mb).then_with(|| ca.cmp(cb)) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
            }
        }
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let a = c.abs();
            if m.is_one() {
                f.write_str(&format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl FromStr for Poly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Poly::parse(s)
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(n: i64) -> Self {
        Poly::int(n)
    }
}

impl<'a> AddAssign<&'a Poly> for Poly {
    fn add_assign(&mut self, rhs: &'a Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> SubAssign<&'a Poly> for Poly {
    fn sub_assign(&mut self, rhs: &'a Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn canonical_display() {
        assert_eq!(p("-2*c + a3*a1").to_string(), "a1*a3 - 2*c");
        assert_eq!(p("c/2").to_string(), "1/2*c");
        assert_eq!(p("-3/2").to_string(), "-3/2");
        assert_eq!(p("x - x").to_string(), "0");
        assert_eq!(p("(a+1)^2").to_string(), "a^2 + 2*a + 1");
    }

    #[test]
    fn graded_lex_order() {
        // degree dominates, then earlier variable name
        assert_eq!(p("b + a^2 + a*b + 1").to_string(), "a^2 + a*b + b + 1");
        assert_eq!(p("b + a").to_string(), "a + b");
    }

    #[test]
    fn substitution_and_cycles() {
        let mut b = BTreeMap::new();
        b.insert(Symbol::new("a"), p("b + 1"));
        assert_eq!(p("a^2").subst(&b).unwrap(), p("b^2 + 2*b + 1"));
        b.insert(Symbol::new("b"), p("a"));
        assert!(matches!(p("a").subst(&b), Err(Error::CyclicBinding(_))));
    }

    #[test]
    fn evaluation() {
        let mut v = BTreeMap::new();
        v.insert(Symbol::new("a"), ratio(1, 2));
        assert_eq!(p("4*a^2 - a").eval(&v).unwrap(), ratio(1, 2));
        assert!(p("b").eval(&v).is_err());
    }

    #[test]
    fn coefficients_and_content() {
        let q = p("a^2*b + 3*a*b^2 - a");
        assert_eq!(q.coeff_of(&Symbol::new("a"), 1), p("3*b^2 - 1"));
        assert_eq!(p("a^2*b + a*b^3").monomial_content().to_string(), "a*b");
        assert!(p("2*a - 4*b").proportional(&p("b - a/2")));
    }
}
