//! Finite-dimensional Lie and Leibniz superalgebras given by structure
//! constants, with identity checks and basic structural operations.

mod hom;
mod identity;
pub mod io;
mod structure;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Poly, Rational, Symbol};

pub use hom::{transport, verify_homomorphism, HomViolation, LinearMap};
pub use identity::{
    check_identity, check_identity_with, check_super_jacobi, check_super_jacobi_with,
    check_super_leibniz, check_super_leibniz_with, is_lie_superalgebra, jacobi_residual,
    leibniz_residual, skew_violations, Violation,
};
pub use structure::{
    is_two_sided_ideal, right_annihilator, right_mult_closure, skew_ideal, RightMultReport,
    Subspace,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lie,
    Leibniz,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Lie => "lie",
            Kind::Leibniz => "leibniz",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Sparse vector in basis coordinates; zero entries are never stored.
pub type SparseVec = BTreeMap<usize, Poly>;

pub fn add_scaled(acc: &mut SparseVec, v: &SparseVec, c: &Poly) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        let t = x * c;
        add_entry(acc, *k, &t);
    }
}

pub fn add_entry(acc: &mut SparseVec, k: usize, t: &Poly) {
    if t.is_zero() {
        return;
    }
    let e = acc.entry(k).or_insert_with(Poly::zero);
    *e += t;
    if e.is_zero() {
        acc.remove(&k);
    }
}

pub fn scale_vec(v: &SparseVec, c: &Poly) -> SparseVec {
    let mut out = SparseVec::new();
    add_scaled(&mut out, v, c);
    out
}

pub fn sub_vec(a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = a.clone();
    add_scaled(&mut out, b, &Poly::int(-1));
    out
}

pub fn unit(k: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(k, Poly::one());
    v
}

/// `(-1)^{|a||b|}` as a rational sign.
pub fn koszul(a: Parity, b: Parity) -> i64 {
    if a == Parity::Odd && b == Parity::Odd {
        -1
    } else {
        1
    }
}

/// Structure constants of a superalgebra.
///
/// Even basis elements come first, then odd ones. For the Lie kind only
/// canonical pairs are stored and the remaining products follow from super
/// skew-symmetry; the Leibniz kind stores every ordered pair explicitly.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperAlgebra {
    name: String,
    kind: Kind,
    even: Vec<String>,
    odd: Vec<String>,
    parameters: BTreeSet<Symbol>,
    stored: BTreeMap<(usize, usize), SparseVec>,
    table: Vec<SparseVec>,
}

impl fmt::Debug for SuperAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}, {}|{})", self.name, self.kind, self.even.len(), self.odd.len())?;
        for ((a, b), v) in &self.stored {
            write!(f, "\n  [{}, {}] = {}", self.basis_name(*a), self.basis_name(*b), self.format_vec(v))?;
        }
        Ok(())
    }
}

impl SuperAlgebra {
    /// Builds an algebra from stored products, validating ranges, parities
    /// and (for the Lie kind) canonical pair order.
    pub fn new(
        name: impl Into<String>,
        kind: Kind,
        even: Vec<String>,
        odd: Vec<String>,
        products: BTreeMap<(usize, usize), SparseVec>,
    ) -> Result<Self> {
        let n = even.len() + odd.len();
        let mut seen = BTreeSet::new();
        for b in even.iter().chain(&odd) {
            if !seen.insert(b.clone()) {
                return Err(Error::InvalidAlgebra(format!("duplicate basis name `{b}`")));
            }
        }
        let parity = |i: usize| if i < even.len() { Parity::Even } else { Parity::Odd };
        let name_of = |i: usize| {
            if i < even.len() {
                even[i].clone()
            } else {
                odd[i - even.len()].clone()
            }
        };
        let mut stored = BTreeMap::new();
        let mut parameters = BTreeSet::new();
        for ((a, b), v) in products {
            if a >= n || b >= n {
                return Err(Error::DimensionMismatch(format!("product index ({a}, {b}) out of range")));
            }
            if kind == Kind::Lie && !is_canonical(a, b, parity(a), parity(b)) {
                if v.values().any(|c| !c.is_zero()) {
                    return Err(Error::InvalidAlgebra(format!(
                        "lie algebras store canonical pairs only; got [{}, {}]",
                        name_of(a),
                        name_of(b)
                    )));
                }
            }
            let target = parity(a).add(parity(b));
            let mut clean = SparseVec::new();
            for (k, c) in v {
                if k >= n {
                    return Err(Error::DimensionMismatch(format!("result index {k} out of range")));
                }
                if parity(k) != target {
                    return Err(Error::ParityMismatch(format!(
                        "[{}, {}] must be {:?} but has a component on {}",
                        name_of(a),
                        name_of(b),
                        target,
                        name_of(k)
                    )));
                }
                if !c.is_zero() {
                    parameters.extend(c.variables());
                    clean.insert(k, c);
                }
            }
            if !clean.is_empty() {
                stored.insert((a, b), clean);
            }
        }
        let mut alg = SuperAlgebra {
            name: name.into(),
            kind,
            even,
            odd,
            parameters,
            stored,
            table: Vec::new(),
        };
        alg.rebuild_table();
        Ok(alg)
    }

    fn rebuild_table(&mut self) {
        let n = self.dim();
        let mut table = vec![SparseVec::new(); n * n];
        for ((a, b), v) in &self.stored {
            table[a * n + b] = v.clone();
            if self.kind == Kind::Lie && a != b {
                let s = -koszul(self.parity(*a), self.parity(*b));
                table[b * n + a] = scale_vec(v, &Poly::int(s));
            }
        }
        self.table = table;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn even_basis(&self) -> &[String] {
        &self.even
    }

    pub fn odd_basis(&self) -> &[String] {
        &self.odd
    }

    pub fn n_even(&self) -> usize {
        self.even.len()
    }

    pub fn n_odd(&self) -> usize {
        self.odd.len()
    }

    pub fn dim(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn parity(&self, i: usize) -> Parity {
        if i < self.even.len() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn basis_name(&self, i: usize) -> &str {
        if i < self.even.len() {
            &self.even[i]
        } else {
            &self.odd[i - self.even.len()]
        }
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.even
            .iter()
            .chain(&self.odd)
            .position(|b| b == name)
            .ok_or_else(|| Error::UnknownBasis(name.to_string()))
    }

    pub fn parameters(&self) -> &BTreeSet<Symbol> {
        &self.parameters
    }

    pub fn is_parametric(&self) -> bool {
        self.stored.values().any(|v| v.values().any(|c| !c.is_constant()))
    }

    /// Products as stored: canonical pairs for Lie, all ordered pairs for Leibniz.
    pub fn stored_products(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        &self.stored
    }

    /// Product of two basis elements.
    pub fn bracket(&self, a: usize, b: usize) -> &SparseVec {
        &self.table[a * self.dim() + b]
    }

    pub fn mul(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in u {
            for (j, y) in v {
                let p = self.bracket(*i, *j);
                if !p.is_empty() {
                    add_scaled(&mut out, p, &(x * y));
                }
            }
        }
        out
    }

    pub fn mul_basis_left(&self, a: usize, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, y) in v {
            add_scaled(&mut out, self.bracket(a, *j), y);
        }
        out
    }

    pub fn mul_basis_right(&self, v: &SparseVec, b: usize) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in v {
            add_scaled(&mut out, self.bracket(*i, b), x);
        }
        out
    }

    /// Parity of a homogeneous vector; `None` for zero or mixed vectors.
    pub fn vec_parity(&self, v: &SparseVec) -> Option<Parity> {
        let mut ps = v.keys().map(|&k| self.parity(k));
        let first = ps.next()?;
        ps.all(|p| p == first).then_some(first)
    }

    pub fn subst(&self, binding: &BTreeMap<Symbol, Poly>) -> SuperAlgebra {
        let products = self
            .stored
            .iter()
            .map(|(k, v)| {
                let nv: SparseVec = v
                    .iter()
                    .map(|(i, c)| (*i, c.subst_unchecked(binding)))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                (*k, nv)
            })
            .collect();
        SuperAlgebra::new(self.name.clone(), self.kind, self.even.clone(), self.odd.clone(), products)
            .expect("substitution preserves validity")
    }

    /// Replaces every parameter by a rational value.
    pub fn instantiate(&self, values: &BTreeMap<Symbol, Rational>) -> Result<SuperAlgebra> {
        let used: BTreeSet<Symbol> = self
            .stored
            .values()
            .flat_map(|v| v.values().flat_map(Poly::variables))
            .collect();
        if let Some(s) = used.iter().find(|s| !values.contains_key(*s)) {
            return Err(Error::MissingValue(s.to_string()));
        }
        let binding: BTreeMap<Symbol, Poly> = values
            .iter()
            .map(|(k, v)| (k.clone(), Poly::constant(v.clone())))
            .collect();
        Ok(self.subst(&binding))
    }

    /// Same structure constants tagged with another kind. Turning a Lie
    /// algebra into a Leibniz one stores every ordered pair explicitly.
    pub fn retag(&self, kind: Kind) -> Result<SuperAlgebra> {
        let n = self.dim();
        let products: BTreeMap<(usize, usize), SparseVec> = match kind {
            Kind::Leibniz => (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| !self.bracket(a, b).is_empty())
                .map(|(a, b)| ((a, b), self.bracket(a, b).clone()))
                .collect(),
            Kind::Lie => {
                if !skew_violations(self).is_empty() {
                    return Err(Error::Precondition("products are not super skew-symmetric".into()));
                }
                (0..n)
                    .flat_map(|a| (0..n).map(move |b| (a, b)))
                    .filter(|&(a, b)| is_canonical(a, b, self.parity(a), self.parity(b)))
                    .filter(|&(a, b)| !self.bracket(a, b).is_empty())
                    .map(|(a, b)| ((a, b), self.bracket(a, b).clone()))
                    .collect()
            }
        };
        SuperAlgebra::new(self.name.clone(), kind, self.even.clone(), self.odd.clone(), products)
    }

    pub fn format_vec(&self, v: &SparseVec) -> String {
        format_vec_with(v, |k| self.basis_name(k).to_string())
    }

    /// Same dimensions and the same full product table.
    pub fn same_structure(&self, other: &SuperAlgebra) -> bool {
        self.n_even() == other.n_even() && self.n_odd() == other.n_odd() && self.table == other.table
    }

    /// Entries of the full product table whose coefficients differ.
    pub fn structure_diff(&self, other: &SuperAlgebra) -> Vec<(usize, usize)> {
        let n = self.dim().min(other.dim());
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.bracket(a, b) != other.bracket(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Dense rational product table; fails on parametric constants.
    pub fn rational_table(&self) -> Result<Vec<Vec<Vec<(usize, Rational)>>>> {
        let n = self.dim();
        let mut out = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                for (k, c) in self.bracket(a, b) {
                    let v = c.constant_value().ok_or(Error::Parametric)?;
                    if !v.is_zero() {
                        out[a][b].push((*k, v));
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn format_vec_with(v: &SparseVec, name: impl Fn(usize) -> String) -> String {
    if v.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, c) in v {
        let term = if c == &Poly::one() {
            name(*k)
        } else if c == &Poly::int(-1) {
            format!("-{}", name(*k))
        } else if c.num_terms() == 1 {
            format!("{}*{}", c, name(*k))
        } else {
            format!("({})*{}", c, name(*k))
        };
        if s.is_empty() {
            s = term;
        } else if let Some(rest) = term.strip_prefix('-') {
            s = format!("{s} - {rest}");
        } else {
            s = format!("{s} + {term}");
        }
    }
    s
}

/// Canonical pair for Lie storage: `a < b`, or `a == b` with both odd.
pub fn is_canonical(a: usize, b: usize, pa: Parity, _pb: Parity) -> bool {
    a < b || (a == b && pa == Parity::Odd)
}

/// Incremental construction by basis name, convenient for catalogs and tests.
#[derive(Clone, Debug)]
pub struct Builder {
    name: String,
    kind: Kind,
    even: Vec<String>,
    odd: Vec<String>,
    products: BTreeMap<(usize, usize), SparseVec>,
}

impl Builder {
    pub fn new(name: impl Into<String>, kind: Kind, even: Vec<String>, odd: Vec<String>) -> Self {
        Builder {
            name: name.into(),
            kind,
            even,
            odd,
            products: BTreeMap::new(),
        }
    }

    pub fn n_even(&self) -> usize {
        self.even.len()
    }

    pub fn n_odd(&self) -> usize {
        self.odd.len()
    }

    fn parity(&self, i: usize) -> Parity {
        if i < self.even.len() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Adds `c * e_k` to the product `[e_a, e_b]`. For the Lie kind a
    /// non-canonical pair is rewritten through super skew-symmetry.
    pub fn add(&mut self, a: usize, b: usize, k: usize, c: Poly) -> &mut Self {
        if c.is_zero() {
            return self;
        }
        let (a, b, c) = if self.kind == Kind::Lie && !is_canonical(a, b, self.parity(a), self.parity(b)) {
            if a == b {
                // [x, x] = 0 for even x
                return self;
            }
            let s = -koszul(self.parity(a), self.parity(b));
            (b, a, c.scale(&crate::exact::rat(s)))
        } else {
            (a, b, c)
        };
        let v = self.products.entry((a, b)).or_default();
        add_entry(v, k, &c);
        self
    }

    pub fn add_int(&mut self, a: usize, b: usize, k: usize, c: i64) -> &mut Self {
        self.add(a, b, k, Poly::int(c))
    }

    pub fn build(&self) -> Result<SuperAlgebra> {
        SuperAlgebra::new(
            self.name.clone(),
            self.kind,
            self.even.clone(),
            self.odd.clone(),
            self.products.clone(),
        )
    }
}

/// Names `X0..` / `X1..` and `Y1..`.
pub fn basis_names(prefix: &str, from: usize, count: usize) -> Vec<String> {
    (from..from + count).map(|i| format!("{prefix}{i}")).collect()
}
