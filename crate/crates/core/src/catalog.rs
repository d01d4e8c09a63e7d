//! Named algebras, cochains and classified laws.
//!
//! Lie entries use the basis `X0..Xn, Y1..Ym` (even part of dimension
//! `n+1`); Leibniz entries use `X1..Xn, Y1..Ym`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::deform::{self, cochain_to_json, deform, Cochain2};
use crate::error::{Error, Result};
use crate::exact::{binomial, rat, rref, sign, Poly, Rational, Symbol};
use crate::superalg::io::to_json;
use crate::superalg::{basis_names, Builder, Kind, SuperAlgebra};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Defining or model algebra.
    Model,
    /// Law appearing in a classification list.
    Law,
    Cochain,
}

/// Inclusive range, unbounded above when `max` is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Range {
    pub min: usize,
    pub max: Option<usize>,
}

impl Range {
    pub const fn exactly(v: usize) -> Self {
        Range { min: v, max: Some(v) }
    }

    pub const fn from(v: usize) -> Self {
        Range { min: v, max: None }
    }

    pub fn contains(&self, v: usize) -> bool {
        v >= self.min && self.max.map_or(true, |m| v <= m)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(m) if m == self.min => write!(f, "{m}"),
            Some(m) => write!(f, "{}..{m}", self.min),
            None => write!(f, ">={}", self.min),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: Kind,
    pub role: Role,
    /// Even-part index `n` (Lie: `dim = n+1`; Leibniz: `dim = n`).
    pub n: Range,
    pub m: Range,
    /// Extra constructor arguments besides `n` and `m`.
    pub args: &'static [&'static str],
    /// Free parameters the law carries unless values are supplied.
    pub parameters: &'static [&'static str],
    pub naturally_graded: bool,
    pub group: &'static str,
    pub summary: &'static str,
}

impl CatalogEntry {
    pub fn matches_dims(&self, n: usize, m: usize) -> bool {
        self.n.contains(n) && self.m.contains(m)
    }
}

const fn entry(
    id: &'static str,
    kind: Kind,
    role: Role,
    n: Range,
    m: Range,
    group: &'static str,
    summary: &'static str,
) -> CatalogEntry {
    CatalogEntry {
        id,
        kind,
        role,
        n,
        m,
        args: &[],
        parameters: &[],
        naturally_graded: matches!(role, Role::Law),
        group,
        summary,
    }
}

const LIE: Kind = Kind::Lie;
const LEIB: Kind = Kind::Leibniz;
const fn ex(v: usize) -> Range {
    Range::exactly(v)
}
const fn at_least(v: usize) -> Range {
    Range::from(v)
}

/// All catalog entries in listing order.
pub fn entries() -> Vec<CatalogEntry> {
    use Role::*;
    let mut out = vec![
        entry("L", LIE, Model, at_least(2), at_least(0), "models", "L_n (m = 0) or the model filiform law L^{n,m}"),
        entry("Q", LIE, Model, at_least(5), at_least(0), "models", "Q_n for odd n >= 5, with the odd chain when m > 0"),
        entry("NF", LEIB, Model, at_least(2), ex(0), "models", "null-filiform Leibniz algebra NF^n"),
        entry("skeleton", LEIB, Model, at_least(2), at_least(1), "models", "Leibniz chain products at maximal super-nilindex"),
        CatalogEntry {
            naturally_graded: false,
            ..entry(
                "nongraded",
                LEIB,
                Model,
                ex(4),
                ex(1),
                "models",
                "nilpotent superalgebra whose associated graded space is not graded",
            )
        },
        entry("L+phi12", LIE, Law, ex(2), at_least(1), "lie-n2", "L^{2,m} + phi_{1,2}"),
        entry("L+phi12", LIE, Law, ex(3), at_least(2), "lie-n3", "L^{3,m} + phi_{1,2}"),
        entry("L+phi12+psi211", LIE, Law, ex(3), at_least(2), "lie-n3", "L^{3,m} + phi_{1,2} + Psi^2_{1,1}"),
        entry("L+phi12+psi431", LIE, Law, ex(3), ex(4), "lie-n3", "L^{3,4} + phi_{1,2} + Psi^4_{3,1}"),
        entry("L+phibar24", LIE, Law, ex(4), ex(2), "lie-m2", "L^{4,2} + phibar_{2,4}"),
        entry("L+phi24", LIE, Law, ex(4), ex(3), "lie-m3", "L^{4,3} + phi_{2,4}"),
        entry(
            "L+phi24+psi211+2psi321",
            LIE,
            Law,
            ex(4),
            ex(3),
            "lie-m3",
            "L^{4,3} + phi_{2,4} + Psi^2_{1,1} + 2 Psi^3_{2,1}",
        ),
        CatalogEntry {
            parameters: &["t"],
            ..entry("L+phi12+tphi24", LIE, Law, ex(4), ex(3), "lie-m3", "L^{4,3} + phi_{1,2} + t phi_{2,4}")
        },
        entry(
            "L+4phi12+phi24+psi211",
            LIE,
            Law,
            ex(4),
            ex(3),
            "lie-m3",
            "L^{4,3} + 4 phi_{1,2} + phi_{2,4} + Psi^2_{1,1}",
        ),
        entry("L+phibar24", LIE, Law, ex(5), ex(3), "lie-m3", "L^{5,3} + phibar_{2,4}"),
        entry("L+phibar36", LIE, Law, ex(6), ex(3), "lie-m3", "L^{6,3} + phibar_{3,6}"),
        CatalogEntry {
            parameters: &["alpha"],
            ..entry("mu1", LEIB, Law, ex(2), ex(2), "leibniz-low", "one-parameter family mu_1^alpha")
        },
        entry("mu2", LEIB, Law, ex(3), ex(2), "leibniz-low", "mu_2"),
        entry("mu3", LEIB, Law, ex(3), ex(2), "leibniz-low", "mu_3"),
        entry("mu1", LEIB, Law, ex(2), ex(3), "leibniz-low", "mu_1"),
        entry("mu3", LEIB, Law, ex(2), ex(3), "leibniz-low", "mu_3"),
        entry("mu1", LEIB, Law, ex(3), ex(3), "leibniz-low", "mu_1"),
        entry("mu8", LEIB, Law, ex(3), ex(3), "leibniz-low", "mu_8"),
        entry("mu9", LEIB, Law, ex(4), ex(3), "leibniz-low", "mu_9"),
        entry("mu12", LEIB, Law, ex(4), ex(3), "leibniz-low", "mu_12"),
        entry("mu-m-1", LEIB, Law, ex(2), at_least(4), "leibniz-low", "mu_{m-1}"),
        entry("mu-m+1", LEIB, Law, ex(2), at_least(4), "leibniz-low", "mu_{m+1}"),
        entry("NG", LEIB, Law, at_least(3), at_least(4), "leibniz-general", "NG^{n,m}"),
        CatalogEntry {
            parameters: &["g1", "g3", "..."],
            ..entry(
                "gamma",
                LEIB,
                Law,
                at_least(3),
                at_least(4),
                "leibniz-general",
                "gamma family; free gammas stay symbolic unless given",
            )
        },
    ];
    for (id, args, summary) in [
        ("phi", &["k"][..], "phi_{k,2k} on L^{n,m}"),
        ("psi", &["s", "k"][..], "Psi^s_{k,1} on L^{n,m}"),
        ("phibar", &["k"][..], "cocycle in span(phi_{j,2j}, j <= k) with leading coefficient 1"),
        ("qbrackets", &[][..], "brackets [X_i, X_{n-i}] = (-1)^i X_n as a cochain on L^{n,m}"),
    ] {
        out.push(CatalogEntry {
            args,
            naturally_graded: false,
            ..entry(id, LIE, Role::Cochain, at_least(2), at_least(0), "cochains", summary)
        });
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EntryFilter {
    pub kind: Option<Kind>,
    pub role: Option<Role>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub group: Option<String>,
}

impl EntryFilter {
    pub fn laws() -> Self {
        EntryFilter {
            role: Some(Role::Law),
            ..Default::default()
        }
    }

    pub fn dims(mut self, n: usize, m: usize) -> Self {
        self.n = Some(n);
        self.m = Some(m);
        self
    }

    pub fn kind(mut self, kind: Kind) -> Self {
        self.kind = Some(kind);
        self
    }
}

pub fn list_entries(filter: &EntryFilter) -> Vec<CatalogEntry> {
    entries()
        .into_iter()
        .filter(|e| filter.kind.map_or(true, |k| e.kind == k))
        .filter(|e| filter.role.map_or(true, |r| e.role == r))
        .filter(|e| filter.n.map_or(true, |n| e.n.contains(n)))
        .filter(|e| filter.m.map_or(true, |m| e.m.contains(m)))
        .filter(|e| filter.group.as_ref().map_or(true, |g| e.group == g))
        .collect()
}

/// Constructor arguments. Unset parameter values stay symbolic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Args {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub values: BTreeMap<String, Poly>,
}

impl Args {
    pub fn dims(n: usize, m: usize) -> Self {
        Args {
            n: Some(n),
            m: Some(m),
            ..Default::default()
        }
    }

    pub fn with(mut self, name: &str, value: Poly) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    fn value(&self, name: &str) -> Poly {
        self.values.get(name).cloned().unwrap_or_else(|| Poly::var(name))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Built {
    Algebra(SuperAlgebra),
    Cochain(Cochain2),
}

impl Built {
    pub fn to_json(&self) -> String {
        match self {
            Built::Algebra(a) => to_json(a),
            Built::Cochain(c) => cochain_to_json(c),
        }
    }

    pub fn algebra(self) -> Option<SuperAlgebra> {
        match self {
            Built::Algebra(a) => Some(a),
            Built::Cochain(_) => None,
        }
    }
}

fn need(v: Option<usize>, what: &str, id: &str) -> Result<usize> {
    v.ok_or_else(|| Error::OutOfRange(format!("`{id}` needs --{what}")))
}

/// Builds a catalog entry. Entries sharing an id are told apart by `n, m`.
pub fn make(id: &str, args: &Args) -> Result<Built> {
    let all = entries();
    let candidates: Vec<&CatalogEntry> = all.iter().filter(|e| e.id == id).collect();
    if candidates.is_empty() {
        return Err(Error::UnknownEntry(id.to_string()));
    }
    let n = need(args.n, "n", id)?;
    let m = match args.m {
        Some(m) => m,
        None if matches!(id, "L" | "Q" | "NF") => 0,
        None => {
            let fixed: Vec<usize> = candidates.iter().filter_map(|e| e.m.max.filter(|&x| x == e.m.min)).collect();
            match fixed.as_slice() {
                [m] if candidates.len() == 1 => *m,
                _ => return Err(Error::OutOfRange(format!("`{id}` needs --m"))),
            }
        }
    };
    let alg = |a: Result<SuperAlgebra>| a.map(Built::Algebra);
    match id {
        "L" => alg(if m == 0 { l_n(n) } else { lie_model(n, m) }),
        "Q" => alg(q_model(n, m)),
        "NF" => alg(nf(n)),
        "skeleton" => alg(leibniz_skeleton(n, m)),
        "nongraded" => alg(nongraded()),
        "NG" => alg(ng(n, m)),
        "gamma" => {
            let mut g = BTreeMap::new();
            for (k, v) in &args.values {
                let idx = k
                    .strip_prefix('g')
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::OutOfRange(format!("gamma values are named g1, g2, ...; got `{k}`")))?;
                g.insert(idx, v.clone());
            }
            alg(leibniz_family(n, m, &g).map(|f| f.algebra))
        }
        "phi" => Ok(Built::Cochain(deform::phi(n, m, need(args.k, "k", id)?)?)),
        "psi" => Ok(Built::Cochain(deform::psi(n, m, need(args.s, "s", id)?, need(args.k, "k", id)?)?)),
        "phibar" => Ok(Built::Cochain(deform::phibar(n, m, need(args.k, "k", id)?)?)),
        "qbrackets" => Ok(Built::Cochain(q_cochain(n, m)?)),
        _ => {
            let e = candidates
                .iter()
                .find(|e| e.matches_dims(n, m))
                .ok_or_else(|| {
                    let dims: Vec<String> = candidates.iter().map(|e| format!("(n={}, m={})", e.n, e.m)).collect();
                    Error::OutOfRange(format!("`{id}` exists for {}", dims.join(", ")))
                })?;
            alg(match e.kind {
                Kind::Lie => lie_law(id, n, m, args),
                Kind::Leibniz => leibniz_law(id, n, m, args),
            })
        }
    }
}

/// Lie basis index of `X_i`.
fn lx(i: usize) -> usize {
    i
}

/// Lie basis index of `Y_j` when the even part is `X0..Xn`.
fn ly(n: usize, j: usize) -> usize {
    n + j
}

/// Leibniz basis index of `X_i`.
fn bx(i: usize) -> usize {
    i - 1
}

/// Leibniz basis index of `Y_j` when the even part is `X1..Xn`.
fn by(n: usize, j: usize) -> usize {
    n + j - 1
}

fn lie_builder(name: String, n: usize, m: usize) -> Builder {
    let mut b = Builder::new(name, Kind::Lie, basis_names("X", 0, n + 1), basis_names("Y", 1, m));
    for i in 1..n {
        b.add_int(lx(0), lx(i), lx(i + 1), 1);
    }
    for j in 1..m {
        b.add_int(lx(0), ly(n, j), ly(n, j + 1), 1);
    }
    b
}

fn leibniz_builder(name: String, n: usize, m: usize) -> Builder {
    let mut b = Builder::new(name, Kind::Leibniz, basis_names("X", 1, n), basis_names("Y", 1, m));
    for i in 1..n {
        b.add_int(bx(i), bx(1), bx(i + 1), 1);
    }
    for j in 1..m {
        b.add_int(by(n, j), bx(1), by(n, j + 1), 1);
    }
    b
}

/// `L_n`: `[X0, Xi] = X(i+1)`.
pub fn l_n(n: usize) -> Result<SuperAlgebra> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("L_n needs n >= 2, got {n}")));
    }
    lie_builder(format!("L_{n}"), n, 0).build()
}

/// The model filiform law `L^{n,m}`.
pub fn lie_model(n: usize, m: usize) -> Result<SuperAlgebra> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("L^{{n,m}} needs n >= 2, got {n}")));
    }
    lie_builder(format!("L^{{{n},{m}}}"), n, m).build()
}

fn check_q(n: usize) -> Result<()> {
    if n < 5 || n % 2 == 0 {
        return Err(Error::OutOfRange(format!("Q_n needs odd n >= 5, got {n}")));
    }
    Ok(())
}

/// `Q_n` (`m = 0`) or `Q_n` with the odd chain `[X0, Yj] = Y(j+1)`.
pub fn q_model(n: usize, m: usize) -> Result<SuperAlgebra> {
    check_q(n)?;
    let name = if m == 0 { format!("Q_{n}") } else { format!("Q^{{{n},{m}}}") };
    let mut b = lie_builder(name, n, m);
    for i in 1..=(n - 1) / 2 {
        b.add(lx(i), lx(n - i), lx(n), Poly::constant(sign(i)));
    }
    b.build()
}

/// The extra `Q_n` brackets as a cochain on `L^{n,m}`.
pub fn q_cochain(n: usize, m: usize) -> Result<Cochain2> {
    check_q(n)?;
    let base = lie_model(n, m)?;
    let mut comps = BTreeMap::new();
    for i in 1..=(n - 1) / 2 {
        comps.insert((lx(i), lx(n - i)), [(lx(n), Poly::constant(sign(i)))].into());
    }
    Cochain2::new("qbrackets", &base, comps, None)
}

/// `NF^n`: `[Xi, X1] = X(i+1)`.
pub fn nf(n: usize) -> Result<SuperAlgebra> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("NF^n needs n >= 2, got {n}")));
    }
    leibniz_builder(format!("NF^{n}"), n, 0).build()
}

/// Chain products `[Xi, X1] = X(i+1)`, `[Yj, X1] = Y(j+1)` only.
pub fn leibniz_skeleton(n: usize, m: usize) -> Result<SuperAlgebra> {
    if n < 2 || m < 1 {
        return Err(Error::OutOfRange(format!("Leibniz skeleton needs n >= 2, m >= 1, got ({n},{m})")));
    }
    leibniz_builder(format!("S^{{{n},{m}}}"), n, m).build()
}

/// `NG^{n,m}`: the skeleton plus `[Yi, Y1] = X(i+1)` for `i <= min(n-1, m)`.
pub fn ng(n: usize, m: usize) -> Result<SuperAlgebra> {
    if n < 2 || m < 1 {
        return Err(Error::OutOfRange(format!("NG^{{n,m}} needs n >= 2, m >= 1, got ({n},{m})")));
    }
    let mut b = leibniz_builder(format!("NG^{{{n},{m}}}"), n, m);
    for i in 1..=(n - 1).min(m) {
        b.add_int(by(n, i), by(n, 1), bx(i + 1), 1);
    }
    b.build()
}

/// Nilpotent Leibniz superalgebra on `X1..X4, Y1` (also a Lie superalgebra)
/// where `(Y1, Y1)` lands two layers too deep.
pub fn nongraded() -> Result<SuperAlgebra> {
    let mut b = Builder::new("nongraded", Kind::Leibniz, basis_names("X", 1, 4), basis_names("Y", 1, 1));
    b.add_int(bx(2), bx(1), bx(3), 1)
        .add_int(bx(3), bx(1), bx(4), 1)
        .add_int(bx(1), bx(2), bx(3), -1)
        .add_int(bx(1), bx(3), bx(4), -1)
        .add_int(by(4, 1), by(4, 1), bx(4), 1);
    b.build()
}

fn combo(name: &str, n: usize, m: usize, terms: &[(Poly, Cochain2)]) -> Result<SuperAlgebra> {
    let base = lie_model(n, m)?;
    let refs: Vec<(Poly, &Cochain2)> = terms.iter().map(|(c, p)| (c.clone(), p)).collect();
    let c = Cochain2::combine(name, &base, &refs)?;
    let mut out = deform(&base, &c)?;
    out.set_name(format!("L^{{{n},{m}}}+{name}"));
    Ok(out)
}

fn lie_law(id: &str, n: usize, m: usize, args: &Args) -> Result<SuperAlgebra> {
    use deform::{phi, phibar, psi};
    let one = Poly::one;
    let name = id.trim_start_matches("L+");
    match id {
        "L+phi12" => combo(name, n, m, &[(one(), phi(n, m, 1)?)]),
        "L+phi12+psi211" => combo(name, n, m, &[(one(), phi(n, m, 1)?), (one(), psi(n, m, 2, 1)?)]),
        "L+phi12+psi431" => combo(name, n, m, &[(one(), phi(n, m, 1)?), (one(), psi(n, m, 4, 3)?)]),
        "L+phibar24" => combo(name, n, m, &[(one(), phibar(n, m, 2)?)]),
        "L+phibar36" => combo(name, n, m, &[(one(), phibar(n, m, 3)?)]),
        "L+phi24" => combo(name, n, m, &[(one(), phi(n, m, 2)?)]),
        "L+phi24+psi211+2psi321" => combo(
            name,
            n,
            m,
            &[(one(), phi(n, m, 2)?), (one(), psi(n, m, 2, 1)?), (Poly::int(2), psi(n, m, 3, 2)?)],
        ),
        "L+phi12+tphi24" => combo(name, n, m, &[(one(), phi(n, m, 1)?), (args.value("t"), phi(n, m, 2)?)]),
        "L+4phi12+phi24+psi211" => combo(
            name,
            n,
            m,
            &[(Poly::int(4), phi(n, m, 1)?), (one(), phi(n, m, 2)?), (one(), psi(n, m, 2, 1)?)],
        ),
        _ => Err(Error::UnknownEntry(id.to_string())),
    }
}

/// A Leibniz product `[A, B] = c C` on named basis elements.
type Named = (&'static str, &'static str, &'static str, i64);

fn leibniz_table(name: &str, n: usize, m: usize, extra: &[Named], param: Option<(&str, &str, &str, Poly)>) -> Result<SuperAlgebra> {
    let mut b = leibniz_builder(name.to_string(), n, m);
    let idx = |s: &str| -> Result<usize> {
        let k: usize = s[1..].parse().map_err(|_| Error::UnknownBasis(s.to_string()))?;
        Ok(if s.starts_with('X') { bx(k) } else { by(n, k) })
    };
    for (l, r, o, c) in extra {
        b.add_int(idx(l)?, idx(r)?, idx(o)?, *c);
    }
    if let Some((l, r, o, c)) = param {
        b.add(idx(l)?, idx(r)?, idx(o)?, c);
    }
    b.build()
}

fn leibniz_law(id: &str, n: usize, m: usize, args: &Args) -> Result<SuperAlgebra> {
    let t = |extra: &[Named]| leibniz_table(id, n, m, extra, None);
    match (id, n, m) {
        ("mu1", 2, 2) => leibniz_table(id, n, m, &[("Y1", "Y1", "X2", 1)], Some(("X1", "Y1", "Y2", args.value("alpha")))),
        ("mu2", 3, 2) => t(&[("Y1", "Y1", "X2", 1), ("Y2", "Y1", "X3", 1)]),
        ("mu3", 3, 2) => t(&[("X1", "Y1", "Y2", -1), ("Y1", "Y2", "X3", 1), ("Y1", "Y1", "X2", 1)]),
        ("mu1", 2, 3) => t(&[("Y1", "Y1", "X2", 1)]),
        ("mu3", 2, 3) => t(&[("X1", "Y1", "Y2", -1), ("X1", "Y2", "Y3", -1), ("Y1", "Y1", "X2", 1)]),
        ("mu1", 3, 3) => t(&[("Y1", "Y2", "X3", 1), ("Y2", "Y1", "X3", -1)]),
        // [X1,Y1] = -Y2 is required by the identity on (X1, Y1, X1).
        ("mu8", 3, 3) => t(&[("X1", "Y1", "Y2", -1), ("X1", "Y2", "Y3", -1), ("Y1", "Y1", "X2", 1), ("Y1", "Y2", "X3", 1)]),
        ("mu9", 4, 3) => t(&[
            ("X1", "Y1", "Y2", -1),
            ("X1", "Y2", "Y3", -1),
            ("Y1", "Y3", "X4", 1),
            ("Y2", "Y2", "X4", -1),
            ("Y3", "Y1", "X4", 1),
        ]),
        ("mu12", 4, 3) => t(&[("Y1", "Y1", "X2", 1), ("Y2", "Y1", "X3", 1), ("Y3", "Y1", "X4", 1)]),
        ("mu-m-1", 2, _) => t(&[("Y1", "Y1", "X2", 1)]),
        ("mu-m+1", 2, _) => {
            let mut b = leibniz_builder(id.to_string(), n, m);
            for j in 1..m {
                b.add_int(bx(1), by(n, j), by(n, j + 1), -1);
            }
            b.add_int(by(n, 1), by(n, 1), bx(2), 1);
            b.build()
        }
        _ => Err(Error::UnknownEntry(format!("{id} at ({n},{m})"))),
    }
}

/// A gamma family law together with the gamma values it uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaFamily {
    pub algebra: SuperAlgebra,
    /// `gamma[k]` for `k = 1..`, dependent ones already expressed in the free ones.
    pub gamma: BTreeMap<usize, Poly>,
    pub free: Vec<usize>,
}

fn gsym(k: usize) -> Poly {
    Poly::var(&format!("g{k}"))
}

/// Linear relations among `gamma_1..gamma_top` as rows `sum c_k gamma_k = 0`.
fn gamma_relations(n: usize, m: usize) -> (usize, Vec<BTreeMap<usize, Rational>>) {
    let top = if n <= m { n.saturating_sub(1) } else { m };
    let mut rels: Vec<BTreeMap<usize, Rational>> = Vec::new();
    let mut add = |rel: BTreeMap<usize, Rational>| {
        let rel: BTreeMap<usize, Rational> = rel.into_iter().filter(|(_, c)| !num_traits::Zero::is_zero(c)).collect();
        rels.push(rel);
    };
    if top >= 2 {
        add([(2, rat(1))].into());
    }
    for j in 2..=(n - 1) / 2 {
        // gamma_{2j} - (-1)^j sum_{s=0}^{j-2} (-1)^s C(j-1,s) gamma_{j+s+1}
        let mut rel: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut put = |k: usize, c: Rational| {
            if k <= top {
                *rel.entry(k).or_default() += c;
            }
        };
        put(2 * j, rat(1));
        for s in 0..=j - 2 {
            put(j + s + 1, -(sign(j) * sign(s) * binomial(j - 1, s)));
        }
        add(rel);
    }
    if n > m && m >= 1 {
        let mut rel: BTreeMap<usize, Rational> = [(1, rat(1))].into();
        for s in 1..m {
            *rel.entry(1 + s).or_default() -= sign(s + 1) * binomial(m, s);
        }
        add(rel);
    }
    rels.retain(|r| !r.is_empty());
    (top, rels)
}

/// Solves the gamma relations with the highest-index gammas as pivots.
/// Returns each gamma as a combination of the free ones.
fn solve_gammas(n: usize, m: usize) -> (BTreeMap<usize, Poly>, Vec<usize>) {
    let (top, rels) = gamma_relations(n, m);
    // column c <-> gamma_{top - c}
    let col = |k: usize| top - k;
    let mut rows: Vec<Vec<Rational>> = rels
        .iter()
        .map(|r| {
            let mut row = vec![Rational::default(); top];
            for (k, c) in r {
                row[col(*k)] = c.clone();
            }
            row
        })
        .collect();
    let pivots = rref(&mut rows, top);
    let free: Vec<usize> = (1..=top).filter(|k| !pivots.contains(&col(*k))).collect();
    let mut gamma: BTreeMap<usize, Poly> = free.iter().map(|&k| (k, gsym(k))).collect();
    for (r, &pc) in pivots.iter().enumerate() {
        let mut v = Poly::zero();
        for &f in &free {
            let c = &rows[r][col(f)];
            if !num_traits::Zero::is_zero(c) {
                v = v - gsym(f).scale(c);
            }
        }
        gamma.insert(top - pc, v);
    }
    (gamma, free)
}

/// The gamma family at `(n, m)`. `given` fixes gamma values by index;
/// dependent gammas are computed, and a supplied dependent value must agree.
pub fn leibniz_family(n: usize, m: usize, given: &BTreeMap<usize, Poly>) -> Result<GammaFamily> {
    if n < 2 || m < 1 {
        return Err(Error::OutOfRange(format!("gamma family needs n >= 2, m >= 1, got ({n},{m})")));
    }
    let (gamma0, free) = solve_gammas(n, m);
    let top = gamma0.len();
    if let Some(k) = given.keys().find(|&&k| k == 0 || k > top) {
        return Err(Error::OutOfRange(format!("gamma_{k} does not occur at ({n},{m})")));
    }
    let binding: BTreeMap<_, _> = free
        .iter()
        .filter_map(|k| given.get(k).map(|v| (Symbol::new(&format!("g{k}")), v.clone())))
        .collect();
    let gamma: BTreeMap<usize, Poly> = gamma0.iter().map(|(k, v)| (*k, v.subst_unchecked(&binding))).collect();
    for (k, v) in given {
        if !free.contains(k) && gamma[k] != *v {
            return Err(Error::InconsistentInput(format!(
                "gamma_{k} is determined by the others as {}, not {v}",
                gamma[k]
            )));
        }
    }
    let g = |k: usize| gamma.get(&k).cloned().unwrap_or_else(Poly::zero);
    let mut b = leibniz_builder(format!("gamma^{{{n},{m}}}"), n, m);
    for j in 1..m {
        b.add_int(bx(1), by(n, j), by(n, j + 1), -1);
    }
    b.add(by(n, 1), by(n, 1), bx(2), g(1));
    let mut yy = |i: usize, j: usize, smax: usize| {
        let mut c = Poly::zero();
        for s in 0..=smax {
            c = c + g(i + s).scale(&(sign(s) * binomial(j - 1, s)));
        }
        b.add(by(n, i), by(n, j), bx(i + j), c);
    };
    if n <= m {
        for i in 3..n {
            yy(i, 1, 0);
        }
        for i in 1..n.saturating_sub(1) {
            for j in 2..=n - i {
                yy(i, j, j - 1);
            }
        }
    } else {
        for i in 3..=m {
            yy(i, 1, 0);
        }
        for j in 2..=m {
            for i in 1..=m.min(n.saturating_sub(j)) {
                yy(i, j, (j - 1).min(m - i));
            }
        }
    }
    Ok(GammaFamily {
        algebra: b.build()?,
        gamma,
        free,
    })
}
