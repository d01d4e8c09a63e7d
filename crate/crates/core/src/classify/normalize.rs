//! Changes of basis that fix one coefficient of a parametric law.
//!
//! A move prescribes new images of the generators (`X0, X1, Y1` for Lie,
//! `X1, Y1` for Leibniz); the rest of the basis follows from the chain
//! products. The move itself is applied symbolically by setting its symbol
//! to the target value, the other parameters being renamed implicitly. The
//! induced map is checked at rational points where every root is rational.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{inverse, rat, rational_sqrt, MatrixQ, Poly, Rational, Symbol};
use crate::superalg::{add_scaled, transport, unit, verify_homomorphism, Kind, LinearMap, SparseVec, SuperAlgebra};

use super::solver::{solve, Branch, ConstraintSystem, NonzeroGroup, SolverOptions};

/// `c * sym^exp`, or just `c` without a symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coef {
    #[serde(serialize_with = "ser_rat")]
    pub c: Rational,
    pub sym: Option<Symbol>,
    #[serde(serialize_with = "ser_rat")]
    pub exp: Rational,
}

impl Coef {
    pub fn one() -> Self {
        Coef { c: rat(1), sym: None, exp: rat(0) }
    }

    /// Value at a point, `None` when the power is irrational or undefined.
    fn eval(&self, point: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
        let Some(s) = &self.sym else {
            return Some(self.c.clone());
        };
        let v = point.get(s)?;
        if v.is_zero() {
            return None;
        }
        let exp = &self.exp;
        let denom = exp.denom().clone();
        let base = match denom.to_string().as_str() {
            "1" => v.clone(),
            "2" => rational_sqrt(v)?,
            _ => return None,
        };
        let e: i32 = exp.numer().to_string().parse().ok()?;
        Some(&self.c * pow(&base, e))
    }
}

fn pow(b: &Rational, e: i32) -> Rational {
    let mut out = rat(1);
    for _ in 0..e.unsigned_abs() {
        out *= b;
    }
    if e < 0 {
        rat(1) / out
    } else {
        out
    }
}

fn ser_rat<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::exact::format_rational(q))
}

/// New image of one generator in old coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenImage {
    pub gen: String,
    pub terms: Vec<(String, Coef)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub label: String,
    pub symbol: Symbol,
    #[serde(serialize_with = "ser_rat")]
    pub target: Rational,
    /// The move divides by the symbol.
    pub requires_nonzero: bool,
    pub images: Vec<GenImage>,
}

impl Move {
    /// Rescales generators: `gen ↦ sym^(num/den) gen`. Fixes `sym` to 1.
    pub fn scale(sym: &str, gens: &[(&str, i64, i64)]) -> Self {
        let s = Symbol::new(sym);
        let images = gens
            .iter()
            .map(|&(g, num, den)| GenImage {
                gen: g.to_string(),
                terms: vec![(
                    g.to_string(),
                    Coef {
                        c: rat(1),
                        sym: Some(s.clone()),
                        exp: Rational::new(num.into(), den.into()),
                    },
                )],
            })
            .collect::<Vec<_>>();
        let desc: Vec<String> = gens.iter().map(|(g, n, d)| format!("{g} -> {sym}^({n}/{d}) {g}")).collect();
        Move {
            label: format!("{sym} = 1 via {}", desc.join(", ")),
            symbol: s,
            target: rat(1),
            requires_nonzero: true,
            images,
        }
    }

    /// `gen ↦ gen - sym * other`. Fixes `sym` to 0.
    pub fn shear(sym: &str, gen: &str, other: &str) -> Self {
        let s = Symbol::new(sym);
        Move {
            label: format!("{sym} = 0 via {gen} -> {gen} - {sym} {other}"),
            symbol: s.clone(),
            target: rat(0),
            requires_nonzero: false,
            images: vec![GenImage {
                gen: gen.to_string(),
                terms: vec![
                    (gen.to_string(), Coef::one()),
                    (other.to_string(), Coef { c: rat(-1), sym: Some(s), exp: rat(1) }),
                ],
            }],
        }
    }
}

/// Whether every member of some nonzero group is a multiple of `s`.
pub fn known_nonzero(branch: &Branch, s: &Symbol) -> bool {
    let sp = Poly::symbol(s.clone());
    branch.nonzero.iter().any(|g| {
        let live: Vec<Poly> = g.polys.iter().map(|p| branch.apply(p)).filter(|p| !p.is_zero()).collect();
        !live.is_empty()
            && live.iter().all(|p| {
                crate::exact::linear_factors(p)
                    .factors
                    .iter()
                    .any(|(f, _)| f.proportional(&sp))
            })
    })
}

/// How a move relates to a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Applicability {
    Apply,
    /// The coefficient already has the target value.
    Identity,
    Inapplicable,
}

pub fn applicability(branch: &Branch, mv: &Move) -> Applicability {
    match branch.substitutions.get(&mv.symbol) {
        Some(v) if v.constant_value().as_ref() == Some(&mv.target) => Applicability::Identity,
        Some(_) => Applicability::Inapplicable,
        None if mv.requires_nonzero && !known_nonzero(branch, &mv.symbol) => Applicability::Inapplicable,
        None => Applicability::Apply,
    }
}

/// Applies one move to a branch, recording it as a substitution.
pub fn normalize(branch: &Branch, mv: &Move) -> Result<Branch> {
    match applicability(branch, mv) {
        Applicability::Identity => Ok(branch.clone()),
        Applicability::Inapplicable => Err(Error::InapplicableMove(format!(
            "{} on a branch where {} is {}",
            mv.label,
            mv.symbol,
            branch
                .substitutions
                .get(&mv.symbol)
                .map(|p| p.to_string())
                .unwrap_or_else(|| "not known to be nonzero".into())
        ))),
        Applicability::Apply => {
            let value = Poly::constant(mv.target.clone());
            let mut out = branch.clone();
            for v in out.substitutions.values_mut() {
                *v = v.subst_one(&mv.symbol, &value);
            }
            out.substitutions.insert(mv.symbol.clone(), value.clone());
            for g in &mut out.nonzero {
                for p in &mut g.polys {
                    *p = p.subst_one(&mv.symbol, &value);
                }
            }
            // A condition that only held in the old coordinates (a sheared
            // coefficient being nonzero, say) no longer applies.
            let subs = out.substitutions.clone();
            out.nonzero.retain(|g| g.polys.iter().any(|p| !out_apply(&subs, p).is_zero()));
            Ok(out)
        }
    }
}

fn out_apply(subs: &BTreeMap<Symbol, Poly>, p: &Poly) -> Poly {
    p.subst_unchecked(subs)
}

/// Outcome of checking a move at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveCheck {
    pub point: BTreeMap<String, String>,
    pub ok: bool,
    pub detail: Option<String>,
}

fn generator_names(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Lie => &["X0", "X1", "Y1"],
        Kind::Leibniz => &["X1", "Y1"],
    }
}

/// Images of the whole basis from generator images, following the chain
/// products of the adapted basis.
fn extend_chain(alg: &SuperAlgebra, gens: &BTreeMap<String, SparseVec>) -> Result<Vec<SparseVec>> {
    let idx = |name: &str| alg.index_of(name);
    let get = |name: &str| -> Result<SparseVec> {
        match gens.get(name) {
            Some(v) => Ok(v.clone()),
            None => Ok(unit(idx(name)?)),
        }
    };
    let mut out: Vec<SparseVec> = vec![SparseVec::new(); alg.dim()];
    let even = alg.even_basis().to_vec();
    let odd = alg.odd_basis().to_vec();
    match alg.kind() {
        Kind::Lie => {
            let x0 = get("X0")?;
            out[idx("X0")?] = x0.clone();
            let mut cur = get("X1")?;
            for name in &even[1..] {
                out[idx(name)?] = cur.clone();
                cur = alg.mul(&x0, &cur);
            }
            let mut cur = get("Y1")?;
            for name in &odd {
                out[idx(name)?] = cur.clone();
                cur = alg.mul(&x0, &cur);
            }
        }
        Kind::Leibniz => {
            let x1 = get("X1")?;
            let mut cur = x1.clone();
            for name in &even {
                out[idx(name)?] = cur.clone();
                cur = alg.mul(&cur, &x1);
            }
            let mut cur = get("Y1")?;
            for name in &odd {
                out[idx(name)?] = cur.clone();
                cur = alg.mul(&cur, &x1);
            }
        }
    }
    Ok(out)
}

/// Checks a move at one point: builds the map from the generator images in
/// the law before the move, moves the law to the new basis, fits the
/// parameters of the law after the move, and verifies the homomorphism.
pub fn check_move_at(
    before: &SuperAlgebra,
    after: &SuperAlgebra,
    mv: &Move,
    point: &BTreeMap<Symbol, Rational>,
) -> Result<std::result::Result<(), String>> {
    let pre = before.instantiate(point)?;
    let mut gens = BTreeMap::new();
    for g in generator_names(pre.kind()) {
        let Some(img) = mv.images.iter().find(|i| i.gen == *g) else {
            continue;
        };
        let mut v = SparseVec::new();
        for (b, coef) in &img.terms {
            let Some(c) = coef.eval(point) else {
                return Ok(Err(format!("coefficient of {b} in the image of {g} is not rational")));
            };
            add_scaled(&mut v, &unit(pre.index_of(b)?), &Poly::constant(c));
        }
        gens.insert(g.to_string(), v);
    }
    let cols = extend_chain(&pre, &gens)?;
    let n = pre.dim();
    let dense: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cols[j].get(&i).and_then(Poly::constant_value).unwrap_or_else(|| rat(0)))
                .collect()
        })
        .collect();
    let Some(inv) = inverse(&dense) else {
        return Ok(Err("induced map is singular".into()));
    };
    let basis = MatrixQ::from_rational_rows(&dense, n);
    let inv_m = MatrixQ::from_rational_rows(&inv, n);
    let moved = transport(&pre, &basis, &inv_m, "moved", pre.even_basis().to_vec(), pre.odd_basis().to_vec())?;

    // Fit the parameters of `after` so that it equals `moved`.
    let mut sys = ConstraintSystem::default();
    for a in 0..n {
        for b in 0..n {
            let t = after.bracket(a, b);
            let m = moved.bracket(a, b);
            let keys: std::collections::BTreeSet<usize> = t.keys().chain(m.keys()).copied().collect();
            for k in keys {
                let lhs = t.get(&k).cloned().unwrap_or_else(Poly::zero);
                let rhs = m.get(&k).cloned().unwrap_or_else(Poly::zero);
                sys.push(&lhs - &rhs, format!("({},{})", a, b));
            }
        }
    }
    let out = solve(&sys.deduplicated(), &SolverOptions::exact());
    let Some(fit) = out.branches.iter().find(|b| b.is_solved()) else {
        let why = out
            .dead
            .first()
            .map(|d| format!("moved law does not fit: {}", d.reason.equation))
            .unwrap_or_else(|| "moved law does not fit".into());
        return Ok(Err(why));
    };
    let mut values: BTreeMap<Symbol, Rational> = after.parameters().iter().map(|s| (s.clone(), rat(1))).collect();
    for (s, v) in &fit.substitutions {
        let val = v.eval(&values.clone()).unwrap_or_else(|_| rat(1));
        values.insert(s.clone(), val);
    }
    let post = after.instantiate(&values)?;
    let f = LinearMap::new(&post, &pre, basis)?;
    let bad = verify_homomorphism(&f, &post, &pre);
    Ok(match bad.first() {
        None => Ok(()),
        Some(v) => Err(format!("not a homomorphism on ({}, {}): {}", v.pair.0, v.pair.1, v.residual)),
    })
}

/// Candidate sample values: small squares so that half powers stay rational.
pub const SAMPLE_SQUARES: [(i64, i64); 7] = [(4, 1), (9, 1), (1, 4), (16, 1), (25, 4), (1, 1), (36, 1)];

/// Points for the free symbols of a branch satisfying its nonzero groups.
pub fn sample_points(branch: &Branch, free: &[Symbol], count: usize) -> Vec<BTreeMap<Symbol, Rational>> {
    let vals: Vec<Rational> = SAMPLE_SQUARES.iter().map(|&(a, b)| Rational::new(a.into(), b.into())).collect();
    let mut out = Vec::new();
    for shift in 0..vals.len() * 3 {
        let mut point = BTreeMap::new();
        for (j, s) in free.iter().enumerate() {
            let k = (shift + j * (1 + shift / vals.len())) % vals.len();
            point.insert(s.clone(), vals[k].clone());
        }
        let ok = branch.nonzero.iter().all(|g: &NonzeroGroup| {
            g.polys
                .iter()
                .any(|p| branch.apply(p).eval(&point).map(|v| !v.is_zero()).unwrap_or(false))
        });
        if ok && !out.contains(&point) {
            out.push(point);
            if out.len() == count {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Poly;

    fn branch_with(nonzero: &[&str]) -> Branch {
        Branch {
            substitutions: BTreeMap::new(),
            nonzero: nonzero.iter().map(|s| NonzeroGroup::single(Poly::var(s))).collect(),
            residual: Vec::new(),
            trace: Vec::new(),
        }
    }

    #[test]
    fn scale_needs_nonzero() {
        let mv = Move::scale("a", &[("X1", -1, 1)]);
        assert_eq!(applicability(&branch_with(&[]), &mv), Applicability::Inapplicable);
        assert_eq!(applicability(&branch_with(&["a"]), &mv), Applicability::Apply);
        let mut b = branch_with(&[]);
        b.substitutions.insert(Symbol::new("a"), Poly::one());
        assert_eq!(applicability(&b, &mv), Applicability::Identity);
        assert_eq!(normalize(&b, &mv).unwrap(), b);
        b.substitutions.insert(Symbol::new("a"), Poly::zero());
        assert!(matches!(normalize(&b, &mv), Err(Error::InapplicableMove(_))));
    }

    #[test]
    fn half_powers_need_squares() {
        let c = Coef { c: rat(1), sym: Some(Symbol::new("g")), exp: Rational::new((-1).into(), 2.into()) };
        let at = |v: i64| c.eval(&[(Symbol::new("g"), rat(v))].into());
        assert_eq!(at(4), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(at(2), None);
        assert_eq!(at(0), None);
    }
}
