//! Case-splitting solver for polynomial equations over the rationals.
//!
//! Each branch carries substitutions for solved variables, equations still
//! open and groups of polynomials of which at least one is nonzero. The
//! solver never divides by a parameter: it eliminates variables that occur
//! linearly with a constant coefficient and otherwise splits on linear
//! factors. Witness searches may additionally guess values.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;

use crate::exact::{linear_factors, Poly, Rational, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    #[serde(serialize_with = "ser_poly")]
    pub poly: Poly,
    pub sources: Vec<String>,
}

impl Equation {
    pub fn new(poly: Poly, source: impl Into<String>) -> Self {
        Equation {
            poly,
            sources: vec![source.into()],
        }
    }
}

/// At least one member is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonzeroGroup {
    #[serde(serialize_with = "ser_polys")]
    pub polys: Vec<Poly>,
    pub label: Option<String>,
}

impl NonzeroGroup {
    pub fn single(p: Poly) -> Self {
        NonzeroGroup {
            polys: vec![p],
            label: None,
        }
    }

    pub fn labelled(polys: Vec<Poly>, label: impl Into<String>) -> Self {
        NonzeroGroup {
            polys,
            label: Some(label.into()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConstraintSystem {
    pub equations: Vec<Equation>,
    pub nonzero: Vec<NonzeroGroup>,
}

impl ConstraintSystem {
    pub fn push(&mut self, poly: Poly, source: impl Into<String>) {
        if !poly.is_zero() {
            self.equations.push(Equation::new(poly, source));
        }
    }

    /// Merges equations equal up to scaling, keeping every source.
    pub fn deduplicated(&self) -> ConstraintSystem {
        let mut map: BTreeMap<Poly, Vec<String>> = BTreeMap::new();
        let mut order = Vec::new();
        for e in &self.equations {
            let key = e.poly.monic();
            let entry = map.entry(key.clone()).or_insert_with(|| {
                order.push(key.clone());
                Vec::new()
            });
            for s in &e.sources {
                if !entry.contains(s) {
                    entry.push(s.clone());
                }
            }
        }
        ConstraintSystem {
            equations: order
                .into_iter()
                .map(|p| {
                    let sources = map.remove(&p).unwrap_or_default();
                    Equation { poly: p, sources }
                })
                .collect(),
            nonzero: self.nonzero.clone(),
        }
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        self.equations
            .iter()
            .flat_map(|e| e.poly.variables())
            .chain(self.nonzero.iter().flat_map(|g| g.polys.iter().flat_map(Poly::variables)))
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolverOptions {
    /// Variables eliminated first when several are available; the rest go
    /// in reverse name order.
    pub elimination_order: Vec<Symbol>,
    /// Factors mentioning earlier variables are split on first.
    pub split_order: Vec<Symbol>,
    /// Values tried when no exact step applies; empty disables guessing.
    pub guess_values: Vec<Rational>,
    pub guess_order: Vec<Symbol>,
    pub max_nodes: usize,
    pub stop_at_first: bool,
}

impl SolverOptions {
    pub fn exact() -> Self {
        SolverOptions {
            max_nodes: 100_000,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Decision {
    Solve {
        var: String,
        value: String,
        from: String,
    },
    Split {
        equation: String,
        parts: Vec<String>,
        chosen: usize,
        #[serde(skip)]
        equation_poly: Poly,
        #[serde(skip)]
        context: BTreeMap<Symbol, Poly>,
        #[serde(skip)]
        known_nonzero: Vec<Poly>,
    },
    Guess {
        var: String,
        value: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    #[serde(serialize_with = "ser_subst")]
    pub substitutions: BTreeMap<Symbol, Poly>,
    pub nonzero: Vec<NonzeroGroup>,
    pub residual: Vec<Equation>,
    pub trace: Vec<Decision>,
}

impl Branch {
    pub fn is_solved(&self) -> bool {
        self.residual.is_empty()
    }

    /// Variables of the original system left free on this branch.
    pub fn free_variables(&self, all: &BTreeSet<Symbol>) -> BTreeSet<Symbol> {
        let mut out: BTreeSet<Symbol> = all
            .iter()
            .filter(|s| !self.substitutions.contains_key(*s))
            .cloned()
            .collect();
        for v in self.substitutions.values() {
            out.extend(v.variables());
        }
        out
    }

    pub fn known_nonzero(&self) -> Vec<Poly> {
        self.nonzero
            .iter()
            .filter(|g| g.polys.len() == 1)
            .map(|g| g.polys[0].clone())
            .collect()
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        p.subst_unchecked(&self.substitutions)
    }

    /// Whether a point satisfies the branch description.
    pub fn contains_point(&self, point: &BTreeMap<Symbol, Rational>) -> bool {
        let value = |p: &Poly| p.eval(point).ok();
        for (s, v) in &self.substitutions {
            match (point.get(s), value(v)) {
                (Some(a), Some(b)) if *a == b => {}
                _ => return false,
            }
        }
        for e in &self.residual {
            if value(&e.poly).map_or(true, |v| !v.is_zero()) {
                return false;
            }
        }
        self.nonzero
            .iter()
            .all(|g| g.polys.iter().any(|p| value(p).is_some_and(|v| !v.is_zero())))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contradiction {
    /// Equation as it stood when it became impossible.
    pub equation: String,
    pub sources: Vec<String>,
    /// Factors removed because they are known to be nonzero.
    pub removed_factors: Vec<String>,
    /// Label of a violated nonzero group, when that is the cause.
    pub violated: Option<String>,
    #[serde(skip)]
    pub removed_polys: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeadBranch {
    #[serde(serialize_with = "ser_subst")]
    pub substitutions: BTreeMap<Symbol, Poly>,
    pub trace: Vec<Decision>,
    pub reason: Contradiction,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub branches: Vec<Branch>,
    pub dead: Vec<DeadBranch>,
    pub exhausted: bool,
    pub nodes: usize,
}

#[derive(Clone, Debug)]
struct OpenEq {
    poly: Poly,
    sources: Vec<String>,
    /// Distinct irreducible parts found so far.
    parts: Vec<Poly>,
}

#[derive(Clone, Debug)]
struct State {
    subst: BTreeMap<Symbol, Poly>,
    eqs: Vec<OpenEq>,
    groups: Vec<NonzeroGroup>,
    trace: Vec<Decision>,
}

enum Step {
    Continue,
    Dead(Contradiction),
}

pub(crate) fn parts_of(p: &Poly) -> Vec<Poly> {
    let f = linear_factors(p);
    let mut parts: Vec<Poly> = f.factors.into_iter().map(|(g, _)| g).collect();
    if !f.residual.is_constant() {
        parts.push(f.residual);
    }
    parts
}

fn product(parts: &[Poly]) -> Poly {
    parts.iter().fold(Poly::one(), |acc, p| &acc * p)
}

impl State {
    /// Factors known to be nonzero, with the label of the group implying it.
    fn known_nonzero(&self) -> BTreeMap<Poly, Option<String>> {
        let mut out = BTreeMap::new();
        for g in &self.groups {
            if g.polys.len() == 1 {
                for part in parts_of(&g.polys[0]) {
                    out.entry(part.monic()).or_insert_with(|| g.label.clone());
                }
            }
        }
        out
    }

    fn substitute(&mut self, var: &Symbol, value: &Poly) {
        for v in self.subst.values_mut() {
            if v.mentions(var) {
                *v = v.subst_one(var, value);
            }
        }
        self.subst.insert(var.clone(), value.clone());
        for e in &mut self.eqs {
            if e.poly.mentions(var) {
                e.poly = e.poly.subst_one(var, value);
                e.parts.clear();
            }
        }
        for g in &mut self.groups {
            for p in &mut g.polys {
                if p.mentions(var) {
                    *p = p.subst_one(var, value);
                }
            }
        }
    }

    fn normalize(&mut self) -> Step {
        loop {
            // nonzero groups
            let mut groups = Vec::new();
            for g in self.groups.drain(..) {
                if g.polys.iter().any(|p| p.constant_value().is_some_and(|c| !c.is_zero())) {
                    continue;
                }
                let polys: Vec<Poly> = g.polys.iter().filter(|p| !p.is_zero()).cloned().collect();
                if polys.is_empty() {
                    let label = g.label.clone().unwrap_or_else(|| {
                        format!("{} != 0", g.polys.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))
                    });
                    return Step::Dead(Contradiction {
                        equation: "0".into(),
                        sources: Vec::new(),
                        removed_factors: Vec::new(),
                        violated: Some(label),
                        removed_polys: Vec::new(),
                    });
                }
                let key: Vec<Poly> = polys.iter().map(Poly::monic).collect();
                if groups.iter().any(|h: &NonzeroGroup| h.polys.iter().map(Poly::monic).collect::<Vec<_>>() == key) {
                    continue;
                }
                groups.push(NonzeroGroup { polys, label: g.label });
            }
            self.groups = groups;

            let nonzero = self.known_nonzero();
            let mut changed = false;
            let mut eqs: Vec<OpenEq> = Vec::new();
            for mut e in self.eqs.drain(..) {
                if e.poly.is_zero() {
                    continue;
                }
                if e.parts.is_empty() {
                    e.parts = parts_of(&e.poly);
                }
                let (kept, removed): (Vec<Poly>, Vec<Poly>) =
                    e.parts.iter().cloned().partition(|p| !nonzero.contains_key(&p.monic()));
                if kept.is_empty() {
                    let violated = removed.iter().find_map(|p| nonzero.get(&p.monic()).cloned().flatten());
                    return Step::Dead(Contradiction {
                        equation: e.poly.to_string(),
                        sources: e.sources.clone(),
                        removed_factors: removed.iter().map(|p| p.to_string()).collect(),
                        violated,
                        removed_polys: removed,
                    });
                }
                let reduced = product(&kept).monic();
                if reduced != e.poly {
                    changed = true;
                }
                e.poly = reduced;
                e.parts = kept;
                if let Some(other) = eqs.iter_mut().find(|o| o.poly == e.poly) {
                    for s in e.sources {
                        if !other.sources.contains(&s) {
                            other.sources.push(s);
                        }
                    }
                } else {
                    eqs.push(e);
                }
            }
            eqs.sort_by(|a, b| (a.parts.len(), a.poly.degree(), &a.poly).cmp(&(b.parts.len(), b.poly.degree(), &b.poly)));
            self.eqs = eqs;
            if !changed {
                return Step::Continue;
            }
        }
    }

    fn pick_linear(&self, opts: &SolverOptions) -> Option<(usize, Symbol, Poly)> {
        let vars: BTreeSet<Symbol> = self.eqs.iter().flat_map(|e| e.poly.variables()).collect();
        let mut order: Vec<Symbol> = opts
            .elimination_order
            .iter()
            .filter(|s| vars.contains(*s))
            .cloned()
            .collect();
        order.extend(vars.iter().rev().filter(|s| !opts.elimination_order.contains(s)).cloned());
        for x in &order {
            for (i, e) in self.eqs.iter().enumerate() {
                if e.poly.degree_in(x) != 1 {
                    continue;
                }
                let a = e.poly.coeff_of(x, 1);
                if let Some(a) = a.constant_value() {
                    let rest = e.poly.coeff_of(x, 0);
                    let value = rest.scale(&(-Rational::from_integer(1.into()) / a));
                    return Some((i, x.clone(), value));
                }
            }
        }
        None
    }

    fn part_rank(p: &Poly, opts: &SolverOptions) -> (usize, String) {
        let r = p
            .variables()
            .iter()
            .filter_map(|s| opts.split_order.iter().position(|t| t == s))
            .min()
            .unwrap_or(usize::MAX);
        (r, p.to_string())
    }
}

fn ser_poly<S: serde::Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn ser_polys<S: serde::Serializer>(p: &[Poly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(|x| x.to_string()))
}

fn ser_subst<S: serde::Serializer>(m: &BTreeMap<Symbol, Poly>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

/// Solves `sys`, returning the terminal branches and the contradictions met.
pub fn solve(sys: &ConstraintSystem, opts: &SolverOptions) -> SolveOutcome {
    let initial = State {
        subst: BTreeMap::new(),
        eqs: sys
            .equations
            .iter()
            .filter(|e| !e.poly.is_zero())
            .map(|e| OpenEq {
                poly: e.poly.clone(),
                sources: e.sources.clone(),
                parts: Vec::new(),
            })
            .collect(),
        groups: sys.nonzero.clone(),
        trace: Vec::new(),
    };
    let mut out = SolveOutcome::default();
    let mut stack = vec![initial];
    let max_nodes = if opts.max_nodes == 0 { 100_000 } else { opts.max_nodes };

    'next: while let Some(mut st) = stack.pop() {
        out.nodes += 1;
        if out.nodes > max_nodes {
            out.exhausted = true;
            break;
        }
        loop {
            if let Step::Dead(reason) = st.normalize() {
                out.dead.push(DeadBranch {
                    substitutions: st.subst,
                    trace: st.trace,
                    reason,
                });
                continue 'next;
            }
            if st.eqs.is_empty() {
                out.branches.push(Branch {
                    substitutions: st.subst,
                    nonzero: st.groups,
                    residual: Vec::new(),
                    trace: st.trace,
                });
                if opts.stop_at_first {
                    return out;
                }
                continue 'next;
            }
            if let Some((i, x, value)) = st.pick_linear(opts) {
                let from = st.eqs[i].poly.to_string();
                st.trace.push(Decision::Solve {
                    var: x.to_string(),
                    value: value.to_string(),
                    from,
                });
                st.substitute(&x, &value);
                continue;
            }
            if let Some(i) = st.eqs.iter().position(|e| e.parts.len() >= 2) {
                let eq = st.eqs[i].clone();
                let mut parts = eq.parts.clone();
                parts.sort_by_cached_key(|p| State::part_rank(p, opts));
                let known: Vec<Poly> = st
                    .groups
                    .iter()
                    .filter(|g| g.polys.len() == 1)
                    .map(|g| g.polys[0].clone())
                    .collect();
                let mut children = Vec::new();
                for (k, part) in parts.iter().enumerate() {
                    let mut child = st.clone();
                    child.eqs[i] = OpenEq {
                        poly: part.clone(),
                        sources: eq.sources.clone(),
                        parts: vec![part.clone()],
                    };
                    for earlier in &parts[..k] {
                        child.groups.push(NonzeroGroup::single(earlier.clone()));
                    }
                    child.trace.push(Decision::Split {
                        equation: eq.poly.to_string(),
                        parts: parts.iter().map(|p| p.to_string()).collect(),
                        chosen: k,
                        equation_poly: eq.poly.clone(),
                        context: st.subst.clone(),
                        known_nonzero: known.clone(),
                    });
                    children.push(child);
                }
                stack.extend(children.into_iter().rev());
                continue 'next;
            }
            if !opts.guess_values.is_empty() {
                let vars: BTreeSet<Symbol> = st.eqs.iter().flat_map(|e| e.poly.variables()).collect();
                let x = opts
                    .guess_order
                    .iter()
                    .find(|s| vars.contains(*s))
                    .cloned()
                    .or_else(|| vars.iter().next().cloned());
                if let Some(x) = x {
                    let mut children = Vec::new();
                    for v in &opts.guess_values {
                        let mut child = st.clone();
                        let value = Poly::constant(v.clone());
                        child.trace.push(Decision::Guess {
                            var: x.to_string(),
                            value: value.to_string(),
                        });
                        child.substitute(&x, &value);
                        children.push(child);
                    }
                    stack.extend(children.into_iter().rev());
                    continue 'next;
                }
            }
            out.branches.push(Branch {
                substitutions: st.subst,
                nonzero: st.groups,
                residual: st
                    .eqs
                    .into_iter()
                    .map(|e| Equation {
                        poly: e.poly,
                        sources: e.sources,
                    })
                    .collect(),
                trace: st.trace,
            });
            continue 'next;
        }
    }
    out
}

/// Picks rational values for the free variables of a solved branch so that
/// every nonzero group holds. Values are tried in the given order.
pub fn instantiate_free(
    branch: &Branch,
    free: &[Symbol],
    values: &[Rational],
) -> Option<BTreeMap<Symbol, Rational>> {
    fn go(
        branch: &Branch,
        free: &[Symbol],
        values: &[Rational],
        k: usize,
        acc: &mut BTreeMap<Symbol, Rational>,
    ) -> bool {
        let ok = branch.nonzero.iter().all(|g| {
            g.polys.iter().any(|p| {
                let vars = p.variables();
                if vars.iter().all(|s| acc.contains_key(s)) {
                    p.eval(acc).map(|v| !v.is_zero()).unwrap_or(false)
                } else {
                    true
                }
            })
        });
        if !ok {
            return false;
        }
        if k == free.len() {
            return true;
        }
        for v in values {
            acc.insert(free[k].clone(), v.clone());
            if go(branch, free, values, k + 1, acc) {
                return true;
            }
        }
        acc.remove(&free[k]);
        false
    }
    let mut acc = BTreeMap::new();
    if go(branch, free, values, 0, &mut acc) {
        for (s, v) in &branch.substitutions {
            let val = v.eval(&acc).ok()?;
            acc.insert(s.clone(), val);
        }
        Some(acc)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    #[test]
    fn linear_elimination() {
        let mut sys = ConstraintSystem::default();
        sys.push(p("a - 2*b"), "e1");
        sys.push(p("b - 1"), "e2");
        let out = solve(&sys, &SolverOptions::exact());
        assert_eq!(out.branches.len(), 1);
        let b = &out.branches[0];
        assert_eq!(b.substitutions[&sym("a")], p("2"));
        assert_eq!(b.substitutions[&sym("b")], p("1"));
    }

    #[test]
    fn splits_products_in_priority_order() {
        let mut sys = ConstraintSystem::default();
        sys.push(p("a2*c"), "e1");
        let opts = SolverOptions {
            split_order: vec![sym("c")],
            ..SolverOptions::exact()
        };
        let out = solve(&sys, &opts);
        assert_eq!(out.branches.len(), 2);
        assert_eq!(out.branches[0].substitutions[&sym("c")], Poly::zero());
        assert_eq!(out.branches[1].substitutions[&sym("a2")], Poly::zero());
        assert_eq!(out.branches[1].known_nonzero(), vec![p("c")]);
    }

    #[test]
    fn nonzero_factors_are_stripped() {
        let mut sys = ConstraintSystem::default();
        sys.push(p("c*q"), "src");
        sys.nonzero.push(NonzeroGroup::single(p("c")));
        sys.nonzero.push(NonzeroGroup::labelled(vec![p("q")], "q matters"));
        let out = solve(&sys, &SolverOptions::exact());
        assert!(out.branches.is_empty());
        assert_eq!(out.dead.len(), 1);
        assert_eq!(out.dead[0].reason.sources, vec!["src".to_string()]);
    }

    #[test]
    fn nonzero_groups_die_when_emptied() {
        let mut sys = ConstraintSystem::default();
        sys.push(p("c"), "e1");
        sys.push(p("d"), "e2");
        sys.nonzero.push(NonzeroGroup::labelled(vec![p("c"), p("d")], "(c, d) != 0"));
        let out = solve(&sys, &SolverOptions::exact());
        assert!(out.branches.is_empty());
        assert_eq!(out.dead[0].reason.violated.as_deref(), Some("(c, d) != 0"));
    }

    #[test]
    fn guessing_finds_witness() {
        let mut sys = ConstraintSystem::default();
        sys.push(p("x^2 - y^2 - 3"), "e");
        let opts = SolverOptions {
            guess_values: vec![rat(0), rat(1), rat(2), rat(-1)],
            stop_at_first: true,
            ..SolverOptions::exact()
        };
        let out = solve(&sys, &opts);
        let b = &out.branches[0];
        let mut pt = BTreeMap::new();
        for (k, v) in &b.substitutions {
            pt.insert(k.clone(), v.constant_value().unwrap());
        }
        assert_eq!(p("x^2 - y^2 - 3").eval(&pt).unwrap(), rat(0));
    }
}
