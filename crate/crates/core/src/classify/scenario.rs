//! Classification scenarios as data, and the runner that solves them.
//!
//! A scenario is a list of runs. Each run fixes dimensions and either a
//! combination of cochains on the Lie model (with symbolic coefficients) or
//! a Leibniz ansatz in an adapted basis. The runner extracts the equations,
//! solves them with case splits, splits on selected free coefficients,
//! applies normalization moves and matches the resulting laws against the
//! catalog.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::catalog::{self, lie_model, Args, Role};
use crate::deform::{deform, phi, phibar, psi, Cochain2};
use crate::error::{Error, Result};
use crate::exact::{ratio, Poly, Rational, Symbol};
use crate::par::{map_slice, Exec};
use crate::superalg::{basis_names, check_identity, Builder, Kind, SuperAlgebra};

use super::constraints::{deformation_constraints, extract_constraints_with};
use super::normalize::{applicability, check_move_at, known_nonzero, normalize, sample_points, Applicability, Move};
use super::solver::{parts_of, solve, Branch, ConstraintSystem, NonzeroGroup, SolverOptions};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "cochain", rename_all = "lowercase")]
pub enum CochainSpec {
    Phi { k: usize },
    Psi { s: usize, k: usize },
    Phibar { k: usize },
    Qbrackets,
}

impl CochainSpec {
    fn build(&self, n: usize, m: usize) -> Result<Cochain2> {
        match *self {
            CochainSpec::Phi { k } => phi(n, m, k),
            CochainSpec::Psi { s, k } => psi(n, m, s, k),
            CochainSpec::Phibar { k } => phibar(n, m, k),
            CochainSpec::Qbrackets => catalog::q_cochain(n, m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coeff: String,
    #[serde(flatten)]
    pub cochain: CochainSpec,
}

/// Leibniz products in an adapted basis where `Y(k)..Ym` lie in the right
/// annihilator: `[X1, Yj] = -Y(j+1)` for `j <= k-2`, `[X1, Y(k-1)] = alpha
/// Y(k)`, and graded products `[Xi, Yj] = b{i}_{j} Y(i+j)` (`i >= 2`) and
/// `[Yi, Yj] = g{i}_{j} X(i+j)` for `j <= k-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ansatz {
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Setup {
    /// The Lie model plus a combination of cochains.
    Deformation { terms: Vec<Term> },
    Leibniz { ansatz: Ansatz },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Group {
    pub polys: Vec<String>,
    pub label: Option<String>,
}

/// An equation expected among the extracted ones, after substitutions and
/// up to scaling and factors known to be nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub poly: String,
    pub after: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expect {
    pub laws: Vec<String>,
    /// Label of a nonzero condition some branch must violate.
    pub contradiction: Option<String>,
    /// Branches where every odd-odd product vanishes are acceptable.
    pub degenerate_ok: bool,
    /// Values every branch ending in a law must have before normalization.
    pub law_substitutions: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Run {
    pub n: usize,
    pub m: usize,
    pub setup: Setup,
    pub nonzero: Vec<Group>,
    pub elimination_order: Vec<String>,
    pub split_free: Vec<String>,
    pub moves: Vec<Move>,
    pub checks: Vec<Check>,
    pub expect: Expect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub id: &'static str,
    pub title: &'static str,
    pub notes: Vec<&'static str>,
    pub runs: Vec<Run>,
}

fn s(x: &str) -> String {
    x.to_string()
}

fn term(coeff: &str, cochain: CochainSpec) -> Term {
    Term { coeff: s(coeff), cochain }
}

fn group(polys: &[&str], label: Option<&str>) -> Group {
    Group {
        polys: polys.iter().map(|p| s(p)).collect(),
        label: label.map(s),
    }
}

fn check(poly: &str, after: &[(&str, &str)]) -> Check {
    Check {
        poly: s(poly),
        after: after.iter().map(|(a, b)| (s(a), s(b))).collect(),
    }
}

fn laws(ids: &[&str]) -> Expect {
    Expect {
        laws: ids.iter().map(|x| s(x)).collect(),
        contradiction: None,
        degenerate_ok: false,
        law_substitutions: Vec::new(),
    }
}

fn lie_run(n: usize, m: usize, terms: Vec<Term>, expect: Expect) -> Run {
    Run {
        n,
        m,
        setup: Setup::Deformation { terms },
        nonzero: Vec::new(),
        elimination_order: Vec::new(),
        split_free: Vec::new(),
        moves: Vec::new(),
        checks: Vec::new(),
        expect,
    }
}

fn psi_term(coeff: &str, k: usize) -> Term {
    term(coeff, CochainSpec::Psi { s: k + 1, k })
}

/// Every weight-zero cochain available on `L^{n,m}` with symbolic
/// coefficients `c_k` (for `φ_{k,2k}`) and `a_k` (for `Ψ^{k+1}_{k,1}`).
fn generic_run(n: usize, m: usize, expect: Expect) -> Run {
    let cs: Vec<usize> = (1..=m.min(n / 2)).collect();
    let mut terms: Vec<Term> = cs.iter().map(|&k| term(&format!("c{k}"), CochainSpec::Phi { k })).collect();
    let ak: Vec<usize> = (1..=n).filter(|&k| psi(n, m, k + 1, k).is_ok_and(|c| !c.is_zero())).collect();
    terms.extend(ak.iter().map(|&k| psi_term(&format!("a{k}"), k)));
    let names: Vec<String> = cs.iter().map(|k| format!("c{k}")).collect();
    let mut run = lie_run(n, m, terms, expect);
    if !names.is_empty() {
        run.nonzero.push(Group {
            polys: names.clone(),
            label: Some(s("non-degenerate")),
        });
    }
    run.elimination_order = names.clone();
    run.split_free = ak.iter().map(|k| format!("a{k}")).collect();
    if n == 2 && ak.contains(&1) {
        run.moves.push(Move::shear("a1", "X1", "X0"));
    } else if ak.contains(&1) {
        run.moves.push(Move::scale("a1", &[("X1", -1, 1)]));
    }
    for name in names.iter().rev() {
        run.moves.push(Move::scale(name, &[("Y1", -1, 2)]));
    }
    run
}

fn no_laws() -> Expect {
    laws(&[])
}

fn leibniz_run(n: usize, m: usize, k: usize, expect: Expect) -> Run {
    Run {
        n,
        m,
        setup: Setup::Leibniz { ansatz: Ansatz { k } },
        nonzero: vec![group(&["1 + alpha"], Some("1+alpha != 0"))],
        elimination_order: Vec::new(),
        split_free: Vec::new(),
        moves: Vec::new(),
        checks: Vec::new(),
        expect,
    }
}

fn degenerate() -> Expect {
    Expect {
        degenerate_ok: true,
        ..no_laws()
    }
}

fn first_layer_run(n: usize, m: usize) -> Run {
    let mut run = leibniz_run(
        n,
        m,
        2,
        Expect {
            degenerate_ok: true,
            law_substitutions: (2..=(n - 1).min(m)).map(|i| (format!("g{i}_1"), s("g1_1"))).collect(),
            ..laws(&["NG"])
        },
    );
    run.elimination_order = (2..=(n - 1).min(m)).map(|i| format!("g{i}_1")).collect();
    run.split_free = vec![s("g1_1")];
    run.moves.push(Move::scale("g1_1", &[("Y1", -1, 2)]));
    run
}

fn psi_stack(n: usize, m: usize, top: usize, first: &str) -> Vec<Term> {
    let mut t = vec![term(first, CochainSpec::Phi { k: 1 })];
    for k in 1..=top {
        if psi(n, m, k + 1, k).is_ok_and(|c| !c.is_zero()) {
            t.push(psi_term(&format!("a{k}"), k));
        }
    }
    t
}

/// All built-in scenarios in listing order.
pub fn scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();

    let mut runs = Vec::new();
    for n in 2..=5 {
        for m in 1..=(6 - n) {
            let expect = match (n, m) {
                (2, _) => laws(&["L+phi12"]),
                (3, 2) | (3, 3) => laws(&["L+phi12", "L+phi12+psi211"]),
                (4, 2) => laws(&["L+phibar24"]),
                _ => no_laws(),
            };
            runs.push(generic_run(n, m, expect));
        }
    }
    out.push(Scenario {
        id: "4.1",
        title: "Lie, total dimension at most 7",
        notes: vec![],
        runs,
    });

    let runs = (5..=7)
        .map(|m| {
            let mut r = lie_run(
                2,
                m,
                vec![
                    term("1", CochainSpec::Phi { k: 1 }),
                    psi_term("a", 1),
                    psi_term("b", 2),
                ],
                laws(&["L+phi12"]),
            );
            r.checks.push(check("b", &[]));
            r.moves.push(Move::shear("a", "X1", "X0"));
            r
        })
        .collect();
    out.push(Scenario {
        id: "4.2",
        title: "Lie, n = 2 and m >= 5",
        notes: vec![],
        runs,
    });

    let mut r = lie_run(
        3,
        4,
        psi_stack(3, 4, 3, "1"),
        laws(&["L+phi12", "L+phi12+psi431", "L+phi12+psi211"]),
    );
    r.checks = vec![check("a2", &[]), check("a1*a3", &[("a2", "0")])];
    r.split_free = vec![s("a1"), s("a3")];
    r.moves = vec![
        Move::scale("a3", &[("X1", -1, 1), ("Y1", -1, 2)]),
        Move::scale("a1", &[("X1", -1, 1), ("Y1", -1, 2)]),
    ];
    out.push(Scenario {
        id: "4.3",
        title: "Lie, n = 3 and m = 4",
        notes: vec![],
        runs: vec![r],
    });

    let runs = (5..=7)
        .map(|m| {
            let mut r = lie_run(3, m, psi_stack(3, m, 3, "1"), laws(&["L+phi12", "L+phi12+psi211"]));
            r.checks = vec![check("a2", &[]), check("a3", &[("a2", "0")])];
            r.split_free = vec![s("a1")];
            r.moves = vec![Move::scale("a1", &[("X1", -1, 1), ("Y1", -1, 2)])];
            r
        })
        .collect();
    out.push(Scenario {
        id: "4.4",
        title: "Lie, n = 3 and m >= 5",
        notes: vec!["m is checked at 5, 6 and 7"],
        runs,
    });

    let runs = [(3, 1), (4, 1), (5, 1), (5, 2), (6, 2), (7, 3)]
        .into_iter()
        .map(|(n, m)| generic_run(n, m, no_laws()))
        .collect();
    out.push(Scenario {
        id: "4.5",
        title: "Lie, n > 2m",
        notes: vec![
            "solved directly at small dimensions; the general lower bound on cochain weights for n > 2m is not mechanized",
        ],
        runs,
    });

    let mut r = lie_run(
        4,
        3,
        vec![
            term("c", CochainSpec::Phi { k: 1 }),
            term("d", CochainSpec::Phi { k: 2 }),
            psi_term("a1", 1),
            psi_term("a2", 2),
        ],
        laws(&["L+phi24", "L+phi24+psi211+2psi321", "L+phi12+tphi24", "L+4phi12+phi24+psi211"]),
    );
    r.nonzero = vec![group(&["c", "d"], Some("non-degenerate"))];
    r.elimination_order = vec![s("a2"), s("c")];
    r.checks = vec![check("a2*c", &[]), check("a1*d + (a2 - a1)*(c/2 - d)", &[])];
    r.split_free = vec![s("a1"), s("c")];
    r.moves = vec![
        Move::scale("a1", &[("X1", -1, 1)]),
        Move::scale("d", &[("Y1", -1, 2)]),
        Move::scale("c", &[("Y1", -1, 2)]),
    ];
    out.push(Scenario {
        id: "4.6",
        title: "Lie, n = 4 and m = 3",
        notes: vec!["the one-parameter family is reported without deciding isomorphism between its members"],
        runs: vec![r],
    });

    let phibar_run = |n: usize, k: usize, id: &str| {
        let mut r = lie_run(
            n,
            3,
            vec![
                term("c", CochainSpec::Phibar { k }),
                psi_term("a1", 1),
                psi_term("a2", 2),
            ],
            Expect {
                law_substitutions: vec![(s("a1"), s("0")), (s("a2"), s("0"))],
                ..laws(&[id])
            },
        );
        r.nonzero = vec![group(&["c"], None)];
        r.split_free = vec![s("a1"), s("a2")];
        r.moves = vec![Move::scale("c", &[("Y1", -1, 2)])];
        r
    };
    out.push(Scenario {
        id: "4.7",
        title: "Lie, n = 5 and m = 3 on the model",
        notes: vec![],
        runs: vec![phibar_run(5, 2, "L+phibar24")],
    });

    let mut r = phibar_run(5, 2, "L+phibar24");
    if let Setup::Deformation { terms } = &mut r.setup {
        terms.push(term("q", CochainSpec::Qbrackets));
    }
    r.nonzero.push(group(&["q"], Some("[X1,X4]=0")));
    r.expect = Expect {
        contradiction: Some(s("[X1,X4]=0")),
        ..no_laws()
    };
    out.push(Scenario {
        id: "4.7-Q5",
        title: "Lie, n = 5 and m = 3 on Q_5",
        notes: vec![],
        runs: vec![r],
    });

    out.push(Scenario {
        id: "4.8",
        title: "Lie, n = 6 and m = 3",
        notes: vec![],
        runs: vec![phibar_run(6, 3, "L+phibar36")],
    });

    out.push(Scenario {
        id: "5.3-case1.1",
        title: "Leibniz, n <= m, Y2 in the right annihilator",
        notes: vec![],
        runs: [(3, 4), (4, 4), (3, 5), (4, 5), (5, 5)]
            .into_iter()
            .map(|(n, m)| first_layer_run(n, m))
            .collect(),
    });

    let mut runs = Vec::new();
    for (n, m) in [(3, 4), (3, 5), (3, 6), (4, 5), (4, 6)] {
        for k in 3..=m {
            runs.push(leibniz_run(n, m, k, degenerate()));
        }
    }
    out.push(Scenario {
        id: "5.3-case1.2b",
        title: "Leibniz, n < m, Y(k) in the right annihilator for some k >= 3",
        notes: vec![],
        runs,
    });

    out.push(Scenario {
        id: "5.3-case2.1",
        title: "Leibniz, n > m, Y2 in the right annihilator",
        notes: vec![],
        runs: [(5, 4), (6, 4), (6, 5)]
            .into_iter()
            .map(|(n, m)| first_layer_run(n, m))
            .collect(),
    });

    let mut runs = Vec::new();
    for (n, m) in [(5, 4), (6, 4), (6, 5)] {
        for k in 3..m {
            runs.push(leibniz_run(n, m, k, degenerate()));
        }
    }
    out.push(Scenario {
        id: "5.3-case2.2b",
        title: "Leibniz, n > m, Y(k) in the right annihilator for some k >= 3",
        notes: vec![],
        runs,
    });
    for sc in &mut out {
        if sc.runs.iter().any(|r| r.moves.iter().any(has_root)) {
            sc.notes.push(ROOT_NOTE);
        }
    }
    out
}

/// Attached to every scenario whose normalization takes square roots.
pub const ROOT_NOTE: &str = "scale changes through square roots are checked only at parameter values that are rational squares";

fn has_root(mv: &Move) -> bool {
    mv.images
        .iter()
        .flat_map(|g| &g.terms)
        .any(|(_, c)| c.sym.is_some() && !c.exp.is_integer())
}

pub fn find_scenario(id: &str) -> Result<Scenario> {
    scenarios()
        .into_iter()
        .find(|sc| sc.id == id)
        .ok_or_else(|| Error::UnknownScenario(id.to_string()))
}

/// The parametric algebra of a Leibniz ansatz.
pub fn leibniz_ansatz(n: usize, m: usize, a: &Ansatz) -> Result<SuperAlgebra> {
    let k = a.k;
    if n < 2 || m < 2 || k < 2 || k > m {
        return Err(Error::OutOfRange(format!("ansatz needs n, m >= 2 and 2 <= k <= m, got ({n},{m},{k})")));
    }
    let x = |i: usize| i - 1;
    let y = |j: usize| n + j - 1;
    let mut b = Builder::new(
        format!("A^{{{n},{m}}}_{k}"),
        Kind::Leibniz,
        basis_names("X", 1, n),
        basis_names("Y", 1, m),
    );
    for i in 1..n {
        b.add_int(x(i), x(1), x(i + 1), 1);
    }
    for j in 1..m {
        b.add_int(y(j), x(1), y(j + 1), 1);
    }
    for j in 1..=k - 2 {
        b.add_int(x(1), y(j), y(j + 1), -1);
    }
    b.add(x(1), y(k - 1), y(k), Poly::var("alpha"));
    for j in 1..k {
        for i in 2..=n {
            if i + j <= m {
                b.add(x(i), y(j), y(i + j), Poly::var(&format!("b{i}_{j}")));
            }
        }
        for i in 1..=m {
            if i + j <= n {
                b.add(y(i), y(j), x(i + j), Poly::var(&format!("g{i}_{j}")));
            }
        }
    }
    b.build()
}

/// What a run is solved over: the symbolic law and its equations.
struct Prepared {
    kind: Kind,
    base: Option<SuperAlgebra>,
    cochain: Option<Cochain2>,
    ansatz: Option<SuperAlgebra>,
    system: ConstraintSystem,
    symbols: BTreeSet<Symbol>,
}

impl Prepared {
    fn law(&self, subs: &BTreeMap<Symbol, Poly>) -> Result<SuperAlgebra> {
        match (&self.base, &self.cochain, &self.ansatz) {
            (Some(base), Some(c), _) => deform(base, &c.subst(subs)),
            (_, _, Some(a)) => Ok(a.subst(subs)),
            _ => unreachable!("prepared runs carry a law"),
        }
    }
}

fn parse(p: &str) -> Result<Poly> {
    Poly::parse(p)
}

fn prepare(run: &Run, exec: Exec) -> Result<Prepared> {
    let (kind, base, cochain, ansatz, mut system) = match &run.setup {
        Setup::Deformation { terms } => {
            let base = lie_model(run.n, run.m)?;
            let built: Vec<(Poly, Cochain2)> = terms
                .iter()
                .map(|t| Ok((parse(&t.coeff)?, t.cochain.build(run.n, run.m)?)))
                .collect::<Result<_>>()?;
            let refs: Vec<(Poly, &Cochain2)> =
                built.iter().filter(|(_, c)| !c.is_zero()).map(|(p, c)| (p.clone(), c)).collect();
            let c = Cochain2::combine("psi", &base, &refs)?;
            let sys = deformation_constraints(&c, exec)?;
            (Kind::Lie, Some(base), Some(c), None, sys)
        }
        Setup::Leibniz { ansatz } => {
            let a = leibniz_ansatz(run.n, run.m, ansatz)?;
            let sys = extract_constraints_with(&a, exec);
            (Kind::Leibniz, None, None, Some(a), sys)
        }
    };
    for g in &run.nonzero {
        let polys = g.polys.iter().map(|p| parse(p)).collect::<Result<Vec<_>>>()?;
        system.nonzero.push(NonzeroGroup {
            polys,
            label: g.label.clone(),
        });
    }
    let mut symbols = system.variables();
    if let Some(c) = &cochain {
        symbols.extend(c.parameters().iter().cloned());
    }
    if let Some(a) = &ansatz {
        symbols.extend(a.parameters().iter().cloned());
    }
    Ok(Prepared {
        kind,
        base,
        cochain,
        ansatz,
        system,
        symbols,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub poly: String,
    pub after: Vec<(String, String)>,
    pub found: bool,
    pub sources: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Law {
        id: String,
        parameters: BTreeMap<String, String>,
    },
    /// Every odd-odd product vanishes.
    Degenerated,
    Unmatched {
        products: Vec<String>,
    },
    Unsolved {
        residual: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveReport {
    pub label: String,
    pub points: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchReport {
    /// Values found by the solver and the free-coefficient splits.
    pub solved: BTreeMap<String, String>,
    pub nonzero: Vec<String>,
    pub moves: Vec<MoveReport>,
    /// Values after normalization.
    pub normalized: BTreeMap<String, String>,
    pub outcome: Outcome,
    /// Identity check of the final law at sample points (`None` if there was
    /// nothing to sample).
    pub identity_holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeadReport {
    pub substitutions: BTreeMap<String, String>,
    pub equation: String,
    pub sources: Vec<String>,
    pub violated: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverBranch {
    pub substitutions: BTreeMap<String, String>,
    pub nonzero: Vec<String>,
}

/// Random points checked against the branch tree: every point solving the
/// equations and meeting the nonzero conditions must lie on some branch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Completeness {
    pub sampled: usize,
    pub solutions: usize,
    pub outside_assumptions: usize,
    pub uncovered: Vec<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub m: usize,
    pub kind: Kind,
    pub setup: Setup,
    pub parameters: Vec<String>,
    pub equations: usize,
    pub checks: Vec<CheckReport>,
    pub solver_branches: Vec<SolverBranch>,
    pub branches: Vec<BranchReport>,
    pub dead: Vec<DeadReport>,
    pub completeness: Completeness,
    pub laws: Vec<String>,
    pub expected_laws: Vec<String>,
    pub matched: bool,
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioReport {
    pub id: String,
    pub title: String,
    pub notes: Vec<String>,
    pub runs: Vec<RunReport>,
    pub matched: bool,
}

fn subst_strings(m: &BTreeMap<Symbol, Poly>) -> BTreeMap<String, String> {
    m.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn group_strings(b: &Branch) -> Vec<String> {
    b.nonzero
        .iter()
        .map(|g| {
            let ps: Vec<String> = g.polys.iter().map(|p| b.apply(p).to_string()).collect();
            match &g.label {
                Some(l) => format!("{} ({l})", ps.join(" | ")),
                None => ps.join(" | "),
            }
        })
        .collect()
}

fn assign(b: &Branch, sym: &Symbol, value: &Poly) -> Option<Branch> {
    let mut out = b.clone();
    for v in out.substitutions.values_mut() {
        *v = v.subst_one(sym, value);
    }
    out.substitutions.insert(sym.clone(), value.clone());
    for g in &mut out.nonzero {
        for p in &mut g.polys {
            *p = p.subst_one(sym, value);
        }
    }
    let alive = out.nonzero.iter().all(|g| g.polys.iter().any(|p| !out.apply(p).is_zero()));
    alive.then_some(out)
}

/// Splits a branch on whether each listed free coefficient vanishes.
fn split_free(b: Branch, names: &[String]) -> Vec<Branch> {
    let mut out = vec![b];
    for name in names {
        let sym = Symbol::new(name);
        let mut next = Vec::new();
        for b in out {
            let free = !b.substitutions.contains_key(&sym);
            let mentioned = b.nonzero.iter().any(|g| g.polys.iter().any(|p| b.apply(p).mentions(&sym)));
            if !free || known_nonzero(&b, &sym) {
                next.push(b);
                continue;
            }
            let _ = mentioned;
            if let Some(zero) = assign(&b, &sym, &Poly::zero()) {
                next.push(zero);
            }
            let mut nz = b;
            nz.nonzero.push(NonzeroGroup::single(Poly::symbol(sym.clone())));
            next.push(nz);
        }
        out = next;
    }
    out
}

fn is_degenerated(alg: &SuperAlgebra) -> bool {
    let n = alg.n_even();
    (n..alg.dim()).all(|a| (n..alg.dim()).all(|b| alg.bracket(a, b).is_empty()))
}

/// Finds the catalog law equal to `law` for some values of its parameters.
pub fn match_catalog(law: &SuperAlgebra, n: usize, m: usize) -> Option<(String, BTreeMap<String, String>)> {
    for e in catalog::entries() {
        if e.role != Role::Law || e.kind != law.kind() || !e.matches_dims(n, m) {
            continue;
        }
        let Ok(cand) = catalog::make(e.id, &Args::dims(n, m)) else {
            continue;
        };
        let Some(cand) = cand.algebra() else { continue };
        if cand.dim() != law.dim() || cand.n_even() != law.n_even() {
            continue;
        }
        if !cand.is_parametric() {
            if cand.same_structure(law) {
                return Some((e.id.to_string(), BTreeMap::new()));
            }
            continue;
        }
        let rename: BTreeMap<Symbol, Poly> = cand
            .parameters()
            .iter()
            .map(|p| (p.clone(), Poly::var(&format!("_{p}"))))
            .collect();
        let cand = cand.subst(&rename);
        let mut sys = ConstraintSystem::default();
        for a in 0..law.dim() {
            for b in 0..law.dim() {
                let (u, v) = (law.bracket(a, b), cand.bracket(a, b));
                for k in u.keys().chain(v.keys()).collect::<BTreeSet<_>>() {
                    let zero = Poly::zero();
                    sys.push(u.get(k).unwrap_or(&zero) - v.get(k).unwrap_or(&zero), "match");
                }
            }
        }
        let opts = SolverOptions {
            elimination_order: rename.keys().map(|p| Symbol::new(&format!("_{p}"))).collect(),
            ..SolverOptions::exact()
        };
        let out = solve(&sys.deduplicated(), &opts);
        let hit = out.branches.iter().find(|b| {
            b.is_solved()
                && b.trace.iter().all(|d| matches!(d, super::solver::Decision::Solve { .. }))
                && b.substitutions.keys().all(|k| k.as_str().starts_with('_'))
        });
        if let Some(b) = hit {
            let params = b
                .substitutions
                .iter()
                .map(|(k, v)| (k.as_str()[1..].to_string(), v.to_string()))
                .collect();
            return Some((e.id.to_string(), params));
        }
    }
    None
}

/// Strips factors known to be nonzero and compares up to scaling.
fn check_system(sys: &ConstraintSystem, c: &Check, known: &[Poly]) -> Result<CheckReport> {
    let target = parse(&c.poly)?;
    let after: BTreeMap<Symbol, Poly> = c
        .after
        .iter()
        .map(|(k, v)| Ok((Symbol::new(k), parse(v)?)))
        .collect::<Result<_>>()?;
    let mut found = None;
    for e in &sys.equations {
        let p = e.poly.subst_unchecked(&after);
        if p.is_zero() {
            continue;
        }
        let kept: Vec<Poly> = parts_of(&p)
            .into_iter()
            .filter(|f| !known.iter().any(|k| k.proportional(f)))
            .collect();
        let reduced = kept.iter().fold(Poly::one(), |acc, f| &acc * f);
        if reduced.proportional(&target) || (p.proportional(&target)) {
            found = Some(e.sources.clone());
            break;
        }
    }
    Ok(CheckReport {
        poly: c.poly.clone(),
        after: c.after.clone(),
        found: found.is_some(),
        sources: found.unwrap_or_default(),
    })
}

fn validate_move(
    prep: &Prepared,
    before: &Branch,
    after: &Branch,
    mv: &Move,
    symbols: &BTreeSet<Symbol>,
) -> Result<MoveReport> {
    let before_law = prep.law(&before.substitutions)?;
    let after_law = prep.law(&after.substitutions)?;
    let free: Vec<Symbol> = before.free_variables(symbols).into_iter().collect();
    let points = sample_points(before, &free, 3);
    let mut failures = Vec::new();
    if points.len() < 3 {
        failures.push(format!("only {} sample points satisfy the branch", points.len()));
    }
    for p in &points {
        let full: BTreeMap<Symbol, crate::exact::Rational> = p.clone();
        if let Err(why) = check_move_at(&before_law, &after_law, mv, &full)? {
            let at: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            failures.push(format!("at {}: {why}", at.join(", ")));
        }
    }
    Ok(MoveReport {
        label: mv.label.clone(),
        points: points.len(),
        failures,
    })
}

fn identity_at_samples(prep: &Prepared, b: &Branch, symbols: &BTreeSet<Symbol>) -> Result<Option<bool>> {
    let law = prep.law(&b.substitutions)?;
    let free: Vec<Symbol> = law.parameters().iter().cloned().collect();
    let _ = symbols;
    let points = if free.is_empty() {
        vec![BTreeMap::new()]
    } else {
        sample_points(b, &free, 3)
    };
    if points.is_empty() {
        return Ok(None);
    }
    for p in &points {
        if !check_identity(&law.instantiate(p)?).is_empty() {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

const SAMPLE_VALUES: [(i64, i64); 8] = [(-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1), (1, 2), (-1, 3), (3, 1)];

fn random_value(rng: &mut StdRng) -> Rational {
    let (a, b) = SAMPLE_VALUES[rng.gen_range(0..SAMPLE_VALUES.len())];
    ratio(a, b)
}

/// Half the points are uniform over the parameters, half are drawn from the
/// branches themselves (so that solutions actually occur).
pub fn sample_completeness(
    sys: &ConstraintSystem,
    symbols: &BTreeSet<Symbol>,
    branches: &[Branch],
    rng: &mut StdRng,
    count: usize,
) -> Completeness {
    let mut out = Completeness::default();
    for i in 0..count {
        let mut point: BTreeMap<Symbol, Rational> = symbols.iter().map(|s| (s.clone(), random_value(rng))).collect();
        if i % 2 == 1 && !branches.is_empty() {
            let b = &branches[rng.gen_range(0..branches.len())];
            let mut ok = true;
            for (s, v) in &b.substitutions {
                match v.eval(&point) {
                    Ok(x) => {
                        point.insert(s.clone(), x);
                    }
                    Err(_) => ok = false,
                }
            }
            if !ok {
                continue;
            }
        }
        out.sampled += 1;
        let solves = sys
            .equations
            .iter()
            .all(|e| e.poly.eval(&point).is_ok_and(|v| v.is_zero()));
        if !solves {
            continue;
        }
        out.solutions += 1;
        let assumed = sys
            .nonzero
            .iter()
            .all(|g| g.polys.iter().any(|p| p.eval(&point).is_ok_and(|v| !v.is_zero())));
        if !assumed {
            out.outside_assumptions += 1;
        } else if !branches.iter().any(|b| b.contains_point(&point)) {
            out.uncovered.push(point.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect());
        }
    }
    out
}

fn run_one(run: &Run, exec: Exec, seed: u64) -> Result<RunReport> {
    let prep = prepare(run, exec)?;
    let known: Vec<Poly> = prep
        .system
        .nonzero
        .iter()
        .filter(|g| g.polys.len() == 1)
        .map(|g| g.polys[0].clone())
        .collect();
    let checks = run
        .checks
        .iter()
        .map(|c| check_system(&prep.system, c, &known))
        .collect::<Result<Vec<_>>>()?;
    let opts = SolverOptions {
        elimination_order: run.elimination_order.iter().map(|x| Symbol::new(x)).collect(),
        split_order: run.split_free.iter().map(|x| Symbol::new(x)).collect(),
        ..SolverOptions::exact()
    };
    let out = solve(&prep.system, &opts);
    let mut problems = Vec::new();
    if out.exhausted {
        problems.push(format!("solver stopped after {} nodes", out.nodes));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let completeness = sample_completeness(&prep.system, &prep.symbols, &out.branches, &mut rng, COMPLETENESS_POINTS);
    for p in &completeness.uncovered {
        problems.push(format!("solution {p:?} lies on no branch"));
    }
    let solver_branches = out
        .branches
        .iter()
        .map(|b| SolverBranch {
            substitutions: subst_strings(&b.substitutions),
            nonzero: group_strings(b),
        })
        .collect();

    let mut split: Vec<Branch> = out.branches.iter().cloned().flat_map(|b| split_free(b, &run.split_free)).collect();
    split.sort_by_key(|b| subst_strings(&b.substitutions));
    split.dedup_by(|a, b| a.substitutions == b.substitutions && a.residual == b.residual);

    let symbols = &prep.symbols;
    let reports: Vec<Result<BranchReport>> = map_slice(exec, &split, |b| {
        let solved = subst_strings(&b.substitutions);
        let nonzero = group_strings(b);
        if !b.is_solved() {
            return Ok(BranchReport {
                solved: solved.clone(),
                nonzero,
                moves: Vec::new(),
                normalized: solved,
                outcome: Outcome::Unsolved {
                    residual: b.residual.iter().map(|e| e.poly.to_string()).collect(),
                },
                identity_holds: None,
            });
        }
        let mut cur = b.clone();
        let mut moves = Vec::new();
        for mv in &run.moves {
            if applicability(&cur, mv) != Applicability::Apply {
                continue;
            }
            let next = normalize(&cur, mv)?;
            moves.push(validate_move(&prep, &cur, &next, mv, symbols)?);
            cur = next;
        }
        let law = prep.law(&cur.substitutions)?;
        let outcome = if is_degenerated(&law) {
            Outcome::Degenerated
        } else if let Some((id, parameters)) = match_catalog(&law, run.n, run.m) {
            Outcome::Law { id, parameters }
        } else {
            Outcome::Unmatched {
                products: law
                    .stored_products()
                    .iter()
                    .map(|((a, b), v)| format!("[{},{}]={}", law.basis_name(*a), law.basis_name(*b), law.format_vec(v)))
                    .collect(),
            }
        };
        let identity_holds = identity_at_samples(&prep, &cur, symbols)?;
        Ok(BranchReport {
            solved,
            nonzero,
            moves,
            normalized: subst_strings(&cur.substitutions),
            outcome,
            identity_holds,
        })
    });
    let branches: Vec<BranchReport> = reports.into_iter().collect::<Result<_>>()?;

    let dead: Vec<DeadReport> = out
        .dead
        .iter()
        .map(|d| DeadReport {
            substitutions: subst_strings(&d.substitutions),
            equation: d.reason.equation.clone(),
            sources: d.reason.sources.clone(),
            violated: d.reason.violated.clone(),
        })
        .collect();

    let laws: Vec<String> = branches
        .iter()
        .filter_map(|b| match &b.outcome {
            Outcome::Law { id, .. } => Some(id.clone()),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let expected: BTreeSet<String> = run.expect.laws.iter().cloned().collect();
    let got: BTreeSet<String> = laws.iter().cloned().collect();
    if got != expected {
        problems.push(format!(
            "laws {:?}, expected {:?}",
            got.iter().collect::<Vec<_>>(),
            expected.iter().collect::<Vec<_>>()
        ));
    }
    for b in &branches {
        match &b.outcome {
            Outcome::Unmatched { products } => {
                problems.push(format!("branch {:?} gives an uncatalogued law {}", b.solved, products.join(", ")))
            }
            Outcome::Unsolved { residual } => {
                problems.push(format!("branch {:?} left unsolved: {}", b.solved, residual.join(", ")))
            }
            Outcome::Degenerated if !run.expect.degenerate_ok => {
                problems.push(format!("branch {:?} is degenerated", b.solved))
            }
            _ => {}
        }
        for mv in &b.moves {
            for f in &mv.failures {
                problems.push(format!("move `{}`: {f}", mv.label));
            }
        }
        if matches!(b.outcome, Outcome::Law { .. }) {
            for (var, value) in &run.expect.law_substitutions {
                let want = parse(value)?;
                let have = b.solved.get(var).map(|v| parse(v)).transpose()?;
                if have.as_ref() != Some(&want) {
                    problems.push(format!(
                        "branch {:?}: expected {var} = {value}, found {}",
                        b.solved,
                        have.map(|p| p.to_string()).unwrap_or_else(|| "free".into())
                    ));
                }
            }
        }
    }
    if let Some(label) = &run.expect.contradiction {
        if !dead.iter().any(|d| d.violated.as_deref() == Some(label)) {
            problems.push(format!("no branch violates `{label}`"));
        }
    }
    for c in &checks {
        if !c.found {
            problems.push(format!("equation {} not found", c.poly));
        }
    }
    Ok(RunReport {
        n: run.n,
        m: run.m,
        kind: prep.kind,
        setup: run.setup.clone(),
        parameters: prep.symbols.iter().map(|s| s.to_string()).collect(),
        equations: prep.system.equations.len(),
        checks,
        solver_branches,
        branches,
        dead,
        completeness,
        laws,
        expected_laws: run.expect.laws.clone(),
        matched: problems.is_empty(),
        problems,
    })
}

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const COMPLETENESS_POINTS: usize = 200;

pub fn run_scenario(id: &str) -> Result<ScenarioReport> {
    run_scenario_with(&find_scenario(id)?, Exec::Auto, DEFAULT_SEED)
}

/// Runs every run of a scenario. Mismatches are reported, not raised.
pub fn run_scenario_with(sc: &Scenario, exec: Exec, seed: u64) -> Result<ScenarioReport> {
    let indexed: Vec<(usize, &Run)> = sc.runs.iter().enumerate().collect();
    let runs = map_slice(exec, &indexed, |(i, r)| run_one(r, exec, seed.wrapping_add(*i as u64)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioReport {
        id: sc.id.to_string(),
        title: sc.title.to_string(),
        notes: sc.notes.iter().map(|x| x.to_string()).collect(),
        matched: runs.iter().all(|r| r.matched),
        runs,
    })
}

impl ScenarioReport {
    /// Plain-text rendering with one block per run.
    pub fn render(&self) -> String {
        let mut out = format!("scenario {}: {}\n", self.id, self.title);
        for note in &self.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
        for r in &self.runs {
            out.push_str(&format!(
                "  ({},{}) {}: {} equations, {} branches, {} dead: {}\n",
                r.n,
                r.m,
                r.kind,
                r.equations,
                r.branches.len(),
                r.dead.len(),
                if r.matched { "match" } else { "MISMATCH" }
            ));
            let cp = &r.completeness;
            out.push_str(&format!(
                "    completeness: {} points, {} solutions, {} outside assumptions, {} uncovered\n",
                cp.sampled,
                cp.solutions,
                cp.outside_assumptions,
                cp.uncovered.len()
            ));
            for c in &r.checks {
                let after = if c.after.is_empty() {
                    String::new()
                } else {
                    let a: Vec<String> = c.after.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    format!(" after {}", a.join(", "))
                };
                out.push_str(&format!(
                    "    equation {}{after}: {}\n",
                    c.poly,
                    if c.found { c.sources.first().cloned().unwrap_or_default() } else { "not found".into() }
                ));
            }
            for b in &r.branches {
                let subs: Vec<String> = b.solved.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let what = match &b.outcome {
                    Outcome::Law { id, parameters } if parameters.is_empty() => id.clone(),
                    Outcome::Law { id, parameters } => {
                        let p: Vec<String> = parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
                        format!("{id} ({})", p.join(", "))
                    }
                    Outcome::Degenerated => "degenerated".into(),
                    Outcome::Unmatched { .. } => "uncatalogued law".into(),
                    Outcome::Unsolved { .. } => "unsolved".into(),
                };
                let identity = match b.identity_holds {
                    Some(false) => " [identity fails]",
                    _ => "",
                };
                out.push_str(&format!("    {{{}}} -> {what}{identity}\n", subs.join(", ")));
                for mv in &b.moves {
                    out.push_str(&format!(
                        "      move {}: {} points{}\n",
                        mv.label,
                        mv.points,
                        if mv.failures.is_empty() { ", verified" } else { ", FAILED" }
                    ));
                }
            }
            let mut labels: Vec<String> = r
                .dead
                .iter()
                .map(|d| d.violated.clone().unwrap_or_else(|| format!("{} = 0", d.equation)))
                .collect();
            labels.sort();
            labels.dedup();
            for l in labels {
                out.push_str(&format!("    contradiction: {l}\n"));
            }
            for p in &r.problems {
                out.push_str(&format!("    problem: {p}\n"));
            }
        }
        out.push_str(if self.matched { "result: match\n" } else { "result: MISMATCH\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_laws_exist_in_catalog() {
        let ids: BTreeSet<&str> = catalog::entries().iter().map(|e| e.id).collect();
        for sc in scenarios() {
            for r in &sc.runs {
                for l in &r.expect.laws {
                    assert!(ids.contains(l.as_str()), "{} expects unknown law {l}", sc.id);
                }
            }
        }
    }

    #[test]
    fn ansatz_first_layer() {
        let a = leibniz_ansatz(3, 4, &Ansatz { k: 2 }).unwrap();
        let names: BTreeSet<String> = a.parameters().iter().map(|s| s.to_string()).collect();
        let want: BTreeSet<String> = ["alpha", "b2_1", "b3_1", "g1_1", "g2_1"].iter().map(|x| x.to_string()).collect();
        assert_eq!(names, want);
    }

    #[test]
    fn unknown_scenario() {
        assert!(matches!(run_scenario("9.9"), Err(Error::UnknownScenario(_))));
    }
}
