//! Acceptance criteria, one PASS/FAIL line each. Every comparison is exact:
//! structure constants and residuals are rationals or polynomials over the
//! rationals, so the only tolerance is zero.

use std::collections::{BTreeMap, BTreeSet};

use supergrade::catalog::{self, entries, make, Args, CatalogEntry, Role};
use supergrade::classify::scenario::{run_scenario, RunReport, ScenarioReport, ROOT_NOTE};
use supergrade::deform::{phi, phibar, psi, weight, Weight};
use supergrade::Error;
use supergrade::exact::{rat, Poly, Rational, Symbol};
use supergrade::gradation::{is_filiform, is_naturally_graded, natural_layers, Stage};
use supergrade::superalg::{
    check_identity, check_super_jacobi, check_super_leibniz, is_two_sided_ideal, right_annihilator,
    right_mult_closure, skew_ideal, verify_homomorphism, Kind, SuperAlgebra,
};

/// Residual polynomials must vanish identically; no numeric slack anywhere.
const RESIDUAL_TOLERANCE: i64 = 0;
/// Largest n and m swept for open-ended catalog ranges.
const SWEEP_MAX: usize = 8;
/// Natural-gradedness sweeps stop at this total dimension to stay at desk scale.
const NATGRADE_MAX_DIM: usize = 12;

struct Verdict {
    pass: bool,
    summary: String,
    failures: Vec<String>,
}

impl Verdict {
    fn new(summary: impl Into<String>, failures: Vec<String>) -> Self {
        Verdict {
            pass: failures.is_empty(),
            summary: summary.into(),
            failures,
        }
    }
}

fn report(id: usize, v: &Verdict) {
    let word = if v.pass { "PASS" } else { "FAIL" };
    println!("{word} criterion {id}: {}", v.summary);
    for f in &v.failures {
        println!("    - {f}");
    }
}

/// Every `(n, m)` of an entry's range inside the sweep box.
fn dims_of(e: &CatalogEntry) -> Vec<(usize, usize)> {
    let top = |r: catalog::Range| r.max.unwrap_or(SWEEP_MAX).min(SWEEP_MAX);
    let mut out = Vec::new();
    for n in e.n.min..=top(e.n) {
        for m in e.m.min..=top(e.m) {
            out.push((n, m));
        }
    }
    out
}

fn build(id: &str, n: usize, m: usize) -> Option<SuperAlgebra> {
    make(id, &Args::dims(n, m)).ok().and_then(|b| b.algebra())
}

fn law_instances() -> Vec<(String, SuperAlgebra)> {
    let mut out = Vec::new();
    for e in entries().iter().filter(|e| e.role == Role::Law) {
        for (n, m) in dims_of(e) {
            if let Some(a) = build(e.id, n, m) {
                out.push((format!("{} ({n},{m})", e.id), a));
            }
        }
    }
    out
}

fn definition_instances() -> Vec<(String, SuperAlgebra)> {
    let mut out = Vec::new();
    for n in 2..=SWEEP_MAX {
        out.push((format!("L_{n}"), catalog::l_n(n).unwrap()));
        out.push((format!("NF^{n}"), catalog::nf(n).unwrap()));
        for m in 1..=SWEEP_MAX {
            out.push((format!("L^{{{n},{m}}}"), catalog::lie_model(n, m).unwrap()));
            out.push((format!("NG^{{{n},{m}}}"), catalog::ng(n, m).unwrap()));
        }
    }
    for n in [5, 7, 9] {
        out.push((format!("Q_{n}"), catalog::q_model(n, 0).unwrap()));
    }
    out
}

fn criterion_1() -> Verdict {
    let all: Vec<(String, SuperAlgebra)> = law_instances().into_iter().chain(definition_instances()).collect();
    let mut failures = Vec::new();
    for (name, a) in &all {
        let v = check_identity(a);
        if v.len() as i64 > RESIDUAL_TOLERANCE {
            let first = &v[0];
            failures.push(format!(
                "{name}: {} violating triples, first ({},{},{}) -> {}",
                v.len(),
                first.names.0,
                first.names.1,
                first.names.2,
                first.residual_text
            ));
        }
    }
    Verdict::new(
        format!("{} catalog and definition algebras checked, {} with violations", all.len(), failures.len()),
        failures,
    )
}

/// Rational values for every free parameter, avoiding zero.
fn instantiate(a: &SuperAlgebra) -> SuperAlgebra {
    let values: BTreeMap<Symbol, Rational> = a.parameters().iter().map(|s| (s.clone(), rat(2))).collect();
    a.instantiate(&values).unwrap()
}

fn criterion_2() -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, a) in law_instances() {
        if a.dim() > NATGRADE_MAX_DIM {
            continue;
        }
        checked += 1;
        let a = instantiate(&a);
        match is_naturally_graded(&a) {
            Ok(r) if r.naturally_graded => {
                let (w, gr) = (r.witness.unwrap(), r.gr.unwrap());
                let bad = verify_homomorphism(&w, &a, &gr);
                if !bad.is_empty() || !w.is_invertible().unwrap() {
                    failures.push(format!("{name}: witness does not verify"));
                }
            }
            Ok(r) => failures.push(format!("{name}: {}", r.reason.unwrap_or_default())),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let ng = is_naturally_graded(&catalog::nongraded().unwrap()).unwrap();
    if ng.naturally_graded || ng.stage != Stage::Gradedness {
        failures.push("nongraded algebra not rejected at the gradedness stage".into());
    }
    Verdict::new(
        format!("{checked} laws up to dimension {NATGRADE_MAX_DIM} plus the nongraded algebra"),
        failures,
    )
}

fn check_found(r: &RunReport, poly: &str, failures: &mut Vec<String>) {
    let target = Poly::parse(poly).unwrap();
    let hit = r
        .checks
        .iter()
        .any(|c| c.found && Poly::parse(&c.poly).map(|p| p.proportional(&target)).unwrap_or(false));
    if !hit {
        failures.push(format!("({},{}): equation {poly} not found", r.n, r.m));
    }
}

fn laws_of(r: &RunReport) -> BTreeSet<String> {
    r.laws.iter().cloned().collect()
}

fn scenario(id: &str, failures: &mut Vec<String>) -> ScenarioReport {
    let s = run_scenario(id).unwrap();
    if !s.matched {
        for r in &s.runs {
            for p in &r.problems {
                failures.push(format!("{id} ({},{}): {p}", r.n, r.m));
            }
        }
    }
    s
}

fn subst_value(branch: &BTreeMap<String, String>, poly: &str) -> Poly {
    let binding: BTreeMap<Symbol, Poly> = branch
        .iter()
        .map(|(k, v)| (Symbol::new(k), Poly::parse(v).unwrap()))
        .collect();
    Poly::parse(poly).unwrap().subst(&binding).unwrap()
}

fn criterion_3() -> Verdict {
    let mut f = Vec::new();

    let s = scenario("4.2", &mut f);
    for r in &s.runs {
        check_found(r, "b", &mut f);
        if laws_of(r) != ["L+phi12".to_string()].into() {
            f.push(format!("4.2 ({},{}): laws {:?}", r.n, r.m, r.laws));
        }
        let sheared = r.branches.iter().any(|b| b.moves.iter().any(|m| m.label.starts_with("a = 0") && m.failures.is_empty()));
        if !sheared {
            f.push(format!("4.2 ({},{}): a not normalized away", r.n, r.m));
        }
    }

    let s = scenario("4.3", &mut f);
    let r = &s.runs[0];
    check_found(r, "a2", &mut f);
    check_found(r, "a1*a3", &mut f);
    if r.laws.len() != 3 {
        f.push(format!("4.3: {} laws", r.laws.len()));
    }

    let s = scenario("4.4", &mut f);
    for r in &s.runs {
        check_found(r, "a2", &mut f);
        check_found(r, "a3", &mut f);
        if r.laws.len() != 2 {
            f.push(format!("4.4 m={}: {} laws", r.m, r.laws.len()));
        }
    }

    let s = scenario("4.6", &mut f);
    let r = &s.runs[0];
    let zero = Poly::zero();
    let first = r.solver_branches.iter().any(|b| {
        subst_value(&b.substitutions, "c") == zero
            && subst_value(&b.substitutions, "a2 - 2*a1") == zero
            && b.nonzero.iter().any(|g| g.starts_with("d "))
    });
    let second: Vec<_> = r
        .solver_branches
        .iter()
        .filter(|b| subst_value(&b.substitutions, "c") != zero)
        .collect();
    let second_ok = !second.is_empty()
        && second.iter().all(|b| {
            subst_value(&b.substitutions, "a2") == zero && subst_value(&b.substitutions, "4*a1*d - a1*c") == zero
        });
    if !first {
        f.push("4.6: branch {c=0, d!=0, a2=2a1} missing".into());
    }
    if !second_ok {
        f.push("4.6: branch {c!=0, a2=0, 4a1d=a1c} missing".into());
    }
    let expected: BTreeSet<String> = ["L+phi12+tphi24", "L+phi24", "L+phi24+psi211+2psi321", "L+4phi12+phi24+psi211"]
        .map(String::from)
        .into();
    if laws_of(r) != expected || r.branches.len() != 4 {
        f.push(format!("4.6: laws {:?}", r.laws));
    }

    let s = scenario("4.7", &mut f);
    if laws_of(&s.runs[0]) != ["L+phibar24".to_string()].into() {
        f.push(format!("4.7: laws {:?}", s.runs[0].laws));
    }
    let s = scenario("4.7-Q5", &mut f);
    let r = &s.runs[0];
    if !r.laws.is_empty() || !r.dead.iter().any(|d| d.violated.as_deref() == Some("[X1,X4]=0")) {
        f.push("4.7-Q5: contradiction [X1,X4]=0 not reached".into());
    }
    let s = scenario("4.8", &mut f);
    if laws_of(&s.runs[0]) != ["L+phibar36".to_string()].into() {
        f.push(format!("4.8: laws {:?}", s.runs[0].laws));
    }
    Verdict::new("constraint reproduction in the Lie scenarios", f)
}

fn criterion_4() -> Verdict {
    let mut f = Vec::new();
    let (mut count, mut absent) = (0, 0);
    for n in 2..=SWEEP_MAX {
        for m in 1..=SWEEP_MAX {
            for k in 1..=n {
                for s in k + 1..=k + 1 + m {
                    let c = psi(n, m, s, k).unwrap();
                    if c.is_zero() {
                        continue;
                    }
                    count += 1;
                    let want = Weight::Value(s as i64 - k as i64 - 1);
                    let got = weight(&c).unwrap();
                    if got != Some(want) {
                        f.push(format!("psi{s}{k} on ({n},{m}): weight {got:?}"));
                    }
                }
            }
            for k in 1..=m.min(n / 2) {
                // phibar only exists where the truncated phi_{j,2j} admit a cocycle combination
                let bar = match phibar(n, m, k) {
                    Ok(c) => Some(c),
                    Err(Error::Precondition(_)) => {
                        absent += 1;
                        None
                    }
                    Err(e) => {
                        f.push(format!("phibar k={k} on ({n},{m}): {e}"));
                        None
                    }
                };
                for c in std::iter::once(phi(n, m, k).unwrap()).chain(bar) {
                    count += 1;
                    if weight(&c).unwrap() != Some(Weight::Value(0)) {
                        f.push(format!("{} on ({n},{m}) has nonzero weight", c.name()));
                    }
                }
            }
        }
    }
    Verdict::new(format!("{count} cochain weights ({absent} phibar without a cocycle)"), f)
}

fn criterion_5() -> Verdict {
    let mut f = Vec::new();
    for n in 2..=7 {
        for m in 1..=7 {
            let fam = catalog::leibniz_family(n, m, &BTreeMap::new()).unwrap();
            let v = check_super_leibniz(&fam.algebra).unwrap();
            if !v.is_empty() {
                f.push(format!("gamma family ({n},{m}): {} nonzero residuals", v.len()));
            }
        }
    }
    let s = scenario("5.3-case1.1", &mut f);
    for r in &s.runs {
        let ok_law = laws_of(r) == ["NG".to_string()].into();
        let unified = r
            .branches
            .iter()
            .filter(|b| matches!(b.outcome, supergrade::classify::scenario::Outcome::Law { .. }))
            .all(|b| b.solved.iter().filter(|(k, _)| k.starts_with('g') && *k != "g1_1").all(|(_, v)| v == "g1_1"));
        if !ok_law || !unified {
            f.push(format!("5.3-case1.1 ({},{}): laws {:?}", r.n, r.m, r.laws));
        }
    }
    for id in ["5.3-case1.2b", "5.3-case2.2b"] {
        let s = run_scenario(id).unwrap();
        for r in &s.runs {
            if !r.laws.is_empty() || r.branches.iter().any(|b| !matches!(b.outcome, supergrade::classify::scenario::Outcome::Degenerated)) {
                let what: Vec<String> = r
                    .branches
                    .iter()
                    .filter(|b| !matches!(b.outcome, supergrade::classify::scenario::Outcome::Degenerated))
                    .map(|b| format!("{:?}", b.solved))
                    .collect();
                f.push(format!("{id} ({},{}) {:?}: non-degenerate branches {}", r.n, r.m, r.setup, what.join("; ")));
            }
        }
    }
    Verdict::new("gamma families and the Leibniz scenarios", f)
}

fn layout_ok(a: &SuperAlgebra) -> Option<bool> {
    if !is_filiform(a).ok()? {
        return None;
    }
    let dims = natural_layers(a).ok()?.dims();
    let (ne, no) = (a.n_even(), a.n_odd());
    let expect: Vec<(usize, usize)> = match a.kind() {
        Kind::Lie => {
            let n = ne - 1;
            (1..=n.max(no)).map(|i| (if i == 1 { 2 } else { usize::from(i <= n) }, usize::from(i <= no))).collect()
        }
        Kind::Leibniz => (1..=ne.max(no)).map(|i| (usize::from(i <= ne), usize::from(i <= no))).collect(),
    };
    Some(dims == expect)
}

fn criterion_6() -> Verdict {
    let mut f = Vec::new();
    let mut every: Vec<(String, SuperAlgebra)> = Vec::new();
    for e in entries().iter().filter(|e| e.role != Role::Cochain) {
        for (n, m) in dims_of(e) {
            if let Some(a) = build(e.id, n, m) {
                every.push((format!("{} ({n},{m})", e.id), instantiate(&a)));
            }
        }
    }
    let mut layouts = 0;
    for (name, a) in &every {
        match a.kind() {
            Kind::Leibniz => {
                let ann = right_annihilator(a).unwrap();
                if !is_two_sided_ideal(a, &ann).unwrap() {
                    f.push(format!("{name}: Ann(L) is not a two-sided ideal"));
                }
                if !skew_ideal(a).unwrap().is_subspace_of(&ann) {
                    f.push(format!("{name}: I is not inside Ann(L)"));
                }
                if a.n_even() + a.n_odd() <= 10 {
                    match right_mult_closure(a) {
                        Ok(r) if r.is_empty() => {}
                        Ok(r) => f.push(format!("{name}: right multiplications fail to close ({:?})", r.closure_failures.first())),
                        Err(e) => f.push(format!("{name}: right multiplications: {e}")),
                    }
                }
            }
            Kind::Lie => {
                if check_super_jacobi(a).unwrap().is_empty() {
                    let l = a.retag(Kind::Leibniz).unwrap();
                    if !check_super_leibniz(&l).unwrap().is_empty() {
                        f.push(format!("{name}: Jacobi holds but the Leibniz re-tag fails"));
                    }
                }
            }
        }
        match layout_ok(a) {
            Some(true) => layouts += 1,
            Some(false) => f.push(format!("{name}: layer layout differs")),
            None => {}
        }
    }
    Verdict::new(format!("{} algebras, {layouts} filiform layouts", every.len()), f)
}

fn criterion_7() -> Verdict {
    let mut f = Vec::new();
    let weight_note = run_scenario("4.5")
        .unwrap()
        .notes
        .iter()
        .any(|n| n.contains("lower bound") && n.contains("not mechanized"));
    if !weight_note {
        f.push("the weight lower bound is not documented in the 4.5 report".into());
    }
    for id in ["4.3", "4.6", "5.3-case1.1"] {
        if !run_scenario(id).unwrap().notes.iter().any(|n| n == ROOT_NOTE) {
            f.push(format!("{id}: square-root scale changes not documented"));
        }
    }
    Verdict::new("non-mechanized items are documented in reports", f)
}

#[test]
fn acceptance() {
    let verdicts = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
    ];
    println!();
    for (i, v) in verdicts.iter().enumerate() {
        report(i + 1, v);
    }
    let failed: Vec<usize> = verdicts.iter().enumerate().filter(|(_, v)| !v.pass).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "criteria failing: {failed:?}");
}
