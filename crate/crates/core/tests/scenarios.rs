//! Every law a scenario reports is rebuilt from the catalog and checked at
//! several parameter points: identity, and natural gradedness with a
//! verified witness.

use std::collections::{BTreeMap, BTreeSet};

use supergrade::catalog::{make, Args};
use supergrade::classify::scenario::{run_scenario, scenarios, Outcome};
use supergrade::exact::{rat, ratio, Rational, Symbol};
use supergrade::gradation::is_naturally_graded;
use supergrade::superalg::{check_identity, verify_homomorphism, SuperAlgebra};

/// Laws reproduced by the scenarios whose identity fails.
const IDENTITY_FAILS: [(&str, usize, usize); 8] = [
    ("L+4phi12+phi24+psi211", 4, 3),
    ("L+phi12+psi211", 3, 2),
    ("L+phi12+psi211", 3, 3),
    ("L+phi12+psi211", 3, 4),
    ("L+phi12+psi211", 3, 5),
    ("L+phi12+psi211", 3, 6),
    ("L+phi12+psi211", 3, 7),
    ("L+phi24+psi211+2psi321", 4, 3),
];

fn points(a: &SuperAlgebra) -> Vec<SuperAlgebra> {
    if !a.is_parametric() {
        return vec![a.clone()];
    }
    [rat(1), ratio(-1, 2), rat(3)]
        .into_iter()
        .map(|v| {
            let values: BTreeMap<Symbol, Rational> = a.parameters().iter().map(|s| (s.clone(), v.clone())).collect();
            a.instantiate(&values).unwrap()
        })
        .collect()
}

#[test]
fn reported_laws_are_sound() {
    let mut failing = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for sc in scenarios() {
        let report = run_scenario(sc.id).unwrap();
        for run in &report.runs {
            for b in &run.branches {
                let Outcome::Law { id, .. } = &b.outcome else { continue };
                if !seen.insert((id.clone(), run.n, run.m)) {
                    continue;
                }
                let law = make(id, &Args::dims(run.n, run.m)).unwrap().algebra().unwrap();
                for a in points(&law) {
                    if !check_identity(&a).is_empty() {
                        failing.insert((id.clone(), run.n, run.m));
                        assert_eq!(b.identity_holds, Some(false), "{id} at ({},{})", run.n, run.m);
                        continue;
                    }
                    let r = is_naturally_graded(&a).unwrap();
                    assert!(r.naturally_graded, "{id} at ({},{}): {:?}", run.n, run.m, r.reason);
                    let (w, gr) = (r.witness.unwrap(), r.gr.unwrap());
                    assert!(verify_homomorphism(&w, &a, &gr).is_empty());
                    assert!(w.is_invertible().unwrap());
                }
            }
        }
    }
    let expected: BTreeSet<(String, usize, usize)> =
        IDENTITY_FAILS.iter().map(|(id, n, m)| (id.to_string(), *n, *m)).collect();
    assert_eq!(failing, expected);
    assert!(seen.len() > expected.len());
}
