use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use supergrade::catalog::{self, Args, EntryFilter, Role};
use supergrade::classify::scenario::{find_scenario, run_scenario_with, scenarios};
use supergrade::deform::{cochain_from_json, cocycle_violations, psi_compose_psi_violations, weight, Cochain2};
use supergrade::exact::{Poly, Rational};
use supergrade::gradation::{is_naturally_graded, natural_layers, s_nilindex, NaturalGradedness};
use supergrade::par::Exec;
use supergrade::superalg::io::from_json;
use supergrade::superalg::{
    check_identity, check_super_jacobi, check_super_leibniz, format_vec_with, is_two_sided_ideal, right_annihilator,
    skew_ideal, Kind, LinearMap, SparseVec, Subspace, SuperAlgebra, Violation,
};

use crate::report::Verdict;
use crate::CliError;

/// Result of one subcommand before it is wrapped in a report.
pub struct Outcome {
    pub verdict: Verdict,
    pub details: Value,
    pub human: String,
    /// Human output is a document in its own right; no verdict line follows.
    pub raw: bool,
}

pub struct Limits {
    pub max_dim: usize,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn cap(alg: &SuperAlgebra, limits: &Limits) -> Result<(), CliError> {
    if alg.dim() > limits.max_dim {
        return Err(CliError::TooLarge {
            dim: alg.dim(),
            max: limits.max_dim,
        });
    }
    Ok(())
}

fn dense_name(alg: &SuperAlgebra, v: &[Rational]) -> String {
    let sparse: SparseVec = v
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Rational::from_integer(0.into()))
        .map(|(i, c)| (i, Poly::constant(c.clone())))
        .collect();
    alg.format_vec(&sparse)
}

fn subspace_names(alg: &SuperAlgebra, s: &Subspace) -> Vec<String> {
    s.basis().iter().map(|v| dense_name(alg, v)).collect()
}

fn violation_lines(vs: &[Violation]) -> Vec<String> {
    vs.iter()
        .map(|v| format!("({},{},{}): {}", v.names.0, v.names.1, v.names.2, v.residual_text))
        .collect()
}

fn push_list(out: &mut String, title: &str, items: &[String]) {
    if items.is_empty() {
        out.push_str(&format!("{title}: none\n"));
    } else {
        out.push_str(&format!("{title}: {}\n", items.len()));
        for i in items {
            out.push_str(&format!("  {i}\n"));
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// `check`: identity suite, annihilator and nilindex for algebra files,
/// weight / cocycle / square checks for cochain files (recognised by a
/// `base` key).
pub fn check(path: &Path, require: Option<Kind>, limits: &Limits) -> Result<Outcome, CliError> {
    let text = read(path)?;
    let raw: Value = serde_json::from_str(&text).map_err(supergrade::Error::from)?;
    if raw.get("base").is_some() {
        let c = cochain_from_json(&text)?;
        cap(c.base(), limits)?;
        return check_cochain(&c);
    }
    let alg = from_json(&text)?;
    cap(&alg, limits)?;
    check_algebra(&alg, require)
}

fn check_algebra(alg: &SuperAlgebra, require: Option<Kind>) -> Result<Outcome, CliError> {
    let identity = violation_lines(&check_identity(alg));
    let identity_name = match alg.kind() {
        Kind::Lie => "super Jacobi",
        Kind::Leibniz => "super Leibniz",
    };
    let mut ok = identity.is_empty();
    let mut human = format!(
        "algebra {} ({}, even {}, odd {})\n",
        alg.name(),
        alg.kind(),
        alg.n_even(),
        alg.n_odd()
    );
    push_list(&mut human, &format!("{identity_name} violations"), &identity);

    let mut required = Value::Null;
    if let Some(kind) = require {
        let (holds, why) = match kind {
            Kind::Lie => match alg.retag(Kind::Lie) {
                Ok(l) => {
                    let v = violation_lines(&check_super_jacobi(&l)?);
                    (v.is_empty(), v)
                }
                Err(e) => (false, vec![e.to_string()]),
            },
            Kind::Leibniz => {
                let v = violation_lines(&check_super_leibniz(&alg.retag(Kind::Leibniz)?)?);
                (v.is_empty(), v)
            }
        };
        ok &= holds;
        human.push_str(&format!("required {kind} superalgebra: {}\n", yes(holds)));
        for w in &why {
            human.push_str(&format!("  {w}\n"));
        }
        required = json!({"kind": kind, "holds": holds, "violations": why});
    }

    let mut structure = Value::Null;
    let mut nilindex = Value::Null;
    if alg.is_parametric() {
        human.push_str("structure checks skipped: parametric structure constants\n");
    } else {
        let ann = right_annihilator(alg)?;
        let ann_ideal = is_two_sided_ideal(alg, &ann)?;
        ok &= ann_ideal;
        let mut skew = Value::Null;
        human.push_str(&format!(
            "annihilator: dim {}, two-sided ideal: {}\n",
            ann.dim(),
            yes(ann_ideal)
        ));
        if alg.kind() == Kind::Leibniz {
            let i = skew_ideal(alg)?;
            let inside = i.is_subspace_of(&ann);
            ok &= inside;
            human.push_str(&format!("skew ideal: dim {}, inside annihilator: {}\n", i.dim(), yes(inside)));
            skew = json!({"dim": i.dim(), "basis": subspace_names(alg, &i), "inside_annihilator": inside});
        }
        structure = json!({
            "annihilator": {"dim": ann.dim(), "basis": subspace_names(alg, &ann), "two_sided_ideal": ann_ideal},
            "skew_ideal": skew,
        });
        nilindex = match s_nilindex(alg) {
            Ok((p, q)) => {
                human.push_str(&format!("super-nilindex: ({p}, {q})\n"));
                json!({"nilpotent": true, "even": p, "odd": q})
            }
            Err(e) => {
                human.push_str(&format!("super-nilindex: undefined ({e})\n"));
                json!({"nilpotent": false, "reason": e.to_string()})
            }
        };
    }
    let details = json!({
        "input": "algebra",
        "name": alg.name(),
        "kind": alg.kind(),
        "dims": {"even": alg.n_even(), "odd": alg.n_odd()},
        "identity": {"name": identity_name, "holds": identity.is_empty(), "violations": identity},
        "required": required,
        "structure": structure,
        "nilindex": nilindex,
    });
    Ok(Outcome {
        verdict: Verdict::from_bool(ok),
        details,
        human,
        raw: false,
    })
}

fn check_cochain(c: &Cochain2) -> Result<Outcome, CliError> {
    let w = weight(c)?;
    let declared = c.declared_weight();
    let weight_ok = declared.map_or(true, |d| Some(d) == w);
    let cocycle = violation_lines(&cocycle_violations(c, Exec::Auto)?);
    let squares = violation_lines(&psi_compose_psi_violations(c, Exec::Auto));
    let ok = weight_ok && cocycle.is_empty() && squares.is_empty();
    let show = |w: Option<supergrade::deform::Weight>| w.map_or("none".to_string(), |w| w.to_string());
    let mut human = format!("cochain {} on {}\n", c.name(), c.base().name());
    human.push_str(&format!("weight: {} (declared {})\n", show(w), show(declared)));
    push_list(&mut human, "cocycle violations", &cocycle);
    push_list(&mut human, "square violations", &squares);
    let details = json!({
        "input": "cochain",
        "name": c.name(),
        "base": c.base().name(),
        "weight": w,
        "declared_weight": declared,
        "weight_matches": weight_ok,
        "cocycle": {"holds": cocycle.is_empty(), "violations": cocycle},
        "square": {"holds": squares.is_empty(), "violations": squares},
    });
    Ok(Outcome {
        verdict: Verdict::from_bool(ok),
        details,
        human,
        raw: false,
    })
}

fn load_algebra(path: &Path, limits: &Limits) -> Result<SuperAlgebra, CliError> {
    let alg = from_json(&read(path)?)?;
    cap(&alg, limits)?;
    Ok(alg)
}

fn witness_json(w: &LinearMap, source: &SuperAlgebra, target: &SuperAlgebra) -> BTreeMap<String, String> {
    (0..source.dim())
        .map(|j| {
            let img = format_vec_with(&w.image_of_basis(j), |i| target.basis_name(i).to_string());
            (source.basis_name(j).to_string(), img)
        })
        .collect()
}

fn natgrade_json(alg: &SuperAlgebra, ng: &NaturalGradedness) -> Value {
    let witness = match (&ng.witness, &ng.gr) {
        (Some(w), Some(gr)) => serde_json::to_value(witness_json(w, alg, gr)).expect("serializable"),
        _ => Value::Null,
    };
    json!({
        "naturally_graded": ng.naturally_graded,
        "stage": ng.stage,
        "reason": ng.reason,
        "adapted_basis": ng.used_adapted_basis,
        "layer_dims": ng.layers.iter().map(|(e, o)| json!({"even": e, "odd": o})).collect::<Vec<_>>(),
        "witness": witness,
    })
}

/// `gr`: natural layers, gradedness of the layer complements and the
/// natural-gradedness verdict with its witness.
pub fn gr(path: &Path, limits: &Limits) -> Result<Outcome, CliError> {
    let alg = load_algebra(path, limits)?;
    let layers = natural_layers(&alg)?;
    let ng = is_naturally_graded(&alg)?;
    let layer_json: Vec<Value> = layers
        .layers
        .iter()
        .map(|l| {
            json!({
                "even": l.even.iter().map(|v| dense_name(&alg, v)).collect::<Vec<_>>(),
                "odd": l.odd.iter().map(|v| dense_name(&alg, v)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let violations: Vec<String> = ng.graded.violations.iter().map(|v| v.message()).collect();
    let mut human = format!("algebra {}\n", alg.name());
    for (i, l) in layer_json.iter().enumerate() {
        human.push_str(&format!("layer {}: even {} | odd {}\n", i + 1, l["even"], l["odd"]));
    }
    human.push_str(&format!("graded: {}\n", yes(ng.graded.graded)));
    push_list(&mut human, "grading violations", &violations);
    human.push_str(&format!("naturally graded: {}\n", yes(ng.naturally_graded)));
    if let Some(r) = &ng.reason {
        human.push_str(&format!("reason: {r}\n"));
    }
    let witness = natgrade_json(&alg, &ng)["witness"].clone();
    if let Value::Object(m) = &witness {
        human.push_str("witness:\n");
        for (k, v) in m {
            human.push_str(&format!("  {k} -> {}\n", v.as_str().unwrap_or_default()));
        }
    }
    let details = json!({
        "layers": layer_json,
        "graded": ng.graded.graded,
        "violations": violations,
        "naturally_graded": ng.naturally_graded,
        "witness": witness,
    });
    Ok(Outcome {
        verdict: Verdict::from_bool(ng.graded.graded),
        details,
        human,
        raw: false,
    })
}

pub fn natgrade(path: &Path, limits: &Limits) -> Result<Outcome, CliError> {
    let alg = load_algebra(path, limits)?;
    let ng = is_naturally_graded(&alg)?;
    let details = natgrade_json(&alg, &ng);
    let mut human = format!("algebra {}\nnaturally graded: {}\n", alg.name(), yes(ng.naturally_graded));
    if let Some(r) = &ng.reason {
        human.push_str(&format!("reason: {r}\n"));
    }
    if let Value::Object(m) = &details["witness"] {
        human.push_str("witness:\n");
        for (k, v) in m {
            human.push_str(&format!("  {k} -> {}\n", v.as_str().unwrap_or_default()));
        }
    }
    Ok(Outcome {
        verdict: Verdict::from_bool(ng.naturally_graded),
        details,
        human,
        raw: false,
    })
}

pub struct ListFilter {
    pub kind: Option<Kind>,
    pub role: Option<Role>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub group: Option<String>,
}

pub fn catalog_list(f: ListFilter) -> Outcome {
    let filter = EntryFilter {
        kind: f.kind,
        role: f.role,
        n: f.n,
        m: f.m,
        group: f.group,
    };
    let list = catalog::list_entries(&filter);
    let mut human = String::new();
    for e in &list {
        let extra = if e.args.is_empty() {
            String::new()
        } else {
            format!(" args {}", e.args.join(","))
        };
        human.push_str(&format!(
            "{:<28} {:<8} {:<8} n {:<6} m {:<6}{extra}  {}\n",
            e.id,
            e.kind.to_string(),
            serde_json::to_value(e.role).expect("serializable").as_str().unwrap_or_default(),
            e.n.to_string(),
            e.m.to_string(),
            e.summary
        ));
    }
    human.push_str(&format!("{} entries\n", list.len()));
    Outcome {
        verdict: Verdict::Pass,
        details: json!({"entries": list}),
        human,
        raw: false,
    }
}

pub fn catalog_show(id: &str, args: Args, limits: &Limits) -> Result<Outcome, CliError> {
    let (n, m) = (args.n.unwrap_or(0), args.m.unwrap_or(0));
    if n + m > limits.max_dim {
        return Err(CliError::TooLarge {
            dim: n + m,
            max: limits.max_dim,
        });
    }
    let built = catalog::make(id, &args)?;
    let text = built.to_json();
    let value: Value = serde_json::from_str(&text).map_err(supergrade::Error::from)?;
    Ok(Outcome {
        verdict: Verdict::Pass,
        details: json!({"id": id, "object": value}),
        human: text,
        raw: true,
    })
}

/// Parses `name=value` pairs for catalog parameters.
pub fn parse_sets(sets: &[String]) -> Result<BTreeMap<String, Poly>, CliError> {
    let mut out = BTreeMap::new();
    for s in sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects name=value, got `{s}`")))?;
        out.insert(k.trim().to_string(), Poly::parse(v.trim())?);
    }
    Ok(out)
}

pub fn classify_list() -> Outcome {
    let list: Vec<Value> = scenarios()
        .iter()
        .map(|s| json!({"id": s.id, "title": s.title, "runs": s.runs.len()}))
        .collect();
    let mut human = String::new();
    for s in &list {
        let runs = s["runs"].as_u64().unwrap_or_default();
        human.push_str(&format!(
            "{:<14} {:>3} {:<5} {}\n",
            s["id"].as_str().unwrap_or_default(),
            runs,
            if runs == 1 { "run" } else { "runs" },
            s["title"].as_str().unwrap_or_default()
        ));
    }
    Outcome {
        verdict: Verdict::Pass,
        details: json!({"scenarios": list}),
        human,
        raw: false,
    }
}

pub fn classify_run(id: &str, seed: u64) -> Result<Outcome, CliError> {
    let sc = find_scenario(id)?;
    let report = run_scenario_with(&sc, Exec::Auto, seed)?;
    let mut details = serde_json::to_value(&report).map_err(supergrade::Error::from)?;
    details["seed"] = json!(seed);
    Ok(Outcome {
        verdict: Verdict::from_bool(report.matched),
        details,
        human: report.render(),
        raw: false,
    })
}

