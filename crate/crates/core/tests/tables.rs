//! Reference multiplication tables, transcribed by hand and loaded through the
//! JSON route, compared with the catalog (which builds laws from cochains or
//! its own tables).

use serde_json::json;
use supergrade::catalog::{make, Args};
use supergrade::exact::Poly;
use supergrade::superalg::{check_identity, io, Kind, SuperAlgebra};

/// `(left, right, coefficient, result)`.
type Entry<'a> = (&'a str, &'a str, &'a str, &'a str);

fn x(i: usize) -> String {
    format!("X{i}")
}

fn y(j: usize) -> String {
    format!("Y{j}")
}

fn load(kind: Kind, even: Vec<String>, m: usize, entries: Vec<(String, String, String, String)>, params: &[&str]) -> SuperAlgebra {
    let products: Vec<_> = entries
        .iter()
        .map(|(l, r, c, b)| json!({"left": l, "right": r, "result": [{"basis": b, "coeff": c}]}))
        .collect();
    let file = json!({
        "name": "reference",
        "kind": kind,
        "even_basis": even,
        "odd_basis": (1..=m).map(y).collect::<Vec<_>>(),
        "parameters": params,
        "products": products,
    });
    io::from_json(&file.to_string()).unwrap()
}

fn owned(extra: &[Entry]) -> Vec<(String, String, String, String)> {
    extra.iter().map(|(l, r, c, b)| (l.to_string(), r.to_string(), c.to_string(), b.to_string())).collect()
}

/// `L^{n,m}` products followed by the extra reference products.
fn lie(n: usize, m: usize, extra: &[Entry], params: &[&str]) -> SuperAlgebra {
    let mut e = Vec::new();
    for i in 1..n {
        e.push((x(0), x(i), "1".into(), x(i + 1)));
    }
    for j in 1..m {
        e.push((x(0), y(j), "1".into(), y(j + 1)));
    }
    e.extend(owned(extra));
    load(Kind::Lie, (0..=n).map(x).collect(), m, e, params)
}

/// Leibniz model products `[Xi,X1] = X(i+1)`, `[Yj,X1] = Y(j+1)` plus extras.
fn leib(n: usize, m: usize, extra: &[Entry], params: &[&str]) -> SuperAlgebra {
    let mut e = Vec::new();
    for i in 1..n {
        e.push((x(i), x(1), "1".into(), x(i + 1)));
    }
    for j in 1..m {
        e.push((y(j), x(1), "1".into(), y(j + 1)));
    }
    e.extend(owned(extra));
    load(Kind::Leibniz, (1..=n).map(x).collect(), m, e, params)
}

fn catalog(id: &str, n: usize, m: usize) -> SuperAlgebra {
    make(id, &Args::dims(n, m)).unwrap().algebra().unwrap()
}

fn diff_names(a: &SuperAlgebra, b: &SuperAlgebra) -> Vec<String> {
    a.structure_diff(b)
        .into_iter()
        // Lie storage reports both orders of a pair
        .filter(|(i, j)| a.kind() == Kind::Leibniz || i <= j)
        .map(|(i, j)| format!("[{},{}]", a.basis_name(i), a.basis_name(j)))
        .collect()
}

fn assert_same(id: &str, n: usize, m: usize, reference: &SuperAlgebra) {
    let built = catalog(id, n, m);
    assert!(built.same_structure(reference), "{id} ({n},{m}) differs at {:?}", diff_names(&built, reference));
}

const PHI12: [Entry; 2] = [("Y1", "Y1", "1", "X2"), ("Y1", "Y2", "1/2", "X3")];

#[test]
fn lie_n2() {
    for m in 1..=6 {
        assert_same("L+phi12", 2, m, &lie(2, m, &[("Y1", "Y1", "1", "X2")], &[]));
    }
}

#[test]
fn lie_n3() {
    for m in 2..=6 {
        assert_same("L+phi12", 3, m, &lie(3, m, &PHI12, &[]));
        let mut extra = PHI12.to_vec();
        let names: Vec<(String, String)> = (1..m).map(|j| (y(j), y(j + 1))).collect();
        for (a, b) in &names {
            extra.push(("X1", a, "1", b));
        }
        assert_same("L+phi12+psi211", 3, m, &lie(3, m, &extra, &[]));
    }
    let mut extra = PHI12.to_vec();
    extra.extend([("X1", "Y3", "1", "Y4"), ("X2", "Y2", "-1", "Y4"), ("X3", "Y1", "1", "Y4")]);
    assert_same("L+phi12+psi431", 3, 4, &lie(3, 4, &extra, &[]));
}

#[test]
fn lie_m2_m3() {
    let reference = lie(4, 2, &[("Y1", "Y1", "2", "X2"), ("Y1", "Y2", "1", "X3"), ("Y2", "Y2", "1", "X4")], &[]);
    assert_same("L+phibar24", 4, 2, &reference);

    let phi24 = [("Y1", "Y3", "-1", "X4"), ("Y2", "Y2", "1", "X4")];
    assert_same("L+phi24", 4, 3, &lie(4, 3, &phi24, &[]));

    let tfam = [
        ("Y1", "Y1", "1", "X2"),
        ("Y1", "Y2", "1/2", "X3"),
        ("Y1", "Y3", "1/2 - t", "X4"),
        ("Y2", "Y2", "t", "X4"),
    ];
    assert_same("L+phi12+tphi24", 4, 3, &lie(4, 3, &tfam, &["t"]));

    let four = [
        ("X1", "Y1", "1", "Y2"),
        ("X1", "Y2", "1", "Y3"),
        ("Y1", "Y1", "4", "X2"),
        ("Y1", "Y2", "2", "X3"),
        ("Y1", "Y3", "1", "X4"),
        ("Y2", "Y2", "1", "X4"),
    ];
    assert_same("L+4phi12+phi24+psi211", 4, 3, &lie(4, 3, &four, &[]));

    let bar24 = [
        ("Y1", "Y1", "3", "X2"),
        ("Y1", "Y2", "3/2", "X3"),
        ("Y1", "Y3", "1/2", "X4"),
        ("Y2", "Y2", "1", "X4"),
        ("Y2", "Y3", "1/2", "X5"),
    ];
    assert_same("L+phibar24", 5, 3, &lie(5, 3, &bar24, &[]));

    let bar36 = [
        ("Y1", "Y1", "6", "X2"),
        ("Y1", "Y2", "3", "X3"),
        ("Y1", "Y3", "1", "X4"),
        ("Y2", "Y2", "2", "X4"),
        ("Y2", "Y3", "1", "X5"),
        ("Y3", "Y3", "1", "X6"),
    ];
    assert_same("L+phibar36", 6, 3, &lie(6, 3, &bar36, &[]));
}

#[test]
fn reference_second_law_differs_only_at_x2_y1() {
    let reference = [
        ("X1", "Y1", "1", "Y2"),
        ("X1", "Y2", "-1", "Y3"),
        ("X2", "Y1", "1", "Y3"),
        ("Y1", "Y3", "-1", "X4"),
        ("Y2", "Y2", "1", "X4"),
    ];
    let reference = lie(4, 3, &reference, &[]);
    let built = catalog("L+phi24+psi211+2psi321", 4, 3);
    assert_eq!(diff_names(&built, &reference), ["[X2,Y1]"]);
    let (x2, y1) = (built.index_of("X2").unwrap(), built.index_of("Y1").unwrap());
    assert_eq!(built.format_vec(built.bracket(x2, y1)), "2*Y3");
}

#[test]
fn leibniz_low() {
    let mu1a = leib(2, 2, &[("Y1", "Y1", "1", "X2"), ("X1", "Y1", "alpha", "Y2")], &["alpha"]);
    assert_same("mu1", 2, 2, &mu1a);
    assert_same("mu2", 3, 2, &leib(3, 2, &[("Y1", "Y1", "1", "X2"), ("Y2", "Y1", "1", "X3")], &[]));
    let mu3 = [("X1", "Y1", "-1", "Y2"), ("Y1", "Y2", "1", "X3"), ("Y1", "Y1", "1", "X2")];
    assert_same("mu3", 3, 2, &leib(3, 2, &mu3, &[]));
    assert_same("mu1", 2, 3, &leib(2, 3, &[("Y1", "Y1", "1", "X2")], &[]));
    let mu3 = [("X1", "Y1", "-1", "Y2"), ("X1", "Y2", "-1", "Y3"), ("Y1", "Y1", "1", "X2")];
    assert_same("mu3", 2, 3, &leib(2, 3, &mu3, &[]));
    assert_same("mu1", 3, 3, &leib(3, 3, &[("Y1", "Y2", "1", "X3"), ("Y2", "Y1", "-1", "X3")], &[]));
    let mu9 = [
        ("Y1", "Y3", "1", "X4"),
        ("Y2", "Y2", "-1", "X4"),
        ("X1", "Y1", "-1", "Y2"),
        ("Y3", "Y1", "1", "X4"),
        ("X1", "Y2", "-1", "Y3"),
    ];
    assert_same("mu9", 4, 3, &leib(4, 3, &mu9, &[]));
    let mu12 = [("Y1", "Y1", "1", "X2"), ("Y2", "Y1", "1", "X3"), ("Y3", "Y1", "1", "X4")];
    assert_same("mu12", 4, 3, &leib(4, 3, &mu12, &[]));
    for m in 4..=7 {
        assert_same("mu-m-1", 2, m, &leib(2, m, &[("Y1", "Y1", "1", "X2")], &[]));
    }
}

#[test]
fn reference_mu8_misses_one_product_and_fails() {
    let reference = leib(
        3,
        3,
        &[("X1", "Y2", "-1", "Y3"), ("Y1", "Y1", "1", "X2"), ("Y1", "Y2", "1", "X3")],
        &[],
    );
    let v = check_identity(&reference);
    assert!(!v.is_empty());
    assert!(v.iter().any(|v| v.names == ("X1".into(), "Y1".into(), "X1".into())));
    let built = catalog("mu8", 3, 3);
    assert!(check_identity(&built).is_empty());
    assert_eq!(diff_names(&built, &reference), ["[X1,Y1]"]);
}

#[test]
fn reference_mu_m_plus_1_starts_too_late() {
    for m in 4..=7 {
        let mut extra = vec![("Y1".to_string(), "Y1".to_string(), "1".to_string(), "X2".to_string())];
        for j in 2..m {
            extra.push((x(1), y(j), "-1".into(), y(j + 1)));
        }
        let reference = {
            let mut e: Vec<_> = (1..m).map(|j| (y(j), x(1), "1".to_string(), y(j + 1))).collect();
            e.push((x(1), x(1), "1".into(), x(2)));
            e.extend(extra);
            load(Kind::Leibniz, vec![x(1), x(2)], m, e, &[])
        };
        assert!(!check_identity(&reference).is_empty(), "m={m}");
        let built = catalog("mu-m+1", 2, m);
        assert!(check_identity(&built).is_empty(), "m={m}");
        assert_eq!(diff_names(&built, &reference), ["[X1,Y1]"]);
    }
}

#[test]
fn ng_matches_its_definition() {
    for n in 3..=7 {
        for m in 4..=7 {
            let extra: Vec<(String, String, String, String)> =
                (1..=(n - 1).min(m)).map(|i| (y(i), y(1), "1".to_string(), x(i + 1))).collect();
            let mut e: Vec<_> = (1..n).map(|i| (x(i), x(1), "1".to_string(), x(i + 1))).collect();
            e.extend((1..m).map(|j| (y(j), x(1), "1".to_string(), y(j + 1))));
            e.extend(extra);
            let reference = load(Kind::Leibniz, (1..=n).map(x).collect(), m, e, &[]);
            assert_same("NG", n, m, &reference);
        }
    }
}

#[test]
fn symbolic_t_family_specializes() {
    let built = catalog("L+phi12+tphi24", 4, 3);
    let at_half = built.subst(&[(supergrade::exact::Symbol::new("t"), Poly::parse("1/2").unwrap())].into());
    let (y1, y3) = (built.index_of("Y1").unwrap(), built.index_of("Y3").unwrap());
    assert_eq!(built.format_vec(built.bracket(y1, y3)), "(-t + 1/2)*X4");
    assert_eq!(at_half.format_vec(at_half.bracket(y1, y3)), "0");
}
