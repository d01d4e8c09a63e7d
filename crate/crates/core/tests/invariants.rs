use std::collections::BTreeMap;

use proptest::prelude::*;
use supergrade::catalog;
use supergrade::exact::{inverse, nullspace, rank, rat, ratio, MatrixQ, Poly, Rational, Symbol};
use supergrade::superalg::{
    basis_names, check_identity, check_super_leibniz, io, transport, verify_homomorphism, Builder, Kind, LinearMap,
    SuperAlgebra,
};

const VARS: [&str; 3] = ["a", "b", "c"];

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((small_rational(), 0u32..3, 0u32..3, 0u32..2), 0..5).prop_map(|terms| {
        let mut p = Poly::zero();
        for (c, ea, eb, ec) in terms {
            let t = Poly::constant(c) * Poly::var("a").pow(ea) * Poly::var("b").pow(eb) * Poly::var("c").pow(ec);
            p += &t;
        }
        p
    })
}

fn point() -> impl Strategy<Value = BTreeMap<Symbol, Rational>> {
    prop::collection::vec(small_rational(), 3)
        .prop_map(|v| VARS.iter().zip(v).map(|(s, q)| (Symbol::new(s), q)).collect())
}

fn matrix(max: usize) -> impl Strategy<Value = (usize, Vec<Vec<Rational>>)> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        (Just(c), prop::collection::vec(prop::collection::vec((-3i64..=3).prop_map(rat), c), r))
    })
}

fn to_matrix(rows: &[Vec<Rational>]) -> MatrixQ {
    MatrixQ::from_rational_rows(rows, rows.len())
}

fn rebased(a: &SuperAlgebra, rows: &[Vec<Rational>]) -> (SuperAlgebra, MatrixQ) {
    let basis = to_matrix(rows);
    let inv = to_matrix(&inverse(rows).expect("unitriangular"));
    let b = transport(a, &basis, &inv, "rebased", a.even_basis().to_vec(), a.odd_basis().to_vec()).unwrap();
    (b, basis)
}

/// Algebras whose identity holds, one per kind of source.
fn sound_algebras() -> Vec<SuperAlgebra> {
    vec![
        catalog::lie_model(3, 3).unwrap(),
        catalog::nongraded().unwrap(),
        catalog::make("L+phi12", &catalog::Args::dims(3, 4)).unwrap().algebra().unwrap(),
        catalog::make("L+phibar24", &catalog::Args::dims(5, 3)).unwrap().algebra().unwrap(),
        catalog::ng(3, 4).unwrap(),
        catalog::make("mu9", &catalog::Args::dims(4, 3)).unwrap().algebra().unwrap(),
    ]
}

/// Random Leibniz-kind tables with parity-consistent products.
fn random_table() -> impl Strategy<Value = SuperAlgebra> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(ne, no)| {
        let n = ne + no;
        prop::collection::vec((0..n, 0..n, 0..n, small_rational()), 0..8).prop_map(move |entries| {
            let mut b = Builder::new("random", Kind::Leibniz, basis_names("X", 1, ne), basis_names("Y", 1, no));
            for (x, y, z, c) in entries {
                let parity = |i: usize| usize::from(i >= ne);
                if (parity(x) + parity(y)) % 2 == parity(z) {
                    b.add(x, y, z, Poly::constant(c));
                }
            }
            b.build().unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(p.clone() * q.clone(), q.clone() * p.clone());
        prop_assert_eq!((p.clone() + q.clone()) * r.clone(), p.clone() * r.clone() + q.clone() * r.clone());
        prop_assert_eq!(p.clone() - p.clone(), Poly::zero());
        prop_assert_eq!(p.clone() * Poly::one(), p);
    }

    #[test]
    fn evaluation_is_a_ring_map(p in poly(), q in poly(), at in point()) {
        let (vp, vq) = (p.eval(&at).unwrap(), q.eval(&at).unwrap());
        prop_assert_eq!((p.clone() * q.clone()).eval(&at).unwrap(), &vp * &vq);
        prop_assert_eq!((p + q).eval(&at).unwrap(), vp + vq);
    }

    #[test]
    fn poly_text_round_trip(p in poly()) {
        prop_assert_eq!(Poly::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn substitution_then_eval(p in poly(), q in poly(), at in point()) {
        let a = Symbol::new("a");
        let composed = p.subst_one(&a, &q);
        let mut inner = at.clone();
        inner.insert(a, q.eval(&at).unwrap());
        prop_assert_eq!(composed.eval(&at).unwrap(), p.eval(&inner).unwrap());
    }

    #[test]
    fn rank_nullity((cols, rows) in matrix(5)) {
        let kernel = nullspace(&rows, cols);
        prop_assert_eq!(rank(&rows, cols) + kernel.len(), cols);
        for v in &kernel {
            for row in &rows {
                let dot: Rational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                prop_assert_eq!(dot, rat(0));
            }
        }
    }

    #[test]
    fn inverse_inverts((_, rows) in matrix(4)) {
        let square: Vec<Vec<Rational>> = rows.iter().map(|r| {
            let mut r = r.clone();
            r.resize(rows.len(), rat(0));
            r
        }).collect();
        let n = square.len();
        match inverse(&square) {
            Some(inv) => {
                let prod = to_matrix(&square).mul(&to_matrix(&inv)).unwrap();
                prop_assert_eq!(prod, MatrixQ::identity(n));
            }
            None => prop_assert!(rank(&square, n) < n),
        }
    }

    #[test]
    fn identities_survive_basis_change(pick in 0usize..6, seed in prop::collection::vec(-2i64..=2, 64)) {
        let a = &sound_algebras()[pick];
        let (ne, no) = (a.n_even(), a.n_odd());
        let n = ne + no;
        // upper unitriangular on each parity block, so invertible and even
        let rows: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| {
            if i == j { rat(1) } else if (i < ne) == (j < ne) && i < j { rat(seed[(i * n + j) % seed.len()]) } else { rat(0) }
        }).collect()).collect();
        let (b, basis) = rebased(a, &rows);
        prop_assert!(check_identity(&b).is_empty());
        let f = LinearMap::new(&b, a, basis).unwrap();
        prop_assert!(verify_homomorphism(&f, &b, a).is_empty());
        if a.kind() == Kind::Lie {
            prop_assert!(check_super_leibniz(&b.retag(Kind::Leibniz).unwrap()).unwrap().is_empty());
        }
    }

    #[test]
    fn json_round_trip(a in random_table()) {
        let back = io::from_json(&io::to_json(&a)).unwrap();
        prop_assert!(back.same_structure(&a));
        prop_assert_eq!(back.kind(), a.kind());
    }
}
