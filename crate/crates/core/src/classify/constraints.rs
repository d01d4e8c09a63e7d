//! Polynomial equations read off identity residuals.

use crate::deform::{cocycle_violations, psi_compose_psi_violations, Cochain2};
use crate::error::Result;
use crate::par::Exec;
use crate::superalg::{check_identity_with, Kind, SuperAlgebra, Violation};

use super::solver::ConstraintSystem;

fn push_violations(sys: &mut ConstraintSystem, tag: &str, alg: &SuperAlgebra, violations: &[Violation]) {
    for v in violations {
        let (a, b, c) = &v.names;
        for (k, coeff) in &v.residual {
            sys.push(coeff.clone(), format!("{tag} ({a},{b},{c}) at {}", alg.basis_name(*k)));
        }
    }
}

/// Every coefficient of every identity residual of a parametric algebra.
/// The identity is super Jacobi for Lie algebras and super Leibniz otherwise.
pub fn extract_constraints(alg: &SuperAlgebra) -> ConstraintSystem {
    extract_constraints_with(alg, Exec::Auto)
}

pub fn extract_constraints_with(alg: &SuperAlgebra, exec: Exec) -> ConstraintSystem {
    let tag = match alg.kind() {
        Kind::Lie => "jacobi",
        Kind::Leibniz => "leibniz",
    };
    let mut sys = ConstraintSystem::default();
    push_violations(&mut sys, tag, alg, &check_identity_with(alg, exec));
    sys.deduplicated()
}

/// Conditions for `base + c` to be a law: the cocycle condition on `c`
/// followed by the vanishing of `c ∘ c` on every triple.
pub fn deformation_constraints(c: &Cochain2, exec: Exec) -> Result<ConstraintSystem> {
    let mut sys = ConstraintSystem::default();
    push_violations(&mut sys, "cocycle", c.base(), &cocycle_violations(c, exec)?);
    push_violations(&mut sys, "psi∘psi", c.base(), &psi_compose_psi_violations(c, exec));
    Ok(sys.deduplicated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make, Args};
    use crate::deform::{phi, psi};
    use crate::exact::Poly;

    #[test]
    fn valid_law_gives_no_equations() {
        let a = make("NG", &Args::dims(3, 4)).unwrap().algebra().unwrap();
        assert!(extract_constraints(&a).equations.is_empty());
    }

    #[test]
    fn psi_squares_obstruct() {
        let base = crate::catalog::lie_model(2, 5).unwrap();
        let p12 = phi(2, 5, 1).unwrap();
        let p211 = psi(2, 5, 2, 1).unwrap();
        let p321 = psi(2, 5, 3, 2).unwrap();
        let c = Cochain2::combine(
            "psi",
            &base,
            &[(Poly::one(), &p12), (Poly::var("a"), &p211), (Poly::var("b"), &p321)],
        )
        .unwrap();
        let sys = deformation_constraints(&c, Exec::Sequential).unwrap();
        let b2 = Poly::parse("b^2").unwrap();
        assert!(sys.equations.iter().any(|e| e.poly.proportional(&b2)));
        assert!(sys.equations.iter().all(|e| e.poly.variables().iter().all(|s| s.as_str() == "b")));
    }
}
