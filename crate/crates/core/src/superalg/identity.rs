use serde::Serialize;

use super::{add_scaled, koszul, Kind, SparseVec, SuperAlgebra};
use crate::error::{Error, Result};
use crate::exact::Poly;
use crate::par::{map_range, Exec};

/// Nonzero residual of an identity on a basis triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub triple: (usize, usize, usize),
    pub names: (String, String, String),
    #[serde(skip)]
    pub residual: SparseVec,
    pub residual_text: String,
}

impl Violation {
    pub(crate) fn new(alg: &SuperAlgebra, t: (usize, usize, usize), residual: SparseVec) -> Self {
        Violation {
            triple: t,
            names: (
                alg.basis_name(t.0).to_string(),
                alg.basis_name(t.1).to_string(),
                alg.basis_name(t.2).to_string(),
            ),
            residual_text: alg.format_vec(&residual),
            residual,
        }
    }
}

/// `(-1)^{|x||z|}[x,[y,z]] + (-1)^{|y||x|}[y,[z,x]] + (-1)^{|z||y|}[z,[x,y]]`.
pub fn jacobi_residual(alg: &SuperAlgebra, x: usize, y: usize, z: usize) -> SparseVec {
    let (px, py, pz) = (alg.parity(x), alg.parity(y), alg.parity(z));
    let mut out = SparseVec::new();
    let t1 = alg.mul_basis_left(x, alg.bracket(y, z));
    add_scaled(&mut out, &t1, &Poly::int(koszul(px, pz)));
    let t2 = alg.mul_basis_left(y, alg.bracket(z, x));
    add_scaled(&mut out, &t2, &Poly::int(koszul(py, px)));
    let t3 = alg.mul_basis_left(z, alg.bracket(x, y));
    add_scaled(&mut out, &t3, &Poly::int(koszul(pz, py)));
    out
}

/// `[x,[y,z]] - [[x,y],z] + (-1)^{|y||z|}[[x,z],y]`.
pub fn leibniz_residual(alg: &SuperAlgebra, x: usize, y: usize, z: usize) -> SparseVec {
    let mut out = alg.mul_basis_left(x, alg.bracket(y, z));
    let t2 = alg.mul_basis_right(alg.bracket(x, y), z);
    add_scaled(&mut out, &t2, &Poly::int(-1));
    let t3 = alg.mul_basis_right(alg.bracket(x, z), y);
    add_scaled(&mut out, &t3, &Poly::int(koszul(alg.parity(y), alg.parity(z))));
    out
}

fn sweep(
    alg: &SuperAlgebra,
    exec: Exec,
    f: fn(&SuperAlgebra, usize, usize, usize) -> SparseVec,
) -> Vec<Violation> {
    let n = alg.dim();
    map_range(exec, n, |x| {
        let mut found = Vec::new();
        for y in 0..n {
            for z in 0..n {
                let r = f(alg, x, y, z);
                if !r.is_empty() {
                    found.push(Violation::new(alg, (x, y, z), r));
                }
            }
        }
        found
    })
    .into_iter()
    .flatten()
    .collect()
}

pub fn check_super_jacobi(alg: &SuperAlgebra) -> Result<Vec<Violation>> {
    check_super_jacobi_with(alg, Exec::Auto)
}

pub fn check_super_jacobi_with(alg: &SuperAlgebra, exec: Exec) -> Result<Vec<Violation>> {
    if alg.kind() != Kind::Lie {
        return Err(Error::WrongKind { expected: "lie" });
    }
    Ok(sweep(alg, exec, jacobi_residual))
}

pub fn check_super_leibniz(alg: &SuperAlgebra) -> Result<Vec<Violation>> {
    check_super_leibniz_with(alg, Exec::Auto)
}

pub fn check_super_leibniz_with(alg: &SuperAlgebra, exec: Exec) -> Result<Vec<Violation>> {
    if alg.kind() != Kind::Leibniz {
        return Err(Error::WrongKind { expected: "leibniz" });
    }
    Ok(sweep(alg, exec, leibniz_residual))
}

/// Runs the identity matching the algebra's kind.
pub fn check_identity(alg: &SuperAlgebra) -> Vec<Violation> {
    check_identity_with(alg, Exec::Auto)
}

pub fn check_identity_with(alg: &SuperAlgebra, exec: Exec) -> Vec<Violation> {
    match alg.kind() {
        Kind::Lie => sweep(alg, exec, jacobi_residual),
        Kind::Leibniz => sweep(alg, exec, leibniz_residual),
    }
}

/// Pairs `(a, b)` with `[a,b] + (-1)^{|a||b|}[b,a] != 0`.
pub fn skew_violations(alg: &SuperAlgebra) -> Vec<(usize, usize, SparseVec)> {
    let n = alg.dim();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut r = alg.bracket(a, b).clone();
            add_scaled(&mut r, alg.bracket(b, a), &Poly::int(koszul(alg.parity(a), alg.parity(b))));
            if !r.is_empty() {
                out.push((a, b, r));
            }
        }
    }
    out
}

/// Super skew-symmetric and satisfying the super Jacobi identity, whatever
/// the stored kind.
pub fn is_lie_superalgebra(alg: &SuperAlgebra) -> bool {
    skew_violations(alg).is_empty() && sweep(alg, Exec::Auto, jacobi_residual).is_empty()
}
