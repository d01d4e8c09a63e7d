use serde::Serialize;

use super::{add_scaled, SparseVec, SuperAlgebra};
use crate::error::{Error, Result};
use crate::exact::{row_reduce, MatrixQ, Poly};

/// Even linear map between superalgebras. Column `j` of `matrix` is the
/// image of source basis element `j` in target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub matrix: MatrixQ,
}

/// A basis pair where `f([a,b]) != [f a, f b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomViolation {
    pub pair: (String, String),
    pub residual: String,
}

impl LinearMap {
    pub fn new(source: &SuperAlgebra, target: &SuperAlgebra, matrix: MatrixQ) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::DimensionMismatch(format!(
                "map is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            )));
        }
        for j in 0..source.dim() {
            for i in 0..target.dim() {
                if source.parity(j) != target.parity(i) && !matrix.get(i, j).is_zero() {
                    return Err(Error::ParityMismatch(format!(
                        "{} is sent to a component on {}",
                        source.basis_name(j),
                        target.basis_name(i)
                    )));
                }
            }
        }
        Ok(LinearMap { matrix })
    }

    /// Builds a map from the images of the source basis.
    pub fn from_images(source: &SuperAlgebra, target: &SuperAlgebra, images: &[SparseVec]) -> Result<Self> {
        let mut m = MatrixQ::zeros(target.dim(), source.dim());
        for (j, v) in images.iter().enumerate() {
            for (i, c) in v {
                m.set(*i, j, c.clone());
            }
        }
        LinearMap::new(source, target, m)
    }

    pub fn image_of_basis(&self, j: usize) -> SparseVec {
        (0..self.matrix.rows())
            .filter(|&i| !self.matrix.get(i, j).is_zero())
            .map(|i| (i, self.matrix.get(i, j).clone()))
            .collect()
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v {
            add_scaled(&mut out, &self.image_of_basis(*j), c);
        }
        out
    }

    /// Invertibility of a parameter-free square map.
    pub fn is_invertible(&self) -> Result<bool> {
        if self.matrix.rows() != self.matrix.cols() {
            return Ok(false);
        }
        Ok(row_reduce(&self.matrix)?.rank == self.matrix.rows())
    }
}

/// Basis pairs on which `f` fails to be a homomorphism; empty when it is one.
pub fn verify_homomorphism(f: &LinearMap, source: &SuperAlgebra, target: &SuperAlgebra) -> Vec<HomViolation> {
    let n = source.dim();
    let images: Vec<SparseVec> = (0..n).map(|j| f.image_of_basis(j)).collect();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let lhs = f.apply(source.bracket(a, b));
            let rhs = target.mul(&images[a], &images[b]);
            let mut r = lhs;
            add_scaled(&mut r, &rhs, &Poly::int(-1));
            if !r.is_empty() {
                out.push(HomViolation {
                    pair: (source.basis_name(a).to_string(), source.basis_name(b).to_string()),
                    residual: target.format_vec(&r),
                });
            }
        }
    }
    out
}

/// Structure constants in a new basis. Column `k` of `basis` expresses the
/// new basis element `k` in old coordinates and `inverse` is its inverse.
/// The result is tagged with the old algebra's kind.
pub fn transport(
    alg: &SuperAlgebra,
    basis: &MatrixQ,
    inverse: &MatrixQ,
    name: impl Into<String>,
    even: Vec<String>,
    odd: Vec<String>,
) -> Result<SuperAlgebra> {
    let n = alg.dim();
    if basis.rows() != n || basis.cols() != n || inverse.rows() != n || inverse.cols() != n {
        return Err(Error::DimensionMismatch("change of basis must be square".into()));
    }
    if basis.mul(inverse)? != MatrixQ::identity(n) {
        return Err(Error::Precondition("supplied inverse does not invert the basis change".into()));
    }
    let cols: Vec<SparseVec> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| !basis.get(i, j).is_zero())
                .map(|i| (i, basis.get(i, j).clone()))
                .collect()
        })
        .collect();
    let to_new = |v: &SparseVec| -> SparseVec {
        let dense: Vec<Poly> = (0..n).map(|i| v.get(&i).cloned().unwrap_or_else(Poly::zero)).collect();
        inverse
            .apply(&dense)
            .expect("square")
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect()
    };
    let mut b = super::Builder::new(name, alg.kind(), even, odd);
    if b.n_even() != alg.n_even() || b.n_odd() != alg.n_odd() {
        return Err(Error::DimensionMismatch("new basis names do not match the parity split".into()));
    }
    for a in 0..n {
        for c in 0..n {
            if alg.kind() == super::Kind::Lie && !super::is_canonical(a, c, alg.parity(a), alg.parity(c)) {
                continue;
            }
            let prod = to_new(&alg.mul(&cols[a], &cols[c]));
            for (k, v) in prod {
                b.add(a, c, k, v);
            }
        }
    }
    b.build()
}
