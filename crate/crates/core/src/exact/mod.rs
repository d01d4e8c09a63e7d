//! Exact arithmetic: rationals, sparse polynomials over the rationals,
//! row reduction and linear factor extraction.

mod factor;
mod matrix;
mod parse;
mod poly;
mod rational;

pub use factor::{linear_factors, rational_roots, Factorization};
pub use matrix::{inverse, nullspace, rank, row_reduce, rref, solve, MatrixQ, RowReduced};
pub use parse::parse_poly;
pub use poly::{Monomial, Poly, Symbol};
pub use rational::{binomial, format_rational, rat, ratio, rational_sqrt, sign, Rational};
